//! The `.dt` input language: lexer, parser, canonical printer, and the
//! translation from parsed documents to engine inputs.
//!
//! A document is a sequence of `.`-terminated statements; `#` starts a
//! comment that runs to the end of the line.
//!
//! ```text
//! atoms t_1, t_2, t_3.                 # world-model atom registry
//! domain {tweety, opus}.               # constants for grounding
//! fact: quaker & republican.          # background knowledge
//! default d1(X): bird(X) : flies(X) / flies(X).
//! world 010 weight 1/3.                # one bit per declared atom
//! candidate: ~t_1.                     # warrant candidate
//! aggregate: t_1 | t_2 | t_3.          # the candidate conditions target
//! condition: t_2 & t_3.                # undercutting condition
//! set gate on.                         # engine configuration
//! ```
//!
//! Formulas use `~` (negation), `&` (conjunction), `|` (disjunction),
//! `->` (implication, right-associative), `<->` (biconditional,
//! right-associative), the connectives `exactly_one(...)` and
//! `at_least_one(...)`, and the constants `true` / `false`. Precedence,
//! loosest first: `<->`, `->`, `|`, `&`, `~`. Identifiers match
//! `[a-z][a-z0-9_]*`; a leading uppercase letter marks a schema variable,
//! legal only inside a parameterised `default`. Rationals are written
//! `p/q`, as integers, or as decimals (parsed exactly).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nmr_core::defaults::{DefaultRule, DefaultTheory};
use nmr_core::defeat::{EngineConfig, GateMode, RelevanceMode, WarrantInput};
use nmr_core::logic::{assignments, Atom, Formula, Pattern};
use nmr_core::prob::WorldModel;
use nmr_core::Rational;

use crate::error::{CliError, Result};

// ---------------------------------------------------------------------------
// Tokens

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Number(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Slash,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Var(s) => write!(f, "variable `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, column: col, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| toks.push(Token { tok, line: tl, col: tc });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            _ if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '(' | ')' | '{' | '}' | ',' | '.' | ':' | '/' | '~' | '&' | '|' => {
                push(match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '/' => Tok::Slash,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    _ => Tok::Pipe,
                });
                i += 1;
                col += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow);
                    i += 2;
                    col += 2;
                } else {
                    return Err(err_at(tl, tc, "expected `->` after `-`"));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    push(Tok::Iff);
                    i += 3;
                    col += 3;
                } else {
                    return Err(err_at(tl, tc, "expected `<->` after `<`"));
                }
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                // `p/q` and `p.q` continue the number only when a digit
                // follows, so a statement-terminating `.` stays a dot.
                for sep in ['/', '.'] {
                    if chars.get(i) == Some(&sep)
                        && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                    {
                        i += 1;
                        col += 1;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                            col += 1;
                        }
                        break;
                    }
                }
                push(Tok::Number(chars[start..i].iter().collect()));
            }
            'a'..='z' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_lowercase()
                        || chars[i].is_ascii_digit()
                        || chars[i] == '_')
                {
                    i += 1;
                    col += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()));
            }
            'A'..='Z' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                push(Tok::Var(chars[start..i].iter().collect()));
            }
            _ => return Err(err_at(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Abstract document

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefaultDecl {
    pub id: String,
    pub params: Vec<String>,
    pub prerequisite: Pattern,
    pub justifications: Vec<Pattern>,
    pub consequent: Pattern,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldDecl {
    pub bits: String,
    pub weight: Rational,
}

/// A parsed `.dt` document, grouped by statement kind. Statement order
/// within a kind is preserved; order across kinds is not significant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub atoms: Vec<String>,
    pub domain: Vec<String>,
    pub settings: Vec<(String, String)>,
    pub facts: Vec<Pattern>,
    pub defaults: Vec<DefaultDecl>,
    pub worlds: Vec<WorldDecl>,
    pub candidates: Vec<Pattern>,
    pub aggregate: Option<Pattern>,
    pub conditions: Vec<Pattern>,
}

/// Names with a fixed meaning in formula position.
const RESERVED: &[&str] = &["true", "false", "exactly_one", "at_least_one"];

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(err_at(t.line, t.col, message))
    }

    fn expect(&mut self, tok: Tok, context: &str) -> Result<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.fail(format!("expected {tok} {context}, found {}", self.peek().tok))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Token)> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => Ok((name, self.bump())),
            other => self.fail(format!("expected {what}, found {other}")),
        }
    }

    fn expect_number(&mut self, what: &str) -> Result<(String, Token)> {
        match self.peek().tok.clone() {
            Tok::Number(raw) => Ok((raw, self.bump())),
            other => self.fail(format!("expected {what}, found {other}")),
        }
    }

    // -- statements --------------------------------------------------------

    fn document(&mut self) -> Result<Document> {
        let mut doc = Document::default();
        while self.peek().tok != Tok::Eof {
            let (kw, kw_tok) = match self.peek().tok.clone() {
                Tok::Ident(name) => (name, self.bump()),
                other => {
                    return self.fail(format!(
                        "expected a statement keyword (atoms, domain, fact, default, \
                         world, candidate, aggregate, condition, set), found {other}"
                    ))
                }
            };
            match kw.as_str() {
                "atoms" => {
                    doc.atoms.extend(self.ident_list("an atom name")?);
                    self.expect(Tok::Dot, "to end the statement")?;
                }
                "domain" => {
                    self.expect(Tok::LBrace, "to open the constant list")?;
                    doc.domain.extend(self.ident_list("a domain constant")?);
                    self.expect(Tok::RBrace, "to close the constant list")?;
                    self.expect(Tok::Dot, "to end the statement")?;
                }
                "fact" => doc.facts.push(self.formula_statement()?),
                "candidate" => doc.candidates.push(self.formula_statement()?),
                "condition" => doc.conditions.push(self.formula_statement()?),
                "aggregate" => {
                    if doc.aggregate.is_some() {
                        return Err(err_at(
                            kw_tok.line,
                            kw_tok.col,
                            "duplicate aggregate statement (at most one is allowed)",
                        ));
                    }
                    doc.aggregate = Some(self.formula_statement()?);
                }
                "default" => doc.defaults.push(self.default_statement()?),
                "world" => doc.worlds.push(self.world_statement()?),
                "set" => {
                    let (key, _) = self.expect_ident("a setting name")?;
                    let value = match self.peek().tok.clone() {
                        Tok::Ident(v) | Tok::Number(v) => {
                            self.bump();
                            v
                        }
                        other => {
                            return self.fail(format!("expected a setting value, found {other}"))
                        }
                    };
                    self.expect(Tok::Dot, "to end the statement")?;
                    doc.settings.push((key, value));
                }
                other => {
                    return Err(err_at(
                        kw_tok.line,
                        kw_tok.col,
                        format!(
                            "unknown statement keyword `{other}` (expected atoms, domain, \
                             fact, default, world, candidate, aggregate, condition, or set)"
                        ),
                    ))
                }
            }
        }
        Ok(doc)
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<String>> {
        let mut names = Vec::new();
        loop {
            let (name, tok) = self.expect_ident(what)?;
            if RESERVED.contains(&name.as_str()) {
                return Err(err_at(
                    tok.line,
                    tok.col,
                    format!("`{name}` is a reserved word and cannot be {what}"),
                ));
            }
            names.push(name);
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                return Ok(names);
            }
        }
    }

    fn formula_statement(&mut self) -> Result<Pattern> {
        self.expect(Tok::Colon, "after the statement keyword")?;
        let f = self.formula()?;
        self.expect(Tok::Dot, "to end the statement")?;
        Ok(f)
    }

    fn default_statement(&mut self) -> Result<DefaultDecl> {
        let (id, _) = self.expect_ident("a rule id")?;
        let mut params = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            loop {
                match self.peek().tok.clone() {
                    Tok::Var(v) => {
                        self.bump();
                        if params.contains(&v) {
                            return self
                                .fail(format!("duplicate parameter `{v}` in rule `{id}`"));
                        }
                        params.push(v);
                    }
                    other => {
                        return self.fail(format!(
                            "expected a schema variable (uppercase), found {other}"
                        ))
                    }
                }
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen, "to close the parameter list")?;
        }
        self.expect(Tok::Colon, "before the prerequisite")?;
        let prerequisite = self.formula()?;
        self.expect(Tok::Colon, "before the justifications")?;
        let mut justifications = vec![self.formula()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            justifications.push(self.formula()?);
        }
        self.expect(Tok::Slash, "before the consequent")?;
        let consequent = self.formula()?;
        self.expect(Tok::Dot, "to end the statement")?;
        Ok(DefaultDecl { id, params, prerequisite, justifications, consequent })
    }

    fn world_statement(&mut self) -> Result<WorldDecl> {
        let (bits, bits_tok) = self.expect_number("a world assignment (a string of 0s and 1s)")?;
        if !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(err_at(
                bits_tok.line,
                bits_tok.col,
                format!("world assignment `{bits}` must contain only 0s and 1s"),
            ));
        }
        match self.expect_ident("`weight`")? {
            (kw, _) if kw == "weight" => {}
            (other, tok) => {
                return Err(err_at(tok.line, tok.col, format!("expected `weight`, found `{other}`")))
            }
        }
        let (raw, raw_tok) = self.expect_number("a weight")?;
        let weight = Rational::from_str(&raw)
            .map_err(|e| err_at(raw_tok.line, raw_tok.col, e.to_string()))?;
        self.expect(Tok::Dot, "to end the statement")?;
        Ok(WorldDecl { bits, weight })
    }

    // -- formulas ----------------------------------------------------------

    fn formula(&mut self) -> Result<Pattern> {
        let lhs = self.implication()?;
        if self.peek().tok == Tok::Iff {
            self.bump();
            let rhs = self.formula()?;
            Ok(Pattern::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Pattern> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(Pattern::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Pattern> {
        let first = self.conjunction()?;
        if self.peek().tok != Tok::Pipe {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.peek().tok == Tok::Pipe {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(Pattern::Or(parts))
    }

    fn conjunction(&mut self) -> Result<Pattern> {
        let first = self.negation()?;
        if self.peek().tok != Tok::Amp {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.peek().tok == Tok::Amp {
            self.bump();
            parts.push(self.negation()?);
        }
        Ok(Pattern::And(parts))
    }

    fn negation(&mut self) -> Result<Pattern> {
        if self.peek().tok == Tok::Tilde {
            self.bump();
            Ok(Pattern::Not(Box::new(self.negation()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Pattern> {
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "to close the group")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => Ok(Pattern::True),
                    "false" => Ok(Pattern::False),
                    "exactly_one" | "at_least_one" => {
                        self.expect(Tok::LParen, "after the connective name")?;
                        let mut args = Vec::new();
                        if self.peek().tok != Tok::RParen {
                            args.push(self.formula()?);
                            while self.peek().tok == Tok::Comma {
                                self.bump();
                                args.push(self.formula()?);
                            }
                        }
                        self.expect(Tok::RParen, "to close the argument list")?;
                        Ok(if name == "exactly_one" {
                            Pattern::ExactlyOne(args)
                        } else {
                            Pattern::AtLeastOne(args)
                        })
                    }
                    _ => {
                        let mut args = Vec::new();
                        if self.peek().tok == Tok::LParen {
                            self.bump();
                            loop {
                                match self.peek().tok.clone() {
                                    Tok::Ident(c) => {
                                        self.bump();
                                        args.push(nmr_core::logic::Term::Const(c));
                                    }
                                    Tok::Var(v) => {
                                        self.bump();
                                        args.push(nmr_core::logic::Term::Var(v));
                                    }
                                    other => {
                                        return self.fail(format!(
                                            "expected a constant or variable argument, \
                                             found {other}"
                                        ))
                                    }
                                }
                                if self.peek().tok == Tok::Comma {
                                    self.bump();
                                } else {
                                    break;
                                }
                            }
                            self.expect(Tok::RParen, "to close the argument list")?;
                        }
                        Ok(Pattern::Atom(nmr_core::logic::PatternAtom { pred: name, args }))
                    }
                }
            }
            Tok::Var(v) => self.fail(format!(
                "a schema variable cannot stand alone; write `{v}` as an argument, \
                 e.g. `p({v})`"
            )),
            other => self.fail(format!("expected a formula, found {other}")),
        }
    }
}

/// Parses a full document.
pub fn parse(text: &str) -> Result<Document> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.document()
}

/// Parses a single variable-free formula, as supplied to `query`.
pub fn parse_ground_formula(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let pat = p.formula()?;
    if p.peek().tok != Tok::Eof {
        return p.fail(format!("unexpected {} after the formula", p.peek().tok));
    }
    if let Some(v) = pat.variables().into_iter().next() {
        return Err(CliError::Input(format!(
            "query formulas must be ground, but `{v}` is a variable (atoms are lowercase)"
        )));
    }
    Ok(pat.substitute(&BTreeMap::new())?)
}

/// Embeds a ground formula back into the surface syntax, with every atom a
/// zero-argument predicate. Used when dumping built-in scenarios as
/// documents.
pub fn formula_to_pattern(f: &Formula) -> Pattern {
    use nmr_core::logic::PatternAtom;
    match f {
        Formula::True => Pattern::True,
        Formula::False => Pattern::False,
        Formula::Atom(a) => Pattern::Atom(PatternAtom::prop(a.name())),
        Formula::Not(g) => Pattern::Not(Box::new(formula_to_pattern(g))),
        Formula::And(fs) => Pattern::And(fs.iter().map(formula_to_pattern).collect()),
        Formula::Or(fs) => Pattern::Or(fs.iter().map(formula_to_pattern).collect()),
        Formula::Implies(a, b) => {
            Pattern::Implies(Box::new(formula_to_pattern(a)), Box::new(formula_to_pattern(b)))
        }
        Formula::Iff(a, b) => {
            Pattern::Iff(Box::new(formula_to_pattern(a)), Box::new(formula_to_pattern(b)))
        }
        Formula::ExactlyOne(fs) => {
            Pattern::ExactlyOne(fs.iter().map(formula_to_pattern).collect())
        }
        Formula::AtLeastOne(fs) => {
            Pattern::AtLeastOne(fs.iter().map(formula_to_pattern).collect())
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical printer

/// Renders a document in canonical form: statements grouped by kind in a
/// fixed order, one per line. `parse(print(d)) == d` for every document.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let mut section = |text: String| {
        if !text.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&text);
        }
    };
    if !doc.atoms.is_empty() {
        section(format!("atoms {}.\n", doc.atoms.join(", ")));
    }
    if !doc.domain.is_empty() {
        section(format!("domain {{{}}}.\n", doc.domain.join(", ")));
    }
    section(
        doc.settings.iter().map(|(k, v)| format!("set {k} {v}.\n")).collect::<String>(),
    );
    section(doc.facts.iter().map(|f| format!("fact: {f}.\n")).collect::<String>());
    section(
        doc.defaults
            .iter()
            .map(|d| {
                let params = if d.params.is_empty() {
                    String::new()
                } else {
                    format!("({})", d.params.join(", "))
                };
                let justs = d
                    .justifications
                    .iter()
                    .map(Pattern::to_string)
                    .collect::<Vec<_>>()
                    .join(", ");
                format!(
                    "default {}{params}: {} : {justs} / {}.\n",
                    d.id, d.prerequisite, d.consequent
                )
            })
            .collect::<String>(),
    );
    section(
        doc.worlds
            .iter()
            .map(|w| format!("world {} weight {}.\n", w.bits, w.weight))
            .collect::<String>(),
    );
    section(doc.candidates.iter().map(|f| format!("candidate: {f}.\n")).collect::<String>());
    if let Some(agg) = &doc.aggregate {
        section(format!("aggregate: {agg}.\n"));
    }
    section(doc.conditions.iter().map(|f| format!("condition: {f}.\n")).collect::<String>());
    out
}

// ---------------------------------------------------------------------------
// Compilation to engine inputs

/// Everything a document can define, ready to run.
#[derive(Clone, Debug)]
pub struct Compiled {
    /// Present when the document declares facts or defaults.
    pub theory: Option<DefaultTheory>,
    /// Present when the document declares worlds.
    pub model: Option<WorldModel>,
    /// Facts double as accepted background for warrant analysis.
    pub warrant: WarrantInput,
    pub config: EngineConfig,
    /// From `set cap`, overriding the built-in grounded-default cap.
    pub cap: Option<usize>,
}

fn no_duplicates(names: &[String], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(CliError::Input(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

fn ground_closed(pat: &Pattern, what: &str) -> Result<Formula> {
    if let Some(v) = pat.variables().into_iter().next() {
        return Err(CliError::Input(format!(
            "{what} formulas must be ground, but `{pat}` contains the variable `{v}`"
        )));
    }
    Ok(pat.substitute(&BTreeMap::new())?)
}

pub fn compile(doc: &Document) -> Result<Compiled> {
    no_duplicates(&doc.atoms, "atom")?;
    no_duplicates(&doc.domain, "domain constant")?;
    let domain: BTreeSet<String> = doc.domain.iter().cloned().collect();

    // Facts may quantify over the domain; free variables ground universally.
    let mut facts = Vec::new();
    for pat in &doc.facts {
        let vars: Vec<String> = pat.variables().into_iter().collect();
        let schema = nmr_core::logic::Schema { vars, body: pat.clone() };
        facts.extend(nmr_core::logic::ground(&schema, &domain)?);
    }

    // Defaults ground over their declared parameters; instance ids are
    // `id(c1, c2)`.
    let mut rules = Vec::new();
    for d in &doc.defaults {
        let mut body_vars = d.prerequisite.variables();
        body_vars.extend(d.consequent.variables());
        for j in &d.justifications {
            body_vars.extend(j.variables());
        }
        for v in &body_vars {
            if !d.params.contains(v) {
                return Err(CliError::Input(format!(
                    "default `{}` uses variable `{v}` which is not among its parameters",
                    d.id
                )));
            }
        }
        if d.params.is_empty() {
            let binding = BTreeMap::new();
            rules.push(DefaultRule::new(
                d.id.clone(),
                d.prerequisite.substitute(&binding)?,
                d.justifications
                    .iter()
                    .map(|j| j.substitute(&binding))
                    .collect::<nmr_core::Result<Vec<_>>>()?,
                d.consequent.substitute(&binding)?,
            )?);
        } else {
            if domain.is_empty() {
                return Err(nmr_core::Error::EmptyDomain.into());
            }
            for binding in assignments(&d.params, &domain) {
                let args: Vec<&str> =
                    d.params.iter().map(|v| binding[v].as_str()).collect();
                rules.push(DefaultRule::new(
                    format!("{}({})", d.id, args.join(", ")),
                    d.prerequisite.substitute(&binding)?,
                    d.justifications
                        .iter()
                        .map(|j| j.substitute(&binding))
                        .collect::<nmr_core::Result<Vec<_>>>()?,
                    d.consequent.substitute(&binding)?,
                )?);
            }
        }
    }
    let theory = if doc.facts.is_empty() && doc.defaults.is_empty() {
        None
    } else {
        Some(DefaultTheory::new(facts.clone(), rules)?)
    };

    let model = if doc.worlds.is_empty() {
        None
    } else {
        if doc.atoms.is_empty() {
            return Err(CliError::Input(
                "world statements need an `atoms` declaration to name the bits".into(),
            ));
        }
        let atoms: Vec<Atom> = doc.atoms.iter().map(Atom::new).collect();
        let worlds = doc.worlds.iter().map(|w| (w.bits.clone(), w.weight.clone())).collect();
        Some(WorldModel::from_bit_strings(atoms, worlds)?)
    };

    let warrant = WarrantInput {
        background: facts,
        members: doc
            .candidates
            .iter()
            .map(|p| ground_closed(p, "candidate"))
            .collect::<Result<Vec<_>>>()?,
        aggregate: doc.aggregate.as_ref().map(|p| ground_closed(p, "aggregate")).transpose()?,
        undercut_conditions: doc
            .conditions
            .iter()
            .map(|p| ground_closed(p, "condition"))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut config = EngineConfig::default();
    let mut cap = None;
    for (key, value) in &doc.settings {
        match key.as_str() {
            "gate" => {
                config.gate_mode = match value.as_str() {
                    "on" => GateMode::On,
                    "off" => GateMode::Off,
                    _ => {
                        return Err(CliError::Input(format!(
                            "`set gate` takes `on` or `off`, got `{value}`"
                        )))
                    }
                }
            }
            "relevance" => {
                config.relevance_mode = match value.as_str() {
                    "always" => RelevanceMode::Always,
                    "pollock" => RelevanceMode::Pollock,
                    _ => {
                        return Err(CliError::Input(format!(
                            "`set relevance` takes `always` or `pollock`, got `{value}`"
                        )))
                    }
                }
            }
            "threshold" => config.acceptance_threshold = Rational::from_str(value)?,
            "tie_epsilon" => config.tie_epsilon = Rational::from_str(value)?,
            "cap" => {
                cap = Some(value.parse::<usize>().map_err(|_| {
                    CliError::Input(format!("`set cap` takes a nonnegative integer, got `{value}`"))
                })?)
            }
            _ => {
                return Err(CliError::Input(format!(
                    "unknown setting `{key}` (expected gate, relevance, threshold, \
                     tie_epsilon, or cap)"
                )))
            }
        }
    }

    Ok(Compiled { theory, model, warrant, config, cap })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) -> Document {
        let doc = parse(text).expect("parse");
        let printed = print(&doc);
        let again = parse(&printed).expect("reparse of printed form");
        assert_eq!(doc, again, "print/parse changed the document:\n{printed}");
        doc
    }

    #[test]
    fn parses_every_statement_kind() {
        let doc = roundtrip(
            "# a comment\n\
             atoms a, b.\n\
             domain {x, y}.\n\
             set gate on.\n\
             set threshold 3/4.\n\
             fact: a -> b.\n\
             default d1: a : b / b.\n\
             default d2(X): p(X) : q(X), ~r(X) / q(X).\n\
             world 00 weight 1/4.\n\
             world 01 weight 0.75.\n\
             candidate: ~a.\n\
             aggregate: a | b.\n\
             condition: a & b.\n",
        );
        assert_eq!(doc.atoms, vec!["a", "b"]);
        assert_eq!(doc.domain, vec!["x", "y"]);
        assert_eq!(doc.settings.len(), 2);
        assert_eq!(doc.facts.len(), 1);
        assert_eq!(doc.defaults.len(), 2);
        assert_eq!(doc.defaults[1].params, vec!["X"]);
        assert_eq!(doc.defaults[1].justifications.len(), 2);
        assert_eq!(doc.worlds[1].weight, Rational::new(3, 4));
        assert_eq!(doc.candidates.len(), 1);
        assert!(doc.aggregate.is_some());
        assert_eq!(doc.conditions.len(), 1);
    }

    #[test]
    fn empty_document_is_valid() {
        assert_eq!(parse("").unwrap(), Document::default());
        assert_eq!(parse("# only a comment\n").unwrap(), Document::default());
    }

    #[test]
    fn operator_precedence_and_associativity() {
        let cases = [
            ("fact: a | b & c.", "a | b & c"),
            ("fact: (a | b) & c.", "(a | b) & c"),
            ("fact: a -> b -> c.", "a -> b -> c"),
            ("fact: (a -> b) -> c.", "(a -> b) -> c"),
            ("fact: a -> b <-> c | d.", "a -> b <-> c | d"),
            ("fact: ~~a & ~(b | c).", "~~a & ~(b | c)"),
            ("fact: exactly_one(a, b, a & b).", "exactly_one(a, b, a & b)"),
            ("fact: at_least_one(a).", "at_least_one(a)"),
            ("fact: true -> false.", "true -> false"),
        ];
        for (text, expected) in cases {
            let doc = roundtrip(text);
            assert_eq!(doc.facts[0].to_string(), expected, "for input {text:?}");
        }
    }

    #[test]
    fn nested_connectives_keep_their_shape() {
        // `(a | b) | c` must not flatten into `a | b | c`.
        let grouped = parse("fact: (a | b) | c.").unwrap();
        let flat = parse("fact: a | b | c.").unwrap();
        assert_ne!(grouped, flat);
        roundtrip("fact: (a | b) | c.");
    }

    #[test]
    fn rationals_lex_next_to_the_statement_dot() {
        let doc = parse("atoms a.\nworld 1 weight 1/2.\nworld 0 weight 2.").unwrap();
        assert_eq!(doc.worlds[0].weight, Rational::new(1, 2));
        assert_eq!(doc.worlds[1].weight, Rational::from_integer(2));
        // A slash in a default stays an operator even with digits nearby.
        let doc = parse("default d: true : a / a.").unwrap();
        assert_eq!(doc.defaults[0].consequent.to_string(), "a");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("fact: a &&.").unwrap_err();
        match err {
            CliError::Parse { line: 1, column: 10, .. } => {}
            other => panic!("unexpected error: {other:?}"),
        }
        let err = parse("atoms a, b").unwrap_err();
        match err {
            // Missing final dot is reported at end of input.
            CliError::Parse { line: 1, column: 11, ref message, .. } => {
                assert!(message.contains("`.`"), "message: {message}")
            }
            other => panic!("unexpected error: {other:?}"),
        }
        let err = parse("world 012 weight 1.").unwrap_err();
        assert!(err.to_string().contains("0s and 1s"), "got: {err}");
        let err = parse("atoms true.").unwrap_err();
        assert!(err.to_string().contains("reserved"), "got: {err}");
        let err = parse("aggregate: a.\naggregate: b.").unwrap_err();
        assert!(err.to_string().contains("line 2"), "got: {err}");
        let err = parse("fact: X.").unwrap_err();
        assert!(err.to_string().contains("variable"), "got: {err}");
    }

    #[test]
    fn compiles_defaults_with_grounding() {
        let doc = parse(
            "domain {opus, tweety}.\n\
             fact: bird(X).\n\
             default fly(X): bird(X) : flies(X) / flies(X).\n",
        )
        .unwrap();
        let compiled = compile(&doc).unwrap();
        let theory = compiled.theory.unwrap();
        assert_eq!(theory.facts.len(), 2);
        let ids: Vec<&str> = theory.rules().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["fly(opus)", "fly(tweety)"]);
        assert_eq!(theory.rules()[0].consequent.to_string(), "flies_opus");
    }

    #[test]
    fn compiles_model_and_warrant_parts() {
        let doc = parse(
            "atoms a, b.\n\
             world 00 weight 1/4.\n\
             world 10 weight 1/4.\n\
             world 11 weight 1/2.\n\
             candidate: a.\n\
             aggregate: a | b.\n\
             condition: b.\n\
             set gate on.\n\
             set tie_epsilon 1/100.\n",
        )
        .unwrap();
        let compiled = compile(&doc).unwrap();
        let model = compiled.model.unwrap();
        assert_eq!(
            model.probability(&Formula::atom("a")).unwrap(),
            Rational::new(3, 4)
        );
        assert_eq!(compiled.warrant.members.len(), 1);
        assert_eq!(compiled.warrant.aggregate.unwrap().to_string(), "a | b");
        assert_eq!(compiled.config.gate_mode, GateMode::On);
        assert_eq!(compiled.config.tie_epsilon, Rational::new(1, 100));
    }

    #[test]
    fn compile_rejects_bad_documents() {
        let unbound = parse("default d: p(X) : q / q.").unwrap();
        assert!(compile(&unbound).is_err());
        let no_atoms = parse("world 0 weight 1.").unwrap();
        assert!(compile(&no_atoms).is_err());
        let no_domain = parse("default d(X): p(X) : q(X) / q(X).").unwrap();
        assert!(compile(&no_domain).is_err());
        let open_candidate = parse("atoms a.\nworld 0 weight 1.\ncandidate: p(X).").unwrap();
        assert!(compile(&open_candidate).is_err());
        let bad_setting = parse("set gate maybe.").unwrap();
        assert!(compile(&bad_setting).is_err());
        let dup_atom = parse("atoms a, a.").unwrap();
        assert!(compile(&dup_atom).is_err());
    }

    #[test]
    fn query_formulas_must_be_ground_and_complete() {
        assert!(parse_ground_formula("~pacifist").is_ok());
        assert!(parse_ground_formula("a -> b | c").is_ok());
        assert!(parse_ground_formula("p(X)").is_err());
        assert!(parse_ground_formula("a b").is_err());
        assert!(parse_ground_formula("").is_err());
    }
}
