//! Propositional formulas.
//!
//! The tree mirrors the surface syntax: negation, n-ary conjunction and
//! disjunction, implication, biconditional, and the two counting connectives
//! `exactly_one` / `at_least_one` that the lottery constructions lean on.
//! Constants `true` / `false` are explicit so degenerate cases (empty
//! conjunctions, tautological evidence) have a first-class spelling.

use std::collections::BTreeSet;
use std::fmt;

/// A propositional atom, identified by name. Ground atoms produced from
/// schemata use the `pred_const` mangling, e.g. `bird_tweety`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// True when exactly one operand is true.
    ExactlyOne(Vec<Formula>),
    /// True when at least one operand is true.
    AtLeastOne(Vec<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(Atom::new(name))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; empty input yields `True`, a single operand collapses.
    pub fn and(fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::True,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction; empty input yields `False`, a single operand collapses.
    pub fn or(fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::False,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn exactly_one(fs: Vec<Formula>) -> Self {
        Formula::ExactlyOne(fs)
    }

    pub fn at_least_one(fs: Vec<Formula>) -> Self {
        Formula::AtLeastOne(fs)
    }

    /// All atoms occurring in the formula, in canonical (lexicographic) order.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) | Formula::ExactlyOne(fs) | Formula::AtLeastOne(fs) => {
                for f in fs {
                    f.collect_atoms(out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluates under a total truth assignment.
    pub fn eval(&self, truth: &dyn Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => truth(a),
            Formula::Not(f) => !f.eval(truth),
            Formula::And(fs) => fs.iter().all(|f| f.eval(truth)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(truth)),
            Formula::Implies(a, b) => !a.eval(truth) || b.eval(truth),
            Formula::Iff(a, b) => a.eval(truth) == b.eval(truth),
            Formula::ExactlyOne(fs) => fs.iter().filter(|f| f.eval(truth)).count() == 1,
            Formula::AtLeastOne(fs) => fs.iter().any(|f| f.eval(truth)),
        }
    }

    /// Rewrites the counting connectives, implication and biconditional into
    /// the `{not, and, or}` fragment, preserving logical equivalence (not just
    /// satisfiability — no fresh atoms are introduced).
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.desugar()).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.desugar()).collect()),
            Formula::Implies(a, b) => Formula::or(vec![Formula::not(a.desugar()), b.desugar()]),
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(vec![
                    Formula::or(vec![Formula::not(a.clone()), b.clone()]),
                    Formula::or(vec![Formula::not(b), a]),
                ])
            }
            Formula::ExactlyOne(fs) => {
                let fs: Vec<Formula> = fs.iter().map(|f| f.desugar()).collect();
                let mut parts = vec![Formula::or(fs.clone())];
                for i in 0..fs.len() {
                    for j in (i + 1)..fs.len() {
                        parts.push(Formula::not(Formula::and(vec![fs[i].clone(), fs[j].clone()])));
                    }
                }
                Formula::and(parts)
            }
            Formula::AtLeastOne(fs) => Formula::or(fs.iter().map(|f| f.desugar()).collect()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(_) => 3,
            Formula::And(_) => 4,
            Formula::Not(_) => 5,
            _ => 7,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::True => f.write_str("true")?,
            Formula::False => f.write_str("false")?,
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Not(inner) => {
                f.write_str("~")?;
                inner.fmt_prec(f, 5)?;
            }
            Formula::And(fs) => {
                for (i, part) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    part.fmt_prec(f, 5)?;
                }
            }
            Formula::Or(fs) => {
                for (i, part) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    part.fmt_prec(f, 4)?;
                }
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" <-> ")?;
                b.fmt_prec(f, 1)?;
            }
            Formula::ExactlyOne(fs) | Formula::AtLeastOne(fs) => {
                let name = if matches!(self, Formula::ExactlyOne(_)) {
                    "exactly_one"
                } else {
                    "at_least_one"
                };
                f.write_str(name)?;
                f.write_str("(")?;
                for (i, part) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    part.fmt_prec(f, 0)?;
                }
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Formulas serialize as their display form; the text is a valid input
/// expression, so round-tripping goes through the parser.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
