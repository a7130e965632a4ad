//! First-order-flavoured schemata over a finite constant domain.
//!
//! A pattern is a formula whose atoms are predicate applications such as
//! `bird(X)` or `likes(X, sam)`. Grounding substitutes every variable
//! assignment drawn from the domain and mangles applications into plain
//! propositional atoms (`bird(X)` with `X := tweety` becomes `bird_tweety`),
//! so everything downstream stays purely propositional.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::{Atom, Formula};
use crate::error::{Error, Result};

/// An argument position: either a fixed constant or a variable to be bound.
/// Variables are spelled with a leading uppercase letter in the surface
/// syntax; here the distinction is structural.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => f.write_str(v),
        }
    }
}

/// A predicate application, e.g. `flies(X)`. Zero arguments is an ordinary
/// propositional atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternAtom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl PatternAtom {
    pub fn prop(name: impl Into<String>) -> Self {
        PatternAtom { pred: name.into(), args: Vec::new() }
    }
}

impl fmt::Display for PatternAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A formula whose leaves are pattern atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pattern {
    True,
    False,
    Atom(PatternAtom),
    Not(Box<Pattern>),
    And(Vec<Pattern>),
    Or(Vec<Pattern>),
    Implies(Box<Pattern>, Box<Pattern>),
    Iff(Box<Pattern>, Box<Pattern>),
    ExactlyOne(Vec<Pattern>),
    AtLeastOne(Vec<Pattern>),
}

impl Pattern {
    /// Free variables, in canonical order.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Pattern::True | Pattern::False => {}
            Pattern::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Pattern::Not(p) => p.collect_vars(out),
            Pattern::And(ps) | Pattern::Or(ps) | Pattern::ExactlyOne(ps) | Pattern::AtLeastOne(ps) => {
                for p in ps {
                    p.collect_vars(out);
                }
            }
            Pattern::Implies(a, b) | Pattern::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// True when the pattern contains no variables at all.
    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    /// Substitutes a binding for every variable; errors on an unbound one.
    pub fn substitute(&self, binding: &BTreeMap<String, String>) -> Result<Formula> {
        Ok(match self {
            Pattern::True => Formula::True,
            Pattern::False => Formula::False,
            Pattern::Atom(a) => {
                let mut name = a.pred.clone();
                for t in &a.args {
                    let value = match t {
                        Term::Const(c) => c.clone(),
                        Term::Var(v) => binding
                            .get(v)
                            .ok_or_else(|| Error::UnboundVariable(v.clone()))?
                            .clone(),
                    };
                    name.push('_');
                    name.push_str(&value);
                }
                Formula::Atom(Atom::new(name))
            }
            Pattern::Not(p) => Formula::not(p.substitute(binding)?),
            Pattern::And(ps) => Formula::and(Self::substitute_all(ps, binding)?),
            Pattern::Or(ps) => Formula::or(Self::substitute_all(ps, binding)?),
            Pattern::ExactlyOne(ps) => Formula::exactly_one(Self::substitute_all(ps, binding)?),
            Pattern::AtLeastOne(ps) => Formula::at_least_one(Self::substitute_all(ps, binding)?),
            Pattern::Implies(a, b) => {
                Formula::implies(a.substitute(binding)?, b.substitute(binding)?)
            }
            Pattern::Iff(a, b) => Formula::iff(a.substitute(binding)?, b.substitute(binding)?),
        })
    }

    fn substitute_all(ps: &[Pattern], binding: &BTreeMap<String, String>) -> Result<Vec<Formula>> {
        ps.iter().map(|p| p.substitute(binding)).collect()
    }

    /// Rendering used by the surface syntax: identical to `Formula` display,
    /// with pattern atoms shown as `pred(arg, ...)`.
    fn as_display_formula(&self) -> Formula {
        match self {
            Pattern::True => Formula::True,
            Pattern::False => Formula::False,
            Pattern::Atom(a) => Formula::Atom(Atom::new(a.to_string())),
            Pattern::Not(p) => Formula::not(p.as_display_formula()),
            Pattern::And(ps) => {
                Formula::And(ps.iter().map(Pattern::as_display_formula).collect())
            }
            Pattern::Or(ps) => Formula::Or(ps.iter().map(Pattern::as_display_formula).collect()),
            Pattern::ExactlyOne(ps) => {
                Formula::ExactlyOne(ps.iter().map(Pattern::as_display_formula).collect())
            }
            Pattern::AtLeastOne(ps) => {
                Formula::AtLeastOne(ps.iter().map(Pattern::as_display_formula).collect())
            }
            Pattern::Implies(a, b) => {
                Formula::implies(a.as_display_formula(), b.as_display_formula())
            }
            Pattern::Iff(a, b) => Formula::iff(a.as_display_formula(), b.as_display_formula()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_display_formula())
    }
}

/// A pattern together with the variables it quantifies over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub vars: Vec<String>,
    pub body: Pattern,
}

/// Every variable assignment over the domain, in lexicographic order
/// (variables in list order, domain constants sorted).
pub fn assignments(vars: &[String], domain: &BTreeSet<String>) -> Vec<BTreeMap<String, String>> {
    let consts: Vec<&String> = domain.iter().collect();
    let mut out = Vec::new();
    let mut current: Vec<usize> = vec![0; vars.len()];
    loop {
        let binding: BTreeMap<String, String> = vars
            .iter()
            .zip(&current)
            .map(|(v, &i)| (v.clone(), consts[i].clone()))
            .collect();
        out.push(binding);
        // Odometer increment, last variable fastest.
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < consts.len() {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Grounds a schema over a finite domain, yielding deduplicated instances in
/// deterministic order. A schema with k variables over n constants produces
/// n^k candidate instances before deduplication.
pub fn ground(schema: &Schema, domain: &BTreeSet<String>) -> Result<Vec<Formula>> {
    let free = schema.body.variables();
    for v in &free {
        if !schema.vars.contains(v) {
            return Err(Error::UnboundVariable(v.clone()));
        }
    }
    if schema.vars.is_empty() {
        return Ok(vec![schema.body.substitute(&BTreeMap::new())?]);
    }
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for binding in assignments(&schema.vars, domain) {
        let inst = schema.body.substitute(&binding)?;
        if seen.insert(inst.clone()) {
            out.push(inst);
        }
    }
    Ok(out)
}
