//! Clausal form. `to_cnf` desugars to the `{not, and, or}` fragment, pushes
//! negations inward, then distributes disjunction over conjunction. No fresh
//! atoms are introduced, so the clause set is logically equivalent to the
//! input (same satisfying assignments over the same atoms). Tautologous
//! clauses are dropped and duplicates collapse via the set representation.

use std::collections::BTreeSet;
use std::fmt;

use super::formula::{Atom, Formula};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A disjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Clause(pub BTreeSet<Literal>);

impl Clause {
    pub fn unit(lit: Literal) -> Self {
        Clause(BTreeSet::from([lit]))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A clause containing both an atom and its negation is always true.
    pub fn is_tautology(&self) -> bool {
        self.0.iter().any(|l| l.positive && self.0.contains(&l.negated()))
    }

    fn merged(&self, other: &Clause) -> Clause {
        let mut lits = self.0.clone();
        lits.extend(other.0.iter().cloned());
        Clause(lits)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, lit) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str("}")
    }
}

/// A conjunction of clauses in canonical order. The empty set is the
/// tautology; a set containing the empty clause is unsatisfiable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClauseSet(pub BTreeSet<Clause>);

impl ClauseSet {
    pub fn tautology() -> Self {
        ClauseSet(BTreeSet::new())
    }

    pub fn contradiction() -> Self {
        ClauseSet(BTreeSet::from([Clause::default()]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.0.iter().any(Clause::is_empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Clause> {
        self.0.iter()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.0
            .iter()
            .flat_map(|c| c.0.iter().map(|l| l.atom.clone()))
            .collect()
    }

    /// Evaluates the clause set under a total assignment.
    pub fn eval(&self, truth: &dyn Fn(&Atom) -> bool) -> bool {
        self.0
            .iter()
            .all(|c| c.0.iter().any(|l| truth(&l.atom) == l.positive))
    }

    fn insert(&mut self, clause: Clause) {
        if !clause.is_tautology() {
            self.0.insert(clause);
        }
    }

    fn union(mut self, other: ClauseSet) -> ClauseSet {
        for c in other.0 {
            self.insert(c);
        }
        self
    }

    /// Disjunction of two clause sets by pairwise clause merging.
    fn cross(&self, other: &ClauseSet) -> ClauseSet {
        let mut out = ClauseSet::tautology();
        for a in &self.0 {
            for b in &other.0 {
                out.insert(a.merged(b));
            }
        }
        out
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// Negation-normal-form conversion over the desugared fragment.
/// `polarity = false` builds the NNF of the negation.
fn nnf(f: &Formula, polarity: bool) -> Formula {
    match f {
        Formula::True => {
            if polarity {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if polarity {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Atom(a) => {
            if polarity {
                Formula::Atom(a.clone())
            } else {
                Formula::not(Formula::Atom(a.clone()))
            }
        }
        Formula::Not(inner) => nnf(inner, !polarity),
        Formula::And(fs) => {
            let parts = fs.iter().map(|p| nnf(p, polarity)).collect();
            if polarity {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|p| nnf(p, polarity)).collect();
            if polarity {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        other => unreachable!("desugar left a non-core connective: {other}"),
    }
}

fn clauses_of_nnf(f: &Formula) -> ClauseSet {
    match f {
        Formula::True => ClauseSet::tautology(),
        Formula::False => ClauseSet::contradiction(),
        Formula::Atom(a) => {
            let mut cs = ClauseSet::tautology();
            cs.insert(Clause::unit(Literal::pos(a.clone())));
            cs
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => {
                let mut cs = ClauseSet::tautology();
                cs.insert(Clause::unit(Literal::neg(a.clone())));
                cs
            }
            other => unreachable!("negation not atomic after NNF: {other}"),
        },
        Formula::And(fs) => fs
            .iter()
            .map(clauses_of_nnf)
            .fold(ClauseSet::tautology(), ClauseSet::union),
        Formula::Or(fs) => {
            let mut acc = ClauseSet(BTreeSet::from([Clause::default()]));
            for part in fs {
                let cs = clauses_of_nnf(part);
                if cs.is_empty() {
                    // One true disjunct makes the whole disjunction true.
                    return ClauseSet::tautology();
                }
                acc = acc.cross(&cs);
            }
            acc
        }
        other => unreachable!("unexpected connective after NNF: {other}"),
    }
}

/// Converts an arbitrary formula to an equivalent clause set.
pub fn to_cnf(f: &Formula) -> ClauseSet {
    clauses_of_nnf(&nnf(&f.desugar(), true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn tautology_gives_empty_clause_set() {
        let f = Formula::implies(atom("a"), atom("a"));
        assert_eq!(to_cnf(&f), ClauseSet::tautology());
    }

    #[test]
    fn negated_conjunction_is_one_clause() {
        let f = Formula::not(Formula::and(vec![atom("a"), atom("b")]));
        let cs = to_cnf(&f);
        assert_eq!(cs.len(), 1);
        let clause = cs.iter().next().unwrap();
        assert_eq!(clause.to_string(), "{~a, ~b}");
    }

    #[test]
    fn exactly_one_of_three_yields_four_clauses() {
        let f = Formula::exactly_one(vec![atom("t_1"), atom("t_2"), atom("t_3")]);
        let cs = to_cnf(&f);
        assert_eq!(cs.len(), 4);
        let rendered: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
        assert!(rendered.contains(&"{t_1, t_2, t_3}".to_string()));
        assert!(rendered.contains(&"{~t_1, ~t_2}".to_string()));
        assert!(rendered.contains(&"{~t_1, ~t_3}".to_string()));
        assert!(rendered.contains(&"{~t_2, ~t_3}".to_string()));
    }

    #[test]
    fn contradiction_has_empty_clause() {
        let f = Formula::and(vec![atom("a"), Formula::not(atom("a"))]);
        let cs = to_cnf(&f);
        // {a} and {~a} both survive; the empty clause appears only after
        // resolution (the solver's job), so here we just check both units.
        assert_eq!(cs.len(), 2);
        let f2 = Formula::False;
        assert!(to_cnf(&f2).has_empty_clause());
    }

    #[test]
    fn cnf_preserves_satisfying_assignments() {
        // Exhaustive check over all assignments for a few shapes.
        let cases = vec![
            Formula::iff(atom("a"), Formula::implies(atom("b"), atom("c"))),
            Formula::exactly_one(vec![atom("a"), atom("b"), atom("c"), atom("d")]),
            Formula::not(Formula::iff(atom("a"), atom("b"))),
            Formula::or(vec![
                Formula::and(vec![atom("a"), atom("b")]),
                Formula::and(vec![atom("c"), atom("d")]),
            ]),
        ];
        for f in cases {
            let atoms: Vec<_> = f.atoms().into_iter().collect();
            let cs = to_cnf(&f);
            for mask in 0..(1u32 << atoms.len()) {
                let truth = |a: &Atom| {
                    let i = atoms.iter().position(|x| x == a).unwrap();
                    mask & (1 << i) != 0
                };
                assert_eq!(f.eval(&truth), cs.eval(&truth), "formula {f}, mask {mask}");
            }
        }
    }
}
