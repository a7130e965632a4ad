//! A small, complete DPLL satisfiability check over clause sets.
//!
//! Problem sizes here are desk scale (tens of atoms, hundreds of clauses), so
//! the solver favours clarity: unit propagation, pure-literal elimination,
//! then splitting on the first literal of a shortest clause.

use std::collections::BTreeSet;

use super::cnf::ClauseSet;

/// Integer clause form: literal `v+1` is the atom with index `v`, negative
/// for the complement, mirroring the usual DIMACS convention.
type IntClause = Vec<i32>;

fn assign(clauses: &[IntClause], lit: i32) -> Vec<IntClause> {
    let mut out = Vec::with_capacity(clauses.len());
    for clause in clauses {
        if clause.contains(&lit) {
            continue; // satisfied
        }
        let reduced: IntClause = clause.iter().copied().filter(|&l| l != -lit).collect();
        out.push(reduced);
    }
    out
}

fn dpll(mut clauses: Vec<IntClause>) -> bool {
    loop {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        // Unit propagation.
        if let Some(&unit) = clauses.iter().find(|c| c.len() == 1).and_then(|c| c.first()) {
            clauses = assign(&clauses, unit);
            continue;
        }
        // Pure-literal elimination.
        let mut seen: BTreeSet<i32> = BTreeSet::new();
        for clause in &clauses {
            seen.extend(clause.iter().copied());
        }
        if let Some(&pure) = seen.iter().find(|&&l| !seen.contains(&-l)) {
            clauses = assign(&clauses, pure);
            continue;
        }
        break;
    }
    let shortest = clauses
        .iter()
        .min_by_key(|c| c.len())
        .expect("non-empty clause list");
    let lit = shortest[0];
    dpll(assign(&clauses, lit)) || dpll(assign(&clauses, -lit))
}

/// True when some assignment satisfies every clause.
pub fn satisfiable(cs: &ClauseSet) -> bool {
    if cs.is_empty() {
        return true;
    }
    if cs.has_empty_clause() {
        return false;
    }
    let atoms: Vec<_> = cs.atoms().into_iter().collect();
    let index = |a: &super::formula::Atom| atoms.binary_search(a).expect("atom in registry") as i32;
    let clauses: Vec<IntClause> = cs
        .iter()
        .map(|c| {
            c.0.iter()
                .map(|l| {
                    let v = index(&l.atom) + 1;
                    if l.positive {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    dpll(clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::cnf::to_cnf;
    use crate::logic::formula::{Atom, Formula};

    fn sat(f: &Formula) -> bool {
        satisfiable(&to_cnf(f))
    }

    #[test]
    fn simple_satisfiable_and_unsatisfiable_cases() {
        let a = Formula::atom("a");
        assert!(sat(&a));
        assert!(sat(&Formula::True));
        assert!(!sat(&Formula::False));
        assert!(!sat(&Formula::and(vec![a.clone(), Formula::not(a.clone())])));
        let xor = Formula::not(Formula::iff(a.clone(), Formula::atom("b")));
        assert!(sat(&xor));
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // Three pigeons, two holes: per-pigeon at-least-one plus per-hole
        // pairwise exclusion. Forces genuine backtracking.
        let p = |i: usize, j: usize| Formula::atom(format!("p{i}{j}"));
        let mut parts = Vec::new();
        for i in 0..3 {
            parts.push(Formula::or(vec![p(i, 0), p(i, 1)]));
        }
        for j in 0..2 {
            for i in 0..3 {
                for k in (i + 1)..3 {
                    parts.push(Formula::not(Formula::and(vec![p(i, j), p(k, j)])));
                }
            }
        }
        assert!(!sat(&Formula::and(parts)));
    }

    #[test]
    fn agrees_with_truth_table_on_random_style_shapes() {
        let shapes = vec![
            Formula::iff(
                Formula::exactly_one(vec![Formula::atom("a"), Formula::atom("b"), Formula::atom("c")]),
                Formula::implies(Formula::atom("d"), Formula::atom("a")),
            ),
            Formula::and(vec![
                Formula::exactly_one(vec![Formula::atom("a"), Formula::atom("b")]),
                Formula::not(Formula::atom("a")),
                Formula::not(Formula::atom("b")),
            ]),
        ];
        for f in shapes {
            let atoms: Vec<Atom> = f.atoms().into_iter().collect();
            let mut brute = false;
            for mask in 0..(1u32 << atoms.len()) {
                let truth = |a: &Atom| {
                    let i = atoms.iter().position(|x| x == a).unwrap();
                    mask & (1 << i) != 0
                };
                brute |= f.eval(&truth);
            }
            assert_eq!(sat(&f), brute, "formula {f}");
        }
    }
}
