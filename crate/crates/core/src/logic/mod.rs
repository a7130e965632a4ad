//! Propositional core: formulas, clausal conversion, satisfiability,
//! entailment, and schema grounding over finite domains.

pub mod cnf;
pub mod formula;
pub mod sat;
pub mod schema;

pub use cnf::{to_cnf, Clause, ClauseSet, Literal};
pub use formula::{Atom, Formula};
pub use schema::{assignments, ground, Pattern, PatternAtom, Schema, Term};

/// True when the conjunction of `formulas` has a model. The empty list is
/// consistent (it asserts nothing).
pub fn is_consistent(formulas: &[Formula]) -> bool {
    let conjunction = Formula::and(formulas.to_vec());
    sat::satisfiable(&to_cnf(&conjunction))
}

/// Classical entailment: `kb` entails `query` exactly when `kb` together
/// with the negation of `query` is unsatisfiable.
pub fn entails(kb: &[Formula], query: &Formula) -> bool {
    let mut augmented = kb.to_vec();
    augmented.push(Formula::not(query.clone()));
    !is_consistent(&augmented)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nixon_facts_are_consistent_with_either_stance() {
        let facts = Formula::and(vec![Formula::atom("quaker"), Formula::atom("republican")]);
        assert!(is_consistent(&[facts.clone(), Formula::atom("pacifist")]));
        assert!(is_consistent(&[facts, Formula::not(Formula::atom("pacifist"))]));
    }

    #[test]
    fn exactly_one_with_all_but_one_denied_entails_the_rest() {
        let kb = vec![
            Formula::exactly_one(vec![
                Formula::atom("t_1"),
                Formula::atom("t_2"),
                Formula::atom("t_3"),
            ]),
            Formula::not(Formula::atom("t_1")),
            Formula::not(Formula::atom("t_2")),
        ];
        assert!(entails(&kb, &Formula::atom("t_3")));
        assert!(!entails(&kb[..1].to_vec(), &Formula::atom("t_3")));
    }

    #[test]
    fn empty_knowledge_base_entails_only_tautologies() {
        let kb: Vec<Formula> = Vec::new();
        assert!(entails(&kb, &Formula::implies(Formula::atom("a"), Formula::atom("a"))));
        assert!(!entails(&kb, &Formula::atom("a")));
        assert!(is_consistent(&kb));
    }

    #[test]
    fn entailment_matches_unsatisfiability_of_negation() {
        let kb = vec![Formula::implies(Formula::atom("a"), Formula::atom("b")), Formula::atom("a")];
        let q = Formula::atom("b");
        let mut augmented = kb.clone();
        augmented.push(Formula::not(q.clone()));
        assert_eq!(entails(&kb, &q), !is_consistent(&augmented));
        assert!(entails(&kb, &q));
    }
}
