//! Reiter-style default theories and their extensions.
//!
//! A default rule `prerequisite : justifications / consequent` may fire when
//! the prerequisite is entailed and every justification is individually
//! consistent with what is currently believed. An extension is a fixpoint of
//! that process. Enumeration walks the process tree: branch on each locally
//! applicable rule, and at every closed leaf re-check all justifications
//! against the *final* base, which is what makes the search sound for
//! non-normal rules. States are memoized on the set of applied rules, and
//! results are deduplicated by generating-rule set.
//!
//! Zero extensions is a legitimate outcome (some non-normal theories have
//! none). Inconsistent facts yield the single trivial extension, which
//! callers should surface with a warning.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::{entails, is_consistent, Formula};

/// Hard limit on grounded rules per theory unless the caller raises it;
/// the search is exponential in the worst case and this keeps it honest.
pub const DEFAULT_RULE_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DefaultRule {
    pub id: String,
    pub prerequisite: Formula,
    pub justifications: Vec<Formula>,
    pub consequent: Formula,
}

impl DefaultRule {
    pub fn new(
        id: impl Into<String>,
        prerequisite: Formula,
        justifications: Vec<Formula>,
        consequent: Formula,
    ) -> Result<Self> {
        let id = id.into();
        if justifications.is_empty() {
            return Err(Error::NoJustifications(id));
        }
        Ok(DefaultRule { id, prerequisite, justifications, consequent })
    }

    /// `prerequisite : consequent / consequent`.
    pub fn normal(id: impl Into<String>, prerequisite: Formula, consequent: Formula) -> Self {
        DefaultRule {
            id: id.into(),
            prerequisite,
            justifications: vec![consequent.clone()],
            consequent,
        }
    }

    /// `true : consequent / consequent`.
    pub fn supernormal(id: impl Into<String>, consequent: Formula) -> Self {
        Self::normal(id, Formula::True, consequent)
    }

    /// Normal rules (justification list is exactly the consequent) always
    /// admit at least one extension at the theory level.
    pub fn is_normal(&self) -> bool {
        self.justifications.len() == 1 && self.justifications[0] == self.consequent
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub struct DefaultTheory {
    pub facts: Vec<Formula>,
    rules: Vec<DefaultRule>,
}

impl DefaultTheory {
    pub fn new(facts: Vec<Formula>, rules: Vec<DefaultRule>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.id.clone()) {
                return Err(Error::DuplicateRuleId(r.id.clone()));
            }
            if r.justifications.is_empty() {
                return Err(Error::NoJustifications(r.id.clone()));
            }
        }
        Ok(DefaultTheory { facts, rules })
    }

    pub fn rules(&self) -> &[DefaultRule] {
        &self.rules
    }

    pub fn facts_consistent(&self) -> bool {
        is_consistent(&self.facts)
    }

    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(DefaultRule::is_normal)
    }
}

/// One extension, identified by its generating rules. `base` is the facts
/// followed by the generating consequents; the extension itself is the
/// deductive closure of `base`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Extension {
    pub generating: BTreeSet<String>,
    pub base: Vec<Formula>,
}

impl Extension {
    pub fn entails(&self, query: &Formula) -> bool {
        entails(&self.base, query)
    }

    /// The consequents contributed by generating rules, in base order.
    pub fn conclusions<'a>(&'a self, theory: &'a DefaultTheory) -> Vec<&'a Formula> {
        theory
            .rules()
            .iter()
            .filter(|r| self.generating.contains(&r.id))
            .map(|r| &r.consequent)
            .collect()
    }

    /// Independent fixpoint validation, used by tests as an oracle against
    /// the search: (i) every generating rule is applicable with respect to
    /// the final base, (ii) no other rule is, and (iii) the prerequisites are
    /// derivable in a well-founded order starting from the facts alone.
    pub fn verify(&self, theory: &DefaultTheory) -> bool {
        for rule in theory.rules() {
            let inside = self.generating.contains(&rule.id);
            if applicable(rule, &self.base) != inside {
                return false;
            }
        }
        // Well-founded derivation of prerequisites.
        let mut derived: Vec<Formula> = theory.facts.clone();
        let mut remaining: Vec<&DefaultRule> = theory
            .rules()
            .iter()
            .filter(|r| self.generating.contains(&r.id))
            .collect();
        while !remaining.is_empty() {
            let pos = remaining.iter().position(|r| entails(&derived, &r.prerequisite));
            match pos {
                Some(i) => derived.push(remaining.remove(i).consequent.clone()),
                None => return false,
            }
        }
        true
    }
}

/// Local applicability: prerequisite entailed by the base and every
/// justification individually consistent with it.
pub fn applicable(rule: &DefaultRule, base: &[Formula]) -> bool {
    if !entails(base, &rule.prerequisite) {
        return false;
    }
    rule.justifications.iter().all(|j| {
        let mut with = base.to_vec();
        with.push(j.clone());
        is_consistent(&with)
    })
}

fn base_of(theory: &DefaultTheory, applied: u64) -> Vec<Formula> {
    let mut base = theory.facts.clone();
    for (i, rule) in theory.rules().iter().enumerate() {
        if applied & (1 << i) != 0 {
            base.push(rule.consequent.clone());
        }
    }
    base
}

/// All extensions of the theory, canonically ordered by generating-rule ids.
/// Errors when the rule count exceeds `cap` (see [`DEFAULT_RULE_CAP`]).
pub fn extensions(theory: &DefaultTheory, cap: usize) -> Result<Vec<Extension>> {
    let n = theory.rules().len();
    if n > cap.min(64) {
        return Err(Error::DefaultCapExceeded { got: n, cap: cap.min(64) });
    }

    let mut visited: BTreeSet<u64> = BTreeSet::new();
    let mut found: BTreeMap<u64, Extension> = BTreeMap::new();
    let mut stack: Vec<u64> = vec![0];

    while let Some(applied) = stack.pop() {
        if !visited.insert(applied) {
            continue;
        }
        let base = base_of(theory, applied);
        let mut open = Vec::new();
        for (i, rule) in theory.rules().iter().enumerate() {
            if applied & (1 << i) == 0 && applicable(rule, &base) {
                open.push(i);
            }
        }
        if open.is_empty() {
            // Closed process: every justification of every applied rule must
            // still be consistent with the final base.
            let successful = theory.rules().iter().enumerate().all(|(i, rule)| {
                applied & (1 << i) == 0
                    || rule.justifications.iter().all(|j| {
                        let mut with = base.clone();
                        with.push(j.clone());
                        is_consistent(&with)
                    })
            });
            if successful {
                found.entry(applied).or_insert_with(|| {
                    let generating = theory
                        .rules()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| applied & (1 << i) != 0)
                        .map(|(_, r)| r.id.clone())
                        .collect();
                    Extension { generating, base: base.clone() }
                });
            }
        } else {
            for i in open {
                stack.push(applied | (1 << i));
            }
        }
    }

    let mut out: Vec<Extension> = found.into_values().collect();
    out.sort_by(|a, b| a.generating.cmp(&b.generating));
    Ok(out)
}

/// Outcome of a credulous or skeptical query, with the indices of the
/// extensions that support and oppose the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryAnswer {
    pub holds: bool,
    /// True when skeptical entailment held only because there are no
    /// extensions at all; callers should report that case distinctly.
    pub vacuous: bool,
    pub supporting: Vec<usize>,
    pub opposing: Vec<usize>,
}

fn split(extensions: &[Extension], query: &Formula) -> (Vec<usize>, Vec<usize>) {
    let mut supporting = Vec::new();
    let mut opposing = Vec::new();
    for (i, e) in extensions.iter().enumerate() {
        if e.entails(query) {
            supporting.push(i);
        } else {
            opposing.push(i);
        }
    }
    (supporting, opposing)
}

/// Does some extension entail the query?
pub fn credulous_entails(extensions: &[Extension], query: &Formula) -> QueryAnswer {
    let (supporting, opposing) = split(extensions, query);
    QueryAnswer { holds: !supporting.is_empty(), vacuous: false, supporting, opposing }
}

/// Does every extension entail the query? Vacuously true with none.
pub fn skeptical_entails(extensions: &[Extension], query: &Formula) -> QueryAnswer {
    let (supporting, opposing) = split(extensions, query);
    QueryAnswer {
        holds: opposing.is_empty(),
        vacuous: extensions.is_empty(),
        supporting,
        opposing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Formula {
        Formula::atom(n)
    }

    fn neg(n: &str) -> Formula {
        Formula::not(atom(n))
    }

    fn nixon() -> DefaultTheory {
        DefaultTheory::new(
            vec![Formula::and(vec![atom("quaker"), atom("republican")])],
            vec![
                DefaultRule::normal("d1", atom("quaker"), atom("pacifist")),
                DefaultRule::normal("d2", atom("republican"), neg("pacifist")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn applicability_respects_justification_consistency() {
        let t = nixon();
        let d1 = &t.rules()[0];
        assert!(applicable(d1, &t.facts));
        let mut blocked = t.facts.clone();
        blocked.push(neg("pacifist"));
        assert!(!applicable(d1, &blocked));
        // Prerequisite not entailed.
        assert!(!applicable(d1, &[atom("republican")]));
    }

    #[test]
    fn nixon_diamond_has_two_incomparable_extensions() {
        let t = nixon();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 2);
        let gens: Vec<Vec<&str>> = exts
            .iter()
            .map(|e| e.generating.iter().map(String::as_str).collect())
            .collect();
        assert_eq!(gens, vec![vec!["d1"], vec!["d2"]]);
        for e in &exts {
            assert!(e.verify(&t), "fixpoint validation failed for {:?}", e.generating);
        }
        // Neither base entails everything the other does.
        assert!(exts[0].entails(&atom("pacifist")));
        assert!(!exts[1].entails(&atom("pacifist")));
        assert!(exts[1].entails(&neg("pacifist")));
        assert!(!exts[0].entails(&neg("pacifist")));
    }

    #[test]
    fn nixon_queries_credulous_vs_skeptical() {
        let t = nixon();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        let p = atom("pacifist");
        let np = neg("pacifist");
        assert!(credulous_entails(&exts, &p).holds);
        assert!(credulous_entails(&exts, &np).holds);
        assert!(!skeptical_entails(&exts, &p).holds);
        assert!(!skeptical_entails(&exts, &np).holds);
        // Facts are shared by all extensions.
        assert!(skeptical_entails(&exts, &atom("quaker")).holds);
        let ans = skeptical_entails(&exts, &p);
        assert_eq!(ans.supporting, vec![0]);
        assert_eq!(ans.opposing, vec![1]);
    }

    fn fair_lottery(n: usize) -> DefaultTheory {
        let tickets: Vec<Formula> = (1..=n).map(|i| atom(&format!("t_{i}"))).collect();
        let rules = (1..=n)
            .map(|i| DefaultRule::supernormal(format!("d{i}"), neg(&format!("t_{i}"))))
            .collect();
        DefaultTheory::new(vec![Formula::exactly_one(tickets)], rules).unwrap()
    }

    #[test]
    fn fair_lottery_has_one_extension_per_ticket() {
        for n in 2..=6 {
            let t = fair_lottery(n);
            let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
            assert_eq!(exts.len(), n, "n = {n}");
            for e in &exts {
                assert_eq!(e.generating.len(), n - 1);
                assert!(e.verify(&t));
            }
            // Each ticket's loss is credulous but never skeptical; the
            // skeptical intersection stays silent about every ticket.
            for i in 1..=n {
                let lose = neg(&format!("t_{i}"));
                let win = atom(&format!("t_{i}"));
                assert!(credulous_entails(&exts, &lose).holds);
                assert!(!skeptical_entails(&exts, &lose).holds);
                assert!(credulous_entails(&exts, &win).holds);
                assert!(!skeptical_entails(&exts, &win).holds);
            }
        }
    }

    #[test]
    fn theory_without_rules_has_single_extension() {
        let t = DefaultTheory::new(vec![atom("a")], vec![]).unwrap();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        assert!(exts[0].generating.is_empty());
        assert_eq!(exts[0].base, vec![atom("a")]);
    }

    #[test]
    fn inconsistent_facts_yield_single_trivial_extension() {
        let t = DefaultTheory::new(
            vec![atom("a"), neg("a")],
            vec![DefaultRule::supernormal("d1", atom("b"))],
        )
        .unwrap();
        assert!(!t.facts_consistent());
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        assert!(exts[0].generating.is_empty());
        // The trivial extension entails everything.
        assert!(exts[0].entails(&atom("zzz")));
    }

    #[test]
    fn non_normal_theory_can_have_no_extension() {
        // `true : p / ~p` — applying it defeats its own justification.
        let rule =
            DefaultRule::new("d1", Formula::True, vec![atom("p")], neg("p")).unwrap();
        let t = DefaultTheory::new(vec![], vec![rule]).unwrap();
        assert!(!t.is_normal());
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert!(exts.is_empty());
    }

    #[test]
    fn final_base_recheck_prunes_bad_application_orders() {
        // d2's consequent undermines d1's justification. Only the order that
        // fires d2 first survives, and the result blocks d1.
        let d1 = DefaultRule::normal("d1", Formula::True, atom("p"));
        let d2 = DefaultRule::new("d2", Formula::True, vec![atom("q")], neg("p")).unwrap();
        let t = DefaultTheory::new(vec![], vec![d1, d2]).unwrap();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        let gen: Vec<&str> = exts[0].generating.iter().map(String::as_str).collect();
        assert_eq!(gen, vec!["d2"]);
        assert!(exts[0].entails(&neg("p")));
        assert!(exts[0].verify(&t));
    }

    #[test]
    fn ungrounded_prerequisites_never_fire() {
        // `p : q / q` with empty facts: p is not derivable, so the rule can
        // never contribute, even though {p, q} would be self-supporting.
        let t = DefaultTheory::new(
            vec![],
            vec![DefaultRule::normal("d1", atom("p"), atom("q"))],
        )
        .unwrap();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        assert!(exts[0].generating.is_empty());
    }

    #[test]
    fn prerequisite_chains_apply_in_well_founded_order() {
        let t = DefaultTheory::new(
            vec![atom("a")],
            vec![
                DefaultRule::normal("d1", atom("a"), atom("b")),
                DefaultRule::normal("d2", atom("b"), atom("c")),
            ],
        )
        .unwrap();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        assert_eq!(exts[0].generating.len(), 2);
        assert!(exts[0].entails(&atom("c")));
        assert!(exts[0].verify(&t));
    }

    #[test]
    fn rule_cap_is_enforced() {
        let rules: Vec<DefaultRule> = (0..10)
            .map(|i| DefaultRule::supernormal(format!("d{i}"), atom(&format!("p{i}"))))
            .collect();
        let t = DefaultTheory::new(vec![], rules).unwrap();
        assert!(matches!(
            extensions(&t, 5),
            Err(Error::DefaultCapExceeded { got: 10, cap: 5 })
        ));
        assert!(extensions(&t, DEFAULT_RULE_CAP).is_ok());
    }

    #[test]
    fn duplicate_ids_and_empty_justifications_are_rejected() {
        let a = DefaultRule::supernormal("d", atom("x"));
        let b = DefaultRule::supernormal("d", atom("y"));
        assert_eq!(
            DefaultTheory::new(vec![], vec![a, b]).unwrap_err(),
            Error::DuplicateRuleId("d".to_string())
        );
        assert_eq!(
            DefaultRule::new("e", Formula::True, vec![], atom("x")).unwrap_err(),
            Error::NoJustifications("e".to_string())
        );
    }

    #[test]
    fn skeptical_on_zero_extensions_is_vacuous() {
        let rule = DefaultRule::new("d1", Formula::True, vec![atom("p")], neg("p")).unwrap();
        let t = DefaultTheory::new(vec![], vec![rule]).unwrap();
        let exts = extensions(&t, DEFAULT_RULE_CAP).unwrap();
        let ans = skeptical_entails(&exts, &atom("anything"));
        assert!(ans.holds);
        assert!(ans.vacuous);
        assert!(!credulous_entails(&exts, &atom("anything")).holds);
    }
}
