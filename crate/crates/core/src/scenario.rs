//! Deterministic builders for the classic nonmonotonic puzzles.
//!
//! Each builder returns a [`Scenario`]: a default theory and/or a world
//! model, plus the candidate conclusions, the undercutting conditions aimed
//! at the aggregate candidate, and structured expectations for tests.
//! Identical parameters always yield byte-identical scenarios after
//! serialization, generated model weights always total exactly 1, and the
//! recorded expectations are advisory — tests re-derive every outcome
//! through the engines rather than trusting the builder.

use serde::Serialize;

use crate::defaults::{DefaultRule, DefaultTheory};
use crate::defeat::WarrantInput;
use crate::error::{Error, Result};
use crate::logic::{Atom, Formula};
use crate::prob::{lotteryization_model, LotteryizationParams, WorldModel};
use crate::ratio::Rational;

/// The builder names understood by `scenario list` / `scenario run`.
pub const SCENARIO_NAMES: &[&str] = &[
    "nixon",
    "tweety",
    "fair_lottery",
    "unfair_lottery",
    "preface",
    "korb",
    "lotteryization",
];

/// Advisory notes a builder attaches for tests and reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Expectations {
    /// Expected number of extensions of the theory, when there is one.
    pub extensions: Option<usize>,
    pub notes: Vec<String>,
}

/// One ready-to-run puzzle. At least one of `theory` / `model` is present.
/// `members` and `aggregate` together are the candidate conclusions for
/// warrant analysis; `undercut_conditions` target the aggregate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub theory: Option<DefaultTheory>,
    pub model: Option<WorldModel>,
    pub background: Vec<Formula>,
    pub members: Vec<Formula>,
    pub aggregate: Option<Formula>,
    pub undercut_conditions: Vec<Formula>,
    pub expectations: Expectations,
}

impl Scenario {
    /// Members followed by the aggregate.
    pub fn candidates(&self) -> Vec<Formula> {
        let mut all = self.members.clone();
        all.extend(self.aggregate.clone());
        all
    }

    /// The warrant problem this scenario poses.
    pub fn warrant_input(&self) -> WarrantInput {
        WarrantInput {
            background: self.background.clone(),
            members: self.members.clone(),
            aggregate: self.aggregate.clone(),
            undercut_conditions: self.undercut_conditions.clone(),
        }
    }

    pub fn require_model(&self) -> Result<&WorldModel> {
        self.model.as_ref().ok_or_else(|| Error::MissingModel(self.name.clone()))
    }

    pub fn require_theory(&self) -> Result<&DefaultTheory> {
        self.theory.as_ref().ok_or_else(|| Error::MissingTheory(self.name.clone()))
    }
}

fn atom(name: impl Into<String>) -> Formula {
    Formula::atom(name)
}

fn not(f: Formula) -> Formula {
    Formula::not(f)
}

/// All-but-one conjunction: `wrap` applied to every element except index
/// `skip`.
fn all_but_one(items: &[Formula], skip: usize, wrap: impl Fn(Formula) -> Formula) -> Formula {
    Formula::and(
        items
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, f)| wrap(f.clone()))
            .collect(),
    )
}

/// The diamond: an accepted conjunction feeds two opposed normal defaults,
/// so the theory has exactly two incomparable extensions.
pub fn make_nixon() -> Scenario {
    let facts = vec![Formula::and(vec![atom("quaker"), atom("republican")])];
    let rules = vec![
        DefaultRule::normal("quaker_pacifist", atom("quaker"), atom("pacifist")),
        DefaultRule::normal("republican_not_pacifist", atom("republican"), not(atom("pacifist"))),
    ];
    let theory = DefaultTheory::new(facts, rules).expect("fixed theory is valid");
    Scenario {
        name: "nixon".to_string(),
        theory: Some(theory),
        model: None,
        background: Vec::new(),
        members: Vec::new(),
        aggregate: None,
        undercut_conditions: Vec::new(),
        expectations: Expectations {
            extensions: Some(2),
            notes: vec![
                "credulously entails both pacifist and ~pacifist; skeptically entails neither"
                    .to_string(),
            ],
        },
    }
}

/// One kind of bird for [`make_tweety`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirdKind {
    pub name: String,
    pub flies: bool,
    /// Exceptional kinds get a "the bird is not of this kind" default.
    pub exceptional: bool,
}

impl BirdKind {
    pub fn new(name: impl Into<String>, flies: bool, exceptional: bool) -> Self {
        BirdKind { name: name.into(), flies, exceptional }
    }
}

/// The four-kind taxonomy used as the default parameterization.
pub fn default_bird_kinds() -> Vec<BirdKind> {
    vec![
        BirdKind::new("emu", false, true),
        BirdKind::new("penguin", false, true),
        BirdKind::new("canary", true, true),
        BirdKind::new("sandpiper", true, true),
    ]
}

/// A bird of unknown kind: the kinds are exhaustive and exclusive, each
/// exceptional kind is presumed absent by default. When every kind is
/// exceptional the theory has one extension per kind (each extension is
/// forced to leave one kind open); otherwise the defaults all fire and
/// there is a single extension.
pub fn make_tweety(kinds: &[BirdKind]) -> Result<Scenario> {
    if kinds.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "the bird needs at least two possible kinds, got {}",
            kinds.len()
        )));
    }
    let exceptional: Vec<&BirdKind> = kinds.iter().filter(|k| k.exceptional).collect();
    if exceptional.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one kind must be exceptional, otherwise no default applies".to_string(),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    for k in kinds {
        if k.name == "bird" || k.name == "flies" || !seen.insert(&k.name) {
            return Err(Error::InvalidParameter(format!(
                "kind name `{}` is duplicated or reserved",
                k.name
            )));
        }
    }
    let kind_atoms: Vec<Formula> = kinds.iter().map(|k| atom(&k.name)).collect();
    let mut facts = vec![
        atom("bird"),
        Formula::iff(atom("bird"), Formula::or(kind_atoms.clone())),
    ];
    for i in 0..kinds.len() {
        for j in i + 1..kinds.len() {
            facts.push(not(Formula::and(vec![kind_atoms[i].clone(), kind_atoms[j].clone()])));
        }
    }
    for k in kinds {
        let flight = if k.flies { atom("flies") } else { not(atom("flies")) };
        facts.push(Formula::implies(atom(&k.name), flight));
    }
    let rules: Vec<DefaultRule> = exceptional
        .iter()
        .map(|k| DefaultRule::supernormal(format!("not_{}", k.name), not(atom(&k.name))))
        .collect();
    let expected = if exceptional.len() == kinds.len() { kinds.len() } else { 1 };
    let theory = DefaultTheory::new(facts, rules)?;
    Ok(Scenario {
        name: "tweety".to_string(),
        theory: Some(theory),
        model: None,
        background: Vec::new(),
        members: Vec::new(),
        aggregate: None,
        undercut_conditions: Vec::new(),
        expectations: Expectations {
            extensions: Some(expected),
            notes: vec![
                "skeptically silent about the bird's kind whenever several extensions exist"
                    .to_string(),
            ],
        },
    })
}

fn ticket_atoms(n: u32) -> Vec<Formula> {
    (1..=n).map(|i| atom(format!("t_{i}"))).collect()
}

/// An n-ticket draw with exactly one winner. The theory carries a
/// supernormal "ticket i loses" default per ticket (n extensions, skeptical
/// silence); the uniform model drives the warrant side, where the loss
/// claims collectively defeat each other and the winner-exists disjunction
/// stays warranted.
pub fn make_fair_lottery(n: u32) -> Result<Scenario> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a lottery needs at least 2 tickets, got {n}")));
    }
    let tickets = ticket_atoms(n);
    let facts = vec![Formula::exactly_one(tickets.clone())];
    let rules: Vec<DefaultRule> = (1..=n)
        .map(|i| DefaultRule::supernormal(format!("lose_{i}"), not(atom(format!("t_{i}")))))
        .collect();
    let theory = DefaultTheory::new(facts, rules)?;
    let atoms: Vec<Atom> = (1..=n).map(|i| Atom::new(format!("t_{i}"))).collect();
    let share = Rational::new(1, n as i64);
    let worlds: Vec<(u64, Rational)> = (0..n).map(|i| (1u64 << i, share.clone())).collect();
    let model = WorldModel::new(atoms, worlds)?;
    let members: Vec<Formula> = tickets.iter().cloned().map(not).collect();
    let conditions: Vec<Formula> =
        (0..n as usize).map(|i| all_but_one(&tickets, i, not)).collect();
    Ok(Scenario {
        name: "fair_lottery".to_string(),
        theory: Some(theory),
        model: Some(model),
        background: vec![Formula::exactly_one(tickets.clone())],
        members,
        aggregate: Some(Formula::or(tickets)),
        undercut_conditions: conditions,
        expectations: Expectations {
            extensions: Some(n as usize),
            notes: vec![
                "loss claims are negatively relevant and collectively defeated; the disjunction is certain".to_string(),
            ],
        },
    })
}

/// A draw that is fair only `fair_weight` of the time and has no winner
/// otherwise. No theory — the point is the model: ticket losses stay
/// negatively relevant, yet learning that all other tickets lost *lowers*
/// the probability that any ticket won, undercutting the winner-exists
/// disjunction when the gate is off.
pub fn make_unfair_lottery(n: u32, fair_weight: Rational) -> Result<Scenario> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a lottery needs at least 2 tickets, got {n}")));
    }
    if !fair_weight.in_open_unit_interval() {
        return Err(Error::InvalidParameter(format!(
            "fair_weight must lie strictly between 0 and 1, got {fair_weight}"
        )));
    }
    let tickets = ticket_atoms(n);
    let atoms: Vec<Atom> = (1..=n).map(|i| Atom::new(format!("t_{i}"))).collect();
    let share = &fair_weight / &Rational::from_integer(n as i64);
    let mut worlds: Vec<(u64, Rational)> = vec![(0, &Rational::one() - &fair_weight)];
    for i in 0..n as usize {
        worlds.push((1 << i, share.clone()));
    }
    let model = WorldModel::new(atoms, worlds)?;
    let members: Vec<Formula> = tickets.iter().cloned().map(not).collect();
    let conditions: Vec<Formula> =
        (0..n as usize).map(|i| all_but_one(&tickets, i, not)).collect();
    Ok(Scenario {
        name: "unfair_lottery".to_string(),
        theory: None,
        model: Some(model),
        background: Vec::new(),
        members,
        aggregate: Some(Formula::or(tickets)),
        undercut_conditions: conditions,
        expectations: Expectations {
            extensions: None,
            notes: vec![
                "gate off: the disjunction is undercut and every loss claim is warranted".to_string(),
                "gate on: the undercut is blocked and the loss claims are collectively defeated".to_string(),
            ],
        },
    })
}

/// A book of n statements with a common competence cause: with probability
/// `good_rate` the author is reliable and each statement independently holds
/// with probability `p_good`, otherwise with `p_bad`. This makes the
/// statements positively relevant, so learning that the other statements
/// hold *lowers* the probability of the error disjunction — the undercutting
/// pattern aimed at "some statement is false".
pub fn make_preface(
    n: u32,
    good_rate: Rational,
    p_good: Rational,
    p_bad: Rational,
) -> Result<Scenario> {
    if n < 2 || n > 20 {
        return Err(Error::InvalidParameter(format!(
            "statement count must lie in 2..=20, got {n}"
        )));
    }
    for (name, value) in
        [("good_rate", &good_rate), ("p_good", &p_good), ("p_bad", &p_bad)]
    {
        if !value.in_open_unit_interval() {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie strictly between 0 and 1, got {value}"
            )));
        }
    }
    if p_good < p_bad {
        return Err(Error::InvalidParameter(format!(
            "p_good must be at least p_bad, got {p_good} < {p_bad}"
        )));
    }
    let mut atoms = vec![Atom::new("c")];
    atoms.extend((1..=n).map(|i| Atom::new(format!("s_{i}"))));
    let one = Rational::one();
    let mut worlds: Vec<(u64, Rational)> = Vec::with_capacity(1 << (n + 1));
    for mask in 0u64..(1 << (n + 1)) {
        let competent = mask & 1 != 0;
        let mut weight =
            if competent { good_rate.clone() } else { &one - &good_rate };
        let p = if competent { &p_good } else { &p_bad };
        for i in 1..=n {
            let factor = if mask >> i & 1 != 0 { p.clone() } else { &one - p };
            weight = &weight * &factor;
        }
        worlds.push((mask, weight));
    }
    let model = WorldModel::new(atoms, worlds)?;
    let statements: Vec<Formula> = (1..=n).map(|i| atom(format!("s_{i}"))).collect();
    let conditions: Vec<Formula> = (0..n as usize)
        .map(|i| all_but_one(&statements, i, |f| f))
        .collect();
    let aggregate = Formula::or(statements.iter().cloned().map(not).collect());
    Ok(Scenario {
        name: "preface".to_string(),
        theory: None,
        model: Some(model),
        background: Vec::new(),
        members: statements,
        aggregate: Some(aggregate),
        undercut_conditions: conditions,
        expectations: Expectations {
            extensions: None,
            notes: vec![
                "statements are positively relevant; each all-but-one condition lowers the error disjunction".to_string(),
            ],
        },
    })
}

/// An inductive hypothesis recast as a partition: p holds with probability
/// 1 - q and splits into m equally likely cases, while its negation splits
/// into n. The background ties the partitions together, so the minimal
/// conflict pits p against the m case-denials only — the n denials on the
/// other side follow from p outright.
pub fn make_korb(m: u32, n: u32, q: Rational) -> Result<Scenario> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "both partitions need at least 2 cells, got m={m}, n={n}"
        )));
    }
    if !q.in_open_unit_interval() {
        return Err(Error::InvalidParameter(format!(
            "q must lie strictly between 0 and 1, got {q}"
        )));
    }
    if 2 + m as usize + n as usize > 64 {
        return Err(Error::InvalidParameter(format!(
            "partition sizes m={m}, n={n} exceed the 64-atom model limit"
        )));
    }
    let mut atoms = vec![Atom::new("p"), Atom::new("q")];
    atoms.extend((1..=m).map(|i| Atom::new(format!("p_{i}"))));
    atoms.extend((1..=n).map(|j| Atom::new(format!("q_{j}"))));
    let p_share = &(&Rational::one() - &q) / &Rational::from_integer(m as i64);
    let q_share = &q / &Rational::from_integer(n as i64);
    let mut worlds: Vec<(u64, Rational)> = Vec::with_capacity((m + n) as usize);
    for i in 0..m as usize {
        worlds.push((0b01 | 1 << (2 + i), p_share.clone()));
    }
    for j in 0..n as usize {
        worlds.push((0b10 | 1 << (2 + m as usize + j), q_share.clone()));
    }
    let model = WorldModel::new(atoms, worlds)?;
    let p_cells: Vec<Formula> = (1..=m).map(|i| atom(format!("p_{i}"))).collect();
    let q_cells: Vec<Formula> = (1..=n).map(|j| atom(format!("q_{j}"))).collect();
    let background = vec![
        Formula::iff(atom("p"), not(atom("q"))),
        Formula::iff(atom("p"), Formula::or(p_cells.clone())),
        Formula::iff(atom("q"), Formula::or(q_cells.clone())),
    ];
    let mut members: Vec<Formula> = p_cells.iter().cloned().map(not).collect();
    members.extend(q_cells.iter().cloned().map(not));
    members.push(atom("p"));
    Ok(Scenario {
        name: "korb".to_string(),
        theory: None,
        model: Some(model),
        background,
        members,
        aggregate: None,
        undercut_conditions: Vec::new(),
        expectations: Expectations {
            extensions: None,
            notes: vec![
                "the only minimal conflict is p against the ~p_i; every ~q_j follows from p and stays warranted".to_string(),
            ],
        },
    })
}

/// A single proposition with failure probability q recast as a disjunction
/// of n equally likely alternatives — the collapse construction. Candidates
/// are the alternative-denials plus the disjunction; the conditions are the
/// all-other-alternatives-fail conjunctions whose low probability the gate
/// is meant to exploit.
pub fn make_lotteryization(q: Rational, n: u32) -> Result<Scenario> {
    let params = LotteryizationParams::new(q.clone(), n)?;
    let model = lotteryization_model(&params)?;
    let alternatives: Vec<Formula> = (1..=n).map(|j| atom(format!("p_{j}"))).collect();
    let members: Vec<Formula> = alternatives.iter().cloned().map(not).collect();
    let conditions: Vec<Formula> =
        (0..n as usize).map(|j| all_but_one(&alternatives, j, not)).collect();
    Ok(Scenario {
        name: "lotteryization".to_string(),
        theory: None,
        model: Some(model),
        background: Vec::new(),
        members,
        aggregate: Some(Formula::or(alternatives)),
        undercut_conditions: conditions,
        expectations: Expectations {
            extensions: None,
            notes: vec![
                "gate off: every condition undercuts the disjunction at any n".to_string(),
                format!(
                    "gate on: conditions have probability q + (1-q)/n = {} and are blocked once that is at most 1/2",
                    &q + &(&(&Rational::one() - &q) / &Rational::from_integer(n as i64))
                ),
            ],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::{credulous_entails, extensions, skeptical_entails, DEFAULT_RULE_CAP};
    use crate::defeat::{
        compute_warrants, EngineConfig, GateMode, RelevanceMode, Status,
    };
    use crate::logic::entails;
    use crate::prob::{check_preface_defeater, check_unfair_lottery, classify_relevance, RelevanceClass};

    fn ratio(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn run(scenario: &Scenario, config: &EngineConfig) -> crate::defeat::WarrantReport {
        compute_warrants(
            scenario.require_model().unwrap(),
            &scenario.warrant_input(),
            config,
        )
        .unwrap()
    }

    #[test]
    fn nixon_splits_into_two_extensions() {
        let s = make_nixon();
        let exts = extensions(s.require_theory().unwrap(), DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 2);
        assert_eq!(s.expectations.extensions, Some(2));
        let pacifist = Formula::atom("pacifist");
        assert!(credulous_entails(&exts, &pacifist).holds);
        assert!(credulous_entails(&exts, &Formula::not(pacifist.clone())).holds);
        assert!(!skeptical_entails(&exts, &pacifist).holds);
        assert!(s.require_model().is_err());
    }

    #[test]
    fn tweety_has_one_extension_per_kind_when_all_are_exceptional() {
        let s = make_tweety(&default_bird_kinds()).unwrap();
        let exts = extensions(s.require_theory().unwrap(), DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 4);
        // Each extension pins the bird to exactly one kind...
        for kind in ["emu", "penguin", "canary", "sandpiper"] {
            assert!(credulous_entails(&exts, &Formula::atom(kind)).holds);
            assert!(!skeptical_entails(&exts, &Formula::atom(kind)).holds);
        }
        // ...so nothing kind-specific, not even flight, survives skeptically.
        assert!(!skeptical_entails(&exts, &Formula::atom("flies")).holds);
        assert!(!skeptical_entails(&exts, &Formula::not(Formula::atom("flies"))).holds);
        assert!(skeptical_entails(&exts, &Formula::atom("bird")).holds);
    }

    #[test]
    fn tweety_collapses_to_one_extension_with_a_non_exceptional_escape() {
        let kinds = vec![
            BirdKind::new("emu", false, true),
            BirdKind::new("penguin", false, true),
            BirdKind::new("canary", true, false),
        ];
        let s = make_tweety(&kinds).unwrap();
        let exts = extensions(s.require_theory().unwrap(), DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 1);
        assert!(skeptical_entails(&exts, &Formula::atom("canary")).holds);
        assert!(skeptical_entails(&exts, &Formula::atom("flies")).holds);
    }

    #[test]
    fn tweety_rejects_degenerate_kind_lists() {
        assert!(make_tweety(&[BirdKind::new("emu", false, true)]).is_err());
        let none_exceptional =
            vec![BirdKind::new("emu", false, false), BirdKind::new("canary", true, false)];
        assert!(make_tweety(&none_exceptional).is_err());
        let duplicate =
            vec![BirdKind::new("emu", false, true), BirdKind::new("emu", false, true)];
        assert!(make_tweety(&duplicate).is_err());
        let reserved =
            vec![BirdKind::new("bird", false, true), BirdKind::new("emu", false, true)];
        assert!(make_tweety(&reserved).is_err());
    }

    #[test]
    fn fair_lottery_has_n_extensions_and_skeptical_silence() {
        let s = make_fair_lottery(5).unwrap();
        let exts = extensions(s.require_theory().unwrap(), DEFAULT_RULE_CAP).unwrap();
        assert_eq!(exts.len(), 5);
        for i in 1..=5 {
            let lose = Formula::not(Formula::atom(format!("t_{i}")));
            assert!(credulous_entails(&exts, &lose).holds);
            assert!(!skeptical_entails(&exts, &lose).holds);
        }
        let model = s.require_model().unwrap();
        assert_eq!(model.total_weight(), &Rational::one());
        assert_eq!(
            model.probability(&Formula::not(Formula::atom("t_1"))).unwrap(),
            ratio(4, 5)
        );
        let r = classify_relevance(model, &s.members, &Rational::zero()).unwrap();
        assert_eq!(r.class, RelevanceClass::Negative);
    }

    #[test]
    fn fair_lottery_warrant_collectively_defeats_losses_under_both_gates() {
        let s = make_fair_lottery(4).unwrap();
        for gate_mode in [GateMode::Off, GateMode::On] {
            let cfg = EngineConfig { gate_mode, ..EngineConfig::default() };
            let report = run(&s, &cfg);
            for i in 1..=4 {
                assert_eq!(
                    report.candidate(&format!("~t_{i}")).unwrap().status,
                    Status::CollectivelyDefeated
                );
            }
            let agg = report.candidate("t_1 | t_2 | t_3 | t_4").unwrap();
            assert_eq!(agg.status, Status::Warranted);
            assert!(agg.deductive);
        }
    }

    #[test]
    fn unfair_lottery_matches_the_frozen_numbers() {
        let s = make_unfair_lottery(5, ratio(99, 100)).unwrap();
        let model = s.require_model().unwrap();
        assert_eq!(model.total_weight(), &Rational::one());
        let winner = s.aggregate.clone().unwrap();
        assert_eq!(model.probability(&winner).unwrap(), ratio(99, 100));
        let check = check_unfair_lottery(model, &ticket_atoms(5)).unwrap();
        assert!(check.holds);
        assert!(check.conditional.iter().all(|c| *c == ratio(99, 104)));
        assert_eq!(check.relevance.class, RelevanceClass::Negative);
    }

    #[test]
    fn unfair_lottery_warrants_flip_with_the_gate() {
        let s = make_unfair_lottery(5, ratio(99, 100)).unwrap();
        let agg_name = "t_1 | t_2 | t_3 | t_4 | t_5";

        let off = EngineConfig::default();
        let report = run(&s, &off);
        assert_eq!(report.candidate(agg_name).unwrap().status, Status::Undercut);
        for i in 1..=5 {
            assert_eq!(report.candidate(&format!("~t_{i}")).unwrap().status, Status::Warranted);
        }

        let on = EngineConfig { gate_mode: GateMode::On, ..EngineConfig::default() };
        let report = run(&s, &on);
        let agg = report.candidate(agg_name).unwrap();
        assert_eq!(agg.status, Status::Warranted);
        // Condition probability (1-f) + f(n-1)/n... here 1/100 + 99/500 = 26/125.
        assert!(agg
            .undercuts
            .iter()
            .all(|u| u.condition_probability == ratio(26, 125) && !u.gate_passed));
        for i in 1..=5 {
            let c = report.candidate(&format!("~t_{i}")).unwrap();
            assert_eq!(c.status, Status::CollectivelyDefeated);
            assert_eq!(c.probability, ratio(401, 500));
        }
    }

    #[test]
    fn preface_matches_the_frozen_numbers() {
        let s = make_preface(4, ratio(9, 10), ratio(19, 20), ratio(1, 2)).unwrap();
        let model = s.require_model().unwrap();
        assert_eq!(model.total_weight(), &Rational::one());
        assert_eq!(model.worlds().len(), 32);
        for i in 1..=4 {
            assert_eq!(
                model.probability(&Formula::atom(format!("s_{i}"))).unwrap(),
                ratio(181, 200)
            );
        }
        let r = classify_relevance(model, &s.members, &Rational::zero()).unwrap();
        assert_eq!(r.class, RelevanceClass::Positive);
        let check = check_preface_defeater(model, &s.members).unwrap();
        assert!(check.holds);
        assert_eq!(check.unconditional, ratio(417_111, 1_600_000));
        assert!(check.warnings.is_empty());
    }

    #[test]
    fn preface_gate_off_warrants_every_statement_and_undercuts_the_disjunction() {
        let s = make_preface(4, ratio(9, 10), ratio(19, 20), ratio(1, 2)).unwrap();
        let agg_name = "~s_1 | ~s_2 | ~s_3 | ~s_4";
        for relevance_mode in [RelevanceMode::Always, RelevanceMode::Pollock] {
            let cfg = EngineConfig { relevance_mode, ..EngineConfig::default() };
            let report = run(&s, &cfg);
            for i in 1..=4 {
                assert_eq!(report.candidate(&format!("s_{i}")).unwrap().status, Status::Warranted);
            }
            let agg = report.candidate(agg_name).unwrap();
            assert_eq!(agg.status, Status::Undercut);
            // The error disjunction is improbable here, so there was no
            // reason to begin with; both facts are reported.
            assert!(!agg.has_reason);
            assert_eq!(agg.probability, ratio(417_111, 1_600_000));
            assert!(!agg.notes.is_empty());
            assert!(agg.undercuts.iter().all(|u| u.defeats));
        }
    }

    #[test]
    fn degenerate_preface_is_independent() {
        let s = make_preface(3, ratio(9, 10), ratio(3, 4), ratio(3, 4)).unwrap();
        let model = s.require_model().unwrap();
        let r = classify_relevance(model, &s.members, &Rational::zero()).unwrap();
        assert_eq!(r.class, RelevanceClass::Independent);
        // The strict inequality still holds: learning the others are true
        // removes them from the error disjunction.
        let check = check_preface_defeater(model, &s.members).unwrap();
        assert!(check.holds);
        assert_eq!(check.warnings.len(), 1);
    }

    #[test]
    fn preface_rejects_bad_parameters() {
        assert!(make_preface(1, ratio(9, 10), ratio(19, 20), ratio(1, 2)).is_err());
        assert!(make_preface(4, ratio(9, 10), ratio(1, 2), ratio(19, 20)).is_err());
        assert!(make_preface(4, Rational::one(), ratio(19, 20), ratio(1, 2)).is_err());
        assert!(make_preface(4, ratio(9, 10), ratio(19, 20), Rational::zero()).is_err());
    }

    #[test]
    fn korb_matches_the_frozen_numbers_and_spares_the_other_partition() {
        let s = make_korb(3, 3, ratio(1, 10)).unwrap();
        let model = s.require_model().unwrap();
        assert_eq!(model.total_weight(), &Rational::one());
        assert_eq!(model.probability(&Formula::atom("p")).unwrap(), ratio(9, 10));
        assert_eq!(
            model.probability(&Formula::not(Formula::atom("p_1"))).unwrap(),
            ratio(7, 10)
        );
        assert_eq!(
            model.probability(&Formula::not(Formula::atom("q_1"))).unwrap(),
            ratio(29, 30)
        );
        // Each ~q_j follows deductively from p plus the equivalences.
        let mut base = s.background.clone();
        base.push(Formula::atom("p"));
        for j in 1..=3 {
            assert!(entails(&base, &Formula::not(Formula::atom(format!("q_{j}")))));
        }

        let report = run(&s, &EngineConfig::default());
        assert_eq!(report.candidate("p").unwrap().status, Status::Warranted);
        for i in 1..=3 {
            assert_eq!(
                report.candidate(&format!("~p_{i}")).unwrap().status,
                Status::CollectivelyDefeated
            );
        }
        for j in 1..=3 {
            assert_eq!(report.candidate(&format!("~q_{j}")).unwrap().status, Status::Warranted);
        }
        assert!(make_korb(1, 3, ratio(1, 10)).is_err());
        assert!(make_korb(3, 3, Rational::one()).is_err());
    }

    #[test]
    fn lotteryization_gate_off_reports_both_facts() {
        // At n=5 the undercut fires but the conditional value 9/14 is still
        // above one half; both facts appear in the record.
        let s = make_lotteryization(ratio(1, 10), 5).unwrap();
        let report = run(&s, &EngineConfig::default());
        let agg = report.candidate("p_1 | p_2 | p_3 | p_4 | p_5").unwrap();
        assert_eq!(agg.status, Status::Undercut);
        assert_eq!(agg.probability, ratio(9, 10));
        for u in &agg.undercuts {
            assert!(u.defeats);
            assert_eq!(u.conditional.as_ref().unwrap(), &ratio(9, 14));
        }

        // At n=11 (past the threshold) the conditional drops below one half.
        let s = make_lotteryization(ratio(1, 10), 11).unwrap();
        let report = run(&s, &EngineConfig::default());
        let agg = &report.candidates[11];
        assert!(agg.aggregate);
        assert_eq!(agg.status, Status::Undercut);
        assert_eq!(agg.undercuts[0].conditional.as_ref().unwrap(), &ratio(9, 20));
        assert!(agg.undercuts[0].conditional.as_ref().unwrap() < &ratio(1, 2));
    }

    #[test]
    fn lotteryization_gate_on_protects_the_disjunction_away_from_the_knife_edge() {
        let q = ratio(1, 10);
        let on = EngineConfig { gate_mode: GateMode::On, ..EngineConfig::default() };
        // For n in 3..=8 the members are strictly weaker than the
        // disjunction, whose one-member coalition defeats them.
        for n in [3u32, 5, 8] {
            let s = make_lotteryization(q.clone(), n).unwrap();
            let report = run(&s, &on);
            let agg = report.candidates.last().unwrap();
            assert!(agg.aggregate);
            assert_eq!(agg.status, Status::Warranted, "n = {n}");
            assert!(agg.undercuts.iter().all(|u| !u.gate_passed));
        }
        // Past the crossover the members are stronger; the member coalition
        // against the disjunction only musters the no-alternative weight q,
        // so nothing is defeated at all.
        for n in [10u32, 12] {
            let s = make_lotteryization(q.clone(), n).unwrap();
            let report = run(&s, &on);
            assert!(report.candidates.iter().all(|c| c.status == Status::Warranted), "n = {n}");
            assert_eq!(
                report.sets[0].coalition_probability,
                Some(q.clone()),
                "n = {n}"
            );
        }
        // Two edges where the gate alone does not save the disjunction: at
        // n=2 the condition probability 11/20 clears the gate and the
        // undercut fires; at n=9 every candidate ties at 9/10 and the whole
        // set is collectively defeated.
        let s = make_lotteryization(q.clone(), 2).unwrap();
        let report = run(&s, &on);
        let agg = report.candidate("p_1 | p_2").unwrap();
        assert_eq!(agg.status, Status::Undercut);
        assert!(agg.undercuts.iter().all(|u| u.condition_probability == ratio(11, 20)));

        let s = make_lotteryization(q, 9).unwrap();
        let report = run(&s, &on);
        assert!(report
            .candidates
            .iter()
            .all(|c| c.status == Status::CollectivelyDefeated && c.probability == ratio(9, 10)));
    }

    #[test]
    fn builders_are_deterministic_and_normalized() {
        let build = || -> Vec<Scenario> {
            vec![
                make_nixon(),
                make_tweety(&default_bird_kinds()).unwrap(),
                make_fair_lottery(3).unwrap(),
                make_unfair_lottery(3, ratio(9, 10)).unwrap(),
                make_preface(2, ratio(9, 10), ratio(19, 20), ratio(1, 2)).unwrap(),
                make_korb(2, 2, ratio(1, 10)).unwrap(),
                make_lotteryization(ratio(1, 10), 3).unwrap(),
            ]
        };
        let first = build();
        let second = build();
        for (a, b) in first.iter().zip(&second) {
            let ja = serde_json::to_string(a).unwrap();
            let jb = serde_json::to_string(b).unwrap();
            assert_eq!(ja, jb, "{} serialization is not deterministic", a.name);
            if let Some(model) = &a.model {
                assert_eq!(model.total_weight(), &Rational::one(), "{}", a.name);
            }
            assert!(a.theory.is_some() || a.model.is_some());
        }
        assert_eq!(first.len(), SCENARIO_NAMES.len());
        for (s, name) in first.iter().zip(SCENARIO_NAMES) {
            assert_eq!(&s.name, name);
        }
    }
}
