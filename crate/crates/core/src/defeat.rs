//! Defeasible acceptance and defeat over a world model.
//!
//! High probability gives a prima facie reason: a candidate conclusion F is
//! prima facie acceptable when Pr(F) strictly exceeds the acceptance
//! threshold, with the probability as the reason's strength. Probability 1
//! makes the reason deductive and indefeasible. Reasons can then be defeated
//! two ways:
//!
//! * **Undercutting.** A condition H undercuts a candidate F when
//!   conditioning on H changes F's probability at all — Pr(F | H) ≠ Pr(F),
//!   compared exactly. With the gate enabled, H must itself clear the
//!   acceptance threshold before it may undercut.
//! * **Conflict.** The surviving candidates are checked jointly against the
//!   background. For every minimal set of survivors that is inconsistent
//!   with the background, the weakest members (within `tie_epsilon` of the
//!   set's minimum strength) form the defeat core; the rest form the
//!   coalition. The core is defeated only when the probability of the
//!   coalition's conjunction is at least the core's strength — the
//!   coalition, taken as a single body of evidence, must actually outweigh
//!   what it defeats. A defeated singleton core is *rebutted*; a larger core
//!   is *collectively defeated*. In `pollock` relevance mode a multi-member
//!   core is only defeated when its members are mutually negatively
//!   relevant, which is what separates lottery-like conflicts from
//!   positively correlated ones.
//!
//! Every verdict carries its provenance: the probabilities compared, the
//! gate decisions, and the exact set, core, and coalition behind each
//! defeat.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{is_consistent, Formula};
use crate::prob::{classify_relevance, RelevanceClass, WorldModel};
use crate::ratio::Rational;

/// Whether undercutting conditions must themselves be acceptable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// Any probability-changing condition undercuts.
    Off,
    /// A condition undercuts only if its own probability strictly exceeds
    /// the acceptance threshold.
    On,
}

/// When collective defeat may fire on a multi-member core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceMode {
    /// Fire whenever the coalition is strong enough.
    Always,
    /// Additionally require the core members to be mutually negatively
    /// relevant.
    Pollock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    /// Strict lower bound for a probability to count as a reason. Must lie
    /// in [1/2, 1).
    pub acceptance_threshold: Rational,
    /// Strengths within this distance of a conflict set's minimum are tied
    /// into the defeat core. Must be nonnegative.
    pub tie_epsilon: Rational,
    pub gate_mode: GateMode,
    pub relevance_mode: RelevanceMode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            acceptance_threshold: Rational::new(1, 2),
            tie_epsilon: Rational::zero(),
            gate_mode: GateMode::Off,
            relevance_mode: RelevanceMode::Always,
        }
    }
}

impl EngineConfig {
    fn validate(&self) -> Result<()> {
        let half = Rational::new(1, 2);
        if self.acceptance_threshold < half || self.acceptance_threshold >= Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "acceptance threshold must lie in [1/2, 1), got {}",
                self.acceptance_threshold
            )));
        }
        if self.tie_epsilon.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "tie epsilon must be nonnegative, got {}",
                self.tie_epsilon
            )));
        }
        Ok(())
    }
}

/// A prima facie reason for a conclusion: its probability under the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reason {
    pub conclusion: Formula,
    pub strength: Rational,
    /// Strength exactly 1; such a reason cannot be defeated.
    pub deductive: bool,
}

/// Returns the reason for `candidate` when its probability strictly exceeds
/// the acceptance threshold, and `None` otherwise (a probability of exactly
/// the threshold is not a reason).
pub fn prima_facie_reason(
    model: &WorldModel,
    candidate: &Formula,
    config: &EngineConfig,
) -> Result<Option<Reason>> {
    config.validate()?;
    let strength = model.probability(candidate)?;
    if strength > config.acceptance_threshold {
        let deductive = strength == Rational::one();
        Ok(Some(Reason { conclusion: candidate.clone(), strength, deductive }))
    } else {
        Ok(None)
    }
}

/// One evaluated undercutting condition, with every probability that went
/// into the decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UndercutRecord {
    pub condition: String,
    pub condition_probability: Rational,
    /// Pr(target).
    pub unconditional: Rational,
    /// Pr(target | condition); `None` when the condition has probability
    /// zero and conditioning is undefined.
    pub conditional: Option<Rational>,
    /// The conditional differs from the unconditional (exact comparison).
    pub changes: bool,
    /// True when the gate was consulted (gate mode on).
    pub gate_checked: bool,
    /// True when the gate is off, or the condition's own probability
    /// strictly exceeds the acceptance threshold.
    pub gate_passed: bool,
    /// The condition actually undercuts: defined, probability-changing, and
    /// gate-passed.
    pub defeats: bool,
}

/// All conditions evaluated against one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndercutScan {
    pub records: Vec<UndercutRecord>,
    pub warnings: Vec<String>,
}

impl UndercutScan {
    pub fn any_defeats(&self) -> bool {
        self.records.iter().any(|r| r.defeats)
    }
}

/// Evaluates each condition against the target: does conditioning change the
/// target's probability, and (gate on) is the condition itself acceptable?
/// Zero-probability conditions cannot undercut and are reported as warnings.
pub fn undercut_scan(
    model: &WorldModel,
    target: &Formula,
    conditions: &[Formula],
    config: &EngineConfig,
) -> Result<UndercutScan> {
    config.validate()?;
    let unconditional = model.probability(target)?;
    let mut records = Vec::with_capacity(conditions.len());
    let mut warnings = Vec::new();
    for condition in conditions {
        let condition_probability = model.probability(condition)?;
        let conditional = if condition_probability.is_zero() {
            warnings.push(format!(
                "condition `{condition}` has probability zero; it cannot undercut"
            ));
            None
        } else {
            Some(model.conditional(target, condition)?)
        };
        let changes = conditional.as_ref().map_or(false, |c| *c != unconditional);
        let gate_checked = config.gate_mode == GateMode::On;
        let gate_passed =
            !gate_checked || condition_probability > config.acceptance_threshold;
        let defeats = changes && gate_passed;
        records.push(UndercutRecord {
            condition: condition.to_string(),
            condition_probability,
            unconditional: unconditional.clone(),
            conditional,
            changes,
            gate_checked,
            gate_passed,
            defeats,
        });
    }
    Ok(UndercutScan { records, warnings })
}

/// Minimal subsets of `conclusions` (as index sets, each sorted ascending)
/// that are jointly inconsistent with the background. The background alone
/// must be consistent. Result is ordered by size, then lexicographically.
pub fn minimal_inconsistent_sets(
    background: &[Formula],
    conclusions: &[Formula],
) -> Result<Vec<Vec<usize>>> {
    if !is_consistent(background) {
        return Err(Error::InconsistentBackground);
    }
    let n = conclusions.len();
    if n > 20 {
        return Err(Error::InvalidParameter(format!(
            "minimal-set analysis supports at most 20 conclusions, got {n}"
        )));
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut combo: Vec<usize> = Vec::new();
    for size in 1..=n {
        let mut sized: Vec<Vec<usize>> = Vec::new();
        combinations(n, size, 0, &mut combo, &mut |set| {
            if found.iter().any(|f| f.iter().all(|i| set.contains(i))) {
                return; // a known minimal set is contained in this one
            }
            let mut pool: Vec<Formula> = background.to_vec();
            pool.extend(set.iter().map(|&i| conclusions[i].clone()));
            if !is_consistent(&pool) {
                sized.push(set.to_vec());
            }
        });
        found.extend(sized);
    }
    for set in &found {
        for drop in set {
            let mut pool: Vec<Formula> = background.to_vec();
            pool.extend(set.iter().filter(|i| *i != drop).map(|&i| conclusions[i].clone()));
            debug_assert!(is_consistent(&pool), "kept set is not minimal");
        }
    }
    Ok(found)
}

fn combinations(n: usize, size: usize, start: usize, combo: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if combo.len() == size {
        visit(combo);
        return;
    }
    let remaining = size - combo.len();
    for i in start..=n.saturating_sub(remaining) {
        combo.push(i);
        combinations(n, size, i + 1, combo, visit);
        combo.pop();
    }
}

/// Final verdict for one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Backed by an undefeated reason.
    Warranted,
    /// Probability not strictly above the threshold, and nothing undercut
    /// it either.
    NoReason,
    /// A condition changed its probability (and passed the gate, if on).
    Undercut,
    /// Defeated as the sole weakest member of a minimal conflict.
    Rebutted,
    /// Defeated together with the other tied-weakest members of a minimal
    /// conflict.
    CollectivelyDefeated,
}

/// What happened to one minimal inconsistent set during conflict
/// resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum SetOutcome {
    /// The core was defeated.
    Fired,
    /// A member was already defeated by an earlier set, so the conflict no
    /// longer has full support.
    SkippedDefeatedMember,
    /// The coalition's conjunction is less probable than the core's
    /// strength; nothing is defeated.
    CoalitionTooWeak,
    /// Pollock relevance mode withheld defeat because the core is not
    /// mutually negatively relevant.
    WithheldByRelevance { class: RelevanceClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetRecord {
    /// Display forms of the set's member conclusions.
    pub members: Vec<String>,
    /// Tied-weakest members (the defeat core).
    pub core: Vec<String>,
    /// The remaining, stronger members.
    pub coalition: Vec<String>,
    /// Pr(conjunction of the coalition); 1 for an empty coalition. Absent
    /// when the set was skipped before evaluation.
    pub coalition_probability: Option<Rational>,
    /// The core's strength (minimum strength in the set). Absent when the
    /// set was skipped before evaluation.
    pub min_strength: Option<Rational>,
    pub outcome: SetOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    /// Display form of the candidate conclusion.
    pub conclusion: String,
    /// True for the aggregate candidate (the one undercutting conditions
    /// target).
    pub aggregate: bool,
    /// Pr(conclusion) under the model.
    pub probability: Rational,
    /// Probability exactly 1.
    pub deductive: bool,
    /// Probability strictly above the acceptance threshold.
    pub has_reason: bool,
    pub status: Status,
    pub undercuts: Vec<UndercutRecord>,
    /// Index into the report's `sets` of the conflict that defeated this
    /// candidate, if any.
    pub defeated_by: Option<usize>,
    pub notes: Vec<String>,
}

/// The problem handed to [`compute_warrants`]: accepted background, member
/// candidates, an optional aggregate candidate, and undercutting conditions
/// aimed at the aggregate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WarrantInput {
    pub background: Vec<Formula>,
    pub members: Vec<Formula>,
    pub aggregate: Option<Formula>,
    pub undercut_conditions: Vec<Formula>,
}

impl WarrantInput {
    /// Members followed by the aggregate, in report order.
    pub fn candidates(&self) -> Vec<Formula> {
        let mut all = self.members.clone();
        all.extend(self.aggregate.clone());
        all
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WarrantReport {
    pub config: EngineConfig,
    /// One entry per candidate, members first, aggregate last.
    pub candidates: Vec<CandidateReport>,
    /// Every minimal inconsistent set examined, in processing order.
    pub sets: Vec<SetRecord>,
    pub warnings: Vec<String>,
}

impl WarrantReport {
    /// Report for the candidate whose display form is `conclusion`.
    pub fn candidate(&self, conclusion: &str) -> Option<&CandidateReport> {
        self.candidates.iter().find(|c| c.conclusion == conclusion)
    }

    pub fn warranted(&self, conclusion: &str) -> bool {
        self.candidate(conclusion).map_or(false, |c| c.status == Status::Warranted)
    }
}

/// Runs the full pipeline: acceptance, undercutting against the aggregate,
/// then conflict resolution over every minimal inconsistent set of
/// survivors.
///
/// Deductive candidates (probability 1) are indefeasible; their conclusions
/// join the background for conflict analysis. Candidates without a reason
/// take no part in conflicts, but a valid undercutting condition is still
/// reported as `Undercut` on a below-threshold aggregate so the two
/// independent facts — no reason, and a probability-changing condition —
/// are both visible.
pub fn compute_warrants(
    model: &WorldModel,
    input: &WarrantInput,
    config: &EngineConfig,
) -> Result<WarrantReport> {
    config.validate()?;
    let candidates = input.candidates();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for c in &candidates {
        if !seen.insert(c.to_string()) {
            return Err(Error::InvalidParameter(format!("duplicate candidate `{c}`")));
        }
    }
    let aggregate_index = input.aggregate.as_ref().map(|_| candidates.len() - 1);

    let mut warnings = Vec::new();
    let mut reports: Vec<CandidateReport> = Vec::with_capacity(candidates.len());
    for (i, candidate) in candidates.iter().enumerate() {
        let probability = model.probability(candidate)?;
        let deductive = probability == Rational::one();
        let has_reason = probability > config.acceptance_threshold;
        let is_aggregate = Some(i) == aggregate_index;
        let mut undercuts = Vec::new();
        let mut notes = Vec::new();
        let mut status = if has_reason { Status::Warranted } else { Status::NoReason };
        if is_aggregate && !input.undercut_conditions.is_empty() {
            let scan = undercut_scan(model, candidate, &input.undercut_conditions, config)?;
            warnings.extend(scan.warnings.iter().cloned());
            if scan.any_defeats() {
                status = Status::Undercut;
                if !has_reason {
                    notes.push(format!(
                        "probability {probability} is not above the threshold {}, so there is no reason to undercut; the condition's effect is reported all the same",
                        config.acceptance_threshold
                    ));
                }
            }
            undercuts = scan.records;
        }
        if !has_reason && status == Status::NoReason {
            notes.push(format!(
                "probability {probability} does not strictly exceed the threshold {}",
                config.acceptance_threshold
            ));
        }
        reports.push(CandidateReport {
            conclusion: candidate.to_string(),
            aggregate: is_aggregate,
            probability,
            deductive,
            has_reason,
            status,
            undercuts,
            defeated_by: None,
            notes,
        });
    }
    if input.aggregate.is_none() && !input.undercut_conditions.is_empty() {
        warnings.push(
            "undercutting conditions were given without an aggregate candidate; they were not applied"
                .to_string(),
        );
    }

    // Background for conflict analysis: accepted statements plus deductive
    // conclusions, which nothing can defeat.
    let mut base = input.background.clone();
    for (i, report) in reports.iter().enumerate() {
        if report.deductive && report.status == Status::Warranted {
            base.push(candidates[i].clone());
        }
    }

    // Conflict pool: defeasibly supported survivors.
    let pool: Vec<usize> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.status == Status::Warranted && !r.deductive)
        .map(|(i, _)| i)
        .collect();
    let pool_formulas: Vec<Formula> = pool.iter().map(|&i| candidates[i].clone()).collect();
    let sets_idx = minimal_inconsistent_sets(&base, &pool_formulas)?;

    let mut set_records: Vec<SetRecord> = Vec::with_capacity(sets_idx.len());
    for set in &sets_idx {
        let members: Vec<usize> = set.iter().map(|&k| pool[k]).collect();
        let member_names: Vec<String> =
            members.iter().map(|&i| reports[i].conclusion.clone()).collect();
        if members.iter().any(|&i| reports[i].status != Status::Warranted) {
            set_records.push(SetRecord {
                members: member_names,
                core: Vec::new(),
                coalition: Vec::new(),
                coalition_probability: None,
                min_strength: None,
                outcome: SetOutcome::SkippedDefeatedMember,
            });
            continue;
        }
        let min_strength =
            members.iter().map(|&i| reports[i].probability.clone()).min().expect("nonempty set");
        let tie_cutoff = &min_strength + &config.tie_epsilon;
        let (core, coalition): (Vec<usize>, Vec<usize>) =
            members.iter().partition(|&&i| reports[i].probability <= tie_cutoff);
        let coalition_formulas: Vec<Formula> =
            coalition.iter().map(|&i| candidates[i].clone()).collect();
        let coalition_probability = model.probability(&Formula::and(coalition_formulas))?;
        let core_names: Vec<String> =
            core.iter().map(|&i| reports[i].conclusion.clone()).collect();
        let coalition_names: Vec<String> =
            coalition.iter().map(|&i| reports[i].conclusion.clone()).collect();

        let outcome = if coalition_probability < min_strength {
            SetOutcome::CoalitionTooWeak
        } else if core.len() >= 2 && config.relevance_mode == RelevanceMode::Pollock {
            let core_formulas: Vec<Formula> =
                core.iter().map(|&i| candidates[i].clone()).collect();
            let relevance = classify_relevance(model, &core_formulas, &Rational::zero())?;
            if relevance.class == RelevanceClass::Negative {
                SetOutcome::Fired
            } else {
                SetOutcome::WithheldByRelevance { class: relevance.class }
            }
        } else {
            SetOutcome::Fired
        };
        if outcome == SetOutcome::Fired {
            let status =
                if core.len() == 1 { Status::Rebutted } else { Status::CollectivelyDefeated };
            for &i in &core {
                reports[i].status = status;
                reports[i].defeated_by = Some(set_records.len());
            }
        }
        set_records.push(SetRecord {
            members: member_names,
            core: core_names,
            coalition: coalition_names,
            coalition_probability: Some(coalition_probability),
            min_strength: Some(min_strength),
            outcome,
        });
    }

    Ok(WarrantReport { config: config.clone(), candidates: reports, sets: set_records, warnings })
}
