//! Exact probability over finite weighted world models.
//!
//! A model is an atom registry plus a list of distinct truth assignments
//! (worlds) with nonnegative rational weights. Probabilities are weight sums
//! divided by the total weight — no normalization is assumed and nothing is
//! ever rounded. Conditioning on a zero-probability event is an error, never
//! a silent 0/0.
//!
//! The module also carries the lottery-collapse analysis: the simplified
//! closed form `1 - q/(q + 1/n)`, the model-faithful form
//! `1 - q/(q + (1-q)/n)`, the explicit uniform model that backs the latter by
//! direct enumeration, and the warrant-threshold scan for both forms. The two
//! forms disagree because the simplified derivation treats the probability of
//! an all-but-one-fails conjunction as `q + 1/n` where the model gives
//! `q + (1-q)/n`; reports always carry both sides of that discrepancy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Atom, Formula};
use crate::ratio::Rational;

/// One truth assignment with its weight. Bit `i` gives the value of the
/// model's atom `i`, so models are limited to 64 atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub bits: u64,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldModel {
    atoms: Vec<Atom>,
    worlds: Vec<World>,
    total: Rational,
}

impl WorldModel {
    /// Validates and canonicalizes: atoms unique, at most 64; world
    /// assignments distinct with nonnegative weights summing to a positive
    /// total. Worlds are stored sorted by assignment.
    pub fn new(atoms: Vec<Atom>, worlds: Vec<(u64, Rational)>) -> Result<Self> {
        if atoms.len() > 64 {
            return Err(Error::InvalidParameter(format!(
                "world models support at most 64 atoms, got {}",
                atoms.len()
            )));
        }
        let unique: BTreeSet<&Atom> = atoms.iter().collect();
        if unique.len() != atoms.len() {
            return Err(Error::InvalidParameter("duplicate atom in model registry".into()));
        }
        let width = atoms.len();
        let mut sorted: Vec<World> = Vec::with_capacity(worlds.len());
        let mut total = Rational::zero();
        for (bits, weight) in worlds {
            if width < 64 && bits >> width != 0 {
                return Err(Error::WorldWidthMismatch { got: 64 - bits.leading_zeros() as usize, want: width });
            }
            if weight.is_negative() {
                return Err(Error::NegativeWeight(weight.to_string()));
            }
            total += &weight;
            sorted.push(World { bits, weight });
        }
        sorted.sort_by_key(|w| w.bits);
        for pair in sorted.windows(2) {
            if pair[0].bits == pair[1].bits {
                return Err(Error::DuplicateWorld(bits_string(pair[0].bits, width)));
            }
        }
        if !total.is_positive() {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(WorldModel { atoms, worlds: sorted, total })
    }

    /// As [`WorldModel::new`], but with assignments written as bit strings:
    /// character `i` gives atom `i`'s value, so `"01"` over atoms `[a, b]`
    /// is the world where only `b` holds.
    pub fn from_bit_strings(atoms: Vec<Atom>, worlds: Vec<(String, Rational)>) -> Result<Self> {
        let width = atoms.len();
        let worlds = worlds
            .into_iter()
            .map(|(bits, weight)| Ok((bits_from_string(&bits, width)?, weight)))
            .collect::<Result<Vec<_>>>()?;
        WorldModel::new(atoms, worlds)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn total_weight(&self) -> &Rational {
        &self.total
    }

    pub fn bits_string(&self, world: &World) -> String {
        bits_string(world.bits, self.atoms.len())
    }

    fn check_known(&self, f: &Formula) -> Result<BTreeMap<Atom, usize>> {
        let index: BTreeMap<Atom, usize> =
            self.atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        for a in f.atoms() {
            if !index.contains_key(&a) {
                return Err(Error::UnknownAtom(a.name().to_string()));
            }
        }
        Ok(index)
    }

    fn weight_where(&self, f: &Formula) -> Result<Rational> {
        let index = self.check_known(f)?;
        let mut sum = Rational::zero();
        for w in &self.worlds {
            let truth = |a: &Atom| w.bits & (1 << index[a]) != 0;
            if f.eval(&truth) {
                sum += &w.weight;
            }
        }
        Ok(sum)
    }

    /// Pr(f): total weight of satisfying worlds over total weight.
    pub fn probability(&self, f: &Formula) -> Result<Rational> {
        Ok(&self.weight_where(f)? / &self.total)
    }

    /// Pr(f | given); errors when the conditioning event has weight zero.
    pub fn conditional(&self, f: &Formula, given: &Formula) -> Result<Rational> {
        let given_weight = self.weight_where(given)?;
        if given_weight.is_zero() {
            return Err(Error::ZeroProbabilityCondition);
        }
        let joint = self.weight_where(&Formula::and(vec![f.clone(), given.clone()]))?;
        Ok(&joint / &given_weight)
    }
}

fn bits_string(bits: u64, width: usize) -> String {
    (0..width).map(|i| if bits & (1 << i) != 0 { '1' } else { '0' }).collect()
}

fn bits_from_string(s: &str, width: usize) -> Result<u64> {
    if s.len() != width {
        return Err(Error::WorldWidthMismatch { got: s.len(), want: width });
    }
    let mut bits = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '1' => bits |= 1 << i,
            '0' => {}
            other => {
                return Err(Error::InvalidParameter(format!(
                    "world bits must be 0 or 1, got `{other}`"
                )))
            }
        }
    }
    Ok(bits)
}

#[derive(Serialize, Deserialize)]
struct WorldDto {
    bits: String,
    weight: Rational,
}

#[derive(Serialize, Deserialize)]
struct WorldModelDto {
    atoms: Vec<String>,
    worlds: Vec<WorldDto>,
}

impl Serialize for WorldModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dto = WorldModelDto {
            atoms: self.atoms.iter().map(|a| a.name().to_string()).collect(),
            worlds: self
                .worlds
                .iter()
                .map(|w| WorldDto { bits: self.bits_string(w), weight: w.weight.clone() })
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WorldModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = WorldModelDto::deserialize(deserializer)?;
        let atoms: Vec<Atom> = dto.atoms.into_iter().map(Atom::new).collect();
        let width = atoms.len();
        let worlds = dto
            .worlds
            .into_iter()
            .map(|w| Ok((bits_from_string(&w.bits, width)?, w.weight)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        WorldModel::new(atoms, worlds).map_err(serde::de::Error::custom)
    }
}

/// How a set of propositions hangs together probabilistically: each margin is
/// Pr(s_i | all the others) - Pr(s_i).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceClass {
    Positive,
    Negative,
    Independent,
    Mixed,
}

impl fmt::Display for RelevanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelevanceClass::Positive => "positive",
            RelevanceClass::Negative => "negative",
            RelevanceClass::Independent => "independent",
            RelevanceClass::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceReport {
    pub class: RelevanceClass,
    /// One margin per proposition; `None` when the conditioning conjunction
    /// has probability zero (which forces class `Mixed`).
    pub margins: Vec<Option<Rational>>,
}

/// Classifies mutual relevance with an exact comparison by default;
/// `tolerance` widens the band treated as "no difference" when inputs are
/// themselves approximate.
pub fn classify_relevance(
    m: &WorldModel,
    props: &[Formula],
    tolerance: &Rational,
) -> Result<RelevanceReport> {
    if props.len() < 2 {
        return Err(Error::TooFewPropositions(props.len()));
    }
    let mut margins = Vec::with_capacity(props.len());
    for (i, p) in props.iter().enumerate() {
        let others: Vec<Formula> =
            props.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
        let cond = Formula::and(others);
        let margin = match m.conditional(p, &cond) {
            Ok(c) => Some(&c - &m.probability(p)?),
            Err(Error::ZeroProbabilityCondition) => None,
            Err(e) => return Err(e),
        };
        margins.push(margin);
    }
    let class = if margins.iter().any(Option::is_none) {
        RelevanceClass::Mixed
    } else {
        let defined: Vec<&Rational> = margins.iter().map(|m| m.as_ref().unwrap()).collect();
        if defined.iter().all(|m| *m > tolerance) {
            RelevanceClass::Positive
        } else if defined.iter().all(|m| **m < -tolerance) {
            RelevanceClass::Negative
        } else if defined.iter().all(|m| m.abs() <= *tolerance) {
            RelevanceClass::Independent
        } else {
            RelevanceClass::Mixed
        }
    };
    Ok(RelevanceReport { class, margins })
}

/// Result of testing whether learning that all other statements hold lowers
/// the probability of "some statement fails".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefaceCheck {
    /// True when the conditional is strictly below the unconditional for
    /// every statement.
    pub holds: bool,
    /// Pr(some statement false), unconditional.
    pub unconditional: Rational,
    /// Pr(some statement false | all others true), one entry per statement.
    pub conditional: Vec<Rational>,
    pub relevance: Option<RelevanceReport>,
    pub warnings: Vec<String>,
}

/// For each statement s_i, compares Pr(error-disjunction | all other
/// statements) against Pr(error-disjunction). The construction expects
/// positively relevant statements; anything else is reported as a warning,
/// not silently assumed away.
pub fn check_preface_defeater(m: &WorldModel, statements: &[Formula]) -> Result<PrefaceCheck> {
    if statements.is_empty() {
        return Err(Error::InvalidParameter("preface check needs at least one statement".into()));
    }
    let disjunction =
        Formula::or(statements.iter().map(|s| Formula::not(s.clone())).collect());
    let unconditional = m.probability(&disjunction)?;
    let mut conditional = Vec::with_capacity(statements.len());
    for i in 0..statements.len() {
        let others: Vec<Formula> = statements
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, f)| f.clone())
            .collect();
        conditional.push(m.conditional(&disjunction, &Formula::and(others))?);
    }
    let holds = conditional.iter().all(|c| c < &unconditional);
    let mut warnings = Vec::new();
    let relevance = if statements.len() >= 2 {
        let report = classify_relevance(m, statements, &Rational::zero())?;
        if report.class != RelevanceClass::Positive {
            warnings.push(format!(
                "statements are {} rather than positively relevant; the construction's premise does not apply",
                report.class
            ));
        }
        Some(report)
    } else {
        None
    };
    Ok(PrefaceCheck { holds, unconditional, conditional, relevance, warnings })
}

/// Result of the biased-lottery undercut check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfairLotteryCheck {
    /// True when Pr(some winner | all others lost) is strictly below
    /// Pr(some winner) for every ticket.
    pub holds: bool,
    /// Pr(some ticket wins), unconditional.
    pub unconditional: Rational,
    /// Pr(some ticket wins | every other ticket lost), one entry per ticket.
    pub conditional: Vec<Rational>,
    /// Relevance classification of the ticket-loss propositions.
    pub relevance: RelevanceReport,
}

/// Verifies the two facts the biased lottery is built to exhibit: the ticket
/// losses are negatively relevant, and yet seeing all other tickets lose
/// *lowers* the probability that the draw has any winner at all.
pub fn check_unfair_lottery(m: &WorldModel, tickets: &[Formula]) -> Result<UnfairLotteryCheck> {
    if tickets.len() < 2 {
        return Err(Error::InvalidParameter("unfair lottery check needs at least two tickets".into()));
    }
    let some_winner = Formula::or(tickets.to_vec());
    let unconditional = m.probability(&some_winner)?;
    let mut conditional = Vec::with_capacity(tickets.len());
    for i in 0..tickets.len() {
        let others_lose: Vec<Formula> = tickets
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, t)| Formula::not(t.clone()))
            .collect();
        conditional.push(m.conditional(&some_winner, &Formula::and(others_lose))?);
    }
    let holds = conditional.iter().all(|c| c < &unconditional);
    let losses: Vec<Formula> = tickets.iter().map(|t| Formula::not(t.clone())).collect();
    let relevance = classify_relevance(m, &losses, &Rational::zero())?;
    Ok(UnfairLotteryCheck { holds, unconditional, conditional, relevance })
}

/// Parameters of the lottery-collapse construction: a proposition with
/// failure probability `q = Pr(~P)` is recast as a disjunction of `n`
/// equally likely alternatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotteryizationParams {
    pub q: Rational,
    pub n: u32,
}

impl LotteryizationParams {
    pub fn new(q: Rational, n: u32) -> Result<Self> {
        if !q.in_open_unit_interval() {
            return Err(Error::InvalidParameter(format!(
                "q must lie strictly between 0 and 1, got {q}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        Ok(LotteryizationParams { q, n })
    }
}

fn n_rational(n: u32) -> Rational {
    Rational::from_integer(n as i64)
}

/// Simplified closed form: `1 - q/(q + 1/n)`.
pub fn lotteryization_value_paper(params: &LotteryizationParams) -> Rational {
    let inv_n = n_rational(params.n).recip();
    &Rational::one() - &(&params.q / &(&params.q + &inv_n))
}

/// Model-faithful closed form: `1 - q/(q + (1-q)/n)`.
pub fn lotteryization_value_exact_closed_form(params: &LotteryizationParams) -> Rational {
    let share = &(&Rational::one() - &params.q) / &n_rational(params.n);
    &Rational::one() - &(&params.q / &(&params.q + &share))
}

/// The explicit uniform model: atoms `p_1..p_n`; one all-false world with
/// weight q, and one world per alternative j (only `p_j` true) with weight
/// `(1-q)/n`.
pub fn lotteryization_model(params: &LotteryizationParams) -> Result<WorldModel> {
    let n = params.n as usize;
    let atoms: Vec<Atom> = (1..=n).map(|j| Atom::new(format!("p_{j}"))).collect();
    let share = &(&Rational::one() - &params.q) / &n_rational(params.n);
    let mut worlds: Vec<(u64, Rational)> = vec![(0, params.q.clone())];
    for j in 0..n {
        worlds.push((1 << j, share.clone()));
    }
    WorldModel::new(atoms, worlds)
}

/// Everything the collapse analysis produces for one (q, n), including both
/// sides of the closed-form discrepancy. `exact_enumerated` comes from
/// summing worlds in the explicit model and must equal
/// `exact_closed_form`; tests hold that equality on a grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LotteryizationReport {
    pub q: Rational,
    pub n: u32,
    /// Simplified form 1 - q/(q + 1/n).
    pub paper_value: Rational,
    /// Model form 1 - q/(q + (1-q)/n).
    pub exact_value: Rational,
    /// Pr(p_j | all other alternatives false) by direct world enumeration.
    pub exact_enumerated: Rational,
    /// Probability of the all-but-one-false conjunction as the simplified
    /// derivation states it: q + 1/n.
    pub survivor_event_simplified: Rational,
    /// The same event's probability in the explicit model: q + (1-q)/n.
    pub survivor_event_exact: Rational,
}

impl LotteryizationReport {
    /// True when the simplified and model-faithful forms disagree, which is
    /// the case for every q in (0,1): the simplified survivor-event
    /// probability q + 1/n overstates the exact q + (1-q)/n by q/n.
    pub fn forms_disagree(&self) -> bool {
        self.paper_value != self.exact_value
    }
}

/// Computes both closed forms and verifies the exact one against the
/// explicit uniform model by enumeration.
pub fn lotteryization_report(params: &LotteryizationParams) -> Result<LotteryizationReport> {
    let model = lotteryization_model(params)?;
    let p_1 = Formula::atom("p_1");
    let others: Vec<Formula> = (2..=params.n)
        .map(|j| Formula::not(Formula::atom(format!("p_{j}"))))
        .collect();
    let exact_enumerated = model.conditional(&p_1, &Formula::and(others))?;
    let inv_n = n_rational(params.n).recip();
    let share = &(&Rational::one() - &params.q) / &n_rational(params.n);
    Ok(LotteryizationReport {
        q: params.q.clone(),
        n: params.n,
        paper_value: lotteryization_value_paper(params),
        exact_value: lotteryization_value_exact_closed_form(params),
        exact_enumerated,
        survivor_event_simplified: &params.q + &inv_n,
        survivor_event_exact: &params.q + &share,
    })
}

/// Which closed form drives a threshold scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueMode {
    /// Simplified form 1 - q/(q + 1/n).
    Paper,
    /// Model form 1 - q/(q + (1-q)/n).
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    /// Smallest n >= 2 whose value falls strictly below 1/2.
    pub n: u32,
    /// The value at that n.
    pub value: Rational,
    /// The n at which the value equals 1/2 exactly, when the scan crossed
    /// such a boundary. A value of exactly 1/2 gives no reason (acceptance
    /// needs strictly more than 1/2), but the scan still reports the first
    /// strictly-below n.
    pub boundary_n: Option<u32>,
}

/// Scans n = 2, 3, ... for the first value strictly below 1/2. Terminates
/// because both forms tend to 0 as n grows.
pub fn warrant_threshold(q: &Rational, mode: ValueMode) -> Result<Threshold> {
    if !q.in_open_unit_interval() {
        return Err(Error::InvalidParameter(format!(
            "q must lie strictly between 0 and 1, got {q}"
        )));
    }
    let half = Rational::new(1, 2);
    let mut boundary_n = None;
    let mut n = 2u32;
    loop {
        let params = LotteryizationParams { q: q.clone(), n };
        let value = match mode {
            ValueMode::Paper => lotteryization_value_paper(&params),
            ValueMode::Exact => lotteryization_value_exact_closed_form(&params),
        };
        if value == half {
            boundary_n = Some(n);
        }
        if value < half {
            return Ok(Threshold { n, value, boundary_n });
        }
        n += 1;
    }
}
