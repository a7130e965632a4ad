//! `nmr` — a workbench for reasoning that can retract its conclusions:
//! default-theory extensions, probabilistic warrant with undercutting and
//! collective defeat, and exact world-model arithmetic.
//!
//! Exit codes: 0 success, 1 query answered false, 2 bad input, 3 the
//! grounded-default cap was exceeded. Diagnostics go to stderr. Output is
//! deterministic and never colored, so `NO_COLOR` is honored trivially.

mod dsl;
mod error;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use nmr_core::defaults::{self, DefaultTheory, DEFAULT_RULE_CAP};
use nmr_core::defeat::{compute_warrants, EngineConfig, GateMode, RelevanceMode, WarrantInput};
use nmr_core::logic::Formula;
use nmr_core::prob::{
    check_preface_defeater, check_unfair_lottery, lotteryization_report, warrant_threshold,
    LotteryizationParams, ValueMode, WorldModel,
};
use nmr_core::scenario::{self, Scenario, SCENARIO_NAMES};
use nmr_core::Rational;

use crate::dsl::{Compiled, DefaultDecl, Document, WorldDecl};
use crate::error::{CliError, Result};
use crate::report::{
    render, Detail, DumpView, ExtensionsReport, Format, QueryReport, Render, ScenarioEntry,
    ScenarioList, ScenarioRunView, VerifyReport, WarrantView,
};

#[derive(Parser)]
#[command(
    name = "nmr",
    version,
    about = "Default-logic extensions, probabilistic warrant, and exact world-model checks"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the extensions of the default theory in a .dt file.
    Extensions {
        file: PathBuf,
        /// Cap on grounded defaults (default 64, or `set cap` in the file).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Ask whether a formula holds in the file's extensions.
    Query {
        file: PathBuf,
        /// The formula, e.g. "~pacifist" (quote it in the shell).
        formula: String,
        /// `skeptical` requires every extension to entail the formula;
        /// `credulous` requires at least one.
        #[arg(long, value_enum, default_value_t = QueryMode::Skeptical)]
        mode: QueryMode,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run the warrant pipeline on a built-in scenario or a .dt file.
    Warrant {
        /// A scenario name (see `nmr scenario list`) or a path to a .dt
        /// file with worlds and candidates.
        target: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run one of the named numeric checks.
    Verify {
        #[command(subcommand)]
        check: CheckCommand,
    },
    /// List, run, or print the built-in scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryMode {
    Skeptical,
    Credulous,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateArg {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelevanceArg {
    Always,
    Pollock,
}

/// `paper` is the simplified closed form 1 - q/(q + 1/n); `exact` is the
/// model-faithful form 1 - q/(q + (1-q)/n).
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Paper,
    Exact,
}

impl ModeArg {
    fn value_mode(self) -> ValueMode {
        match self {
            ModeArg::Paper => ValueMode::Paper,
            ModeArg::Exact => ValueMode::Exact,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Paper => "paper",
            ModeArg::Exact => "exact",
        }
    }
}

/// Parameters of the built-in scenarios; each scenario reads the ones it
/// understands and ignores the rest.
#[derive(Args)]
struct ScenarioArgs {
    /// Tickets / statements / alternatives; korb's second partition size.
    #[arg(long)]
    n: Option<u32>,
    /// korb's first partition size.
    #[arg(long)]
    m: Option<u32>,
    /// Failure-side probability (korb, lotteryization).
    #[arg(long)]
    q: Option<Rational>,
    /// Probability that the biased draw has a winner at all.
    #[arg(long)]
    fair_weight: Option<Rational>,
    /// Probability of the good competence state (preface).
    #[arg(long)]
    good_rate: Option<Rational>,
    /// Per-statement success probability in the good state (preface).
    #[arg(long)]
    p_good: Option<Rational>,
    /// Per-statement success probability in the bad state (preface).
    #[arg(long)]
    p_bad: Option<Rational>,
}

/// Warrant-engine configuration; flags override a file's `set` statements.
#[derive(Args)]
struct EngineArgs {
    /// `on` blocks a condition whose own probability does not exceed the
    /// acceptance threshold.
    #[arg(long, value_enum)]
    gate: Option<GateArg>,
    /// When collective defeat may fire on a multi-member core: `always`,
    /// or `pollock` to require mutual negative relevance.
    #[arg(long, value_enum)]
    relevance: Option<RelevanceArg>,
    /// Acceptance threshold, a rational in [1/2, 1).
    #[arg(long)]
    threshold: Option<Rational>,
    /// Strengths within this distance of a conflict's minimum count as
    /// tied.
    #[arg(long)]
    tie_epsilon: Option<Rational>,
}

impl EngineArgs {
    fn apply(&self, config: &mut EngineConfig) {
        if let Some(g) = self.gate {
            config.gate_mode = match g {
                GateArg::On => GateMode::On,
                GateArg::Off => GateMode::Off,
            };
        }
        if let Some(r) = self.relevance {
            config.relevance_mode = match r {
                RelevanceArg::Always => RelevanceMode::Always,
                RelevanceArg::Pollock => RelevanceMode::Pollock,
            };
        }
        if let Some(t) = &self.threshold {
            config.acceptance_threshold = t.clone();
        }
        if let Some(e) = &self.tie_epsilon {
            config.tie_epsilon = e.clone();
        }
    }
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Learning the other statements lowers the error disjunction
    /// (common-cause statement model).
    Eq5 {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value = "9/10")]
        good_rate: Rational,
        #[arg(long, default_value = "19/20")]
        p_good: Rational,
        #[arg(long, default_value = "1/2")]
        p_bad: Rational,
    },
    /// Seeing every other ticket lose lowers the winner disjunction
    /// (biased lottery).
    Eq10 {
        #[arg(long, default_value_t = 5)]
        n: u32,
        #[arg(long, default_value = "99/100")]
        fair_weight: Rational,
    },
    /// The collapsed survivor value at one (q, n), in both closed forms.
    Eq16 {
        #[arg(long, default_value = "1/10")]
        q: Rational,
        #[arg(long, default_value_t = 5)]
        n: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// The first alternative count whose collapsed value drops strictly
    /// below 1/2.
    Eq18 {
        #[arg(long, default_value = "1/10")]
        q: Rational,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Names and one-line summaries of the built-in scenarios.
    List,
    /// Build a scenario and run everything it defines.
    Run {
        name: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Print a scenario as a .dt document.
    Dump {
        name: String,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let format = cli.format;
    match cli.command {
        Command::Extensions { file, cap } => {
            let (theory, cap) = load_theory(&file, cap)?;
            let exts = defaults::extensions(&theory, cap)?;
            emit(&ExtensionsReport::build(&theory, &exts), format)?;
            Ok(0)
        }
        Command::Query { file, formula, mode, cap } => {
            let (theory, cap) = load_theory(&file, cap)?;
            let query = dsl::parse_ground_formula(&formula)?;
            let exts = defaults::extensions(&theory, cap)?;
            let answer = match mode {
                QueryMode::Skeptical => defaults::skeptical_entails(&exts, &query),
                QueryMode::Credulous => defaults::credulous_entails(&exts, &query),
            };
            let report = QueryReport {
                mode: match mode {
                    QueryMode::Skeptical => "skeptical".to_string(),
                    QueryMode::Credulous => "credulous".to_string(),
                },
                formula: query.to_string(),
                holds: answer.holds,
                vacuous: answer.vacuous,
                extension_count: exts.len(),
                supporting: answer.supporting.iter().map(|i| i + 1).collect(),
                opposing: answer.opposing.iter().map(|i| i + 1).collect(),
            };
            emit(&report, format)?;
            Ok(if answer.holds { 0 } else { 1 })
        }
        Command::Warrant { target, scenario, engine } => {
            let (source, model, input, mut config) = warrant_target(&target, &scenario)?;
            engine.apply(&mut config);
            let report = compute_warrants(&model, &input, &config)?;
            emit(&WarrantView { source, report }, format)?;
            Ok(0)
        }
        Command::Verify { check } => {
            emit(&run_check(check)?, format)?;
            Ok(0)
        }
        Command::Scenario { action } => match action {
            ScenarioCommand::List => {
                emit(&scenario_list(), format)?;
                Ok(0)
            }
            ScenarioCommand::Run { name, scenario, engine, cap } => {
                let scen = build_scenario(&name, &scenario)?;
                let extensions = match &scen.theory {
                    Some(theory) => {
                        let exts = defaults::extensions(theory, cap.unwrap_or(DEFAULT_RULE_CAP))?;
                        Some(ExtensionsReport::build(theory, &exts))
                    }
                    None => None,
                };
                let warrant = match &scen.model {
                    Some(model) => {
                        let mut config = EngineConfig::default();
                        engine.apply(&mut config);
                        Some(compute_warrants(model, &scen.warrant_input(), &config)?)
                    }
                    None => None,
                };
                let view = ScenarioRunView {
                    scenario: scen.name.clone(),
                    notes: scen.expectations.notes.clone(),
                    expected_extensions: scen.expectations.extensions,
                    extensions,
                    warrant,
                };
                emit(&view, format)?;
                Ok(0)
            }
            ScenarioCommand::Dump { name, scenario } => {
                let scen = build_scenario(&name, &scenario)?;
                let doc = scenario_to_document(&scen);
                let view = DumpView {
                    scenario: scen.name.clone(),
                    dsl: dsl::print(&doc),
                    model: scen.model.clone(),
                };
                emit(&view, format)?;
                Ok(0)
            }
        },
    }
}

fn emit(report: &impl Render, format: Format) -> Result<()> {
    print!("{}", render(report, format)?);
    Ok(())
}

fn load(path: &Path) -> Result<Compiled> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("could not read {}: {e}", path.display())))?;
    let doc = dsl::parse(&text).map_err(|e| match e {
        CliError::Parse { .. } => CliError::Input(format!("{}: {e}", path.display())),
        other => other,
    })?;
    dsl::compile(&doc)
}

fn load_theory(path: &Path, cap_flag: Option<usize>) -> Result<(DefaultTheory, usize)> {
    let compiled = load(path)?;
    let cap = cap_flag.or(compiled.cap).unwrap_or(DEFAULT_RULE_CAP);
    match compiled.theory {
        Some(theory) => Ok((theory, cap)),
        None => Err(CliError::Input(format!(
            "{} declares no facts or defaults, so there is no theory to work with",
            path.display()
        ))),
    }
}

/// Resolves the `warrant` target: a scenario name first, a file path
/// otherwise.
fn warrant_target(
    target: &str,
    args: &ScenarioArgs,
) -> Result<(String, WorldModel, WarrantInput, EngineConfig)> {
    if SCENARIO_NAMES.contains(&target) {
        let scen = build_scenario(target, args)?;
        let model = scen.require_model()?.clone();
        return Ok((scen.name.clone(), model, scen.warrant_input(), EngineConfig::default()));
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "`{target}` is neither a scenario name nor an existing file (scenarios: {})",
            SCENARIO_NAMES.join(", ")
        )));
    }
    let compiled = load(path)?;
    match compiled.model {
        Some(model) => Ok((target.to_string(), model, compiled.warrant, compiled.config)),
        None => Err(CliError::Input(format!(
            "{target} declares no worlds, so there is no model to evaluate warrant against"
        ))),
    }
}

fn build_scenario(name: &str, a: &ScenarioArgs) -> Result<Scenario> {
    let rational = |given: &Option<Rational>, num: i64, den: i64| {
        given.clone().unwrap_or_else(|| Rational::new(num, den))
    };
    let scen = match name {
        "nixon" => scenario::make_nixon(),
        "tweety" => scenario::make_tweety(&scenario::default_bird_kinds())?,
        "fair_lottery" => scenario::make_fair_lottery(a.n.unwrap_or(5))?,
        "unfair_lottery" => {
            scenario::make_unfair_lottery(a.n.unwrap_or(5), rational(&a.fair_weight, 99, 100))?
        }
        "preface" => scenario::make_preface(
            a.n.unwrap_or(4),
            rational(&a.good_rate, 9, 10),
            rational(&a.p_good, 19, 20),
            rational(&a.p_bad, 1, 2),
        )?,
        "korb" => scenario::make_korb(
            a.m.unwrap_or(3),
            a.n.unwrap_or(3),
            rational(&a.q, 1, 10),
        )?,
        "lotteryization" => {
            scenario::make_lotteryization(rational(&a.q, 1, 10), a.n.unwrap_or(5))?
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown scenario `{other}` (known: {})",
                SCENARIO_NAMES.join(", ")
            )))
        }
    };
    Ok(scen)
}

fn scenario_list() -> ScenarioList {
    let summary = |name: &str| match name {
        "nixon" => "two normal defaults pull opposite ways, giving two extensions",
        "tweety" => "a bird that may be one of several exceptional kinds",
        "fair_lottery" => "n equally likely tickets, as defaults and as a world model",
        "unfair_lottery" => "a biased draw whose ticket losses undermine the winner disjunction",
        "preface" => "n statements sharing a common competence cause",
        "korb" => "two competing partitions tied to a claim and its negation",
        "lotteryization" => "a claim with failure probability q recast as n equal alternatives",
        _ => "",
    };
    ScenarioList {
        scenarios: SCENARIO_NAMES
            .iter()
            .map(|n| ScenarioEntry { name: n.to_string(), summary: summary(n).to_string() })
            .collect(),
    }
}

/// Rebuilds a scenario as a document in the surface syntax. Facts come from
/// the theory when there is one (the builders keep warrant background and
/// theory facts identical), and from the warrant background otherwise.
fn scenario_to_document(s: &Scenario) -> Document {
    let mut doc = Document::default();
    if let Some(m) = &s.model {
        doc.atoms = m.atoms().iter().map(|a| a.name().to_string()).collect();
        doc.worlds = m
            .worlds()
            .iter()
            .map(|w| WorldDecl { bits: m.bits_string(w), weight: w.weight.clone() })
            .collect();
    }
    let facts: &[Formula] = match &s.theory {
        Some(t) => &t.facts,
        None => &s.background,
    };
    doc.facts = facts.iter().map(dsl::formula_to_pattern).collect();
    if let Some(t) = &s.theory {
        doc.defaults = t
            .rules()
            .iter()
            .map(|r| DefaultDecl {
                id: r.id.clone(),
                params: Vec::new(),
                prerequisite: dsl::formula_to_pattern(&r.prerequisite),
                justifications: r.justifications.iter().map(dsl::formula_to_pattern).collect(),
                consequent: dsl::formula_to_pattern(&r.consequent),
            })
            .collect();
    }
    doc.candidates = s.members.iter().map(dsl::formula_to_pattern).collect();
    doc.aggregate = s.aggregate.as_ref().map(dsl::formula_to_pattern);
    doc.conditions = s.undercut_conditions.iter().map(dsl::formula_to_pattern).collect();
    doc
}

fn run_check(check: CheckCommand) -> Result<VerifyReport> {
    let half = Rational::new(1, 2);
    Ok(match check {
        CheckCommand::Eq5 { n, good_rate, p_good, p_bad } => {
            let scen =
                scenario::make_preface(n, good_rate.clone(), p_good.clone(), p_bad.clone())?;
            let model = scen.require_model()?;
            let check = check_preface_defeater(model, &scen.members)?;
            let lhs = check.conditional.iter().cloned().max().expect("n >= 2");
            let details = check
                .conditional
                .iter()
                .enumerate()
                .map(|(i, c)| Detail {
                    label: format!("Pr(some statement false | all but s_{})", i + 1),
                    value: c.clone(),
                })
                .collect();
            let mut notes = check.warnings.clone();
            if let Some(rel) = &check.relevance {
                notes.push(format!("statement relevance: {}", rel.class));
            }
            VerifyReport {
                check: "eq5".to_string(),
                description: "learning the other statements lowers the error disjunction"
                    .to_string(),
                mode: None,
                params: params([
                    ("n", n.to_string()),
                    ("good_rate", good_rate.to_string()),
                    ("p_good", p_good.to_string()),
                    ("p_bad", p_bad.to_string()),
                ]),
                claim: "every conditional stays strictly below the unconditional; \
                        lhs is the largest conditional"
                    .to_string(),
                holds: check.holds,
                lhs,
                rhs: check.unconditional,
                threshold_n: None,
                boundary_n: None,
                details,
                notes,
            }
        }
        CheckCommand::Eq10 { n, fair_weight } => {
            let scen = scenario::make_unfair_lottery(n, fair_weight.clone())?;
            let model = scen.require_model()?;
            let tickets: Vec<Formula> =
                (1..=n).map(|i| Formula::atom(format!("t_{i}"))).collect();
            let check = check_unfair_lottery(model, &tickets)?;
            let lhs = check.conditional.iter().cloned().max().expect("n >= 2");
            let details = check
                .conditional
                .iter()
                .enumerate()
                .map(|(i, c)| Detail {
                    label: format!("Pr(some winner | every ticket but t_{} lost)", i + 1),
                    value: c.clone(),
                })
                .collect();
            VerifyReport {
                check: "eq10".to_string(),
                description: "seeing every other ticket lose lowers the winner disjunction"
                    .to_string(),
                mode: None,
                params: params([
                    ("n", n.to_string()),
                    ("fair_weight", fair_weight.to_string()),
                ]),
                claim: "every conditional stays strictly below the unconditional; \
                        lhs is the largest conditional"
                    .to_string(),
                holds: check.holds,
                lhs,
                rhs: check.unconditional,
                threshold_n: None,
                boundary_n: None,
                details,
                notes: vec![format!("ticket-loss relevance: {}", check.relevance.class)],
            }
        }
        CheckCommand::Eq16 { q, n, mode } => {
            let report = lotteryization_report(&LotteryizationParams::new(q.clone(), n)?)?;
            let lhs = match mode {
                ModeArg::Paper => report.paper_value.clone(),
                ModeArg::Exact => report.exact_value.clone(),
            };
            let holds = lhs > half;
            let notes = if report.forms_disagree() {
                let diff = &report.survivor_event_simplified - &report.survivor_event_exact;
                vec![format!(
                    "the two closed forms disagree here; the survivor event differs by {diff}"
                )]
            } else {
                Vec::new()
            };
            VerifyReport {
                check: "eq16".to_string(),
                description: "collapsed survivor value".to_string(),
                mode: Some(mode.name().to_string()),
                params: params([("n", n.to_string()), ("q", q.to_string())]),
                claim: "the collapsed value stays strictly above 1/2".to_string(),
                holds,
                lhs,
                rhs: half,
                threshold_n: None,
                boundary_n: None,
                details: vec![
                    Detail {
                        label: "simplified-form value".to_string(),
                        value: report.paper_value,
                    },
                    Detail {
                        label: "model-form value".to_string(),
                        value: report.exact_value,
                    },
                    Detail {
                        label: "model-form value, enumerated".to_string(),
                        value: report.exact_enumerated,
                    },
                    Detail {
                        label: "survivor event, simplified form".to_string(),
                        value: report.survivor_event_simplified,
                    },
                    Detail {
                        label: "survivor event, model form".to_string(),
                        value: report.survivor_event_exact,
                    },
                ],
                notes,
            }
        }
        CheckCommand::Eq18 { q, mode } => {
            let th = warrant_threshold(&q, mode.value_mode())?;
            let notes = match th.boundary_n {
                Some(b) => vec![format!(
                    "at n = {b} the value equals 1/2 exactly, which is not yet a reason"
                )],
                None => Vec::new(),
            };
            VerifyReport {
                check: "eq18".to_string(),
                description: "first alternative count whose collapsed value drops below 1/2"
                    .to_string(),
                mode: Some(mode.name().to_string()),
                params: params([("q", q.to_string())]),
                claim: format!(
                    "at n = {} the collapsed value falls strictly below 1/2 for the first time",
                    th.n
                ),
                holds: th.value < half,
                lhs: th.value,
                rhs: half,
                threshold_n: Some(th.n),
                boundary_n: th.boundary_n,
                details: Vec::new(),
                notes,
            }
        }
    })
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
