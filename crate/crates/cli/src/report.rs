//! Report types and their three renderings: human-readable text, pretty
//! JSON, and CSV. Text output shows exact rationals with a six-decimal
//! approximation alongside; JSON and CSV carry the exact values only, so
//! they round-trip. All renderings are deterministic byte for byte.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;

use nmr_core::defaults::{DefaultTheory, Extension};
use nmr_core::defeat::{
    CandidateReport, EngineConfig, GateMode, RelevanceMode, SetOutcome, SetRecord, Status,
    UndercutRecord, WarrantReport,
};
use nmr_core::Rational;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Exact value, with a six-decimal approximation when it is not an integer.
pub fn approx(r: &Rational) -> String {
    let exact = r.to_string();
    if exact.contains('/') {
        format!("{exact} (~{:.6})", r.to_f64())
    } else {
        exact
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("{n} {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn listed(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(", ")
    }
}

fn indices(items: &[usize]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Warranted => "warranted",
        Status::NoReason => "no_reason",
        Status::Undercut => "undercut",
        Status::Rebutted => "rebutted",
        Status::CollectivelyDefeated => "collectively_defeated",
    }
}

fn gate_word(g: GateMode) -> &'static str {
    match g {
        GateMode::Off => "off",
        GateMode::On => "on",
    }
}

fn relevance_word(r: RelevanceMode) -> &'static str {
    match r {
        RelevanceMode::Always => "always",
        RelevanceMode::Pollock => "pollock",
    }
}

/// A report that can be rendered in every output format.
pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

/// Renders a report in the requested format. Every rendering ends with a
/// newline.
pub fn render(report: &impl Render, format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(report.text()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Input(format!("could not serialize the report: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in report.csv_rows() {
                w.write_record(&row)
                    .map_err(|e| CliError::Input(format!("could not write CSV: {e}")))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Input(format!("could not write CSV: {e}")))?;
            String::from_utf8(bytes)
                .map_err(|e| CliError::Input(format!("could not write CSV: {e}")))
        }
    }
}

// ---------------------------------------------------------------------------
// Extensions

#[derive(Serialize)]
pub struct ExtensionRow {
    /// 1-based, in enumeration order.
    pub index: usize,
    pub generating: Vec<String>,
    pub conclusions: Vec<String>,
}

#[derive(Serialize)]
pub struct ExtensionsReport {
    pub count: usize,
    pub extensions: Vec<ExtensionRow>,
}

impl ExtensionsReport {
    pub fn build(theory: &DefaultTheory, exts: &[Extension]) -> Self {
        let extensions = exts
            .iter()
            .enumerate()
            .map(|(i, e)| ExtensionRow {
                index: i + 1,
                generating: e.generating.iter().cloned().collect(),
                conclusions: e.conclusions(theory).iter().map(|f| f.to_string()).collect(),
            })
            .collect();
        ExtensionsReport { count: exts.len(), extensions }
    }
}

impl Render for ExtensionsReport {
    fn text(&self) -> String {
        let mut out = format!("{}\n", plural(self.count, "extension"));
        for row in &self.extensions {
            out.push_str(&format!(
                "extension {}\n  generating: {}\n  concludes: {}\n",
                row.index,
                listed(&row.generating),
                listed(&row.conclusions)
            ));
        }
        out
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows =
            vec![vec!["extension".to_string(), "generating".to_string(), "conclusions".to_string()]];
        for r in &self.extensions {
            rows.push(vec![
                r.index.to_string(),
                r.generating.join("; "),
                r.conclusions.join("; "),
            ]);
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// Queries

#[derive(Serialize)]
pub struct QueryReport {
    pub mode: String,
    pub formula: String,
    pub holds: bool,
    /// The theory has no extensions, so the answer is vacuous.
    pub vacuous: bool,
    pub extension_count: usize,
    /// 1-based indices of extensions entailing the formula.
    pub supporting: Vec<usize>,
    /// 1-based indices of extensions not entailing it.
    pub opposing: Vec<usize>,
}

impl Render for QueryReport {
    fn text(&self) -> String {
        let mut out = format!(
            "{} query: {}\nanswer: {}\nextensions: {}\nsupporting: {}\nopposing: {}\n",
            self.mode,
            self.formula,
            self.holds,
            self.extension_count,
            indices(&self.supporting),
            indices(&self.opposing)
        );
        if self.vacuous {
            out.push_str("note: the theory has no extensions, so the answer is vacuous\n");
        }
        out
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![
            ["mode", "formula", "holds", "vacuous", "extension_count", "supporting", "opposing"]
                .map(str::to_string)
                .to_vec(),
            vec![
                self.mode.clone(),
                self.formula.clone(),
                self.holds.to_string(),
                self.vacuous.to_string(),
                self.extension_count.to_string(),
                self.supporting.iter().map(usize::to_string).collect::<Vec<_>>().join("; "),
                self.opposing.iter().map(usize::to_string).collect::<Vec<_>>().join("; "),
            ],
        ]
    }
}

// ---------------------------------------------------------------------------
// Warrant

fn config_line(c: &EngineConfig) -> String {
    format!(
        "config: threshold {}, tie_epsilon {}, gate {}, relevance {}\n",
        c.acceptance_threshold,
        c.tie_epsilon,
        gate_word(c.gate_mode),
        relevance_word(c.relevance_mode)
    )
}

fn undercut_line(u: &UndercutRecord) -> String {
    let conditional = match &u.conditional {
        Some(c) => approx(c),
        None => "undefined (condition has probability zero)".to_string(),
    };
    let gate = if u.gate_checked {
        format!(", gate {}", if u.gate_passed { "passed" } else { "failed" })
    } else {
        String::new()
    };
    format!(
        "    condition {}: Pr {}, target {} -> {}, changes {}{}, defeats {}\n",
        u.condition,
        approx(&u.condition_probability),
        approx(&u.unconditional),
        conditional,
        yes_no(u.changes),
        gate,
        yes_no(u.defeats)
    )
}

fn candidate_lines(c: &CandidateReport) -> String {
    let mut out = format!(
        "  {}: {}, probability {}{}{}\n",
        c.conclusion,
        status_word(c.status),
        approx(&c.probability),
        if c.deductive { ", deductive" } else { "" },
        if c.aggregate { " [aggregate]" } else { "" }
    );
    if let Some(i) = c.defeated_by {
        out.push_str(&format!("    defeated by conflict set {}\n", i + 1));
    }
    for u in &c.undercuts {
        out.push_str(&undercut_line(u));
    }
    for n in &c.notes {
        out.push_str(&format!("    note: {n}\n"));
    }
    out
}

fn outcome_line(o: &SetOutcome) -> String {
    match o {
        SetOutcome::Fired => "fired (core defeated)".to_string(),
        SetOutcome::SkippedDefeatedMember => {
            "skipped: a member was already defeated".to_string()
        }
        SetOutcome::CoalitionTooWeak => "coalition too weak; nothing defeated".to_string(),
        SetOutcome::WithheldByRelevance { class } => {
            format!("withheld: core relevance is {class}, not negative")
        }
    }
}

fn set_lines(i: usize, s: &SetRecord) -> String {
    let mut out = format!("  set {}: members {}\n", i + 1, listed(&s.members));
    out.push_str(&format!(
        "    core: {}; coalition: {}\n",
        listed(&s.core),
        listed(&s.coalition)
    ));
    if let (Some(min), Some(cp)) = (&s.min_strength, &s.coalition_probability) {
        out.push_str(&format!(
            "    min strength: {}; coalition probability: {}\n",
            approx(min),
            approx(cp)
        ));
    }
    out.push_str(&format!("    outcome: {}\n", outcome_line(&s.outcome)));
    out
}

fn warrant_body(report: &WarrantReport) -> String {
    let mut out = config_line(&report.config);
    out.push_str("candidates:\n");
    for c in &report.candidates {
        out.push_str(&candidate_lines(c));
    }
    if !report.sets.is_empty() {
        out.push_str("conflict sets:\n");
        for (i, s) in report.sets.iter().enumerate() {
            out.push_str(&set_lines(i, s));
        }
    }
    if !report.warnings.is_empty() {
        out.push_str("warnings:\n");
        for w in &report.warnings {
            out.push_str(&format!("  - {w}\n"));
        }
    }
    out
}

fn warrant_csv(report: &WarrantReport) -> Vec<Vec<String>> {
    let mut rows = vec![[
        "conclusion",
        "aggregate",
        "probability",
        "deductive",
        "has_reason",
        "status",
        "defeated_by_set",
    ]
    .map(str::to_string)
    .to_vec()];
    for c in &report.candidates {
        rows.push(vec![
            c.conclusion.clone(),
            c.aggregate.to_string(),
            c.probability.to_string(),
            c.deductive.to_string(),
            c.has_reason.to_string(),
            status_word(c.status).to_string(),
            c.defeated_by.map(|i| (i + 1).to_string()).unwrap_or_default(),
        ]);
    }
    rows
}

#[derive(Serialize)]
pub struct WarrantView {
    /// The scenario name or file path the analysis came from.
    pub source: String,
    #[serde(flatten)]
    pub report: WarrantReport,
}

impl Render for WarrantView {
    fn text(&self) -> String {
        format!("warrant analysis: {}\n{}", self.source, warrant_body(&self.report))
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        warrant_csv(&self.report)
    }
}

// ---------------------------------------------------------------------------
// Scenario runs and listings

#[derive(Serialize)]
pub struct ScenarioRunView {
    pub scenario: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_extensions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extensions: Option<ExtensionsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warrant: Option<WarrantReport>,
}

impl Render for ScenarioRunView {
    fn text(&self) -> String {
        let mut out = format!("scenario: {}\n", self.scenario);
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        if let Some(n) = self.expected_extensions {
            out.push_str(&format!("expected extensions: {n}\n"));
        }
        if let Some(exts) = &self.extensions {
            out.push('\n');
            out.push_str(&exts.text());
        }
        if let Some(w) = &self.warrant {
            out.push('\n');
            out.push_str("warrant analysis:\n");
            out.push_str(&warrant_body(w));
        }
        out
    }

    /// CSV keeps one table: the warrant candidates when a model ran,
    /// otherwise the extensions.
    fn csv_rows(&self) -> Vec<Vec<String>> {
        if let Some(w) = &self.warrant {
            warrant_csv(w)
        } else if let Some(exts) = &self.extensions {
            exts.csv_rows()
        } else {
            vec![vec!["scenario".to_string()], vec![self.scenario.clone()]]
        }
    }
}

#[derive(Serialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub summary: String,
}

#[derive(Serialize)]
pub struct ScenarioList {
    pub scenarios: Vec<ScenarioEntry>,
}

impl Render for ScenarioList {
    fn text(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            out.push_str(&format!("{}: {}\n", s.name, s.summary));
        }
        out
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["name".to_string(), "summary".to_string()]];
        for s in &self.scenarios {
            rows.push(vec![s.name.clone(), s.summary.clone()]);
        }
        rows
    }
}

/// `scenario dump` output: the canonical document, plus the world model in
/// JSON so machine consumers need not re-parse the text.
#[derive(Serialize)]
pub struct DumpView {
    pub scenario: String,
    pub dsl: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<nmr_core::prob::WorldModel>,
}

impl Render for DumpView {
    fn text(&self) -> String {
        self.dsl.clone()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["statement".to_string()]];
        for line in self.dsl.lines().filter(|l| !l.is_empty()) {
            rows.push(vec![line.to_string()]);
        }
        rows
    }
}

// ---------------------------------------------------------------------------
// Named verification checks

#[derive(Serialize)]
pub struct Detail {
    pub label: String,
    pub value: Rational,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub params: BTreeMap<String, String>,
    /// What is being compared, spelled out.
    pub claim: String,
    pub holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_n: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub details: Vec<Detail>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Render for VerifyReport {
    fn text(&self) -> String {
        let mut out = format!("check: {} ({})\n", self.check, self.description);
        if let Some(m) = &self.mode {
            out.push_str(&format!("mode: {m}\n"));
        }
        let params: Vec<String> =
            self.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        if !params.is_empty() {
            out.push_str(&format!("params: {}\n", params.join(", ")));
        }
        if let Some(n) = self.threshold_n {
            out.push_str(&format!("threshold n: {n}\n"));
        }
        if let Some(n) = self.boundary_n {
            out.push_str(&format!("boundary n (value exactly 1/2): {n}\n"));
        }
        out.push_str(&format!("lhs: {}\n", approx(&self.lhs)));
        out.push_str(&format!("rhs: {}\n", approx(&self.rhs)));
        out.push_str(&format!("claim: {}\n", self.claim));
        out.push_str(&format!("holds: {}\n", self.holds));
        if !self.details.is_empty() {
            out.push_str("details:\n");
            for d in &self.details {
                out.push_str(&format!("  {}: {}\n", d.label, approx(&d.value)));
            }
        }
        if !self.notes.is_empty() {
            out.push_str("notes:\n");
            for n in &self.notes {
                out.push_str(&format!("  - {n}\n"));
            }
        }
        out
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["quantity".to_string(), "value".to_string()]];
        let mut push = |k: &str, v: String| rows.push(vec![k.to_string(), v]);
        push("check", self.check.clone());
        if let Some(m) = &self.mode {
            push("mode", m.clone());
        }
        for (k, v) in &self.params {
            push(k, v.clone());
        }
        if let Some(n) = self.threshold_n {
            push("threshold_n", n.to_string());
        }
        if let Some(n) = self.boundary_n {
            push("boundary_n", n.to_string());
        }
        push("lhs", self.lhs.to_string());
        push("rhs", self.rhs.to_string());
        push("holds", self.holds.to_string());
        for d in &self.details {
            push(&d.label, d.value.to_string());
        }
        rows
    }
}
