//! End-to-end tests driving the compiled binary: output contents, exit
//! codes, format round-trips, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nmr")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_str()
        .expect("utf8 path")
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("nmr-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("write temp file");
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("stdout is valid JSON")
}

#[test]
fn nixon_has_two_extensions_and_output_is_deterministic() {
    let file = fixture("nixon.dt");
    let out = run(&["extensions", &file]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("2 extensions"), "{text}");
    assert!(text.contains("quaker_pacifist"), "{text}");
    assert!(text.contains("republican_not_pacifist"), "{text}");
    let again = run(&["extensions", &file]);
    assert_eq!(out.stdout, again.stdout, "two runs differ byte for byte");
}

#[test]
fn query_exit_codes_follow_the_answer() {
    let file = fixture("nixon.dt");
    let skeptical = run(&["query", "--mode", "skeptical", &file, "pacifist"]);
    assert_eq!(code(&skeptical), 1);
    assert!(stdout(&skeptical).contains("answer: false"));

    let credulous = run(&["query", "--mode", "credulous", &file, "pacifist"]);
    assert_eq!(code(&credulous), 0);
    assert!(stdout(&credulous).contains("answer: true"));

    let negated = run(&["query", "--mode", "credulous", &file, "~pacifist"]);
    assert_eq!(code(&negated), 0);

    // Facts hold in every extension; skeptical is the default mode.
    let fact = run(&["query", &file, "quaker & republican"]);
    assert_eq!(code(&fact), 0, "stderr: {}", stderr(&fact));
}

#[test]
fn templates_ground_over_the_domain() {
    let file = fixture("birds.dt");
    let out = run(&["extensions", &file]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("1 extension\n"), "{text}");
    assert!(text.contains("fly(tweety)"), "{text}");
    assert!(text.contains("flies_tweety"), "{text}");

    let opus = run(&["query", "--mode", "credulous", &file, "flies_opus"]);
    assert_eq!(code(&opus), 1, "the exception should not fly");
    let tweety = run(&["query", &file, "flies_tweety"]);
    assert_eq!(code(&tweety), 0);
}

#[test]
fn warrant_scenario_json_statuses_and_round_trip() {
    let args = ["warrant", "fair_lottery", "--n", "5", "--gate", "on", "--format", "json"];
    let out = run(&args);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["source"], "fair_lottery");
    assert_eq!(v["config"]["gate_mode"], "on");
    let candidates = v["candidates"].as_array().expect("candidates array");
    assert_eq!(candidates.len(), 6);
    for c in &candidates[..5] {
        assert_eq!(c["status"], "collectively_defeated", "candidate {}", c["conclusion"]);
        assert_eq!(c["probability"], "4/5");
    }
    assert_eq!(candidates[5]["aggregate"], true);
    assert_eq!(candidates[5]["status"], "warranted");

    // The JSON survives a parse/serialize/parse cycle unchanged.
    let re = serde_json::to_string(&v).expect("serialize");
    let v2: serde_json::Value = serde_json::from_str(&re).expect("reparse");
    assert_eq!(v, v2);

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn warrant_on_a_file_reports_the_undercut() {
    let file = fixture("model.dt");
    let out = run(&["warrant", &file, "--format", "json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v = json(&out);
    let candidates = v["candidates"].as_array().expect("candidates");
    assert_eq!(candidates[0]["conclusion"], "~t_1");
    assert_eq!(candidates[0]["status"], "warranted");
    assert_eq!(candidates[1]["status"], "warranted");
    assert_eq!(candidates[2]["status"], "undercut");
    let undercut = &candidates[2]["undercuts"][0];
    assert_eq!(undercut["condition"], "~t_2");
    assert_eq!(undercut["unconditional"], "9/10");
    assert_eq!(undercut["conditional"], "9/11");
    assert_eq!(undercut["defeats"], true);

    let text = stdout(&run(&["warrant", &file]));
    assert!(text.contains("undercut"), "{text}");
    assert!(text.contains("9/11"), "{text}");
}

#[test]
fn verify_checks_print_the_expected_values() {
    let eq16 = run(&["verify", "eq16", "--q", "1/10", "--n", "5", "--mode", "paper"]);
    assert_eq!(code(&eq16), 0);
    let text = stdout(&eq16);
    assert!(text.contains("lhs: 2/3"), "{text}");
    assert!(text.contains("holds: true"), "{text}");

    let eq16_exact = run(&["verify", "eq16", "--q", "1/10", "--n", "5", "--mode", "exact"]);
    assert!(stdout(&eq16_exact).contains("lhs: 9/14"));

    let eq18_exact = run(&["verify", "eq18", "--q", "1/10", "--mode", "exact"]);
    let text = stdout(&eq18_exact);
    assert!(text.contains("threshold n: 10"), "{text}");
    assert!(text.contains("boundary n (value exactly 1/2): 9"), "{text}");

    let eq18_paper = run(&["verify", "eq18", "--q", "1/10", "--mode", "paper"]);
    assert!(stdout(&eq18_paper).contains("threshold n: 11"));

    let eq5 = run(&["verify", "eq5"]);
    let text = stdout(&eq5);
    assert!(text.contains("holds: true"), "{text}");
    assert!(text.contains("statement relevance: positive"), "{text}");

    let eq10 = run(&["verify", "eq10"]);
    let text = stdout(&eq10);
    assert!(text.contains("holds: true"), "{text}");
    assert!(text.contains("lhs: 99/104"), "{text}");
    assert!(text.contains("rhs: 99/100"), "{text}");
    assert!(text.contains("ticket-loss relevance: negative"), "{text}");
}

#[test]
fn scenario_listing_and_dump_round_trip() {
    let list = run(&["scenario", "list"]);
    assert_eq!(code(&list), 0);
    let text = stdout(&list);
    assert_eq!(text.lines().count(), 7, "{text}");
    assert!(text.starts_with("nixon:"), "{text}");

    let dump = run(&["scenario", "dump", "fair_lottery", "--n", "3"]);
    assert_eq!(code(&dump), 0);
    let path = temp_file("fl3.dt", &stdout(&dump));
    let file = path.to_str().expect("utf8 path");

    let exts = run(&["extensions", file]);
    assert!(stdout(&exts).contains("3 extensions"), "{}", stdout(&exts));
    let warr = run(&["warrant", file]);
    assert!(stdout(&warr).contains("collectively_defeated"), "{}", stdout(&warr));

    let again = run(&["scenario", "dump", "fair_lottery", "--n", "3"]);
    assert_eq!(dump.stdout, again.stdout);
}

#[test]
fn scenario_run_reports_every_engine_the_scenario_has() {
    let fair = run(&["scenario", "run", "fair_lottery", "--n", "3", "--format", "json"]);
    assert_eq!(code(&fair), 0, "stderr: {}", stderr(&fair));
    let v = json(&fair);
    assert_eq!(v["expected_extensions"], 3);
    assert_eq!(v["extensions"]["count"], 3);
    assert!(v["warrant"]["candidates"].is_array());

    let nixon = run(&["scenario", "run", "nixon", "--format", "json"]);
    let v = json(&nixon);
    assert_eq!(v["extensions"]["count"], 2);
    assert!(v.get("warrant").is_none(), "nixon has no world model");
}

#[test]
fn errors_are_diagnosed_on_stderr_with_positions() {
    let parse = run(&["extensions", &fixture("bad.dt")]);
    assert_eq!(code(&parse), 2);
    assert!(stdout(&parse).is_empty());
    let err = stderr(&parse);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains("line 1"), "{err}");
    assert!(err.contains("column"), "{err}");

    let missing = run(&["extensions", "/no/such/file.dt"]);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("could not read"));

    let unknown = run(&["warrant", "not_a_scenario"]);
    assert_eq!(code(&unknown), 2);
    assert!(stderr(&unknown).contains("neither a scenario name"));

    let no_model = run(&["warrant", "nixon"]);
    assert_eq!(code(&no_model), 2);
    assert!(stderr(&no_model).contains("no world model"));

    let bad_formula = run(&["query", &fixture("nixon.dt"), "a &&"]);
    assert_eq!(code(&bad_formula), 2);
    assert!(stderr(&bad_formula).contains("column"));
}

#[test]
fn default_cap_violations_exit_three() {
    let constants: Vec<String> = (1..=65).map(|i| format!("c{i}")).collect();
    let text = format!(
        "domain {{{}}}.\ndefault d(X): true : p(X) / p(X).\n",
        constants.join(", ")
    );
    let path = temp_file("cap.dt", &text);
    let file = path.to_str().expect("utf8 path");

    let out = run(&["extensions", file]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("exceeds the cap"));

    // Caps above the 64-rule bitmask limit clamp rather than overflow.
    let clamped = run(&["extensions", file, "--cap", "100"]);
    assert_eq!(code(&clamped), 3);

    // A stricter cap rejects theories the default accepts.
    let strict = run(&["extensions", &fixture("nixon.dt"), "--cap", "1"]);
    assert_eq!(code(&strict), 3);
}

#[test]
fn csv_outputs_are_tabular() {
    let warr = run(&["warrant", "fair_lottery", "--n", "3", "--format", "csv"]);
    let text = stdout(&warr);
    assert!(
        text.starts_with(
            "conclusion,aggregate,probability,deductive,has_reason,status,defeated_by_set\n"
        ),
        "{text}"
    );
    assert_eq!(text.lines().count(), 5, "{text}");
    assert!(text.contains("~t_1,false,2/3,false,true,collectively_defeated,1"), "{text}");

    let q = run(&["query", "--format", "csv", &fixture("nixon.dt"), "pacifist"]);
    assert_eq!(code(&q), 1);
    assert!(stdout(&q).starts_with("mode,formula,holds,"), "{}", stdout(&q));

    let dump = run(&["scenario", "dump", "nixon", "--format", "csv"]);
    assert!(stdout(&dump).starts_with("statement\n"), "{}", stdout(&dump));
}

#[test]
fn no_color_is_honored_because_no_color_is_ever_emitted() {
    let esc = 0x1bu8;
    let plain = run(&["extensions", &fixture("nixon.dt")]);
    let with_env = Command::new(bin())
        .env("NO_COLOR", "1")
        .args(["extensions", &fixture("nixon.dt")])
        .output()
        .expect("binary runs");
    assert_eq!(plain.stdout, with_env.stdout);
    assert!(!plain.stdout.contains(&esc));

    let help = run(&["--help"]);
    assert!(!help.stdout.contains(&esc), "help must not use ANSI styling");

    let err = run(&["extensions", &fixture("bad.dt")]);
    assert!(!err.stderr.contains(&esc));
}
