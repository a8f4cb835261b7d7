use std::process::{Command, Output};

fn liftcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftcheck"))
        .args(args)
        .env_remove("LIFTCHECK_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fourier_prefactor_at_weight_twelve() {
    let o = liftcheck(&["compute", "fourier-prefactor", "--kappa", "12"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "128 * eta^7 * exp(-2*pi*eta)\n");
}

#[test]
fn exit_codes() {
    assert_eq!(liftcheck(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(liftcheck(&["verify", "prop-2-10"]).status.code(), Some(0));
    // kappa must be even and above 4
    assert_eq!(liftcheck(&["compute", "constants", "--kappa", "7"]).status.code(), Some(2));
    assert_eq!(liftcheck(&["verify", "macdonald", "--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let path = std::env::temp_dir().join(format!("liftcheck-test-{}.cfg", std::process::id()));
    std::fs::write(&path, "kappa = 12\nweight = 12\n").unwrap();
    let o = liftcheck(&["verify", "macdonald", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&path, "kappa = 12\nmmax = 2\n").unwrap();
    let o = liftcheck(&["verify", "macdonald", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "lemmas-2x", "--format", "csv"];
    let a = liftcheck(&args);
    let b = liftcheck(&[&args[..], &["--threads", "1"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_reports_match_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../report.schema.json")).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    for suite in ["alpha-bad", "macdonald", "prop-2-9"] {
        let o = liftcheck(&["verify", suite]);
        assert!(o.status.success(), "{}", suite);
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(compiled.is_valid(&doc), "{} does not match the schema", suite);
        assert_eq!(doc["passed"], true);
    }
}

#[test]
fn adjoint_factor_uses_trace_squared() {
    // lambda = a_2(Delta) / 2^{11/2}, lambda^2 - 1 = -23/32
    let o = liftcheck(&["compute", "lfactor", "--kind", "adjoint", "--p", "2", "--lambda=-24/2^(11/2)"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("L_p^-1 = 1 + (23/32)*t + (-23/32)*t^2 + (-1)*t^3"), "{}", stdout(&o));
}

#[test]
fn markdown_and_csv_render() {
    let o = liftcheck(&["verify", "alpha-inf", "--format", "markdown"]);
    assert!(stdout(&o).starts_with("| suite | case |"));
    let o = liftcheck(&["verify", "alpha-inf", "--format", "csv"]);
    assert!(stdout(&o).starts_with("suite,case_id,inputs,lhs,rhs,ratio,abs_err,status\n"));
}
