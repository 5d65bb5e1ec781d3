//! Golden-output tests for every subcommand.

use std::process::Command;

use autoplex::cli::dispatch_with_input;
use autoplex::dio::DioCertificate;
use autoplex::witness::WitnessSpec;
use autoplex::{BitString, Dfa};
use serde_json::Value;

fn run_with(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("autoplex").chain(args.iter().copied());
    let code = dispatch_with_input(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with(args, "")
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&ok(&a)).unwrap()
}

#[test]
fn debruijn() {
    assert_eq!(ok(&["debruijn", "--order", "3"]), "00010111\n");
    assert_eq!(ok(&["debruijn", "--order", "2", "--start-bit", "1"]), "1100\n");
    assert_eq!(ok(&["debruijn", "--order", "3", "--start-bit", "1"]), "10111000\n");
    assert_eq!(ok(&["debruijn", "--order", "3", "--rotate", "2"]), "01011100\n");
    assert_eq!(run(&["debruijn", "--order", "3", "--rotate", "8"]).0, 1);
    let v = json(&["debruijn", "--order", "4"]);
    assert_eq!(v["bits"], "0000100110101111");
    assert_eq!(v["length"], "16");
    assert_eq!(v["is_debruijn"], true);
}

#[test]
fn psc_commands() {
    assert_eq!(ok(&["psc", "zone", "--n", "3"]), "000101110001011100010111\n");
    assert_eq!(ok(&["psc", "prefix", "--len", "10"]), "0100110110\n");
    assert_eq!(ok(&["psc", "prefix", "--len", "8", "--start", "10"]), "00010111\n");
    let v = json(&["psc", "len", "--n", "64"]);
    assert_eq!(v["zone_length"], "1180591620717411303424");
    assert_eq!(v["prefix_length"], "2324289753287403503618");
    assert_eq!(
        ok(&["psc", "verify", "--to", "3", "--format", "csv"]),
        "n,ok\n1,true\n2,true\n3,true\n"
    );
    let v = json(&["psc", "lemma", "--j", "4"]);
    assert_eq!(v["ok"], true);
    assert_eq!(v["modulus"], 15);
    assert_eq!(run(&["psc", "lemma", "--j", "6"]).0, 1);
    assert_eq!(run(&["psc", "zone", "--n", "21"]).0, 1);
    assert_eq!(run(&["psc", "zone", "--n", "5", "--zone-cap", "4"]).0, 1);
}

#[test]
fn tseq_commands() {
    assert_eq!(ok(&["tseq", "prefix", "--len", "6"]), "100011\n");
    let v = json(&["tseq", "len", "--j", "3", "--mode", "scaled"]);
    assert_eq!(v["exponent"], "27");
    assert_eq!(v["zone_length"], "216");
    assert_eq!(v["prefix_length"], "234");
    let v = json(&["tseq", "len", "--j", "4", "--mode", "exact"]);
    assert_eq!(v["magnitude"]["kind"], "log_log10");
    assert!(v.get("exponent").is_none());
    assert_eq!(run(&["tseq", "prefix", "--len", "10", "--mode", "bogus"]).0, 2);
}

#[test]
fn dfa_count() {
    let m = r#"{"states":2,"start":0,"accept":[0],"delta":[[0,1],[1,1]]}"#;
    let (code, out, _) = run_with(&["dfa", "count", "--length", "7"], m);
    assert_eq!((code, out.as_str()), (0, "1\n"));
    let (code, out, _) = run_with(
        &["dfa", "count", "--length", "4", "--format", "json"],
        r#"{"states":1,"start":0,"accept":[0],"delta":[[0,0]]}"#,
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], "16");
    assert_eq!(run_with(&["dfa", "count", "--length", "3"], "{not json").0, 1);
}

#[test]
fn acx_commands() {
    let v = json(&["acx", "exact", "--string", "00000"]);
    assert_eq!(v["value"], 2);
    let m: Dfa = serde_json::from_value(v["witness"].clone()).unwrap();
    assert!(m.uniquely_accepts(&"00000".parse::<BitString>().unwrap()));
    assert_eq!(ok(&["acx", "exact", "--string", "0011"]), "3\n");
    assert_eq!(ok(&["acx", "brute", "--string", "0011"]), "3\n");
    assert_eq!(ok(&["acx", "brute", "--string", "0110", "--max-states", "2"]), "more than 2 states\n");
    assert_eq!(ok(&["acx", "lower", "--string", "010"]), "2\n");
    assert_eq!(ok(&["acx", "lower", "--string", "0011"]), "not 2-power free\n");
    assert_eq!(run(&["acx", "exact", "--string", "01x"]).0, 2);
}

#[test]
fn witness_mhat() {
    let v = json(&["witness", "mhat"]);
    assert_eq!(v["solutions"], serde_json::json!([[2, 3, 9, 13]]));
    assert_eq!(v["ratio_lt_0173"], true);
    assert_eq!(v["n2_lt_n1"], true);
    assert_eq!(v["n1"], "1199038364791120855170");
    assert_eq!(v["n2"], "816268425261647659130");
    let cert: DioCertificate = serde_json::from_value(v["equation"].clone()).unwrap();
    assert!(cert.check() && cert.is_unique());
}

#[test]
fn witness_case_and_machines() {
    let v = json(&["witness", "case", "--n", "6", "--materialize"]);
    assert_eq!(v["case"], 3);
    assert_eq!(v["unique"], true);
    assert_eq!(v["materialized"]["dp_count"], "1");
    let spec: WitnessSpec = serde_json::from_value(v["spec"].clone()).unwrap();
    assert_eq!(spec.state_count().to_string(), v["states"].as_str().unwrap());
    let v = json(&["witness", "m1", "--n", "2", "--materialize"]);
    assert_eq!(v["states"], "7");
    assert_eq!(v["quoted_states"], "7");
    let v = json(&["witness", "m2", "--n", "3", "--w", "5", "--materialize"]);
    assert_eq!(v["materialized"]["unique"], true);
    assert_eq!(run(&["witness", "case", "--n", "1"]).0, 2);
    assert_eq!(run(&["witness", "case", "--n", "8", "--case", "3"]).0, 1);
}

#[test]
fn dio_commands() {
    assert_eq!(
        ok(&["dio", "solve", "--coeffs", "1,1", "--target", "1"]),
        "0 1\n1 0\n"
    );
    let v = json(&["dio", "solve", "--coeffs", "3,5", "--target", "8"]);
    assert_eq!(v["solutions"], serde_json::json!([["1", "1"]]));
    assert_eq!(v["unique"], true);
    assert_eq!(
        ok(&["dio", "solve", "--coeffs", "2", "--constant", "-1", "--target", "4"]),
        "no solutions\n"
    );
    assert_eq!(ok(&["dio", "family", "--a", "3", "--b", "5", "--c", "1"]), "(2, -1) + d·(5, -3)\n");
    assert_eq!(ok(&["dio", "family", "--a", "2", "--b", "4", "--c", "1"]), "no integer solutions\n");
    assert_eq!(run(&["dio", "solve", "--coeffs", "0,1", "--target", "1"]).0, 1);
    assert_eq!(run(&["dio", "solve", "--coeffs", "1,1", "--target", "1", "--bounds", "1"]).0, 2);
}

#[test]
fn rates_commands() {
    let csv = ok(&["rates", "--seq", "psc", "--from", "0", "--to", "4", "--format", "csv"]);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "m,bound_num,bound_den,bound_decimal,source");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..].iter().all(|l| l.ends_with(",\"exact\"")));
    assert_eq!(lines[1], "0,2,1,2.0000000000,\"exact\"");
    let out = ok(&["rates", "series", "--which", "case2_limit", "--n-list", "3", "--format", "csv"]);
    assert_eq!(out.lines().next(), Some("n,num,den,decimal"));
    let v = json(&["rates", "series", "--which", "ic_quarter", "--n-list", "64"]);
    assert_eq!(v["values"][0]["bound"]["decimal"], "0.2539062500");
    let v = json(&["rates", "tail", "--n", "6", "--j-list", "1,2"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
    let v = json(&["rates", "freq", "--seq", "psc", "--len", "34", "--k", "1"]);
    assert_eq!(v["counts"], serde_json::json!([17, 17]));
    assert_eq!(run(&["rates", "series", "--which", "nope"]).0, 2);
    assert_eq!(run(&["rates", "series", "--which", "case3", "--n-list", "8"]).0, 1);
    assert_eq!(run(&["rates", "--from", "5", "--to", "1"]).0, 2);
}

#[test]
fn verify_command() {
    let v = json(&["verify"]);
    assert_eq!(v["all_ok"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn usage_and_exit_codes() {
    let (code, _, err) = run(&["nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["--version"]).0, 0);
    assert_eq!(run(&["debruijn", "--order", "25"]).0, 1);
}

#[test]
fn environment_overrides_and_flags_win() {
    let bin = env!("CARGO_BIN_EXE_autoplex");
    let out = Command::new(bin)
        .args(["debruijn", "--order", "2"])
        .env("AUTOPLEX_FORMAT", "json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bits"], "0011");
    let out = Command::new(bin)
        .args(["debruijn", "--order", "2", "--format", "text"])
        .env("AUTOPLEX_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0011\n");
    let out = Command::new(bin)
        .args(["psc", "zone", "--n", "6"])
        .env("AUTOPLEX_ZONE_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
