use std::path::PathBuf;
use std::process::{Command, Output};

fn kkw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kkw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("kkw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn phi_verifies_with_exit_zero() {
    let o = kkw(&["verify", "--theorem", "thm3.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("MATCH    phi/b: 9/2*hp*pi*Omega"));
    assert!(s.contains("0 mismatches"));
}

#[test]
fn psi_mismatch_exits_one() {
    let o = kkw(&["verify", "--theorem", "thm4.3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH psi/total"));
}

#[test]
fn json_report_to_file() {
    let p = scratch("phibar.json");
    let o = kkw(&["verify", "--theorem", "thm3.7", "--format", "json", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    let r = kkw_core::VerificationReport::from_json(&text).unwrap();
    assert_eq!(r.meta.selector, "thm3.7");
    assert_eq!(r.meta.omega_labels["4"], "Omega_3");
    assert!(r.entries.iter().any(|e| e.key == "phibar/total"));
}

#[test]
fn unknown_selector_is_usage_error() {
    let o = kkw(&["verify", "--theorem", "thm9.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("thm3.6"));
    assert_eq!(kkw(&["verify", "--theorem", "thm2.2", "--n", "5"]).status.code(), Some(2));
    assert_eq!(kkw(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_instance_is_data_error() {
    let p = scratch("bad.json");
    std::fs::write(&p, "{\"n\": 4}").unwrap();
    let o = kkw(&["verify", "--theorem", "thm3.6", "--instance", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let missing = scratch("missing.json");
    assert_eq!(kkw(&["verify", "--theorem", "thm3.6", "--instance", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn explicit_instance_is_used() {
    let inst = kkw_core::SubbundleInstance::random(4, 1, 99).unwrap();
    let p = scratch("inst4.json");
    std::fs::write(&p, inst.to_json()).unwrap();
    let o = kkw(&["verify", "--theorem", "thm3.6", "--instance", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(&inst.digest()));
}

#[test]
fn trace_subcommand() {
    let o = kkw(&["trace", "trace(c(4)*c(4))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-16");
    let o = kkw(&["trace", "c(1)*c(2) + c(2)*c(1)"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = kkw(&["trace", "c(1)*ch(2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 9"));
    assert_eq!(kkw(&["trace", "c(7)"]).status.code(), Some(3));
}

#[test]
fn single_case() {
    let o = kkw(&["cases", "--theorem", "phi", "--case", "c"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("phi/c: -9/2*hp*pi*Omega"));
}
