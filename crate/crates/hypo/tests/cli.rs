use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hypo::output::body;

fn hypo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypo"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verdict_line(o: &Output) -> String {
    stdout(o)
        .lines()
        .find(|l| l.starts_with("VERDICT:"))
        .unwrap_or_default()
        .to_string()
}

#[test]
fn exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = hypo(&["certify", "--kind", "gamma-rho", "--symbol", "xi1^2 + x1^4", "--rho", "1/2"], d);
    assert_eq!(ok.status.code(), Some(0));
    assert!(verdict_line(&ok).starts_with("VERDICT: certified"));
    assert!(verdict_line(&ok).contains("m'=1"));

    let refuted = hypo(&["certify", "--kind", "sg", "--symbol", "xi1^2 - 1"], d);
    assert_eq!(refuted.status.code(), Some(2));
    assert!(stdout(&refuted).contains("WITNESS:"));

    let complex = hypo(&["certify", "--kind", "sg", "--symbol", "-xi1^2 - (0+1i)"], d);
    assert_eq!(complex.status.code(), Some(0));

    // the lower bound holds but x^2 + xi^2 is not a symbol of order <z>^1
    let inc = hypo(&["certify", "--kind", "elliptic", "--symbol", "x1^2 + xi1^2", "--m", "<z>"], d);
    assert_eq!(inc.status.code(), Some(3));
    assert!(verdict_line(&inc).starts_with("VERDICT: inconclusive"));

    let bad = hypo(&["certify", "--symbol", "xi1^^2"], d);
    assert_eq!(bad.status.code(), Some(1));
    let bad_flag = hypo(&["certify", "--no-such-flag"], d);
    assert_eq!(bad_flag.status.code(), Some(1));
    let bad_demo = hypo(&["demo", "nonsense"], d);
    assert_eq!(bad_demo.status.code(), Some(1));
}

#[test]
fn certificate_record_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypo(&["certify", "--kind", "gamma-rho", "--symbol", "xi1^2", "--m", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let rec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(rec["verdict"], "refuted");
    assert_eq!(rec["witness"]["locus"], "xi = 0");
    assert_eq!(rec["witness"]["point"]["xi"][0], 0.0);
    let shells = fs::read_to_string(dir.path().join("shells.csv")).unwrap();
    assert!(shells.contains("# config-digest: "));
    assert!(body(&shells).starts_with("shell,radius,min_ratio\n"));
}

#[test]
fn identical_configs_give_identical_bodies() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["parametrix", "--symbol", "1 + x1^2 + xi1^2", "--terms", "1", "--seed", "7"];
    let oa = hypo(&args, a.path());
    let ob = hypo(&args, b.path());
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(stdout(&oa), stdout(&ob));
    for f in ["remainder.csv", "report.txt", "config.txt", "certificate.json"] {
        let ta = fs::read_to_string(a.path().join(f)).unwrap();
        let tb = fs::read_to_string(b.path().join(f)).unwrap();
        assert_eq!(body(&ta), body(&tb), "{}", f);
    }
    // rerunning from the emitted config reproduces the run
    let c = tempfile::tempdir().unwrap();
    let cfg = a.path().join("config.txt");
    let oc = hypo(&["--config", cfg.to_str().unwrap()], c.path());
    assert_eq!(stdout(&oa), stdout(&oc));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "command = solve\nsymbol = 1 + xi1^2 + x1^2\nk = 16\nrhs = h0\n").unwrap();
    let out = dir.path().join("out");
    let o = hypo(&["--config", cfg.to_str().unwrap(), "solve", "--k", "24"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SOLVE: K=24"));
    let canon = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(canon.contains("k = 24\n"));
}

#[test]
fn solve_the_diagonal_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypo(&["solve", "--symbol", "1 + xi1^2 + x1^2", "--rhs", "h0", "--k", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("class=schwartz-like"));
    let sol = body(&fs::read_to_string(dir.path().join("solution.csv")).unwrap());
    let mut rows = sol.lines().skip(1);
    assert_eq!(rows.next(), Some("0,0,0.5,0"));
    assert!(rows.all(|r| r.ends_with(",0,0")));
}

#[test]
fn parametrix_prints_terms_and_remainder_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypo(&["parametrix", "--symbol", "1 + x1^2 + xi1^2", "--terms", "1"], dir.path());
    let text = stdout(&o);
    assert!(text.contains("q_1 = ((-4i)*x1*xi1) / (x1^2 + xi1^2 + 1)^3"), "{}", text);
    assert!(text.contains("REMAINDER: N=1"));
    let refused = hypo(&["parametrix", "--symbol", "xi1^2", "--m", "2"], dir.path());
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn bootstrap_table_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypo(&["bootstrap", "--m-u", "-4", "--m", "0", "--m0", "2", "--mt", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("STEPS: N=6 closed_form=6"));
    let csv = body(&fs::read_to_string(dir.path().join("bootstrap.csv")).unwrap());
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.contains("6,2,H^2_Gamma"));
    let sg = hypo(
        &["bootstrap", "--mode", "sg", "--m-u", "-2,-2", "--m", "0,0", "--m0", "1,1", "--mt", "0,0"],
        dir.path(),
    );
    assert!(stdout(&sg).contains("STEPS: N=3"));
    let fail = hypo(&["bootstrap", "--m-u", "0", "--m", "0", "--m0", "1", "--mt", "1"], dir.path());
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("hypothesis failure"));
}

#[test]
fn demos_run() {
    for name in ["schroedinger-stability", "camperi"] {
        let dir = tempfile::tempdir().unwrap();
        let o = hypo(&["demo", name], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", name);
        assert!(dir.path().join("report.txt").exists());
    }
}
