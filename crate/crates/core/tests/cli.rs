use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use icregime::model::{
    ChannelSpec, DiscreteBroadcastChannel, GaussianIC, StochasticMatrix,
};
use icregime::regimes::kuser_regime_gains;
use icregime::verifier::{make_degraded_channel, VerificationReport};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_icregime"));
    c.env_remove("ICREGIME_MAX_GRID");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write(dir: &TempDir, name: &str, spec: &ChannelSpec) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(spec).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Files {
    _dir: TempDir,
    regime: PathBuf,
    ones3: PathBuf,
    weak: PathBuf,
    degraded: PathBuf,
    anti: PathBuf,
    chain: PathBuf,
    bsc_bec: PathBuf,
    bsc1: PathBuf,
    bsc2: PathBuf,
    sys: PathBuf,
    unequal: PathBuf,
}

fn files() -> Files {
    let dir = TempDir::new().unwrap();
    let gauss = |g: Vec<Vec<f64>>| ChannelSpec::from_gaussian(&GaussianIC::with_unit_powers(g).unwrap());
    let regime = write(&dir, "regime.json", &gauss(kuser_regime_gains(&[2.0, 3.0, 2.0])));
    let ones3 = write(&dir, "ones3.json", &gauss(vec![vec![1.0; 3]; 3]));
    let weak = write(&dir, "weak.json", &gauss(vec![vec![1.0, 0.5], vec![0.5, 1.0]]));
    let ch = make_degraded_channel(vec![2], 1, &StochasticMatrix::bsc(0.1), &StochasticMatrix::bsc(0.125)).unwrap();
    let degraded = write(&dir, "degraded.json", &ChannelSpec::from_discrete(&ch));
    let anti = write(&dir, "anti.json", &ChannelSpec::from_discrete(&ch.swap_outputs()));
    let bc = |m: Vec<StochasticMatrix>| ChannelSpec::from_broadcast(&DiscreteBroadcastChannel::new(m).unwrap());
    let chain = write(
        &dir,
        "chain.json",
        &bc(vec![StochasticMatrix::bsc(0.1), StochasticMatrix::bsc(0.2), StochasticMatrix::bsc(0.3)]),
    );
    let bsc_bec = write(&dir, "bscbec.json", &bc(vec![StochasticMatrix::bsc(0.1), StochasticMatrix::bec(0.4)]));
    let bsc1 = write(&dir, "bsc1.json", &bc(vec![StochasticMatrix::bsc(0.1)]));
    let bsc2 = write(&dir, "bsc2.json", &bc(vec![StochasticMatrix::bsc(0.2)]));
    let two = |mu1, mu2, a, b| ChannelSpec::TwoOutputSystem { mu1, mu2, a, b };
    let sys = write(&dir, "sys.json", &two(2, 1, vec![0.5, 1.0, 0.3], vec![1.0, 2.0, 0.0]));
    let unequal = write(&dir, "unequal.json", &two(2, 0, vec![1.0, 1.0], vec![1.0, 2.0]));
    Files {
        _dir: dir,
        regime,
        ones3,
        weak,
        degraded,
        anti,
        chain,
        bsc_bec,
        bsc1,
        bsc2,
        sys,
        unequal,
    }
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn gaussian_checks_exit_codes() {
    let f = files();
    assert_eq!(code(&run(&["check-gaussian", s(&f.regime)])), 0);
    assert_eq!(code(&run(&["check-gaussian", s(&f.weak)])), 1);
    assert_eq!(code(&run(&["check3user", s(&f.regime)])), 0);
    assert_eq!(code(&run(&["check-variant46", s(&f.regime)])), 1);
    assert_eq!(code(&run(&["regime-list", "--k", "3"])), 0);
    assert_eq!(code(&run(&["check-gaussian", s(&f.degraded)])), 2);
    assert_eq!(code(&run(&["check-gaussian", "/nonexistent/file.json"])), 2);
}

#[test]
fn check_gaussian_reports_alphas() {
    let f = files();
    let v = json(&run(&["check-gaussian", s(&f.regime)]));
    let alphas = v["alphas"].as_array().unwrap();
    let expect = [0.5, 1.0 / 3.0, 0.5];
    for (a, e) in alphas.iter().zip(expect) {
        assert!((a.as_f64().unwrap() - e).abs() < 1e-6);
    }
}

#[test]
fn region_verbs() {
    let f = files();
    assert_eq!(code(&run(&["region", s(&f.regime)])), 0);
    assert_eq!(code(&run(&["region", "--simplified", s(&f.regime)])), 0);
    assert_eq!(code(&run(&["membership", s(&f.ones3), "--rates", "0.3,0.3,0.3"])), 0);
    assert_eq!(code(&run(&["membership", s(&f.ones3), "--rates", "0.5,0.5,0"])), 1);
    assert_eq!(code(&run(&["membership", s(&f.ones3), "--rates", "0.5,0.5"])), 2);
    assert_eq!(code(&run(&["vertices", s(&f.ones3)])), 0);
    assert_eq!(code(&run(&["support", s(&f.ones3), "--direction", "1,1,1"])), 0);
    assert_eq!(code(&run(&["slice", s(&f.ones3), "--fix", "3=0.25"])), 0);
    assert_eq!(code(&run(&["slice", s(&f.ones3)])), 2);
    assert_eq!(code(&run(&["redundancy", s(&f.regime)])), 0);
    assert_eq!(code(&run(&["redundancy", s(&f.weak)])), 1);
}

#[test]
fn sum_capacity_of_all_ones() {
    let f = files();
    let out = run(&["sum-capacity", s(&f.ones3)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("1.000000"), "{}", stdout(&out));
    let csv = run(&["--format", "csv", "--precision", "3", "sum-capacity", s(&f.regime)]);
    assert!(stdout(&csv).contains("2.230"));
}

#[test]
fn membership_tolerance_override() {
    let f = files();
    let edge = "0.5000001,0,0";
    assert_eq!(code(&run(&["membership", s(&f.ones3), "--rates", edge])), 1);
    assert_eq!(code(&run(&["--tol", "membership=1e-6", "membership", s(&f.ones3), "--rates", edge])), 0);
    assert_eq!(code(&run(&["--tol", "bogus=1", "membership", s(&f.ones3), "--rates", edge])), 2);
}

#[test]
fn slice_gnuplot_script() {
    let f = files();
    let plot = f._dir.path().join("slice.gp");
    let out = run(&["slice", s(&f.ones3), "--fix", "3=0.25", "--gnuplot", s(&plot)]);
    assert_eq!(code(&out), 0);
    let script = std::fs::read_to_string(plot).unwrap();
    assert!(script.contains("plot"));
}

#[test]
fn lemma_verbs_on_degraded_channel_pass() {
    let f = files();
    let d = s(&f.degraded);
    assert_eq!(code(&run(&["grid-gap", d])), 0);
    assert_eq!(code(&run(&["lemma1", d, "--samples", "20"])), 0);
    assert_eq!(code(&run(&["lemma3", d, "--samples", "20"])), 0);
    assert_eq!(code(&run(&["lemma4", d, "--samples", "20"])), 0);
    assert_eq!(code(&run(&["corollary1", d, "--subset", "1", "--samples", "20"])), 0);
    assert_eq!(code(&run(&["corollary1", d, "--subset", "2", "--samples", "20"])), 2);
    assert_eq!(code(&run(&["verify-lemmas", d, "--samples", "20"])), 0);
}

#[test]
fn verify_lemmas_on_anti_degraded_fails() {
    let f = files();
    let out = run(&["verify-lemmas", s(&f.anti), "--samples", "20"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&run(&["grid-gap", s(&f.anti)])), 1);
}

#[test]
fn grid_overflow_falls_back_to_sampling() {
    let f = files();
    let out = bin()
        .env("ICREGIME_MAX_GRID", "3")
        .args(["--no-timestamp", "grid-gap", s(&f.degraded)])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["mode"], "sampled");
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let f = files();
    let args = ["--no-timestamp", "--seed", "9", "lemma1", s(&f.degraded), "--samples", "30"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("elapsed_ms"));
    let report: VerificationReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report.operation, "lemma1");
    assert_eq!(report.seed, Some(9));
    assert_eq!(report.n_evaluated, 31);

    let timed = json(&run(&["lemma1", s(&f.degraded), "--samples", "5"]));
    assert!(timed.get("elapsed_ms").is_some());

    let path = f._dir.path().join("report.json");
    let out = run(&["--no-timestamp", "--output", s(&path), "grid-gap", s(&f.degraded)]);
    assert_eq!(code(&out), 0);
    let written: VerificationReport = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(written.mode, "grid");
}

#[test]
fn broadcast_verbs() {
    let f = files();
    assert_eq!(code(&run(&["bc-order", s(&f.chain)])), 0);
    let order = json(&run(&["bc-order", s(&f.chain)]));
    assert_eq!(order["order"], serde_json::json!([1, 2, 3]));
    let cap = run(&["bc-sumcap", s(&f.chain), "--strongest", "1"]);
    assert_eq!(code(&cap), 0);
    assert!((json(&cap)["capacity"].as_f64().unwrap() - 0.531004).abs() < 1e-5);
    assert_eq!(code(&run(&["bc-sumcap", s(&f.chain), "--strongest", "3"])), 1);
    assert_eq!(code(&run(&["bc-sumcap", s(&f.chain), "--strongest", "4"])), 2);
    assert_eq!(code(&run(&["degrade-test", s(&f.bsc_bec)])), 1);
    assert_eq!(code(&run(&["degrade-test", s(&f.bsc1), "--second", s(&f.bsc2)])), 0);
    assert_eq!(code(&run(&["degrade-test", s(&f.bsc2), "--second", s(&f.bsc1)])), 1);
}

#[test]
fn degraded_equivalent_verb() {
    let f = files();
    let out = run(&["degraded-equivalent", s(&f.sys)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["conditional_variance"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(code(&run(&["degraded-equivalent", s(&f.unequal)])), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["no-such-verb"])), 2);
    assert_eq!(code(&run(&["--precision", "99", "regime-list", "--k", "2"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
    let f = files();
    assert_eq!(code(&run(&["--format", "csv", "lemma1", s(&f.degraded)])), 2);
}
