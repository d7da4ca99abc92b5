//! Decide whether Gaussian interference channels lie in the strong
//! interference regimes.
//!
//! Run with `cargo run --example gaussian_regimes`.

use std::fmt::Write;

use icregime::model::GaussianIC;
use icregime::regimes::{
    gaussian_3user_check, gaussian_kuser_check, gaussian_variant46_check, kuser_regime_gains,
};

pub fn run_example() -> String {
    let mut out = String::new();

    // free parameters a13 = 2, a21 = 3, a32 = 2 fix every other cross gain
    let gains = kuser_regime_gains(&[2.0, 3.0, 2.0]);
    let ic = GaussianIC::with_unit_powers(gains.clone()).expect("standard form");
    writeln!(out, "gains: {gains:?}").unwrap();

    let k = gaussian_kuser_check(&ic, 0).expect("3 users");
    writeln!(out, "cyclic regime: pass = {}, alphas = {:?}", k.pass, k.alphas.unwrap_or_default()).unwrap();

    let three = gaussian_3user_check(&ic).expect("3 users");
    writeln!(out, "3-user check: pass = {}, witness = {:?}", three.pass, three.witness).unwrap();

    let v46 = gaussian_variant46_check(&ic).expect("3 users");
    writeln!(out, "variant 46: pass = {}, failures = {}", v46.pass, v46.failures.len()).unwrap();

    for (a, b) in [(2.0, 1.5), (2.0, 0.5)] {
        let two = GaussianIC::with_unit_powers(vec![vec![1.0, a], vec![b, 1.0]]).expect("standard form");
        let r = gaussian_kuser_check(&two, 0).expect("2 users");
        writeln!(out, "two users a12 = {a}, a21 = {b}: pass = {}", r.pass).unwrap();
    }

    let weak = GaussianIC::with_unit_powers(vec![
        vec![1.0, 0.5, 0.5],
        vec![0.5, 1.0, 0.5],
        vec![0.5, 0.5, 1.0],
    ])
    .expect("standard form");
    let r = gaussian_kuser_check(&weak, 0).expect("3 users");
    writeln!(out, "weak channel: pass = {}", r.pass).unwrap();
    for f in &r.failures {
        writeln!(out, "  chain {}: {}", f.chain, f.reason).unwrap();
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
