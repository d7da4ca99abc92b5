//! Replace the weaker output of a proportional-gain Gaussian system by a
//! statistically equivalent degraded version of the stronger one.
//!
//! Run with `cargo run --example degraded_equivalent`.

use std::fmt::Write;

use icregime::model::TwoOutputSystem;
use icregime::regimes::{degraded_equivalent, ratio_condition_check};

pub fn run_example() -> String {
    let mut out = String::new();
    let sys = TwoOutputSystem::new(2, 1, vec![0.5, -1.0, 0.7], vec![1.0, -2.0, 3.0]).expect("shapes agree");
    let check = ratio_condition_check(&sys);
    writeln!(out, "ratios {:?}, alpha {:?}", check.ratios, check.alpha).unwrap();
    let d = degraded_equivalent(&sys).expect("ratio-degraded");
    writeln!(out, "alpha = {}, corrections = {:?}, noise scale = {:.6}", d.alpha, d.corrections, d.noise_scale).unwrap();
    writeln!(out, "mean coefficients {:?} (target {:?})", d.conditional_mean_coeffs(&sys), sys.a()).unwrap();
    writeln!(out, "variance {:.6}", d.conditional_variance()).unwrap();

    let unequal = TwoOutputSystem::new(2, 0, vec![1.0, 1.0], vec![1.0, 2.0]).expect("shapes agree");
    writeln!(out, "unequal ratios: {}", degraded_equivalent(&unequal).unwrap_err()).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
