//! Print the mutual-information condition sets that define the regimes.
//!
//! Run with `cargo run --example condition_sets`.

use std::fmt::Write;

use icregime::regimes::{generate_3user_variant, generate_kuser_regime, ThreeUserVariant};

pub fn run_example() -> String {
    let mut out = String::new();
    for k in [2, 3, 4] {
        let set = generate_kuser_regime(k, 0).expect("valid K");
        write!(out, "{set}").unwrap();
    }
    let shifted = generate_kuser_regime(3, 1).expect("valid shift");
    write!(out, "{shifted}").unwrap();
    write!(out, "{}", generate_3user_variant(ThreeUserVariant::Regime46)).unwrap();
    let json = serde_json::to_string(&generate_kuser_regime(2, 0).expect("valid K")).expect("serializable");
    writeln!(out, "json: {json}").unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
