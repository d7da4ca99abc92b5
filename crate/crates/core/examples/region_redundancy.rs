//! Show that inside the cyclic regime each subset bound only needs the
//! receivers inside the subset.
//!
//! Run with `cargo run --example region_redundancy`.

use std::fmt::Write;

use icregime::model::GaussianIC;
use icregime::regimes::kuser_regime_gains;
use icregime::regions::{redundancy_check, region_full, region_simplified};

pub fn run_example() -> String {
    let mut out = String::new();
    for free in [vec![2.0, 3.0, 2.0], vec![1.5, -2.0, 1.2, 2.5]] {
        let ic = GaussianIC::with_unit_powers(kuser_regime_gains(&free)).expect("standard form");
        let r = redundancy_check(&ic, 0).expect("in regime by construction");
        writeln!(
            out,
            "K = {}: equivalent = {}, max bound gap = {:.2e}, samples = {}",
            ic.k(),
            r.equivalent,
            r.max_bound_gap,
            r.samples_checked
        )
        .unwrap();
        let (full, simp) = (region_full(&ic).expect("region"), region_simplified(&ic).expect("region"));
        for s in full.subsets() {
            writeln!(
                out,
                "  {s}: full {:.6} via {}, simplified {:.6} via {}",
                full.bound(s),
                full.argmin_receivers(s),
                simp.bound(s),
                simp.argmin_receivers(s)
            )
            .unwrap();
        }
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
