//! Check mutual-information inequalities by brute force on small discrete
//! channels, both on degraded ground truth and on a violating channel.
//!
//! Run with `cargo run --release --example lemma_verification`.

use std::fmt::Write;

use icregime::model::StochasticMatrix;
use icregime::verifier::{
    corollary1_gap, grid_min_gap, make_degraded_channel, random_stochastic, sample_lemma1_gap,
    sample_lemma3_gap_n2, sample_lemma4_gap, GridSpec, SampleSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> String {
    let mut out = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let base = random_stochastic(8, 3, 1.0, &mut rng);
    let garble = random_stochastic(3, 2, 1.0, &mut rng);
    let ch = make_degraded_channel(vec![2, 2, 2], 2, &base, &garble).expect("compatible shapes");
    let spec = SampleSpec::new(200, 7).expect("valid sampling");

    let grid = grid_min_gap(&ch, &GridSpec::new(8).expect("valid grid")).expect("grid fits");
    writeln!(out, "degraded grid:       min gap {:.6} over {} laws", grid.min_gap, grid.n_evaluated).unwrap();
    let l1 = sample_lemma1_gap(&ch, 3, &spec).expect("sizes");
    writeln!(out, "degraded lemma 1:    min gap {:.6}", l1.min_gap).unwrap();
    let l3 = sample_lemma3_gap_n2(&ch, 3, &spec).expect("extension fits");
    writeln!(out, "degraded lemma 3:    min gap {:.6}", l3.min_gap).unwrap();
    let l4 = sample_lemma4_gap(&ch, 2, 3, &spec).expect("sizes");
    writeln!(out, "degraded lemma 4:    min gap {:.6}", l4.min_gap).unwrap();
    let c1 = corollary1_gap(&ch, &[0], 3, &spec).expect("X1 in joint block");
    writeln!(out, "degraded corollary:  min gap {:.6}", c1.min_gap).unwrap();

    let anti = make_degraded_channel(vec![2], 1, &StochasticMatrix::bsc(0.1), &StochasticMatrix::bsc(0.125))
        .expect("compatible shapes")
        .swap_outputs();
    let bad = grid_min_gap(&anti, &GridSpec::new(8).expect("valid grid")).expect("grid fits");
    writeln!(
        out,
        "anti-degraded grid:  min gap {:.6} at {:?}",
        bad.min_gap, bad.argmin_law.factors[0].probs
    )
    .unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
