//! Order broadcast receivers by capability, compare with degradation and
//! compute the sum capacity at the strongest receiver.
//!
//! Run with `cargo run --release --example broadcast_more_capable`.

use std::fmt::Write;

use icregime::model::{DiscreteBroadcastChannel, StochasticMatrix};
use icregime::verifier::{bc_more_capable_order, bc_sum_capacity, degradation_feasibility, GridSpec};

pub fn run_example() -> String {
    let mut out = String::new();
    let chain = DiscreteBroadcastChannel::new(vec![
        StochasticMatrix::bsc(0.3),
        StochasticMatrix::bsc(0.1),
        StochasticMatrix::bsc(0.2),
    ])
    .expect("same input alphabet");
    let order = bc_more_capable_order(&chain, &GridSpec::new(64).expect("valid grid")).expect("grid fits");
    let top = order.order.as_ref().expect("degraded chains are ordered")[0];
    writeln!(out, "BSC chain order (0-based): {:?}, margins {:?}", order.order, order.min_margins).unwrap();
    let c = bc_sum_capacity(&chain, top).expect("converges");
    writeln!(out, "sum capacity {:.6} at {:?}", c.capacity, c.argmax.probs()).unwrap();

    let pair = DiscreteBroadcastChannel::new(vec![StochasticMatrix::bsc(0.1), StochasticMatrix::bec(0.4)])
        .expect("same input alphabet");
    let order = bc_more_capable_order(&pair, &GridSpec::new(128).expect("valid grid")).expect("grid fits");
    writeln!(out, "BSC(0.1) vs BEC(0.4) order: {:?}", order.order).unwrap();
    let forward = degradation_feasibility(pair.marginal(0), pair.marginal(1)).expect("same inputs");
    let backward = degradation_feasibility(pair.marginal(1), pair.marginal(0)).expect("same inputs");
    writeln!(out, "degraded either way: {} / {}", forward.degraded, backward.degraded).unwrap();

    let cascade = degradation_feasibility(&StochasticMatrix::bsc(0.1), &StochasticMatrix::bsc(0.2)).expect("same inputs");
    writeln!(out, "BSC(0.2) from BSC(0.1) via {:?}", cascade.garble).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
