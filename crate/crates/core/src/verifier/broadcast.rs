//! Degradation feasibility, more-capable orders and broadcast sum capacity.

use serde::Serialize;

use super::gaps::{composition_count, to_probs, Compositions};
use super::{GridSpec, VerifierError, GAP_TOL};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measures::entropy_of;
use crate::model::{DiscreteBroadcastChannel, DiscretePMF, StochasticMatrix};

/// Largest residual accepted on each garbling equation.
pub const DEGRADATION_TOL: f64 = 1e-9;
/// Stopping threshold on successive capacity estimates.
pub const BA_TOL: f64 = 1e-10;
pub const BA_MAX_ITERATIONS: usize = 10_000;
/// Slack allowed on the nondecreasing capacity sequence.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Degradation {
    pub degraded: bool,
    /// `G(y2 | y1)` with `P2 = P1 G`, when one exists.
    pub garble: Option<Vec<Vec<f64>>>,
    /// Largest equation residual of the witness.
    pub max_residual: Option<f64>,
}

/// Decide whether `p2` is a garbling of `p1`: find a row-stochastic `G`
/// with `p2(y2 | x) = sum_{y1} p1(y1 | x) G(y2 | y1)`.
pub fn degradation_feasibility(
    p1: &StochasticMatrix,
    p2: &StochasticMatrix,
) -> Result<Degradation, VerifierError> {
    if p1.rows() != p2.rows() {
        return Err(VerifierError::DimensionMismatch(format!(
            "input alphabets differ: {} vs {}",
            p1.rows(),
            p2.rows()
        )));
    }
    let (nx, n1, n2) = (p1.rows(), p1.cols(), p2.cols());
    let var = |y1: usize, y2: usize| y1 * n2 + y2;
    let mut lp = LinearProgram::maximize(vec![0.0; n1 * n2]);
    for y1 in 0..n1 {
        let mut row = vec![0.0; n1 * n2];
        (0..n2).for_each(|y2| row[var(y1, y2)] = 1.0);
        lp.constraint(row, Relation::Eq, 1.0);
    }
    for x in 0..nx {
        for y2 in 0..n2 {
            let mut row = vec![0.0; n1 * n2];
            (0..n1).for_each(|y1| row[var(y1, y2)] = p1.get(x, y1));
            lp.constraint(row, Relation::Eq, p2.get(x, y2));
        }
    }
    let LpOutcome::Optimal { x: g, .. } = lp.solve() else {
        return Ok(Degradation {
            degraded: false,
            garble: None,
            max_residual: None,
        });
    };
    let garble: Vec<Vec<f64>> = (0..n1).map(|y1| (0..n2).map(|y2| g[var(y1, y2)].max(0.0)).collect()).collect();
    let mut residual = garble
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    for x in 0..nx {
        for y2 in 0..n2 {
            let lhs: f64 = (0..n1).map(|y1| p1.get(x, y1) * garble[y1][y2]).sum();
            residual = residual.max((lhs - p2.get(x, y2)).abs());
        }
    }
    let degraded = residual <= DEGRADATION_TOL;
    Ok(Degradation {
        degraded,
        garble: degraded.then_some(garble),
        max_residual: Some(residual),
    })
}

/// `I(X; Y)` for input law `p` through `w`.
fn mutual_information(p: &[f64], w: &StochasticMatrix) -> f64 {
    let mut out = vec![0.0; w.cols()];
    let mut cond = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px > 0.0 {
            for (o, &v) in out.iter_mut().zip(w.row(x)) {
                *o += px * v;
            }
            cond += px * entropy_of(w.row(x));
        }
    }
    entropy_of(&out) - cond
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoreCapableOrder {
    /// Receivers from strongest to weakest, when a consistent order exists.
    pub order: Option<Vec<usize>>,
    /// Minimum over the grid of `I(X; Y_a) - I(X; Y_b)` for each consecutive
    /// pair `(a, b)` of the order.
    pub min_margins: Vec<f64>,
    /// Grid points where each consecutive margin lies in `[-GAP_TOL, 0]`.
    pub ties: Vec<usize>,
    /// `pairwise[a][b]`: minimum of `I(X; Y_a) - I(X; Y_b)` over the grid.
    pub pairwise: Vec<Vec<f64>>,
    pub n_points: usize,
}

/// Search for a total more-capable order of the receivers on the input grid.
pub fn bc_more_capable_order(
    bc: &DiscreteBroadcastChannel,
    grid: &GridSpec,
) -> Result<MoreCapableOrder, VerifierError> {
    if grid.resolution < 2 {
        return Err(VerifierError::BadResolution(grid.resolution));
    }
    let projected = composition_count(grid.resolution, bc.x_size());
    if projected > grid.max_points as f64 {
        return Err(VerifierError::GridOverflow {
            projected,
            cap: grid.max_points,
        });
    }
    let k = bc.receivers();
    let mut pairwise = vec![vec![f64::INFINITY; k]; k];
    let mut tie_counts = vec![vec![0usize; k]; k];
    let mut n_points = 0;
    for counts in Compositions::new(grid.resolution, bc.x_size()) {
        let p = to_probs(&counts, grid.resolution);
        let mi: Vec<f64> = bc.marginals().iter().map(|w| mutual_information(&p, w)).collect();
        for a in 0..k {
            for b in 0..k {
                let d = mi[a] - mi[b];
                pairwise[a][b] = pairwise[a][b].min(d);
                if (-GAP_TOL..=0.0).contains(&d) {
                    tie_counts[a][b] += 1;
                }
            }
        }
        n_points += 1;
    }
    (0..k).for_each(|a| pairwise[a][a] = 0.0);

    let mut remaining: Vec<usize> = (0..k).collect();
    let mut order = Vec::with_capacity(k);
    while !remaining.is_empty() {
        let top = remaining
            .iter()
            .copied()
            .find(|&a| remaining.iter().all(|&b| pairwise[a][b] >= -GAP_TOL));
        match top {
            Some(a) => {
                order.push(a);
                remaining.retain(|&b| b != a);
            }
            None => break,
        }
    }
    let consistent = order.len() == k;
    let (min_margins, ties) = if consistent {
        order
            .windows(2)
            .map(|w| (pairwise[w[0]][w[1]], tie_counts[w[0]][w[1]]))
            .unzip()
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(MoreCapableOrder {
        order: consistent.then_some(order),
        min_margins,
        ties,
        pairwise,
        n_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Capacity {
    pub capacity: f64,
    pub argmax: DiscretePMF,
    pub iterations: usize,
}

/// `max_{P_X} I(X; Y_strongest)` by the alternating-maximization capacity
/// iteration, started from the uniform law.
pub fn bc_sum_capacity(bc: &DiscreteBroadcastChannel, strongest: usize) -> Result<Capacity, VerifierError> {
    if strongest >= bc.receivers() {
        return Err(VerifierError::ReceiverOutOfRange {
            receiver: strongest,
            receivers: bc.receivers(),
        });
    }
    let w = bc.marginal(strongest);
    let nx = w.rows();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut previous = f64::NEG_INFINITY;
    for iteration in 1..=BA_MAX_ITERATIONS {
        let mut q = vec![0.0; w.cols()];
        for (x, &px) in p.iter().enumerate() {
            for (o, &v) in q.iter_mut().zip(w.row(x)) {
                *o += px * v;
            }
        }
        let divergence: Vec<f64> = (0..nx)
            .map(|x| {
                w.row(x)
                    .iter()
                    .zip(&q)
                    .filter(|(v, _)| **v > 0.0)
                    .map(|(v, qy)| v * (v / qy).log2())
                    .sum()
            })
            .collect();
        let estimate: f64 = p.iter().zip(&divergence).map(|(a, b)| a * b).sum();
        if estimate < previous - MONOTONE_SLACK {
            return Err(VerifierError::NonMonotone {
                previous,
                current: estimate,
            });
        }
        if (estimate - previous).abs() < BA_TOL {
            return Ok(Capacity {
                capacity: estimate,
                argmax: DiscretePMF::with_tolerance(p, 1e-9)?,
                iterations: iteration,
            });
        }
        previous = estimate;
        let weights: Vec<f64> = p.iter().zip(&divergence).map(|(px, d)| px * d.exp2()).collect();
        let total: f64 = weights.iter().sum();
        p = weights.iter().map(|v| v / total).collect();
    }
    Err(VerifierError::NonConvergence {
        iterations: BA_MAX_ITERATIONS,
        estimate: previous,
        law: p,
    })
}
