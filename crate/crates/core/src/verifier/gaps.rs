//! Gap searches over grids and sampled laws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{dirichlet, Factor, GapResult, GridSpec, Law, Mode, SampleSpec, VerifierError};
use crate::measures::{cmi_cuy, entropy_of};
use crate::model::{DiscreteTwoOutputChannel, StochasticMatrix};

const CHUNK: usize = 512;

/// `P(y1, y2 | x) = base(y2 | x) * garble(y1 | y2)`, so `Y1` is a garbling
/// of `Y2` under every input law.
pub fn make_degraded_channel(
    input_alphabets: Vec<usize>,
    mu1: usize,
    base: &StochasticMatrix,
    garble: &StochasticMatrix,
) -> Result<DiscreteTwoOutputChannel, VerifierError> {
    let tuples: usize = input_alphabets.iter().product();
    if base.rows() != tuples {
        return Err(VerifierError::DimensionMismatch(format!(
            "base has {} rows but the inputs form {tuples} tuples",
            base.rows()
        )));
    }
    if garble.rows() != base.cols() {
        return Err(VerifierError::DimensionMismatch(format!(
            "garble has {} rows but base has {} outputs",
            garble.rows(),
            base.cols()
        )));
    }
    let (ny1, ny2) = (garble.cols(), base.cols());
    let mut transitions = vec![0.0; tuples * ny1 * ny2];
    for x in 0..tuples {
        for y1 in 0..ny1 {
            for y2 in 0..ny2 {
                transitions[(x * ny1 + y1) * ny2 + y2] = base.get(x, y2) * garble.get(y2, y1);
            }
        }
    }
    Ok(DiscreteTwoOutputChannel::with_tolerance(
        input_alphabets,
        mu1,
        ny1,
        ny2,
        transitions,
        1e-9,
    )?)
}

fn input_names(ch: &DiscreteTwoOutputChannel, suffix: &str) -> Vec<String> {
    (1..=ch.input_alphabets().len()).map(|i| format!("X{i}{suffix}")).collect()
}

/// Number of points of the resolution-`m` grid on the `n`-simplex.
pub(super) fn composition_count(m: usize, n: usize) -> f64 {
    // C(m + n - 1, n - 1) computed in floating point to saturate gracefully
    let r = (n - 1).min(m);
    (0..r).fold(1.0, |acc, i| acc * (m + n - 1 - i) as f64 / (i + 1) as f64).round()
}

/// Lexicographic enumeration of `n`-part compositions of `m`.
pub(super) struct Compositions {
    next: Option<Vec<usize>>,
}

impl Compositions {
    pub(super) fn new(m: usize, n: usize) -> Self {
        let mut first = vec![0; n];
        first[n - 1] = m;
        Self { next: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let n = current.len();
        let mut succ = current.clone();
        let pivot = (0..n - 1).rev().find(|&i| succ[i + 1..].iter().any(|&v| v > 0));
        if let Some(i) = pivot {
            let rest: usize = succ[i + 1..].iter().sum();
            succ[i] += 1;
            succ[i + 1..].iter_mut().for_each(|v| *v = 0);
            succ[n - 1] = rest - 1;
            self.next = Some(succ);
        }
        Some(current)
    }
}

pub(super) fn to_probs(counts: &[usize], m: usize) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / m as f64).collect()
}

/// Per-output tables for the product-family kernel.
struct ProductKernel<'a> {
    ch: &'a DiscreteTwoOutputChannel,
    n_cond: usize,
    /// `H(Y_k | tuple)` for `k = 1, 2`.
    row_entropy: [Vec<f64>; 2],
}

impl<'a> ProductKernel<'a> {
    fn new(ch: &'a DiscreteTwoOutputChannel) -> Self {
        let n = ch.n_tuples();
        Self {
            ch,
            n_cond: ch.conditioning_size(),
            row_entropy: [
                (0..n).map(|t| entropy_of(ch.y1_given(t))).collect(),
                (0..n).map(|t| entropy_of(ch.y2_given(t))).collect(),
            ],
        }
    }

    /// `g_2(c) - g_1(c)`, with `g_k(c) = I(X_A; Y_k | X_C = c)` under the
    /// joint-block law `p_joint`.
    fn delta(&self, p_joint: &[f64]) -> Vec<f64> {
        let support: Vec<(usize, f64)> = p_joint
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(a, p)| (a, *p))
            .collect();
        let mut mix1 = vec![0.0; self.ch.y1_size()];
        let mut mix2 = vec![0.0; self.ch.y2_size()];
        (0..self.n_cond)
            .map(|c| {
                mix1.iter_mut().for_each(|v| *v = 0.0);
                mix2.iter_mut().for_each(|v| *v = 0.0);
                let mut cond1 = 0.0;
                let mut cond2 = 0.0;
                for &(a, p) in &support {
                    let t = a * self.n_cond + c;
                    for (m, w) in mix1.iter_mut().zip(self.ch.y1_given(t)) {
                        *m += p * w;
                    }
                    for (m, w) in mix2.iter_mut().zip(self.ch.y2_given(t)) {
                        *m += p * w;
                    }
                    cond1 += p * self.row_entropy[0][t];
                    cond2 += p * self.row_entropy[1][t];
                }
                (entropy_of(&mix2) - cond2) - (entropy_of(&mix1) - cond1)
            })
            .collect()
    }
}

/// Product weights `prod_j p_j(x_j)` over the flattened conditioning block.
fn conditioning_weights(ch: &DiscreteTwoOutputChannel, marginals: &[Vec<f64>]) -> Vec<f64> {
    let alphabets = &ch.input_alphabets()[ch.mu1()..];
    let mut w = vec![1.0];
    for (j, &n) in alphabets.iter().enumerate() {
        w = w
            .iter()
            .flat_map(|&acc| (0..n).map(move |x| (acc, x)))
            .map(|(acc, x)| acc * marginals[j][x])
            .collect();
    }
    w
}

fn check_product_law(
    ch: &DiscreteTwoOutputChannel,
    joint: &[f64],
    conditioning: &[Vec<f64>],
) -> Result<(), VerifierError> {
    let alphabets = &ch.input_alphabets()[ch.mu1()..];
    if joint.len() != ch.joint_block_size()
        || conditioning.len() != alphabets.len()
        || conditioning.iter().zip(alphabets).any(|(p, &n)| p.len() != n)
    {
        return Err(VerifierError::DimensionMismatch(
            "product law does not match the channel's input alphabets".into(),
        ));
    }
    Ok(())
}

/// `I(X_A; Y2 | X_C) - I(X_A; Y1 | X_C)` under the product law
/// `P_{X_A} * prod_j P_{X_j}`.
pub fn product_gap_at(
    ch: &DiscreteTwoOutputChannel,
    joint: &[f64],
    conditioning: &[Vec<f64>],
) -> Result<f64, VerifierError> {
    check_product_law(ch, joint, conditioning)?;
    let delta = ProductKernel::new(ch).delta(joint);
    let w = conditioning_weights(ch, conditioning);
    Ok(w.iter().zip(&delta).map(|(a, b)| a * b).sum())
}

fn product_law(ch: &DiscreteTwoOutputChannel, joint: Vec<f64>, conditioning: Vec<Vec<f64>>) -> Law {
    let names = input_names(ch, "");
    let mu1 = ch.mu1();
    let mut factors = vec![Factor {
        variables: names[..mu1].to_vec(),
        sizes: ch.input_alphabets()[..mu1].to_vec(),
        probs: joint,
    }];
    for (j, p) in conditioning.into_iter().enumerate() {
        factors.push(Factor {
            variables: vec![names[mu1 + j].clone()],
            sizes: vec![ch.input_alphabets()[mu1 + j]],
            probs: p,
        });
    }
    Law { factors }
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draw `index` of a sample sequence: index 0 is the uniform law.
fn draw(dim: usize, spec: &SampleSpec, index: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if index == 0 {
        vec![1.0 / dim as f64; dim]
    } else {
        dirichlet(dim, spec.dirichlet_concentration, rng)
    }
}

/// First index of the smallest gap.
fn argmin(gaps: &[f64]) -> usize {
    gaps.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
}

/// Minimum of `I(X_A; Y2 | X_C) - I(X_A; Y1 | X_C)` over the grid of product
/// laws: the joint block on its simplex and each conditioning input on its
/// own simplex, all at resolution `grid.resolution`.
pub fn grid_min_gap(ch: &DiscreteTwoOutputChannel, grid: &GridSpec) -> Result<GapResult, VerifierError> {
    if grid.resolution < 2 {
        return Err(VerifierError::BadResolution(grid.resolution));
    }
    let m = grid.resolution;
    let cond_alphabets = ch.input_alphabets()[ch.mu1()..].to_vec();
    let n_joint_points = composition_count(m, ch.joint_block_size());
    let projected = cond_alphabets
        .iter()
        .fold(n_joint_points, |acc, &n| acc * composition_count(m, n));
    if projected > grid.max_points as f64 {
        return match &grid.fallback {
            Some(spec) => sampled_product_gap(ch, spec),
            None => Err(VerifierError::GridOverflow {
                projected,
                cap: grid.max_points,
            }),
        };
    }

    // every combination of conditioning marginals, flattened to weights
    let per_var: Vec<Vec<Vec<f64>>> = cond_alphabets
        .iter()
        .map(|&n| Compositions::new(m, n).map(|c| to_probs(&c, m)).collect())
        .collect();
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for options in &per_var {
        combos = combos
            .iter()
            .flat_map(|prefix| {
                (0..options.len()).map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    let marginals_of = |combo: &[usize]| -> Vec<Vec<f64>> {
        combo.iter().enumerate().map(|(j, &o)| per_var[j][o].clone()).collect()
    };
    let weights: Vec<Vec<f64>> = combos.iter().map(|c| conditioning_weights(ch, &marginals_of(c))).collect();

    let kernel = ProductKernel::new(ch);
    let n_w = weights.len();
    let mut best: (f64, usize) = (f64::INFINITY, 0);
    let mut best_joint: Vec<usize> = Vec::new();
    let mut iter = Compositions::new(m, ch.joint_block_size()).enumerate().peekable();
    while iter.peek().is_some() {
        let chunk: Vec<(usize, Vec<usize>)> = iter.by_ref().take(CHUNK).collect();
        let local = chunk
            .par_iter()
            .map(|(j, counts)| {
                let delta = kernel.delta(&to_probs(counts, m));
                let mut b = (f64::INFINITY, 0);
                for (wi, w) in weights.iter().enumerate() {
                    let g: f64 = w.iter().zip(&delta).map(|(a, d)| a * d).sum();
                    if g < b.0 {
                        b = (g, j * n_w + wi);
                    }
                }
                b
            })
            .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        if local.0 < best.0 || (local.0 == best.0 && local.1 < best.1) {
            best = local;
            best_joint = chunk[(local.1 / n_w) - chunk[0].0].1.clone();
        }
    }
    let argmin_law = product_law(ch, to_probs(&best_joint, m), marginals_of(&combos[best.1 % n_w]));
    Ok(GapResult {
        mode: Mode::Grid,
        n_evaluated: projected as usize,
        min_gap: best.0,
        argmin_index: best.1,
        argmin_law,
        gaps: None,
    })
}

fn sampled_product_gap(ch: &DiscreteTwoOutputChannel, spec: &SampleSpec) -> Result<GapResult, VerifierError> {
    let cond_alphabets = ch.input_alphabets()[ch.mu1()..].to_vec();
    let n_joint = ch.joint_block_size();
    let kernel = ProductKernel::new(ch);
    let draw_law = |i: usize| {
        let mut rng = sample_rng(spec.seed, i);
        let joint = draw(n_joint, spec, i, &mut rng);
        let cond: Vec<Vec<f64>> = cond_alphabets.iter().map(|&n| draw(n, spec, i, &mut rng)).collect();
        (joint, cond)
    };
    let gaps: Vec<f64> = (0..=spec.n_samples)
        .into_par_iter()
        .map(|i| {
            let (joint, cond) = draw_law(i);
            let delta = kernel.delta(&joint);
            let w = conditioning_weights(ch, &cond);
            w.iter().zip(&delta).map(|(a, b)| a * b).sum()
        })
        .collect();
    let best = argmin(&gaps);
    let (joint, cond) = draw_law(best);
    Ok(GapResult {
        mode: Mode::Sampled,
        n_evaluated: gaps.len(),
        min_gap: gaps[best],
        argmin_index: best,
        argmin_law: product_law(ch, joint, cond),
        gaps: Some(gaps),
    })
}

/// Accumulates `p_k(c, u, y)` tables for both outputs and returns
/// `I(U; Y2 | C) - I(U; Y1 | C)`.
fn cell_gap(
    ch: &DiscreteTwoOutputChannel,
    nc: usize,
    nu: usize,
    cells: impl Iterator<Item = (usize, usize, usize, f64)>,
) -> f64 {
    let (ny1, ny2) = (ch.y1_size(), ch.y2_size());
    let mut p1 = vec![0.0; nc * nu * ny1];
    let mut p2 = vec![0.0; nc * nu * ny2];
    for (c, u, tuple, mass) in cells {
        if mass == 0.0 {
            continue;
        }
        let base1 = (c * nu + u) * ny1;
        for (slot, w) in p1[base1..base1 + ny1].iter_mut().zip(ch.y1_given(tuple)) {
            *slot += mass * w;
        }
        let base2 = (c * nu + u) * ny2;
        for (slot, w) in p2[base2..base2 + ny2].iter_mut().zip(ch.y2_given(tuple)) {
            *slot += mass * w;
        }
    }
    cmi_cuy(&p2, nc, nu, ny2) - cmi_cuy(&p1, nc, nu, ny1)
}

/// For each input tuple, its index in the `U` block (joint inputs outside
/// `moved`) and in the context block (`moved` inputs, then the conditioning
/// inputs).
struct Split {
    nu: usize,
    n_context: usize,
    per_tuple: Vec<(usize, usize)>,
}

fn split(ch: &DiscreteTwoOutputChannel, moved: &[usize]) -> Result<Split, VerifierError> {
    let mu1 = ch.mu1();
    let alphabets = ch.input_alphabets();
    if let Some(&bad) = moved.iter().find(|&&i| i >= mu1) {
        return Err(VerifierError::NotInJointBlock(bad));
    }
    let u_vars: Vec<usize> = (0..mu1).filter(|i| !moved.contains(i)).collect();
    let mut ctx_vars: Vec<usize> = (0..mu1).filter(|i| moved.contains(i)).collect();
    ctx_vars.extend(mu1..alphabets.len());
    let index = |vars: &[usize], digits: &[usize]| vars.iter().fold(0, |acc, &v| acc * alphabets[v] + digits[v]);
    let per_tuple = (0..ch.n_tuples())
        .map(|t| {
            let digits = ch.decode_tuple(t);
            (index(&u_vars, &digits), index(&ctx_vars, &digits))
        })
        .collect();
    Ok(Split {
        nu: u_vars.iter().map(|&v| alphabets[v]).product(),
        n_context: ctx_vars.iter().map(|&v| alphabets[v]).product(),
        per_tuple,
    })
}

fn context_gap(ch: &DiscreteTwoOutputChannel, s: &Split, d_size: usize, law: &[f64]) -> f64 {
    let nt = ch.n_tuples();
    let cells = (0..d_size).flat_map(|d| {
        (0..nt).map(move |t| {
            let (u, cx) = s.per_tuple[t];
            (d * s.n_context + cx, u, t, law[d * nt + t])
        })
    });
    cell_gap(ch, d_size * s.n_context, s.nu, cells)
}

fn check_law(len: usize, expected: usize) -> Result<(), VerifierError> {
    if len != expected {
        return Err(VerifierError::DimensionMismatch(format!(
            "law has {len} entries, expected {expected}"
        )));
    }
    Ok(())
}

fn check_size(value: usize, name: &'static str) -> Result<(), VerifierError> {
    if value == 0 {
        return Err(VerifierError::EmptyAlphabet { name });
    }
    Ok(())
}

/// `I(X_A; Y2 | X_C, D) - I(X_A; Y1 | X_C, D)` for a joint law `p(d, x)`
/// flattened as `[d][tuple]`.
pub fn lemma1_gap_at(ch: &DiscreteTwoOutputChannel, d_size: usize, law: &[f64]) -> Result<f64, VerifierError> {
    corollary1_gap_at(ch, &[], d_size, law)
}

/// The Lemma-1 gap with the joint inputs `moved` (0-based, all within the
/// joint block) shifted into the conditioning set next to `D`.
pub fn corollary1_gap_at(
    ch: &DiscreteTwoOutputChannel,
    moved: &[usize],
    d_size: usize,
    law: &[f64],
) -> Result<f64, VerifierError> {
    check_size(d_size, "d_size")?;
    check_law(law.len(), d_size * ch.n_tuples())?;
    let s = split(ch, moved)?;
    Ok(context_gap(ch, &s, d_size, law))
}

/// `I(U; Y2 | X_C, D) - I(U; Y1 | X_C, D)` for a joint law `p(d, u, x)`
/// flattened as `[d][u][tuple]`.
pub fn lemma4_gap_at(
    ch: &DiscreteTwoOutputChannel,
    u_size: usize,
    d_size: usize,
    law: &[f64],
) -> Result<f64, VerifierError> {
    check_size(u_size, "u_size")?;
    check_size(d_size, "d_size")?;
    let nt = ch.n_tuples();
    check_law(law.len(), d_size * u_size * nt)?;
    let n_cond = ch.conditioning_size();
    let cells = (0..d_size).flat_map(|d| {
        (0..u_size).flat_map(move |u| {
            (0..nt).map(move |t| (d * n_cond + t % n_cond, u, t, law[(d * u_size + u) * nt + t]))
        })
    });
    Ok(cell_gap(ch, d_size * n_cond, u_size, cells))
}

fn sampled(
    dim: usize,
    spec: &SampleSpec,
    eval: impl Fn(&[f64]) -> f64 + Sync,
    describe: impl Fn(Vec<f64>) -> Law,
) -> GapResult {
    let law_at = |i: usize| draw(dim, spec, i, &mut sample_rng(spec.seed, i));
    let gaps: Vec<f64> = (0..=spec.n_samples).into_par_iter().map(|i| eval(&law_at(i))).collect();
    let best = argmin(&gaps);
    GapResult {
        mode: Mode::Sampled,
        n_evaluated: gaps.len(),
        min_gap: gaps[best],
        argmin_index: best,
        argmin_law: describe(law_at(best)),
        gaps: Some(gaps),
    }
}

fn joint_law(variables: Vec<String>, sizes: Vec<usize>, probs: Vec<f64>) -> Law {
    Law {
        factors: vec![Factor {
            variables,
            sizes,
            probs,
        }],
    }
}

fn d_law(ch: &DiscreteTwoOutputChannel, d_size: usize, suffix: &str, probs: Vec<f64>) -> Law {
    let mut variables = vec!["D".to_string()];
    variables.extend(input_names(ch, suffix));
    let mut sizes = vec![d_size];
    sizes.extend_from_slice(ch.input_alphabets());
    joint_law(variables, sizes, probs)
}

/// Minimum Lemma-1 gap over seeded Dirichlet laws `p(d, x)`; sample 0 is the
/// uniform law.
pub fn sample_lemma1_gap(
    ch: &DiscreteTwoOutputChannel,
    d_size: usize,
    spec: &SampleSpec,
) -> Result<GapResult, VerifierError> {
    corollary1_gap(ch, &[], d_size, spec)
}

/// Minimum Corollary-1 gap over seeded Dirichlet laws `p(d, x)`.
pub fn corollary1_gap(
    ch: &DiscreteTwoOutputChannel,
    moved: &[usize],
    d_size: usize,
    spec: &SampleSpec,
) -> Result<GapResult, VerifierError> {
    check_size(d_size, "d_size")?;
    let s = split(ch, moved)?;
    Ok(sampled(
        d_size * ch.n_tuples(),
        spec,
        |law| context_gap(ch, &s, d_size, law),
        |law| d_law(ch, d_size, "", law),
    ))
}

/// Minimum Lemma-4 gap over seeded Dirichlet laws `p(d, u, x)`.
pub fn sample_lemma4_gap(
    ch: &DiscreteTwoOutputChannel,
    u_size: usize,
    d_size: usize,
    spec: &SampleSpec,
) -> Result<GapResult, VerifierError> {
    check_size(u_size, "u_size")?;
    check_size(d_size, "d_size")?;
    let describe = |law: Vec<f64>| {
        let mut variables = vec!["D".to_string(), "U".to_string()];
        variables.extend(input_names(ch, ""));
        let mut sizes = vec![d_size, u_size];
        sizes.extend_from_slice(ch.input_alphabets());
        joint_law(variables, sizes, law)
    };
    Ok(sampled(
        d_size * u_size * ch.n_tuples(),
        spec,
        |law| lemma4_gap_at(ch, u_size, d_size, law).expect("law shape fixed by the sampler"),
        describe,
    ))
}

/// Index in the two-letter extension of the input pair `(t1, t2)`.
pub fn pair_tuple(ch: &DiscreteTwoOutputChannel, t1: usize, t2: usize) -> usize {
    let (d1, d2) = (ch.decode_tuple(t1), ch.decode_tuple(t2));
    ch.input_alphabets()
        .iter()
        .zip(d1.iter().zip(&d2))
        .fold(0, |acc, (&n, (&a, &b))| acc * n * n + a * n + b)
}

/// Two-letter memoryless extension: input `i` takes values in pairs
/// `(x_{i,1}, x_{i,2})` and each output in pairs `(y_{k,1}, y_{k,2})`.
pub fn memoryless_extension_n2(ch: &DiscreteTwoOutputChannel) -> Result<DiscreteTwoOutputChannel, VerifierError> {
    let alphabets: Vec<usize> = ch.input_alphabets().iter().map(|n| n * n).collect();
    let tuples: usize = alphabets.iter().product();
    if tuples > crate::model::MAX_INPUT_TUPLES {
        return Err(VerifierError::DimensionMismatch(format!(
            "two-letter extension has {tuples} input tuples, above the cap of {}",
            crate::model::MAX_INPUT_TUPLES
        )));
    }
    let (ny1, ny2) = (ch.y1_size(), ch.y2_size());
    let (ey1, ey2) = (ny1 * ny1, ny2 * ny2);
    let nt = ch.n_tuples();
    let mut transitions = vec![0.0; tuples * ey1 * ey2];
    for t1 in 0..nt {
        for t2 in 0..nt {
            let e = pair_tuple(ch, t1, t2);
            for y1a in 0..ny1 {
                for y2a in 0..ny2 {
                    let pa = ch.prob(t1, y1a, y2a);
                    if pa == 0.0 {
                        continue;
                    }
                    for y1b in 0..ny1 {
                        for y2b in 0..ny2 {
                            let y1 = y1a * ny1 + y1b;
                            let y2 = y2a * ny2 + y2b;
                            transitions[(e * ey1 + y1) * ey2 + y2] = pa * ch.prob(t2, y1b, y2b);
                        }
                    }
                }
            }
        }
    }
    Ok(DiscreteTwoOutputChannel::extension_unchecked_alphabet(
        alphabets,
        ch.mu1(),
        ey1,
        ey2,
        transitions,
    )?)
}

/// Minimum two-letter Lemma-1 gap over seeded Dirichlet laws on
/// `(D, X^2)`, with arbitrary correlation across the two letters.
pub fn sample_lemma3_gap_n2(
    ch: &DiscreteTwoOutputChannel,
    d_size: usize,
    spec: &SampleSpec,
) -> Result<GapResult, VerifierError> {
    check_size(d_size, "d_size")?;
    let ext = memoryless_extension_n2(ch)?;
    let s = split(&ext, &[])?;
    Ok(sampled(
        d_size * ext.n_tuples(),
        spec,
        |law| context_gap(&ext, &s, d_size, law),
        |law| d_law(&ext, d_size, "^2", law),
    ))
}
