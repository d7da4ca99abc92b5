//! Channel and distribution types shared by every other module.
//!
//! All types are immutable once built. Constructors run the same checks as
//! [`Validate::validate`] and refuse to build an object whose report is not
//! empty, so a live value always satisfies its invariants.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalization tolerance for distributions built inside the crate.
pub const PMF_TOL: f64 = 1e-12;
/// Normalization tolerance for distributions read from user files.
pub const FILE_PMF_TOL: f64 = 1e-9;
/// Largest alphabet allowed for a single discrete variable.
pub const MAX_ALPHABET: usize = 8;
/// Largest number of input tuples allowed in a discrete channel.
pub const MAX_INPUT_TUPLES: usize = 4096;
/// Largest user count representable by [`UserSet`].
pub const MAX_USERS: usize = 16;

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Diagnostics for a model object. Empty means valid.
pub trait Validate {
    fn validate(&self) -> Vec<Violation>;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid {kind}: {}", join_violations(.violations))]
    Invalid {
        kind: &'static str,
        violations: Vec<Violation>,
    },
    #[error("channel spec: {0}")]
    Parse(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn check(kind: &'static str, violations: Vec<Violation>) -> Result<(), ModelError> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ModelError::Invalid { kind, violations })
    }
}

/// A set of user indices (0-based internally, printed 1-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UserSet(u32);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn from_bits(bits: u32) -> Self {
        UserSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// All users `0..k`.
    pub fn full(k: usize) -> Self {
        assert!(k <= MAX_USERS, "user count {k} exceeds {MAX_USERS}");
        UserSet(((1u64 << k) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_USERS);
        UserSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items
            .into_iter()
            .fold(UserSet::EMPTY, |s, i| s.with(i))
    }

    /// Build from 1-based labels as they appear in reports.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        Self::from_indices(labels.into_iter().map(|l| l - 1))
    }

    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_USERS);
        UserSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        UserSet(self.0 & !(1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_USERS && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: UserSet) -> Self {
        UserSet(self.0 | other.0)
    }

    pub fn intersection(self, other: UserSet) -> Self {
        UserSet(self.0 & other.0)
    }

    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_USERS).filter(move |&i| self.contains(i))
    }

    pub fn labels(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Image under `i -> map(i)`.
    pub fn map(self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_indices(self.iter().map(map))
    }

    /// Every nonempty subset of `0..k`, ordered by bitmask.
    pub fn nonempty_subsets(k: usize) -> impl Iterator<Item = UserSet> {
        let full = UserSet::full(k).0;
        (1..=full).map(UserSet)
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serializes as the sorted list of 1-based labels.
impl Serialize for UserSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Standard-form K-user Gaussian interference channel.
///
/// `gains[j][i]` is the gain from transmitter `i` to receiver `j`. Direct
/// gains are exactly 1 and every receiver sees unit-variance noise, which is
/// implied and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianIC {
    gains: Vec<Vec<f64>>,
    powers: Vec<f64>,
}

impl GaussianIC {
    pub fn new(gains: Vec<Vec<f64>>, powers: Vec<f64>) -> Result<Self, ModelError> {
        check("GaussianIC", gaussian_violations(&gains, &powers))?;
        Ok(Self { gains, powers })
    }

    /// Unit powers.
    pub fn with_unit_powers(gains: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let k = gains.len();
        Self::new(gains, vec![1.0; k])
    }

    /// Rescale `Y_j = sum_i h[j][i] X_i + N(0, noise[j])`, `E X_i^2 <= P_i`
    /// into standard form.
    ///
    /// Output `j` is divided by `sqrt(noise[j])` and input `i` absorbs
    /// `h[i][i] / sqrt(noise[i])`, giving
    /// `a[j][i] = h[j][i] sqrt(noise[i]) / (h[i][i] sqrt(noise[j]))` and
    /// `P'_i = h[i][i]^2 P_i / noise[i]`.
    pub fn standardize(
        raw_gains: &[Vec<f64>],
        noise_vars: &[f64],
        powers: &[f64],
    ) -> Result<Self, ModelError> {
        let k = raw_gains.len();
        let mut v = Vec::new();
        if noise_vars.len() != k {
            v.push(Violation::new("noise", format!("expected {k} entries")));
        }
        if powers.len() != k {
            v.push(Violation::new("powers", format!("expected {k} entries")));
        }
        for (j, row) in raw_gains.iter().enumerate() {
            if row.len() != k {
                v.push(Violation::new(format!("gains[{j}]"), "row length differs from K"));
            } else if row[j] == 0.0 || !row[j].is_finite() {
                v.push(Violation::new(format!("gains[{j}][{j}]"), "direct gain must be finite and nonzero"));
            }
        }
        for (j, n) in noise_vars.iter().enumerate() {
            if !(n.is_finite() && *n > 0.0) {
                v.push(Violation::new(format!("noise[{j}]"), "must be positive and finite"));
            }
        }
        check("Gaussian description", v)?;
        let gains = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| {
                        if i == j {
                            1.0
                        } else {
                            raw_gains[j][i] * noise_vars[i].sqrt()
                                / (raw_gains[i][i] * noise_vars[j].sqrt())
                        }
                    })
                    .collect()
            })
            .collect();
        let scaled = (0..k)
            .map(|i| raw_gains[i][i].powi(2) * powers[i] / noise_vars[i])
            .collect();
        Self::new(gains, scaled)
    }

    pub fn k(&self) -> usize {
        self.powers.len()
    }

    /// Gain from transmitter `i` at receiver `j`.
    pub fn gain(&self, receiver: usize, transmitter: usize) -> f64 {
        self.gains[receiver][transmitter]
    }

    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gains
    }

    pub fn power(&self, i: usize) -> f64 {
        self.powers[i]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Same gains with every power scaled by `factor`.
    pub fn scale_powers(&self, factor: f64) -> Result<Self, ModelError> {
        Self::new(
            self.gains.clone(),
            self.powers.iter().map(|p| p * factor).collect(),
        )
    }
}

impl Validate for GaussianIC {
    fn validate(&self) -> Vec<Violation> {
        gaussian_violations(&self.gains, &self.powers)
    }
}

fn gaussian_violations(gains: &[Vec<f64>], powers: &[f64]) -> Vec<Violation> {
    let mut v = Vec::new();
    let k = gains.len();
    if k < 2 {
        v.push(Violation::new("K", format!("user count {k} < 2")));
    }
    if k > MAX_USERS {
        v.push(Violation::new("K", format!("user count {k} > {MAX_USERS}")));
    }
    for (j, row) in gains.iter().enumerate() {
        if row.len() != k {
            v.push(Violation::new(
                format!("gains[{j}]"),
                format!("row has {} entries, expected {k}", row.len()),
            ));
            continue;
        }
        for (i, &g) in row.iter().enumerate() {
            if !g.is_finite() {
                v.push(Violation::new(format!("gains[{j}][{i}]"), "not finite"));
            }
        }
        if row[j] != 1.0 {
            v.push(Violation::new(
                format!("gains[{j}][{j}]"),
                format!("diagonal not 1 (got {})", row[j]),
            ));
        }
    }
    if powers.len() != k {
        v.push(Violation::new(
            "powers",
            format!("has {} entries, expected {k}", powers.len()),
        ));
    }
    for (i, &p) in powers.iter().enumerate() {
        if !(p.is_finite() && p > 0.0) {
            v.push(Violation::new(
                format!("powers[{i}]"),
                format!("must be strictly positive and finite (got {p})"),
            ));
        }
    }
    v
}

/// Two outputs driven by the same real inputs:
/// `Y1 = sum a_i X_i + Z1`, `Y2 = sum b_i X_i + Z2`.
///
/// The first `mu1` inputs form the jointly distributed block, the last `mu2`
/// are the conditioning inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoOutputSystem {
    mu1: usize,
    mu2: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TwoOutputSystem {
    pub fn new(mu1: usize, mu2: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self, ModelError> {
        check("TwoOutputSystem", two_output_violations(mu1, mu2, &a, &b))?;
        Ok(Self { mu1, mu2, a, b })
    }

    pub fn mu1(&self) -> usize {
        self.mu1
    }

    pub fn mu2(&self) -> usize {
        self.mu2
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl Validate for TwoOutputSystem {
    fn validate(&self) -> Vec<Violation> {
        two_output_violations(self.mu1, self.mu2, &self.a, &self.b)
    }
}

fn two_output_violations(mu1: usize, mu2: usize, a: &[f64], b: &[f64]) -> Vec<Violation> {
    let mut v = Vec::new();
    if mu1 < 1 {
        v.push(Violation::new("mu1", "must be at least 1"));
    }
    let n = mu1 + mu2;
    for (name, coeffs) in [("a", a), ("b", b)] {
        if coeffs.len() != n {
            v.push(Violation::new(
                name,
                format!("has {} coefficients, expected mu1 + mu2 = {n}", coeffs.len()),
            ));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                v.push(Violation::new(format!("{name}[{i}]"), "not finite"));
            }
        }
    }
    v
}

/// Probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePMF {
    probs: Vec<f64>,
}

impl DiscretePMF {
    pub fn new(probs: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_tolerance(probs, PMF_TOL)
    }

    pub fn with_tolerance(probs: Vec<f64>, tol: f64) -> Result<Self, ModelError> {
        check("DiscretePMF", pmf_violations("probs", &probs, tol))?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl Validate for DiscretePMF {
    fn validate(&self) -> Vec<Violation> {
        pmf_violations("probs", &self.probs, PMF_TOL)
    }
}

pub(crate) fn pmf_violations(field: &str, probs: &[f64], tol: f64) -> Vec<Violation> {
    let mut v = Vec::new();
    if probs.is_empty() {
        v.push(Violation::new(field, "empty alphabet"));
        return v;
    }
    for (i, &p) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            v.push(Violation::new(format!("{field}[{i}]"), format!("{p} outside [0, 1]")));
        }
    }
    let sum: f64 = probs.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > tol {
        v.push(Violation::new(field, format!("sum {sum} ≠ 1")));
    }
    v
}

/// Dense row-stochastic matrix `W(col | row)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        Self::with_tolerance(rows, PMF_TOL)
    }

    pub fn with_tolerance(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self, ModelError> {
        check("StochasticMatrix", matrix_violations("rows", &rows, tol))?;
        let cols = rows[0].len();
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![1.0 - p, p, p, 1.0 - p],
        }
    }

    /// Binary erasure channel; outputs are `0`, erasure, `1`.
    pub fn bec(eps: f64) -> Self {
        Self {
            rows: 2,
            cols: 3,
            data: vec![1.0 - eps, eps, 0.0, 0.0, eps, 1.0 - eps],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Cascade `self` then `next`: `(self * next)(z | x) = sum_y self(y|x) next(z|y)`.
    pub fn then(&self, next: &StochasticMatrix) -> Option<StochasticMatrix> {
        if self.cols != next.rows {
            return None;
        }
        let mut data = vec![0.0; self.rows * next.cols];
        for r in 0..self.rows {
            for m in 0..self.cols {
                let w = self.get(r, m);
                if w == 0.0 {
                    continue;
                }
                for c in 0..next.cols {
                    data[r * next.cols + c] += w * next.get(m, c);
                }
            }
        }
        Some(StochasticMatrix {
            rows: self.rows,
            cols: next.cols,
            data,
        })
    }
}

impl Validate for StochasticMatrix {
    fn validate(&self) -> Vec<Violation> {
        matrix_violations("rows", &self.to_rows(), PMF_TOL)
    }
}

fn matrix_violations(field: &str, rows: &[Vec<f64>], tol: f64) -> Vec<Violation> {
    let mut v = Vec::new();
    if rows.is_empty() || rows[0].is_empty() {
        v.push(Violation::new(field, "empty matrix"));
        return v;
    }
    let cols = rows[0].len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != cols {
            v.push(Violation::new(format!("{field}[{r}]"), "ragged row"));
            continue;
        }
        v.extend(pmf_violations(&format!("{field}[{r}]"), row, tol));
    }
    v
}

/// Two-output discrete channel `P(y1, y2 | x_1, ..., x_{mu1+mu2})`.
///
/// Input tuples are flattened row-major over `input_alphabets`, so the joint
/// block `x_1..x_{mu1}` forms the most significant digits. The transition
/// array is laid out `[tuple][y1][y2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTwoOutputChannel {
    input_alphabets: Vec<usize>,
    mu1: usize,
    y1_size: usize,
    y2_size: usize,
    transitions: Vec<f64>,
    marginal_y1: Vec<f64>,
    marginal_y2: Vec<f64>,
}

impl DiscreteTwoOutputChannel {
    pub fn new(
        input_alphabets: Vec<usize>,
        mu1: usize,
        y1_size: usize,
        y2_size: usize,
        transitions: Vec<f64>,
    ) -> Result<Self, ModelError> {
        Self::with_tolerance(input_alphabets, mu1, y1_size, y2_size, transitions, PMF_TOL)
    }

    pub fn with_tolerance(
        input_alphabets: Vec<usize>,
        mu1: usize,
        y1_size: usize,
        y2_size: usize,
        transitions: Vec<f64>,
        tol: f64,
    ) -> Result<Self, ModelError> {
        let caps = SizeCaps {
            alphabet: MAX_ALPHABET,
            tuples: MAX_INPUT_TUPLES,
        };
        Self::build(input_alphabets, mu1, y1_size, y2_size, transitions, tol, caps)
    }

    /// Multi-letter extensions square every alphabet, so they are checked
    /// against the squared per-variable cap instead.
    pub(crate) fn extension_unchecked_alphabet(
        input_alphabets: Vec<usize>,
        mu1: usize,
        y1_size: usize,
        y2_size: usize,
        transitions: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let caps = SizeCaps {
            alphabet: MAX_ALPHABET * MAX_ALPHABET,
            tuples: MAX_INPUT_TUPLES,
        };
        Self::build(input_alphabets, mu1, y1_size, y2_size, transitions, 1e-10, caps)
    }

    fn build(
        input_alphabets: Vec<usize>,
        mu1: usize,
        y1_size: usize,
        y2_size: usize,
        transitions: Vec<f64>,
        tol: f64,
        caps: SizeCaps,
    ) -> Result<Self, ModelError> {
        check(
            "DiscreteTwoOutputChannel",
            channel_violations(&input_alphabets, mu1, y1_size, y2_size, &transitions, tol, caps),
        )?;
        let tuples: usize = input_alphabets.iter().product();
        let mut marginal_y1 = vec![0.0; tuples * y1_size];
        let mut marginal_y2 = vec![0.0; tuples * y2_size];
        for x in 0..tuples {
            for y1 in 0..y1_size {
                for y2 in 0..y2_size {
                    let p = transitions[(x * y1_size + y1) * y2_size + y2];
                    marginal_y1[x * y1_size + y1] += p;
                    marginal_y2[x * y2_size + y2] += p;
                }
            }
        }
        Ok(Self {
            input_alphabets,
            mu1,
            y1_size,
            y2_size,
            transitions,
            marginal_y1,
            marginal_y2,
        })
    }

    pub fn input_alphabets(&self) -> &[usize] {
        &self.input_alphabets
    }

    pub fn mu1(&self) -> usize {
        self.mu1
    }

    pub fn mu2(&self) -> usize {
        self.input_alphabets.len() - self.mu1
    }

    pub fn y1_size(&self) -> usize {
        self.y1_size
    }

    pub fn y2_size(&self) -> usize {
        self.y2_size
    }

    pub fn n_tuples(&self) -> usize {
        self.input_alphabets.iter().product()
    }

    /// Size of the flattened joint block `x_1..x_{mu1}`.
    pub fn joint_block_size(&self) -> usize {
        self.input_alphabets[..self.mu1].iter().product()
    }

    /// Size of the flattened conditioning block.
    pub fn conditioning_size(&self) -> usize {
        self.input_alphabets[self.mu1..].iter().product()
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    pub fn prob(&self, tuple: usize, y1: usize, y2: usize) -> f64 {
        self.transitions[(tuple * self.y1_size + y1) * self.y2_size + y2]
    }

    /// `P(y1 | tuple)`.
    pub fn y1_given(&self, tuple: usize) -> &[f64] {
        &self.marginal_y1[tuple * self.y1_size..(tuple + 1) * self.y1_size]
    }

    /// `P(y2 | tuple)`.
    pub fn y2_given(&self, tuple: usize) -> &[f64] {
        &self.marginal_y2[tuple * self.y2_size..(tuple + 1) * self.y2_size]
    }

    /// Digits of a flattened tuple.
    pub fn decode_tuple(&self, mut tuple: usize) -> Vec<usize> {
        let mut digits = vec![0; self.input_alphabets.len()];
        for (d, &n) in digits.iter_mut().zip(&self.input_alphabets).rev() {
            *d = tuple % n;
            tuple /= n;
        }
        digits
    }

    pub fn encode_tuple(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.input_alphabets)
            .fold(0, |acc, (&d, &n)| acc * n + d)
    }

    /// Same channel with `Y1` and `Y2` exchanged.
    pub fn swap_outputs(&self) -> Self {
        let tuples = self.n_tuples();
        let mut transitions = vec![0.0; self.transitions.len()];
        for x in 0..tuples {
            for y1 in 0..self.y1_size {
                for y2 in 0..self.y2_size {
                    transitions[(x * self.y2_size + y2) * self.y1_size + y1] = self.prob(x, y1, y2);
                }
            }
        }
        Self {
            input_alphabets: self.input_alphabets.clone(),
            mu1: self.mu1,
            y1_size: self.y2_size,
            y2_size: self.y1_size,
            transitions,
            marginal_y1: self.marginal_y2.clone(),
            marginal_y2: self.marginal_y1.clone(),
        }
    }
}

impl Validate for DiscreteTwoOutputChannel {
    fn validate(&self) -> Vec<Violation> {
        channel_violations(
            &self.input_alphabets,
            self.mu1,
            self.y1_size,
            self.y2_size,
            &self.transitions,
            1e-10,
            SizeCaps {
                alphabet: MAX_ALPHABET * MAX_ALPHABET,
                tuples: MAX_INPUT_TUPLES,
            },
        )
    }
}

#[derive(Clone, Copy)]
struct SizeCaps {
    alphabet: usize,
    tuples: usize,
}

fn channel_violations(
    alphabets: &[usize],
    mu1: usize,
    y1_size: usize,
    y2_size: usize,
    transitions: &[f64],
    tol: f64,
    caps: SizeCaps,
) -> Vec<Violation> {
    let mut v = Vec::new();
    if alphabets.is_empty() {
        v.push(Violation::new("input_alphabets", "no inputs"));
    }
    if mu1 < 1 || mu1 > alphabets.len() {
        v.push(Violation::new(
            "mu1",
            format!("must lie in 1..={} (got {mu1})", alphabets.len()),
        ));
    }
    for (i, &n) in alphabets.iter().enumerate() {
        if n == 0 || n > caps.alphabet {
            v.push(Violation::new(
                format!("input_alphabets[{i}]"),
                format!("size {n} outside 1..={}", caps.alphabet),
            ));
        }
    }
    for (name, n) in [("y1_size", y1_size), ("y2_size", y2_size)] {
        if n == 0 {
            v.push(Violation::new(name, "empty output alphabet"));
        }
    }
    if !v.is_empty() {
        return v;
    }
    let tuples = alphabets.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    let tuples = match tuples {
        Some(t) if t <= caps.tuples => t,
        _ => {
            v.push(Violation::new(
                "input_alphabets",
                format!("input-tuple count exceeds {}", caps.tuples),
            ));
            return v;
        }
    };
    let slice = y1_size * y2_size;
    if transitions.len() != tuples * slice {
        v.push(Violation::new(
            "transitions",
            format!("has {} entries, expected {}", transitions.len(), tuples * slice),
        ));
        return v;
    }
    for x in 0..tuples {
        v.extend(pmf_violations(
            &format!("transitions[{x}]"),
            &transitions[x * slice..(x + 1) * slice],
            tol,
        ));
    }
    v
}

/// K-receiver broadcast channel described by its output marginals `P(y_k | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBroadcastChannel {
    x_size: usize,
    marginals: Vec<StochasticMatrix>,
}

impl DiscreteBroadcastChannel {
    pub fn new(marginals: Vec<StochasticMatrix>) -> Result<Self, ModelError> {
        let x_size = marginals.first().map_or(0, StochasticMatrix::rows);
        check("DiscreteBroadcastChannel", broadcast_violations(x_size, &marginals))?;
        Ok(Self { x_size, marginals })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn receivers(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginal(&self, k: usize) -> &StochasticMatrix {
        &self.marginals[k]
    }

    pub fn marginals(&self) -> &[StochasticMatrix] {
        &self.marginals
    }
}

impl Validate for DiscreteBroadcastChannel {
    fn validate(&self) -> Vec<Violation> {
        let mut v = broadcast_violations(self.x_size, &self.marginals);
        for (k, m) in self.marginals.iter().enumerate() {
            v.extend(m.validate().into_iter().map(|mut e| {
                e.field = format!("marginals[{k}].{}", e.field);
                e
            }));
        }
        v
    }
}

fn broadcast_violations(x_size: usize, marginals: &[StochasticMatrix]) -> Vec<Violation> {
    let mut v = Vec::new();
    if marginals.is_empty() {
        v.push(Violation::new("marginals", "no receivers"));
    }
    if x_size > MAX_ALPHABET {
        v.push(Violation::new("x_size", format!("{x_size} exceeds {MAX_ALPHABET}")));
    }
    for (k, m) in marginals.iter().enumerate() {
        if m.rows() != x_size {
            v.push(Violation::new(
                format!("marginals[{k}]"),
                format!("has {} input rows, expected {x_size}", m.rows()),
            ));
        }
    }
    v
}

/// Rates in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self, ModelError> {
        check("RateVector", rate_violations(&rates))?;
        Ok(Self(rates))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn subset_sum(&self, s: UserSet) -> f64 {
        s.iter().map(|i| self.0[i]).sum()
    }
}

impl Validate for RateVector {
    fn validate(&self) -> Vec<Violation> {
        rate_violations(&self.0)
    }
}

fn rate_violations(rates: &[f64]) -> Vec<Violation> {
    rates
        .iter()
        .enumerate()
        .filter(|(_, r)| !(r.is_finite() && **r >= 0.0))
        .map(|(i, r)| Violation::new(format!("rates[{i}]"), format!("{r} is not a finite nonnegative rate")))
        .collect()
}

/// Top-level channel-spec file, tagged by `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    GaussianIc {
        gains: Vec<Vec<f64>>,
        powers: Vec<f64>,
    },
    TwoOutputSystem {
        mu1: usize,
        #[serde(default)]
        mu2: usize,
        a: Vec<f64>,
        b: Vec<f64>,
    },
    DiscreteTwoOutput {
        alphabets: Vec<usize>,
        /// Number of leading inputs in the joint block; defaults to all.
        #[serde(default)]
        mu1: Option<usize>,
        y1_size: usize,
        y2_size: usize,
        transitions: serde_json::Value,
    },
    Broadcast {
        marginals: Vec<Vec<Vec<f64>>>,
    },
}

/// A validated channel of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Gaussian(GaussianIC),
    TwoOutput(TwoOutputSystem),
    Discrete(DiscreteTwoOutputChannel),
    Broadcast(DiscreteBroadcastChannel),
}

impl Channel {
    pub fn kind(&self) -> &'static str {
        match self {
            Channel::Gaussian(_) => "gaussian_ic",
            Channel::TwoOutput(_) => "two_output_system",
            Channel::Discrete(_) => "discrete_two_output",
            Channel::Broadcast(_) => "broadcast",
        }
    }
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    /// Validate with the file-input tolerance and build the channel.
    pub fn into_channel(self) -> Result<Channel, ModelError> {
        match self {
            ChannelSpec::GaussianIc { gains, powers } => {
                GaussianIC::new(gains, powers).map(Channel::Gaussian)
            }
            ChannelSpec::TwoOutputSystem { mu1, mu2, a, b } => {
                TwoOutputSystem::new(mu1, mu2, a, b).map(Channel::TwoOutput)
            }
            ChannelSpec::DiscreteTwoOutput {
                alphabets,
                mu1,
                y1_size,
                y2_size,
                transitions,
            } => {
                let mu1 = mu1.unwrap_or(alphabets.len());
                let mut shape = alphabets.clone();
                shape.push(y1_size * y2_size);
                let flat = flatten_nested(&transitions, &shape, "transitions")?;
                DiscreteTwoOutputChannel::with_tolerance(
                    alphabets,
                    mu1,
                    y1_size,
                    y2_size,
                    flat,
                    FILE_PMF_TOL,
                )
                .map(Channel::Discrete)
            }
            ChannelSpec::Broadcast { marginals } => {
                let mats = marginals
                    .into_iter()
                    .enumerate()
                    .map(|(k, rows)| {
                        StochasticMatrix::with_tolerance(rows, FILE_PMF_TOL).map_err(|e| match e {
                            ModelError::Invalid { violations, .. } => ModelError::Invalid {
                                kind: "DiscreteBroadcastChannel",
                                violations: violations
                                    .into_iter()
                                    .map(|mut v| {
                                        v.field = format!("marginals[{k}].{}", v.field);
                                        v
                                    })
                                    .collect(),
                            },
                            other => other,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                DiscreteBroadcastChannel::new(mats).map(Channel::Broadcast)
            }
        }
    }

    pub fn from_gaussian(ic: &GaussianIC) -> Self {
        ChannelSpec::GaussianIc {
            gains: ic.gains().to_vec(),
            powers: ic.powers().to_vec(),
        }
    }

    pub fn from_discrete(ch: &DiscreteTwoOutputChannel) -> Self {
        let mut shape = ch.input_alphabets().to_vec();
        shape.push(ch.y1_size() * ch.y2_size());
        ChannelSpec::DiscreteTwoOutput {
            alphabets: ch.input_alphabets().to_vec(),
            mu1: Some(ch.mu1()),
            y1_size: ch.y1_size(),
            y2_size: ch.y2_size(),
            transitions: nest(ch.transitions(), &shape),
        }
    }

    pub fn from_broadcast(bc: &DiscreteBroadcastChannel) -> Self {
        ChannelSpec::Broadcast {
            marginals: bc.marginals().iter().map(StochasticMatrix::to_rows).collect(),
        }
    }
}

impl Validate for ChannelSpec {
    fn validate(&self) -> Vec<Violation> {
        match self.clone().into_channel() {
            Ok(_) => Vec::new(),
            Err(ModelError::Invalid { violations, .. }) => violations,
            Err(ModelError::Parse(msg)) => vec![Violation::new("spec", msg)],
        }
    }
}

fn flatten_nested(value: &serde_json::Value, shape: &[usize], field: &str) -> Result<Vec<f64>, ModelError> {
    let mut out = Vec::with_capacity(shape.iter().product());
    fn walk(
        v: &serde_json::Value,
        shape: &[usize],
        path: &mut String,
        out: &mut Vec<f64>,
    ) -> Result<(), ModelError> {
        match shape.split_first() {
            None => match v.as_f64() {
                Some(x) => {
                    out.push(x);
                    Ok(())
                }
                None => Err(ModelError::Parse(format!("{path}: expected a number"))),
            },
            Some((&n, rest)) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| ModelError::Parse(format!("{path}: expected an array")))?;
                if arr.len() != n {
                    return Err(ModelError::Parse(format!(
                        "{path}: expected {n} entries, found {}",
                        arr.len()
                    )));
                }
                for (i, item) in arr.iter().enumerate() {
                    let len = path.len();
                    path.push_str(&format!("[{i}]"));
                    walk(item, rest, path, out)?;
                    path.truncate(len);
                }
                Ok(())
            }
        }
    }
    let mut path = field.to_string();
    walk(value, shape, &mut path, &mut out)?;
    Ok(out)
}

fn nest(flat: &[f64], shape: &[usize]) -> serde_json::Value {
    match shape.split_first() {
        None => serde_json::json!(flat[0]),
        Some((&n, rest)) => {
            let chunk: usize = rest.iter().product();
            serde_json::Value::Array(
                (0..n)
                    .map(|i| nest(&flat[i * chunk..(i + 1) * chunk], rest))
                    .collect(),
            )
        }
    }
}
