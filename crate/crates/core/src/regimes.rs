//! Strong-interference condition sets and their closed-form Gaussian checks.
//!
//! A condition set is a list of mutual-information inequalities of the form
//! `I(X_lhs; Y_small | X_cond) <= I(X_lhs; Y_large | X_cond)`, each required
//! for every input law in its factorization family. For Gaussian channels an
//! inequality holds whenever the two receivers' gain rows restricted to the
//! `lhs` inputs are proportional with a ratio of magnitude at most one; that
//! local test is [`ratio_condition_check`].

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{GaussianIC, ModelError, TwoOutputSystem, UserSet, MAX_USERS};

/// Relative tolerance on gain identities.
pub const GAIN_REL_TOL: f64 = 1e-9;
/// Absolute slack on `|alpha| <= 1`.
pub const ALPHA_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegimeError {
    #[error("a strong-interference regime needs K >= 2 (got {0})")]
    TooFewUsers(usize),
    #[error("K = {0} exceeds the supported {MAX_USERS} users")]
    TooManyUsers(usize),
    #[error("cyclic shift {shift} out of range for K = {k}")]
    ShiftOutOfRange { shift: usize, k: usize },
    #[error("this check is defined for K = 3 only (got K = {0})")]
    NotThreeUser(usize),
    #[error("system not ratio-degraded: {0}")]
    NotRatioDegraded(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn rel_close(x: f64, y: f64) -> bool {
    (x - y).abs() <= GAIN_REL_TOL * x.abs().max(y.abs())
}

/// One strong-interference inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MIInequality {
    pub lhs: UserSet,
    pub smaller_receiver: usize,
    pub larger_receiver: usize,
    pub conditioning: UserSet,
    /// Independence blocks of the input-law family, ordered by least member.
    pub factorization: Vec<UserSet>,
}

impl MIInequality {
    fn new(
        lhs: UserSet,
        smaller_receiver: usize,
        larger_receiver: usize,
        conditioning: UserSet,
        mut factorization: Vec<UserSet>,
    ) -> Self {
        factorization.sort_by_key(|b| UserSet::min(*b));
        Self {
            lhs,
            smaller_receiver,
            larger_receiver,
            conditioning,
            factorization,
        }
    }

    /// Image under the user relabeling `i -> map(i)`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize + Copy) -> Self {
        Self::new(
            self.lhs.map(map),
            map(self.smaller_receiver),
            map(self.larger_receiver),
            self.conditioning.map(map),
            self.factorization.iter().map(|b| b.map(map)).collect(),
        )
    }

    /// Structural invariants against a `k`-user universe.
    pub fn is_well_formed(&self, k: usize) -> bool {
        let all = UserSet::full(k);
        let disjoint = self.lhs.intersection(self.conditioning).is_empty();
        let covers = self.lhs.union(self.conditioning) == all;
        let mut seen = UserSet::EMPTY;
        let mut partition = true;
        for b in &self.factorization {
            partition &= !b.is_empty() && b.intersection(seen).is_empty();
            seen = seen.union(*b);
        }
        disjoint && covers && partition && seen == all
    }
}

fn fmt_vars(f: &mut fmt::Formatter<'_>, prefix: &str, s: UserSet) -> fmt::Result {
    let names: Vec<String> = s.labels().iter().map(|l| format!("{prefix}{l}")).collect();
    write!(f, "{}", names.join(","))
}

impl fmt::Display for MIInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rx) in [self.smaller_receiver, self.larger_receiver].into_iter().enumerate() {
            if i == 1 {
                write!(f, " ≤ ")?;
            }
            write!(f, "I(")?;
            fmt_vars(f, "X", self.lhs)?;
            write!(f, "; Y{}", rx + 1)?;
            if !self.conditioning.is_empty() {
                write!(f, " | ")?;
                fmt_vars(f, "X", self.conditioning)?;
            }
            write!(f, ")")?;
        }
        write!(f, "  for all ")?;
        for b in &self.factorization {
            write!(f, "P_{{")?;
            fmt_vars(f, "X", *b)?;
            write!(f, "}}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct InequalityRepr {
    lhs: Vec<usize>,
    cond: Vec<usize>,
    smaller_receiver: usize,
    larger_receiver: usize,
    factorization: Vec<Vec<usize>>,
}

impl Serialize for MIInequality {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        InequalityRepr {
            lhs: self.lhs.labels(),
            cond: self.conditioning.labels(),
            smaller_receiver: self.smaller_receiver + 1,
            larger_receiver: self.larger_receiver + 1,
            factorization: self.factorization.iter().map(|b| b.labels()).collect(),
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionSet {
    pub k: usize,
    pub label: String,
    pub inequalities: Vec<MIInequality>,
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (K = {})", self.label, self.k)?;
        for ineq in &self.inequalities {
            writeln!(f, "  {ineq}")?;
        }
        Ok(())
    }
}

fn check_k(k: usize) -> Result<(), RegimeError> {
    if k < 2 {
        return Err(RegimeError::TooFewUsers(k));
    }
    if k > MAX_USERS {
        return Err(RegimeError::TooManyUsers(k));
    }
    Ok(())
}

/// `i -> (i + shift) mod k`.
pub fn cyclic_map(k: usize, shift: usize) -> impl Fn(usize) -> usize + Copy {
    move |i| (i + shift) % k
}

/// The K-user regime relabeled by the cyclic shift `shift`.
///
/// Row `r` (0-based) conditions on `X_r`, puts every other input on the
/// left, and compares receiver `r - 1 (mod K)` against receiver `r`.
pub fn generate_kuser_regime(k: usize, shift: usize) -> Result<ConditionSet, RegimeError> {
    check_k(k)?;
    if shift >= k {
        return Err(RegimeError::ShiftOutOfRange { shift, k });
    }
    let sigma = cyclic_map(k, shift);
    let all = UserSet::full(k);
    let inequalities = (0..k)
        .map(|r| {
            let c = sigma(r);
            let rest = all.without(c);
            MIInequality::new(
                rest,
                sigma((r + k - 1) % k),
                c,
                UserSet::singleton(c),
                vec![rest, UserSet::singleton(c)],
            )
        })
        .collect();
    Ok(ConditionSet {
        k,
        label: format!("cyclic-shift-{shift}"),
        inequalities,
    })
}

/// Apply a cyclic relabeling to every inequality of a set.
pub fn relabel_cyclic(set: &ConditionSet, shift: usize) -> ConditionSet {
    let sigma = cyclic_map(set.k, shift);
    ConditionSet {
        k: set.k,
        label: set.label.clone(),
        inequalities: set.inequalities.iter().map(|q| q.relabel(sigma)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeUserVariant {
    /// Three joint-input inequalities.
    Regime41,
    /// Four inequalities over fully product laws.
    Regime46,
}

pub fn generate_3user_variant(which: ThreeUserVariant) -> ConditionSet {
    let s = |labels: &[usize]| UserSet::from_labels(labels.iter().copied());
    match which {
        ThreeUserVariant::Regime41 => {
            let mut set = generate_kuser_regime(3, 0).expect("K = 3 is valid");
            set.label = "3user-variant-41".into();
            set
        }
        ThreeUserVariant::Regime46 => {
            let product = || vec![s(&[1]), s(&[2]), s(&[3])];
            let row = |lhs: &[usize], small: usize, large: usize, cond: &[usize]| {
                MIInequality::new(s(lhs), small - 1, large - 1, s(cond), product())
            };
            ConditionSet {
                k: 3,
                label: "3user-variant-46".into(),
                inequalities: vec![
                    row(&[3], 3, 2, &[1, 2]),
                    row(&[2, 3], 2, 1, &[1]),
                    row(&[1, 3], 1, 2, &[2]),
                    row(&[1, 2], 2, 3, &[3]),
                ],
            }
        }
    }
}

/// Outcome of the proportional-gain test on a [`TwoOutputSystem`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub pass: bool,
    /// Common ratio when all constrained ratios agree, whatever its size.
    pub alpha: Option<f64>,
    /// `a_i / b_i` for each joint-block input, `None` where `a_i = b_i = 0`.
    pub ratios: Vec<Option<f64>>,
    pub reason: Option<String>,
}

pub fn ratio_condition_check(sys: &TwoOutputSystem) -> RatioCheck {
    let mut ratios = Vec::with_capacity(sys.mu1());
    for i in 0..sys.mu1() {
        let (a, b) = (sys.a()[i], sys.b()[i]);
        if a == 0.0 && b == 0.0 {
            ratios.push(None);
        } else if b == 0.0 {
            return RatioCheck {
                pass: false,
                alpha: None,
                ratios,
                reason: Some(format!("undefined ratio at input {}: a = {a}, b = 0", i + 1)),
            };
        } else {
            ratios.push(Some(a / b));
        }
    }
    let defined: Vec<f64> = ratios.iter().flatten().copied().collect();
    let Some(&alpha) = defined.first() else {
        return RatioCheck {
            pass: true,
            alpha: None,
            ratios,
            reason: Some("no constrained ratios".into()),
        };
    };
    if let Some(bad) = defined.iter().find(|r| !rel_close(**r, alpha)) {
        return RatioCheck {
            pass: false,
            alpha: None,
            ratios,
            reason: Some(format!("unequal ratios: {alpha} vs {bad}")),
        };
    }
    let pass = alpha.abs() <= 1.0 + ALPHA_SLACK;
    RatioCheck {
        pass,
        alpha: Some(alpha),
        ratios,
        reason: (!pass).then(|| format!("|alpha| = {} > 1", alpha.abs())),
    }
}

/// `Y1' = alpha Y2 + sum_j c_j X_{mu1+j} + noise_scale * Z'`, built so its
/// conditional law given all inputs equals that of `Y1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegradedConstruction {
    pub alpha: f64,
    /// `c_j = a_j - alpha b_j` for each conditioning input.
    pub corrections: Vec<f64>,
    pub noise_scale: f64,
}

impl DegradedConstruction {
    /// Coefficient of each input in the conditional mean of `Y1'`.
    pub fn conditional_mean_coeffs(&self, sys: &TwoOutputSystem) -> Vec<f64> {
        let mu1 = sys.mu1();
        sys.b()
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let base = self.alpha * b;
                if i < mu1 {
                    base
                } else {
                    base + self.corrections[i - mu1]
                }
            })
            .collect()
    }

    /// `alpha^2 Var(Z2) + noise_scale^2`.
    pub fn conditional_variance(&self) -> f64 {
        self.alpha * self.alpha + self.noise_scale * self.noise_scale
    }
}

pub fn degraded_equivalent(sys: &TwoOutputSystem) -> Result<DegradedConstruction, RegimeError> {
    let check = ratio_condition_check(sys);
    if !check.pass {
        return Err(RegimeError::NotRatioDegraded(
            check.reason.unwrap_or_default(),
        ));
    }
    // With no constrained ratio Y1 ignores the joint block; alpha = 0 keeps
    // Y1' independent of Y2.
    let alpha = check.alpha.unwrap_or(0.0);
    let mu1 = sys.mu1();
    let corrections = (mu1..mu1 + sys.mu2())
        .map(|j| sys.a()[j] - alpha * sys.b()[j])
        .collect();
    Ok(DegradedConstruction {
        alpha,
        corrections,
        noise_scale: (1.0 - alpha * alpha).max(0.0).sqrt(),
    })
}

/// The Gaussian two-output system implied by one inequality: `a` is the
/// smaller receiver's row and `b` the larger receiver's, over the `lhs`
/// inputs in increasing order followed by the conditioning inputs.
pub fn implied_system(ic: &GaussianIC, ineq: &MIInequality) -> Result<TwoOutputSystem, RegimeError> {
    let order: Vec<usize> = ineq.lhs.iter().chain(ineq.conditioning.iter()).collect();
    let row = |j: usize| order.iter().map(|&i| ic.gain(j, i)).collect::<Vec<_>>();
    Ok(TwoOutputSystem::new(
        ineq.lhs.len(),
        ineq.conditioning.len(),
        row(ineq.smaller_receiver),
        row(ineq.larger_receiver),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainFailure {
    /// 1-based chain index.
    pub chain: usize,
    pub inequality: String,
    pub ratios: Vec<Option<f64>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KUserCheck {
    pub pass: bool,
    pub shift: usize,
    /// One ratio per chain, present when every chain's ratios agree.
    pub alphas: Option<Vec<f64>>,
    pub failures: Vec<ChainFailure>,
}

/// Gaussian sufficient condition for the cyclic K-user regime: every
/// inequality's implied system must pass the ratio test.
pub fn gaussian_kuser_check(ic: &GaussianIC, shift: usize) -> Result<KUserCheck, RegimeError> {
    let set = generate_kuser_regime(ic.k(), shift)?;
    let mut alphas = Some(Vec::with_capacity(ic.k()));
    let mut failures = Vec::new();
    for (c, ineq) in set.inequalities.iter().enumerate() {
        let check = ratio_condition_check(&implied_system(ic, ineq)?);
        match (check.alpha, alphas.as_mut()) {
            (Some(a), Some(v)) => v.push(a),
            // an unconstrained chain is consistent with any alpha
            (None, Some(v)) if check.pass => v.push(0.0),
            _ => alphas = None,
        }
        if !check.pass {
            failures.push(ChainFailure {
                chain: c + 1,
                inequality: ineq.to_string(),
                ratios: check.ratios,
                reason: check.reason.unwrap_or_default(),
            });
        }
    }
    Ok(KUserCheck {
        pass: failures.is_empty(),
        shift,
        alphas,
        failures,
    })
}

/// Build the gain matrix of a cyclic-shift-0 regime from its free
/// parameters `free[r] = a_{r, r-1 (mod K)}`; every other cross gain is the
/// product of free parameters along the cyclic path `i+1, ..., r`.
pub fn kuser_regime_gains(free: &[f64]) -> Vec<Vec<f64>> {
    let k = free.len();
    (0..k)
        .map(|r| {
            (0..k)
                .map(|i| {
                    if i == r {
                        return 1.0;
                    }
                    let mut g = 1.0;
                    let mut m = (i + 1) % k;
                    loop {
                        g *= free[m];
                        if m == r {
                            break g;
                        }
                        m = (m + 1) % k;
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeUserCheck {
    pub pass: bool,
    /// Free parameters `(a13, a21, a32)`.
    pub witness: [f64; 3],
    pub failures: Vec<String>,
}

impl ThreeUserCheck {
    /// Chain ratios `(1/a13, 1/a21, 1/a32)` of the equivalent K-user check.
    pub fn alphas(&self) -> [f64; 3] {
        self.witness.map(|w| 1.0 / w)
    }
}

/// Closed-form 3-user test: `|a13|, |a21|, |a32| >= 1` and
/// `a12 = a13 a32`, `a31 = a21 a32`, `a23 = a21 a13`.
pub fn gaussian_3user_check(ic: &GaussianIC) -> Result<ThreeUserCheck, RegimeError> {
    if ic.k() != 3 {
        return Err(RegimeError::NotThreeUser(ic.k()));
    }
    let a = |j: usize, i: usize| ic.gain(j - 1, i - 1);
    let witness = [a(1, 3), a(2, 1), a(3, 2)];
    let mut failures = Vec::new();
    for (name, w) in ["a13", "a21", "a32"].iter().zip(witness) {
        // same slack as |1/w| <= 1 in the ratio test
        if w == 0.0 || 1.0 / w.abs() > 1.0 + ALPHA_SLACK {
            failures.push(format!("|{name}| = {} < 1", w.abs()));
        }
    }
    let identities = [
        ("a12 = a13·a32", a(1, 2), a(1, 3) * a(3, 2)),
        ("a31 = a21·a32", a(3, 1), a(2, 1) * a(3, 2)),
        ("a23 = a21·a13", a(2, 3), a(2, 1) * a(1, 3)),
    ];
    for (name, lhs, rhs) in identities {
        if !rel_close(lhs, rhs) {
            failures.push(format!("{name} violated: {lhs} vs {rhs}"));
        }
    }
    Ok(ThreeUserCheck {
        pass: failures.is_empty(),
        witness,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variant46Check {
    pub pass: bool,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

pub const VARIANT46_NOTE: &str = "the alpha chain is held to |alpha| = 1 as printed; \
    the <= 1 form used by every other chain may have been intended";

/// Gaussian test for the four-inequality 3-user variant:
/// `|a23| >= 1`, `a21 = 1/a12 = a23/a13 = alpha` with `|alpha| = 1`, and
/// `a21/a31 = 1/a32 = beta` with `|beta| <= 1`.
pub fn gaussian_variant46_check(ic: &GaussianIC) -> Result<Variant46Check, RegimeError> {
    if ic.k() != 3 {
        return Err(RegimeError::NotThreeUser(ic.k()));
    }
    let a = |j: usize, i: usize| ic.gain(j - 1, i - 1);
    let mut failures = Vec::new();

    let chain = |name: &str, terms: &[(f64, f64)], failures: &mut Vec<String>| -> Option<f64> {
        let mut values = Vec::new();
        for &(num, den) in terms {
            if den == 0.0 {
                failures.push(format!("{name} chain: undefined ratio {num}/0"));
                return None;
            }
            values.push(num / den);
        }
        let first = values[0];
        if values.iter().all(|v| rel_close(*v, first)) {
            Some(first)
        } else {
            failures.push(format!("{name} chain broken: {values:?}"));
            None
        }
    };

    if a(2, 3).abs() < 1.0 {
        failures.push(format!("|a23| = {} < 1", a(2, 3).abs()));
    }
    let alpha = chain(
        "alpha",
        &[(a(2, 1), 1.0), (1.0, a(1, 2)), (a(2, 3), a(1, 3))],
        &mut failures,
    );
    if let Some(al) = alpha {
        if (al.abs() - 1.0).abs() > GAIN_REL_TOL {
            failures.push(format!("|alpha| = {} ≠ 1", al.abs()));
        }
    }
    let beta = chain("beta", &[(a(2, 1), a(3, 1)), (1.0, a(3, 2))], &mut failures);
    if let Some(b) = beta {
        if b.abs() > 1.0 + ALPHA_SLACK {
            failures.push(format!("|beta| = {} > 1", b.abs()));
        }
    }
    Ok(Variant46Check {
        pass: failures.is_empty(),
        alpha,
        beta,
        failures,
        notes: vec![VARIANT46_NOTE.to_string()],
    })
}
