//! Entropy and mutual-information kernels, in bits.
//!
//! Every mutual information is computed from joint entropies with the axes
//! visited in lexicographic order, so repeated runs produce identical bits.

use thiserror::Error;

use crate::model::{pmf_violations, DiscretePMF, GaussianIC, ModelError, UserSet, PMF_TOL};

/// Below-zero mutual informations within this margin are round-off.
pub const MI_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("axis groups not disjoint")]
    OverlappingGroups,
    #[error("axis {0} out of range")]
    AxisOutOfRange(usize),
    #[error("empty subset")]
    EmptySubset,
    #[error("receiver {receiver} out of range for K = {k}")]
    ReceiverOutOfRange { receiver: usize, k: usize },
    #[error("subset {subset} not contained in users of a K = {k} channel")]
    SubsetOutOfRange { subset: UserSet, k: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `-sum p log2 p` over raw masses, `0 log 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

pub fn entropy(p: &DiscretePMF) -> f64 {
    entropy_of(p.probs())
}

/// Binary entropy function.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

pub(crate) fn clamp_mi(mi: f64) -> f64 {
    if (-MI_CLAMP..0.0).contains(&mi) {
        0.0
    } else {
        mi
    }
}

/// One named variable of a joint law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub label: String,
    pub size: usize,
}

impl Axis {
    pub fn new(label: impl Into<String>, size: usize) -> Self {
        Self {
            label: label.into(),
            size,
        }
    }
}

/// Dense joint PMF over named axes, row-major with axis 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPMF {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointPMF {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self, MeasureError> {
        Self::with_tolerance(axes, probs, PMF_TOL)
    }

    pub fn with_tolerance(axes: Vec<Axis>, probs: Vec<f64>, tol: f64) -> Result<Self, MeasureError> {
        let expected: usize = axes.iter().map(|a| a.size).product();
        let mut violations = pmf_violations("probs", &probs, tol);
        if probs.len() != expected {
            violations.push(crate::model::Violation {
                field: "probs".into(),
                message: format!("has {} entries, axes imply {expected}", probs.len()),
            });
        }
        if violations.is_empty() {
            Ok(Self { axes, probs })
        } else {
            Err(ModelError::Invalid {
                kind: "JointPMF",
                violations,
            }
            .into())
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn axis_index(&self, label: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.label == label)
    }

    /// Marginal over `keep`, in the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPMF, MeasureError> {
        for &a in keep {
            if a >= self.axes.len() {
                return Err(MeasureError::AxisOutOfRange(a));
            }
        }
        let axes: Vec<Axis> = keep.iter().map(|&a| self.axes[a].clone()).collect();
        let probs = self.marginal_probs(keep);
        Ok(JointPMF { axes, probs })
    }

    fn marginal_probs(&self, keep: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.size).collect();
        let out_len: usize = keep.iter().map(|&a| sizes[a]).product();
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; sizes.len()];
        for &p in &self.probs {
            let idx = keep.iter().fold(0, |acc, &a| acc * sizes[a] + digits[a]);
            out[idx] += p;
            for d in (0..sizes.len()).rev() {
                digits[d] += 1;
                if digits[d] < sizes[d] {
                    break;
                }
                digits[d] = 0;
            }
        }
        out
    }

    /// Joint entropy of the axis set, in bits.
    pub fn entropy_of_axes(&self, axes: &[usize]) -> Result<f64, MeasureError> {
        for &a in axes {
            if a >= self.axes.len() {
                return Err(MeasureError::AxisOutOfRange(a));
            }
        }
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        Ok(entropy_of(&self.marginal_probs(&sorted)))
    }
}

/// `I(A; B | C)` for disjoint axis groups; axes outside all groups are
/// marginalized out.
pub fn conditional_mutual_information(
    joint: &JointPMF,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64, MeasureError> {
    let mut seen = vec![false; joint.axes().len()];
    for &axis in a.iter().chain(b).chain(c) {
        if axis >= seen.len() {
            return Err(MeasureError::AxisOutOfRange(axis));
        }
        if seen[axis] {
            return Err(MeasureError::OverlappingGroups);
        }
        seen[axis] = true;
    }
    let union = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let h_ac = joint.entropy_of_axes(&union(a, c))?;
    let h_bc = joint.entropy_of_axes(&union(b, c))?;
    let h_abc = joint.entropy_of_axes(&union(&union(a, b), c))?;
    let h_c = joint.entropy_of_axes(c)?;
    Ok(clamp_mi(h_ac + h_bc - h_abc - h_c))
}

/// `I(U; Y | C)` from a dense `p(c, u, y)` table of shape `nc x nu x ny`.
///
/// This is the fixed-shape form used by the verifier's inner loops.
pub(crate) fn cmi_cuy(p: &[f64], nc: usize, nu: usize, ny: usize) -> f64 {
    debug_assert_eq!(p.len(), nc * nu * ny);
    let mut h_cu = 0.0;
    let mut h_cy = 0.0;
    let mut h_cuy = 0.0;
    let mut h_c = 0.0;
    let mut cy = vec![0.0; ny];
    for c in 0..nc {
        cy.iter_mut().for_each(|v| *v = 0.0);
        let mut pc = 0.0;
        for u in 0..nu {
            let row = &p[(c * nu + u) * ny..(c * nu + u + 1) * ny];
            let mut pcu = 0.0;
            for (acc, &v) in cy.iter_mut().zip(row) {
                *acc += v;
                pcu += v;
            }
            h_cu -= xlog2x(pcu);
            h_cuy += entropy_of(row);
            pc += pcu;
        }
        h_cy += entropy_of(&cy);
        h_c -= xlog2x(pc);
    }
    // H(U|C) - H(U|C,Y), grouped so a constant U gives exactly zero
    clamp_mi((h_cu - h_c) - (h_cuy - h_cy))
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// `0.5 log2(1 + sum_{i in S} a_{ji}^2 P_i)`: the conditional mutual
/// information `I(X_S; Y_j | X_{S^c})` for independent full-power Gaussian
/// inputs.
pub fn gaussian_mac_mi(ic: &GaussianIC, receiver: usize, subset: UserSet) -> Result<f64, MeasureError> {
    let k = ic.k();
    if receiver >= k {
        return Err(MeasureError::ReceiverOutOfRange { receiver, k });
    }
    if subset.is_empty() {
        return Err(MeasureError::EmptySubset);
    }
    if !subset.is_subset(UserSet::full(k)) {
        return Err(MeasureError::SubsetOutOfRange { subset, k });
    }
    let snr: f64 = subset
        .iter()
        .map(|i| ic.gain(receiver, i).powi(2) * ic.power(i))
        .sum();
    Ok(0.5 * snr.ln_1p() / std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(n: usize) -> Vec<Axis> {
        (0..n).map(|i| Axis::new(format!("v{i}"), 2)).collect()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&DiscretePMF::uniform(4)), 2.0);
        assert_eq!(entropy(&DiscretePMF::point_mass(3, 1)), 0.0);
        assert_eq!(entropy(&DiscretePMF::new(vec![0.5, 0.25, 0.25]).unwrap()), 1.5);
    }

    #[test]
    fn independent_bits_have_zero_mi() {
        let j = JointPMF::new(bits(2), vec![0.25; 4]).unwrap();
        assert_eq!(conditional_mutual_information(&j, &[0], &[1], &[]).unwrap(), 0.0);
    }

    #[test]
    fn identical_bits_have_one_bit() {
        let j = JointPMF::new(bits(2), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(conditional_mutual_information(&j, &[0], &[1], &[]).unwrap(), 1.0);
    }

    #[test]
    fn bsc_mutual_information_matches_capacity_formula() {
        // 1 - h(0.1), evaluated directly from the logs
        let oracle = 1.0 + 0.1 * 0.1f64.log2() + 0.9 * 0.9f64.log2();
        let j = JointPMF::new(bits(2), vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let mi = conditional_mutual_information(&j, &[0], &[1], &[]).unwrap();
        assert!((mi - oracle).abs() < 1e-14);
        assert!((mi - 0.531004).abs() < 1e-6);
    }

    #[test]
    fn overlapping_groups_are_rejected() {
        let j = JointPMF::new(bits(2), vec![0.25; 4]).unwrap();
        assert_eq!(
            conditional_mutual_information(&j, &[0], &[0, 1], &[]),
            Err(MeasureError::OverlappingGroups)
        );
        assert_eq!(
            conditional_mutual_information(&j, &[0], &[5], &[]),
            Err(MeasureError::AxisOutOfRange(5))
        );
    }

    #[test]
    fn gaussian_mac_examples() {
        let ic = GaussianIC::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![1.0, 1.0]).unwrap();
        assert_eq!(gaussian_mac_mi(&ic, 0, UserSet::from_labels([1])).unwrap(), 0.5);
        let both = gaussian_mac_mi(&ic, 0, UserSet::from_labels([1, 2])).unwrap();
        assert!((both - 0.5 * 6f64.log2()).abs() < 1e-15);
        assert!((both - 1.292481).abs() < 1e-6);
        let ones = GaussianIC::with_unit_powers(vec![vec![1.0; 3]; 3]).unwrap();
        for j in 0..3 {
            assert_eq!(gaussian_mac_mi(&ones, j, UserSet::full(3)).unwrap(), 1.0);
        }
        assert_eq!(
            gaussian_mac_mi(&ones, 0, UserSet::EMPTY),
            Err(MeasureError::EmptySubset)
        );
        assert!(gaussian_mac_mi(&ones, 3, UserSet::full(3)).is_err());
    }

    #[test]
    fn cuy_kernel_matches_generic_cmi() {
        let p: Vec<f64> = (1..=12).map(|v| v as f64 / 78.0).collect();
        let axes = vec![Axis::new("c", 2), Axis::new("u", 3), Axis::new("y", 2)];
        let j = JointPMF::new(axes, p.clone()).unwrap();
        let generic = conditional_mutual_information(&j, &[1], &[2], &[0]).unwrap();
        assert!((generic - cmi_cuy(&p, 2, 3, 2)).abs() < 1e-15);
    }

    fn joint_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-9;
            v.iter().map(|x| (x + 1e-9 / v.len() as f64) / s).collect()
        })
    }

    proptest! {
        #[test]
        fn chain_rule_holds(p in joint_strategy(24)) {
            // axes: A(2) B(3) Y(2) C(2)
            let axes = vec![Axis::new("a", 2), Axis::new("b", 3), Axis::new("y", 2), Axis::new("c", 2)];
            let j = JointPMF::new(axes, p).unwrap();
            let whole = conditional_mutual_information(&j, &[0, 1], &[2], &[3]).unwrap();
            let first = conditional_mutual_information(&j, &[0], &[2], &[3]).unwrap();
            let second = conditional_mutual_information(&j, &[1], &[2], &[0, 3]).unwrap();
            prop_assert!((whole - first - second).abs() < 1e-10);
            prop_assert!(whole >= -MI_CLAMP && first >= -MI_CLAMP && second >= -MI_CLAMP);
        }

        #[test]
        fn gaussian_mac_is_submodular(
            gains in prop::collection::vec(-3.0f64..3.0, 16),
            powers in prop::collection::vec(0.1f64..5.0, 4),
            s_bits in 0u32..16, t_extra in 0u32..16, i in 0usize..4, j in 0usize..4,
        ) {
            let mut g: Vec<Vec<f64>> = gains.chunks(4).map(<[f64]>::to_vec).collect();
            for (d, row) in g.iter_mut().enumerate() { row[d] = 1.0; }
            let ic = GaussianIC::new(g, powers).unwrap();
            let s = UserSet::from_bits(s_bits).without(i);
            let t = UserSet::from_bits(s_bits | t_extra).without(i);
            let f = |x: UserSet| if x.is_empty() { 0.0 } else { gaussian_mac_mi(&ic, j, x).unwrap() };
            let gain_s = f(s.with(i)) - f(s);
            let gain_t = f(t.with(i)) - f(t);
            prop_assert!(gain_t <= gain_s + 1e-12);
            prop_assert!(f(t) >= f(s) - 1e-15);
        }
    }
}
