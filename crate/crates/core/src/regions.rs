//! Joint-decoding rate regions of Gaussian interference channels.
//!
//! A region is the polytope `{r >= 0 : sum_{i in S} r_i <= b_S for all S}`.
//! With a constant time-sharing variable and independent full-power Gaussian
//! inputs every MAC bound is maximized at once, so each `b_S` is a minimum of
//! closed-form Gaussian MAC terms.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve_linear, LinearProgram, LpOutcome, Relation};
use crate::measures::{gaussian_mac_mi, MeasureError};
use crate::model::{GaussianIC, ModelError, RateVector, UserSet, MAX_USERS, Violation};
use crate::regimes::{gaussian_kuser_check, RegimeError};

/// Absolute slack on membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Distance below which two vertices are the same point.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;
/// Tolerance for bound equality in redundancy checks.
pub const REDUNDANCY_TOL: f64 = 1e-9;
/// Largest K handled by the simplex route.
pub const MAX_LP_USERS: usize = 10;
/// Largest K handled by vertex enumeration.
pub const MAX_VERTEX_USERS: usize = 3;
/// Rate vectors swept by [`redundancy_check`].
pub const REDUNDANCY_SAMPLES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("dimension mismatch: region has K = {region}, got {got}")]
    DimensionMismatch { region: usize, got: usize },
    #[error("direction entries must be nonnegative and not all zero")]
    BadDirection,
    #[error("vertex enumeration capped at K=3")]
    VertexCap,
    #[error("linear programming capped at K={MAX_LP_USERS}")]
    LpCap,
    #[error("ic not in declared regime (shift {0})")]
    NotInRegime(usize),
    #[error("slice needs exactly K - 2 = {expected} fixed coordinates, got {got}")]
    SliceArity { expected: usize, got: usize },
    #[error("invalid fixed coordinate {0}")]
    BadFixedCoordinate(String),
    #[error("invalid region: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("LP solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Subset-sum polytope with per-subset provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    k: usize,
    /// Indexed by subset bitmask; entry 0 unused.
    bounds: Vec<f64>,
    argmin: Vec<UserSet>,
}

impl RegionSpec {
    /// Region from explicit bounds; `bound(S)` is called once per nonempty S.
    /// Provenance is left empty.
    pub fn from_bounds(k: usize, bound: impl Fn(UserSet) -> f64) -> Result<Self, RegionError> {
        Self::build(k, |s| Ok((bound(s), UserSet::EMPTY)))
    }

    fn build(
        k: usize,
        mut f: impl FnMut(UserSet) -> Result<(f64, UserSet), RegionError>,
    ) -> Result<Self, RegionError> {
        if k == 0 || k > MAX_USERS {
            return Err(RegionError::Invalid(vec![Violation {
                field: "K".into(),
                message: format!("{k} outside 1..={MAX_USERS}"),
            }]));
        }
        let n = 1usize << k;
        let mut bounds = vec![0.0; n];
        let mut argmin = vec![UserSet::EMPTY; n];
        for s in UserSet::nonempty_subsets(k) {
            let (b, who) = f(s)?;
            bounds[s.bits() as usize] = b;
            argmin[s.bits() as usize] = who;
        }
        let region = Self { k, bounds, argmin };
        let violations = region.violations();
        if violations.is_empty() {
            Ok(region)
        } else {
            Err(RegionError::Invalid(violations))
        }
    }

    fn violations(&self) -> Vec<Violation> {
        UserSet::nonempty_subsets(self.k)
            .filter(|s| !(self.bound(*s).is_finite() && self.bound(*s) >= 0.0))
            .map(|s| Violation {
                field: format!("bound{s}"),
                message: format!("{} is not a finite nonnegative bound", self.bound(s)),
            })
            .collect()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bound(&self, s: UserSet) -> f64 {
        self.bounds[s.bits() as usize]
    }

    /// Receivers whose MAC term attains `bound(s)`.
    pub fn argmin_receivers(&self, s: UserSet) -> UserSet {
        self.argmin[s.bits() as usize]
    }

    pub fn subsets(&self) -> impl Iterator<Item = UserSet> {
        UserSet::nonempty_subsets(self.k)
    }

    /// Largest coordinate any point of the region can reach.
    pub fn coordinate_cap(&self, i: usize) -> f64 {
        self.subsets()
            .filter(|s| s.contains(i))
            .map(|s| self.bound(s))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Serialize)]
struct ConstraintRepr {
    subset: Vec<usize>,
    bound: f64,
    argmin_receivers: Vec<usize>,
}

#[derive(Serialize)]
struct RegionRepr {
    #[serde(rename = "K")]
    k: usize,
    constraints: Vec<ConstraintRepr>,
}

impl Serialize for RegionSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RegionRepr {
            k: self.k,
            constraints: self
                .subsets()
                .map(|s| ConstraintRepr {
                    subset: s.labels(),
                    bound: self.bound(s),
                    argmin_receivers: self.argmin_receivers(s).labels(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.subsets() {
            writeln!(f, "sum R{} <= {:.6}  (receivers {})", s, self.bound(s), self.argmin_receivers(s))?;
        }
        Ok(())
    }
}

fn min_over_receivers(
    ic: &GaussianIC,
    s: UserSet,
    receivers: impl Iterator<Item = usize>,
) -> Result<(f64, UserSet), RegionError> {
    let values: Vec<(usize, f64)> = receivers
        .map(|j| gaussian_mac_mi(ic, j, s).map(|v| (j, v)))
        .collect::<Result<_, _>>()?;
    let best = values.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let who = UserSet::from_indices(
        values
            .iter()
            .filter(|(_, v)| *v <= best + MEMBERSHIP_TOL)
            .map(|(j, _)| *j),
    );
    Ok((best, who))
}

/// Every subset bound is the minimum over all receivers.
pub fn region_full(ic: &GaussianIC) -> Result<RegionSpec, RegionError> {
    let k = ic.k();
    RegionSpec::build(k, |s| min_over_receivers(ic, s, 0..k))
}

/// Each subset bound is the minimum over the receivers inside the subset.
pub fn region_simplified(ic: &GaussianIC) -> Result<RegionSpec, RegionError> {
    RegionSpec::build(ic.k(), |s| min_over_receivers(ic, s, s.iter()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub violated: Vec<UserSet>,
}

pub fn membership(region: &RegionSpec, r: &RateVector) -> Result<Membership, RegionError> {
    if r.k() != region.k() {
        return Err(RegionError::DimensionMismatch {
            region: region.k(),
            got: r.k(),
        });
    }
    let violated: Vec<UserSet> = region
        .subsets()
        .filter(|s| r.subset_sum(*s) > region.bound(*s) + MEMBERSHIP_TOL)
        .collect();
    Ok(Membership {
        inside: violated.is_empty(),
        violated,
    })
}

/// Largest achievable sum rate: the full-set bound of [`region_full`].
pub fn sum_capacity(ic: &GaussianIC) -> Result<f64, RegionError> {
    Ok(region_full(ic)?.bound(UserSet::full(ic.k())))
}

fn check_direction(region: &RegionSpec, direction: &[f64]) -> Result<(), RegionError> {
    if direction.len() != region.k() {
        return Err(RegionError::DimensionMismatch {
            region: region.k(),
            got: direction.len(),
        });
    }
    if direction.iter().any(|c| !(c.is_finite() && *c >= 0.0)) || direction.iter().all(|c| *c == 0.0) {
        return Err(RegionError::BadDirection);
    }
    Ok(())
}

/// `max direction . r` over the region.
///
/// Uses vertex enumeration for K <= 3 and the simplex otherwise.
pub fn support(region: &RegionSpec, direction: &[f64]) -> Result<f64, RegionError> {
    if region.k() <= MAX_VERTEX_USERS {
        support_by_vertices(region, direction)
    } else {
        support_by_simplex(region, direction)
    }
}

pub fn support_by_vertices(region: &RegionSpec, direction: &[f64]) -> Result<f64, RegionError> {
    check_direction(region, direction)?;
    Ok(vertices(region)?
        .iter()
        .map(|v| v.rates().iter().zip(direction).map(|(r, c)| r * c).sum::<f64>())
        .fold(0.0, f64::max))
}

pub fn support_by_simplex(region: &RegionSpec, direction: &[f64]) -> Result<f64, RegionError> {
    check_direction(region, direction)?;
    let k = region.k();
    if k > MAX_LP_USERS {
        return Err(RegionError::LpCap);
    }
    let mut lp = LinearProgram::maximize(direction.to_vec());
    for s in region.subsets() {
        let row = (0..k).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        lp.constraint(row, Relation::Le, region.bound(s));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(RegionError::Solver(format!("{other:?}"))),
    }
}

/// Halfspaces `normal . r <= offset` of the region, coordinate planes last.
fn halfspaces(region: &RegionSpec) -> Vec<(Vec<f64>, f64)> {
    let k = region.k();
    let mut hs: Vec<(Vec<f64>, f64)> = region
        .subsets()
        .map(|s| {
            let row = (0..k).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
            (row, region.bound(s))
        })
        .collect();
    for i in 0..k {
        let mut row = vec![0.0; k];
        row[i] = -1.0;
        hs.push((row, 0.0));
    }
    hs
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn push_unique(points: &mut Vec<Vec<f64>>, p: Vec<f64>) {
    let dup = points
        .iter()
        .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= VERTEX_DEDUP_TOL));
    if !dup {
        points.push(p);
    }
}

/// All vertices, from every K-subset of active constraints.
pub fn vertices(region: &RegionSpec) -> Result<Vec<RateVector>, RegionError> {
    let k = region.k();
    if k > MAX_VERTEX_USERS {
        return Err(RegionError::VertexCap);
    }
    let hs = halfspaces(region);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for combo in combinations(hs.len(), k) {
        let m = combo.iter().map(|&c| hs[c].0.clone()).collect();
        let rhs = combo.iter().map(|&c| hs[c].1).collect();
        let Some(x) = solve_linear(m, rhs) else {
            continue;
        };
        let feasible = hs.iter().all(|(n, b)| {
            n.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= b + VERTEX_DEDUP_TOL
        });
        if feasible {
            // snap round-off onto the coordinate planes and into membership
            let snapped: Vec<f64> = x.iter().map(|v| if v.abs() < 1e-13 { 0.0 } else { v.max(0.0) }).collect();
            push_unique(&mut points, snapped);
        }
    }
    points.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    points
        .into_iter()
        .map(|p| RateVector::new(p).map_err(RegionError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Redundancy {
    pub equivalent: bool,
    /// Largest `b_S` difference between the simplified and full regions.
    pub max_bound_gap: f64,
    /// Subsets whose bounds differ by more than the tolerance.
    pub differing: Vec<UserSet>,
    /// A rate vector inside exactly one of the two regions.
    pub counterexample: Option<RateVector>,
    pub samples_checked: usize,
}

/// Radical-inverse (Halton) point `index` in `[0, 1)^dim`.
pub fn halton_point(index: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    PRIMES[..dim]
        .iter()
        .map(|&base| {
            let (mut f, mut r, mut i) = (1.0, 0.0, index);
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Quasi-random rate vectors over a box slightly larger than both regions.
pub fn quasi_random_rates(a: &RegionSpec, b: &RegionSpec, n: usize) -> Vec<RateVector> {
    let k = a.k();
    let bx: Vec<f64> = (0..k)
        .map(|i| 1.25 * a.coordinate_cap(i).max(b.coordinate_cap(i)))
        .collect();
    (1..=n)
        .map(|idx| {
            let u = halton_point(idx, k);
            RateVector::new(u.iter().zip(&bx).map(|(x, w)| x * w).collect()).expect("box is nonnegative")
        })
        .collect()
}

/// Compare the full and simplified regions of an in-regime channel.
pub fn redundancy_check(ic: &GaussianIC, shift: usize) -> Result<Redundancy, RegionError> {
    if !gaussian_kuser_check(ic, shift)?.pass {
        return Err(RegionError::NotInRegime(shift));
    }
    let full = region_full(ic)?;
    let simp = region_simplified(ic)?;
    let mut max_gap = 0.0f64;
    let mut differing = Vec::new();
    for s in full.subsets() {
        let gap = simp.bound(s) - full.bound(s);
        max_gap = max_gap.max(gap.abs());
        if gap.abs() > REDUNDANCY_TOL {
            differing.push(s);
        }
    }
    let mut counterexample = None;
    for r in quasi_random_rates(&full, &simp, REDUNDANCY_SAMPLES) {
        if membership(&full, &r)?.inside != membership(&simp, &r)?.inside {
            counterexample = Some(r);
            break;
        }
    }
    Ok(Redundancy {
        equivalent: differing.is_empty(),
        max_bound_gap: max_gap,
        differing,
        counterexample,
        samples_checked: REDUNDANCY_SAMPLES,
    })
}

/// Parsed `i=v` slice coordinate, 0-based.
pub type FixedCoordinate = (usize, f64);

/// Boundary polygon (counterclockwise) of the 2-D cross-section obtained by
/// fixing `K - 2` coordinates. Points are `(r_p, r_q)` for the two free
/// coordinates `p < q`.
pub fn slice(region: &RegionSpec, fixed: &[FixedCoordinate]) -> Result<Vec<[f64; 2]>, RegionError> {
    let k = region.k();
    if k < 2 || fixed.len() != k - 2 {
        return Err(RegionError::SliceArity {
            expected: k.saturating_sub(2),
            got: fixed.len(),
        });
    }
    let mut values = vec![None; k];
    for &(i, v) in fixed {
        if i >= k || values[i].is_some() || !(v.is_finite() && v >= 0.0) {
            return Err(RegionError::BadFixedCoordinate(format!("r{}={v}", i + 1)));
        }
        values[i] = Some(v);
    }
    let free: Vec<usize> = (0..k).filter(|&i| values[i].is_none()).collect();
    let (p, q) = (free[0], free[1]);

    // 2-D halfspaces n . (x, y) <= c
    let mut hs: Vec<([f64; 2], f64)> = Vec::new();
    for s in region.subsets() {
        let fixed_sum: f64 = s.iter().filter_map(|i| values[i]).sum();
        let rhs = region.bound(s) - fixed_sum;
        let n = [
            if s.contains(p) { 1.0 } else { 0.0 },
            if s.contains(q) { 1.0 } else { 0.0 },
        ];
        if n == [0.0, 0.0] {
            if rhs < -MEMBERSHIP_TOL {
                return Ok(Vec::new());
            }
            continue;
        }
        hs.push((n, rhs));
    }
    hs.push(([-1.0, 0.0], 0.0));
    hs.push(([0.0, -1.0], 0.0));

    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let (a, b) = (hs[i], hs[j]);
            let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
            let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
            let ok = hs
                .iter()
                .all(|(n, c)| n[0] * x + n[1] * y <= c + VERTEX_DEDUP_TOL);
            if ok {
                let pt = [x.max(0.0), y.max(0.0)];
                if !pts
                    .iter()
                    .any(|o| (o[0] - pt[0]).abs() <= VERTEX_DEDUP_TOL && (o[1] - pt[1]).abs() <= VERTEX_DEDUP_TOL)
                {
                    pts.push(pt);
                }
            }
        }
    }
    Ok(convex_hull_ccw(pts))
}

/// Andrew's monotone chain; drops collinear points.
fn convex_hull_ccw(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-15 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(k: usize) -> GaussianIC {
        GaussianIC::with_unit_powers(vec![vec![1.0; k]; k]).unwrap()
    }

    fn free_parameter_example() -> GaussianIC {
        GaussianIC::with_unit_powers(vec![
            vec![1.0, 4.0, 2.0],
            vec![3.0, 1.0, 6.0],
            vec![6.0, 2.0, 1.0],
        ])
        .unwrap()
    }

    fn s(labels: &[usize]) -> UserSet {
        UserSet::from_labels(labels.iter().copied())
    }

    const LOG3_HALF: f64 = 0.792_481_250_360_578_1; // 0.5 log2 3

    #[test]
    fn full_region_of_symmetric_channel() {
        let r = region_full(&ones(3)).unwrap();
        for single in [s(&[1]), s(&[2]), s(&[3])] {
            assert_eq!(r.bound(single), 0.5);
        }
        for pair in [s(&[1, 2]), s(&[1, 3]), s(&[2, 3])] {
            assert!((r.bound(pair) - LOG3_HALF).abs() < 1e-15);
        }
        assert_eq!(r.bound(s(&[1, 2, 3])), 1.0);
        assert_eq!(r.argmin_receivers(s(&[1])), s(&[1, 2, 3]));
    }

    #[test]
    fn full_region_takes_min_over_receivers() {
        let ic = GaussianIC::with_unit_powers(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let r = region_full(&ic).unwrap();
        assert_eq!(r.bound(s(&[1])), 0.5);
        assert_eq!(r.argmin_receivers(s(&[1])), s(&[1]));
        let two = region_full(&ones(2)).unwrap();
        assert!((two.bound(s(&[1, 2])) - LOG3_HALF).abs() < 1e-15);
    }

    #[test]
    fn simplified_region_uses_receivers_inside_subset() {
        let r = region_simplified(&free_parameter_example()).unwrap();
        assert!(r.argmin_receivers(s(&[2, 3])).is_subset(s(&[2, 3])));
        // rows give 1 + sum a^2: 21, 46, 41 at P = 1
        let want = 0.5 * 22f64.log2();
        assert!((r.bound(s(&[1, 2, 3])) - want).abs() < 1e-12);
        assert!((want - 2.229716).abs() < 1e-6);
        let sym_full = region_full(&ones(3)).unwrap();
        let sym_simp = region_simplified(&ones(3)).unwrap();
        for sub in sym_full.subsets() {
            assert_eq!(sym_full.bound(sub), sym_simp.bound(sub));
        }
    }

    #[test]
    fn membership_examples() {
        let r = region_full(&ones(3)).unwrap();
        assert!(membership(&r, &RateVector::zeros(3)).unwrap().inside);
        let m = membership(&r, &RateVector::new(vec![0.5, 0.5, 0.0]).unwrap()).unwrap();
        assert!(!m.inside);
        assert_eq!(m.violated, vec![s(&[1, 2])]);
        let third = 1.0 / 3.0;
        assert!(membership(&r, &RateVector::new(vec![third; 3]).unwrap()).unwrap().inside);
        assert!(matches!(
            membership(&r, &RateVector::zeros(2)),
            Err(RegionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sum_capacity_examples() {
        assert_eq!(sum_capacity(&ones(3)).unwrap(), 1.0);
        assert!((sum_capacity(&free_parameter_example()).unwrap() - 0.5 * 22f64.log2()).abs() < 1e-12);
        assert!((sum_capacity(&ones(2)).unwrap() - LOG3_HALF).abs() < 1e-15);
    }

    #[test]
    fn support_examples_agree_across_routes() {
        let r = region_full(&ones(3)).unwrap();
        for (dir, want) in [
            ([1.0, 0.0, 0.0], 0.5),
            ([1.0, 1.0, 1.0], 1.0),
            ([1.0, 1.0, 0.0], LOG3_HALF),
        ] {
            let a = support_by_vertices(&r, &dir).unwrap();
            let b = support_by_simplex(&r, &dir).unwrap();
            assert!((a - want).abs() < 1e-12, "{dir:?}: {a}");
            assert!((b - want).abs() < 1e-12, "{dir:?}: {b}");
        }
        assert_eq!(support(&r, &[-1.0, 1.0, 0.0]), Err(RegionError::BadDirection));
        assert_eq!(support(&r, &[0.0; 3]), Err(RegionError::BadDirection));
    }

    #[test]
    fn two_user_vertices() {
        let r = region_full(&ones(2)).unwrap();
        let v: Vec<Vec<f64>> = vertices(&r).unwrap().iter().map(|v| v.rates().to_vec()).collect();
        let corner = LOG3_HALF - 0.5;
        let want = [[0.0, 0.0], [0.0, 0.5], [corner, 0.5], [0.5, 0.0], [0.5, corner]];
        assert_eq!(v.len(), 5);
        for (got, want) in v.iter().zip(want) {
            assert!((got[0] - want[0]).abs() < 1e-9 && (got[1] - want[1]).abs() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn degenerate_and_interval_regions() {
        let r = RegionSpec::from_bounds(2, |s| if s == UserSet::singleton(0) { 0.0 } else { 0.7 }).unwrap();
        let v = vertices(&r).unwrap();
        assert!(v.iter().all(|p| p.rates()[0] == 0.0));
        assert_eq!(v.len(), 2);
        let one = RegionSpec::from_bounds(1, |_| 0.3).unwrap();
        let v: Vec<Vec<f64>> = vertices(&one).unwrap().iter().map(|v| v.rates().to_vec()).collect();
        assert_eq!(v, vec![vec![0.0], vec![0.3]]);
        let four = RegionSpec::from_bounds(4, |_| 1.0).unwrap();
        assert_eq!(vertices(&four), Err(RegionError::VertexCap));
    }

    #[test]
    fn redundancy_examples() {
        assert!(redundancy_check(&ones(3), 0).unwrap().equivalent);
        let r = redundancy_check(&free_parameter_example(), 0).unwrap();
        assert!(r.equivalent, "{r:?}");
        assert!(r.counterexample.is_none());
        let weak = GaussianIC::with_unit_powers(vec![
            vec![1.0, 0.1, 0.1],
            vec![0.1, 1.0, 0.1],
            vec![0.1, 0.1, 1.0],
        ])
        .unwrap();
        assert_eq!(redundancy_check(&weak, 0), Err(RegionError::NotInRegime(0)));
    }

    #[test]
    fn slice_matches_two_user_vertices() {
        let poly = slice(&region_full(&ones(3)).unwrap(), &[(2, 0.0)]).unwrap();
        let two: Vec<Vec<f64>> = vertices(&region_full(&ones(2)).unwrap())
            .unwrap()
            .iter()
            .map(|v| v.rates().to_vec())
            .collect();
        assert_eq!(poly.len(), 5);
        for p in &poly {
            assert!(two.iter().any(|v| (v[0] - p[0]).abs() < 1e-9 && (v[1] - p[1]).abs() < 1e-9));
        }
        // counterclockwise: positive signed area
        let area: f64 = (0..poly.len())
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        assert!(area > 0.0);
    }

    #[test]
    fn slice_at_and_beyond_the_singleton_bound() {
        let r = region_full(&ones(3)).unwrap();
        let at = slice(&r, &[(2, 0.5)]).unwrap();
        let c = LOG3_HALF - 0.5;
        assert_eq!(at.len(), 5);
        assert!(at.iter().all(|p| p[0] <= c + 1e-9 && p[1] <= c + 1e-9 && p[0] + p[1] <= 0.5 + 1e-9));
        assert!(slice(&r, &[(2, 0.6)]).unwrap().is_empty());
        assert!(matches!(slice(&r, &[]), Err(RegionError::SliceArity { .. })));
        assert!(matches!(slice(&r, &[(5, 0.1)]), Err(RegionError::BadFixedCoordinate(_))));
    }

    #[test]
    fn halton_is_in_unit_cube() {
        assert_eq!(halton_point(1, 2), vec![0.5, 1.0 / 3.0]);
        assert!((0..100).all(|i| halton_point(i, 4).iter().all(|x| (0.0..1.0).contains(x))));
    }
}
