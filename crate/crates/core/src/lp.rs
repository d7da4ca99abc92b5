//! Small dense linear-programming and linear-algebra routines.
//!
//! The simplex here is a textbook two-phase tableau method with Bland's
//! rule, sized for the few-hundred-row problems the region and degradation
//! code produces.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    /// Maximize `objective . x` subject to `x >= 0` and the added rows.
    pub(crate) fn maximize(objective: Vec<f64>) -> Self {
        Self {
            n: objective.len(),
            objective,
            rows: Vec::new(),
        }
    }

    pub(crate) fn constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push((coeffs, rel, rhs));
    }

    pub(crate) fn solve(&self) -> LpOutcome {
        let m = self.rows.len();
        let n = self.n;
        let mut n_slack = 0;
        let mut n_art = 0;
        let rows: Vec<(Vec<f64>, Relation, f64)> = self
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        for (_, rel, _) in &rows {
            match rel {
                Relation::Le => n_slack += 1,
                Relation::Ge => {
                    n_slack += 1;
                    n_art += 1;
                }
                Relation::Eq => n_art += 1,
            }
        }
        let art_start = n + n_slack;
        let width = art_start + n_art;
        let mut t = Tableau {
            a: vec![vec![0.0; width + 1]; m],
            basis: vec![0; m],
            width,
        };
        let (mut si, mut ai) = (n, art_start);
        for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            t.a[r][..n].copy_from_slice(coeffs);
            t.a[r][width] = *rhs;
            match rel {
                Relation::Le => {
                    t.a[r][si] = 1.0;
                    t.basis[r] = si;
                    si += 1;
                }
                Relation::Ge => {
                    t.a[r][si] = -1.0;
                    si += 1;
                    t.a[r][ai] = 1.0;
                    t.basis[r] = ai;
                    ai += 1;
                }
                Relation::Eq => {
                    t.a[r][ai] = 1.0;
                    t.basis[r] = ai;
                    ai += 1;
                }
            }
        }

        if n_art > 0 {
            let mut phase1 = vec![0.0; width];
            phase1[art_start..].iter_mut().for_each(|c| *c = -1.0);
            if !t.optimize(&phase1, width) {
                return LpOutcome::Unbounded;
            }
            let infeas: f64 = t
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= art_start)
                .map(|(r, _)| t.a[r][width])
                .sum();
            if infeas > 1e-9 {
                return LpOutcome::Infeasible;
            }
            // pivot remaining artificials out, dropping redundant rows
            let mut r = 0;
            while r < t.a.len() {
                if t.basis[r] >= art_start {
                    match (0..art_start).find(|&j| t.a[r][j].abs() > 1e-9) {
                        Some(j) => t.pivot(r, j),
                        None => {
                            t.a.remove(r);
                            t.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }

        let mut cost = vec![0.0; width];
        cost[..n].copy_from_slice(&self.objective);
        if !t.optimize(&cost, art_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; n];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.a[r][width];
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    /// Maximize `cost` using columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                let z: f64 = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(r, &b)| cost[b] * self.a[r][j])
                    .sum();
                cost[j] - z > EPS
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let coef = self.a[r][j];
                if coef > EPS {
                    let ratio = self.a[r][self.width] / coef;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.a[r][j];
        self.a[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r {
                let f = row[j];
                if f != 0.0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                }
            }
        }
        self.basis[r] = j;
    }
}

/// Solve the square system `m x = rhs` by Gaussian elimination with partial
/// pivoting. `None` when the matrix is (numerically) singular.
pub(crate) fn solve_linear(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}
