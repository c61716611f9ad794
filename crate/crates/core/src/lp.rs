//! Dense two-phase simplex for `min cᵀx, Ax = b, x ≥ 0` with Bland's rule.

use crate::linalg::RealMatrix;
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the reduced-cost row `cost` (last entry = −objective)
    /// over the columns flagged in `eligible`.
    fn optimize(&mut self, cost: &mut [f64], eligible: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.cols).find(|&j| eligible[j] && cost[j] < -PIVOT_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-15 || (ratio <= br + 1e-15 && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Numerical("linear program is unbounded".into()));
            };
            self.pivot(r, c, cost);
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }
}

/// Minimizes `cᵀx` subject to `Ax = b`, `x ≥ 0`.
pub fn minimize(a: &RealMatrix, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m || c.len() != n {
        return Err(Error::Dimension("LP data sizes disagree".into()));
    }
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for j in 0..n {
            row[j] = sign * a[(i, j)];
        }
        row[n + i] = 1.0;
        row[cols] = sign * b[i];
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols };

    // phase 1: minimize the sum of artificials
    let mut cost = vec![0.0; cols + 1];
    for row in &tab.t {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[cols] -= row[cols];
    }
    let all = vec![true; cols];
    tab.optimize(&mut cost, &all)?;
    let infeas = -cost[cols];
    let scale = b.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    if infeas > 1e-9 * scale {
        return Err(Error::Precondition(format!("linear program is infeasible (phase-1 residual {infeas:e})")));
    }

    // push remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                Some(j) => {
                    let mut dummy = vec![0.0; cols + 1];
                    tab.pivot(i, j, &mut dummy);
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase 2
    let mut cost = vec![0.0; cols + 1];
    cost[..n].copy_from_slice(c);
    for (r, &bj) in tab.basis.clone().iter().enumerate() {
        let f = cost[bj];
        if f != 0.0 {
            for (v, tv) in cost.iter_mut().zip(&tab.t[r]) {
                *v -= f * tv;
            }
        }
    }
    let eligible: Vec<bool> = (0..cols).map(|j| j < n).collect();
    tab.optimize(&mut cost, &eligible)?;

    let mut x = vec![0.0; n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(r).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}

/// Any point of `{x ≥ 0 | Ax = b}`.
pub fn feasible_point(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(minimize(a, b, &vec![0.0; a.cols()])?.x)
}
