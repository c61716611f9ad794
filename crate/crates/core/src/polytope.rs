//! The polytope `M_d(y) = {x | x ≺_d y} = {x | Mx ≤ b}` and its vertices.

use serde::{Deserialize, Serialize};

use crate::linalg::{argsort_desc, dist1, sum, Permutation, RealMatrix};
use crate::majorize::{curve_value, WeightVector};
use crate::par::{map_slice, Exec};
use crate::{lp, Error, Result};

pub const MAX_VERTEX_DIM: usize = 8;
pub const MAX_LIPSCHITZ_DIM: usize = 4;
const DEDUP_TOL: f64 = 1e-9;

/// Half-space description; the rows of `M` are implicit (see [`m_matrix`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPolytope {
    pub n: usize,
    pub b: Vec<f64>,
}

impl HPolytope {
    pub fn trace(&self) -> f64 {
        self.b[self.b.len() - 2]
    }

    /// b at the subset given as a bitmask; 0 for ∅ and the trace for the full set.
    pub fn at_mask(&self, mask: u32) -> f64 {
        self.lookup(&mask_rows(self.n), mask)
    }

    fn lookup(&self, rows: &[usize], mask: u32) -> f64 {
        let full = (1u32 << self.n) - 1;
        if mask == 0 {
            0.0
        } else if mask == full {
            self.trace()
        } else {
            self.b[rows[mask as usize]]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    pub points: Vec<Vec<f64>>,
    /// All permutations generating each point, in lexicographic order.
    pub generators: Vec<Vec<Permutation>>,
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::Invalid(format!("dimension {n} outside 1..={max}")));
    }
    Ok(())
}

/// Proper non-empty subsets as bitmasks: by size, lexicographic in the
/// index tuples within each size.
fn subset_masks(n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity((1 << n) - 2);
    for k in 1..n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| 1u32 << i).sum());
            let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else { break };
            idx[p] += 1;
            for q in p + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

fn mask_rows(n: usize) -> Vec<usize> {
    let mut rows = vec![usize::MAX; 1 << n];
    for (r, m) in subset_masks(n).into_iter().enumerate() {
        rows[m as usize] = r;
    }
    rows
}

/// The 2ⁿ×n matrix `M`: subset indicator rows, then `eᵀ` and `−eᵀ`.
pub fn m_matrix(n: usize) -> Result<RealMatrix> {
    check_n(n, MAX_VERTEX_DIM)?;
    let masks = subset_masks(n);
    let mut m = RealMatrix::zeros(1 << n, n);
    for (r, &mask) in masks.iter().enumerate() {
        for i in 0..n {
            if mask & (1 << i) != 0 {
                m[(r, i)] = 1.0;
            }
        }
    }
    let last = (1 << n) - 2;
    for i in 0..n {
        m[(last, i)] = 1.0;
        m[(last + 1, i)] = -1.0;
    }
    Ok(m)
}

pub fn b_vector(y: &[f64], d: &WeightVector) -> Result<HPolytope> {
    let n = y.len();
    if n != d.len() {
        return Err(Error::Dimension(format!("y has {} entries, d has {}", n, d.len())));
    }
    check_n(n, MAX_VERTEX_DIM)?;
    let mut b: Vec<f64> = subset_masks(n)
        .iter()
        .map(|&mask| {
            let c: f64 = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| d[i]).sum();
            curve_value(y, d, c)
        })
        .collect();
    let t = sum(y);
    b.push(t);
    b.push(-t);
    Ok(HPolytope { n, b })
}

/// `Mx ≤ b + 1e−9`.
pub fn contains(x: &[f64], p: &HPolytope) -> Result<bool> {
    if x.len() != p.n {
        return Err(Error::Dimension(format!("point of length {} in a {}-dimensional polytope", x.len(), p.n)));
    }
    let tol = 1e-9;
    let inside = subset_masks(p.n).iter().zip(&p.b).all(|(&mask, &bi)| {
        let s: f64 = (0..p.n).filter(|&i| mask & (1 << i) != 0).map(|i| x[i]).sum();
        s <= bi + tol
    });
    let t = sum(x);
    Ok(inside && t <= p.trace() + tol && -t <= -p.trace() + tol)
}

/// `E_b(π)`: `x_{π(j)} = b(π(0..=j)) − b(π(0..j))`.
pub fn extreme_point(pi: &Permutation, p: &HPolytope) -> Result<Vec<f64>> {
    if pi.len() != p.n {
        return Err(Error::Dimension("permutation and polytope sizes differ".into()));
    }
    Ok(extreme_point_rows(pi, p, &mask_rows(p.n)))
}

fn extreme_point_rows(pi: &Permutation, p: &HPolytope, rows: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; p.n];
    let mut mask = 0u32;
    let mut prev = 0.0;
    for &k in pi.images() {
        mask |= 1 << k;
        let cur = p.lookup(rows, mask);
        x[k] = cur - prev;
        prev = cur;
    }
    x
}

pub fn vertices(y: &[f64], d: &WeightVector) -> Result<VertexSet> {
    vertices_with(y, d, Exec::default())
}

/// All `E_b(π)`, deduplicated at 1e−9 in the 1-norm, ordered by the first
/// permutation producing each point.
pub fn vertices_with(y: &[f64], d: &WeightVector, exec: Exec) -> Result<VertexSet> {
    let p = b_vector(y, d)?;
    let perms = Permutation::all(p.n);
    let rows = mask_rows(p.n);
    let pts: Vec<Vec<f64>> = map_slice(exec, &perms, |pi| extreme_point_rows(pi, &p, &rows));

    // cluster in first-coordinate order; nearby points must have nearby x₀
    let mut by_x0: Vec<usize> = (0..pts.len()).collect();
    by_x0.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(a.cmp(&b)));
    let mut owner: Vec<usize> = (0..pts.len()).collect();
    fn root(owner: &mut [usize], mut i: usize) -> usize {
        while owner[i] != i {
            owner[i] = owner[owner[i]];
            i = owner[i];
        }
        i
    }
    for (pos, &i) in by_x0.iter().enumerate() {
        for &j in by_x0[..pos].iter().rev() {
            if pts[i][0] - pts[j][0] > DEDUP_TOL {
                break;
            }
            if dist1(&pts[i], &pts[j]) <= DEDUP_TOL {
                let (ri, rj) = (root(&mut owner, i), root(&mut owner, j));
                // the smallest permutation index represents the cluster
                owner[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    for i in 0..pts.len() {
        owner[i] = root(&mut owner, i);
    }
    let mut slot = vec![usize::MAX; pts.len()];
    let mut points = Vec::new();
    let mut generators: Vec<Vec<Permutation>> = Vec::new();
    for i in 0..pts.len() {
        let r = owner[i];
        if slot[r] == usize::MAX {
            slot[r] = points.len();
            points.push(pts[r].clone());
            generators.push(Vec::new());
        }
        generators[slot[r]].push(perms[i].clone());
    }
    Ok(VertexSet { points, generators })
}

/// Entries of `y/d` sorted the same way as `d`.
pub fn similarly_ordered(y: &[f64], d: &[f64]) -> bool {
    let n = y.len();
    (0..n).all(|i| (0..n).all(|j| (d[i] - d[j]) * (y[i] / d[i] - y[j] / d[j]) >= 0.0))
}

/// The vertex majorizing all of `M_d(y)`: `E_b(π)` with `π` sorting `d`
/// descending. Requires `y ≥ 0`.
pub fn max_corner(y: &[f64], d: &WeightVector) -> Result<Vec<f64>> {
    if y.len() != d.len() {
        return Err(Error::Dimension("y and d lengths differ".into()));
    }
    if let Some(v) = y.iter().find(|&&v| v < 0.0) {
        return Err(Error::Precondition(format!("max corner needs y ≥ 0, found {v}")));
    }
    let order = argsort_desc(d);
    // E_b(π) equals y when y/d is already non-increasing along π
    if order.windows(2).all(|w| y[w[0]] / d[w[0]] >= y[w[1]] / d[w[1]]) {
        return Ok(y.to_vec());
    }
    let p = b_vector(y, d)?;
    extreme_point(&Permutation::new(order).unwrap(), &p)
}

fn directed(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    p.iter().map(|a| q.iter().map(|b| dist1(a, b)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

fn check_sets(p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<usize> {
    let n = p.first().ok_or_else(|| Error::Invalid("empty point set".into()))?.len();
    if q.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    if p.iter().chain(q).any(|v| v.len() != n) {
        return Err(Error::Dimension("points of different lengths".into()));
    }
    Ok(n)
}

/// Hausdorff distance between finite point sets in the 1-norm.
pub fn hausdorff(p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<f64> {
    check_sets(p, q)?;
    Ok(directed(p, q).max(directed(q, p)))
}

/// 1-norm distance from `x` to the convex hull of `pts`.
pub fn hull_distance(x: &[f64], pts: &[Vec<f64>]) -> Result<f64> {
    let n = x.len();
    let m = pts.len();
    // variables: λ (m), u (n), w (n);  Σλ q + u − w = x,  Σλ = 1
    let mut a = RealMatrix::zeros(n + 1, m + 2 * n);
    for (k, q) in pts.iter().enumerate() {
        for i in 0..n {
            a[(i, k)] = q[i];
        }
        a[(n, k)] = 1.0;
    }
    for i in 0..n {
        a[(i, m + i)] = 1.0;
        a[(i, m + n + i)] = -1.0;
    }
    let mut b = x.to_vec();
    b.push(1.0);
    let mut c = vec![0.0; m];
    c.extend(std::iter::repeat_n(1.0, 2 * n));
    Ok(lp::minimize(&a, &b, &c)?.objective.max(0.0))
}

/// Exact Hausdorff distance between the convex hulls of two point sets.
pub fn hull_hausdorff(p: &[Vec<f64>], q: &[Vec<f64>]) -> Result<f64> {
    check_sets(p, q)?;
    let mut h: f64 = 0.0;
    for x in p {
        h = h.max(hull_distance(x, q)?);
    }
    for x in q {
        h = h.max(hull_distance(x, p)?);
    }
    Ok(h)
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_i64(&minor)
            })
            .sum(),
    }
}

/// `max ‖A₀⁻¹‖_{1→1}` over invertible n×n row-submatrices `A₀` of `M`,
/// computed in exact integer arithmetic.
pub fn lipschitz_constant(n: usize) -> Result<f64> {
    check_n(n, MAX_LIPSCHITZ_DIM)?;
    let m = m_matrix(n)?;
    let rows: Vec<Vec<i64>> = m.to_rows().iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
    let total = rows.len();
    let (mut best_num, mut best_den) = (0i64, 1i64);
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<i64>> = idx.iter().map(|&r| rows[r].clone()).collect();
        let det = det_i64(&a);
        if det != 0 {
            // column j of A⁻¹ is column j of adj(A)/det; adj(A)_{ij} = (−1)^{i+j} det(minor_{ji})
            let mut worst = 0i64;
            for j in 0..n {
                let mut col = 0i64;
                for i in 0..n {
                    let minor: Vec<Vec<i64>> = a
                        .iter()
                        .enumerate()
                        .filter(|&(r, _)| r != j)
                        .map(|(_, row)| row.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect())
                        .collect();
                    col += det_i64(&minor).abs();
                }
                worst = worst.max(col);
            }
            let den = det.abs();
            if worst * best_den > best_num * den {
                best_num = worst;
                best_den = den;
            }
        }
        let Some(p) = (0..n).rev().find(|&p| idx[p] < total - n + p) else { break };
        idx[p] += 1;
        for q in p + 1..n {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(best_num as f64 / best_den as f64)
}
