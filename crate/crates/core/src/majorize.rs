//! Classical and d-majorization on real vectors, thermomajorization curves,
//! and transfer matrices certifying a majorization relation.

use serde::{Deserialize, Serialize};

use crate::linalg::{argsort_desc, dist1, norm1, sum, RealMatrix};
use crate::{lp, Error, Result};

/// Strictly positive weight vector `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Dimension("empty weight vector".into()));
        }
        if let Some(bad) = d.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Invalid(format!("weight entries must be positive and finite, got {bad}")));
        }
        Ok(WeightVector(d))
    }

    pub fn ones(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        sum(&self.0)
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl std::ops::Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StochasticKind {
    Doubly,
    Column,
    D(WeightVector),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    pub matrix: RealMatrix,
    pub kind: StochasticKind,
}

impl StochasticMatrix {
    /// Largest violation of the invariants of `kind`: negativity, column
    /// sums, row sums (doubly) or `‖Ad − d‖₁` (d-stochastic).
    pub fn defect(&self) -> f64 {
        let m = &self.matrix;
        let neg = (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).map(|(i, j)| (-m[(i, j)]).max(0.0)).fold(0.0, f64::max);
        let cols = m.column_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        let extra = match &self.kind {
            StochasticKind::Column => 0.0,
            StochasticKind::Doubly => m.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max),
            StochasticKind::D(d) => dist1(&m.mul_vec(d), d),
        };
        neg.max(cols).max(extra)
    }

    pub fn is_valid(&self) -> bool {
        let m = &self.matrix;
        let neg_ok = m.to_rows().iter().flatten().all(|&v| v >= -1e-12);
        let col_ok = m.column_sums().iter().all(|s| (s - 1.0).abs() <= 1e-10);
        let extra_ok = match &self.kind {
            StochasticKind::Column => true,
            StochasticKind::Doubly => m.row_sums().iter().all(|s| (s - 1.0).abs() <= 1e-10),
            StochasticKind::D(d) => dist1(&m.mul_vec(d), d) <= 1e-10,
        };
        neg_ok && col_ok && extra_ok
    }
}

/// Concave piecewise-linear thermomajorization curve, given by its elbows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    pub elbows: Vec<(f64, f64)>,
}

impl ThermoCurve {
    /// Linear interpolation between elbows; constant beyond the last one.
    pub fn eval(&self, c: f64) -> f64 {
        let e = &self.elbows;
        if c <= e[0].0 {
            return e[0].1;
        }
        for w in e.windows(2) {
            let ((c0, f0), (c1, f1)) = (w[0], w[1]);
            if c <= c1 {
                return f0 + (f1 - f0) * (c - c0) / (c1 - c0);
            }
        }
        e.last().unwrap().1
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.elbows.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Norm,
    PositivePart,
    Curve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TieBreak {
    Index,
    #[cfg_attr(not(test), allow(dead_code))]
    ReverseIndex,
}

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::Dimension("empty vector".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite entry".into()));
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn order_by_ratio(v: &[f64], d: &[f64], ties: TieBreak) -> Vec<usize> {
    let r: Vec<f64> = v.iter().zip(d).map(|(a, b)| a / b).collect();
    let mut idx: Vec<usize> = (0..v.len()).collect();
    match ties {
        TieBreak::Index => idx.sort_by(|&i, &j| r[j].total_cmp(&r[i])),
        TieBreak::ReverseIndex => idx.sort_by(|&i, &j| r[j].total_cmp(&r[i]).then(j.cmp(&i))),
    }
    idx
}

/// `x ≺ y`: equal sums and dominated partial sums of the decreasing
/// rearrangements.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    check_len(x, y)?;
    let tol = 1e-10 * norm1(y).max(1.0);
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    if (sum(x) - sum(y)).abs() > tol {
        return Ok(false);
    }
    let (mut px, mut py) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        px += a;
        py += b;
        if px > py + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value of the curve of `y` at `c`, straight from the min formula.
pub fn curve_value(y: &[f64], d: &[f64], c: f64) -> f64 {
    (0..y.len())
        .map(|i| {
            let r = y[i] / d[i];
            let pos: f64 = y.iter().zip(d).map(|(a, b)| (a - r * b).max(0.0)).sum();
            pos + r * c
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn thermo_curve(y: &[f64], d: &WeightVector) -> Result<ThermoCurve> {
    check_len(y, d)?;
    Ok(thermo_curve_ties(y, d, TieBreak::Index))
}

fn thermo_curve_ties(y: &[f64], d: &[f64], ties: TieBreak) -> ThermoCurve {
    let order = order_by_ratio(y, d, ties);
    let mut elbows = vec![(0.0, 0.0)];
    let (mut c, mut f) = (0.0, 0.0);
    for &i in &order {
        c += d[i];
        f += y[i];
        elbows.push((c, f));
    }
    ThermoCurve { elbows }
}

fn d_tol(y: &[f64]) -> f64 {
    1e-9 * norm1(y).max(1.0)
}

/// `x ≺_d y` decided by one of three equivalent criteria.
pub fn d_majorizes(x: &[f64], y: &[f64], d: &WeightVector, method: Method) -> Result<bool> {
    check_len(x, y)?;
    check_len(x, d)?;
    Ok(d_majorizes_ties(x, y, d, method, TieBreak::Index))
}

pub(crate) fn d_majorizes_ties(x: &[f64], y: &[f64], d: &[f64], method: Method, ties: TieBreak) -> bool {
    let tol = d_tol(y);
    if (sum(x) - sum(y)).abs() > tol {
        return false;
    }
    match method {
        Method::Norm => (0..y.len()).all(|i| {
            let t = y[i] / d[i];
            let lhs: f64 = x.iter().zip(d).map(|(a, b)| (a - t * b).abs()).sum();
            let rhs: f64 = y.iter().zip(d).map(|(a, b)| (a - t * b).abs()).sum();
            lhs <= rhs + tol
        }),
        Method::PositivePart => {
            let pos = |v: &[f64], t: f64| -> f64 { v.iter().zip(d).map(|(a, b)| (a - t * b).max(0.0)).sum() };
            x.iter().zip(d).chain(y.iter().zip(d)).map(|(a, b)| a / b).all(|t| pos(x, t) <= pos(y, t) + tol)
        }
        Method::Curve => {
            let curve = thermo_curve_ties(y, d, ties);
            let order = order_by_ratio(x, d, ties);
            let (mut c, mut px) = (0.0, 0.0);
            order[..order.len() - 1].iter().all(|&i| {
                c += d[i];
                px += x[i];
                px <= curve.eval(c) + tol
            })
        }
    }
}

/// Doubly stochastic `A` with `Ay = x`, a product of at most n−1 T-transforms.
pub fn doubly_stochastic_transfer(x: &[f64], y: &[f64]) -> Result<StochasticMatrix> {
    if !majorizes(x, y)? {
        return Err(Error::Precondition("x is not majorized by y".into()));
    }
    let n = x.len();
    let scale = norm1(y).max(1.0);
    let kind = StochasticKind::Doubly;
    if x == y {
        return Ok(StochasticMatrix { matrix: RealMatrix::identity(n), kind });
    }
    let spread = x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - x.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if spread <= 1e-15 * scale {
        return Ok(StochasticMatrix { matrix: RealMatrix::from_fn(n, n, |_, _| 1.0 / n as f64), kind });
    }
    let (sx, sy) = (argsort_desc(x), argsort_desc(y));
    let xs: Vec<f64> = sx.iter().map(|&i| x[i]).collect();
    let mut z: Vec<f64> = sy.iter().map(|&i| y[i]).collect();
    let mut a = RealMatrix::identity(n);
    let eps = 1e-15 * scale;
    for _ in 0..n {
        let Some(j) = (0..n).rev().find(|&j| z[j] > xs[j] + eps) else { break };
        let Some(k) = (j + 1..n).find(|&k| z[k] < xs[k] - eps) else { break };
        let delta = (z[j] - xs[j]).min(xs[k] - z[k]);
        let mix = delta / (z[j] - z[k]);
        let mut t = RealMatrix::identity(n);
        t[(j, j)] = 1.0 - mix;
        t[(k, k)] = 1.0 - mix;
        t[(j, k)] = mix;
        t[(k, j)] = mix;
        if z[j] - xs[j] <= xs[k] - z[k] {
            z[k] += z[j] - xs[j];
            z[j] = xs[j];
        } else {
            z[j] -= xs[k] - z[k];
            z[k] = xs[k];
        }
        a = t.mul(&a);
    }
    let mut out = RealMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            out[(sx[i], sy[k])] = a[(i, k)];
        }
    }
    let res = dist1(&out.mul_vec(y), x);
    if res > 1e-9 * scale {
        return Err(Error::Numerical(format!("T-transform chain misses the target by {res:e}")));
    }
    Ok(StochasticMatrix { matrix: out, kind })
}

/// Sends the positive mass of `y` to slot 0 and the negative mass to slot 1.
pub fn sign_collapse(y: &[f64]) -> RealMatrix {
    let n = y.len();
    let mut m = RealMatrix::zeros(n, n);
    for (j, &v) in y.iter().enumerate() {
        let slot = if v >= 0.0 || n == 1 { 0 } else { 1 };
        m[(slot, j)] = 1.0;
    }
    m
}

/// Column-stochastic `A` with `Ay = x`, assuming equal sums and `‖x‖₁ ≤ ‖y‖₁`.
pub fn column_stochastic_transfer(x: &[f64], y: &[f64]) -> Result<StochasticMatrix> {
    check_len(x, y)?;
    let n = x.len();
    let tol = 1e-10 * norm1(y).max(1.0);
    if (sum(x) - sum(y)).abs() > tol || norm1(x) > norm1(y) + tol {
        return Err(Error::Precondition("need eᵀx = eᵀy and ‖x‖₁ ≤ ‖y‖₁".into()));
    }
    let kind = StochasticKind::Column;
    if x == y || n == 1 {
        return Ok(StochasticMatrix { matrix: RealMatrix::identity(n), kind });
    }
    let m0 = sign_collapse(y);
    let z = m0.mul_vec(y);
    let d = doubly_stochastic_transfer(x, &z)?;
    Ok(StochasticMatrix { matrix: d.matrix.mul(&m0), kind })
}

/// d-stochastic `A` with `Ay = x`, found by a phase-1 simplex over the n²
/// entries.
pub fn d_stochastic_transfer(x: &[f64], y: &[f64], d: &WeightVector) -> Result<StochasticMatrix> {
    if !d_majorizes(x, y, d, Method::Norm)? {
        return Err(Error::Precondition("x is not d-majorized by y".into()));
    }
    let n = x.len();
    let kind = StochasticKind::D(d.clone());
    if x == y {
        return Ok(StochasticMatrix { matrix: RealMatrix::identity(n), kind });
    }
    let scale = norm1(y).max(1.0);
    let minimal = minimal_element(sum(y), d);
    if dist1(x, &minimal) <= 1e-14 * scale {
        let total = d.total();
        return Ok(StochasticMatrix { matrix: RealMatrix::from_fn(n, n, |i, _| d[i] / total), kind });
    }
    let nv = n * n;
    let mut a = RealMatrix::zeros(3 * n, nv);
    let mut b = vec![0.0; 3 * n];
    for j in 0..n {
        for i in 0..n {
            a[(j, i * n + j)] = 1.0;
        }
        b[j] = 1.0;
    }
    for i in 0..n {
        for j in 0..n {
            a[(n + i, i * n + j)] = d[j];
            a[(2 * n + i, i * n + j)] = y[j];
        }
        b[n + i] = d[i];
        b[2 * n + i] = x[i];
    }
    let sol = lp::feasible_point(&a, &b).map_err(|e| Error::Numerical(format!("transfer LP failed: {e}")))?;
    let matrix = RealMatrix::from_fn(n, n, |i, j| sol[i * n + j]);
    let res = dist1(&matrix.mul_vec(y), x)
        .max(dist1(&matrix.mul_vec(d), d))
        .max(matrix.column_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max));
    if res > 1e-8 * scale {
        return Err(Error::Numerical(format!("transfer LP residual {res:e}")));
    }
    Ok(StochasticMatrix { matrix, kind })
}

/// `(trace/eᵀd)·d`, the least element of its trace class.
pub fn minimal_element(trace: f64, d: &WeightVector) -> Vec<f64> {
    let s = trace / d.total();
    d.iter().map(|v| v * s).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalElement {
    pub index: usize,
    pub vector: Vec<f64>,
    /// False when the minimal entry of d is attained more than once.
    pub unique: bool,
}

/// `(eᵀd)·e_k` with `k` the first index of a minimal entry of `d`.
pub fn maximal_element(d: &WeightVector) -> MaximalElement {
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let index = d.iter().position(|&v| v == min).unwrap();
    let mut vector = vec![0.0; d.len()];
    vector[index] = d.total();
    let unique = d.iter().filter(|&&v| v == min).count() == 1;
    MaximalElement { index, vector, unique }
}
