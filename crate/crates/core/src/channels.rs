//! Linear maps on matrices: Choi matrices, CP/TP/unital and strict
//! positivity checks, kernel block forms, channels between Hermitian
//! matrices, and matrix (D-)majorization.

use crate::linalg::{eigvals_hermitian, hermitian_eig, psd_sqrt, trace_norm, trace_norm_hermitian, ComplexMatrix, RealMatrix};
use crate::majorize::{column_stochastic_transfer, majorizes, WeightVector};
use crate::{Error, Result};
use num_complex::Complex64;

const CHECK_TOL: f64 = 1e-9;
const KERNEL_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `T: ℂ^{n×n} → ℂ^{k×k}` as a `k²×n²` matrix on column-stacked inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| Error::Invalid("empty Kraus set".into()))?;
        let (k, n) = (first.rows(), first.cols());
        if operators.iter().any(|op| op.rows() != k || op.cols() != n) {
            return Err(Error::Dimension("Kraus operators differ in shape".into()));
        }
        Ok(KrausSet { operators })
    }

    /// `max |Σ K†K − 𝟙|`
    pub fn completeness_defect(&self) -> f64 {
        let n = self.operators[0].cols();
        let s = self.operators.iter().fold(ComplexMatrix::zeros(n, n), |acc, k| acc.add(&k.adjoint().mul(k)));
        s.sub(&ComplexMatrix::identity(n)).max_abs()
    }
}

impl SuperOperator {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim_out * dim_out || matrix.cols() != dim_in * dim_in {
            return Err(Error::Dimension(format!(
                "a map from {dim_in}x{dim_in} to {dim_out}x{dim_out} needs a {}x{} matrix",
                dim_out * dim_out,
                dim_in * dim_in
            )));
        }
        Ok(SuperOperator { dim_in, dim_out, matrix })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(dim_in: usize, dim_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for j in 0..dim_in {
            for i in 0..dim_in {
                let out = f(&ComplexMatrix::unit(dim_in, i, j));
                if out.rows() != dim_out || out.cols() != dim_out {
                    return Err(Error::Dimension("map output has the wrong size".into()));
                }
                for (r, v) in out.vec().into_iter().enumerate() {
                    m[(r, i + j * dim_in)] = v;
                }
            }
        }
        Ok(SuperOperator { dim_in, dim_out, matrix: m })
    }

    /// `X ↦ Σ K X K†`
    pub fn from_kraus(k: &KrausSet) -> Self {
        let (dim_out, dim_in) = (k.operators[0].rows(), k.operators[0].cols());
        let m = k.operators.iter().fold(ComplexMatrix::zeros(dim_out * dim_out, dim_in * dim_in), |acc, op| acc.add(&op.conj().kron(op)));
        SuperOperator { dim_in, dim_out, matrix: m }
    }

    pub fn identity(n: usize) -> Self {
        SuperOperator { dim_in: n, dim_out: n, matrix: ComplexMatrix::identity(n * n) }
    }

    pub fn transpose(n: usize) -> Self {
        Self::from_fn(n, n, |x| x.transpose()).unwrap()
    }

    /// `X ↦ tr(X)·ρ`
    pub fn trace_projection(dim_in: usize, rho: &ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::Dimension("target state must be square".into()));
        }
        Self::from_fn(dim_in, rho.rows(), |x| rho.scale(x.trace()))
    }

    /// `X ↦ Σ_{k,i} M_ki ⟨e_i|X|e_i⟩ |e_k⟩⟨e_k|`
    pub fn pinching(m: &RealMatrix) -> Self {
        let (k, n) = (m.rows(), m.cols());
        Self::from_fn(n, k, |x| {
            let mut out = ComplexMatrix::zeros(k, k);
            for r in 0..k {
                out[(r, r)] = (0..n).map(|i| x[(i, i)] * m[(r, i)]).sum();
            }
            out
        })
        .unwrap()
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::Dimension(format!("map acts on {0}x{0} matrices", self.dim_in)));
        }
        Ok(ComplexMatrix::unvec(&self.matrix.mul_vec(&x.vec()), self.dim_out, self.dim_out))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim_out != self.dim_in {
            return Err(Error::Dimension("maps cannot be composed".into()));
        }
        Ok(SuperOperator { dim_in: other.dim_in, dim_out: self.dim_out, matrix: self.matrix.mul(&other.matrix) })
    }

    fn unit_image(&self, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unvec(&self.matrix.column(i + j * self.dim_in), self.dim_out, self.dim_out)
    }
}

/// Block `(j, k)` holds `T(|e_j⟩⟨e_k|)`.
pub fn choi(t: &SuperOperator) -> ChoiMatrix {
    let (n, k) = (t.dim_in, t.dim_out);
    let mut m = ComplexMatrix::zeros(n * k, n * k);
    for j in 0..n {
        for l in 0..n {
            let block = t.unit_image(j, l);
            for r in 0..k {
                for s in 0..k {
                    m[(j * k + r, l * k + s)] = block[(r, s)];
                }
            }
        }
    }
    ChoiMatrix { matrix: m }
}

pub fn is_cp(t: &SuperOperator) -> bool {
    let ch = choi(t).matrix;
    if !ch.is_hermitian(HERMITIAN_TOL * ch.max_abs().max(1.0)) {
        return false;
    }
    match eigvals_hermitian(&ch.hermitian_part()) {
        Ok(v) => {
            let scale = v.iter().map(|x| x.abs()).fold(1.0, f64::max);
            v.last().is_none_or(|&low| low >= -CHECK_TOL * scale)
        }
        Err(_) => false,
    }
}

pub fn is_tp(t: &SuperOperator) -> bool {
    (0..t.dim_in).all(|j| {
        (0..t.dim_in).all(|k| {
            let want = if j == k { 1.0 } else { 0.0 };
            (t.unit_image(j, k).trace() - c(want)).norm() <= CHECK_TOL
        })
    })
}

pub fn is_unital(t: &SuperOperator) -> bool {
    t.dim_in == t.dim_out
        && t.apply(&ComplexMatrix::identity(t.dim_in)).is_ok_and(|o| o.sub(&ComplexMatrix::identity(t.dim_out)).max_abs() <= CHECK_TOL)
}

/// `T(𝟙) > 0`; meaningful for positive maps only.
pub fn is_strictly_positive(t: &SuperOperator) -> bool {
    let one = t.apply(&ComplexMatrix::identity(t.dim_in)).unwrap();
    one.is_hermitian(HERMITIAN_TOL) && eigvals_hermitian(&one.hermitian_part()).is_ok_and(|v| v.last().is_none_or(|&low| low > KERNEL_TOL))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelBlockForm {
    /// Dimension of `ker T(𝟙)`.
    pub m: usize,
    /// Eigenbasis of `T(𝟙)` with the kernel in the last `m` columns.
    pub unitary: ComplexMatrix,
    /// Projection onto the range of `T(𝟙)`.
    pub projector: ComplexMatrix,
}

/// Every `T(X)` of a positive map lives in the range of `T(𝟙)`; checked on
/// the matrix units.
pub fn kernel_block_form(t: &SuperOperator) -> Result<KernelBlockForm> {
    let k = t.dim_out;
    let one = t.apply(&ComplexMatrix::identity(t.dim_in))?;
    if !one.is_hermitian(HERMITIAN_TOL * one.max_abs().max(1.0)) {
        return Err(Error::Precondition("T(𝟙) is not Hermitian, so T is not positive".into()));
    }
    let (vals, u) = hermitian_eig(&one.hermitian_part())?;
    let m = vals.iter().filter(|&&v| v < KERNEL_TOL).count();
    let keep: Vec<f64> = (0..k).map(|i| if i < k - m { 1.0 } else { 0.0 }).collect();
    let projector = u.mul(&ComplexMatrix::diag_real(&keep)).mul(&u.adjoint());
    for i in 0..t.dim_in {
        for j in 0..t.dim_in {
            let e = t.unit_image(i, j);
            if projector.mul(&e).mul(&projector).sub(&e).max_abs() > 1e-8 {
                return Err(Error::Precondition("image leaves the range of T(𝟙), so T is not positive".into()));
            }
        }
    }
    Ok(KernelBlockForm { m, unitary: u, projector })
}

fn check_hermitian(a: &ComplexMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{what} must be square")));
    }
    if !a.is_hermitian(HERMITIAN_TOL * a.max_abs().max(1.0)) {
        return Err(Error::Invalid(format!("{what} is not Hermitian")));
    }
    Ok(())
}

/// A CPTP map with `T(B) = A`, using the maximally mixed state wherever `B`
/// leaves the image free.
pub fn channel_between(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SuperOperator> {
    let n = a.rows();
    channel_between_with_fill(a, b, &vec![1.0 / n as f64; n])
}

/// Like [`channel_between`]; eigenvectors of `B` with eigenvalue zero are
/// sent to `Σ_k fill_k |u_k⟩⟨u_k|`, with `u_k` the eigenvectors of `A` by
/// descending eigenvalue.
pub fn channel_between_with_fill(a: &ComplexMatrix, b: &ComplexMatrix, fill: &[f64]) -> Result<SuperOperator> {
    check_hermitian(a, "A")?;
    check_hermitian(b, "B")?;
    let n = a.rows();
    if b.rows() != n || fill.len() != n {
        return Err(Error::Dimension("A, B and the fill state must have one size".into()));
    }
    if fill.iter().any(|&v| v < 0.0) || (fill.iter().sum::<f64>() - 1.0).abs() > CHECK_TOL {
        return Err(Error::Invalid("fill must be a probability vector".into()));
    }
    let (x, ua) = hermitian_eig(&a.hermitian_part())?;
    let (y, vb) = hermitian_eig(&b.hermitian_part())?;
    let (n1a, n1b) = (x.iter().map(|v| v.abs()).sum::<f64>(), y.iter().map(|v| v.abs()).sum::<f64>());
    if (a.trace().re - b.trace().re).abs() > CHECK_TOL || n1a > n1b + CHECK_TOL {
        return Err(Error::Precondition("need tr A = tr B and ‖A‖₁ ≤ ‖B‖₁".into()));
    }
    // absorb the admitted slack so the vector transfer accepts the pair
    let mut xs = x.clone();
    let shift = (y.iter().sum::<f64>() - xs.iter().sum::<f64>()) / n as f64;
    xs.iter_mut().for_each(|v| *v += shift);
    let excess = xs.iter().map(|v| v.abs()).sum::<f64>() - n1b;
    let xs = if excess > 0.0 { shrink_norm(&xs, n1b) } else { xs };
    let mut mt = column_stochastic_transfer(&xs, &y)?.matrix;
    let scale = n1b.max(1.0);
    for (j, &yj) in y.iter().enumerate() {
        if yj.abs() <= 1e-12 * scale {
            for (k, &f) in fill.iter().enumerate() {
                mt[(k, j)] = f;
            }
        }
    }
    let mut ops = Vec::with_capacity(n * n);
    for k in 0..n {
        for i in 0..n {
            let w = mt[(k, i)];
            if w > 0.0 {
                // √M_ki · U|e_k⟩⟨e_i|V†
                ops.push(ComplexMatrix::outer(&ua.column(k), &vb.column(i)).scale_real(w.sqrt()));
            }
        }
    }
    let t = SuperOperator::from_kraus(&KrausSet::new(ops)?);
    let err = trace_norm(&t.apply(b)?.sub(a))?;
    if err > 1e-8 * scale {
        return Err(Error::Numerical(format!("constructed channel misses A by {err:e}")));
    }
    Ok(t)
}

/// Pulls the entries of `x` towards their mean until `‖x‖₁ = target`.
fn shrink_norm(x: &[f64], target: f64) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let norm = |s: f64| x.iter().map(|v| (mean + s * (v - mean)).abs()).sum::<f64>();
    if norm(0.0) > target {
        // one sign throughout; the slack is pure roundoff
        return x.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if norm(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x.iter().map(|v| mean + lo * (v - mean)).collect()
}

/// `λ(A) ≺ λ(B)`
pub fn matrix_majorizes(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    check_hermitian(a, "A")?;
    check_hermitian(b, "B")?;
    if a.rows() != b.rows() {
        return Err(Error::Dimension("A and B differ in size".into()));
    }
    majorizes(&eigvals_hermitian(&a.hermitian_part())?, &eigvals_hermitian(&b.hermitian_part())?)
}

/// `A ≺_D B` for 2×2 Hermitian matrices and `D = diag(d)`: trace equality,
/// the trace-norm conditions at the two generalized eigenvalues of `B`, and
/// the generalized-fidelity inequality.
pub fn d_matrix_majorizes_2x2(a: &ComplexMatrix, b: &ComplexMatrix, d: &WeightVector) -> Result<bool> {
    check_hermitian(a, "A")?;
    check_hermitian(b, "B")?;
    if a.rows() != 2 || b.rows() != 2 || d.len() != 2 {
        return Err(Error::Dimension("2x2 D-majorization needs 2x2 inputs".into()));
    }
    let (a, b) = (a.hermitian_part(), b.hermitian_part());
    let dm = ComplexMatrix::diag_real(d);
    let scale = trace_norm_hermitian(&b)?.max(trace_norm_hermitian(&a)?).max(1.0);
    let tol = CHECK_TOL * scale;
    if (a.trace().re - b.trace().re).abs() > tol {
        return Ok(false);
    }
    let whitened = ComplexMatrix::from_fn(2, 2, |i, j| b[(i, j)] / (d[i] * d[j]).sqrt());
    let bs = eigvals_hermitian(&whitened.hermitian_part())?;
    let (b2, b1) = (bs[0], bs[1]);
    for bi in [b1, b2] {
        let shifted = |x: &ComplexMatrix| trace_norm_hermitian(&x.sub(&dm.scale_real(bi)));
        if shifted(&a)? > shifted(&b)? + tol {
            return Ok(false);
        }
    }
    let fidelity = |x: &ComplexMatrix| -> Result<f64> {
        let p = x.sub(&dm.scale_real(b1)).hermitian_part();
        let q = dm.scale_real(b2).sub(x).hermitian_part();
        let (sp, sq) = (psd_sqrt(&p, tol)?, psd_sqrt(&q, tol)?);
        trace_norm(&sp.mul(&sq))
    };
    Ok(fidelity(&a)? >= fidelity(&b)? - tol)
}

/// `D − d_j ρ ≥ 0`
pub fn pure_state_reachable(rho: &ComplexMatrix, d: &WeightVector, j: usize) -> Result<bool> {
    check_hermitian(rho, "ρ")?;
    let n = rho.rows();
    if d.len() != n {
        return Err(Error::Dimension("ρ and d differ in size".into()));
    }
    if j >= n {
        return Err(Error::Dimension(format!("level {j} out of range")));
    }
    let vals = eigvals_hermitian(&rho.hermitian_part())?;
    if vals[n - 1] < -CHECK_TOL || (rho.trace().re - 1.0).abs() > CHECK_TOL {
        return Err(Error::Invalid("ρ is not a density matrix".into()));
    }
    let m = ComplexMatrix::diag_real(d).sub(&rho.scale_real(d[j])).hermitian_part();
    Ok(eigvals_hermitian(&m)?[n - 1] >= -CHECK_TOL)
}

/// A pure state `ψ` in `ker T(𝟙)` and `‖T(ψψ†) − ψψ†‖₁`, which is 2.
pub fn identity_distance_witness(t: &SuperOperator) -> Result<(Vec<Complex64>, f64)> {
    if t.dim_in != t.dim_out {
        return Err(Error::Dimension("witness needs a map on one space".into()));
    }
    if !is_tp(t) {
        return Err(Error::Precondition("map is not trace preserving".into()));
    }
    let form = kernel_block_form(t)?;
    if form.m == 0 {
        return Err(Error::Precondition("T(𝟙) is nonsingular".into()));
    }
    let psi = form.unitary.column(t.dim_in - 1);
    let p = ComplexMatrix::outer(&psi, &psi);
    let value = trace_norm(&t.apply(&p)?.sub(&p))?;
    if (value - 2.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("witness value {value} differs from 2")));
    }
    Ok((psi, value))
}

/// The qutrit channel whose image sits in the upper-left 2×2 corner:
/// `T(A) = [[a₁₁, i(a₁₂+a₁₃)/√2, 0], [−i(a₂₁+a₃₁)/√2, a₂₂+a₃₃, 0], [0, 0, 0]]`.
pub fn corner_qutrit_channel() -> SuperOperator {
    let h = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    SuperOperator::from_fn(3, 3, |x| {
        let mut out = ComplexMatrix::zeros(3, 3);
        out[(0, 0)] = x[(0, 0)];
        out[(0, 1)] = h * (x[(0, 1)] + x[(0, 2)]);
        out[(1, 0)] = -h * (x[(1, 0)] + x[(2, 0)]);
        out[(1, 1)] = x[(1, 1)] + x[(2, 2)];
        out
    })
    .unwrap()
}

/// `T(A) = diag(a₁₁ + a₂₂/2, a₂₂/2)`
pub fn half_decay_qubit_channel() -> SuperOperator {
    SuperOperator::from_fn(2, 2, |x| {
        let mut out = ComplexMatrix::zeros(2, 2);
        out[(0, 0)] = x[(0, 0)] + x[(1, 1)] * 0.5;
        out[(1, 1)] = x[(1, 1)] * 0.5;
        out
    })
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorize::{d_majorizes, Method};
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn e(n: usize, i: usize) -> Vec<Complex64> {
        (0..n).map(|k| c(if k == i { 1.0 } else { 0.0 })).collect()
    }

    fn random_channel(rng: &mut SplitMix64, n: usize, kraus: usize) -> SuperOperator {
        let gs: Vec<ComplexMatrix> = (0..kraus).map(|_| sample::gaussian_matrix(rng, n)).collect();
        let s = gs.iter().fold(ComplexMatrix::zeros(n, n), |acc, g| acc.add(&g.adjoint().mul(g)));
        let inv_sqrt = crate::linalg::hermitian_fn(&s.hermitian_part(), |v| 1.0 / v.sqrt()).unwrap();
        SuperOperator::from_kraus(&KrausSet::new(gs.iter().map(|g| g.mul(&inv_sqrt)).collect()).unwrap())
    }

    /// Hermitian pair with equal traces and `‖A‖₁ ≤ ‖B‖₁`.
    fn random_pair(rng: &mut SplitMix64, n: usize) -> (ComplexMatrix, ComplexMatrix) {
        loop {
            let b = sample::hermitian(rng, n);
            let mut a = sample::hermitian(rng, n).scale_real(rng.random_range(0.05..1.0));
            let shift = (b.trace().re - a.trace().re) / n as f64;
            a = a.add(&ComplexMatrix::identity(n).scale_real(shift));
            if trace_norm_hermitian(&a).unwrap() <= trace_norm_hermitian(&b).unwrap() {
                return (a, b);
            }
        }
    }

    #[test]
    fn choi_examples() {
        let id = choi(&SuperOperator::identity(3)).matrix;
        let omega: Vec<Complex64> = (0..3).flat_map(|j| e(3, j)).collect::<Vec<_>>();
        let omega: Vec<Complex64> = (0..9).map(|r| if r % 4 == 0 { c(1.0) } else { omega[r] * 0.0 }).collect();
        assert!(id.sub(&ComplexMatrix::outer(&omega, &omega)).max_abs() < 1e-15);

        let m = RealMatrix::from_rows(&[vec![0.5, 0.0, 1.0], vec![0.25, 1.0, 0.0], vec![0.25, 0.0, 0.0]]).unwrap();
        let ch = choi(&SuperOperator::pinching(&m)).matrix;
        for r in 0..9 {
            for s in 0..9 {
                let want = if r == s { m[(r % 3, r / 3)] } else { 0.0 };
                assert_abs_diff_eq!(ch[(r, s)].re, want, epsilon = 1e-15);
                assert_eq!(ch[(r, s)].im, 0.0);
            }
        }

        let psi = vec![c(0.6), Complex64::new(0.0, 0.8)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        let ch = choi(&SuperOperator::trace_projection(3, &rho).unwrap()).matrix;
        assert!(ch.sub(&ComplexMatrix::identity(3).kron(&rho)).max_abs() < 1e-15);
    }

    #[test]
    fn property_checks() {
        let id = SuperOperator::identity(3);
        assert!(is_cp(&id) && is_tp(&id) && is_unital(&id) && is_strictly_positive(&id));
        let t = SuperOperator::transpose(2);
        assert!(!is_cp(&t) && is_tp(&t) && is_unital(&t));
        let pure = ComplexMatrix::unit(2, 0, 0);
        let tp = SuperOperator::trace_projection(2, &pure).unwrap();
        assert!(is_cp(&tp) && is_tp(&tp) && !is_unital(&tp) && !is_strictly_positive(&tp));
        let sp = half_decay_qubit_channel();
        assert!(is_cp(&sp) && is_tp(&sp) && is_strictly_positive(&sp));
        let one = sp.apply(&ComplexMatrix::identity(2)).unwrap();
        assert!(one.sub(&ComplexMatrix::diag_real(&[1.5, 0.5])).max_abs() < 1e-15);
    }

    #[test]
    fn kraus_and_tabulated_maps_agree() {
        let mut rng = SplitMix64::seed_from_u64(41);
        let ks: Vec<ComplexMatrix> = (0..3).map(|_| sample::gaussian_matrix(&mut rng, 3)).collect();
        let from_k = SuperOperator::from_kraus(&KrausSet::new(ks.clone()).unwrap());
        let tab =
            SuperOperator::from_fn(3, 3, |x| ks.iter().fold(ComplexMatrix::zeros(3, 3), |acc, k| acc.add(&k.mul(x).mul(&k.adjoint()))))
                .unwrap();
        assert!(from_k.matrix().sub(tab.matrix()).max_abs() < 1e-13);
        let x = sample::gaussian_matrix(&mut rng, 3);
        let direct = ks.iter().fold(ComplexMatrix::zeros(3, 3), |acc, k| acc.add(&k.mul(&x).mul(&k.adjoint())));
        assert!(from_k.apply(&x).unwrap().sub(&direct).max_abs() < 1e-13);
    }

    #[test]
    fn corner_channel() {
        let t = corner_qutrit_channel();
        assert!(is_cp(&t) && is_tp(&t) && !is_strictly_positive(&t));
        let vals = eigvals_hermitian(&choi(&t).matrix).unwrap();
        assert_abs_diff_eq!(vals[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        assert!(vals[2..].iter().all(|v| v.abs() < 1e-12));
        let form = kernel_block_form(&t).unwrap();
        assert_eq!(form.m, 1);
        assert!(form.projector.sub(&ComplexMatrix::diag_real(&[1.0, 1.0, 0.0])).max_abs() < 1e-12);
        let (psi, v) = identity_distance_witness(&t).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(psi[2].norm(), 1.0, epsilon = 1e-12);
        // not a trace projection: two different states have different images
        let a = t.apply(&ComplexMatrix::unit(3, 0, 0)).unwrap();
        let b = t.apply(&ComplexMatrix::unit(3, 1, 1)).unwrap();
        assert!(a.sub(&b).max_abs() > 0.5);
    }

    #[test]
    fn kernel_forms() {
        let f = kernel_block_form(&half_decay_qubit_channel()).unwrap();
        assert_eq!(f.m, 0);
        assert!(f.projector.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-12);
        let tp = SuperOperator::trace_projection(2, &ComplexMatrix::unit(2, 0, 0)).unwrap();
        let f = kernel_block_form(&tp).unwrap();
        assert_eq!(f.m, 1);
        assert!(f.projector.sub(&ComplexMatrix::unit(2, 0, 0)).max_abs() < 1e-12);
        let (psi, v) = identity_distance_witness(&tp).unwrap();
        assert_abs_diff_eq!(psi[1].norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
        assert!(matches!(identity_distance_witness(&SuperOperator::identity(2)), Err(Error::Precondition(_))));
        // a map that is not positive can leave the range of T(𝟙)
        let bad = SuperOperator::from_fn(2, 2, |x| {
            let mut o = ComplexMatrix::zeros(2, 2);
            o[(0, 0)] = x[(0, 0)] + x[(1, 1)];
            o[(1, 1)] = x[(0, 1)] + x[(1, 0)];
            o
        })
        .unwrap();
        assert!(matches!(kernel_block_form(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn channel_between_examples() {
        let mut rng = SplitMix64::seed_from_u64(42);
        let b = sample::hermitian(&mut rng, 3);
        let t = channel_between(&b, &b).unwrap();
        assert!(trace_norm(&t.apply(&b).unwrap().sub(&b)).unwrap() <= 1e-8);
        let rho = sample::density_matrix(&mut rng, 3);
        let b = sample::density_matrix(&mut rng, 3);
        let t = channel_between(&rho, &b).unwrap();
        assert!(is_cp(&t) && is_tp(&t));
        assert!(trace_norm(&t.apply(&b).unwrap().sub(&rho)).unwrap() <= 1e-8);
        let big = ComplexMatrix::identity(3).scale_real(2.0);
        assert!(matches!(channel_between(&big, &b), Err(Error::Precondition(_))));
    }

    #[test]
    fn channel_fill_for_singular_b() {
        let b = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let a = ComplexMatrix::diag_real(&[0.3, 0.7]);
        let t = channel_between(&a, &b).unwrap();
        assert!(is_cp(&t) && is_tp(&t));
        let free = t.apply(&ComplexMatrix::unit(2, 1, 1)).unwrap();
        assert!(free.sub(&ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-12);
        // fill weights follow the eigenvalues of A in descending order
        let t = channel_between_with_fill(&a, &b, &[0.0, 1.0]).unwrap();
        let free = t.apply(&ComplexMatrix::unit(2, 1, 1)).unwrap();
        assert!(free.sub(&ComplexMatrix::diag_real(&[1.0, 0.0])).max_abs() < 1e-12);
    }

    #[test]
    fn matrix_majorization_examples() {
        let mut rng = SplitMix64::seed_from_u64(43);
        let a = sample::hermitian(&mut rng, 4);
        let u = sample::haar_unitary(&mut rng, 4);
        assert!(matrix_majorizes(&u.mul(&a).mul(&u.adjoint()), &a).unwrap());
        let rho = sample::density_matrix(&mut rng, 4);
        assert!(matrix_majorizes(&ComplexMatrix::identity(4).scale_real(0.25), &rho).unwrap());
        let (x, y) = ([0.3, 0.3, 0.4], [0.7, 0.1, 0.2]);
        let dx = ComplexMatrix::diag_real(&x);
        let dy = ComplexMatrix::diag_real(&y);
        assert_eq!(matrix_majorizes(&dx, &dy).unwrap(), majorizes(&x, &y).unwrap());
        assert_eq!(matrix_majorizes(&dy, &dx).unwrap(), majorizes(&y, &x).unwrap());
        assert!(matrix_majorizes(&sample::gaussian_matrix(&mut rng, 2), &dx).is_err());
    }

    #[test]
    fn pure_state_examples() {
        let mut rng = SplitMix64::seed_from_u64(44);
        let d = WeightVector::new(vec![3.0, 2.0, 1.0]).unwrap();
        for _ in 0..20 {
            let rho = sample::density_matrix(&mut rng, 3);
            assert!(pure_state_reachable(&rho, &d, 2).unwrap());
        }
        assert!(pure_state_reachable(&ComplexMatrix::unit(3, 1, 1), &d, 1).unwrap());
        assert!(!pure_state_reachable(&ComplexMatrix::unit(3, 2, 2), &d, 0).unwrap());
        assert!(pure_state_reachable(&ComplexMatrix::unit(3, 2, 2).scale_real(2.0), &d, 0).is_err());
    }

    /// `‖A − tD‖₁ ≤ ‖B − tD‖₁` on a fine grid plus the generalized eigenvalues.
    fn norm_oracle(a: &ComplexMatrix, b: &ComplexMatrix, d: &WeightVector) -> bool {
        let dm = ComplexMatrix::diag_real(d);
        let w = ComplexMatrix::from_fn(2, 2, |i, j| b[(i, j)] / (d[i] * d[j]).sqrt());
        let bs = eigvals_hermitian(&w).unwrap();
        let mut ts: Vec<f64> = (-400..=400).map(|k| k as f64 * 0.02).collect();
        ts.extend(bs);
        let tol = 1e-9 * trace_norm_hermitian(b).unwrap().max(1.0);
        (a.trace().re - b.trace().re).abs() <= tol
            && ts.iter().all(|&t| {
                trace_norm_hermitian(&a.sub(&dm.scale_real(t))).unwrap() <= trace_norm_hermitian(&b.sub(&dm.scale_real(t))).unwrap() + 1e-7
            })
    }

    #[test]
    fn d_majorization_2x2_examples() {
        let mut rng = SplitMix64::seed_from_u64(45);
        let d = WeightVector::new(vec![0.7, 0.3]).unwrap();
        for _ in 0..50 {
            let a = sample::hermitian(&mut rng, 2);
            assert!(d_matrix_majorizes_2x2(&a, &a, &d).unwrap());
        }
        for _ in 0..200 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let t = rng.random_range(0.0..1.0);
            let y = [x[0] + x[1] - t * (x[0] + x[1]) + t * x[0], t * x[1]];
            let (dx, dy) = (ComplexMatrix::diag_real(&x), ComplexMatrix::diag_real(&y));
            assert_eq!(d_matrix_majorizes_2x2(&dx, &dy, &d).unwrap(), d_majorizes(&x, &y, &d, Method::Norm).unwrap());
            assert_eq!(d_matrix_majorizes_2x2(&dy, &dx, &d).unwrap(), d_majorizes(&y, &x, &d, Method::Norm).unwrap());
        }
        assert!(d_matrix_majorizes_2x2(&ComplexMatrix::identity(3), &ComplexMatrix::identity(3), &d).is_err());
    }

    #[test]
    fn d_majorization_2x2_matches_norm_family() {
        let mut rng = SplitMix64::seed_from_u64(46);
        let mut agree = 0;
        for _ in 0..300 {
            let d = sample::weights(&mut rng, 2);
            let b = sample::hermitian(&mut rng, 2);
            let mut a = sample::hermitian(&mut rng, 2).scale_real(rng.random_range(0.1..1.5));
            a = a.add(&ComplexMatrix::identity(2).scale_real((b.trace().re - a.trace().re) / 2.0));
            if d_matrix_majorizes_2x2(&a, &b, &d).unwrap() == norm_oracle(&a, &b, &d) {
                agree += 1;
            }
        }
        assert_eq!(agree, 300);
    }

    #[test]
    fn identity_weights_reduce_to_eigenvalue_majorization() {
        let mut rng = SplitMix64::seed_from_u64(47);
        let one = WeightVector::ones(2);
        for _ in 0..300 {
            let b = sample::hermitian(&mut rng, 2);
            let mut a = sample::hermitian(&mut rng, 2).scale_real(rng.random_range(0.1..1.5));
            a = a.add(&ComplexMatrix::identity(2).scale_real((b.trace().re - a.trace().re) / 2.0));
            assert_eq!(d_matrix_majorizes_2x2(&a, &b, &one).unwrap(), matrix_majorizes(&a, &b).unwrap());
        }
    }

    proptest! {
        #[test]
        fn constructed_channels_are_cptp(seed in any::<u64>(), n in 1usize..5) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let (a, b) = random_pair(&mut rng, n);
            let t = channel_between(&a, &b).unwrap();
            prop_assert!(is_cp(&t) && is_tp(&t));
            prop_assert!(trace_norm(&t.apply(&b).unwrap().sub(&a)).unwrap() <= 1e-8);
            for _ in 0..5 {
                let h = sample::hermitian(&mut rng, n);
                prop_assert!(trace_norm(&t.apply(&h).unwrap()).unwrap() <= trace_norm_hermitian(&h).unwrap() + 1e-9);
            }
        }

        #[test]
        fn strictly_positive_maps_compose(seed in any::<u64>(), n in 2usize..4) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let t1 = random_channel(&mut rng, n, 2);
            let t2 = random_channel(&mut rng, n, 2);
            prop_assert!(is_strictly_positive(&t1) && is_strictly_positive(&t2));
            prop_assert!(is_strictly_positive(&t2.compose(&t1).unwrap()));
            prop_assert!(kernel_block_form(&t1).unwrap().m == 0);
        }

        #[test]
        fn pinching_choi_is_diagonal(seed in any::<u64>(), n in 1usize..5) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let m = RealMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0));
            let sums = m.column_sums();
            let m = RealMatrix::from_fn(n, n, |i, j| m[(i, j)] / sums[j]);
            let t = SuperOperator::pinching(&m);
            let ch = choi(&t).matrix;
            prop_assert!(is_cp(&t) && is_tp(&t));
            for r in 0..n * n {
                for s in 0..n * n {
                    prop_assert!(r == s || ch[(r, s)].norm() == 0.0);
                }
            }
        }

        #[test]
        fn kernel_projection_identity(seed in any::<u64>(), rank in 1usize..3) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            // channel into a random rank-deficient corner, rotated
            let n = 3;
            let u = sample::haar_unitary(&mut rng, n);
            let ks: Vec<ComplexMatrix> = (0..2)
                .map(|_| {
                    let mut g = sample::gaussian_matrix(&mut rng, n);
                    for r in rank..n {
                        for col in 0..n {
                            g[(r, col)] = c(0.0);
                        }
                    }
                    u.mul(&g)
                })
                .collect();
            let t = SuperOperator::from_kraus(&KrausSet::new(ks).unwrap());
            let f = kernel_block_form(&t).unwrap();
            prop_assert_eq!(f.m, n - rank);
        }

        #[test]
        fn d_majorization_2x2_is_a_preorder(seed in any::<u64>()) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let d = sample::weights(&mut rng, 2);
            let a = sample::hermitian(&mut rng, 2);
            prop_assert!(d_matrix_majorizes_2x2(&a, &a, &d).unwrap());
            // chain through random D-preserving channels: c = T₂(b), b = T₁(a)
            let dm = ComplexMatrix::diag_real(&d);
            let t1 = channel_between(&dm, &dm).unwrap();
            let _ = t1;
            let mix = |x: &ComplexMatrix, s: f64| {
                let tr = x.trace().re / d.total();
                x.scale_real(s).add(&dm.scale_real((1.0 - s) * tr))
            };
            let b = mix(&a, rng.random_range(0.0..1.0));
            let cc = mix(&b, rng.random_range(0.0..1.0));
            prop_assert!(d_matrix_majorizes_2x2(&b, &a, &d).unwrap());
            prop_assert!(d_matrix_majorizes_2x2(&cc, &b, &d).unwrap());
            prop_assert!(d_matrix_majorizes_2x2(&cc, &a, &d).unwrap());
        }
    }
}
