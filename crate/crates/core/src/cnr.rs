//! C-numerical ranges in finite dimensions: the C-spectrum of normal pairs,
//! the extreme values of `tr(CU†TU)` for Hermitian pairs, and Haar samples.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::linalg::{eigvals_hermitian, hermitian_eig, perm_unitary, ComplexMatrix, Permutation};
use crate::par::{map_range, Exec};
use crate::{sample, Error, Result};

pub const MAX_SPECTRUM_DIM: usize = 7;
const NORMAL_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CnrReport {
    /// Extreme values of `Re tr(CU†TU)`; present when both inputs are Hermitian.
    pub k_sup: Option<f64>,
    pub k_inf: Option<f64>,
    pub samples: Vec<Complex64>,
    pub p_c: Vec<Complex64>,
}

fn check_pair(c: &ComplexMatrix, t: &ComplexMatrix) -> Result<usize> {
    if !c.is_square() || !t.is_square() || c.rows() != t.rows() {
        return Err(Error::Dimension("C and T must be square of one size".into()));
    }
    Ok(c.rows())
}

fn is_normal(a: &ComplexMatrix) -> bool {
    let comm = a.mul(&a.adjoint()).sub(&a.adjoint().mul(a));
    comm.max_abs() <= NORMAL_TOL * a.max_abs().powi(2).max(1.0)
}

/// `A = W diag(λ) W†` for normal `A`: one generic real combination of the
/// Hermitian and skew parts shares the eigenbasis.
pub fn normal_eig(a: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension("eigendecomposition of a non-square matrix".into()));
    }
    if !is_normal(a) {
        return Err(Error::Invalid("matrix is not normal".into()));
    }
    let h1 = a.hermitian_part();
    let h2 = a.sub(&a.adjoint()).scale(Complex64::new(0.0, -0.5));
    let kappa = (1.0 + 5f64.sqrt()) / 2.0;
    let (_, w) = hermitian_eig(&h1.add(&h2.scale_real(kappa)).hermitian_part())?;
    let lambda = (0..a.rows())
        .map(|k| {
            let u = w.column(k);
            let au = a.mul_vec(&u);
            u.iter().zip(&au).map(|(x, y)| x.conj() * y).sum()
        })
        .collect();
    Ok((lambda, w))
}

/// `{Σ_j λ_j(C)λ_{π(j)}(T) | π ∈ S_n}`, deduplicated, in order of the first
/// permutation reaching each value.
pub fn c_spectrum(c: &ComplexMatrix, t: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = check_pair(c, t)?;
    if n > MAX_SPECTRUM_DIM {
        return Err(Error::Invalid(format!("C-spectrum limited to n ≤ {MAX_SPECTRUM_DIM}")));
    }
    let (lc, _) = normal_eig(c)?;
    let (lt, _) = normal_eig(t)?;
    let mut out: Vec<Complex64> = Vec::new();
    for p in Permutation::all(n) {
        let v: Complex64 = lc.iter().zip(p.images()).map(|(a, &k)| a * lt[k]).sum();
        if out.iter().all(|w| (w - v).norm() > DEDUP_TOL) {
            out.push(v);
        }
    }
    Ok(out)
}

/// `U = W_T P W_C†` with `tr(CU†TU) = Σ_j λ_j(C)λ_{π(j)}(T)`.
pub fn pc_unitary(c: &ComplexMatrix, t: &ComplexMatrix, pi: &Permutation) -> Result<ComplexMatrix> {
    let n = check_pair(c, t)?;
    if pi.len() != n {
        return Err(Error::Dimension("permutation size differs from the matrices".into()));
    }
    let (_, wc) = normal_eig(c)?;
    let (_, wt) = normal_eig(t)?;
    Ok(wt.mul(&perm_unitary(&pi.inverse())).mul(&wc.adjoint()))
}

/// `(sup, inf)` of `tr(CU†TU)` over unitaries: `Σ λ↓(C)λ↓(T)` and `Σ λ↓(C)λ↑(T)`.
pub fn k_c(c: &ComplexMatrix, t: &ComplexMatrix) -> Result<(f64, f64)> {
    check_pair(c, t)?;
    let (lc, lt) = hermitian_spectra(c, t)?;
    let sup = lc.iter().zip(&lt).map(|(a, b)| a * b).sum();
    let inf = lc.iter().zip(lt.iter().rev()).map(|(a, b)| a * b).sum();
    Ok((sup, inf))
}

/// `Σ λ↓(C⁺)λ↓(T⁺) + Σ λ↓(C⁻)λ↓(T⁻)`: the supremum once both operators
/// can be padded by zeros, an upper bound for [`k_c`] otherwise.
pub fn k_c_split(c: &ComplexMatrix, t: &ComplexMatrix) -> Result<f64> {
    check_pair(c, t)?;
    let (lc, lt) = hermitian_spectra(c, t)?;
    let parts = |v: &[f64], sign: f64| -> Vec<f64> {
        let mut p: Vec<f64> = v.iter().map(|x| (sign * x).max(0.0)).collect();
        p.sort_by(|a, b| b.total_cmp(a));
        p
    };
    let dot = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
    Ok(dot(parts(&lc, 1.0), parts(&lt, 1.0)) + dot(parts(&lc, -1.0), parts(&lt, -1.0)))
}

fn hermitian_spectra(c: &ComplexMatrix, t: &ComplexMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    for (m, name) in [(c, "C"), (t, "T")] {
        if !m.is_hermitian(NORMAL_TOL * m.max_abs().max(1.0)) {
            return Err(Error::Invalid(format!("{name} is not Hermitian")));
        }
    }
    Ok((eigvals_hermitian(&c.hermitian_part())?, eigvals_hermitian(&t.hermitian_part())?))
}

fn sample_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_add(i.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// `tr(CU†AU)` at `count` Haar unitaries; sample `i` uses its own derived seed.
pub fn w_c_sample(c: &ComplexMatrix, a: &ComplexMatrix, count: usize, seed: u64, exec: Exec) -> Result<Vec<Complex64>> {
    let n = check_pair(c, a)?;
    Ok(map_range(exec, count, |i| {
        let mut rng = SplitMix64::seed_from_u64(sample_seed(seed, i as u64));
        let u = sample::haar_unitary(&mut rng, n);
        c.mul(&u.adjoint()).mul(a).mul(&u).trace()
    }))
}

pub fn cnr_report(c: &ComplexMatrix, t: &ComplexMatrix, count: usize, seed: u64, exec: Exec) -> Result<CnrReport> {
    let samples = w_c_sample(c, t, count, seed, exec)?;
    let (k_sup, k_inf) = match k_c(c, t) {
        Ok((s, i)) => (Some(s), Some(i)),
        Err(Error::Invalid(_)) => (None, None),
        Err(e) => return Err(e),
    };
    let p_c = if c.rows() <= MAX_SPECTRUM_DIM && is_normal(c) && is_normal(t) { c_spectrum(c, t)? } else { Vec::new() };
    Ok(CnrReport { k_sup, k_inf, samples, p_c })
}
