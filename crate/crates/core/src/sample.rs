//! Random instances: weights, simplex points, stochastic matrices, Hermitian
//! and density matrices, Haar unitaries.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, Permutation, RealMatrix};
use crate::majorize::WeightVector;

pub fn weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
}

/// Uniform point of the standard simplex.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Fisher–Yates shuffle of the identity.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    Permutation::new(p).unwrap()
}

/// Random convex combination of n permutation matrices.
pub fn doubly_stochastic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealMatrix {
    let w = simplex_point(rng, n);
    let mut a = RealMatrix::zeros(n, n);
    for &wk in &w {
        let p = permutation(rng, n);
        for (i, &j) in p.images().iter().enumerate() {
            a[(i, j)] += wk;
        }
    }
    a
}

/// Product of `steps` random two-level d-stochastic moves.
pub fn d_stochastic<R: Rng + ?Sized>(rng: &mut R, d: &[f64], steps: usize) -> RealMatrix {
    let n = d.len();
    let mut a = RealMatrix::identity(n);
    if n < 2 {
        return a;
    }
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let s = rng.random::<f64>() / d[i].max(d[j]);
        let mut t = RealMatrix::identity(n);
        t[(i, i)] = 1.0 - s * d[j];
        t[(j, i)] = s * d[j];
        t[(i, j)] = s * d[i];
        t[(j, j)] = 1.0 - s * d[i];
        a = t.mul(&a);
    }
    a
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n).hermitian_part()
}

/// `GG†/tr(GG†)` for a complex Gaussian `G`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n);
    let p = g.mul(&g.adjoint()).hermitian_part();
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix, with R's
/// diagonal made positive (Gram–Schmidt does this by construction).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(rng, n);
        let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for _ in 0..2 {
                for u in &q {
                    let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= proj * ui;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                ok = false;
                break;
            }
            q.push(v.iter().map(|z| z / norm).collect());
        }
        if ok {
            return ComplexMatrix::from_fn(n, n, |i, j| q[j][i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorize::{StochasticKind, StochasticMatrix};
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    #[test]
    fn samples_have_their_shapes() {
        let mut rng = SplitMix64::seed_from_u64(5);
        for n in 1..6 {
            let x = simplex_point(&mut rng, n);
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-14 && x.iter().all(|&v| v >= 0.0));
            let d = weights(&mut rng, n);
            let a = StochasticMatrix { matrix: d_stochastic(&mut rng, &d, 10), kind: StochasticKind::D(d.clone()) };
            assert!(a.is_valid());
            let b = StochasticMatrix { matrix: doubly_stochastic(&mut rng, n), kind: StochasticKind::Doubly };
            assert!(b.is_valid());
            let u = haar_unitary(&mut rng, n);
            assert!(u.adjoint().mul(&u).sub(&ComplexMatrix::identity(n)).max_abs() < 1e-12);
            let rho = density_matrix(&mut rng, n);
            assert!((rho.trace().re - 1.0).abs() < 1e-14 && rho.is_hermitian(1e-14));
        }
    }

    #[test]
    fn haar_phases_are_centred() {
        // E[U_00] = 0 for Haar unitaries; an uncorrected QR would bias it.
        let mut rng = SplitMix64::seed_from_u64(6);
        let mut acc = Complex64::new(0.0, 0.0);
        let n = 4000;
        for _ in 0..n {
            acc += haar_unitary(&mut rng, 3)[(0, 0)];
        }
        assert!((acc / n as f64).norm() < 0.05);
    }
}
