//! Bath coupling restricted to diagonal states: rate matrices `B₀`, their
//! flows `e^{−tB₀}`, steady states, and the full GKSL dissipator for
//! cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{dist1, expm, ComplexMatrix, RealMatrix};
use crate::majorize::WeightVector;
use crate::{Error, Result};

/// Lowering weights `a` and raising weights `b` between neighbouring levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathRates {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl BathRates {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension("rate vectors differ in length".into()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite rate".into()));
        }
        Ok(BathRates { a, b })
    }

    pub fn levels(&self) -> usize {
        self.a.len() + 1
    }
}

/// Rate matrix with `eᵀB₀ = 0` and non-positive off-diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    b0: RealMatrix,
}

impl Generator {
    pub fn new(b0: RealMatrix) -> Result<Self> {
        if !b0.is_square() {
            return Err(Error::Dimension("generator must be square".into()));
        }
        let scale = b0.max_abs().max(1.0);
        if b0.column_sums().iter().any(|s| s.abs() > 1e-12 * scale) {
            return Err(Error::Invalid("generator columns must sum to zero".into()));
        }
        let n = b0.rows();
        if (0..n).any(|i| (0..n).any(|j| i != j && b0[(i, j)] > 1e-12 * scale)) {
            return Err(Error::Invalid("generator has a positive off-diagonal entry".into()));
        }
        Ok(Generator { b0 })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.b0
    }

    pub fn dim(&self) -> usize {
        self.b0.rows()
    }

    /// `e^{−tB₀}`
    pub fn propagator(&self, t: f64) -> Result<RealMatrix> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Invalid(format!("flow time must be non-negative, got {t}")));
        }
        expm(&self.b0, -t)
    }

    /// Block-diagonal `diag(B₀, …, B₀)` with `k` copies.
    pub fn block_diagonal(&self, k: usize) -> Generator {
        let n = self.dim();
        let mut m = RealMatrix::zeros(n * k, n * k);
        for p in 0..k {
            for i in 0..n {
                for j in 0..n {
                    m[(p * n + i, p * n + j)] = self.b0[(i, j)];
                }
            }
        }
        Generator { b0: m }
    }

    /// The `c_j` of an upper-bidiagonal generator (temperature zero),
    /// or an error if `B₀` is not of that form.
    pub fn ground_rates(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let m = &self.b0;
        for i in 0..n {
            for j in 0..n {
                if j != i && j != i + 1 && m[(i, j)] != 0.0 {
                    return Err(Error::Invalid("generator is not upper bidiagonal".into()));
                }
            }
        }
        let c: Vec<f64> = (1..n).map(|j| m[(j, j)]).collect();
        if m[(0, 0)] != 0.0 || c.iter().any(|&v| v <= 0.0) {
            return Err(Error::Invalid("temperature-zero generator needs c_j > 0".into()));
        }
        Ok(c)
    }
}

/// `B₀ = Σ a_j² |e_{j+1}−e_j⟩⟨e_{j+1}| + b_j² |e_j−e_{j+1}⟩⟨e_j|`
pub fn b0_from_rates(r: &BathRates) -> Generator {
    let n = r.levels();
    let mut m = RealMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let (a2, b2) = (r.a[k] * r.a[k], r.b[k] * r.b[k]);
        m[(k, k)] += b2;
        m[(k + 1, k)] -= b2;
        m[(k + 1, k + 1)] += a2;
        m[(k, k + 1)] -= a2;
    }
    Generator { b0: m }
}

/// `a_j = √(j(n−j))`, `b_j = 0`.
pub fn zero_temperature_rates(n: usize) -> BathRates {
    let a = (1..n).map(|j| ((j * (n - j)) as f64).sqrt()).collect();
    BathRates { a, b: vec![0.0; n.saturating_sub(1)] }
}

pub fn zero_temperature_generator(n: usize) -> Generator {
    b0_from_rates(&zero_temperature_rates(n))
}

/// Rates whose generator relaxes every state into `d`.
pub fn thermal_rates(d: &WeightVector) -> BathRates {
    let n = d.len();
    let (mut a, mut b) = (Vec::with_capacity(n - 1), Vec::with_capacity(n - 1));
    for k in 0..n - 1 {
        let j = (k + 1) as f64;
        let w = j * (n as f64 - j);
        let s = d[k] + d[k + 1];
        a.push((w * d[k] / s).sqrt());
        b.push((w * d[k + 1] / s).sqrt());
    }
    BathRates { a, b }
}

/// Boltzmann weights `e^{−E_j/T}/Z`, energies shifted by their minimum first.
pub fn gibbs_vector(energies: &[f64], temperature: f64) -> Result<WeightVector> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::Invalid(format!("temperature must be positive, got {temperature}")));
    }
    if energies.is_empty() {
        return Err(Error::Dimension("no energies".into()));
    }
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-(e - e0) / temperature).exp()).collect();
    let z: f64 = w.iter().sum();
    WeightVector::new(w.iter().map(|v| v / z).collect())
}

/// `(1−α)/(1−αⁿ)·(1, α, …, α^{n−1})`
pub fn equidistant_d(alpha: f64, n: usize) -> Result<WeightVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!("ratio must lie in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Dimension("no levels".into()));
    }
    let norm = (1.0 - alpha) / (1.0 - alpha.powi(n as i32));
    WeightVector::new((0..n).map(|j| norm * alpha.powi(j as i32)).collect())
}

/// `e^{−tB₀}x`
pub fn flow(g: &Generator, x: &[f64], t: f64) -> Result<Vec<f64>> {
    if x.len() != g.dim() {
        return Err(Error::Dimension("state and generator sizes differ".into()));
    }
    Ok(g.propagator(t)?.mul_vec(x))
}

/// `lim_{t→∞} e^{−tB₀}` for an upper-triangular generator with `B₀e₁ = 0`:
/// `[[1, −A₁₂A₂₂⁻¹], [0, 0]]`.
pub fn relaxation_limit(g: &Generator) -> Result<RealMatrix> {
    let n = g.dim();
    let m = g.matrix();
    if (0..n).any(|i| (0..i).any(|j| m[(i, j)] != 0.0)) || m[(0, 0)] != 0.0 {
        return Err(Error::Invalid("block formula needs an upper-triangular generator with B₀e₁ = 0".into()));
    }
    let mut lim = RealMatrix::zeros(n, n);
    lim[(0, 0)] = 1.0;
    if n > 1 {
        let a12 = RealMatrix::from_fn(1, n - 1, |_, j| m[(0, j + 1)]);
        let a22 = RealMatrix::from_fn(n - 1, n - 1, |i, j| m[(i + 1, j + 1)]);
        // row vector A₁₂A₂₂⁻¹ via A₂₂ᵀ zᵀ = A₁₂ᵀ
        let z = a22.transpose().solve(&a12.transpose())?;
        for j in 0..n - 1 {
            lim[(0, j + 1)] = -z[(j, 0)];
        }
    }
    Ok(lim)
}

/// The unique `x∞` in the simplex with `B₀x∞ = 0`.
pub fn steady_state(g: &Generator) -> Result<Vec<f64>> {
    let n = g.dim();
    if let Ok(lim) = relaxation_limit(g) {
        return Ok(lim.column(0));
    }
    // eᵀB₀ = 0 makes the last row redundant; swap it for the normalization
    let mut a = g.matrix().clone();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = RealMatrix::zeros(n, 1);
    rhs[(n - 1, 0)] = 1.0;
    let x = a.solve(&rhs).map_err(|_| Error::Invalid("generator kernel is not one-dimensional".into()))?.column(0);
    if x.iter().any(|&v| v < -1e-10) {
        return Err(Error::Numerical("steady state has negative entries".into()));
    }
    Ok(x)
}

/// Smallest `t = 2^k·10⁻³` after which doubling changes `e^{−tB₀}x` by less
/// than `eps/2`.
pub fn relaxation_horizon(g: &Generator, x: &[f64], eps: f64) -> Result<f64> {
    let mut t = 1e-3;
    let mut prev = flow(g, x, t)?;
    for _ in 0..(1 << 16) {
        let next = flow(g, x, 2.0 * t)?;
        if dist1(&next, &prev) < eps / 2.0 {
            return Ok(t);
        }
        t *= 2.0;
        prev = next;
        if !t.is_finite() {
            break;
        }
    }
    Err(Error::Numerical("no relaxation horizon found".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSet {
    pub ops: Vec<ComplexMatrix>,
}

impl LindbladSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let n = ops.first().map(|v| v.rows()).ok_or_else(|| Error::Invalid("no Lindblad operators".into()))?;
        if ops.iter().any(|v| v.rows() != n || v.cols() != n) {
            return Err(Error::Dimension("Lindblad operators must be square of one size".into()));
        }
        Ok(LindbladSet { ops })
    }

    /// `N₊ = Σ a_j |e_j⟩⟨e_{j+1}|` and `N₋ = Σ b_j |e_{j+1}⟩⟨e_j|`.
    pub fn from_rates(r: &BathRates) -> Self {
        let n = r.levels();
        let mut up = ComplexMatrix::zeros(n, n);
        let mut down = ComplexMatrix::zeros(n, n);
        for k in 0..n - 1 {
            up[(k, k + 1)] = Complex64::new(r.a[k], 0.0);
            down[(k + 1, k)] = Complex64::new(r.b[k], 0.0);
        }
        LindbladSet { ops: vec![up, down] }
    }
}

/// `Γ(ρ) = Σ_j ½(V_j†V_jρ + ρV_j†V_j) − V_jρV_j†`
pub fn apply_gamma(vs: &LindbladSet, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = rho.rows();
    if !rho.is_square() || vs.ops[0].rows() != n {
        return Err(Error::Dimension("state and Lindblad operators differ in size".into()));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for v in &vs.ops {
        let vdv = v.adjoint().mul(v);
        let anti = vdv.mul(rho).add(&rho.mul(&vdv)).scale_real(0.5);
        out = out.add(&anti).sub(&v.mul(rho).mul(&v.adjoint()));
    }
    Ok(out)
}
