//! The permutation-plus-dissipation toy model on the simplex: simulation,
//! steering synthesis under temperature-zero noise (global and local), and
//! the finite-temperature majorization bound.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::dissipation::{b0_from_rates, thermal_rates, zero_temperature_generator, Generator};
use crate::linalg::{dist1, expm, Permutation, RealMatrix};
use crate::majorize::{majorizes, WeightVector};
use crate::par::{map_range, Exec};
use crate::polytope::max_corner;
use crate::{sample, Error, Result};

const SIMPLEX_TOL: f64 = 1e-9;
const CLAMP_TOL: f64 = 1e-10;
const GROUND_TOL: f64 = 1e-8;
pub const MAX_LOCAL_DIM: usize = 4096;
pub const MAX_SAMPLE_DEPTH: usize = 12;

/// Permute first, then dissipate for `duration`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub perm: Permutation,
    pub duration: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        for s in &self.segments {
            if s.perm.len() != n {
                return Err(Error::Dimension(format!("schedule permutation of size {} for {n} levels", s.perm.len())));
            }
            if !(s.duration >= 0.0 && s.duration.is_finite()) {
                return Err(Error::Invalid(format!("segment duration {} is not a finite non-negative number", s.duration)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, Vec<f64>)>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        &self.samples.last().expect("trajectories are never empty").1
    }
}

fn check_simplex(x: &[f64]) -> Result<()> {
    let s: f64 = x.iter().sum();
    if x.iter().any(|&v| v < -SIMPLEX_TOL || !v.is_finite()) || (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Invalid("state is not in the standard simplex".into()));
    }
    Ok(())
}

/// Clamp dust below zero and renormalize; real violations are errors.
fn clean(mut x: Vec<f64>) -> Result<Vec<f64>> {
    let mut changed = false;
    for v in x.iter_mut() {
        if *v < 0.0 {
            if *v < -CLAMP_TOL {
                return Err(Error::Numerical(format!("state left the simplex (entry {v})")));
            }
            *v = 0.0;
            changed = true;
        }
    }
    if changed {
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
    }
    Ok(x)
}

/// Closed-form endpoint `∏ e^{−τ_k B₀} P(π_k) x₀`.
pub fn final_state(g: &Generator, x0: &[f64], s: &Schedule) -> Result<Vec<f64>> {
    if x0.len() != g.dim() {
        return Err(Error::Dimension("state and generator sizes differ".into()));
    }
    s.check(g.dim())?;
    let mut x = x0.to_vec();
    for seg in &s.segments {
        x = seg.perm.apply(&x);
        if seg.duration > 0.0 {
            x = g.propagator(seg.duration)?.mul_vec(&x);
        }
    }
    Ok(x)
}

pub fn simulate(g: &Generator, x0: &[f64], s: &Schedule, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("sampling step must be positive, got {dt}")));
    }
    if x0.len() != g.dim() {
        return Err(Error::Dimension("state and generator sizes differ".into()));
    }
    check_simplex(x0)?;
    s.check(g.dim())?;
    let step = g.propagator(dt)?;
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut samples = vec![(0.0, x.clone())];
    for seg in &s.segments {
        x = seg.perm.apply(&x);
        if !seg.perm.is_identity() {
            samples.push((t, x.clone()));
        }
        let start = x.clone();
        let k = (seg.duration / dt).floor() as usize;
        let mut y = x.clone();
        for i in 1..=k {
            if i as f64 * dt >= seg.duration {
                break;
            }
            y = clean(step.mul_vec(&y))?;
            samples.push((t + i as f64 * dt, y.clone()));
        }
        if seg.duration > 0.0 {
            x = clean(g.propagator(seg.duration)?.mul_vec(&start))?;
            t += seg.duration;
            samples.push((t, x.clone()));
        }
    }
    Ok(Trajectory { samples })
}

/// `e^{tB}w` with one step of iterative refinement against `e^{−tB}`.
fn backward(b: &RealMatrix, w: &[f64], t: f64) -> Result<Vec<f64>> {
    let e = expm(b, t)?;
    let f = expm(b, -t)?;
    let mut v = e.mul_vec(w);
    let fv = f.mul_vec(&v);
    let r: Vec<f64> = w.iter().zip(&fv).map(|(a, b)| a - b).collect();
    for (vi, ci) in v.iter_mut().zip(e.mul_vec(&r)) {
        *vi += ci;
    }
    Ok(v)
}

/// Steer `e₁` exactly onto `x` with at most `n−1` segments.
pub fn synthesize_from_ground(g: &Generator, x: &[f64]) -> Result<Schedule> {
    let n = g.dim();
    g.ground_rates()?;
    if x.len() != n {
        return Err(Error::Dimension("target and generator sizes differ".into()));
    }
    check_simplex(x)?;
    let mut w = clean(x.iter().map(|&v| if v.abs() < 1e-15 { 0.0 } else { v }).collect())?;
    let mut rev = Vec::new();
    for m in (2..=n).rev() {
        if w[m - 1] <= 1e-14 {
            w[m - 1] = 0.0;
            continue;
        }
        let b = RealMatrix::from_fn(m, m, |i, j| g.matrix()[(i, j)]);
        let head = &w[..m];
        let negative = |v: &[f64]| (0..m - 1).find(|&i| v[i] < 0.0);
        let (t_star, hit, v) = if let Some(j) = (0..m - 1).find(|&i| head[i] <= 0.0) {
            (0.0, j, head.to_vec())
        } else {
            let mut hi = 1e-6;
            let mut vh = backward(&b, head, hi)?;
            let mut doublings = 0;
            while negative(&vh).is_none() {
                hi *= 2.0;
                doublings += 1;
                if doublings > 200 {
                    return Err(Error::Numerical("no face reached in the backward flow".into()));
                }
                vh = backward(&b, head, hi)?;
            }
            let mut lo = if doublings == 0 { 0.0 } else { hi / 2.0 };
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let vm = backward(&b, head, mid)?;
                if negative(&vm).is_some() {
                    hi = mid;
                    vh = vm;
                } else {
                    lo = mid;
                }
            }
            (hi, negative(&vh).unwrap(), vh)
        };
        let mut v = v;
        v[hit] = 0.0;
        let v = clean(v)?;
        rev.push(Segment { perm: Permutation::transposition(n, hit, m - 1), duration: t_star });
        let tau = Permutation::transposition(m, hit, m - 1);
        let u = tau.apply(&v);
        w[..m].copy_from_slice(&u);
        w[m - 1] = 0.0;
    }
    rev.reverse();
    let s = Schedule { segments: rev };
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let err = dist1(&final_state(g, &e1, &s)?, x);
    if err > GROUND_TOL {
        return Err(Error::Numerical(format!("ground steering misses the target by {err:e}")));
    }
    Ok(s)
}

fn unit(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

/// Cool `x0` to within `eps/2` of `e₁`, then steer exactly from `e₁` to `x`.
pub fn synthesize(g: &Generator, x0: &[f64], x: &[f64], eps: f64) -> Result<Schedule> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
    }
    let n = g.dim();
    g.ground_rates()?;
    if x0.len() != n {
        return Err(Error::Dimension("initial state and generator sizes differ".into()));
    }
    check_simplex(x0)?;
    let e1 = unit(n);
    let mut cool = 0.0;
    if dist1(x0, &e1) >= eps / 2.0 {
        cool = 1e-3;
        let mut tries = 0;
        while dist1(&g.propagator(cool)?.mul_vec(x0), &e1) >= eps / 2.0 {
            cool *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::Numerical("cooling did not converge".into()));
            }
        }
    }
    let mut s = synthesize_from_ground(g, x)?;
    s.segments.insert(0, Segment { perm: Permutation::identity(n), duration: cool });
    Ok(s)
}

/// `π(p) = p·n` for `p < g`; the other targets take the unused sources in order.
fn gather(total: usize, n: usize, g: usize) -> Permutation {
    let mut used = vec![false; total];
    let mut img = Vec::with_capacity(total);
    for p in 0..g {
        img.push(p * n);
        used[p * n] = true;
    }
    img.extend((0..total).filter(|&i| !used[i]));
    Permutation::new(img).unwrap()
}

/// Inverse of [`gather`]: moves entries `0..g` onto the block heads.
fn spread(total: usize, n: usize, g: usize) -> Permutation {
    gather(total, n, g).inverse()
}

fn embed(total: usize, n: usize, block: usize, p: &Permutation) -> Permutation {
    let mut img: Vec<usize> = (0..total).collect();
    for (i, &k) in p.images().iter().enumerate() {
        img[block * n + i] = block * n + k;
    }
    Permutation::new(img).unwrap()
}

/// Run per-block schedules side by side, each ending at the common horizon.
fn merge_parallel(total: usize, n: usize, blocks: &[(usize, Schedule)]) -> Vec<Segment> {
    let horizon = blocks.iter().map(|(_, s)| s.total_time()).fold(0.0, f64::max);
    let mut events: Vec<(f64, Permutation)> = Vec::new();
    for (b, s) in blocks {
        let mut t = horizon - s.total_time();
        for seg in &s.segments {
            events.push((t, embed(total, n, *b, &seg.perm)));
            t += seg.duration;
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, Permutation)> = Vec::new();
    for (t, p) in events {
        match merged.last_mut() {
            // disjoint blocks, so the order of composition is irrelevant
            Some((t0, q)) if (t - *t0).abs() <= 1e-14 * horizon.max(1.0) => *q = p.compose(q),
            _ => merged.push((t, p)),
        }
    }
    let mut out = Vec::new();
    if let Some(&(t0, _)) = merged.first() {
        if t0 > 0.0 {
            out.push(Segment { perm: Permutation::identity(total), duration: t0 });
        }
    }
    for k in 0..merged.len() {
        let end = merged.get(k + 1).map_or(horizon, |e| e.0);
        out.push(Segment { perm: merged[k].1.clone(), duration: (end - merged[k].0).max(0.0) });
    }
    out
}

/// Steering for `m` subsystems of `n` levels each coupled to local
/// temperature-zero baths, over `diag(B₀, …, B₀)`.
pub fn synthesize_local(n: usize, m: usize, x0: &[f64], x: &[f64], eps: f64) -> Result<Schedule> {
    if n < 2 || m < 1 {
        return Err(Error::Invalid("need n ≥ 2 and m ≥ 1".into()));
    }
    let total = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|&v| v <= MAX_LOCAL_DIM));
    let Some(total) = total else {
        return Err(Error::Invalid(format!("n^m exceeds {MAX_LOCAL_DIM}")));
    };
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
    }
    if x0.len() != total || x.len() != total {
        return Err(Error::Dimension(format!("states must have n^m = {total} entries")));
    }
    check_simplex(x0)?;
    check_simplex(x)?;
    let g1 = zero_temperature_generator(n);
    let blocks = total / n;

    // Step 1: m rounds of local cooling, collecting the heads after each
    let budget = eps / (2.0 * m as f64 * blocks as f64);
    let e1 = unit(n);
    let mut tau = 1e-3;
    let mut tries = 0;
    loop {
        let p = g1.propagator(tau)?;
        if (0..n).all(|j| dist1(&p.column(j), &e1) <= budget) {
            break;
        }
        tau *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numerical("local cooling did not converge".into()));
        }
    }
    let mut segments = vec![Segment { perm: Permutation::identity(total), duration: tau }];
    let mut heads = blocks;
    for _ in 1..m {
        segments.push(Segment { perm: gather(total, n, heads), duration: tau });
        heads /= n;
    }

    // Step 2: split the mass level by level, then steer every block
    if dist1(x, &unit(total)) > 1e-15 {
        let prefix_mass = |p: usize, len: usize| -> f64 {
            let width = n.pow((m - len) as u32);
            x[p * width..(p + 1) * width].iter().sum()
        };
        let mut groups = 1;
        for q in 1..=m {
            let mut plans = Vec::new();
            for b in 0..groups {
                let mass = prefix_mass(b, q - 1);
                if mass <= 1e-15 {
                    continue;
                }
                let target: Vec<f64> = (0..n).map(|c| prefix_mass(b * n + c, q) / mass).collect();
                plans.push((b, synthesize_from_ground(&g1, &target)?));
            }
            segments.extend(merge_parallel(total, n, &plans));
            if q < m {
                segments.push(Segment { perm: spread(total, n, groups * n), duration: 0.0 });
                groups *= n;
            }
        }
    }
    segments.retain(|s| !(s.duration == 0.0 && s.perm.is_identity()));
    Ok(Schedule { segments })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentCheck {
    pub perm: Permutation,
    /// Largest dyadic step `μ = 2^{−k}` with `(𝟙 − μB₀)πz ≺ z`, if any.
    pub mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub z: Vec<f64>,
    pub x0_below_z: bool,
    pub tangential: Vec<TangentCheck>,
    pub samples: usize,
    pub violations: usize,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.x0_below_z && self.tangential.iter().all(|c| c.mu.is_some()) && self.violations == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    pub samples: usize,
    pub max_depth: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { samples: 10_000, max_depth: 6, seed: 0, exec: Exec::default() }
    }
}

fn derived_seed(seed: u64, i: u64) -> u64 {
    seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17)
}

/// Upper bound `z` on everything reachable from `x0` under the thermal bath
/// of an equidistant `d`, with the tangential and sampled containment checks.
pub fn reachable_bound(x0: &[f64], d: &WeightVector, opts: BoundOptions) -> Result<BoundReport> {
    let n = d.len();
    if x0.len() != n {
        return Err(Error::Dimension("x0 and d lengths differ".into()));
    }
    let r0 = if n > 1 { d[1] / d[0] } else { 1.0 };
    if d.windows(2).any(|w| (w[1] / w[0] - r0).abs() > 1e-10) {
        return Err(Error::Precondition("d must have a constant ratio between neighbours".into()));
    }
    if x0.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("x0 must be non-negative".into()));
    }
    let g = b0_from_rates(&thermal_rates(d));
    let z = max_corner(x0, d)?;
    let x0_below_z = majorizes(x0, &z)?;

    let step = RealMatrix::identity(n);
    let tangential = Permutation::all(n)
        .into_iter()
        .map(|perm| {
            let pz = perm.apply(&z);
            let mu = (0..=40).map(|k| 0.5f64.powi(k)).find(|&mu| {
                let m = step.sub(&g.matrix().scale(mu));
                majorizes(&m.mul_vec(&pz), &z).unwrap_or(false)
            });
            TangentCheck { perm, mu }
        })
        .collect();

    let bad = map_range(opts.exec, opts.samples, |i| {
        let mut rng = SplitMix64::seed_from_u64(derived_seed(opts.seed, i as u64));
        let depth = rng.random_range(0..=opts.max_depth);
        let mut x = x0.to_vec();
        for _ in 0..depth {
            x = sample::permutation(&mut rng, n).apply(&x);
            let t = log_uniform(&mut rng, 1e-3, 1e2);
            x = match g.propagator(t) {
                Ok(p) => p.mul_vec(&x),
                Err(_) => return true,
            };
            if !majorizes(&x, &z).unwrap_or(false) {
                return true;
            }
        }
        false
    });
    Ok(BoundReport { z, x0_below_z, tangential, samples: opts.samples, violations: bad.iter().filter(|&&b| b).count() })
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// `x0` followed by `depth` points, each a random permutation and a
/// log-uniform flow on `[1e−3, 1e2]` away from the previous one.
pub fn reachable_sample(g: &Generator, x0: &[f64], depth: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    reachable_sample_in(g, x0, depth, seed, (1e-3, 1e2))
}

pub fn reachable_sample_in(g: &Generator, x0: &[f64], depth: usize, seed: u64, durations: (f64, f64)) -> Result<Vec<Vec<f64>>> {
    if depth > MAX_SAMPLE_DEPTH {
        return Err(Error::Invalid(format!("depth {depth} exceeds {MAX_SAMPLE_DEPTH}")));
    }
    let (lo, hi) = durations;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::Invalid("duration range must satisfy 0 < lo ≤ hi".into()));
    }
    if x0.len() != g.dim() {
        return Err(Error::Dimension("state and generator sizes differ".into()));
    }
    check_simplex(x0)?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut pts = vec![x0.to_vec()];
    for _ in 0..depth {
        let x = sample::permutation(&mut rng, g.dim()).apply(pts.last().unwrap());
        let t = log_uniform(&mut rng, lo, hi);
        pts.push(clean(g.propagator(t)?.mul_vec(&x))?);
    }
    Ok(pts)
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::dissipation::{equidistant_d, gibbs_vector, BathRates};
    use crate::linalg::perm_matrix;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn seg(perm: Vec<usize>, duration: f64) -> Segment {
        Segment { perm: Permutation::new(perm).unwrap(), duration }
    }

    #[test]
    fn empty_schedule_and_instant_swap() {
        let g = zero_temperature_generator(3);
        let x0 = [0.2, 0.3, 0.5];
        let tr = simulate(&g, &x0, &Schedule::default(), 0.1).unwrap();
        assert_eq!(tr.samples, vec![(0.0, x0.to_vec())]);
        let s = Schedule { segments: vec![seg(vec![0, 1, 2], 2.0)] };
        let tr = simulate(&g, &x0, &s, 0.25).unwrap();
        assert!(dist1(tr.final_state(), &g.propagator(2.0).unwrap().mul_vec(&x0)) < 1e-15);
        assert_eq!(tr.samples.len(), 9);
        assert!(tr.samples.windows(2).all(|w| w[0].0 <= w[1].0));

        let g2 = zero_temperature_generator(2);
        let s = Schedule { segments: vec![seg(vec![1, 0], 0.0)] };
        assert_eq!(simulate(&g2, &[0.7, 0.3], &s, 0.1).unwrap().final_state(), &[0.3, 0.7]);
        assert!(simulate(&g2, &[0.7, 0.4], &s, 0.1).is_err());
        assert!(simulate(&g2, &[0.7, 0.3], &s, 0.0).is_err());
    }

    #[test]
    fn simulation_matches_matrix_product() {
        let d = gibbs_vector(&[0.0, 0.4, 1.1, 1.5], 0.8).unwrap();
        let g = b0_from_rates(&thermal_rates(&d));
        let s = Schedule { segments: vec![seg(vec![2, 0, 3, 1], 0.37), seg(vec![1, 0, 2, 3], 1.1), seg(vec![3, 2, 1, 0], 0.05)] };
        let x0 = [0.1, 0.2, 0.3, 0.4];
        let mut m = RealMatrix::identity(4);
        for sg in &s.segments {
            m = expm(g.matrix(), -sg.duration).unwrap().mul(&perm_matrix(&sg.perm)).mul(&m);
        }
        let want = m.mul_vec(&x0);
        let tr = simulate(&g, &x0, &s, 0.01).unwrap();
        assert!(dist1(tr.final_state(), &want) <= 1e-10);
        for (_, x) in &tr.samples {
            assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-10 && x.iter().all(|&v| v >= -1e-10));
        }
    }

    #[test]
    fn two_level_ground_steering() {
        let g = zero_temperature_generator(2);
        let s = synthesize_from_ground(&g, &[0.75, 0.25]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.segments[0].perm.images(), &[1, 0]);
        assert_abs_diff_eq!(s.segments[0].duration, 4f64.ln(), epsilon = 1e-10);
        assert!(synthesize_from_ground(&g, &[1.0, 0.0]).unwrap().is_empty());
        assert!(synthesize_from_ground(&zero_temperature_generator(4), &[1.0, 0.0, 0.0, 0.0]).unwrap().is_empty());
    }

    #[test]
    fn ground_steering_needs_bidiagonal_generator() {
        let d = equidistant_d(0.5, 3).unwrap();
        let g = b0_from_rates(&thermal_rates(&d));
        assert!(synthesize_from_ground(&g, &[0.2, 0.3, 0.5]).is_err());
    }

    #[test]
    fn ground_steering_onto_faces() {
        let g = zero_temperature_generator(3);
        for x in [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 0.4, 0.6], [1.0 / 3.0; 3]] {
            let s = synthesize_from_ground(&g, &x).unwrap();
            assert!(s.len() <= 2);
            assert!(dist1(&final_state(&g, &[1.0, 0.0, 0.0], &s).unwrap(), &x) <= 1e-8);
        }
    }

    #[test]
    fn cooling_then_steering() {
        let g = zero_temperature_generator(3);
        let s = synthesize(&g, &[1.0 / 3.0; 3], &[0.0, 1.0, 0.0], 1e-6).unwrap();
        assert!(dist1(&final_state(&g, &[1.0 / 3.0; 3], &s).unwrap(), &[0.0, 1.0, 0.0]) <= 1e-6);
        let s = synthesize(&g, &[1.0, 0.0, 0.0], &[0.2, 0.3, 0.5], 1e-6).unwrap();
        assert_eq!(s.segments[0].duration, 0.0);
        assert!(synthesize(&g, &[1.0, 0.0, 0.0], &[0.2, 0.3, 0.5], 0.0).is_err());
    }

    #[test]
    fn local_round_one_collects_block_masses() {
        let (n, m) = (2, 2);
        let x0 = [0.1, 0.2, 0.3, 0.4];
        let s = synthesize_local(n, m, &x0, &[1.0, 0.0, 0.0, 0.0], 1e-6).unwrap();
        let g = zero_temperature_generator(n).block_diagonal(2);
        let first_two = Schedule { segments: s.segments[..1].to_vec() };
        let mut x = final_state(&g, &x0, &first_two).unwrap();
        x = s.segments[1].perm.apply(&x);
        assert!(dist1(&x, &[0.3, 0.7, 0.0, 0.0]) <= 1e-6);
        // the target e₁ needs no second step
        assert_eq!(s.len(), m);
        assert!(dist1(&final_state(&g, &x0, &s).unwrap(), &[1.0, 0.0, 0.0, 0.0]) <= 1e-6);
    }

    #[test]
    fn local_guard_and_sizes() {
        assert!(synthesize_local(2, 13, &[], &[], 1e-3).is_err());
        assert!(synthesize_local(2, 2, &[1.0, 0.0], &[1.0, 0.0], 1e-3).is_err());
    }

    #[test]
    fn local_steering_three_subsystems() {
        let (n, m) = (2, 3);
        let mut rng = SplitMix64::seed_from_u64(71);
        let g = zero_temperature_generator(n).block_diagonal(4);
        for _ in 0..5 {
            let x0 = sample::simplex_point(&mut rng, 8);
            let x = sample::simplex_point(&mut rng, 8);
            let s = synthesize_local(n, m, &x0, &x, 1e-5).unwrap();
            assert!(dist1(&final_state(&g, &x0, &s).unwrap(), &x) <= 1e-5);
        }
        let g = zero_temperature_generator(3).block_diagonal(3);
        let x0 = sample::simplex_point(&mut rng, 9);
        let x = sample::simplex_point(&mut rng, 9);
        let s = synthesize_local(3, 2, &x0, &x, 1e-5).unwrap();
        assert!(dist1(&final_state(&g, &x0, &s).unwrap(), &x) <= 1e-5);
    }

    #[test]
    fn bound_at_equilibrium() {
        let d = equidistant_d(0.5, 3).unwrap();
        let r = reachable_bound(&d, &d, BoundOptions { samples: 200, ..Default::default() }).unwrap();
        assert!(dist1(&r.z, &d) <= 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn bound_rejects_unequal_spacing() {
        let d = WeightVector::new(vec![0.5577, 0.4343, 0.0080]).unwrap();
        let x0 = [0.0080, 0.5577, 0.4343];
        assert!(matches!(reachable_bound(&x0, &d, BoundOptions::default()), Err(Error::Precondition(_))));
        let g = b0_from_rates(&thermal_rates(&d));
        let out = g.propagator(0.1).unwrap().mul_vec(&x0);
        let top = |v: &[f64]| v.iter().copied().fold(f64::MIN, f64::max);
        assert!(top(&out) > top(&x0));
    }

    #[test]
    fn bound_for_excited_start() {
        let d = equidistant_d(0.5, 3).unwrap();
        let r = reachable_bound(&[0.1, 0.2, 0.7], &d, BoundOptions { samples: 2000, seed: 3, ..Default::default() }).unwrap();
        assert!(r.holds(), "{r:?}");
        let seq = reachable_bound(&[0.1, 0.2, 0.7], &d, BoundOptions { samples: 2000, seed: 3, exec: Exec::Sequential, ..Default::default() })
            .unwrap();
        assert_eq!(r, seq);
    }

    #[test]
    fn samples_are_reproducible() {
        let g = zero_temperature_generator(4);
        let x0 = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(reachable_sample(&g, &x0, 0, 9).unwrap(), vec![x0.to_vec()]);
        let a = reachable_sample(&g, &x0, 12, 9).unwrap();
        assert_eq!(a, reachable_sample(&g, &x0, 12, 9).unwrap());
        assert_eq!(a.len(), 13);
        assert!(reachable_sample(&g, &x0, 13, 9).is_err());
        let far = reachable_sample_in(&g, &x0, 5, 2, (50.0, 100.0)).unwrap();
        assert!(far[1..].iter().all(|p| p[0] > 1.0 - 1e-6));
    }

    proptest! {
        #[test]
        fn ground_steering_is_exact(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let g = zero_temperature_generator(n);
            let x = sample::simplex_point(&mut rng, n);
            let s = synthesize_from_ground(&g, &x).unwrap();
            prop_assert!(s.len() < n);
            prop_assert!(dist1(&final_state(&g, &unit(n), &s).unwrap(), &x) <= 1e-8);
        }

        #[test]
        fn ground_steering_with_uneven_rates(seed in any::<u64>(), n in 2usize..5) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let a: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.3..3.0)).collect();
            let g = b0_from_rates(&BathRates::new(a, vec![0.0; n - 1]).unwrap());
            let x = sample::simplex_point(&mut rng, n);
            let s = synthesize_from_ground(&g, &x).unwrap();
            prop_assert!(dist1(&final_state(&g, &unit(n), &s).unwrap(), &x) <= 1e-8);
        }

        #[test]
        fn block_simulation_matches_blockwise(seed in any::<u64>()) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let g1 = zero_temperature_generator(3);
            let g = g1.block_diagonal(2);
            let x0: Vec<f64> = sample::simplex_point(&mut rng, 6);
            let t: f64 = rng.random_range(0.0..3.0);
            let s = Schedule { segments: vec![Segment { perm: Permutation::identity(6), duration: t }] };
            let whole = final_state(&g, &x0, &s).unwrap();
            let p = g1.propagator(t).unwrap();
            let stitched: Vec<f64> = [p.mul_vec(&x0[..3]), p.mul_vec(&x0[3..])].concat();
            prop_assert!(dist1(&whole, &stitched) <= 1e-12);
        }

        #[test]
        fn sampled_points_stay_in_simplex(seed in any::<u64>(), n in 2usize..6) {
            let d = equidistant_d(0.6, n).unwrap();
            let g = b0_from_rates(&thermal_rates(&d));
            let mut rng = SplitMix64::seed_from_u64(seed);
            let x0 = sample::simplex_point(&mut rng, n);
            for p in reachable_sample(&g, &x0, 8, seed).unwrap() {
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-10 && p.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
