//! Monte Carlo simulation of the finite-scale cone measure
//! `M_ε(a, b) = ∫_a^b exp(P(A_ε(u))) du` on a uniform grid.
//!
//! Grid nodes are the cell midpoints `u_i = (i + ½)/n`; masses are Riemann
//! sums over the nodes inside `[a, b]`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::LevySpectrum;

/// `ρ_ε(h)`: `1 + ln(1/ε) − h/ε` below `ε`, `ln(1/h)` up to 1, then 0.
pub fn rho_eps(epsilon: f64, h: f64) -> f64 {
    let h = h.abs();
    if h < epsilon {
        1.0 + (1.0 / epsilon).ln() - h / epsilon
    } else if h <= 1.0 {
        -h.ln()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub epsilon: f64,
    pub grid_n: usize,
    pub paths: usize,
    pub seed: u64,
    pub mu: f64,
}

impl SimConfig {
    pub fn new(epsilon: f64, grid_n: usize, paths: usize, seed: u64, mu: f64) -> Result<Self> {
        let cfg = Self { epsilon, grid_n, paths, seed, mu };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.grid_n == 0 || 4.0 / (self.grid_n as f64) > self.epsilon * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "grid spacing 1/{} must be at most epsilon/4 = {}",
                self.grid_n,
                self.epsilon / 4.0
            )));
        }
        if self.paths < 2 {
            return Err(Error::invalid("need at least two paths"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        Ok(())
    }
}

/// Field values `P(A_ε(u_i))` at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPath {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "c", rename_all = "lowercase")]
pub enum Model {
    Gaussian,
    Poisson(f64),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        if let Model::Poisson(c) = *self {
            if !(c > 0.0 && c.is_finite() && c != 1.0) {
                return Err(Error::invalid(format!("Poisson jump factor must be positive and != 1, got {c}")));
            }
        }
        Ok(())
    }

    /// The matching Lévy spectrum (`σ² = 1` for the gaussian model).
    pub fn spectrum(&self) -> Result<LevySpectrum> {
        match *self {
            Model::Gaussian => LevySpectrum::gaussian(1.0),
            Model::Poisson(c) => LevySpectrum::log_poisson(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussianMethod {
    /// Exact for this kernel: the periodized covariance on twice the grid
    /// is nonnegative definite.
    Circulant,
    /// Dense factorization of the grid Gram matrix with diagonal jitter.
    Cholesky,
}

const ROLE_GAUSSIAN: u64 = 1;
const ROLE_POISSON: u64 = 2;

fn rng_for(seed: u64, role: u64, path: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&role.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}

enum GaussianKernel {
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn rustfft::Fft<f64>> },
    Cholesky(DMatrix<f64>),
}

/// Reusable gaussian field sampler for one configuration.
pub struct GaussianSampler {
    config: SimConfig,
    kernel: GaussianKernel,
}

impl GaussianSampler {
    pub fn new(config: SimConfig, method: GaussianMethod) -> Result<Self> {
        config.validate()?;
        let n = config.grid_n;
        let lag = |k: usize| rho_eps(config.epsilon, k as f64 / n as f64);
        let kernel = match method {
            GaussianMethod::Circulant => {
                let m = 2 * n;
                let mut c: Vec<Complex64> =
                    (0..m).map(|k| Complex64::new(lag(k.min(m - k)), 0.0)).collect();
                let fft = FftPlanner::new().plan_fft_forward(m);
                fft.process(&mut c);
                let top = c.iter().map(|z| z.re).fold(0.0, f64::max);
                let mut sqrt_eig = Vec::with_capacity(m);
                for z in &c {
                    if z.re < -1e-9 * top {
                        return Err(Error::Numerical(format!(
                            "circulant embedding has a negative eigenvalue {}",
                            z.re
                        )));
                    }
                    sqrt_eig.push((z.re.max(0.0) / m as f64).sqrt());
                }
                GaussianKernel::Circulant { sqrt_eig, fft }
            }
            GaussianMethod::Cholesky => {
                let mut gram = DMatrix::from_fn(n, n, |i, j| lag(i.abs_diff(j)));
                for i in 0..n {
                    gram[(i, i)] += 1e-12;
                }
                let chol = gram
                    .cholesky()
                    .ok_or_else(|| Error::Numerical("grid covariance is not positive definite".into()))?;
                GaussianKernel::Cholesky(chol.l())
            }
        };
        Ok(Self { config, kernel })
    }

    /// Path `index`; the same seed and index always give the same field.
    pub fn sample(&self, index: u64) -> FieldPath {
        let cfg = &self.config;
        let n = cfg.grid_n;
        let mut rng = rng_for(cfg.seed, ROLE_GAUSSIAN, index);
        let mean = -0.5 * cfg.mu * rho_eps(cfg.epsilon, 0.0);
        let scale = cfg.mu.sqrt();
        let values = match &self.kernel {
            GaussianKernel::Circulant { sqrt_eig, fft } => {
                let mut w: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                        Complex64::new(s * a, s * b)
                    })
                    .collect();
                fft.process(&mut w);
                w[..n].iter().map(|z| mean + scale * z.re).collect()
            }
            GaussianKernel::Cholesky(l) => {
                let z = nalgebra::DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (l * z).iter().map(|x| mean + scale * x).collect()
            }
        };
        FieldPath { values }
    }
}

/// One gaussian path (index 0) with covariance `μ ρ_ε` and mean `−μ ρ_ε(0)/2`.
pub fn simulate_gaussian(config: &SimConfig) -> Result<FieldPath> {
    Ok(GaussianSampler::new(*config, GaussianMethod::Circulant)?.sample(0))
}

/// Poisson path `index`: `ln c` times the number of cone points in
/// `A_ε(u_i)`, compensated to `E[exp P] = 1`.
///
/// Points with `ε ≤ l ≤ 1` have intensity `μ dt dl/l²` and belong to
/// `A_ε(u)` when `|t − u| ≤ l/2`. Above `l = 1` the cone is a strip of
/// width 1, so those points project to a line process of rate `μ` counted
/// in `|t − u| ≤ ½`.
pub fn simulate_poisson_path(config: &SimConfig, c: f64, index: u64) -> Result<FieldPath> {
    config.validate()?;
    Model::Poisson(c).validate()?;
    let n = config.grid_n;
    let nf = n as f64;
    let eps = config.epsilon;
    let mu = config.mu;
    let mut rng = rng_for(config.seed, ROLE_POISSON, index);
    // t ranges over [−½, 3/2], the union of all cones above [0, 1]
    let width = 2.0;
    let mut diff = vec![0i64; n + 1];
    let mut add = |t: f64, half: f64| {
        let lo = ((t - half) * nf - 0.5).ceil().max(0.0);
        let hi = ((t + half) * nf - 0.5).floor().min(nf - 1.0);
        if lo <= hi {
            diff[lo as usize] += 1;
            diff[hi as usize + 1] -= 1;
        }
    };
    let cone_mean = mu * width * (1.0 / eps - 1.0);
    let top_mean = mu * width;
    let count = |mean: f64, rng: &mut ChaCha8Rng| -> u64 {
        if mean > 0.0 {
            Poisson::new(mean).expect("positive mean").sample(rng) as u64
        } else {
            0
        }
    };
    let k = count(cone_mean, &mut rng);
    for _ in 0..k {
        let t = -0.5 + width * rng.random::<f64>();
        let inv = 1.0 / eps - rng.random::<f64>() * (1.0 / eps - 1.0);
        add(t, 0.5 / inv);
    }
    let k = count(top_mean, &mut rng);
    for _ in 0..k {
        let t = -0.5 + width * rng.random::<f64>();
        add(t, 0.5);
    }
    let jump = c.ln();
    let comp = mu * (c - 1.0) * rho_eps(eps, 0.0);
    let mut running = 0i64;
    let values = diff[..n]
        .iter()
        .map(|d| {
            running += d;
            jump * running as f64 - comp
        })
        .collect();
    Ok(FieldPath { values })
}

/// One Poisson path (index 0).
pub fn simulate_poisson(config: &SimConfig, c: f64) -> Result<FieldPath> {
    simulate_poisson_path(config, c, 0)
}

/// `(1/n) Σ_{u_i ∈ [a, b]} exp(values_i)`.
pub fn measure_mass(path: &FieldPath, a: f64, b: f64) -> Result<f64> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::invalid(format!("need 0 <= a < b <= 1, got [{a}, {b}]")));
    }
    let (lo, hi) = node_range(path.values.len(), a, b);
    Ok(mass_nodes(path, lo, hi))
}

fn node_range(n: usize, a: f64, b: f64) -> (usize, usize) {
    let nf = n as f64;
    let lo = (a * nf - 0.5).ceil().max(0.0) as usize;
    let hi = ((b * nf - 0.5).floor() + 1.0).clamp(0.0, nf) as usize;
    (lo, hi.max(lo))
}

fn mass_nodes(path: &FieldPath, lo: usize, hi: usize) -> f64 {
    path.values[lo..hi].iter().map(|x| x.exp()).sum::<f64>() / path.values.len() as f64
}

/// Draws paths in parallel and hands each to `stat`; results keep path order.
pub struct PathSource {
    config: SimConfig,
    model: Model,
    gaussian: Option<GaussianSampler>,
}

impl PathSource {
    pub fn new(config: SimConfig, model: Model) -> Result<Self> {
        config.validate()?;
        model.validate()?;
        let gaussian = match model {
            Model::Gaussian => Some(GaussianSampler::new(config, GaussianMethod::Circulant)?),
            Model::Poisson(_) => None,
        };
        Ok(Self { config, model, gaussian })
    }

    pub fn path(&self, index: u64) -> FieldPath {
        match (self.model, &self.gaussian) {
            (Model::Gaussian, Some(g)) => g.sample(index),
            (Model::Poisson(c), _) => simulate_poisson_path(&self.config, c, index).expect("validated config"),
            (Model::Gaussian, None) => unreachable!("gaussian sampler built in new"),
        }
    }

    fn collect<F>(&self, stat: F) -> Vec<Vec<f64>>
    where
        F: Fn(&FieldPath) -> Vec<f64> + Sync,
    {
        (0..self.config.paths as u64).into_par_iter().map(|i| stat(&self.path(i))).collect()
    }
}

const JACKKNIFE_GROUPS: usize = 100;

/// Delete-a-group jackknife of `estimator(column means)`.
pub fn jackknife(stats: &[Vec<f64>], estimator: impl Fn(&[f64]) -> f64) -> MomentEstimate {
    let n = stats.len();
    let k = stats.first().map_or(0, Vec::len);
    let groups = JACKKNIFE_GROUPS.min(n).max(1);
    let mut group_sums = vec![vec![0.0; k]; groups];
    let mut group_sizes = vec![0usize; groups];
    for (i, row) in stats.iter().enumerate() {
        let g = i * groups / n;
        group_sizes[g] += 1;
        for (s, v) in group_sums[g].iter_mut().zip(row) {
            *s += v;
        }
    }
    let total: Vec<f64> = (0..k).map(|j| group_sums.iter().map(|g| g[j]).sum()).collect();
    let full_means: Vec<f64> = total.iter().map(|s| s / n as f64).collect();
    let mean = estimator(&full_means);
    if groups < 2 {
        return MomentEstimate { mean, std_error: f64::INFINITY, paths_used: n };
    }
    let leave_out: Vec<f64> = (0..groups)
        .map(|g| {
            let m = (n - group_sizes[g]) as f64;
            let means: Vec<f64> = (0..k).map(|j| (total[j] - group_sums[g][j]) / m).collect();
            estimator(&means)
        })
        .collect();
    let avg = leave_out.iter().sum::<f64>() / groups as f64;
    let var = leave_out.iter().map(|v| (v - avg).powi(2)).sum::<f64>() * (groups as f64 - 1.0) / groups as f64;
    MomentEstimate { mean, std_error: var.sqrt(), paths_used: n }
}

fn check_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    for &(a, b) in intervals {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::invalid(format!("need 0 <= a < b <= 1, got [{a}, {b}]")));
        }
    }
    Ok(())
}

/// `E[Π_j M_ε(I_j)^{p_j}]` with jackknife standard error.
pub fn estimate_moment(
    config: &SimConfig,
    model: Model,
    intervals: &[(f64, f64)],
    powers: &[f64],
) -> Result<MomentEstimate> {
    if intervals.len() != powers.len() || intervals.is_empty() {
        return Err(Error::invalid("need one power per interval and at least one interval"));
    }
    check_intervals(intervals)?;
    let source = PathSource::new(*config, model)?;
    let n = config.grid_n;
    let ranges: Vec<(usize, usize)> = intervals.iter().map(|&(a, b)| node_range(n, a, b)).collect();
    let stats = source.collect(|path| {
        let v = ranges.iter().zip(powers).map(|(&(lo, hi), &p)| mass_nodes(path, lo, hi).powf(p)).product();
        vec![v]
    });
    Ok(jackknife(&stats, |m| m[0]))
}

/// `Cov(ln M_ε(t, t+τ), ln M_ε(0, τ))`, averaged over all shifts of the
/// pair by multiples of `τ` that stay inside `[0, 1]`.
pub fn estimate_log_covariance(config: &SimConfig, model: Model, t: f64, tau: f64) -> Result<MomentEstimate> {
    let stats = log_covariances(config, model, &[t], tau)?;
    Ok(jackknife(&stats, |m| m[2] - m[0] * m[1]))
}

fn log_covariances(config: &SimConfig, model: Model, ts: &[f64], tau: f64) -> Result<Vec<Vec<f64>>> {
    for &t in ts {
        if !(tau > 0.0 && tau < t && t + tau <= 1.0) {
            return Err(Error::invalid(format!("need 0 < tau < t and t + tau <= 1, got t={t}, tau={tau}")));
        }
    }
    let source = PathSource::new(*config, model)?;
    let n = config.grid_n;
    // per t: mean over shifts of x, y and x·y
    let shifts: Vec<Vec<((usize, usize), (usize, usize))>> = ts
        .iter()
        .map(|&t| {
            let count = ((1.0 - t - tau) / tau + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|k| {
                    let s = k as f64 * tau;
                    (node_range(n, s, s + tau), node_range(n, s + t, s + t + tau))
                })
                .collect()
        })
        .collect();
    Ok(source.collect(|path| {
        let mut out = Vec::with_capacity(3 * ts.len());
        for pairs in &shifts {
            let (mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0);
            for &((a0, a1), (b0, b1)) in pairs {
                let x = mass_nodes(path, a0, a1).ln();
                let y = mass_nodes(path, b0, b1).ln();
                sx += x;
                sy += y;
                sxy += x * y;
            }
            let k = pairs.len() as f64;
            out.extend([sx / k, sy / k, sxy / k]);
        }
        out
    }))
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of the log-mass covariance against `−ln t`, with a
/// joint jackknife error over all `t`.
pub fn log_covariance_slope(config: &SimConfig, model: Model, ts: &[f64], tau: f64) -> Result<MomentEstimate> {
    if ts.len() < 2 {
        return Err(Error::invalid("need at least two lags for a slope"));
    }
    let stats = log_covariances(config, model, ts, tau)?;
    let x: Vec<f64> = ts.iter().map(|t| -t.ln()).collect();
    Ok(jackknife(&stats, |m| {
        let cov: Vec<f64> = m.chunks(3).map(|c| c[2] - c[0] * c[1]).collect();
        ls_slope(&x, &cov)
    }))
}

/// Slope of `ln E[M_ε(0, t)^q]` against `ln t`.
///
/// Each `t` must be `1/k` for an integer `k`; the moment is averaged over
/// the `k` disjoint translates of `[0, t]` in every path.
pub fn scaling_exponent(config: &SimConfig, model: Model, q: f64, ts: &[f64]) -> Result<MomentEstimate> {
    if ts.len() < 2 {
        return Err(Error::invalid("need at least two scales for a slope"));
    }
    let mut pieces = Vec::with_capacity(ts.len());
    for &t in ts {
        let k = (1.0 / t).round();
        if !(t > 0.0 && t <= 1.0) || ((1.0 / t) - k).abs() > 1e-9 {
            return Err(Error::invalid(format!("scales must be reciprocals of integers, got {t}")));
        }
        pieces.push(k as usize);
    }
    let source = PathSource::new(*config, model)?;
    let n = config.grid_n;
    let stats = source.collect(|path| {
        pieces
            .iter()
            .map(|&k| {
                let w = 1.0 / k as f64;
                (0..k)
                    .map(|j| {
                        let (lo, hi) = node_range(n, j as f64 * w, (j as f64 + 1.0) * w);
                        mass_nodes(path, lo, hi).powf(q)
                    })
                    .sum::<f64>()
                    / k as f64
            })
            .collect()
    });
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    Ok(jackknife(&stats, |m| {
        let y: Vec<f64> = m.iter().map(|v| v.ln()).collect();
        ls_slope(&x, &y)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(eps: f64, n: usize, paths: usize, mu: f64) -> SimConfig {
        SimConfig::new(eps, n, paths, 7, mu).unwrap()
    }

    fn within(est: &MomentEstimate, want: f64, sigmas: f64) -> bool {
        (est.mean - want).abs() <= sigmas * est.std_error
    }

    #[test]
    fn kernel_branches() {
        assert!((rho_eps(0.1, 0.5) - 2f64.ln()).abs() < 1e-15);
        assert!((rho_eps(0.1, 0.0) - (1.0 + 10f64.ln())).abs() < 1e-15);
        assert_eq!(rho_eps(0.3, 1.5), 0.0);
        // continuity at ε and 1
        assert!((rho_eps(0.1, 0.1 - 1e-12) - rho_eps(0.1, 0.1)).abs() < 1e-9);
        assert!(rho_eps(0.1, 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.1, 39, 10, 0, 0.2).is_err());
        assert!(SimConfig::new(0.1, 40, 10, 0, 0.2).is_ok());
        assert!(SimConfig::new(1.0, 40, 10, 0, 0.2).is_err());
        assert!(SimConfig::new(0.1, 40, 1, 0, 0.2).is_err());
        assert!(Model::Poisson(1.0).validate().is_err());
    }

    #[test]
    fn mass_is_a_riemann_sum() {
        let zero = FieldPath { values: vec![0.0; 64] };
        assert!((measure_mass(&zero, 0.25, 0.75).unwrap() - 0.5).abs() < 1e-15);
        let flat = FieldPath { values: vec![0.3; 64] };
        assert!((measure_mass(&flat, 0.0, 1.0).unwrap() - 0.3f64.exp()).abs() < 1e-14);
        let path = simulate_gaussian(&cfg(0.1, 64, 2, 0.2)).unwrap();
        let whole = measure_mass(&path, 0.0, 1.0).unwrap();
        let split = measure_mass(&path, 0.0, 0.375).unwrap() + measure_mass(&path, 0.375, 1.0).unwrap();
        assert!((whole - split).abs() < 1e-14);
    }

    #[test]
    fn paths_are_reproducible() {
        let c = cfg(0.05, 128, 2, 0.2);
        assert_eq!(simulate_gaussian(&c).unwrap(), simulate_gaussian(&c).unwrap());
        assert_eq!(simulate_poisson(&c, 2.0).unwrap(), simulate_poisson(&c, 2.0).unwrap());
        let other = SimConfig { seed: 8, ..c };
        assert_ne!(simulate_poisson(&c, 2.0).unwrap(), simulate_poisson(&other, 2.0).unwrap());
    }

    #[test]
    fn zero_intermittency_gives_zero_field() {
        let c = cfg(0.05, 128, 2, 0.0);
        assert!(simulate_gaussian(&c).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(simulate_poisson(&c, 2.0).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn circulant_and_cholesky_agree_in_law() {
        let c = cfg(0.1, 40, 4000, 0.3);
        for method in [GaussianMethod::Circulant, GaussianMethod::Cholesky] {
            let s = GaussianSampler::new(c, method).unwrap();
            // lags 0, ε/2, 2ε, 0.3
            let pairs = [(0usize, 0usize), (0, 2), (0, 8), (5, 17)];
            let stats: Vec<Vec<f64>> = (0..c.paths as u64)
                .map(|i| {
                    let v = s.sample(i).values;
                    let mut row = vec![v[0], v[5]];
                    row.extend(pairs.iter().map(|&(a, b)| v[a] * v[b]));
                    row
                })
                .collect();
            let mean0 = -0.5 * c.mu * rho_eps(c.epsilon, 0.0);
            let m = jackknife(&stats, |m| m[0]);
            assert!(within(&m, mean0, 4.0), "{method:?} mean {m:?}");
            for (j, &(a, b)) in pairs.iter().enumerate() {
                let lag = (b - a) as f64 / 40.0;
                let want = c.mu * rho_eps(c.epsilon, lag);
                let e = jackknife(&stats, |m| m[2 + j] - m[0] * m[0]);
                assert!(within(&e, want, 4.0), "{method:?} lag {lag}: {e:?} vs {want}");
            }
        }
    }

    #[test]
    fn poisson_counts_and_normalization() {
        let c = cfg(0.05, 80, 4000, 0.3);
        let rho0 = rho_eps(c.epsilon, 0.0);
        let jump = 2f64.ln();
        let comp = c.mu * rho0;
        let stats: Vec<Vec<f64>> = (0..c.paths as u64)
            .map(|i| {
                let v = simulate_poisson_path(&c, 2.0, i).unwrap().values;
                let count = |x: f64| ((x + comp) / jump).round();
                vec![count(v[40]), v[40].exp(), count(v[0]) * count(v[79])]
            })
            .collect();
        let n = jackknife(&stats, |m| m[0]);
        assert!(within(&n, c.mu * rho0, 4.0), "{n:?}");
        let e = jackknife(&stats, |m| m[1]);
        assert!(within(&e, 1.0, 4.0), "{e:?}");
    }

    #[test]
    fn distant_nodes_decorrelate() {
        // nodes at distance > 1 do not exist on [0, 1]; the kernel vanishes
        // at lag 1, so the first and last nodes are nearly independent
        let c = cfg(0.05, 80, 20000, 0.3);
        let stats: Vec<Vec<f64>> = (0..c.paths as u64)
            .map(|i| {
                let v = simulate_poisson_path(&c, 2.0, i).unwrap().values;
                vec![v[0], v[79], v[0] * v[79]]
            })
            .collect();
        let cov = jackknife(&stats, |m| m[2] - m[0] * m[1]);
        let want = c.mu * 2f64.ln().powi(2) * rho_eps(c.epsilon, 79.0 / 80.0);
        assert!(within(&cov, want, 4.0), "{cov:?} vs {want}");
    }

    #[test]
    fn mean_mass_is_one() {
        let c = cfg(0.01, 400, 2000, 0.2);
        for model in [Model::Gaussian, Model::Poisson(2.0), Model::Poisson(0.5)] {
            let e = estimate_moment(&c, model, &[(0.0, 1.0)], &[1.0]).unwrap();
            assert!(within(&e, 1.0, 4.0), "{model:?}: {e:?}");
        }
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let mut rng = rng_for(1, 0, 0);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        let stats: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let e = jackknife(&stats, |m| m[0]);
        let mean = xs.iter().sum::<f64>() / 5000.0;
        assert!((e.mean - mean).abs() < 1e-12);
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4999.0).sqrt();
        assert!((e.std_error / (sd / 5000f64.sqrt()) - 1.0).abs() < 0.25);
    }
}
