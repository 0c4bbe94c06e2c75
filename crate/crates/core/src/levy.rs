//! Lévy-Khinchine data of the infinitely divisible integrator.
//!
//! A [`LevySpectrum`] holds the gaussian variance σ² and a finite atomic
//! spectral measure. Everything downstream only ever needs the log
//! characteristic function on the imaginary axis, `φ(−is)`, which is real, so
//! that is the only form exposed here. The drift is fixed implicitly by the
//! normalization `φ(−i) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent passed to `exp` before we report a range error.
const MAX_EXP_ARG: f64 = 700.0;

/// σ² plus a finite atomic spectral measure `Σ w_j δ(u − u_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct LevySpectrum {
    sigma2: f64,
    atoms: Vec<Atom>,
}

/// One point mass of the spectral measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Wire shape: `{"sigma2": number, "atoms": [[u, w], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    sigma2: f64,
    #[serde(default)]
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<RawSpectrum> for LevySpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        let atoms = raw
            .atoms
            .into_iter()
            .map(|[location, weight]| Atom { location, weight })
            .collect();
        LevySpectrum::new(raw.sigma2, atoms)
    }
}

impl From<LevySpectrum> for RawSpectrum {
    fn from(spec: LevySpectrum) -> Self {
        RawSpectrum {
            sigma2: spec.sigma2,
            atoms: spec.atoms.iter().map(|a| [a.location, a.weight]).collect(),
        }
    }
}

/// Verdict of the moment-finiteness criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Boundary,
    Infinite,
}

/// Finiteness verdict together with the multiscaling exponent `q − μφ(−iq)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentFiniteness {
    pub verdict: Finiteness,
    pub exponent: f64,
}

impl LevySpectrum {
    /// Validated constructor.
    pub fn new(sigma2: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::invalid(format!("sigma2 must be finite and >= 0, got {sigma2}")));
        }
        for (j, a) in atoms.iter().enumerate() {
            if !a.location.is_finite() || a.location == 0.0 {
                return Err(Error::invalid(format!(
                    "atom {j}: location must be finite and nonzero, got {}",
                    a.location
                )));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::invalid(format!(
                    "atom {j}: weight must be finite and > 0, got {}",
                    a.weight
                )));
            }
        }
        if sigma2 == 0.0 && atoms.is_empty() {
            return Err(Error::invalid(
                "empty spectrum: sigma2 = 0 and no atoms gives the deterministic Lebesgue measure",
            ));
        }
        Ok(LevySpectrum { sigma2, atoms })
    }

    /// The degenerate spectrum (Lebesgue measure). Not a valid integrator,
    /// but convenient for evaluating the scalar functionals at μ = 0.
    pub fn zero() -> Self {
        LevySpectrum { sigma2: 0.0, atoms: Vec::new() }
    }

    /// Pure gaussian integrator (the limit lognormal measure).
    pub fn gaussian(sigma2: f64) -> Result<Self> {
        Self::new(sigma2, Vec::new())
    }

    /// Log-Poisson integrator: a unit point mass at `ln c`.
    pub fn log_poisson(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) || c == 1.0 {
            return Err(Error::invalid(format!("log-Poisson needs c > 0, c != 1, got {c}")));
        }
        Self::new(0.0, vec![Atom { location: c.ln(), weight: 1.0 }])
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// If this is a single unit atom (log-Poisson), its `c = e^u`.
    pub fn log_poisson_c(&self) -> Option<f64> {
        match self.atoms.as_slice() {
            [a] if self.sigma2 == 0.0 && a.weight == 1.0 => Some(a.location.exp()),
            _ => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `φ(−is) = σ²/2·(s² − s) + Σ w_j (e^{s u_j} − 1 − s(e^{u_j} − 1))`.
    pub fn phi_im(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::invalid(format!("phi_im argument must be finite, got {s}")));
        }
        let mut total = 0.5 * self.sigma2 * (s * s - s);
        for a in &self.atoms {
            total += a.weight * atom_phi(s, a.location)?;
        }
        Ok(total)
    }

    /// `d(m) = σ² + Σ w_j e^{(m−1)u_j}(e^{u_j} − 1)²`.
    pub fn d_coeff(&self, m: u32) -> Result<f64> {
        if m == 0 {
            return Err(Error::invalid("d_coeff needs m >= 1"));
        }
        let mut total = self.sigma2;
        for a in &self.atoms {
            let arg = f64::from(m - 1) * a.location;
            if arg > MAX_EXP_ARG {
                return Err(Error::Range(format!("d({m}) overflows: exponent {arg}")));
            }
            let em1 = a.location.exp_m1();
            total += a.weight * arg.exp() * em1 * em1;
        }
        Ok(total)
    }

    /// `d(1), …, d(n)`.
    pub fn d_sequence(&self, n: usize) -> Result<Vec<f64>> {
        (1..=n as u32).map(|m| self.d_coeff(m)).collect()
    }

    /// `Σ_{1≤l<j≤n} d(j − l)`, which equals `φ(−in)`.
    pub fn d_pair_sum(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("d_pair_sum needs n >= 1"));
        }
        let mut total = 0.0;
        for m in 1..n {
            total += f64::from(n - m) * self.d_coeff(m)?;
        }
        Ok(total)
    }

    /// Coefficients `α_{p,k}` of the joint exponential moment of the cone
    /// process at purely imaginary arguments `q_j = −i s_j`.
    ///
    /// Row `p` (0-based) holds `α_{p,0..=p}`.
    pub fn alpha_coeffs(&self, s: &[f64]) -> Result<Vec<Vec<f64>>> {
        if s.is_empty() {
            return Err(Error::invalid("alpha_coeffs needs a nonempty argument list"));
        }
        if let Some(bad) = s.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("alpha_coeffs argument must be finite, got {bad}")));
        }
        let n = s.len();
        let mut prefix = vec![0.0; n + 1];
        for (i, v) in s.iter().enumerate() {
            prefix[i + 1] = prefix[i] + v;
        }
        // φ of r_{k,p}, with the convention r = 0 (φ = 0) for k > p.
        let phi_r = |k: usize, p: isize| -> Result<f64> {
            if p < 0 || k as isize > p {
                Ok(0.0)
            } else {
                self.phi_im(prefix[p as usize + 1] - prefix[k])
            }
        };
        let mut rows = Vec::with_capacity(n);
        for p in 0..n {
            let pi = p as isize;
            let mut row = Vec::with_capacity(p + 1);
            for k in 0..=p {
                let a = phi_r(k, pi)? + phi_r(k + 1, pi - 1)? - phi_r(k, pi - 1)? - phi_r(k + 1, pi)?;
                row.push(a);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Multiscaling spectrum `q − μφ(−iq)`.
    pub fn multiscaling(&self, mu: f64, q: f64) -> Result<f64> {
        check_mu(mu)?;
        Ok(q - mu * self.phi_im(q)?)
    }

    /// `−iφ'(−i) = σ²/2 + Σ w_j (u_j e^{u_j} − e^{u_j} + 1)`.
    pub fn phi_slope_at_one(&self) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.weight * (a.location * a.location.exp() - a.location.exp_m1()))
            .sum();
        0.5 * self.sigma2 + atoms
    }

    /// Nondegeneracy: `1 − μ(σ²/2 + Σ w_j (u_j e^{u_j} − e^{u_j} + 1)) > 0`.
    pub fn is_nondegenerate(&self, mu: f64) -> Result<bool> {
        check_mu(mu)?;
        Ok(1.0 - mu * self.phi_slope_at_one() > 0.0)
    }

    /// Supremum of intermittency values passing the nondegeneracy test.
    pub fn nondegeneracy_bound(&self) -> f64 {
        let slope = self.phi_slope_at_one();
        if slope > 0.0 {
            1.0 / slope
        } else {
            f64::INFINITY
        }
    }

    /// Finite / boundary / infinite verdict for `E[M^q]`, `q > 1`.
    ///
    /// The boundary case is an exact floating comparison of the exponent to 1.
    pub fn moment_finiteness(&self, mu: f64, q: f64) -> Result<MomentFiniteness> {
        if !(q > 1.0) {
            return Err(Error::invalid(format!("moment_finiteness needs q > 1, got {q}")));
        }
        let exponent = self.multiscaling(mu, q)?;
        let verdict = if exponent > 1.0 {
            Finiteness::Finite
        } else if exponent == 1.0 {
            Finiteness::Boundary
        } else {
            Finiteness::Infinite
        };
        Ok(MomentFiniteness { verdict, exponent })
    }

    /// Critical order `q* > 1` where `q − μφ(−iq) = 1`; `None` when every
    /// moment `q > 1` is finite.
    pub fn critical_moment(&self, mu: f64) -> Result<Option<f64>> {
        check_mu(mu)?;
        let f = |q: f64| -> Result<f64> { Ok(self.multiscaling(mu, q)? - 1.0) };
        let mut lo = 1.0;
        let mut hi = 2.0;
        loop {
            match f(hi) {
                Ok(v) if v <= 0.0 => break,
                Ok(_) => {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e6 {
                        return Ok(None);
                    }
                }
                // φ blew up before turning negative; the moment is infinite by then.
                Err(Error::Range(_)) => break,
                Err(e) => return Err(e),
            }
        }
        if !(self.is_nondegenerate(mu)?) {
            // f decreases from q = 1 onward.
            return Ok(Some(1.0));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = match f(mid) {
                Ok(v) => v,
                Err(Error::Range(_)) => -1.0,
                Err(e) => return Err(e),
            };
            if v > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }

    /// Coefficient of `−μ log t` in the log-covariance: `σ² + Σ w_j u_j²`.
    pub fn log_cov_coefficient(&self) -> f64 {
        self.sigma2 + self.atoms.iter().map(|a| a.weight * a.location * a.location).sum::<f64>()
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("intermittency must be finite and > 0, got {mu}")))
    }
}

/// `e^{su} − 1 − s(e^u − 1)`, computed without cancellation for small `u`.
fn atom_phi(s: f64, u: f64) -> Result<f64> {
    if s == 0.0 || s == 1.0 {
        return Ok(0.0);
    }
    let su = s * u;
    if u.abs() <= 0.25 && su.abs() <= 1.0 {
        // Σ_{k≥2} (s^k − s) u^k / k!
        let mut sum = 0.0;
        let mut su_pow = su; // (su)^k / k!
        let mut u_pow = u; // u^k / k!
        for k in 2..80 {
            let kf = f64::from(k);
            su_pow *= su / kf;
            u_pow *= u / kf;
            let term = su_pow - s * u_pow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() && k > 3 {
                break;
            }
        }
        return Ok(sum);
    }
    if su > MAX_EXP_ARG {
        return Err(Error::Range(format!("exp({su}) overflows in phi_im")));
    }
    Ok(su.exp_m1() - s * u.exp_m1())
}
