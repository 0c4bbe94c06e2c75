//! Gamma-product closed forms: the classical Selberg integral over the unit
//! cube and the Morris constant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::gamma::log_gamma_sum;
use crate::error::{Error, Result};
use crate::levy::{Finiteness, LevySpectrum};

/// A positive product of gamma functions, kept in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaProductResult {
    pub log_value: f64,
    /// `exp(log_value)`, or `None` when that leaves the f64 range.
    pub value: Option<f64>,
}

impl GammaProductResult {
    pub fn from_log(log_value: f64) -> Self {
        let v = log_value.exp();
        Self { log_value, value: v.is_finite().then_some(v) }
    }

    /// The exponentiated value, or a range error.
    pub fn try_value(&self) -> Result<f64> {
        self.value.ok_or_else(|| {
            Error::Range(format!("gamma product exp({}) not representable", self.log_value))
        })
    }
}

/// Classical Selberg integral over `[0,1]^N` with weights
/// `t^λ₁ (1−t)^λ₂` and pair factor `|t_p − t_k|^{2λ}`.
pub fn selberg_product(n: u32, lambda: f64, lambda1: f64, lambda2: f64) -> Result<GammaProductResult> {
    if n == 0 {
        return Err(Error::invalid("selberg_product needs N >= 1"));
    }
    for (name, v) in [("lambda", lambda), ("lambda1", lambda1), ("lambda2", lambda2)] {
        if !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
    }
    let nf = f64::from(n);
    let mut log = 0.0;
    for k in 0..n {
        let k = f64::from(k);
        log += log_gamma_sum(&[
            (1.0, 1.0 + (k + 1.0) * lambda, "Γ(1+(k+1)λ)"),
            (1.0, 1.0 + lambda1 + k * lambda, "Γ(1+λ₁+kλ)"),
            (1.0, 1.0 + lambda2 + k * lambda, "Γ(1+λ₂+kλ)"),
            (-1.0, 1.0 + lambda, "Γ(1+λ)"),
            (-1.0, 2.0 + lambda1 + lambda2 + (nf + k - 1.0) * lambda, "Γ(2+λ₁+λ₂+(N+k−1)λ)"),
        ])
        .map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("{msg} at k = {k}")),
            other => other,
        })?;
    }
    Ok(GammaProductResult::from_log(log))
}

/// `E[M(0,1)^n]` for the lognormal measure with intermittency `mu`.
pub fn lognormal_moment(mu: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let spec = LevySpectrum::gaussian(1.0)?;
    if n >= 2 {
        let fin = spec.moment_finiteness(mu, f64::from(n))?;
        if fin.verdict != Finiteness::Finite {
            return Err(Error::domain(format!(
                "moment {n} is infinite for mu = {mu} (exponent {})",
                fin.exponent
            )));
        }
    } else if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    selberg_product(n, -mu / 2.0, 0.0, 0.0)?.try_value()
}

/// Morris constant `M_N(a, b, λ)`.
pub fn morris_product(n: u32, a: u32, b: u32, lambda: f64) -> Result<GammaProductResult> {
    if n == 0 {
        return Err(Error::invalid("morris_product needs N >= 1"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let (a, b) = (f64::from(a), f64::from(b));
    let mut log = 0.0;
    for j in 0..n {
        let j = f64::from(j);
        log += log_gamma_sum(&[
            (1.0, 1.0 + a + b + lambda * j, "Γ(1+a+b+λj)"),
            (1.0, 1.0 + lambda * (j + 1.0), "Γ(1+λ(j+1))"),
            (-1.0, 1.0 + a + lambda * j, "Γ(1+a+λj)"),
            (-1.0, 1.0 + b + lambda * j, "Γ(1+b+λj)"),
            (-1.0, 1.0 + lambda, "Γ(1+λ)"),
        ])?;
    }
    Ok(GammaProductResult::from_log(log))
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Selberg product at integer parameters as an exact rational
/// (every gamma argument is then a positive integer).
pub fn selberg_product_exact(n: u32, lambda: u32, lambda1: u32, lambda2: u32) -> BigRational {
    let (nn, l, l1, l2) = (u64::from(n), u64::from(lambda), u64::from(lambda1), u64::from(lambda2));
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 0..nn {
        num *= factorial((k + 1) * l) * factorial(l1 + k * l) * factorial(l2 + k * l);
        den *= factorial(l) * factorial(1 + l1 + l2 + (nn + k - 1) * l);
    }
    BigRational::new(num, den)
}

/// Morris product at integer `λ` as an exact rational.
pub fn morris_product_exact(n: u32, a: u32, b: u32, lambda: u32) -> BigRational {
    let (a, b, l) = (u64::from(a), u64::from(b), u64::from(lambda));
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..u64::from(n) {
        num *= factorial(a + b + l * j) * factorial(l * (j + 1));
        den *= factorial(a + l * j) * factorial(b + l * j) * factorial(l);
    }
    BigRational::new(num, den)
}
