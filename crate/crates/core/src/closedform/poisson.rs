//! Low-order log-Poisson moments and the joint moments built from them.
//!
//! `I_n(λ)` is the ordered-simplex integral with pair exponent `λ 2^{j−i}`
//! (c = 2) and `J_n(λ)` the one with `λ 2^{n−(j−i)}` (c = 1/2). Moments
//! follow as `E[M^n] = n! I_n(−μ/2)` and `E[M^n] = n! J_n(−2^{−n} μ/2)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::gamma::log_gamma_sum;
use super::hyper::hyp3f2_unit;
use super::product::selberg_product;
use crate::error::{Error, Result};
use crate::levy::LevySpectrum;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda must be finite, got {lambda}")))
    }
}

/// `1/((n−1+x)(n+x))` with both factors required positive.
fn recurrence_prefactor(n: f64, x: f64, label: &str) -> Result<f64> {
    let (p, q) = (n - 1.0 + x, n + x);
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::domain(format!(
            "{label}: factor {p} or {q} is not positive, the moment does not exist"
        )));
    }
    Ok(1.0 / (p * q))
}

fn order_check(n: u32, name: &str) -> Result<()> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} is available for n in 2..=4, got {n}")))
    }
}

/// `I_n(λ)` for `n ∈ {2, 3, 4}`.
pub fn poisson_i(n: u32, lambda: f64) -> Result<f64> {
    order_check(n, "I_n")?;
    check_lambda(lambda)?;
    let l = lambda;
    match n {
        2 => recurrence_prefactor(2.0, 2.0 * l, "I_2"),
        3 => {
            let pre = recurrence_prefactor(3.0, 8.0 * l, "I_3")?;
            let g = log_gamma_sum(&[
                (2.0, 1.0 + 2.0 * l, "Γ(1+2λ)"),
                (-1.0, 2.0 + 4.0 * l, "Γ(2+4λ)"),
            ])?;
            Ok(pre * g.exp())
        }
        _ => {
            let pre = recurrence_prefactor(4.0, 22.0 * l, "I_4")?;
            let g = log_gamma_sum(&[
                (3.0, 1.0 + 2.0 * l, "Γ(1+2λ)"),
                (-1.0, 2.0 + 4.0 * l, "Γ(2+4λ)"),
                (1.0, 2.0 + 8.0 * l, "Γ(2+8λ)"),
                (-1.0, 3.0 + 10.0 * l, "Γ(3+10λ)"),
            ])?;
            let f = hyp3f2_unit(-4.0 * l, 1.0 + 2.0 * l, 2.0 + 8.0 * l, 2.0 + 4.0 * l, 3.0 + 10.0 * l)?;
            Ok(pre * g.exp() * f)
        }
    }
}

/// `J_n(λ)` for `n ∈ {2, 3, 4}`.
pub fn poisson_j(n: u32, lambda: f64) -> Result<f64> {
    order_check(n, "J_n")?;
    check_lambda(lambda)?;
    let l = lambda;
    match n {
        2 => recurrence_prefactor(2.0, 2.0 * l, "J_2"),
        3 => {
            let pre = recurrence_prefactor(3.0, 10.0 * l, "J_3")?;
            let g = log_gamma_sum(&[
                (2.0, 1.0 + 4.0 * l, "Γ(1+4λ)"),
                (-1.0, 2.0 + 8.0 * l, "Γ(2+8λ)"),
            ])?;
            Ok(pre * g.exp())
        }
        _ => {
            let pre = recurrence_prefactor(4.0, 34.0 * l, "J_4")?;
            let g = log_gamma_sum(&[
                (3.0, 1.0 + 8.0 * l, "Γ(1+8λ)"),
                (-1.0, 2.0 + 16.0 * l, "Γ(2+16λ)"),
                (1.0, 2.0 + 20.0 * l, "Γ(2+20λ)"),
                (-1.0, 3.0 + 28.0 * l, "Γ(3+28λ)"),
            ])?;
            let f = hyp3f2_unit(-4.0 * l, 1.0 + 8.0 * l, 2.0 + 20.0 * l, 2.0 + 16.0 * l, 3.0 + 28.0 * l)?;
            Ok(pre * g.exp() * f)
        }
    }
}

/// `E[M(0,1)^n]` for `n ≤ 3` and an arbitrary spectrum.
pub fn low_moment(spec: &LevySpectrum, mu: f64, n: u32) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    let d1 = spec.d_coeff(1)?;
    match n {
        0 | 1 => Ok(1.0),
        2 => Ok(2.0 * recurrence_prefactor(2.0, -mu * d1, "E[M^2]")?),
        3 => {
            let phi3 = spec.phi_im(3.0)?;
            let pre = recurrence_prefactor(3.0, -mu * phi3, "E[M^3]")?;
            let g = log_gamma_sum(&[
                (2.0, 1.0 - mu * d1, "Γ(1−μd(1))"),
                (-1.0, 2.0 - 2.0 * mu * d1, "Γ(2−2μd(1))"),
            ])?;
            Ok(6.0 * pre * g.exp())
        }
        _ => Err(Error::invalid(format!("low_moment covers n <= 3, got {n}"))),
    }
}

/// Which joint moment of `M(0,½)` and `M(½,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JointPair {
    /// `E[M(0,½) M(½,1)]`
    #[serde(rename = "1,1")]
    OneOne,
    /// `E[M(0,½) M(½,1)²]`
    #[serde(rename = "1,2")]
    OneTwo,
}

impl JointPair {
    pub fn orders(self) -> (u32, u32) {
        match self {
            JointPair::OneOne => (1, 1),
            JointPair::OneTwo => (1, 2),
        }
    }
}

fn single_moment_for_c(c: f64, mu: f64, n: u32) -> Result<f64> {
    let fact = f64::from((1..=n).product::<u32>());
    if c == 2.0 {
        Ok(fact * poisson_i(n, -mu / 2.0)?)
    } else if c == 0.5 {
        Ok(fact * poisson_j(n, -(0.5f64).powi(n as i32) * mu / 2.0)?)
    } else {
        low_moment(&LevySpectrum::log_poisson(c)?, mu, n)
    }
}

/// Joint moment of the log-Poisson measure with jump `ln c` over the two
/// halves of the unit interval.
pub fn poisson_joint(c: f64, mu: f64, pair: JointPair) -> Result<f64> {
    if !(c > 0.0) || c == 1.0 || !c.is_finite() {
        return Err(Error::invalid(format!("c must be positive and different from 1, got {c}")));
    }
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    match pair {
        JointPair::OneOne => {
            let m2 = single_moment_for_c(c, mu, 2)?;
            Ok(0.5 * (1.0 - 2f64.powf(mu * (c - 1.0).powi(2) - 1.0)) * m2)
        }
        JointPair::OneTwo => {
            let m3 = single_moment_for_c(c, mu, 3)?;
            Ok((1.0 - 2f64.powf(mu * (c.powi(3) - 3.0 * c + 2.0) - 2.0)) * m3 / 6.0)
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Solves `2^{λN(N−1)+N} S_N(λ) = Σ_n C(N,n) S_{n,N−n}(λ)` for
/// `S_{n,N−n}`, all values in unit-cube normalization.
///
/// `known` maps `k ↦ S_{k,N−k}` for `0 < k < N`; a missing entry falls back
/// to its mirror `S_{N−k,k}`. The mirror of the unknown is the unknown.
pub fn lognormal_joint_from_sum(
    big_n: u32,
    n: u32,
    lambda: f64,
    known: &BTreeMap<u32, f64>,
) -> Result<f64> {
    if big_n < 2 || n == 0 || n >= big_n {
        return Err(Error::invalid(format!("need 0 < n < N with N >= 2, got N = {big_n}, n = {n}")));
    }
    if known.keys().any(|&k| k == 0 || k >= big_n) {
        return Err(Error::invalid("known values must have 0 < k < N"));
    }
    let s_n = selberg_product(big_n, lambda, 0.0, 0.0)?.try_value()?;
    let nf = f64::from(big_n);
    let mut rhs = 2f64.powf(lambda * nf * (nf - 1.0) + nf) * s_n - 2.0 * s_n;
    let mut coeff = 0.0;
    for k in 1..big_n {
        let c = binom(big_n, k);
        if k == n || k == big_n - n {
            if known.contains_key(&k) {
                return Err(Error::invalid(format!("S_{{{k},{}}} is the unknown", big_n - k)));
            }
            coeff += c;
            continue;
        }
        let v = known
            .get(&k)
            .or_else(|| known.get(&(big_n - k)))
            .ok_or_else(|| Error::invalid(format!("missing S_{{{k},{}}}", big_n - k)))?;
        rhs -= c * v;
    }
    Ok(rhs / coeff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn printed_values() {
        assert!(close(poisson_i(2, 1.0).unwrap(), 1.0 / 12.0, 1e-15));
        assert!(close(poisson_j(2, 1.0).unwrap(), 1.0 / 12.0, 1e-15));
        assert!(close(poisson_i(3, 0.0).unwrap(), 1.0 / 6.0, 1e-15));
        assert!(close(poisson_i(4, 0.0).unwrap(), 1.0 / 24.0, 1e-15));
        let j3 = 24.0 * 24.0 / (156.0 * 362_880.0);
        assert!(close(poisson_j(3, 1.0).unwrap(), j3, 1e-14));
    }

    #[test]
    fn lambda_zero_is_simplex_volume() {
        for n in 2..=4 {
            let v = 1.0 / f64::from((1..=n).product::<u32>());
            assert!(close(poisson_i(n, 0.0).unwrap(), v, 1e-15));
            assert!(close(poisson_j(n, 0.0).unwrap(), v, 1e-15));
        }
    }

    #[test]
    fn integer_lambda_against_exact_reductions() {
        // pinned two-dimensional polynomial integrals, integrated symbolically
        let cases = [
            (poisson_i(4, 1.0), 3043.0 / 196_756_560_000.0),
            (poisson_i(4, 2.0), 2693.0 / 10_900_139_153_904_000.0),
            (poisson_j(4, 1.0), 108_683.0 / 22_210_619_496_326_293_032_000.0),
            (poisson_j(4, 2.0), 223_196_091_791.0 / 1.948_077_520_044_981_829_781_913_056_051_272_081_44e42),
        ];
        for (got, want) in cases {
            assert!(close(got.unwrap(), want, 1e-12), "{want}");
        }
    }

    #[test]
    fn general_low_moment_matches_special_forms() {
        let mu = 0.2;
        let c2 = LevySpectrum::log_poisson(2.0).unwrap();
        let ch = LevySpectrum::log_poisson(0.5).unwrap();
        assert!(close(low_moment(&c2, mu, 2).unwrap(), 2.0 * poisson_i(2, -0.1).unwrap(), 1e-14));
        assert!(close(low_moment(&c2, mu, 3).unwrap(), 6.0 * poisson_i(3, -0.1).unwrap(), 1e-14));
        assert!(close(low_moment(&ch, mu, 2).unwrap(), 2.0 * poisson_j(2, -0.025).unwrap(), 1e-14));
        assert!(close(low_moment(&ch, mu, 3).unwrap(), 6.0 * poisson_j(3, -0.0125).unwrap(), 1e-14));
        let g = LevySpectrum::gaussian(1.0).unwrap();
        for n in 2..=3 {
            let want = crate::closedform::lognormal_moment(mu, n).unwrap();
            assert!(close(low_moment(&g, mu, n).unwrap(), want, 1e-13));
        }
    }

    #[test]
    fn negative_lambda_against_frozen_reference() {
        // 30-digit reference values from an arbitrary-precision library
        let cases = [
            (poisson_i(4, -0.1), 1.395_923_353_061_626_856_033_003_136_53),
            (poisson_i(4, -0.05), 0.177_216_566_594_259_024_697_012_713_518),
            (poisson_j(4, -0.05), 1.514_001_034_299_949_572_499_538_234_56),
        ];
        for (got, want) in cases {
            let got = got.unwrap();
            assert!(close(got, want, 1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn j4_outside_existence_region() {
        assert!(matches!(poisson_j(4, -0.1), Err(Error::Domain(_))));
        assert!(poisson_j(4, -0.05).is_ok());
        assert!(poisson_i(4, -0.1).is_ok());
    }

    #[test]
    fn joint_examples() {
        let tiny = poisson_joint(2.0, 1e-12, JointPair::OneOne).unwrap();
        assert!(close(tiny, 0.25, 1e-10));
        let v = poisson_joint(2.0, 0.2, JointPair::OneOne).unwrap();
        let want = 0.5 * (1.0 - 2f64.powf(-0.8)) * 2.0 * poisson_i(2, -0.1).unwrap();
        assert!(close(v, want, 1e-15));
        let v = poisson_joint(2.0, 0.2, JointPair::OneTwo).unwrap();
        let want = (1.0 - 2f64.powf(0.8 - 2.0)) * poisson_i(3, -0.1).unwrap();
        assert!(close(v, want, 1e-15));
        let tiny = poisson_joint(0.5, 1e-12, JointPair::OneTwo).unwrap();
        assert!(close(tiny, 0.5 * 0.25, 1e-10));
    }

    #[test]
    fn sum_relation_solver() {
        let empty = BTreeMap::new();
        let s11 = lognormal_joint_from_sum(2, 1, 1.0, &empty).unwrap();
        assert!(close(s11, 7.0 / 6.0, 1e-14));
        assert!(close(lognormal_joint_from_sum(2, 1, 0.0, &empty).unwrap(), 1.0, 1e-15));
        let s12 = lognormal_joint_from_sum(3, 1, 1.0, &empty).unwrap();
        assert!(close(s12, 17.0 / 72.0, 1e-13));
        assert!(lognormal_joint_from_sum(4, 1, 1.0, &empty).is_err());
    }
}
