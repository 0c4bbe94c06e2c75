//! `₃F₂(a₁, a₂, a₃; b₁, b₂; 1)`.
//!
//! Terminating series are summed in exact rational arithmetic and rounded
//! once. Convergent series use partial sums at geometrically spaced term
//! counts and Richardson extrapolation on the known tail exponents
//! `s, s+1, …` where `s = b₁ + b₂ − a₁ − a₂ − a₃`.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-13;
const MAX_TERMS: usize = 1_000_000;
const FIRST_LEVEL: usize = 32;
const MAX_EXACT_TERMS: usize = 10_000;

fn nonpositive_integer(x: f64) -> Option<usize> {
    (x <= 0.0 && x.fract() == 0.0 && x >= -(MAX_TERMS as f64)).then(|| (-x) as usize)
}

/// `₃F₂` at unit argument.
pub fn hyp3f2_unit(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> Result<f64> {
    let all = [a1, a2, a3, b1, b2];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("3F2 parameters must be finite"));
    }
    let terminate_at = [a1, a2, a3].into_iter().filter_map(nonpositive_integer).min();
    for b in [b1, b2] {
        if let Some(kb) = nonpositive_integer(b) {
            // (b)_k vanishes from k = |b| + 1 on; harmless only if the series stops first
            if terminate_at.map_or(true, |ka| ka > kb) {
                return Err(Error::domain(format!("3F2 lower parameter {b} is a pole")));
            }
        }
    }
    if let Some(k) = terminate_at {
        if k > MAX_EXACT_TERMS {
            return Err(Error::Budget(format!("terminating 3F2 with {k} terms")));
        }
        return Ok(terminating_exact([a1, a2, a3], [b1, b2], k));
    }
    let s = b1 + b2 - a1 - a2 - a3;
    if !(s > 0.0) {
        return Err(Error::domain(format!(
            "3F2 at unit argument diverges: b1+b2-a1-a2-a3 = {s}"
        )));
    }
    convergent(a1, a2, a3, b1, b2, s)
}

fn terminating_exact(a: [f64; 3], b: [f64; 2], k_max: usize) -> f64 {
    let r = |x: f64| BigRational::from_float(x).expect("finite parameter");
    let (a, b) = (a.map(r), b.map(r));
    let mut term = BigRational::from_integer(1.into());
    let mut sum = term.clone();
    for k in 0..k_max {
        let kk = BigRational::from_integer(k.into());
        let num = (&a[0] + &kk) * (&a[1] + &kk) * (&a[2] + &kk);
        if num.is_zero() {
            break;
        }
        let den = (&b[0] + &kk) * (&b[1] + &kk) * (&kk + BigRational::from_integer(1.into()));
        term = term * num / den;
        sum += &term;
    }
    sum.to_f64().expect("finite rational")
}

fn convergent(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64, s: f64) -> Result<f64> {
    // Kahan-compensated running sum so that 10⁶ small terms do not drift
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut k = 0usize;
    let add = |t: f64, sum: &mut f64, comp: &mut f64| {
        let y = t - *comp;
        let next = *sum + y;
        *comp = (next - *sum) - y;
        *sum = next;
    };

    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut target = FIRST_LEVEL;
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    while target <= MAX_TERMS {
        while k < target {
            add(term, &mut sum, &mut comp);
            let kf = k as f64;
            term *= (a1 + kf) * (a2 + kf) * (a3 + kf) / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
            k += 1;
        }
        let mut row = vec![sum];
        if let Some(prev) = table.last() {
            for i in 0..prev.len() {
                let f = 2f64.powf(s + i as f64);
                let r = (f * row[i] - prev[i]) / (f - 1.0);
                row.push(r);
            }
            let n = row.len();
            let err = (row[n - 1] - prev[n - 2]).abs();
            if err < best_err {
                best_err = err;
                best = row[n - 1];
            }
            if err <= REL_TOL * row[n - 1].abs() {
                return Ok(row[n - 1]);
            }
        }
        table.push(row);
        target *= 2;
    }
    Err(Error::Accuracy {
        best,
        error: best_err,
        reason: format!("3F2 did not converge within {MAX_TERMS} terms (s = {s})"),
    })
}
