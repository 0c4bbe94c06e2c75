//! Log-gamma on the positive axis.
//!
//! Stirling's series after shifting the argument to `x >= 15`; small
//! integers go through an exact factorial table.

use crate::error::{Error, Result};

const SHIFT_TO: f64 = 15.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k − 1))` for k = 1..=9.
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("log_gamma of NaN"));
    }
    if x <= 0.0 {
        if x.fract() == 0.0 {
            return Err(Error::domain(format!("log_gamma pole at x = {x}")));
        }
        return Err(Error::domain(format!("log_gamma needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x.fract() == 0.0 && x <= 23.0 {
        // (x − 1)! is exact in f64 up to 22!.
        let mut f = 1.0f64;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f.ln());
    }
    if x >= SHIFT_TO {
        return Ok(stirling(x));
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < SHIFT_TO {
        prod *= shifted;
        shifted += 1.0;
    }
    Ok(stirling(shifted) - prod.ln())
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * (x.ln() - 1.0) - 0.5 + HALF_LN_TWO_PI + series
}

/// Sum of `sign · ln Γ(arg)` over named factors, failing on the first
/// nonpositive argument with a message that names it.
pub(crate) fn log_gamma_sum(terms: &[(f64, f64, &str)]) -> Result<f64> {
    let mut total = 0.0;
    for &(sign, arg, name) in terms {
        if !(arg > 0.0) {
            return Err(Error::domain(format!(
                "gamma factor {name} has nonpositive argument {arg}"
            )));
        }
        total += sign * log_gamma(arg)?;
    }
    Ok(total)
}
