use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise polynomial weight on `[0, 1]`.
///
/// Piece `k` covers `[breaks[k], breaks[k+1]]` and evaluates
/// `Σ_j coeffs[k][j] (t − breaks[k])^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly", into = "RawPoly")]
pub struct PiecewisePolynomial {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl TryFrom<RawPoly> for PiecewisePolynomial {
    type Error = Error;
    fn try_from(raw: RawPoly) -> Result<Self> {
        Self::new(raw.breaks, raw.coeffs)
    }
}

impl From<PiecewisePolynomial> for RawPoly {
    fn from(p: PiecewisePolynomial) -> Self {
        RawPoly { breaks: p.breaks, coeffs: p.coeffs }
    }
}

impl PiecewisePolynomial {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.len() < 2 || coeffs.len() != breaks.len() - 1 {
            return Err(Error::invalid("need k+1 breakpoints for k pieces, k >= 1"));
        }
        if breaks[0] != 0.0 || *breaks.last().expect("nonempty") != 1.0 {
            return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        if coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self { breaks, coeffs })
    }

    /// A single polynomial `Σ c_j t^j` on the whole interval.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![coeffs])
    }

    pub fn is_smooth(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// `[breaks[k], breaks[k+1]]` for every piece.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        self.breaks.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breaks[1..self.breaks.len() - 1].partition_point(|&b| b <= t);
        let x = t - self.breaks[k];
        self.coeffs[k].iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}
