//! Exact multiple binomial sums at integer `λ`.
//!
//! Each pair `k < l` of the `N` variables carries an index
//! `I_kl ∈ [−λ, λ]`, with `I_lk = −I_kl`. A term depends on the indices
//! only through a sign, the product of `C(2λ, λ+I_kl)`, and the row sums
//! `r_k = Σ_{l≠k} I_kl`. The enumeration therefore accumulates integer
//! weights per row-sum vector and applies the rational row factor once per
//! distinct vector at the end.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated index tuples.
pub const TERM_BUDGET: u64 = 100_000_000;

/// Which pairs contribute to the alternating sign.
///
/// `s_kl = 1` for a difference pair `|y_k − y_l|`, `0` for a sum pair
/// `|y_k + y_l|`. Pairs are stored in lexicographic order
/// `(1,2), (1,3), …, (N−1,N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    n: usize,
    s: Vec<bool>,
}

impl SignPattern {
    /// All pairs are differences.
    pub fn selberg(n: usize) -> Self {
        Self { n, s: vec![true; n * n.saturating_sub(1) / 2] }
    }

    /// Blocks `{1..n}` and `{n+1..n+m}`: same-block pairs are differences.
    pub fn joint(n: usize, m: usize) -> Self {
        let total = n + m;
        let mut s = Vec::with_capacity(total * total.saturating_sub(1) / 2);
        for k in 0..total {
            for l in k + 1..total {
                s.push((k < n) == (l < n));
            }
        }
        Self { n: total, s }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `s_kl` for `k < l` (zero-based).
    pub fn get(&self, k: usize, l: usize) -> bool {
        assert!(k < l && l < self.n, "pair ({k}, {l}) out of range");
        self.s[pair_index(self.n, k, l)]
    }
}

fn pair_index(n: usize, k: usize, l: usize) -> usize {
    k * (2 * n - k - 1) / 2 + (l - k - 1)
}

/// Number of index tuples `(2λ+1)^{N(N−1)/2}`, saturating.
pub fn term_count(n: u32, lambda: u32) -> u64 {
    let pairs = n * n.saturating_sub(1) / 2;
    let base = 2 * u64::from(lambda) + 1;
    (0..pairs).try_fold(1u64, |acc, _| acc.checked_mul(base)).unwrap_or(u64::MAX)
}

fn check_budget(n: u32, lambda: u32, budget: u64) -> Result<()> {
    let count = term_count(n, lambda);
    if count > budget {
        return Err(Error::Budget(format!(
            "N = {n}, lambda = {lambda} needs {count} terms, budget is {budget}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Weight {
    Small(i128),
    Big(BigInt),
}

impl Weight {
    fn to_big(&self) -> BigInt {
        match self {
            Weight::Small(v) => BigInt::from(*v),
            Weight::Big(v) => v.clone(),
        }
    }

    fn mul(&self, small: Option<i128>, big: &BigInt) -> Weight {
        match (self, small) {
            (Weight::Small(a), Some(b)) => match a.checked_mul(b) {
                Some(v) => Weight::Small(v),
                None => Weight::Big(BigInt::from(*a) * big),
            },
            _ => Weight::Big(self.to_big() * big),
        }
    }

    fn add_assign(&mut self, other: &Weight) {
        if let (Weight::Small(a), Weight::Small(b)) = (&*self, other) {
            if let Some(v) = a.checked_add(*b) {
                *self = Weight::Small(v);
                return;
            }
        }
        *self = Weight::Big(self.to_big() + other.to_big());
    }

    fn negate(&self) -> Weight {
        match self {
            Weight::Small(v) => match v.checked_neg() {
                Some(n) => Weight::Small(n),
                None => Weight::Big(-BigInt::from(*v)),
            },
            Weight::Big(v) => Weight::Big(-v),
        }
    }
}

struct Enumerator<'a> {
    n: usize,
    lambda: i32,
    pairs: Vec<(usize, usize)>,
    sign: &'a [bool],
    binom_small: Vec<Option<i128>>,
    binom_big: Vec<BigInt>,
}

type RowWeights = HashMap<Vec<i32>, Weight>;

impl Enumerator<'_> {
    fn walk(&self, depth: usize, rows: &mut Vec<i32>, weight: Weight, odd: bool, out: &mut RowWeights) {
        if depth == self.pairs.len() {
            let w = if odd { weight.negate() } else { weight };
            match out.get_mut(rows.as_slice()) {
                Some(acc) => acc.add_assign(&w),
                None => {
                    out.insert(rows.clone(), w);
                }
            }
            return;
        }
        let (k, l) = self.pairs[depth];
        for i in -self.lambda..=self.lambda {
            let slot = (i + self.lambda) as usize;
            let w = weight.mul(self.binom_small[slot], &self.binom_big[slot]);
            let flip = self.sign[depth] && i.rem_euclid(2) == 1;
            rows[k] += i;
            rows[l] -= i;
            self.walk(depth + 1, rows, w, odd ^ flip, out);
            rows[k] -= i;
            rows[l] += i;
        }
    }

    /// All row-sum weights, fanned out over prefixes of the first pairs.
    fn run(&self) -> BTreeMap<Vec<i32>, BigInt> {
        let width = (2 * self.lambda + 1) as usize;
        let mut split = 0usize;
        let mut chunks = 1usize;
        while split < self.pairs.len() && chunks < 256 {
            chunks *= width;
            split += 1;
        }
        let partials: Vec<RowWeights> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rows = vec![0i32; self.n];
                let mut weight = Weight::Small(1);
                let mut odd = false;
                let mut rest = c;
                for depth in (0..split).rev() {
                    let slot = rest % width;
                    rest /= width;
                    let i = slot as i32 - self.lambda;
                    let (k, l) = self.pairs[depth];
                    rows[k] += i;
                    rows[l] -= i;
                    weight = weight.mul(self.binom_small[slot], &self.binom_big[slot]);
                    odd ^= self.sign[depth] && i.rem_euclid(2) == 1;
                }
                let mut out = RowWeights::new();
                self.walk(split, &mut rows, weight, odd, &mut out);
                out
            })
            .collect();
        let mut merged = BTreeMap::<Vec<i32>, BigInt>::new();
        for part in partials {
            for (rows, w) in part {
                *merged.entry(rows).or_default() += w.to_big();
            }
        }
        merged
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn row_weights(sign: &SignPattern, lambda: u32) -> BTreeMap<Vec<i32>, BigInt> {
    let n = sign.dimension();
    let pairs = (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect();
    let binom_big: Vec<BigInt> =
        (0..=2 * u64::from(lambda)).map(|j| binomial(2 * u64::from(lambda), j)).collect();
    let binom_small = binom_big.iter().map(|b| b.to_i128()).collect();
    let lambda = i32::try_from(lambda).expect("lambda within the term budget fits in i32");
    Enumerator { n, lambda, pairs, sign: &sign.s, binom_small, binom_big }.run()
}

fn parity_sign(exponent: u64) -> BigInt {
    if exponent % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn pair_sum(sign: &SignPattern, lambda: u32, budget: u64) -> Result<BigRational> {
    let n = sign.dimension() as u32;
    check_budget(n, lambda, budget)?;
    let base = 1 + i64::from(n.saturating_sub(1)) * i64::from(lambda);
    let mut total = BigRational::zero();
    for (rows, w) in row_weights(sign, lambda) {
        let mut den = BigInt::one();
        for r in rows {
            let d = base + i64::from(r);
            debug_assert!(d >= 1, "row factor denominators are at least one");
            den *= d;
        }
        total += BigRational::new(w, den);
    }
    Ok(total)
}

/// Selberg integral `S_N(λ)` over `[0,1]^N`, exactly.
pub fn selberg_sum(n: u32, lambda: u32) -> Result<BigRational> {
    selberg_sum_with_budget(n, lambda, TERM_BUDGET)
}

pub fn selberg_sum_with_budget(n: u32, lambda: u32, budget: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("selberg_sum needs N >= 1"));
    }
    let sum = pair_sum(&SignPattern::selberg(n as usize), lambda, budget)?;
    let prefactor = u64::from(lambda) * u64::from(n) * u64::from(n - 1) / 2;
    Ok(sum * parity_sign(prefactor))
}

/// Joint integral `S_{n,m}(λ)` over `[0,1]^{n+m}`, exactly.
pub fn joint_sum(n: u32, m: u32, lambda: u32) -> Result<BigRational> {
    joint_sum_with_budget(n, m, lambda, TERM_BUDGET)
}

pub fn joint_sum_with_budget(n: u32, m: u32, lambda: u32, budget: u64) -> Result<BigRational> {
    if n == 0 || m == 0 {
        return selberg_sum_with_budget(n + m, lambda, budget);
    }
    let sum = pair_sum(&SignPattern::joint(n as usize, m as usize), lambda, budget)?;
    let (n, m) = (u64::from(n), u64::from(m));
    let prefactor = u64::from(lambda) * (n * (n - 1) + m * (m - 1)) / 2;
    Ok(sum * parity_sign(prefactor))
}

/// Morris constant `M_N(a, b, λ)`, exactly.
pub fn morris_sum(n: u32, a: u32, b: u32, lambda: u32) -> Result<BigRational> {
    morris_sum_with_budget(n, a, b, lambda, TERM_BUDGET)
}

pub fn morris_sum_with_budget(n: u32, a: u32, b: u32, lambda: u32, budget: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("morris_sum needs N >= 1"));
    }
    check_budget(n, lambda, budget)?;
    let top = u64::from(a) + u64::from(b);
    let row_binom = |r: i32| -> BigInt {
        let k = i64::from(a) + i64::from(r);
        if k < 0 {
            BigInt::zero()
        } else {
            binomial(top, k as u64)
        }
    };
    let mut total = BigInt::zero();
    for (rows, w) in row_weights(&SignPattern::selberg(n as usize), lambda) {
        let mut prod = w;
        for r in rows {
            if prod.is_zero() {
                break;
            }
            prod *= row_binom(r);
        }
        total += prod;
    }
    Ok(BigRational::from_integer(total))
}

/// `2^{λN(N−1)+N} S_N(λ) − Σ_n C(N,n) S_{n,N−n}(λ)`, exactly.
pub fn sum_relation_residual(n: u32, lambda: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("sum_relation_residual needs N >= 1"));
    }
    let s_n = selberg_sum(n, lambda)?;
    let shift = u64::from(lambda) * u64::from(n) * u64::from(n - 1) + u64::from(n);
    let pow = BigInt::one() << shift;
    let mut residual = s_n.clone() * BigRational::from_integer(pow);
    for k in 0..=n {
        let term = if k == 0 || k == n { s_n.clone() } else { joint_sum(k, n - k, lambda)? };
        residual -= term * BigRational::from_integer(binomial(u64::from(n), u64::from(k)));
    }
    Ok(residual)
}

/// Decimal `p/q` form; integers print without a denominator.
pub fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

/// Parses the `p/q` or `p` form produced by [`rational_string`].
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.parse::<BigInt>().map_err(|_| bad())?, q.parse::<BigInt>().map_err(|_| bad())?),
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if q.is_zero() || q.is_negative() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}
