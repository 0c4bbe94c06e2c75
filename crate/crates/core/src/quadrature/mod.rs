//! Singular simplex quadrature for generalized Selberg integrals.
//!
//! Every integral here is an ordered-simplex value (points `t_1 < … < t_n`);
//! multiply by `n!` to compare with cube-normalized closed forms.

mod gap;
mod jacobi;
mod poly;
mod sector;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{Finiteness, LevySpectrum};
use gap::{Factor, GapBlock, GapProblem, Layout, Point, WeightFn};
pub use poly::PiecewisePolynomial;
use sector::Options;

/// Numeric integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

impl QuadResult {
    fn scaled(self, k: f64) -> Self {
        Self { value: k * self.value, abs_error_estimate: k.abs() * self.abs_error_estimate, ..self }
    }
}

/// `S_n(λ, λ₁, λ₂)` with pair exponents `2λ d(j − i)` and endpoint exponents
/// `λ₁ d(i)`, `λ₂ d(n − i + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelbergParams {
    pub n: usize,
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `d(1), …, d(n)`
    pub d_seq: Vec<f64>,
}

impl SelbergParams {
    pub fn new(n: usize, lambda: f64, lambda1: f64, lambda2: f64, d_seq: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Selberg dimension must be at least 1"));
        }
        if d_seq.len() != n {
            return Err(Error::invalid(format!("d_seq has length {}, expected {n}", d_seq.len())));
        }
        if d_seq.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("d_seq entries must be finite and nonnegative"));
        }
        if ![lambda, lambda1, lambda2].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("exponents must be finite"));
        }
        Ok(Self { n, lambda, lambda1, lambda2, d_seq })
    }

    /// `d ≡ 1`.
    pub fn gaussian(n: usize, lambda: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(n, lambda, lambda1, lambda2, vec![1.0; n])
    }

    pub fn from_spectrum(spec: &LevySpectrum, n: usize, lambda: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(n, lambda, lambda1, lambda2, spec.d_sequence(n)?)
    }

    fn d(&self, k: usize) -> f64 {
        self.d_seq[k - 1]
    }
}

/// Two ordered subintervals `[a1, b1]`, `[a2, b2]` of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct IntervalPair {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
}

impl IntervalPair {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        if !(0.0 <= a1 && a1 < b1 && b1 <= a2 && a2 < b2 && b2 <= 1.0) {
            return Err(Error::invalid(format!(
                "need 0 <= a1 < b1 <= a2 < b2 <= 1, got ({a1}, {b1}, {a2}, {b2})"
            )));
        }
        Ok(Self { a1, b1, a2, b2 })
    }

    /// `([0, ½], [½, 1])`.
    pub fn halves() -> Self {
        Self { a1: 0.0, b1: 0.5, a2: 0.5, b2: 1.0 }
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn b1(&self) -> f64 {
        self.b1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }
    pub fn b2(&self) -> f64 {
        self.b2
    }
}

impl TryFrom<[f64; 4]> for IntervalPair {
    type Error = Error;
    fn try_from(v: [f64; 4]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

impl From<IntervalPair> for [f64; 4] {
    fn from(iv: IntervalPair) -> Self {
        [iv.a1, iv.b1, iv.a2, iv.b2]
    }
}

const MAX_SINGLE_DIM: usize = 6;
const MAX_JOINT_DIM: usize = 5;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn options(tol: f64) -> Options {
    Options { abs_tol: tol, rel_tol: 0.0, ..Options::default() }
}

fn integrate(layout: Layout, tol: f64) -> Result<QuadResult> {
    sector::integrate(&layout.into_problem()?, &options(tol))
}

/// Pairs `(slots[i], slots[j], 2λ d(j − i))`; `slots[k]` is the layout
/// position of global index `k + 1`.
fn pair_exponents(slots: &[usize], lambda: f64, d: impl Fn(usize) -> f64) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for i in 0..slots.len() {
        for j in i + 1..slots.len() {
            pairs.push((slots[i], slots[j], 2.0 * lambda * d(j - i)));
        }
    }
    pairs
}

/// Ordered-simplex value of `S_n(λ, λ₁, λ₂)` with optional per-point weight.
///
/// A piecewise weight is integrated piece by piece: the points are
/// distributed over the pieces in every possible way, so each integrand
/// stays smooth apart from its algebraic singularities.
pub fn selberg_general(
    params: &SelbergParams,
    weight: Option<&PiecewisePolynomial>,
    tol: f64,
) -> Result<QuadResult> {
    check_tol(tol)?;
    let n = params.n;
    if n > MAX_SINGLE_DIM {
        return Err(Error::invalid(format!("selberg_general supports n <= {MAX_SINGLE_DIM}, got {n}")));
    }
    let pieces: Vec<(f64, f64)> = match weight {
        None => vec![(0.0, 1.0)],
        Some(w) => w.pieces(),
    };
    let f: Option<WeightFn> = weight.map(|w| {
        let w = w.clone();
        std::sync::Arc::new(move |t: f64| w.eval(t)) as WeightFn
    });
    let comps = compositions(n, pieces.len());
    let part_tol = tol / comps.len() as f64;
    let mut total = QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    for comp in comps {
        let mut points = vec![Point::Fixed(0.0)];
        for (b, &c) in comp.iter().enumerate() {
            points.extend(std::iter::repeat(Point::Free(b)).take(c));
        }
        points.push(Point::Fixed(1.0));
        let slots: Vec<usize> = (1..=n).collect();
        let mut pairs = pair_exponents(&slots, params.lambda, |k| params.d(k));
        for i in 1..=n {
            pairs.push((0, i, params.lambda1 * params.d(i)));
            pairs.push((i, n + 1, params.lambda2 * params.d(n - i + 1)));
        }
        let layout = Layout { blocks: pieces.clone(), points, pairs, weight: f.clone() };
        let r = integrate(layout, part_tol)?;
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}

/// All ways to write `n` as an ordered sum of `k` nonnegative parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Relative residual of the single-moment recurrence: the full integral
/// against the integral pinned at `t_1 = 0`, `t_n = 1`, divided by
/// `(n − 1 + 2λφ(−in))(n + 2λφ(−in))`.
pub fn recurrence_residual_single(params: &SelbergParams, spec: &LevySpectrum, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let n = params.n;
    if n < 2 {
        return Err(Error::invalid("the recurrence needs n >= 2"));
    }
    if params.lambda1 != 0.0 || params.lambda2 != 0.0 {
        return Err(Error::invalid("the recurrence is stated for lambda1 = lambda2 = 0"));
    }
    let lhs = selberg_general(params, None, tol)?.value;
    let phi = spec.phi_im(n as f64)?;
    let k = 2.0 * params.lambda * phi;
    let denom = (n as f64 - 1.0 + k) * (n as f64 + k);
    if denom == 0.0 {
        return Err(Error::domain("recurrence denominator vanishes"));
    }
    let mut points = vec![Point::Fixed(0.0)];
    points.extend(std::iter::repeat(Point::Free(0)).take(n - 2));
    points.push(Point::Fixed(1.0));
    let slots: Vec<usize> = (0..n).collect();
    let pairs = pair_exponents(&slots, params.lambda, |k| params.d(k));
    let pinned = integrate(Layout { blocks: vec![(0.0, 1.0)], points, pairs, weight: None }, tol)?;
    Ok(relative(lhs, pinned.value / denom))
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        return 0.0;
    }
    (lhs - rhs).abs() / lhs.abs()
}

fn joint_lambda(spec: &LevySpectrum, mu: f64, big_n: usize) -> Result<(f64, Vec<f64>)> {
    // μ = 0 is the Lebesgue limit, finite for every order
    if big_n >= 2 && mu != 0.0 {
        let fin = spec.moment_finiteness(mu, big_n as f64)?;
        if fin.verdict != Finiteness::Finite {
            return Err(Error::domain(format!(
                "moment of order {big_n} is not finite: multiscaling exponent {}",
                fin.exponent
            )));
        }
    }
    Ok((-mu / 2.0, spec.d_sequence(big_n.max(1))?))
}

/// Ordered product-simplex integral over `n` points in `[a1, b1]` and `m`
/// points in `[a2, b2]`, with `pins` fixing selected 1-based global indices.
fn joint_ordered(
    d: &[f64],
    lambda: f64,
    iv: &IntervalPair,
    n: usize,
    m: usize,
    pins: &[(usize, f64)],
    tol: f64,
) -> Result<QuadResult> {
    let mut points: Vec<Point> = std::iter::repeat(Point::Free(0)).take(n).collect();
    points.extend(std::iter::repeat(Point::Free(1)).take(m));
    for &(idx, x) in pins {
        points[idx - 1] = Point::Fixed(x);
    }
    let slots: Vec<usize> = (0..n + m).collect();
    let pairs = pair_exponents(&slots, lambda, |k| d[k - 1]);
    let layout = Layout { blocks: vec![(iv.a1, iv.b1), (iv.a2, iv.b2)], points, pairs, weight: None };
    integrate(layout, tol)
}

/// Joint moment `E[M(I₁)^n M(I₂)^m]` as `n!·m!` times the ordered integral.
pub fn joint_moment_quad(
    spec: &LevySpectrum,
    mu: f64,
    iv: &IntervalPair,
    n: usize,
    m: usize,
    tol: f64,
) -> Result<QuadResult> {
    check_tol(tol)?;
    if n == 0 || m == 0 || n + m > MAX_JOINT_DIM {
        return Err(Error::invalid(format!("joint orders need n, m >= 1 and n + m <= {MAX_JOINT_DIM}")));
    }
    let (lambda, d) = joint_lambda(spec, mu, n + m)?;
    let k = factorial(n) * factorial(m);
    Ok(joint_ordered(&d, lambda, iv, n, m, &[], tol / k)?.scaled(k))
}

/// Cube-normalized `S_{n,m}(λ)` for `d ≡ 1`, from the joint integral over
/// the two halves of `[0, 1]`.
pub fn joint_cube_quad(n: usize, m: usize, lambda: f64, tol: f64) -> Result<QuadResult> {
    check_tol(tol)?;
    if n + m == 0 || n + m > MAX_JOINT_DIM {
        return Err(Error::invalid(format!("need 1 <= n + m <= {MAX_JOINT_DIM}")));
    }
    let big_n = (n + m) as f64;
    let k = factorial(n) * factorial(m) * 2f64.powf(big_n + lambda * big_n * (big_n - 1.0));
    let d = vec![1.0; n + m];
    Ok(joint_ordered(&d, lambda, &IntervalPair::halves(), n, m, &[], tol / k)?.scaled(k))
}

/// Relative residual of the joint recurrence: the full ordered integral
/// against the six boundary-pinned integrals weighted by squared interval
/// distances, divided by `(N − 1 + 2λφ(−iN))(N + 2λφ(−iN))`.
///
/// Terms whose pins would coincide (`n = 1` or `m = 1`) or whose weight is
/// zero are omitted.
pub fn recurrence_residual_joint(
    spec: &LevySpectrum,
    mu: f64,
    iv: &IntervalPair,
    n: usize,
    m: usize,
    tol: f64,
) -> Result<f64> {
    check_tol(tol)?;
    if n == 0 || m == 0 || n + m > MAX_JOINT_DIM {
        return Err(Error::invalid(format!("joint orders need n, m >= 1 and n + m <= {MAX_JOINT_DIM}")));
    }
    let big_n = n + m;
    let (lambda, d) = joint_lambda(spec, mu, big_n)?;
    let full = joint_ordered(&d, lambda, iv, n, m, &[], tol)?.value;
    let IntervalPair { a1, b1, a2, b2 } = *iv;
    let terms: [(f64, f64, [(usize, f64); 2], bool); 6] = [
        (1.0, b2 - a1, [(1, a1), (big_n, b2)], true),
        (1.0, b1 - a1, [(1, a1), (n, b1)], n > 1),
        (-1.0, a2 - a1, [(1, a1), (n + 1, a2)], true),
        (-1.0, b2 - b1, [(n, b1), (big_n, b2)], true),
        (1.0, b2 - a2, [(n + 1, a2), (big_n, b2)], m > 1),
        (1.0, a2 - b1, [(n, b1), (n + 1, a2)], true),
    ];
    let mut bracket = 0.0;
    for (sign, dist, pins, present) in terms {
        if !present || dist == 0.0 {
            continue;
        }
        bracket += sign * dist * dist * joint_ordered(&d, lambda, iv, n, m, &pins, tol)?.value;
    }
    let k = 2.0 * lambda * spec.phi_im(big_n as f64)?;
    let denom = (big_n as f64 - 1.0 + k) * (big_n as f64 + k);
    if denom == 0.0 {
        return Err(Error::domain("recurrence denominator vanishes"));
    }
    Ok(relative(full, bracket / denom))
}

/// Linear forms of the symbols in the two-dimensional reductions, in gap
/// coordinates of the ordered pair `u < v` inside `[0, 1]`.
#[derive(Clone, Copy)]
enum Sym {
    X,
    OneMinusX,
    OnePlusX,
    Y,
    OneMinusY,
    OnePlusY,
    XPlusY,
    AbsXMinusY,
}

fn sym_form(s: Sym, x_first: bool) -> (f64, Vec<(usize, f64)>) {
    // x = u when x_first, else x = v
    let (low, high) = if x_first { (true, false) } else { (false, true) };
    let is_u = |var_is_x: bool| if var_is_x { low } else { high };
    let pos = |u: bool| if u { vec![(0, 1.0)] } else { vec![(0, 1.0), (1, 1.0)] };
    let comp = |u: bool| if u { vec![(1, 1.0), (2, 1.0)] } else { vec![(2, 1.0)] };
    match s {
        Sym::X => (0.0, pos(is_u(true))),
        Sym::OneMinusX => (0.0, comp(is_u(true))),
        Sym::OnePlusX => (1.0, pos(is_u(true))),
        Sym::Y => (0.0, pos(is_u(false))),
        Sym::OneMinusY => (0.0, comp(is_u(false))),
        Sym::OnePlusY => (1.0, pos(is_u(false))),
        Sym::XPlusY => (0.0, vec![(0, 2.0), (1, 1.0)]),
        Sym::AbsXMinusY => (0.0, vec![(1, 1.0)]),
    }
}

/// `∫∫_{[0,1]²} Π s^{2λ}` over the given symbols.
fn square_integral(syms: &[Sym], lambda: f64, tol: f64) -> Result<QuadResult> {
    let mut total = QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    for x_first in [true, false] {
        let factors = syms
            .iter()
            .map(|&s| {
                let (delta, terms) = sym_form(s, x_first);
                Factor { delta, terms, exp: 2.0 * lambda }
            })
            .filter(|f| f.exp != 0.0)
            .collect();
        let problem = GapProblem {
            blocks: vec![GapBlock { start: 0.0, len: 1.0, free: 2, offset: 0 }],
            factors,
            weights: Vec::new(),
            constant: 1.0,
        };
        let r = sector::integrate(&problem, &options(tol / 2.0))?;
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}

fn bracket(terms: &[(f64, &[Sym])], prefactor: f64, lambda: f64, tol: f64) -> Result<QuadResult> {
    let scale: f64 = terms.iter().map(|t| t.0.abs()).sum::<f64>() * prefactor.abs();
    let mut total = QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 };
    for &(coef, syms) in terms {
        let r = square_integral(syms, lambda, tol / scale)?;
        total.value += coef * r.value;
        total.abs_error_estimate += coef.abs() * r.abs_error_estimate;
        total.evaluations += r.evaluations;
    }
    Ok(total.scaled(prefactor))
}

fn reduction_check(lambda: f64, tol: f64) -> Result<()> {
    check_tol(tol)?;
    if !(lambda > -0.25) || !lambda.is_finite() {
        return Err(Error::domain(format!("the two-dimensional reductions need lambda > -1/4, got {lambda}")));
    }
    Ok(())
}

use Sym::*;
const TERM_A: &[Sym] = &[OneMinusX, X, OnePlusY, Y, XPlusY];
const TERM_B: &[Sym] = &[OnePlusX, X, OnePlusY, Y, AbsXMinusY];
const TERM_C: &[Sym] = &[OneMinusX, OnePlusX, OnePlusY, OneMinusY, AbsXMinusY];
const TERM_D: &[Sym] = &[OneMinusX, X, OneMinusY, Y, AbsXMinusY];
const TERM_E: &[Sym] = &[OneMinusX, OnePlusX, OnePlusY, OneMinusY, XPlusY];

/// Two-dimensional reduction of the cube-normalized `S_{1,3}(λ)`.
pub fn s13_2d(lambda: f64, tol: f64) -> Result<QuadResult> {
    reduction_check(lambda, tol)?;
    let c = 4f64.powf(lambda + 1.0);
    let pre = 1.0 / (4.0 * (3.0 * lambda + 1.0) * (4.0 * lambda + 1.0));
    bracket(&[(2.0, TERM_A), (-1.0, TERM_B), (c, TERM_C), (-1.0, TERM_D)], pre, lambda, tol)
}

/// Two-dimensional reduction of the cube-normalized `S_{2,2}(λ)`.
pub fn s22_2d(lambda: f64, tol: f64) -> Result<QuadResult> {
    reduction_check(lambda, tol)?;
    let c = 4f64.powf(lambda + 1.0);
    let pre = 1.0 / (3.0 * (3.0 * lambda + 1.0) * (4.0 * lambda + 1.0));
    bracket(&[(1.0, TERM_B), (-2.0, TERM_A), (c, TERM_E)], pre, lambda, tol)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::selberg_product;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn simplex_matches_cube_product() {
        for &lam in &[-0.15, -0.05, 0.5, 1.0] {
            for n in 1..=4usize {
                let p = SelbergParams::gaussian(n, lam, 0.0, 0.0).unwrap();
                let want = selberg_product(n as u32, lam, 0.0, 0.0).unwrap().try_value().unwrap();
                let q = selberg_general(&p, None, 1e-10 * want / factorial(n)).unwrap();
                let got = factorial(n) * q.value;
                assert!(rel(got, want) < 5e-8, "n={n} lam={lam}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn endpoint_exponents_match_product() {
        let p = SelbergParams::gaussian(3, -0.1, 0.4, 1.5).unwrap();
        let q = selberg_general(&p, None, 1e-11).unwrap();
        // with d ≡ 1 the endpoint exponents are constant across points
        let want = selberg_product(3, -0.1, 0.4, 1.5).unwrap().try_value().unwrap();
        assert!(rel(6.0 * q.value, want) < 1e-8);
    }

    #[test]
    fn trivial_cases() {
        let p = SelbergParams::gaussian(2, 0.5, 0.0, 0.0).unwrap();
        assert!((selberg_general(&p, None, 1e-12).unwrap().value - 1.0 / 6.0).abs() < 1e-14);
        for n in 1..=5 {
            let p = SelbergParams::gaussian(n, 0.0, 0.0, 0.0).unwrap();
            assert_eq!(selberg_general(&p, None, 1e-12).unwrap().value, 1.0 / factorial(n));
        }
    }

    #[test]
    fn non_integrable_is_domain_error() {
        let p = SelbergParams::gaussian(3, -0.4, 0.0, 0.0).unwrap();
        assert!(matches!(selberg_general(&p, None, 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn piecewise_weight_integrates_by_pieces() {
        // w = 1 on [0, ½), 3 on [½, 1]; λ = 0, n = 2: ∫∫_{t1<t2} w(t1)w(t2)
        // = ½(∫w)² = ½·2² = 2
        let w = PiecewisePolynomial::new(vec![0.0, 0.5, 1.0], vec![vec![1.0], vec![3.0]]).unwrap();
        let p = SelbergParams::gaussian(2, 0.0, 0.0, 0.0).unwrap();
        let r = selberg_general(&p, Some(&w), 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{}", r.value);
        // w(t) = t with a negative exponent: ∫∫ t1 t2 (t2 − t1)^{-0.2} against a direct sum
        let w = PiecewisePolynomial::polynomial(vec![0.0, 1.0]).unwrap();
        let p = SelbergParams::gaussian(2, -0.1, 0.0, 0.0).unwrap();
        let with = selberg_general(&p, Some(&w), 1e-12).unwrap().value;
        // ∫_{u<v} u v (v−u)^e = Γ(e+1)·(stuff); with e = −0.2 this is
        // ∫₀¹ v ∫₀^v u (v−u)^e du dv = ∫ v·v^{e+2}/((e+1)(e+2)) dv = 1/((e+1)(e+2)(e+4))
        let e = -0.2;
        let want = 1.0 / ((e + 1.0) * (e + 2.0) * (e + 4.0));
        assert!(rel(with, want) < 1e-10, "{with} vs {want}");
    }

    #[test]
    fn single_recurrence_residuals() {
        let g = LevySpectrum::gaussian(1.0).unwrap();
        for n in 2..=4 {
            let p = SelbergParams::from_spectrum(&g, n, -0.1, 0.0, 0.0).unwrap();
            assert!(recurrence_residual_single(&p, &g, 1e-10).unwrap() < 1e-7);
        }
        let lp = LevySpectrum::log_poisson(2.0).unwrap();
        let p = SelbergParams::from_spectrum(&lp, 3, -0.05, 0.0, 0.0).unwrap();
        assert!(recurrence_residual_single(&p, &lp, 1e-10).unwrap() < 1e-7);
        let p = SelbergParams::gaussian(2, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(recurrence_residual_single(&p, &g, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn joint_recurrence_residuals() {
        let g = LevySpectrum::gaussian(1.0).unwrap();
        let iv = IntervalPair::halves();
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let r = recurrence_residual_joint(&g, 0.2, &iv, n, m, 1e-10).unwrap();
            assert!(r < 1e-7, "({n},{m}): {r}");
        }
        let iv = IntervalPair::new(0.1, 0.4, 0.55, 0.9).unwrap();
        assert!(recurrence_residual_joint(&g, 0.0, &iv, 2, 1, 1e-12).unwrap() < 1e-12);
        assert!(recurrence_residual_joint(&g, 0.2, &iv, 1, 2, 1e-10).unwrap() < 1e-7);
    }

    #[test]
    fn joint_lebesgue_limit() {
        let g = LevySpectrum::gaussian(1.0).unwrap();
        let iv = IntervalPair::new(0.1, 0.3, 0.6, 0.95).unwrap();
        let r = joint_moment_quad(&g, 0.0, &iv, 1, 1, 1e-12).unwrap();
        assert!((r.value - 0.2 * 0.35).abs() < 1e-14);
    }

    #[test]
    fn joint_cube_matches_binomial_sums() {
        for (n, m, exact) in [(1usize, 1usize, 7.0 / 6.0), (1, 2, 17.0 / 72.0), (1, 3, 1471.0 / 252000.0), (2, 2, 2987.0 / 84000.0)] {
            let q = joint_cube_quad(n, m, 1.0, 1e-12).unwrap();
            assert!(rel(q.value, exact) < 1e-9, "({n},{m}): {} vs {exact}", q.value);
        }
    }

    #[test]
    fn reductions_at_zero_and_one() {
        assert!((s13_2d(0.0, 1e-12).unwrap().value - 1.0).abs() < 1e-13);
        assert!((s22_2d(0.0, 1e-12).unwrap().value - 1.0).abs() < 1e-13);
        let a = s13_2d(1.0, 1e-12).unwrap().value;
        let b = s22_2d(1.0, 1e-12).unwrap().value;
        assert!(rel(a, 1471.0 / 252000.0) < 1e-9, "{a}");
        assert!(rel(b, 2987.0 / 84000.0) < 1e-9, "{b}");
    }

    #[test]
    fn reductions_match_direct_quadrature_for_negative_lambda() {
        let a = s13_2d(-0.1, 1e-10).unwrap();
        let b = joint_cube_quad(1, 3, -0.1, 1e-8).unwrap();
        assert!((a.value - b.value).abs() < 1e-7, "{} vs {}", a.value, b.value);
        let a = s22_2d(-0.1, 1e-10).unwrap();
        let b = joint_cube_quad(2, 2, -0.1, 1e-8).unwrap();
        assert!((a.value - b.value).abs() < 1e-7, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn interval_pair_validation() {
        assert!(IntervalPair::new(0.0, 0.5, 0.4, 1.0).is_err());
        assert!(IntervalPair::new(0.0, 0.5, 0.5, 1.1).is_err());
        let iv: IntervalPair = serde_json::from_str("[0.0, 0.5, 0.5, 1.0]").unwrap();
        assert_eq!(iv, IntervalPair::halves());
    }
}
