use std::collections::BTreeMap;

use logid_core::binomsum::{
    joint_sum, morris_sum, rational_string, selberg_sum, sum_relation_residual,
};
use logid_core::closedform::{
    lognormal_joint_from_sum, lognormal_moment, low_moment, morris_product_exact, poisson_i, poisson_j, poisson_joint,
    selberg_product_exact, JointPair,
};
use logid_core::quadrature::{
    joint_cube_quad, joint_moment_quad, recurrence_residual_joint, recurrence_residual_single, s13_2d, s22_2d,
    selberg_general, IntervalPair, SelbergParams,
};
use logid_core::simulator::{
    estimate_log_covariance, estimate_moment, log_covariance_slope, scaling_exponent, Model, SimConfig,
};
use logid_core::{BigRational, Error, Finiteness, LevySpectrum};
use num_traits::ToPrimitive;

use crate::config::{Method, Quantity, RunConfig, Suite};
use crate::output::{Cell, Table};
use crate::CliError;

const DEFAULT_TOL: f64 = 1e-9;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn mu_of(cfg: &RunConfig) -> f64 {
    cfg.parameters.mu.expect("validated: mu present")
}

fn tol_of(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or(DEFAULT_TOL)
}

fn poisson_c(spec: &LevySpectrum) -> Option<f64> {
    spec.log_poisson_c()
}

pub fn spectrum(cfg: &RunConfig, table: &mut Table) -> Result<bool, CliError> {
    let spec = &cfg.spectrum;
    let mu = mu_of(cfg);
    let n_max = cfg.parameters.n_max.unwrap_or(10);
    if n_max == 0 {
        return Err(CliError::Invalid("n_max must be at least 1".into()));
    }
    for m in 1..=n_max {
        table.push(vec!["d".into(), m.into(), spec.d_coeff(m)?.into(), Cell::Empty]);
    }
    for n in 1..=n_max {
        table.push(vec!["phi(-i n)".into(), n.into(), spec.phi_im(f64::from(n))?.into(), Cell::Empty]);
    }
    for q in 2..=n_max {
        let f = spec.moment_finiteness(mu, f64::from(q))?;
        let verdict = match f.verdict {
            Finiteness::Finite => "finite",
            Finiteness::Boundary => "boundary",
            Finiteness::Infinite => "infinite",
        };
        table.push(vec!["multiscaling".into(), q.into(), f.exponent.into(), verdict.into()]);
    }
    let nondeg = spec.is_nondegenerate(mu)?;
    table.push(vec![
        "nondegeneracy bound".into(),
        Cell::Empty,
        spec.nondegeneracy_bound().into(),
        (if nondeg { "nondegenerate" } else { "degenerate" }).into(),
    ]);
    match spec.critical_moment(mu)? {
        Some(q) => table.push(vec!["critical moment".into(), Cell::Empty, q.into(), Cell::Empty]),
        None => table.push(vec!["critical moment".into(), Cell::Empty, Cell::Empty, "all finite".into()]),
    }
    Ok(true)
}

pub const SPECTRUM_COLUMNS: &[&str] = &["quantity", "order", "value", "verdict"];
pub const MOMENT_COLUMNS: &[&str] = &["method", "quantity", "n", "m", "value", "abs_error", "exact"];
pub const VERIFY_COLUMNS: &[&str] = &["identity", "parameters", "residual", "tolerance", "status"];
pub const SIMULATE_COLUMNS: &[&str] =
    &["model", "mu", "epsilon", "grid_n", "paths", "quantity", "value", "std_error"];

fn unsupported(what: &str, nearest: &str) -> CliError {
    CliError::Unsupported(format!("{what}; nearest supported route: {nearest}"))
}

fn check_finite_moment(spec: &LevySpectrum, mu: f64, order: u32) -> Result<(), CliError> {
    if order >= 2 {
        let f = spec.moment_finiteness(mu, f64::from(order))?;
        if f.verdict != Finiteness::Finite {
            return Err(CliError::Invalid(format!(
                "the moment of order {order} is not finite at mu = {mu} (multiscaling exponent {})",
                f.exponent
            )));
        }
    }
    Ok(())
}

pub fn moment(cfg: &RunConfig, table: &mut Table) -> Result<bool, CliError> {
    let p = &cfg.parameters;
    let n = p.n.expect("validated: n present");
    let method = cfg.method.expect("validated: method present");
    let raw = p.raw.unwrap_or(false);
    let m = p.m;
    let tag = match method {
        Method::Closed => "closed",
        Method::Quad => "quad",
        Method::Binom => "binom",
        Method::Sim => "sim",
    };
    let push = |table: &mut Table, quantity: &str, value: f64, err: Option<f64>, exact: Option<BigRational>| {
        table.push(vec![
            tag.into(),
            quantity.into(),
            n.into(),
            m.map_or(Cell::Empty, Cell::from),
            value.into(),
            err.into(),
            exact.map_or(Cell::Empty, |r| Cell::Rational(rational_string(&r))),
        ]);
    };
    match method {
        Method::Binom => {
            let lambda = p.lambda.expect("validated: lambda present");
            if !(cfg.spectrum.is_gaussian() && cfg.spectrum.sigma2() == 1.0) {
                return Err(unsupported("binomial sums cover the unit gaussian spectrum only", "--method quad"));
            }
            let (quantity, exact) = match (p.morris, m) {
                (Some([a, b]), None) => ("morris", morris_sum(n, a, b, lambda)?),
                (Some(_), Some(_)) => return Err(CliError::Invalid("morris takes a single order n".into())),
                (None, None) => ("selberg", selberg_sum(n, lambda)?),
                (None, Some(m)) => ("joint-selberg", joint_sum(n, m, lambda)?),
            };
            push(table, quantity, approx(&exact), None, Some(exact));
        }
        Method::Closed => {
            let mu = mu_of(cfg);
            let spec = &cfg.spectrum;
            match m {
                None => {
                    check_finite_moment(spec, mu, n)?;
                    let value = closed_single(spec, mu, n)?;
                    let value = if raw { value / factorial(n) } else { value };
                    push(table, if raw { "ordered-integral" } else { "moment" }, value, None, None);
                }
                Some(m) => {
                    let iv = p.intervals.unwrap_or_else(IntervalPair::halves);
                    if iv != IntervalPair::halves() {
                        return Err(unsupported("closed joint moments need the intervals [0,1/2], [1/2,1]", "--method quad"));
                    }
                    check_finite_moment(spec, mu, n + m)?;
                    let value = closed_joint(spec, mu, n, m)?;
                    let value = if raw { value / (factorial(n) * factorial(m)) } else { value };
                    push(table, if raw { "ordered-integral" } else { "joint-moment" }, value, None, None);
                }
            }
        }
        Method::Quad => {
            let mu = mu_of(cfg);
            let spec = &cfg.spectrum;
            let tol = tol_of(cfg);
            match m {
                None => {
                    check_finite_moment(spec, mu, n)?;
                    let params = SelbergParams::from_spectrum(spec, n as usize, -mu / 2.0, 0.0, 0.0)?;
                    let k = factorial(n);
                    let r = selberg_general(&params, None, tol / k)?;
                    let (value, err) = if raw { (r.value, r.abs_error_estimate) } else { (k * r.value, k * r.abs_error_estimate) };
                    push(table, if raw { "ordered-integral" } else { "moment" }, value, Some(err), None);
                }
                Some(m) => {
                    let iv = p.intervals.unwrap_or_else(IntervalPair::halves);
                    let r = joint_moment_quad(spec, mu, &iv, n as usize, m as usize, tol)?;
                    let k = if raw { factorial(n) * factorial(m) } else { 1.0 };
                    push(
                        table,
                        if raw { "ordered-integral" } else { "joint-moment" },
                        r.value / k,
                        Some(r.abs_error_estimate / k),
                        None,
                    );
                }
            }
        }
        Method::Sim => {
            let (model, config) = sim_setup(cfg)?;
            let [a, b] = p.interval.unwrap_or([0.0, 1.0]);
            let est = estimate_moment(&config, model, &[(a, b)], &[f64::from(n)])?;
            push(table, "moment", est.mean, Some(est.std_error), None);
        }
    }
    Ok(true)
}

fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn closed_single(spec: &LevySpectrum, mu: f64, n: u32) -> Result<f64, CliError> {
    if n <= 1 {
        return Ok(1.0);
    }
    if spec.is_gaussian() {
        return Ok(lognormal_moment(mu * spec.sigma2(), n)?);
    }
    match poisson_c(spec) {
        Some(c) if c == 2.0 && n <= 4 => Ok(factorial(n) * poisson_i(n, -mu / 2.0)?),
        Some(c) if c == 0.5 && n <= 4 => Ok(factorial(n) * poisson_j(n, -(0.5f64).powi(n as i32) * mu / 2.0)?),
        _ if n <= 3 => Ok(low_moment(spec, mu, n)?),
        _ => Err(unsupported("closed forms for this spectrum stop at n = 3", "--method quad")),
    }
}

fn closed_joint(spec: &LevySpectrum, mu: f64, n: u32, m: u32) -> Result<f64, CliError> {
    let big_n = n + m;
    if spec.is_gaussian() && big_n <= 3 {
        let lambda = -mu * spec.sigma2() / 2.0;
        let s = lognormal_joint_from_sum(big_n, n, lambda, &BTreeMap::new())?;
        let nf = f64::from(big_n);
        return Ok(s * 2f64.powf(-nf - lambda * nf * (nf - 1.0)));
    }
    let pair = match (n, m) {
        (1, 1) => JointPair::OneOne,
        (1, 2) => JointPair::OneTwo,
        // the two halves are exchangeable in law
        (2, 1) => JointPair::OneTwo,
        _ => return Err(unsupported("closed joint moments cover (1,1), (1,2) and (2,1)", "--method quad")),
    };
    match poisson_c(spec) {
        Some(c) => Ok(poisson_joint(c, mu, pair)?),
        None => Err(unsupported("closed joint moments need a gaussian or log-Poisson spectrum", "--method quad")),
    }
}

fn sim_setup(cfg: &RunConfig) -> Result<(Model, SimConfig), CliError> {
    let p = &cfg.parameters;
    let spec = &cfg.spectrum;
    let mu = mu_of(cfg);
    let (model, mu_eff) = if spec.is_gaussian() {
        (Model::Gaussian, mu * spec.sigma2())
    } else if let Some(c) = poisson_c(spec) {
        (Model::Poisson(c), mu)
    } else {
        return Err(unsupported("simulation covers gaussian and single-atom log-Poisson spectra", "--method quad"));
    };
    let config = SimConfig::new(
        p.epsilon.unwrap_or(1e-3),
        p.grid_n.unwrap_or(4096),
        p.paths.unwrap_or(10_000),
        cfg.seed.unwrap_or(0),
        mu_eff,
    )?;
    Ok((model, config))
}

pub fn simulate(cfg: &RunConfig, table: &mut Table) -> Result<bool, CliError> {
    let p = &cfg.parameters;
    let (model, config) = sim_setup(cfg)?;
    let model_name = match model {
        Model::Gaussian => "gaussian".to_string(),
        Model::Poisson(c) => format!("poisson(c={c})"),
    };
    let mut push = |quantity: String, value: f64, se: f64| {
        table.push(vec![
            model_name.clone().into(),
            config.mu.into(),
            config.epsilon.into(),
            config.grid_n.into(),
            config.paths.into(),
            quantity.into(),
            value.into(),
            se.into(),
        ]);
    };
    let [a, b] = p.interval.unwrap_or([0.0, 1.0]);
    match p.quantity.expect("validated: quantity present") {
        Quantity::MeanMass => {
            let e = estimate_moment(&config, model, &[(a, b)], &[1.0])?;
            push("mean-mass".into(), e.mean, e.std_error);
        }
        Quantity::SecondMoment => {
            let e = estimate_moment(&config, model, &[(a, b)], &[2.0])?;
            push("second-moment".into(), e.mean, e.std_error);
        }
        Quantity::Moment => {
            let q = p.q.ok_or_else(|| CliError::Invalid("quantity moment needs q".into()))?;
            let e = estimate_moment(&config, model, &[(a, b)], &[q])?;
            push(format!("moment(q={q})"), e.mean, e.std_error);
        }
        Quantity::LogCov => {
            let ts = p.t.clone().unwrap_or_else(|| vec![0.2, 0.4, 0.6, 0.8]);
            let tau = p.tau.unwrap_or(0.02);
            for &t in &ts {
                let e = estimate_log_covariance(&config, model, t, tau)?;
                push(format!("log-cov(t={t} tau={tau})"), e.mean, e.std_error);
            }
            if ts.len() >= 2 {
                let e = log_covariance_slope(&config, model, &ts, tau)?;
                push(format!("log-cov-slope(tau={tau})"), e.mean, e.std_error);
            }
        }
        Quantity::Scaling => {
            let q = p.q.unwrap_or(2.0);
            let ts = p.t.clone().unwrap_or_else(|| vec![1.0 / 16.0, 0.125, 0.25, 0.5, 1.0]);
            let e = scaling_exponent(&config, model, q, &ts)?;
            push(format!("scaling-exponent(q={q})"), e.mean, e.std_error);
        }
    }
    Ok(true)
}

struct Verifier<'a> {
    table: &'a mut Table,
    all_pass: bool,
}

impl Verifier<'_> {
    fn float(&mut self, identity: &str, params: String, residual: f64, tolerance: f64) {
        let ok = residual <= tolerance;
        self.row(identity, params, Cell::Float(residual), Cell::Float(tolerance), ok);
    }

    fn exact(&mut self, identity: &str, params: String, residual: BigRational) {
        let ok = residual == BigRational::from_integer(0.into());
        self.row(identity, params, Cell::Rational(rational_string(&residual)), Cell::Rational("0".into()), ok);
    }

    fn error(&mut self, identity: &str, params: String, err: Error) {
        self.table.push(vec![identity.into(), params.into(), err.to_string().into(), Cell::Empty, "FAIL".into()]);
        self.all_pass = false;
    }

    fn skip(&mut self, identity: &str, params: String, why: &str) {
        self.table.push(vec![identity.into(), params.into(), why.into(), Cell::Empty, "SKIP".into()]);
    }

    fn row(&mut self, identity: &str, params: String, residual: Cell, tolerance: Cell, ok: bool) {
        self.all_pass &= ok;
        self.table.push(vec![identity.into(), params.into(), residual, tolerance, (if ok { "PASS" } else { "FAIL" }).into()]);
    }

    fn relative(&mut self, identity: &str, params: String, got: Result<f64, Error>, want: Result<f64, Error>, tol: f64) {
        match (got, want) {
            (Ok(g), Ok(w)) => self.float(identity, params, (g - w).abs() / w.abs(), tol),
            (Err(e), _) | (_, Err(e)) => self.error(identity, params, e),
        }
    }
}

pub fn verify(cfg: &RunConfig, table: &mut Table) -> Result<bool, CliError> {
    let suite = cfg.parameters.suite.unwrap_or(Suite::All);
    let mut v = Verifier { table, all_pass: true };
    let run = |s: Suite| suite == Suite::All || suite == s;
    if run(Suite::Recurrence) {
        verify_recurrence(cfg, &mut v);
    }
    if run(Suite::Binom) {
        verify_binom(&mut v)?;
    }
    if run(Suite::PoissonLowmoments) {
        verify_poisson(cfg, &mut v)?;
    }
    if run(Suite::Reductions) {
        verify_reductions(cfg, &mut v)?;
    }
    Ok(v.all_pass)
}

fn verify_recurrence(cfg: &RunConfig, v: &mut Verifier) {
    let spec = &cfg.spectrum;
    let mu = cfg.parameters.mu.unwrap_or(0.2);
    let tol = cfg.tol.unwrap_or(1e-10);
    let lambda = -mu / 2.0;
    for n in 2..=4usize {
        let params = format!("n={n} lambda={lambda}");
        let r = SelbergParams::from_spectrum(spec, n, lambda, 0.0, 0.0)
            .and_then(|p| recurrence_residual_single(&p, spec, tol));
        match r {
            Ok(r) => v.float("single recurrence", params, r, 1e-5),
            Err(e) => v.error("single recurrence", params, e),
        }
    }
    for (n, m) in [(1, 1), (1, 2), (2, 2)] {
        let params = format!("n={n} m={m} mu={mu} halves");
        match recurrence_residual_joint(spec, mu, &IntervalPair::halves(), n, m, tol) {
            Ok(r) => v.float("joint recurrence", params, r, 1e-4),
            Err(e) => v.error("joint recurrence", params, e),
        }
    }
}

fn verify_binom(v: &mut Verifier) -> Result<(), CliError> {
    for n in 1..=4u32 {
        for lambda in 0..=3u32 {
            let r = selberg_sum(n, lambda)? - selberg_product_exact(n, lambda, 0, 0);
            v.exact("selberg sum = product", format!("N={n} lambda={lambda}"), r);
        }
    }
    for n in 1..=3u32 {
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for lambda in 0..=2u32 {
                    let r = morris_sum(n, a, b, lambda)? - morris_product_exact(n, a, b, lambda);
                    v.exact("morris sum = product", format!("N={n} a={a} b={b} lambda={lambda}"), r);
                }
            }
        }
    }
    for n in 1..=4u32 {
        for lambda in 0..=2u32 {
            v.exact("sum relation", format!("N={n} lambda={lambda}"), sum_relation_residual(n, lambda)?);
        }
    }
    Ok(())
}

fn verify_poisson(cfg: &RunConfig, v: &mut Verifier) -> Result<(), CliError> {
    let c = poisson_c(&cfg.spectrum).filter(|c| *c == 2.0 || *c == 0.5).unwrap_or(2.0);
    let mu = cfg.parameters.mu.unwrap_or(0.2);
    let spec = LevySpectrum::log_poisson(c)?;
    let tol = cfg.tol.unwrap_or(1e-10);
    for n in 2..=4u32 {
        let params = format!("c={c} mu={mu} n={n}");
        let closed = closed_single(&spec, mu, n);
        let closed = match closed {
            Ok(x) => x,
            Err(CliError::Invalid(why)) => {
                v.skip("poisson moment: closed vs quad", params, &why);
                continue;
            }
            Err(e) => return Err(e),
        };
        let quad = SelbergParams::from_spectrum(&spec, n as usize, -mu / 2.0, 0.0, 0.0)
            .and_then(|p| selberg_general(&p, None, tol))
            .map(|r| factorial(n) * r.value);
        v.relative("poisson moment: closed vs quad", params, quad, Ok(closed), 1e-5);
    }
    for n in 2..=3u32 {
        let params = format!("c={c} mu={mu} n={n}");
        let general = low_moment(&spec, mu, n);
        v.relative("poisson moment: low-order formula", params, general, Ok(closed_single(&spec, mu, n)?), 1e-10);
    }
    for pair in [JointPair::OneOne, JointPair::OneTwo] {
        let (n, m) = pair.orders();
        let params = format!("c={c} mu={mu} n={n} m={m}");
        let quad = joint_moment_quad(&spec, mu, &IntervalPair::halves(), n as usize, m as usize, tol).map(|r| r.value);
        v.relative("poisson joint: closed vs quad", params, quad, poisson_joint(c, mu, pair), 1e-4);
    }
    Ok(())
}

fn verify_reductions(cfg: &RunConfig, v: &mut Verifier) -> Result<(), CliError> {
    let tol = cfg.tol.unwrap_or(1e-10);
    for lambda in [-0.1, 1.0] {
        for (name, n, m) in [("S13", 1, 3), ("S22", 2, 2)] {
            let params = format!("{name} lambda={lambda}");
            let reduced = if n == 1 { s13_2d(lambda, tol) } else { s22_2d(lambda, tol) };
            let direct = joint_cube_quad(n, m, lambda, tol);
            match (reduced, direct) {
                (Ok(a), Ok(b)) => v.float(
                    "2-D reduction vs 4-D quadrature",
                    params,
                    (a.value - b.value).abs(),
                    2.0 * tol + a.abs_error_estimate + b.abs_error_estimate,
                ),
                (Err(e), _) | (_, Err(e)) => v.error("2-D reduction vs 4-D quadrature", params, e),
            }
        }
    }
    for (name, n, m) in [("S13", 1u32, 3u32), ("S22", 2, 2)] {
        let exact = approx(&joint_sum(n, m, 1)?);
        let reduced = if n == 1 { s13_2d(1.0, tol) } else { s22_2d(1.0, tol) }.map(|r| r.value);
        v.relative("2-D reduction vs binomial sum", format!("{name} lambda=1"), reduced, Ok(exact), 1e-8);
        let zero = if n == 1 { s13_2d(0.0, tol) } else { s22_2d(0.0, tol) }.map(|r| r.value);
        v.relative("2-D reduction at lambda=0", format!("{name} lambda=0"), zero, Ok(1.0), 0.0);
    }
    Ok(())
}
