//! Sector decomposition and tensor Gauss–Jacobi integration of a
//! [`GapProblem`].
//!
//! In each block one gap is declared the largest (the primary gap); the
//! others become ratios `x_i = g_i / g_j ∈ [0, 1]`. The remaining gaps of a
//! block split into a left and a right chain; a right chain is joined to the
//! next block's left chain when the two blocks touch and a singular factor
//! crosses the junction. Each chain is then split recursively at its
//! largest element, so that a chain variable equals the product of the node
//! variables `t_v` above it. A singular factor `(Σ_{i∈S} c_i g_i)^e` over a
//! contiguous run `S` then equals `Π_{v ⊇ S} t_v^e` times a smooth positive
//! function, and `t_v^{a_v}` is absorbed by a Gauss–Jacobi rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gap::GapProblem;
use super::jacobi::gauss_jacobi_unit;
use super::QuadResult;
use crate::error::{Error, Result};

/// Rule orders tried in turn for every sector.
const LEVELS: [usize; 10] = [4, 6, 8, 11, 14, 18, 23, 29, 36, 44];
/// Above this dimension only Monte Carlo is attempted.
pub(crate) const MAX_TENSOR_DIM: usize = 6;

#[derive(Debug, Clone)]
pub(crate) struct Options {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
    pub monte_carlo: bool,
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_evals: 400_000_000,
            monte_carlo: true,
            mc_samples: 4_000_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    lo: usize,
    hi: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Sector {
    dim: usize,
    primary: Vec<bool>,
    /// per global gap, the node variables whose product gives `x_g`
    anc: Vec<Vec<usize>>,
    /// singular exponent carried by each node
    sing: Vec<f64>,
    /// Jacobi exponent `a_v` of each node
    jacobi: Vec<f64>,
}

/// All binary-search-tree shapes over positions `0..len`, as node lists.
fn tree_shapes(len: usize) -> Vec<Vec<Node>> {
    fn rec(lo: usize, hi: usize) -> Vec<Vec<Node>> {
        if lo > hi {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for root in lo..=hi {
            let left = if root > lo { rec(lo, root - 1) } else { vec![Vec::new()] };
            let right = rec(root + 1, hi);
            for l in &left {
                for r in &right {
                    let mut nodes = vec![Node { lo, hi }];
                    let _ = root;
                    nodes.extend(l.iter().cloned());
                    nodes.extend(r.iter().cloned());
                    out.push(nodes);
                }
            }
        }
        out
    }
    if len == 0 {
        return vec![Vec::new()];
    }
    rec(0, len - 1)
}

fn cartesian(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in counts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..c).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

pub(crate) fn build_sectors(problem: &GapProblem) -> Result<Vec<Sector>> {
    let nb = problem.blocks.len();
    let ngaps = problem.gap_count();
    let singular: Vec<usize> = (0..problem.factors.len())
        .filter(|&i| problem.factors[i].delta == 0.0 && problem.factors[i].exp != 0.0)
        .collect();
    let mut merge = vec![false; nb.saturating_sub(1)];
    for &fi in &singular {
        let f = &problem.factors[fi];
        let first = problem.block_of(f.terms[0].0);
        let last = problem.block_of(f.terms[f.terms.len() - 1].0);
        if last == first + 1 {
            merge[first] = true;
        } else if last > first + 1 {
            return Err(Error::Numerical("singular factor spans more than two blocks".into()));
        }
    }
    let mut shape_cache: Vec<Vec<Vec<Node>>> = Vec::new();
    let mut shapes = |len: usize| -> Vec<Vec<Node>> {
        while shape_cache.len() <= len {
            let l = shape_cache.len();
            shape_cache.push(tree_shapes(l));
        }
        shape_cache[len].clone()
    };

    let choices: Vec<usize> = problem.blocks.iter().map(|b| b.free + 1).collect();
    let mut sectors = Vec::new();
    for primary_choice in cartesian(&choices) {
        let mut primary = vec![false; ngaps];
        // chains as lists of global gap ids, in position order
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut carry: Vec<usize> = Vec::new();
        for (b, blk) in problem.blocks.iter().enumerate() {
            let j = primary_choice[b];
            primary[blk.offset + j] = true;
            let mut left: Vec<usize> = (0..j).map(|r| blk.offset + r).collect();
            if !carry.is_empty() {
                let mut joined = std::mem::take(&mut carry);
                joined.append(&mut left);
                left = joined;
            }
            if !left.is_empty() {
                chains.push(left);
            }
            let right: Vec<usize> = (j + 1..=blk.free).map(|r| blk.offset + r).collect();
            if b + 1 < nb && merge[b] {
                carry = right;
            } else if !right.is_empty() {
                chains.push(right);
            }
        }
        let mut chain_of = vec![(usize::MAX, 0usize); ngaps];
        for (c, chain) in chains.iter().enumerate() {
            for (p, &g) in chain.iter().enumerate() {
                chain_of[g] = (c, p);
            }
        }
        let per_chain: Vec<Vec<Vec<Node>>> = chains.iter().map(|c| shapes(c.len())).collect();
        let counts: Vec<usize> = per_chain.iter().map(Vec::len).collect();
        for pick in cartesian(&counts) {
            let mut anc = vec![Vec::new(); ngaps];
            let mut node_range = Vec::new();
            let mut node_chain = Vec::new();
            for (c, chain) in chains.iter().enumerate() {
                for node in &per_chain[c][pick[c]] {
                    let id = node_range.len();
                    node_range.push((node.lo, node.hi));
                    node_chain.push(c);
                    for &g in &chain[node.lo..=node.hi] {
                        anc[g].push(id);
                    }
                }
            }
            let dim = node_range.len();
            let mut sing = vec![0.0; dim];
            for &fi in &singular {
                let f = &problem.factors[fi];
                if f.terms.iter().any(|&(g, _)| primary[g]) {
                    continue;
                }
                let (c, lo) = chain_of[f.terms[0].0];
                let (c2, hi) = chain_of[f.terms[f.terms.len() - 1].0];
                let contiguous = c == c2
                    && hi + 1 - lo == f.terms.len()
                    && f.terms.iter().all(|&(g, _)| chain_of[g].0 == c);
                if !contiguous {
                    return Err(Error::Numerical("singular factor is not a contiguous gap run".into()));
                }
                for u in 0..dim {
                    let (ulo, uhi) = node_range[u];
                    if node_chain[u] == c && ulo <= lo && hi <= uhi {
                        sing[u] += f.exp;
                    }
                }
            }
            let jacobi: Vec<f64> =
                (0..dim).map(|u| (node_range[u].1 - node_range[u].0) as f64 + sing[u]).collect();
            if let Some(bad) = jacobi.iter().find(|&&a| !(a > -1.0)) {
                return Err(Error::domain(format!(
                    "integrand is not integrable: a point cluster scales like eps^{} with a nonpositive power",
                    bad + 1.0
                )));
            }
            sectors.push(Sector { dim, primary: primary.clone(), anc, sing, jacobi });
        }
    }
    Ok(sectors)
}

struct Evaluator<'a> {
    problem: &'a GapProblem,
    sector: &'a Sector,
}

impl Evaluator<'_> {
    /// `F · J / Π t_v^{a_v}` at node values `t`, with scratch space `x`.
    fn eval(&self, t: &[f64], x: &mut [f64]) -> f64 {
        let s = self.sector;
        for (g, xg) in x.iter_mut().enumerate() {
            *xg = if s.primary[g] { 1.0 } else { s.anc[g].iter().map(|&u| t[u]).product() };
        }
        let mut val = self.problem.constant;
        for blk in &self.problem.blocks {
            let gaps = &mut x[blk.offset..=blk.offset + blk.free];
            let sum: f64 = gaps.iter().sum();
            let scale = blk.len / sum;
            for g in gaps.iter_mut() {
                *g *= scale;
            }
            val *= scale.powi(blk.free as i32) / sum;
        }
        for f in &self.problem.factors {
            let v = f.delta + f.terms.iter().map(|&(g, c)| c * x[g]).sum::<f64>();
            val *= v.powf(f.exp);
        }
        for w in &self.problem.weights {
            let blk = &self.problem.blocks[w.block];
            let pos = blk.start + x[blk.offset..blk.offset + w.index].iter().sum::<f64>();
            val *= (w.f)(pos);
        }
        for (u, &e) in s.sing.iter().enumerate() {
            if e != 0.0 {
                val *= t[u].powf(-e);
            }
        }
        val
    }

    fn tensor(&self, order: usize) -> (f64, u64) {
        let s = self.sector;
        let mut x = vec![0.0; self.problem.gap_count()];
        if s.dim == 0 {
            return (self.eval(&[], &mut x), 1);
        }
        let rules: Vec<_> = s.jacobi.iter().map(|&a| gauss_jacobi_unit(order, a)).collect();
        let mut idx = vec![0usize; s.dim];
        let mut t: Vec<f64> = rules.iter().map(|r| r.nodes[0]).collect();
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        let mut count = 0u64;
        loop {
            let w: f64 = idx.iter().zip(&rules).map(|(&i, r)| r.weights[i]).product();
            let term = w * self.eval(&t, &mut x);
            // Neumaier summation
            let next = sum + term;
            comp += if sum.abs() >= term.abs() { (sum - next) + term } else { (term - next) + sum };
            sum = next;
            count += 1;
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < order {
                    t[d] = rules[d].nodes[idx[d]];
                    break;
                }
                idx[d] = 0;
                t[d] = rules[d].nodes[0];
                d += 1;
                if d == s.dim {
                    return (sum + comp, count);
                }
            }
        }
    }

    fn monte_carlo(&self, samples: u64, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let s = self.sector;
        let mut x = vec![0.0; self.problem.gap_count()];
        let norm: f64 = s.jacobi.iter().map(|a| 1.0 / (a + 1.0)).product();
        let mut t = vec![0.0; s.dim];
        let (mut mean, mut m2) = (0.0f64, 0.0f64);
        for k in 0..samples {
            for (tu, a) in t.iter_mut().zip(&s.jacobi) {
                let u: f64 = rng.random();
                *tu = (1.0 - u).powf(1.0 / (a + 1.0));
            }
            let v = self.eval(&t, &mut x);
            let delta = v - mean;
            mean += delta / (k + 1) as f64;
            m2 += delta * (v - mean);
        }
        let var = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
        (norm * mean, norm * (var / samples as f64).sqrt())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

struct SectorState {
    values: Vec<f64>,
}

impl SectorState {
    fn error(&self) -> f64 {
        match self.values.len() {
            0 | 1 => f64::INFINITY,
            n => (self.values[n - 1] - self.values[n - 2]).abs(),
        }
    }

    fn value(&self) -> f64 {
        *self.values.last().expect("at least one level")
    }
}

pub(crate) fn integrate(problem: &GapProblem, opts: &Options) -> Result<QuadResult> {
    let dim = problem.dimension();
    if problem.factors.is_empty() && problem.weights.is_empty() {
        let volume: f64 = problem.blocks.iter().map(|b| b.len.powi(b.free as i32) / factorial(b.free)).product();
        return Ok(QuadResult { value: problem.constant * volume, abs_error_estimate: 0.0, evaluations: 0 });
    }
    let sectors = build_sectors(problem)?;
    if dim == 0 {
        let (v, n) = Evaluator { problem, sector: &sectors[0] }.tensor(1);
        return Ok(QuadResult { value: v, abs_error_estimate: 0.0, evaluations: n });
    }
    if dim > MAX_TENSOR_DIM {
        return monte_carlo(problem, &sectors, opts, None);
    }

    let cost = |level: usize| (LEVELS[level] as u64).pow(dim as u32);
    let mut evals = 0u64;
    let mut states: Vec<SectorState> = sectors
        .par_iter()
        .map(|s| {
            let ev = Evaluator { problem, sector: s };
            let (a, _) = ev.tensor(LEVELS[0]);
            let (b, _) = ev.tensor(LEVELS[1]);
            SectorState { values: vec![a, b] }
        })
        .collect();
    evals += sectors.len() as u64 * (cost(0) + cost(1));

    loop {
        let value: f64 = states.iter().map(SectorState::value).sum();
        let error: f64 = states.iter().map(SectorState::error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult { value, abs_error_estimate: error, evaluations: evals });
        }
        let improvable: Vec<usize> = (0..states.len()).filter(|&i| states[i].values.len() < LEVELS.len()).collect();
        let worst = improvable.iter().map(|&i| states[i].error()).fold(0.0, f64::max);
        let picked: Vec<usize> = improvable.into_iter().filter(|&i| states[i].error() >= 0.1 * worst && worst > 0.0).collect();
        let round_cost: u64 = picked.iter().map(|&i| cost(states[i].values.len())).sum();
        if picked.is_empty() || evals + round_cost > opts.max_evals {
            let best = QuadResult { value, abs_error_estimate: error, evaluations: evals };
            if opts.monte_carlo {
                return monte_carlo(problem, &sectors, opts, Some(best));
            }
            return Err(accuracy(best, "tensor rules exhausted the evaluation budget"));
        }
        let next: Vec<f64> = picked
            .par_iter()
            .map(|&i| Evaluator { problem, sector: &sectors[i] }.tensor(LEVELS[states[i].values.len()]).0)
            .collect();
        for (&i, v) in picked.iter().zip(next) {
            states[i].values.push(v);
        }
        evals += round_cost;
    }
}

fn accuracy(best: QuadResult, reason: &str) -> Error {
    Error::Accuracy { best: best.value, error: best.abs_error_estimate, reason: reason.into() }
}

/// Importance sampling with `t_v ~ (a_v + 1) t^{a_v}` in every sector.
fn monte_carlo(
    problem: &GapProblem,
    sectors: &[Sector],
    opts: &Options,
    tensor_best: Option<QuadResult>,
) -> Result<QuadResult> {
    let per_sector = (opts.mc_samples / sectors.len() as u64).max(1000);
    let parts: Vec<(f64, f64)> = sectors
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            Evaluator { problem, sector: s }.monte_carlo(per_sector, &mut rng)
        })
        .collect();
    let value: f64 = parts.iter().map(|p| p.0).sum();
    // three standard errors
    let error = 3.0 * parts.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    let result = QuadResult { value, abs_error_estimate: error, evaluations: per_sector * sectors.len() as u64 };
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    if error <= target {
        return Ok(result);
    }
    let best = match tensor_best {
        Some(t) if t.abs_error_estimate <= error => t,
        _ => result,
    };
    Err(accuracy(best, "tolerance not reached by tensor rules or Monte Carlo"))
}
