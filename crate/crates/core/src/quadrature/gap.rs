//! Integrals over products of ordered simplices, written in gap
//! coordinates.
//!
//! A block `[A, B]` with `L` ordered free points `t_1 < … < t_L` has gaps
//! `g_0 = t_1 − A`, `g_r = t_{r+1} − t_r`, `g_L = B − t_L`, all
//! nonnegative with sum `B − A`. Every factor of the integrand is
//! `(δ + Σ c_i g_i)^e` with `δ ≥ 0` and `c_i > 0`: distances are always
//! sums of gaps, never differences of positions.

use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GapBlock {
    pub start: f64,
    pub len: f64,
    pub free: usize,
    /// Global id of `g_0`; the block owns ids `offset ..= offset + free`.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor {
    pub delta: f64,
    /// (global gap id, positive coefficient), ids increasing
    pub terms: Vec<(usize, f64)>,
    pub exp: f64,
}

pub(crate) type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub(crate) struct PointWeight {
    pub block: usize,
    /// 1-based index of the point inside its block
    pub index: usize,
    pub f: WeightFn,
}

#[derive(Clone)]
pub(crate) struct GapProblem {
    pub blocks: Vec<GapBlock>,
    pub factors: Vec<Factor>,
    pub weights: Vec<PointWeight>,
    pub constant: f64,
}

impl GapProblem {
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.free).sum()
    }

    pub fn gap_count(&self) -> usize {
        self.blocks.iter().map(|b| b.free + 1).sum()
    }

    /// Block owning a global gap id.
    pub fn block_of(&self, gap: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| gap >= b.offset && gap <= b.offset + b.free)
            .expect("gap id in range")
    }
}

/// A point of the layout: free inside a block, or pinned at a position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Point {
    Free(usize),
    Fixed(f64),
}

/// Point-level description: blocks, points in increasing position order,
/// and power factors `|x_p − x_q|^e` between listed points.
pub(crate) struct Layout {
    pub blocks: Vec<(f64, f64)>,
    pub points: Vec<Point>,
    pub pairs: Vec<(usize, usize, f64)>,
    pub weight: Option<WeightFn>,
}

impl Layout {
    pub fn into_problem(self) -> Result<GapProblem> {
        let nb = self.blocks.len();
        for w in self.blocks.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::invalid("blocks must be ordered and disjoint"));
            }
        }
        for &(a, b) in &self.blocks {
            if !(a < b) {
                return Err(Error::invalid(format!("empty block [{a}, {b}]")));
            }
        }
        // index of each free point inside its block
        let mut counts = vec![0usize; nb];
        let mut local = vec![0usize; self.points.len()];
        for (i, p) in self.points.iter().enumerate() {
            if let Point::Free(b) = *p {
                counts[b] += 1;
                local[i] = counts[b];
            }
        }
        // keep only blocks that carry free points
        let mut remap = vec![usize::MAX; nb];
        let mut blocks = Vec::new();
        let mut offset = 0;
        for (b, &(start, end)) in self.blocks.iter().enumerate() {
            if counts[b] > 0 {
                remap[b] = blocks.len();
                blocks.push(GapBlock { start, len: end - start, free: counts[b], offset });
                offset += counts[b] + 1;
            }
        }
        let mut constant = 1.0;
        let mut factors = Vec::new();
        for &(p, q, exp) in &self.pairs {
            if exp == 0.0 {
                continue;
            }
            let (p, q) = if p < q { (p, q) } else { (q, p) };
            let form = self.distance(p, q, &local, &remap, &blocks)?;
            match form {
                None => {
                    let (Point::Fixed(x), Point::Fixed(y)) = (self.points[p], self.points[q]) else {
                        unreachable!("only fixed pairs reduce to constants")
                    };
                    let d = (y - x).abs();
                    if d == 0.0 && exp < 0.0 {
                        return Err(Error::domain("two pinned points coincide under a negative power"));
                    }
                    constant *= d.powf(exp);
                }
                Some((delta, _)) if delta < 0.0 => {
                    return Err(Error::invalid("layout points are not in increasing order"));
                }
                Some((delta, terms)) => factors.push(Factor { delta, terms, exp }),
            }
        }
        let weights = match self.weight {
            None => Vec::new(),
            Some(f) => self
                .points
                .iter()
                .enumerate()
                .filter_map(|(i, p)| match p {
                    Point::Free(b) => Some(PointWeight { block: remap[*b], index: local[i], f: Arc::clone(&f) }),
                    Point::Fixed(_) => None,
                })
                .collect(),
        };
        Ok(GapProblem { blocks, factors, weights, constant })
    }

    /// Linear gap form of `x_q − x_p` for `p < q`; `None` when both are pinned.
    fn distance(
        &self,
        p: usize,
        q: usize,
        local: &[usize],
        remap: &[usize],
        blocks: &[GapBlock],
    ) -> Result<Option<(f64, Vec<(usize, f64)>)>> {
        let prefix = |b: &GapBlock, i: usize| (0..i).map(|r| (b.offset + r, 1.0)).collect::<Vec<_>>();
        let suffix = |b: &GapBlock, i: usize| (i..=b.free).map(|r| (b.offset + r, 1.0)).collect::<Vec<_>>();
        let end = |b: &GapBlock| b.start + b.len;
        let outside = |x: f64| Error::invalid(format!("pinned point {x} lies inside a block"));
        Ok(match (self.points[p], self.points[q]) {
            (Point::Fixed(_), Point::Fixed(_)) => None,
            (Point::Fixed(x), Point::Free(b)) => {
                let blk = &blocks[remap[b]];
                if x > blk.start {
                    return Err(outside(x));
                }
                Some((blk.start - x, prefix(blk, local[q])))
            }
            (Point::Free(b), Point::Fixed(x)) => {
                let blk = &blocks[remap[b]];
                if x < end(blk) {
                    return Err(outside(x));
                }
                Some((x - end(blk), suffix(blk, local[p])))
            }
            (Point::Free(b1), Point::Free(b2)) if b1 == b2 => {
                let blk = &blocks[remap[b1]];
                let terms = (local[p]..local[q]).map(|r| (blk.offset + r, 1.0)).collect();
                Some((0.0, terms))
            }
            (Point::Free(b1), Point::Free(b2)) => {
                let (lo, hi) = (&blocks[remap[b1]], &blocks[remap[b2]]);
                let mut terms = suffix(lo, local[p]);
                terms.extend(prefix(hi, local[q]));
                Some((hi.start - end(lo), terms))
            }
        })
    }
}
