//! Gauss–Jacobi rules for `∫₀¹ t^a f(t) dt` via Golub–Welsch.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug)]
pub(crate) struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point rule exact for `t^a · p(t)`, `deg p ≤ 2n − 1`.
pub(crate) fn gauss_jacobi_unit(n: usize, a: f64) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (n, a.to_bits());
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(build(n, a));
    cache.lock().expect("rule cache poisoned").insert(key, Arc::clone(&rule));
    rule
}

fn build(n: usize, a: f64) -> Rule {
    assert!(n >= 1 && a > -1.0, "Gauss–Jacobi needs n >= 1 and a > -1");
    // Jacobi weight (1−x)^α (1+x)^β on [−1, 1] with α = 0, β = a.
    let (al, be) = (0.0f64, a);
    let ab = al + be;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        m[(k, k)] = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + al) * (j + be) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            m[(k, k + 1)] = b2.sqrt();
            m[(k + 1, k)] = b2.sqrt();
        }
    }
    let eig = SymmetricEigen::new(m);
    let mass = 1.0 / (a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + eig.eigenvalues[i]) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}
