use rayon::prelude::*;
use rug::Float;

use crate::mp;

/// Chebyshev–Gauss nodes `x_j = cos((j+½)π/N)` with a cached table of
/// `T_k(x_j)` for `k ≤ kmax`.
#[derive(Clone, Debug)]
pub struct ChebGrid {
    prec: u32,
    nodes: Vec<Float>,
    // table[k][j] = T_k(x_j)
    table: Vec<Vec<Float>>,
}

impl ChebGrid {
    pub fn new(n_nodes: usize, kmax: usize, prec: u32) -> Self {
        assert!(n_nodes > 0);
        let pi = mp::pi(prec);
        let nodes: Vec<Float> = (0..n_nodes)
            .into_par_iter()
            .map(|j| {
                let angle = Float::with_val(prec, 2 * j + 1) * &pi / (2 * n_nodes) as u64;
                angle.cos()
            })
            .collect();
        let mut table: Vec<Vec<Float>> = Vec::with_capacity(kmax + 1);
        table.push(vec![Float::with_val(prec, 1); n_nodes]);
        if kmax >= 1 {
            table.push(nodes.clone());
        }
        for k in 2..=kmax {
            let row: Vec<Float> = (0..n_nodes)
                .map(|j| {
                    let two_x_t = Float::with_val(prec, &nodes[j] * &table[k - 1][j]) * 2u32;
                    two_x_t - &table[k - 2][j]
                })
                .collect();
            table.push(row);
        }
        Self { prec, nodes, table }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn kmax(&self) -> usize {
        self.table.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Classical coefficients `a_0 = (1/N) Σ v_j`, `a_k = (2/N) Σ v_j T_k(x_j)`
    /// for `k ≤ kmax`.
    pub fn coeffs(&self, values: &[Float], kmax: usize) -> Vec<Float> {
        assert_eq!(values.len(), self.nodes.len());
        assert!(
            kmax <= self.kmax(),
            "grid table holds T_k only up to k = {}",
            self.kmax()
        );
        let n = self.nodes.len() as u64;
        let prec = self.prec;
        (0..=kmax)
            .into_par_iter()
            .map(|k| {
                let mut s = Float::new(prec);
                for (v, t) in values.iter().zip(&self.table[k]) {
                    s += Float::with_val(prec, v * t);
                }
                if k == 0 {
                    s / n
                } else {
                    s * 2u32 / n
                }
            })
            .collect()
    }
}

/// Upper bound on the aliasing error `|a_k^{(N)} − a_k|` of the
/// `N`-node Chebyshev–Gauss coefficient, for a function bounded by
/// `bound` inside the Bernstein ellipse of parameter `rho > 1`.
pub fn aliasing_bound(rho: f64, bound: f64, n_nodes: usize, k: usize) -> f64 {
    // |a_j| ≤ 2 M ρ^{-j}; aliases are a_{2mN ± k}, m ≥ 1.
    let n = n_nodes as f64;
    let kk = k as f64;
    let r2n = rho.powf(-2.0 * n);
    2.0 * bound * (rho.powf(kk) + rho.powf(-kk)) * r2n / (1.0 - r2n)
}
