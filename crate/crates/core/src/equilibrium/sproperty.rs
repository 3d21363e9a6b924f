use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::compact::{inverse_joukowski, CompactDescriptor};
use super::measure::DiscreteMeasure;

/// Default offset, in the normalized coordinate where `K = [-1, 1]`
/// (that is, `10^-4` times its diameter there).
pub const DEFAULT_S_STEP: f64 = 2e-4;

/// Guard in the denominator of the relative jump.
pub const S_EPSILON: f64 = 1e-30;

const SAMPLES: usize = 61;
const END_SKIP: f64 = 0.05;

/// One-sided normal derivatives of the Green potential at a point of `K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SSample {
    pub alpha: f64,
    pub point: Complex64,
    pub plus: f64,
    pub minus: f64,
    pub relative_jump: f64,
}

/// Normal derivatives of `G^λ_K` on both sides of `K` at interior sample
/// points (the 5% of the parameter range at each end is skipped).
///
/// Derivatives are taken in the normalized coordinate `s` where `K` is
/// `[-1, 1]`; since `z ↦ s` is conformal, the ratio of the two sides is the
/// same as in the `z`-plane. Each side uses the second-order one-sided
/// difference `(4G(h) − G(2h))/(2h)`, exact for `G` quadratic in the offset
/// with `G = 0` on `K`.
pub fn s_property_profile(k: &CompactDescriptor, lambda: &DiscreteMeasure, h: f64) -> Vec<SSample> {
    let atoms: Vec<(Complex64, f64)> = lambda.atoms().iter().map(|a| (k.phi(a.point), a.weight)).collect();
    let g = |s: Complex64| -> f64 {
        let w = inverse_joukowski(s);
        atoms
            .iter()
            .map(|&(wt, m)| m * ((w * wt.conj() - 1.0) / (w - wt)).norm().ln())
            .sum()
    };
    (0..SAMPLES)
        .map(|i| {
            let frac = END_SKIP + (1.0 - 2.0 * END_SKIP) * i as f64 / (SAMPLES - 1) as f64;
            let alpha = PI * frac;
            let x = -alpha.cos();
            let side = |sign: f64| {
                let g1 = g(Complex64::new(x, sign * h));
                let g2 = g(Complex64::new(x, sign * 2.0 * h));
                (4.0 * g1 - g2) / (2.0 * h)
            };
            let (plus, minus) = (side(1.0), side(-1.0));
            SSample {
                alpha,
                point: k.point(alpha),
                plus,
                minus,
                relative_jump: (plus - minus).abs() / (plus.abs() + minus.abs() + S_EPSILON),
            }
        })
        .collect()
}

/// `max |∂₊G − ∂₋G| / (|∂₊G| + |∂₋G| + ε)` over the samples of
/// [`s_property_profile`].
pub fn s_property_residual(k: &CompactDescriptor, lambda: &DiscreteMeasure, h: f64) -> f64 {
    s_property_profile(k, lambda, h)
        .iter()
        .map(|s| s.relative_jump)
        .fold(0.0, f64::max)
}
