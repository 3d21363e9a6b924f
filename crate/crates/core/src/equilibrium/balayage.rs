use std::f64::consts::PI;

use super::compact::CompactDescriptor;
use super::measure::{DiscreteMeasure, Panel};
use crate::error::Result;

pub const DEFAULT_BALAYAGE_PANELS: usize = 256;

/// Harmonic measure, seen from `r e^{iφ}` (`r > 1`), of the arc
/// `[β_1, β_2]` of the unit circle for the exterior of the disk.
fn arc_harmonic_measure(r: f64, phi: f64, b1: f64, b2: f64) -> f64 {
    let c = (r + 1.0) / (r - 1.0);
    let big = |beta: f64| {
        let psi = beta - phi;
        let k = (psi / (2.0 * PI)).round();
        let psi = psi - 2.0 * PI * k;
        (c * (0.5 * psi).tan()).atan() / PI + k
    };
    big(b2) - big(b1)
}

/// Balayage of `lambda` onto `K` with the default panel count.
pub fn balayage(lambda: &DiscreteMeasure, k: &CompactDescriptor) -> Result<DiscreteMeasure> {
    balayage_with_panels(lambda, k, DEFAULT_BALAYAGE_PANELS)
}

/// Sweeps `lambda` onto `K`: panel `j` of the result covers the arc
/// parameters `α ∈ [jπ/n, (j+1)π/n]` (see [`CompactDescriptor::point`]) and
/// receives `∫ ω(x, panel) dλ(x)`, the harmonic measure being the Poisson
/// integral of the exterior disk over the two sides of the panel.
pub fn balayage_with_panels(lambda: &DiscreteMeasure, k: &CompactDescriptor, n: usize) -> Result<DiscreteMeasure> {
    let edges: Vec<f64> = (0..=n).map(|j| PI * j as f64 / n as f64).collect();
    let mut masses = vec![0.0; n];
    for atom in lambda.atoms() {
        let w = k.phi(atom.point);
        let r = w.norm();
        if r <= 1.0 + 1e-12 {
            // already on K
            let (alpha, _) = k.closest_point(atom.point);
            let j = ((alpha / PI * n as f64) as usize).min(n - 1);
            masses[j] += atom.weight;
            continue;
        }
        let phi = w.arg();
        for j in 0..n {
            // α ∈ [a, b] ↔ β ∈ [π − b, π − a] and [−(π − a), −(π − b)]
            let (a, b) = (edges[j], edges[j + 1]);
            let upper = arc_harmonic_measure(r, phi, PI - b, PI - a);
            let lower = arc_harmonic_measure(r, phi, -(PI - a), -(PI - b));
            masses[j] += atom.weight * (upper + lower);
        }
    }
    let panels = (0..n)
        .map(|j| {
            let (a, b) = (edges[j], edges[j + 1]);
            Panel {
                left: k.point(a),
                right: k.point(b),
                mid: k.point(0.5 * (a + b)),
                mass: masses[j],
            }
        })
        .collect();
    DiscreteMeasure::from_panels(panels)
}
