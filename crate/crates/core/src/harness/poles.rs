use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_approximants, ApproximantEntry, HarnessConfig};
use crate::chebseries::FunctionSpec;
use crate::cpade::Scheme;
use crate::equilibrium::{balayage_with_panels, CompactDescriptor, DiscreteMeasure};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub n: usize,
    pub poles: Vec<Complex64>,
    /// Kolmogorov–Smirnov distance between `(1/n)·(poles near F)` and the
    /// balayage, along `F`.
    pub distance: f64,
    /// Share of the `n` poles within `near_distance` of `F`.
    pub near_fraction: f64,
    pub spurious_count: usize,
    /// Largest distance from a conjugated pole to the pole set.
    pub conjugation_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleDistributionReport {
    pub scheme: Scheme,
    pub theta: f64,
    pub n_list: Vec<usize>,
    pub balayage_reference: DiscreteMeasure,
    pub sets: Vec<PoleSet>,
    pub skipped: Vec<(usize, String)>,
    /// Rank correlation of distance against `n`.
    pub spearman: Option<f64>,
}

impl PoleDistributionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn at(&self, n: usize) -> Option<&PoleSet> {
        self.sets.iter().find(|s| s.n == n)
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `None` for fewer than two samples or a
/// constant sample.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// `sup |F_poles − F_ref|` with both distribution functions taken along the
/// parameter `α ∈ [0, π]` of `F`; the supremum does not depend on the
/// parametrization.
fn ks_distance(alphas: &[f64], n: usize, reference: &[f64]) -> f64 {
    let panels = reference.len();
    let mut cum = vec![0.0; panels + 1];
    for j in 0..panels {
        cum[j + 1] = cum[j] + reference[j];
    }
    let ref_cdf = |a: f64| {
        let t = (a / std::f64::consts::PI * panels as f64).clamp(0.0, panels as f64);
        let j = (t as usize).min(panels - 1);
        cum[j] + (t - j as f64) * reference[j]
    };
    let mut a = alphas.to_vec();
    a.sort_by(f64::total_cmp);
    let step = 1.0 / n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in a.iter().enumerate() {
        let r = ref_cdf(x);
        d = d
            .max((i as f64 * step - r).abs())
            .max(((i + 1) as f64 * step - r).abs());
    }
    // the empirical function is flat between poles; the reference is monotone
    // and piecewise linear, so its kinks are the remaining candidates
    let total = a.len() as f64 * step;
    for (j, &c) in cum.iter().enumerate() {
        let x = std::f64::consts::PI * j as f64 / panels as f64;
        let below = a.partition_point(|&p| p <= x) as f64 * step;
        d = d.max((below - c).abs());
    }
    d.max((total - 1.0).abs())
}

fn conjugation_defect(poles: &[Complex64]) -> f64 {
    poles
        .iter()
        .map(|p| {
            poles
                .iter()
                .map(|q| (q - p.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Pole distribution for approximants built from `spec`; see
/// [`pole_distribution_with`].
pub fn pole_distribution(
    spec: &FunctionSpec,
    scheme: Scheme,
    theta: f64,
    f: &CompactDescriptor,
    lambda: &DiscreteMeasure,
    n_list: &[usize],
    cfg: &HarnessConfig,
) -> Result<PoleDistributionReport> {
    let table = build_approximants(spec, scheme, n_list, cfg.precision_bits, &cfg.baker)?;
    pole_distribution_with(scheme, theta, f, lambda, &table, cfg)
}

/// Compares `(1/n)` times the pole counting measure with the balayage of
/// `λ` onto `F`. Poles farther than `near_distance` from `F` are counted as
/// spurious and left out of the distribution function.
pub fn pole_distribution_with(
    scheme: Scheme,
    theta: f64,
    f: &CompactDescriptor,
    lambda: &DiscreteMeasure,
    table: &[ApproximantEntry],
    cfg: &HarnessConfig,
) -> Result<PoleDistributionReport> {
    let reference = balayage_with_panels(lambda, f, cfg.balayage_panels)?;
    let masses = reference.masses();
    let mut sets = Vec::new();
    let mut skipped = Vec::new();
    for entry in table {
        let Some(r) = &entry.approximant else {
            skipped.push((entry.n, entry.skip_reason.clone().unwrap_or_default()));
            continue;
        };
        let poles = r.pole_list();
        let mut alphas = Vec::new();
        let mut spurious = 0;
        for &p in &poles {
            let (alpha, dist) = f.closest_point(p);
            if dist <= cfg.near_distance {
                alphas.push(alpha);
            } else {
                spurious += 1;
            }
        }
        sets.push(PoleSet {
            n: entry.n,
            distance: ks_distance(&alphas, entry.n, &masses),
            near_fraction: alphas.len() as f64 / entry.n as f64,
            spurious_count: spurious,
            conjugation_defect: conjugation_defect(&poles),
            poles,
        });
    }
    let ns: Vec<f64> = sets.iter().map(|s| s.n as f64).collect();
    let ds: Vec<f64> = sets.iter().map(|s| s.distance).collect();
    Ok(PoleDistributionReport {
        scheme,
        theta,
        n_list: table.iter().map(|e| e.n).collect(),
        balayage_reference: reference,
        spearman: spearman(&ns, &ds),
        sets,
        skipped,
    })
}
