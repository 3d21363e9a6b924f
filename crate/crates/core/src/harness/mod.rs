//! End-to-end checks of convergence rates and pole distributions.

mod poles;
mod rates;

pub use poles::{pole_distribution, pole_distribution_with, spearman, PoleDistributionReport, PoleSet};
pub use rates::{measure_rates, measure_rates_with, Exclusion, RateReport};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::chebseries::{cheb_coeffs, FunctionSpec};
use crate::cpade::{baker, frobenius, BakerOptions, BakerOutcome, RationalApproximant, Scheme};
use crate::equilibrium::{solve_equilibrium, CompactDescriptor, DiscreteMeasure};
use crate::error::{Error, Result};

/// Numerical settings shared by the rate and pole checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    pub precision_bits: u32,
    /// Radius of the pole neighborhoods dropped from the rate comparison.
    pub delta_cap: f64,
    /// Largest admissible share of dropped `(n, point)` pairs, in percent.
    pub filter_limit_pct: f64,
    pub rate_tolerance: f64,
    /// Poles farther than this from `F` count as spurious.
    pub near_distance: f64,
    pub test_radius: f64,
    pub test_count: usize,
    /// Test points closer than this to `E ∪ F` are discarded.
    pub test_clearance: f64,
    pub equilibrium_panels: usize,
    pub balayage_panels: usize,
    pub baker: BakerOptions,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            precision_bits: 512,
            delta_cap: 1e-2,
            filter_limit_pct: 20.0,
            rate_tolerance: 0.05,
            near_distance: 0.5,
            test_radius: 1.8,
            test_count: 16,
            test_clearance: 0.05,
            equilibrium_panels: 256,
            balayage_panels: crate::equilibrium::DEFAULT_BALAYAGE_PANELS,
            baker: BakerOptions::default(),
        }
    }
}

impl HarnessConfig {
    /// Equally spaced points on the circle `|z| = test_radius`, without
    /// those near `E` or `F`.
    pub fn test_points(&self, f: &CompactDescriptor) -> Vec<Complex64> {
        (0..self.test_count)
            .map(|k| Complex64::from_polar(self.test_radius, 2.0 * PI * k as f64 / self.test_count as f64))
            .filter(|&z| {
                crate::equilibrium::distance_to_e(z) >= self.test_clearance && f.distance(z) >= self.test_clearance
            })
            .collect()
    }
}

/// Approximant of type `(n−1, n)` or the reason it is missing.
#[derive(Clone, Debug)]
pub struct ApproximantEntry {
    pub n: usize,
    pub approximant: Option<RationalApproximant>,
    pub skip_reason: Option<String>,
}

/// Builds the approximants of type `(n−1, n)` for every `n` in `n_list`.
/// Missing nonlinear approximants and degenerate linear systems are recorded,
/// not raised.
pub fn build_approximants(
    spec: &FunctionSpec,
    scheme: Scheme,
    n_list: &[usize],
    precision_bits: u32,
    opts: &BakerOptions,
) -> Result<Vec<ApproximantEntry>> {
    if n_list.contains(&0) {
        return Err(Error::InvalidFunction("approximant index n must be positive".into()));
    }
    let n_max = n_list.iter().copied().max().unwrap_or(1);
    let series = cheb_coeffs(spec, 3 * n_max - 1, precision_bits)?;
    n_list
        .par_iter()
        .map(|&n| {
            let f = series.truncated(3 * n - 1);
            let built = match scheme {
                Scheme::Frobenius => frobenius(&f, n - 1, n).map(|r| Ok(r.approximant)),
                Scheme::Baker => baker(&f, n - 1, n, opts).map(|o| match o {
                    BakerOutcome::Found(r) => Ok(r),
                    BakerOutcome::Nonexistent(rep) => Err(format!(
                        "no nonlinear approximant of type ({}, {}) ({} seeds tried)",
                        rep.l,
                        rep.m,
                        rep.attempts.len()
                    )),
                }),
            };
            match built {
                Ok(Ok(r)) => Ok(ApproximantEntry {
                    n,
                    approximant: Some(r),
                    skip_reason: None,
                }),
                Ok(Err(reason)) => Ok(ApproximantEntry {
                    n,
                    approximant: None,
                    skip_reason: Some(reason),
                }),
                Err(Error::Degenerate(msg)) => Ok(ApproximantEntry {
                    n,
                    approximant: None,
                    skip_reason: Some(msg),
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Reports for one scheme of the Markov suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeReports {
    pub rates: RateReport,
    pub poles: PoleDistributionReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovSuite {
    pub c: f64,
    pub d: f64,
    /// Linear scheme, `θ = 3`.
    pub frobenius: SchemeReports,
    /// Nonlinear scheme, `θ = 1`.
    pub baker: SchemeReports,
    pub baker_nonexistent: Vec<usize>,
}

/// Default index list `10, 12, …, n_max` (from 2 if `n_max < 10`).
pub fn default_n_list(n_max: usize) -> Vec<usize> {
    let start = if n_max >= 10 { 10 } else { 2 };
    (start..=n_max).step_by(2).collect()
}

fn scheme_reports(
    spec: &FunctionSpec,
    scheme: Scheme,
    theta: f64,
    f: &CompactDescriptor,
    lambda: &DiscreteMeasure,
    n_list: &[usize],
    cfg: &HarnessConfig,
) -> Result<SchemeReports> {
    let table = build_approximants(spec, scheme, n_list, cfg.precision_bits, &cfg.baker)?;
    let points = cfg.test_points(f);
    let rates = measure_rates_with(spec, scheme, theta, f, lambda, &table, &points, cfg)?;
    let poles = pole_distribution_with(scheme, theta, f, lambda, &table, cfg)?;
    Ok(SchemeReports { rates, poles })
}

/// Markov function of the uniform measure on `[c, d]`: both schemes with
/// `F = [c, d]`, `θ = 3` for the linear and `θ = 1` for the nonlinear one.
pub fn markov_theorem_a_suite(c: f64, d: f64, n_list: &[usize], cfg: &HarnessConfig) -> Result<MarkovSuite> {
    let spec = FunctionSpec::markov(c, d);
    spec.validate()?;
    let f = CompactDescriptor::real_segment(c, d)?;
    let mut out = Vec::new();
    for (scheme, theta) in [(Scheme::Frobenius, 3.0), (Scheme::Baker, 1.0)] {
        let eq = solve_equilibrium(&f, theta, cfg.equilibrium_panels)?;
        out.push(scheme_reports(&spec, scheme, theta, &f, &eq.measure, n_list, cfg)?);
    }
    let baker = out.pop().expect("two schemes");
    let frobenius = out.pop().expect("two schemes");
    let baker_nonexistent = baker.rates.skipped.iter().map(|s| s.0).collect();
    Ok(MarkovSuite {
        c,
        d,
        frobenius,
        baker,
        baker_nonexistent,
    })
}
