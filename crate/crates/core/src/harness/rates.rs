use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{build_approximants, ApproximantEntry, HarnessConfig};
use crate::chebseries::FunctionSpec;
use crate::cpade::Scheme;
use crate::equilibrium::{CompactDescriptor, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::mp;

/// A `(n, point)` pair left out of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub n: usize,
    pub point_index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub scheme: Scheme,
    pub theta: f64,
    pub n_list: Vec<usize>,
    pub test_points: Vec<Complex64>,
    /// `observed[i][j] = |f − f_n|^{1/2n}` for `n = n_list[i]` at point `j`;
    /// `None` where the approximant is missing.
    pub observed: Vec<Vec<Option<f64>>>,
    /// `exp(−G^λ_F(z))` per point.
    pub predicted: Vec<f64>,
    pub excluded: Vec<Exclusion>,
    /// Indices without an approximant, with the reason.
    pub skipped: Vec<(usize, String)>,
    /// Some approximant reproduced `f` to working precision.
    pub exact_regime: bool,
    /// Per point: `(n, observed/predicted − 1)` at the largest usable `n`.
    pub summary: Vec<Option<(usize, f64)>>,
}

impl RateReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Number of `(n, point)` pairs with an approximant.
    pub fn total_pairs(&self) -> usize {
        self.observed.iter().flatten().filter(|v| v.is_some()).count()
    }

    pub fn excluded_pct(&self) -> f64 {
        let total = self.total_pairs();
        if total == 0 {
            0.0
        } else {
            100.0 * self.excluded.len() as f64 / total as f64
        }
    }

    /// Fails when more than `limit_pct` percent of the pairs were dropped.
    pub fn check_filter(&self, limit_pct: f64) -> Result<()> {
        if self.excluded_pct() > limit_pct {
            return Err(Error::FilterOverflow {
                excluded: self.excluded.len(),
                total: self.total_pairs(),
                limit_pct,
            });
        }
        Ok(())
    }

    pub fn max_deviation(&self) -> Option<f64> {
        self.summary.iter().flatten().map(|&(_, d)| d.abs()).reduce(f64::max)
    }

    /// Deviations `observed/predicted − 1` at a fixed `n` (unfiltered points).
    pub fn deviations_at(&self, n: usize) -> Option<Vec<f64>> {
        let i = self.n_list.iter().position(|&m| m == n)?;
        let row = &self.observed[i];
        row.iter().flatten().next()?;
        Some(
            row.iter()
                .enumerate()
                .filter(|&(j, _)| !self.is_excluded(n, j))
                .filter_map(|(j, v)| v.map(|v| v / self.predicted[j] - 1.0))
                .collect(),
        )
    }

    pub fn is_excluded(&self, n: usize, j: usize) -> bool {
        self.excluded.iter().any(|e| e.n == n && e.point_index == j)
    }

    /// `n,point_index,observed,predicted,excluded_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,point_index,observed,predicted,excluded_flag\n");
        for (i, &n) in self.n_list.iter().enumerate() {
            for (j, v) in self.observed[i].iter().enumerate() {
                let Some(v) = v else { continue };
                let _ = writeln!(
                    out,
                    "{n},{j},{v:e},{:e},{}",
                    self.predicted[j],
                    u8::from(self.is_excluded(n, j))
                );
            }
        }
        out
    }
}

enum Observation {
    Value(f64),
    Exact,
    Overflow,
}

fn observe(fz: &Complex, fnz: &Complex, n: usize, prec: u32) -> Observation {
    let diff = Complex::with_val(prec, fz - fnz);
    let abs = Complex::with_val(prec, diff.abs_ref()).into_real_imag().0;
    if !abs.is_finite() {
        return Observation::Overflow;
    }
    let scale = Complex::with_val(prec, fz.abs_ref())
        .into_real_imag()
        .0
        .max(&Float::with_val(prec, 1));
    let exact = mp::pow2(prec, -(prec as i32) * 3 / 4) * scale;
    if abs <= exact {
        return Observation::Exact;
    }
    let log = abs.ln() / (2 * n) as u32;
    Observation::Value(log.exp().to_f64())
}

/// Rates for approximants built from `spec`; see [`measure_rates_with`].
#[allow(clippy::too_many_arguments)]
pub fn measure_rates(
    spec: &FunctionSpec,
    scheme: Scheme,
    theta: f64,
    f: &CompactDescriptor,
    lambda: &DiscreteMeasure,
    n_list: &[usize],
    test_points: &[Complex64],
    cfg: &HarnessConfig,
) -> Result<RateReport> {
    let table = build_approximants(spec, scheme, n_list, cfg.precision_bits, &cfg.baker)?;
    measure_rates_with(spec, scheme, theta, f, lambda, &table, test_points, cfg)
}

/// Compares `|f − f_n|^{1/2n}` with `exp(−G^λ_F)` at the test points.
///
/// `f` is continued with its cut along `F`. Pairs `(n, z)` with a pole of
/// `f_n` within `delta_cap` of `z` are excluded, which stands in for
/// convergence in capacity.
#[allow(clippy::too_many_arguments)]
pub fn measure_rates_with(
    spec: &FunctionSpec,
    scheme: Scheme,
    theta: f64,
    f: &CompactDescriptor,
    lambda: &DiscreteMeasure,
    table: &[ApproximantEntry],
    test_points: &[Complex64],
    cfg: &HarnessConfig,
) -> Result<RateReport> {
    let prec = cfg.precision_bits;
    let cut = (!spec.branch_points().is_empty()).then_some(f);
    let values = test_points
        .iter()
        .map(|&z| spec.eval_continuation(&mp::complex(prec, z), cut))
        .collect::<Result<Vec<_>>>()?;
    let predicted: Vec<f64> = test_points
        .iter()
        .map(|&z| (-lambda.green_potential(f, z)).exp())
        .collect();
    let mut observed = Vec::with_capacity(table.len());
    let mut excluded = Vec::new();
    let mut skipped = Vec::new();
    let mut exact_points = vec![false; test_points.len()];
    for entry in table {
        let Some(r) = &entry.approximant else {
            skipped.push((entry.n, entry.skip_reason.clone().unwrap_or_default()));
            observed.push(vec![None; test_points.len()]);
            continue;
        };
        let poles = r.pole_list();
        let mut row = Vec::with_capacity(test_points.len());
        for (j, &z) in test_points.iter().enumerate() {
            let near = poles.iter().any(|p| (p - z).norm() < cfg.delta_cap);
            let fnz = r.eval(&mp::complex(prec, z));
            let reason = match observe(&values[j], &fnz, entry.n, prec) {
                Observation::Value(v) => {
                    row.push(Some(v));
                    near.then(|| "near_pole".to_string())
                }
                Observation::Exact => {
                    exact_points[j] = true;
                    row.push(Some(0.0));
                    None
                }
                Observation::Overflow => {
                    row.push(Some(f64::INFINITY));
                    Some("overflow".to_string())
                }
            };
            if let Some(reason) = reason {
                excluded.push(Exclusion {
                    n: entry.n,
                    point_index: j,
                    reason,
                });
            }
        }
        observed.push(row);
    }
    let n_list: Vec<usize> = table.iter().map(|e| e.n).collect();
    let summary = (0..test_points.len())
        .map(|j| {
            if exact_points[j] {
                return None;
            }
            (0..n_list.len()).rev().find_map(|i| {
                let v = observed[i][j]?;
                let dropped = excluded.iter().any(|e| e.n == n_list[i] && e.point_index == j);
                (!dropped).then(|| (n_list[i], v / predicted[j] - 1.0))
            })
        })
        .collect();
    Ok(RateReport {
        scheme,
        theta,
        n_list,
        test_points: test_points.to_vec(),
        observed,
        predicted,
        excluded,
        skipped,
        exact_regime: exact_points.iter().any(|&e| e),
        summary,
    })
}
