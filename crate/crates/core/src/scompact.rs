//! Stationary compacts: maximization of the equilibrium constant `w_K(θ)`
//! over circline arcs through a conjugate pair of branch points.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use crate::chebseries::FunctionSpec;
use crate::equilibrium::{
    inverse_joukowski, s_property_residual, solve_equilibrium, CompactDescriptor, EquilibriumResult, DEFAULT_S_STEP,
};
use crate::error::{Error, Result};

/// Parameters of the arc search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub grid_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tolerance: f64,
    /// Discretization passed to the equilibrium solver.
    pub panels: usize,
    /// Minimal distance between an admissible arc and `[-1, 1]`.
    pub margin: f64,
    pub s_threshold: f64,
    pub s_step: f64,
    /// Offset of the neighbors whose S-residual is compared with the optimum.
    pub neighbor_offset: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_points: 33,
            tolerance: 1e-6,
            panels: 128,
            margin: 1e-3,
            s_threshold: 1e-3,
            s_step: DEFAULT_S_STEP,
            neighbor_offset: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub u: f64,
    pub w: f64,
    pub residual: f64,
    pub s_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryCompactReport {
    pub theta: f64,
    pub optimal_param: f64,
    #[serde(rename = "F")]
    pub f: CompactDescriptor,
    pub w_max: f64,
    pub equilibrium: EquilibriumResult,
    pub s_residual: f64,
    /// `(u, S-residual)` at `u* ± neighbor_offset`, when admissible.
    pub s_neighbors: Vec<(f64, f64)>,
    pub s_threshold: f64,
    pub s_property_ok: bool,
    pub scan: Vec<ScanSample>,
    pub u_range: (f64, f64),
    /// Single interior local maximum on the grid.
    pub unimodal: bool,
    /// No jump on the grid exceeds ten times the neighboring differences.
    pub scan_continuous: bool,
    pub rho_f: f64,
    pub rho_check: bool,
    pub fixed_by_construction: bool,
    pub notes: Vec<String>,
}

impl StationaryCompactReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `u,w,residual,s_residual` table of the scan.
    pub fn scan_csv(&self) -> String {
        let mut out = String::from("u,w,residual,s_residual\n");
        for s in &self.scan {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", s.u, s.w, s.residual, s.s_residual);
        }
        out
    }
}

/// Index `ρ(f)` of the largest Bernstein ellipse into which `f` continues:
/// the smallest `|b + √(b²−1)|` (exterior branch) over the branch points.
/// Infinite when `f` has none.
pub fn rho_index(spec: &FunctionSpec) -> f64 {
    spec.branch_points()
        .into_iter()
        .map(|b| inverse_joukowski(b).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `ρ(f) > √2`.
pub fn check_theorem2_hypothesis(spec: &FunctionSpec) -> bool {
    rho_index(spec) > SQRT_2
}

fn arc_clearance(b: Complex64, u: f64) -> f64 {
    match CompactDescriptor::circline_arc(b, u) {
        Ok(k) => k.distance_to_e(),
        Err(_) => 0.0,
    }
}

/// Largest `|u|` on the side `sign` with clearance at least `margin`.
fn admissible_end(b: Complex64, sign: f64, margin: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    if arc_clearance(b, sign * hi) >= margin {
        return sign * hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if arc_clearance(b, sign * mid) >= margin {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sign * lo
}

/// Admissible range of the arc parameter for branch points `b, b̄`.
pub fn admissible_range(b: Complex64, margin: f64) -> Result<(f64, f64)> {
    if arc_clearance(b, 0.0) < margin {
        return Err(Error::InvalidCompact(format!(
            "no circline arc through {b} clears [-1, 1] by {margin:e}"
        )));
    }
    Ok((admissible_end(b, -1.0, margin), admissible_end(b, 1.0, margin)))
}

/// Equilibrium of the arc `(b, u)` together with its S-residual.
pub fn evaluate_arc(b: Complex64, u: f64, theta: f64, cfg: &SearchConfig) -> Result<(EquilibriumResult, f64)> {
    let k = CompactDescriptor::circline_arc(b, u)?;
    let eq = solve_equilibrium(&k, theta, cfg.panels)?;
    let s = s_property_residual(&k, &eq.measure, cfg.s_step);
    Ok((eq, s))
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

fn is_continuous(w: &[f64]) -> bool {
    let d: Vec<f64> = w.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    (0..d.len()).all(|i| {
        let left = if i > 0 { d[i - 1] } else { 0.0 };
        let right = d.get(i + 1).copied().unwrap_or(0.0);
        let reference = left.max(right);
        reference == 0.0 || d[i] <= 10.0 * reference + 1e-12
    })
}

/// Maximizes `u ↦ w_K(θ)` over the arcs through `b, b̄`.
///
/// Markov functions bypass the search: the compact is the segment carrying
/// the measure. Three-point families are rejected.
pub fn find_stationary_compact(spec: &FunctionSpec, theta: f64, cfg: &SearchConfig) -> Result<StationaryCompactReport> {
    spec.validate()?;
    let rho_f = rho_index(spec);
    let rho_check = rho_f > SQRT_2;
    let mut notes = Vec::new();
    if !rho_check {
        notes.push(format!(
            "rho(f) = {rho_f} <= sqrt 2: outside the hypothesis of the convergence theorem"
        ));
    }
    let b = match *spec {
        FunctionSpec::SqrtConjPair { b } => b,
        FunctionSpec::MarkovUniform { c, d } => {
            let k = CompactDescriptor::real_segment(c, d)?;
            let eq = solve_equilibrium(&k, theta, cfg.panels)?;
            let s = s_property_residual(&k, &eq.measure, cfg.s_step);
            notes.push("fixed by construction".into());
            return Ok(StationaryCompactReport {
                theta,
                optimal_param: f64::NAN,
                f: k,
                w_max: eq.w,
                s_residual: s,
                s_neighbors: vec![],
                s_threshold: cfg.s_threshold,
                s_property_ok: s <= cfg.s_threshold,
                equilibrium: eq,
                scan: vec![],
                u_range: (f64::NAN, f64::NAN),
                unimodal: true,
                scan_continuous: true,
                rho_f,
                rho_check,
                fixed_by_construction: true,
                notes,
            });
        }
        FunctionSpec::CbrtTriple { .. } => {
            return Err(Error::UnsupportedFamily(
                "three branch points need tree-shaped compacts; the search covers conjugate pairs only".into(),
            ))
        }
        _ => {
            return Err(Error::UnsupportedFamily(
                "the compact search needs a conjugate pair of square-root branch points".into(),
            ))
        }
    };
    if cfg.grid_points < 3 {
        return Err(Error::InvalidFunction("search grid needs at least 3 points".into()));
    }
    let (lo, hi) = admissible_range(b, cfg.margin)?;
    let n = cfg.grid_points;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let scan = grid
        .par_iter()
        .map(|&u| {
            evaluate_arc(b, u, theta, cfg).map(|(eq, s)| ScanSample {
                u,
                w: eq.w,
                residual: eq.residual,
                s_residual: s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ws: Vec<f64> = scan.iter().map(|s| s.w).collect();
    let imax = (0..n).fold(0, |best, i| if ws[i] > ws[best] { i } else { best });
    if imax == 0 || imax == n - 1 {
        return Err(Error::FamilyInsufficiency { u: grid[imax] });
    }
    let local_maxima = (1..n - 1).filter(|&i| ws[i] >= ws[i - 1] && ws[i] >= ws[i + 1]).count();
    let unimodal = local_maxima == 1;
    if !unimodal {
        notes.push(format!(
            "{local_maxima} local maxima on the grid; refined around the largest"
        ));
    }
    let w_of = |u: f64| -> Result<f64> {
        let k = CompactDescriptor::circline_arc(b, u)?;
        Ok(solve_equilibrium(&k, theta, cfg.panels)?.w)
    };
    let u_star = golden_max(grid[imax - 1], grid[imax + 1], w_of, cfg.tolerance)?;
    let (eq, s_residual) = evaluate_arc(b, u_star, theta, cfg)?;
    let s_neighbors = [u_star - cfg.neighbor_offset, u_star + cfg.neighbor_offset]
        .into_iter()
        .filter(|&u| u >= lo && u <= hi)
        .map(|u| evaluate_arc(b, u, theta, cfg).map(|(_, s)| (u, s)))
        .collect::<Result<Vec<_>>>()?;
    if s_neighbors.iter().any(|&(_, s)| s <= s_residual) {
        notes.push("S-residual at the optimum is not below its neighbors".into());
    }
    let s_property_ok = s_residual <= cfg.s_threshold;
    if !s_property_ok {
        notes.push(format!(
            "S-residual {s_residual:e} above threshold {:e}: the stationary compact may lie outside the arc family",
            cfg.s_threshold
        ));
    }
    Ok(StationaryCompactReport {
        theta,
        optimal_param: u_star,
        f: eq.compact,
        w_max: eq.w,
        equilibrium: eq,
        s_residual,
        s_neighbors,
        s_threshold: cfg.s_threshold,
        s_property_ok,
        scan_continuous: is_continuous(&ws),
        scan,
        u_range: (lo, hi),
        unimodal,
        rho_f,
        rho_check,
        fixed_by_construction: false,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_of_imaginary_unit() {
        let r = rho_index(&FunctionSpec::sqrt_pair(Complex64::new(0.0, 1.0)));
        assert!((r - (1.0 + SQRT_2)).abs() < 1e-14);
    }

    #[test]
    fn rho_of_real_point() {
        let r = rho_index(&FunctionSpec::markov(2.0, 3.0));
        assert!((r - (2.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!(check_theorem2_hypothesis(&FunctionSpec::markov(2.0, 3.0)));
    }

    #[test]
    fn close_branch_point_fails_hypothesis() {
        let spec = FunctionSpec::sqrt_pair(Complex64::new(0.0, 0.05));
        assert!(rho_index(&spec) < 1.2);
        assert!(!check_theorem2_hypothesis(&spec));
    }

    #[test]
    fn admissible_range_clears_e() {
        let b = Complex64::new(0.3, 1.0);
        let (lo, hi) = admissible_range(b, 1e-3).unwrap();
        assert!(lo < -0.9 && hi > 0.9);
        assert!(arc_clearance(b, lo) >= 1e-3 && arc_clearance(b, hi) >= 1e-3);
        assert!(arc_clearance(b, hi + 1e-4) < 1e-3 || hi > 1.0 - 1e-9);
    }

    #[test]
    fn cube_roots_are_unsupported() {
        let spec = FunctionSpec::CbrtTriple {
            b: Complex64::new(0.2, 1.0),
            a: 2.0,
        };
        assert!(matches!(
            find_stationary_compact(&spec, 3.0, &SearchConfig::default()),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn markov_is_fixed() {
        let r = find_stationary_compact(&FunctionSpec::markov(2.0, 3.0), 3.0, &SearchConfig::default()).unwrap();
        assert!(r.fixed_by_construction && r.scan.is_empty());
        assert!(r.s_property_ok);
    }

    #[test]
    fn continuity_detector() {
        assert!(is_continuous(&[0.0, 1.0, 2.0, 2.5, 2.6]));
        assert!(!is_continuous(&[0.0, 0.01, 0.02, 5.0, 5.01, 5.02]));
    }
}
