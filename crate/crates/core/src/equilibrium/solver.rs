use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use super::clausen::{cl2, cl3};
use super::compact::CompactDescriptor;
use super::measure::{chebyshev_log_potential, clenshaw_f64, Atom, DiscreteMeasure, Panel};
use crate::error::{Error, Result};

/// Smallest accepted discretization.
pub const MIN_PANELS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Chebyshev density collocated at the Chebyshev–Gauss nodes.
    Spectral,
    /// Piecewise-constant density in the angle variable, Galerkin energy,
    /// active-set KKT.
    Panel,
}

/// The equilibrium measure `λ(θ)` on `[-1, 1]` relative to `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub theta: f64,
    pub compact: CompactDescriptor,
    pub w: f64,
    pub energy: f64,
    /// `max |θV + G − w|` over test points of the support.
    pub residual: f64,
    pub n_panels: usize,
    pub method: SolverMethod,
    pub measure: DiscreteMeasure,
}

impl EquilibriumResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `θ V^λ(z) + G^λ_K(z)`.
    pub fn mixed_potential(&self, z: Complex64) -> f64 {
        self.theta * self.measure.log_potential(z) + self.measure.green_potential(&self.compact, z)
    }
}

fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect()
}

fn regular_matrix(k: &CompactDescriptor, xs: &[f64], ts: &[f64]) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            ts.iter()
                .map(|&t| k.green_regular(Complex64::new(x, 0.0), Complex64::new(t, 0.0)))
                .collect()
        })
        .collect();
    DMatrix::from_fn(xs.len(), ts.len(), |i, j| rows[i][j])
}

/// Solves `θ V^λ + G^λ_K = w` on `[-1, 1]` for the unit measure `λ`.
///
/// The density is sought as `φ(x)/(π√(1−x²))` with `φ` a Chebyshev sum of
/// degree `n_panels − 1`, collocated at the Chebyshev–Gauss nodes. The log
/// part of the kernel is diagonal in this basis; the smooth part
/// `h_K = g_K + log|x − t|` is integrated by the same Gauss rule. If the
/// density comes out negative somewhere (support smaller than `E`), the
/// problem is re-solved on angle panels by an active-set method.
///
/// ```
/// use chebpade::equilibrium::{solve_equilibrium, CompactDescriptor};
///
/// let k = CompactDescriptor::real_segment(2.0, 3.0).unwrap();
/// let eq = solve_equilibrium(&k, 1.0, 64).unwrap();
/// assert!(eq.residual < 1e-10);
/// assert!((eq.energy - eq.w).abs() < 1e-10);
/// ```
pub fn solve_equilibrium(k: &CompactDescriptor, theta: f64, n_panels: usize) -> Result<EquilibriumResult> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidFunction(format!(
            "theta = {theta} must be finite and nonnegative"
        )));
    }
    if n_panels < MIN_PANELS {
        return Err(Error::Resolution(format!("{n_panels} panels (minimum {MIN_PANELS})")));
    }
    k.validate()?;
    let sol = spectral_core(k, theta, n_panels)?;
    let min_density = test_points(n_panels)
        .iter()
        .map(|&x| clenshaw_f64(&sol.phi, x))
        .fold(f64::INFINITY, f64::min);
    if min_density >= 0.0 {
        return sol.into_result(k, theta, n_panels);
    }
    solve_panels(k, theta, n_panels)
}

struct SpectralSolution {
    phi: Vec<f64>,
    w: f64,
    energy: f64,
    residual: f64,
}

impl SpectralSolution {
    fn into_result(self, k: &CompactDescriptor, theta: f64, n: usize) -> Result<EquilibriumResult> {
        let measure = DiscreteMeasure::from_chebyshev_density(self.phi, n)?;
        Ok(EquilibriumResult {
            theta,
            compact: *k,
            w: self.w,
            energy: self.energy,
            residual: self.residual,
            n_panels: n,
            method: SolverMethod::Spectral,
            measure,
        })
    }
}

fn test_points(n: usize) -> Vec<f64> {
    let m = 4 * n;
    (0..=m).map(|i| (PI * i as f64 / m as f64).cos()).collect()
}

/// Spectral collocation solve without the positivity fallback; fails if
/// the density produces negative panel masses.
pub fn solve_spectral(k: &CompactDescriptor, theta: f64, n: usize) -> Result<EquilibriumResult> {
    k.validate()?;
    spectral_core(k, theta, n)?.into_result(k, theta, n)
}

fn spectral_core(k: &CompactDescriptor, theta: f64, n: usize) -> Result<SpectralSolution> {
    let t = chebyshev_nodes(n);
    let h = regular_matrix(k, &t, &t);
    // tk[(i, k)] = T_k(t_i)
    let tk = DMatrix::from_fn(n, n, |i, kk| (kk as f64 * PI * (i as f64 + 0.5) / n as f64).cos());
    let h_tk = &h * &tk / n as f64;
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for i in 0..n {
        for kk in 1..n {
            a[(i, kk - 1)] = (theta + 1.0) * tk[(i, kk)] / kk as f64 + h_tk[(i, kk)];
        }
        a[(i, n - 1)] = -1.0;
        rhs[i] = -(theta + 1.0) * LN_2 - h_tk[(i, 0)];
    }
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Resolution("singular collocation system".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::Resolution("non-finite collocation solution".into()));
    }
    let mut phi = Vec::with_capacity(n);
    phi.push(1.0);
    phi.extend(sol.iter().take(n - 1));
    let w = sol[n - 1];

    let phi_nodes: Vec<f64> = t.iter().map(|&x| clenshaw_f64(&phi, x)).collect();
    let h_part: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)] * phi_nodes[j]).sum::<f64>() / n as f64)
        .collect();
    let quad: f64 = (0..n).map(|i| h_part[i] * phi_nodes[i]).sum::<f64>() / n as f64;
    let log_energy = LN_2
        + phi
            .iter()
            .enumerate()
            .skip(1)
            .map(|(kk, p)| p * p / (2.0 * kk as f64))
            .sum::<f64>();
    let energy = (theta + 1.0) * log_energy + quad;

    let xs = test_points(n);
    let hx = regular_matrix(k, &xs, &t);
    let residual = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let v = chebyshev_log_potential(&phi, Complex64::new(x, 0.0));
            let hp: f64 = (0..n).map(|j| hx[(i, j)] * phi_nodes[j]).sum::<f64>() / n as f64;
            ((theta + 1.0) * v + hp - w).abs()
        })
        .fold(0.0, f64::max);

    Ok(SpectralSolution {
        phi,
        w,
        energy,
        residual,
    })
}

/// Angle panels `[jπ/n, (j+1)π/n]` and their Galerkin energy matrix.
pub struct PanelSystem {
    pub edges: Vec<f64>,
    /// `A_ij = ∫∫ (θ log(1/|x−t|) + g_K(x,t)) dμ_i dμ_j` for unit masses
    /// spread uniformly in angle over panels `i`, `j`.
    pub matrix: DMatrix<f64>,
    theta: f64,
    gauss: Vec<(f64, f64)>,
}

/// `∫_a^b ∫_c^d log(1/|cos s − cos t|) dt ds`.
fn log_panel_pair(a: f64, b: f64, c: f64, d: f64) -> f64 {
    LN_2 * (b - a) * (d - c) + cl3(a - c) - cl3(b - c) - cl3(a - d) + cl3(b - d) + cl3(a + d) - cl3(b + d) - cl3(a + c)
        + cl3(b + c)
}

/// `∫_c^d log(1/|cos s − cos t|) dt`.
fn log_panel_point(s: f64, c: f64, d: f64) -> f64 {
    LN_2 * (d - c) + cl2(d + s) + cl2(d - s) - cl2(c + s) - cl2(c - s)
}

impl PanelSystem {
    pub fn new(k: &CompactDescriptor, theta: f64, n: usize) -> Self {
        let edges: Vec<f64> = (0..=n).map(|j| PI * j as f64 / n as f64).collect();
        let gauss: Vec<(f64, f64)> = GaussLegendre::new(4.try_into().expect("nonzero"))
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect();
        // Gauss points in angle and their x = cos(angle)
        let pts: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|i| {
                let (a, b) = (edges[i], edges[i + 1]);
                gauss
                    .iter()
                    .map(|&(x, w)| ((0.5 * (a + b) + 0.5 * (b - a) * x).cos(), 0.5 * w))
                    .collect()
            })
            .collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (a, b, c, d) = (edges[i], edges[i + 1], edges[j], edges[j + 1]);
                        let log = log_panel_pair(a, b, c, d) / ((b - a) * (d - c));
                        let mut hsum = 0.0;
                        for &(x, wx) in &pts[i] {
                            for &(t, wt) in &pts[j] {
                                hsum += wx * wt * k.green_regular(Complex64::new(x, 0.0), Complex64::new(t, 0.0));
                            }
                        }
                        (theta + 1.0) * log + hsum
                    })
                    .collect()
            })
            .collect();
        let matrix = DMatrix::from_fn(n, n, |i, j| 0.5 * (rows[i][j] + rows[j][i]));
        Self {
            edges,
            matrix,
            theta,
            gauss,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `θ V + G` at `x = cos s` for panel masses `m`.
    pub fn potential_at(&self, k: &CompactDescriptor, m: &[f64], s: f64) -> f64 {
        let x = s.cos();
        let mut v = 0.0;
        for (j, &mj) in m.iter().enumerate() {
            if mj == 0.0 {
                continue;
            }
            let (c, d) = (self.edges[j], self.edges[j + 1]);
            let log = log_panel_point(s, c, d) / (d - c);
            let mut hsum = 0.0;
            for &(g, w) in &self.gauss {
                let t = (0.5 * (c + d) + 0.5 * (d - c) * g).cos();
                hsum += 0.5 * w * k.green_regular(Complex64::new(x, 0.0), Complex64::new(t, 0.0));
            }
            v += mj * ((self.theta + 1.0) * log + hsum);
        }
        v
    }

    /// Panel measure with the given masses.
    pub fn measure(&self, m: &[f64]) -> Result<DiscreteMeasure> {
        let panels = m
            .iter()
            .enumerate()
            .map(|(j, &mass)| {
                let (a, b) = (self.edges[j], self.edges[j + 1]);
                Panel {
                    left: Complex64::new(a.cos(), 0.0),
                    right: Complex64::new(b.cos(), 0.0),
                    mid: Complex64::new((0.5 * (a + b)).cos(), 0.0),
                    mass,
                }
            })
            .collect();
        let atoms = m
            .iter()
            .enumerate()
            .flat_map(|(j, &mass)| {
                let (a, b) = (self.edges[j], self.edges[j + 1]);
                self.gauss.iter().map(move |&(g, w)| Atom {
                    point: Complex64::new((0.5 * (a + b) + 0.5 * (b - a) * g).cos(), 0.0),
                    weight: mass * 0.5 * w,
                })
            })
            .filter(|a| a.weight != 0.0)
            .collect();
        Ok(DiscreteMeasure::from_panels(panels)?.with_atoms(atoms))
    }
}

/// Minimizes `mᵀAm` over the simplex by an active-set KKT iteration.
/// Returns masses and the multiplier `w`.
pub fn active_set_minimize(a: &DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    let n = a.nrows();
    let mut active: Vec<bool> = vec![true; n];
    for _ in 0..4 * n {
        let idx: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let s = idx.len();
        let mut kkt = DMatrix::zeros(s + 1, s + 1);
        let mut rhs = DVector::zeros(s + 1);
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                kkt[(p, q)] = a[(i, j)];
            }
            kkt[(p, s)] = -1.0;
            kkt[(s, p)] = 1.0;
        }
        rhs[s] = 1.0;
        let sol = kkt
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Resolution("singular KKT system; the discretized kernel is indefinite".into()))?;
        let w = sol[s];
        let mut m = vec![0.0; n];
        for (p, &i) in idx.iter().enumerate() {
            m[i] = sol[p];
        }
        if let Some((worst, _)) = idx
            .iter()
            .map(|&i| (i, m[i]))
            .filter(|&(_, v)| v < 0.0)
            .min_by(|x, y| x.1.total_cmp(&y.1))
        {
            active[worst] = false;
            continue;
        }
        // dual feasibility on the inactive panels: (A m)_i ≥ w
        let am = a * DVector::from_vec(m.clone());
        let viol = (0..n)
            .filter(|&i| !active[i] && am[i] < w - 1e-12 * w.abs().max(1.0))
            .min_by(|&x, &y| am[x].total_cmp(&am[y]));
        match viol {
            Some(i) => active[i] = true,
            None => return Ok((m, w)),
        }
    }
    Err(Error::Resolution("active-set iteration did not settle".into()))
}

/// Panel Galerkin solve with an active set (positivity enforced).
pub fn solve_panels(k: &CompactDescriptor, theta: f64, n: usize) -> Result<EquilibriumResult> {
    let sys = PanelSystem::new(k, theta, n);
    let (m, w) = active_set_minimize(&sys.matrix)?;
    let mv = DVector::from_vec(m.clone());
    let energy = mv.dot(&(&sys.matrix * &mv));
    let mut residual: f64 = 0.0;
    for j in 0..n {
        if m[j] <= 0.0 {
            continue;
        }
        let (a, b) = (sys.edges[j], sys.edges[j + 1]);
        for frac in [0.25, 0.75] {
            let s = a + frac * (b - a);
            residual = residual.max((sys.potential_at(k, &m, s) - w).abs());
        }
    }
    if energy <= 0.0 && theta > 0.0 {
        return Err(Error::Resolution(format!("nonpositive discrete energy {energy}")));
    }
    Ok(EquilibriumResult {
        theta,
        compact: *k,
        w,
        energy,
        residual,
        n_panels: n,
        method: SolverMethod::Panel,
        measure: sys.measure(&m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg() -> CompactDescriptor {
        CompactDescriptor::real_segment(2.0, 3.0).unwrap()
    }

    #[test]
    fn contract_on_segment() {
        for theta in [0.0, 1.0, 3.0] {
            let eq = solve_equilibrium(&seg(), theta, 128).unwrap();
            assert_eq!(eq.method, SolverMethod::Spectral);
            assert!(eq.residual < 1e-10, "theta {theta}: {}", eq.residual);
            assert!((eq.energy - eq.w).abs() < 1e-10);
            assert!((eq.measure.total_mass() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_potential_is_constant_on_e() {
        let eq = solve_equilibrium(&seg(), 3.0, 64).unwrap();
        for x in [-1.0, -0.61, 0.0, 0.333, 0.99] {
            assert!((eq.mixed_potential(Complex64::new(x, 0.0)) - eq.w).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_arc_gives_symmetric_measure() {
        let k = CompactDescriptor::circline_arc(Complex64::new(0.0, 1.0), 0.0).unwrap();
        let eq = solve_equilibrium(&k, 1.0, 64).unwrap();
        let m = eq.measure.masses();
        for j in 0..m.len() {
            assert!((m[j] - m[m.len() - 1 - j]).abs() < 1e-12);
        }
    }

    #[test]
    fn panel_solver_agrees_with_spectral() {
        let sp = solve_spectral(&seg(), 1.0, 128).unwrap();
        let pn = solve_panels(&seg(), 1.0, 256).unwrap();
        assert!((sp.w - pn.w).abs() < 1e-5, "{} {}", sp.w, pn.w);
    }

    #[test]
    fn too_few_panels_is_rejected() {
        assert!(matches!(solve_equilibrium(&seg(), 1.0, 8), Err(Error::Resolution(_))));
    }

    #[test]
    fn log_pair_matches_quadrature() {
        // smooth case: separate panels
        let (a, b, c, d) = (0.2, 0.5, 1.4, 1.9);
        let n = 400;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let u = a + (b - a) * (i as f64 + 0.5) / n as f64;
                let v = c + (d - c) * (j as f64 + 0.5) / n as f64;
                s -= (u.cos() - v.cos()).abs().ln();
            }
        }
        s *= (b - a) * (d - c) / (n * n) as f64;
        assert!((log_panel_pair(a, b, c, d) - s).abs() < 1e-6);
    }
}
