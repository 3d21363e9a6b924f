use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;
use std::sync::OnceLock;

use super::compact::{inverse_joukowski, CompactDescriptor};
use crate::error::{Error, Result};

/// A piece of the carrier with the mass it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub left: Complex64,
    pub right: Complex64,
    pub mid: Complex64,
    pub mass: f64,
}

/// A weighted point of a quadrature rule for `∫ · dμ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Complex64,
    pub weight: f64,
}

/// A unit positive measure given by panel masses.
///
/// Two optional refinements make integrals of smooth functions exact to
/// spectral accuracy: a quadrature rule (`atoms`) and, for measures on
/// `[-1, 1]`, the Chebyshev coefficients `φ_k` of the density
/// `dμ = φ(x) dx / (π √(1 − x²))` with `φ_0 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    panels: Vec<Panel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<Vec<f64>>,
}

/// Tolerance on the total mass before renormalization.
pub const MASS_TOLERANCE: f64 = 1e-9;

fn gauss8() -> &'static [(f64, f64)] {
    static G: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    G.get_or_init(|| {
        GaussLegendre::new(8.try_into().expect("nonzero degree"))
            .iter()
            .map(|(x, w)| (*x, *w))
            .collect()
    })
}

/// `∫_0^1 log|u − s| ds`.
fn unit_log_integral(u: Complex64) -> f64 {
    let xlogx = |v: Complex64| {
        if v.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            v * v.ln()
        }
    };
    (xlogx(u) - xlogx(u - 1.0)).re - 1.0
}

/// Average of `log(1/|z − t|)` over the straight segment `[a, b]`.
pub fn panel_log_average(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    if d.norm() == 0.0 {
        return -(z - a).norm().ln();
    }
    -(d.norm().ln() + unit_log_integral((z - a) / d))
}

/// Chebyshev sum `Σ c_k T_k(x)` in double precision.
pub fn clenshaw_f64(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

impl DiscreteMeasure {
    /// Builds a measure from panels; masses must be nonnegative (up to
    /// `1e-14`) and sum to one within [`MASS_TOLERANCE`]; they are then
    /// renormalized.
    pub fn from_panels(mut panels: Vec<Panel>) -> Result<Self> {
        if panels.is_empty() {
            return Err(Error::Degenerate("measure without panels".into()));
        }
        for p in &mut panels {
            if !p.mass.is_finite() || p.mass < -1e-14 {
                return Err(Error::Degenerate(format!("negative panel mass {}", p.mass)));
            }
            p.mass = p.mass.max(0.0);
        }
        let total: f64 = panels.iter().map(|p| p.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Degenerate(format!("total mass {total} is not 1")));
        }
        for p in &mut panels {
            p.mass /= total;
        }
        Ok(Self {
            panels,
            atoms: Vec::new(),
            density: None,
        })
    }

    /// Replaces the default panel quadrature with the given rule.
    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> Self {
        self.atoms = atoms;
        self
    }

    /// Attaches the Chebyshev density of a measure on `[-1, 1]`.
    pub fn with_density(mut self, phi: Vec<f64>) -> Self {
        self.density = Some(phi);
        self
    }

    pub fn point_mass(z: Complex64) -> Self {
        Self {
            panels: vec![Panel {
                left: z,
                right: z,
                mid: z,
                mass: 1.0,
            }],
            atoms: vec![Atom { point: z, weight: 1.0 }],
            density: None,
        }
    }

    /// Measure `φ(x) dx/(π√(1−x²))` on `n` panels with Chebyshev-distributed
    /// edges `cos(jπ/n)`; panel masses are exact, the atoms are the
    /// `n`-point Chebyshev–Gauss rule.
    pub fn from_chebyshev_density(phi: Vec<f64>, n: usize) -> Result<Self> {
        if phi.first().copied() != Some(1.0) {
            return Err(Error::Degenerate("density must have φ_0 = 1".into()));
        }
        let panels = (0..n)
            .map(|j| {
                let (ta, tb) = (PI * j as f64 / n as f64, PI * (j + 1) as f64 / n as f64);
                let mut m = tb - ta;
                for (k, pk) in phi.iter().enumerate().skip(1) {
                    let kf = k as f64;
                    m += pk * ((kf * tb).sin() - (kf * ta).sin()) / kf;
                }
                Panel {
                    left: Complex64::new(ta.cos(), 0.0),
                    right: Complex64::new(tb.cos(), 0.0),
                    mid: Complex64::new((0.5 * (ta + tb)).cos(), 0.0),
                    mass: m / PI,
                }
            })
            .collect();
        let atoms = (0..n)
            .map(|j| {
                let x = (PI * (j as f64 + 0.5) / n as f64).cos();
                Atom {
                    point: Complex64::new(x, 0.0),
                    weight: clenshaw_f64(&phi, x) / n as f64,
                }
            })
            .collect();
        Ok(Self::from_panels(panels)?.with_atoms(atoms).with_density(phi))
    }

    /// The arcsine (equilibrium) measure of `[-1, 1]`.
    pub fn arcsine(n: usize) -> Self {
        Self::from_chebyshev_density(vec![1.0], n).expect("valid density")
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn masses(&self) -> Vec<f64> {
        self.panels.iter().map(|p| p.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.panels.iter().map(|p| p.mass).sum()
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    /// Quadrature rule for smooth integrands: the attached atoms, or an
    /// 8-point Gauss rule on each (straight) panel with constant density.
    pub fn atoms(&self) -> Vec<Atom> {
        if !self.atoms.is_empty() {
            return self.atoms.clone();
        }
        let mut out = Vec::with_capacity(8 * self.panels.len());
        for p in &self.panels {
            if p.mass == 0.0 {
                continue;
            }
            if p.left == p.right || !p.left.re.is_finite() || !p.right.re.is_finite() {
                out.push(Atom {
                    point: p.mid,
                    weight: p.mass,
                });
                continue;
            }
            for &(x, w) in gauss8() {
                out.push(Atom {
                    point: p.left + (p.right - p.left) * (0.5 * (1.0 + x)),
                    weight: p.mass * 0.5 * w,
                });
            }
        }
        out
    }

    /// `∫ f dμ` by the quadrature rule of [`Self::atoms`].
    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.atoms().iter().map(|a| a.weight * f(a.point)).sum()
    }

    /// Logarithmic potential `V(z) = ∫ log(1/|z − t|) dμ(t)`.
    ///
    /// With a Chebyshev density the closed forms
    /// `V(x) = log 2 + Σ φ_k T_k(x)/k` on `[-1, 1]` and
    /// `V(z) = log 2 − log|ζ| + Σ φ_k Re(ζ^{−k})/k`, `ζ = z + √(z²−1)`,
    /// are used; otherwise each panel contributes its exact integral for a
    /// constant density along the chord.
    pub fn log_potential(&self, z: Complex64) -> f64 {
        if let Some(phi) = &self.density {
            return chebyshev_log_potential(phi, z);
        }
        self.panels
            .iter()
            .filter(|p| p.mass != 0.0)
            .map(|p| p.mass * panel_log_average(p.left, p.right, z))
            .sum()
    }

    /// Green potential `G(z) = ∫ g_K(z, t) dμ(t)`, split as
    /// `V(z) + ∫ h_K(z, t) dμ(t)` with the smooth part
    /// `h_K = g_K + log|z − t|` integrated by quadrature. Zero on `K`.
    pub fn green_potential(&self, k: &CompactDescriptor, z: Complex64) -> f64 {
        if k.phi(z).norm() <= 1.0 + 1e-14 {
            return 0.0;
        }
        let v = self.log_potential(z);
        v + self.integrate(|t| k.green_regular(z, t))
    }

    /// Green potential by direct quadrature of `g_K(z, ·)`; accurate when
    /// `z` stays away from the carrier.
    pub fn green_potential_far(&self, k: &CompactDescriptor, z: Complex64) -> f64 {
        let wz = k.phi(z);
        if wz.norm() <= 1.0 + 1e-14 {
            return 0.0;
        }
        self.integrate(|t| {
            let wt = k.phi(t);
            ((wz * wt.conj() - 1.0) / (wz - wt)).norm().ln()
        })
    }

    /// `true` when the measure is invariant under `z → z̄` (masses matched
    /// panel by panel to `tol`).
    pub fn is_conjugation_symmetric(&self, tol: f64) -> bool {
        self.panels.iter().all(|p| {
            self.panels.iter().any(|q| {
                (q.mid - p.mid.conj()).norm() <= 1e-10 * (1.0 + p.mid.norm()) && (q.mass - p.mass).abs() <= tol
            })
        })
    }

    /// CSV with columns `left_re,left_im,right_re,right_im,mass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("panel_left_re,panel_left_im,panel_right_re,panel_right_im,mass\n");
        for p in &self.panels {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.left.re, p.left.im, p.right.re, p.right.im, p.mass
            );
        }
        s
    }
}

pub(crate) fn chebyshev_log_potential(phi: &[f64], z: Complex64) -> f64 {
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        let mut v = LN_2;
        // Σ φ_k T_k(x)/k
        let scaled: Vec<f64> = phi
            .iter()
            .enumerate()
            .map(|(k, p)| if k == 0 { 0.0 } else { p / k as f64 })
            .collect();
        v += clenshaw_f64(&scaled, z.re);
        return v;
    }
    let zeta = inverse_joukowski(z);
    let inv = 1.0 / zeta;
    let mut v = LN_2 - zeta.norm().ln();
    let mut pow = inv;
    for (k, p) in phi.iter().enumerate().skip(1) {
        v += p * pow.re / k as f64;
        pow *= inv;
    }
    v
}

/// `(V, G)` of `mu` at `z`; see [`DiscreteMeasure::log_potential`] and
/// [`DiscreteMeasure::green_potential`].
pub fn potentials(mu: &DiscreteMeasure, k: &CompactDescriptor, z: Complex64) -> (f64, f64) {
    (mu.log_potential(z), mu.green_potential(k, z))
}
