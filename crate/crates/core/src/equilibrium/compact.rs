//! Segment and circline-arc compacts with closed-form exterior maps.
//!
//! Every compact is the preimage of a straight segment `[e1, e2]` under a
//! map `m(z)` that is either the identity or the Möbius map
//! `m(z) = 1/(z − x_c)`, where `x_c` is the real point of the complementary
//! arc. The exterior map is then `Φ(z) = J⁻¹(s(m(z)))` with the affine
//! normalization `s(m) = (2m − e1 − e2)/(e2 − e1)` and the inverse Joukowski
//! map `J⁻¹(s) = s + √(s−1)√(s+1)`, `|J⁻¹| > 1` off `[-1, 1]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimal clearance between a compact and `E = [-1, 1]`.
pub const E_MARGIN: f64 = 1e-6;

/// A compact `K` disjoint from `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompactDescriptor {
    /// The straight segment `[e1, e2]`.
    Segment { e1: Complex64, e2: Complex64 },
    /// The arc from `b` to `b̄` of the circline through `b`, `b̄` and the real
    /// point `1/u`, taken on the side containing `1/u` (`u = 0` gives the arc
    /// through infinity).
    CirclineArc { b: Complex64, u: f64 },
}

#[derive(Clone, Copy, Debug)]
struct Geometry {
    // None: identity; Some(x_c): m(z) = 1/(z - x_c)
    pole: Option<f64>,
    e1: Complex64,
    e2: Complex64,
}

impl Geometry {
    fn m(&self, z: Complex64) -> Complex64 {
        match self.pole {
            None => z,
            Some(xc) => 1.0 / (z - xc),
        }
    }

    fn m_inv(&self, m: Complex64) -> Complex64 {
        match self.pole {
            None => m,
            Some(xc) => {
                if m == Complex64::new(0.0, 0.0) {
                    Complex64::new(f64::INFINITY, 0.0)
                } else {
                    xc + 1.0 / m
                }
            }
        }
    }

    fn s_of_m(&self, m: Complex64) -> Complex64 {
        (2.0 * m - self.e1 - self.e2) / (self.e2 - self.e1)
    }

    fn m_of_s(&self, s: Complex64) -> Complex64 {
        0.5 * (self.e1 + self.e2) + 0.5 * (self.e2 - self.e1) * s
    }
}

/// Inverse Joukowski map with `|ζ| ≥ 1`.
pub fn inverse_joukowski(s: Complex64) -> Complex64 {
    let z = s + (s - 1.0).sqrt() * (s + 1.0).sqrt();
    if z.norm_sqr() < 1.0 {
        // Only reachable through rounding on the cut itself.
        1.0 / z
    } else {
        z
    }
}

pub fn joukowski(w: Complex64) -> Complex64 {
    0.5 * (w + 1.0 / w)
}

/// Distance from `z` to `[-1, 1]`.
pub fn distance_to_e(z: Complex64) -> f64 {
    if !z.re.is_finite() || !z.im.is_finite() {
        return f64::INFINITY;
    }
    let x = z.re.clamp(-1.0, 1.0);
    (z - x).norm()
}

fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

impl CompactDescriptor {
    pub fn segment(e1: Complex64, e2: Complex64) -> Result<Self> {
        let k = CompactDescriptor::Segment { e1, e2 };
        k.validate()?;
        Ok(k)
    }

    pub fn real_segment(c: f64, d: f64) -> Result<Self> {
        Self::segment(Complex64::new(c, 0.0), Complex64::new(d, 0.0))
    }

    pub fn circline_arc(b: Complex64, u: f64) -> Result<Self> {
        let k = CompactDescriptor::CirclineArc { b, u };
        k.validate()?;
        Ok(k)
    }

    fn geometry(&self) -> Geometry {
        match *self {
            CompactDescriptor::Segment { e1, e2 } => Geometry { pole: None, e1, e2 },
            CompactDescriptor::CirclineArc { b, u } => {
                let beta = b.re;
                let denom = 1.0 - u * beta;
                if denom.abs() < 1e-12 {
                    // The circline is the vertical line through b; the arc is [b̄, b].
                    return Geometry {
                        pole: None,
                        e1: b,
                        e2: b.conj(),
                    };
                }
                let xc = (beta - u * b.norm_sqr()) / denom;
                let e1 = 1.0 / (b - xc);
                Geometry {
                    pole: Some(xc),
                    e1,
                    e2: e1.conj(),
                }
            }
        }
    }

    /// Checks the structural invariants: nondegenerate endpoints and
    /// clearance from `[-1, 1]`.
    pub fn validate(&self) -> Result<()> {
        match *self {
            CompactDescriptor::Segment { e1, e2 } => {
                if !(e1.re.is_finite() && e1.im.is_finite() && e2.re.is_finite() && e2.im.is_finite()) {
                    return Err(Error::InvalidCompact("non-finite segment endpoint".into()));
                }
                if (e1 - e2).norm() < 1e-12 {
                    return Err(Error::InvalidCompact("segment collapses to a point".into()));
                }
            }
            CompactDescriptor::CirclineArc { b, u } => {
                if !(b.re.is_finite() && b.im.is_finite() && u.is_finite()) {
                    return Err(Error::InvalidCompact("non-finite arc data".into()));
                }
                if b.im.abs() < 1e-12 {
                    return Err(Error::InvalidCompact(
                        "arc endpoint b must lie off the real axis".into(),
                    ));
                }
                if u.abs() >= 1.0 {
                    return Err(Error::InvalidCompact(format!("arc parameter u = {u} outside (-1, 1)")));
                }
            }
        }
        let d = self.distance_to_e();
        if d < E_MARGIN {
            return Err(Error::InvalidCompact(format!(
                "compact comes within {d:e} of [-1, 1] (margin {E_MARGIN:e})"
            )));
        }
        Ok(())
    }

    /// Endpoints in the `z`-plane.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        match *self {
            CompactDescriptor::Segment { e1, e2 } => (e1, e2),
            CompactDescriptor::CirclineArc { b, .. } => (b, b.conj()),
        }
    }

    pub fn is_conjugation_symmetric(&self) -> bool {
        match *self {
            CompactDescriptor::Segment { e1, e2 } => {
                let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-12 * (1.0 + a.norm());
                (close(e1.conj(), e1) && close(e2.conj(), e2)) || (close(e1.conj(), e2) && close(e2.conj(), e1))
            }
            CompactDescriptor::CirclineArc { .. } => true,
        }
    }

    /// The point of `K` at parameter `alpha ∈ [0, π]`
    /// (`alpha = 0` at the first endpoint).
    pub fn point(&self, alpha: f64) -> Complex64 {
        self.offset_point(alpha, 0.0)
    }

    /// The point at normalized coordinate `s = cos(alpha) + i·offset`;
    /// `offset > 0` and `offset < 0` are the two sides of `K`.
    pub fn offset_point(&self, alpha: f64, offset: f64) -> Complex64 {
        let g = self.geometry();
        // alpha = 0 ↔ s = -1 ↔ first endpoint
        let s = Complex64::new(-alpha.cos(), offset);
        g.m_inv(g.m_of_s(s))
    }

    /// Normalized coordinate `s(z)`; `K` is `s ∈ [-1, 1]`.
    pub fn normalized(&self, z: Complex64) -> Complex64 {
        let g = self.geometry();
        g.s_of_m(g.m(z))
    }

    /// Inverse of [`CompactDescriptor::normalized`].
    pub fn from_normalized(&self, s: Complex64) -> Complex64 {
        let g = self.geometry();
        g.m_inv(g.m_of_s(s))
    }

    /// Exterior conformal map `Φ: C̄ \ K → {|w| > 1}`.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        inverse_joukowski(self.normalized(z))
    }

    pub fn phi_inv(&self, w: Complex64) -> Complex64 {
        self.from_normalized(joukowski(w))
    }

    /// Divided difference `(Φ(z) − Φ(t))/(z − t)`, exact at `z = t`
    /// (where it is `Φ'(z)`).
    pub fn phi_divided_difference(&self, z: Complex64, t: Complex64) -> Complex64 {
        let g = self.geometry();
        let (mz, mt) = (g.m(z), g.m(t));
        let dm = match g.pole {
            None => Complex64::new(1.0, 0.0),
            Some(_) => -mz * mt,
        };
        let ds = 2.0 / (g.e2 - g.e1);
        let (wz, wt) = (inverse_joukowski(g.s_of_m(mz)), inverse_joukowski(g.s_of_m(mt)));
        let p = wz * wt;
        let dj = 2.0 * p / (p - 1.0);
        dj * ds * dm
    }

    pub fn phi_prime(&self, z: Complex64) -> Complex64 {
        self.phi_divided_difference(z, z)
    }

    /// `true` when `z` lies on `K` up to `|Φ(z)| − 1 ≤ tol`.
    pub fn on_compact(&self, z: Complex64, tol: f64) -> bool {
        self.phi(z).norm() - 1.0 <= tol
    }

    /// Green's function of `C̄ \ K` with pole at `t`; zero on `K`.
    pub fn green(&self, z: Complex64, t: Complex64) -> Result<f64> {
        if z == t {
            return Err(Error::NearSingularity {
                z: format!("{z}"),
                distance: 0.0,
            });
        }
        let (wz, wt) = (self.phi(z), self.phi(t));
        if wz.norm() <= 1.0 + 1e-14 || wt.norm() <= 1.0 + 1e-14 {
            return Ok(0.0);
        }
        Ok(((wz * wt.conj() - 1.0) / (wz - wt)).norm().ln().max(0.0))
    }

    /// Regular part `g_K(z, t) + log|z − t|`, finite on the diagonal.
    pub fn green_regular(&self, z: Complex64, t: Complex64) -> f64 {
        let (wz, wt) = (self.phi(z), self.phi(t));
        (wz * wt.conj() - 1.0).norm().ln() - self.phi_divided_difference(z, t).norm().ln()
    }

    /// Nearest point of `K` to `z`: returns `(alpha, distance)`.
    pub fn closest_point(&self, z: Complex64) -> (f64, f64) {
        let dist = |a: f64| {
            let p = self.point(a);
            if p.re.is_finite() && p.im.is_finite() {
                (p - z).norm()
            } else {
                f64::INFINITY
            }
        };
        let n = 2048;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=n {
            let a = PI * i as f64 / n as f64;
            let d = dist(a);
            if d < best.1 {
                best = (a, d);
            }
        }
        let h = PI / n as f64;
        let (a, d) = golden_min((best.0 - h).max(0.0), (best.0 + h).min(PI), dist, 1e-13);
        if d < best.1 {
            (a, d)
        } else {
            best
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.closest_point(z).1
    }

    pub fn distance_to_e(&self) -> f64 {
        let f = |a: f64| distance_to_e(self.point(a));
        let n = 4096;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=n {
            let a = PI * i as f64 / n as f64;
            let d = f(a);
            if d < best.1 {
                best = (a, d);
            }
        }
        let h = PI / n as f64;
        let (_, d) = golden_min((best.0 - h).max(0.0), (best.0 + h).min(PI), f, 1e-14);
        d.min(best.1)
    }

    /// `true` if the point at infinity belongs to `K`.
    pub fn contains_infinity(&self) -> bool {
        let g = self.geometry();
        if g.pole.is_none() {
            return false;
        }
        // m = 0 must lie on the segment [e1, e2].
        let s = g.s_of_m(Complex64::new(0.0, 0.0));
        s.im.abs() < 1e-12 && s.re.abs() <= 1.0
    }
}
