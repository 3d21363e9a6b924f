//! Catalog of real functions on `[-1, 1]` with their analytic continuation.

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::equilibrium::CompactDescriptor;
use crate::error::{Error, Result};
use crate::mp;
use crate::serde_num;

/// Points closer than this to a branch point or cut are rejected.
pub const SINGULAR_DISTANCE: f64 = 1e-12;

/// Coefficient basis of a [`FunctionSpec::Rational`] entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyBasis {
    #[default]
    Monomial,
    Chebyshev,
}

/// A function from the catalog.
///
/// * `MarkovUniform { c, d }` is `σ̂(z) = ∫_c^d dx/(z − x) = log((z−c)/(z−d))`.
/// * `SqrtConjPair { b }` is `√((z−b)(z−b̄))`, positive on `[-1, 1]`.
/// * `CbrtTriple { b, a }` is the real cube root of `±(z−b)(z−b̄)(z−a)`, the
///   sign chosen so the radicand is positive on `[-1, 1]`.
/// * `Rational { p, q, basis }` is `p/q`.
/// * `Sum(terms)` adds its terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    MarkovUniform {
        #[serde(deserialize_with = "serde_num::real")]
        c: f64,
        #[serde(deserialize_with = "serde_num::real")]
        d: f64,
    },
    SqrtConjPair {
        #[serde(deserialize_with = "serde_num::complex")]
        b: Complex64,
    },
    CbrtTriple {
        #[serde(deserialize_with = "serde_num::complex")]
        b: Complex64,
        #[serde(deserialize_with = "serde_num::real")]
        a: f64,
    },
    Rational {
        #[serde(deserialize_with = "serde_num::reals")]
        p: Vec<f64>,
        #[serde(deserialize_with = "serde_num::reals")]
        q: Vec<f64>,
        #[serde(default)]
        basis: PolyBasis,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
}

fn poly_eval_f64(c: &[f64], basis: PolyBasis, x: Complex64) -> Complex64 {
    match basis {
        PolyBasis::Monomial => c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * x + ck),
        PolyBasis::Chebyshev => {
            let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for &ck in c.iter().skip(1).rev() {
                let b0 = 2.0 * x * b1 - b2 + ck;
                b2 = b1;
                b1 = b0;
            }
            c.first().copied().unwrap_or(0.0) + x * b1 - b2
        }
    }
}

fn poly_eval_mp(c: &[f64], basis: PolyBasis, z: &Complex) -> Complex {
    let prec = z.prec().0;
    let cs: Vec<Float> = c.iter().map(|&v| mp::from_f64(prec, v)).collect();
    match basis {
        PolyBasis::Monomial => {
            let mut acc = Complex::new(prec);
            for ck in cs.iter().rev() {
                acc *= z;
                acc += ck;
            }
            acc
        }
        PolyBasis::Chebyshev => mp::clenshaw_complex(&cs, z),
    }
}

/// A power-type factor `(z − point)^exponent` of an algebraic function.
#[derive(Clone, Copy, Debug)]
struct Factor {
    point: Complex64,
    exponent: (u32, u32),
}

fn seg_point_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let t = if ab.norm_sqr() == 0.0 {
        0.0
    } else {
        (((p - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0)
    };
    (a + ab * t - p).norm()
}

impl FunctionSpec {
    pub fn markov(c: f64, d: f64) -> Self {
        FunctionSpec::MarkovUniform { c, d }
    }

    pub fn sqrt_pair(b: Complex64) -> Self {
        FunctionSpec::SqrtConjPair { b }
    }

    /// Checks the admissibility conditions: branch points off `[-1, 1]` and
    /// conjugation-symmetric, real values on `[-1, 1]`.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::MarkovUniform { c, d } => {
                if !(c.is_finite() && d.is_finite()) || c >= d {
                    return Err(Error::InvalidFunction(format!(
                        "markov support [{c}, {d}] must satisfy c < d"
                    )));
                }
                let outside = (*c > 1.0 + SINGULAR_DISTANCE) || (*d < -1.0 - SINGULAR_DISTANCE);
                if !outside {
                    return Err(Error::InvalidFunction(format!(
                        "markov support [{c}, {d}] meets [-1, 1]"
                    )));
                }
            }
            FunctionSpec::SqrtConjPair { b } => {
                if !(b.im > 0.0 && b.re.is_finite() && b.im.is_finite()) {
                    return Err(Error::InvalidFunction(format!("sqrt pair needs Im b > 0, got {b}")));
                }
            }
            FunctionSpec::CbrtTriple { b, a } => {
                if !(b.im > 0.0 && b.re.is_finite() && b.im.is_finite()) {
                    return Err(Error::InvalidFunction(format!("cbrt triple needs Im b > 0, got {b}")));
                }
                if !a.is_finite() || a.abs() <= 1.0 + SINGULAR_DISTANCE {
                    return Err(Error::InvalidFunction(format!(
                        "cbrt triple needs real a outside [-1, 1], got {a}"
                    )));
                }
            }
            FunctionSpec::Rational { p, q, basis } => {
                if p.is_empty() || q.is_empty() || p.iter().chain(q).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidFunction("rational needs finite, nonempty p and q".into()));
                }
                let qmax = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if qmax == 0.0 {
                    return Err(Error::InvalidFunction("denominator is identically zero".into()));
                }
                // No zero of q on [-1, 1]: no sign change and no near-touching minimum.
                let n = 4000;
                let mut sign = 0.0;
                let mut qmin = f64::INFINITY;
                let mut qscale = 0.0f64;
                for i in 0..=n {
                    let x = -1.0 + 2.0 * i as f64 / n as f64;
                    let v = poly_eval_f64(q, *basis, Complex64::new(x, 0.0)).re;
                    qscale = qscale.max(v.abs());
                    qmin = qmin.min(v.abs());
                    if sign == 0.0 {
                        sign = v.signum();
                    } else if v.signum() != sign {
                        return Err(Error::InvalidFunction("denominator vanishes on [-1, 1]".into()));
                    }
                }
                if qmin <= 1e-13 * qscale {
                    return Err(Error::InvalidFunction("denominator vanishes on [-1, 1]".into()));
                }
            }
            FunctionSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidFunction("empty sum".into()));
                }
                for t in terms {
                    t.validate()?;
                }
            }
        }
        Ok(())
    }

    /// The branch-point set `Σ_f` (log singularities of Markov entries
    /// included).
    pub fn branch_points(&self) -> Vec<Complex64> {
        match self {
            FunctionSpec::MarkovUniform { c, d } => vec![Complex64::new(*c, 0.0), Complex64::new(*d, 0.0)],
            FunctionSpec::SqrtConjPair { b } => vec![*b, b.conj()],
            FunctionSpec::CbrtTriple { b, a } => vec![*b, b.conj(), Complex64::new(*a, 0.0)],
            FunctionSpec::Rational { .. } => vec![],
            FunctionSpec::Sum { terms } => {
                let mut out: Vec<Complex64> = Vec::new();
                for p in terms.iter().flat_map(|t| t.branch_points()) {
                    if !out.iter().any(|q| (q - p).norm() < 1e-14) {
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    fn factors(&self) -> Vec<Factor> {
        match self {
            FunctionSpec::SqrtConjPair { b } => vec![
                Factor {
                    point: *b,
                    exponent: (1, 2),
                },
                Factor {
                    point: b.conj(),
                    exponent: (1, 2),
                },
            ],
            FunctionSpec::CbrtTriple { b, a } => vec![
                Factor {
                    point: *b,
                    exponent: (1, 3),
                },
                Factor {
                    point: b.conj(),
                    exponent: (1, 3),
                },
                Factor {
                    point: Complex64::new(*a, 0.0),
                    exponent: (1, 3),
                },
            ],
            FunctionSpec::MarkovUniform { c, d } => vec![
                Factor {
                    point: Complex64::new(*c, 0.0),
                    exponent: (1, 1),
                },
                Factor {
                    point: Complex64::new(*d, 0.0),
                    exponent: (1, 1),
                },
            ],
            _ => vec![],
        }
    }

    /// Value on `[-1, 1]` at working precision.
    pub fn eval_real(&self, x: &Float) -> Result<Float> {
        let prec = x.prec();
        let v = match self {
            FunctionSpec::MarkovUniform { c, d } => {
                let num = Float::with_val(prec, x - *c);
                let den = Float::with_val(prec, x - *d);
                (num / den).ln()
            }
            FunctionSpec::SqrtConjPair { b } => {
                let dx = Float::with_val(prec, x - b.re);
                (dx.square() + b.im * b.im).sqrt()
            }
            FunctionSpec::CbrtTriple { b, a } => {
                let dx = Float::with_val(prec, x - b.re);
                let quad = dx.square() + b.im * b.im;
                let lin = Float::with_val(prec, x - *a).abs();
                (quad * lin).cbrt()
            }
            FunctionSpec::Rational { p, q, basis } => {
                let z = Complex::with_val(prec, (x, 0));
                let num = poly_eval_mp(p, *basis, &z);
                let den = poly_eval_mp(q, *basis, &z);
                if den.real().is_zero() {
                    return Err(Error::InvalidFunction(format!("pole on [-1, 1] at {}", x.to_f64())));
                }
                Float::with_val(prec, num.real() / den.real())
            }
            FunctionSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidFunction("empty sum".into()));
                }
                let mut s = Float::new(prec);
                for t in terms {
                    s += t.eval_real(x)?;
                }
                s
            }
        };
        if !v.is_finite() {
            return Err(Error::InvalidFunction(format!(
                "non-finite value at x = {}",
                x.to_f64()
            )));
        }
        Ok(v)
    }

    /// Value of the single-valued branch in the complement of `cut`,
    /// continued from `x = 0` where it is real.
    ///
    /// With `cut = None` the continuation runs along the straight segment
    /// `[0, z]` (the star domain with respect to the origin). With a compact,
    /// the path is routed through the exterior disk of that compact, so the
    /// result is continuous off `K`; the compact must join the branch points.
    pub fn eval_continuation(&self, z: &Complex, cut: Option<&CompactDescriptor>) -> Result<Complex> {
        let z64 = mp::to_c64(z);
        if let Some(k) = cut {
            let d = k.distance(z64);
            if d < SINGULAR_DISTANCE {
                return Err(Error::NearSingularity {
                    z: format!("{z64}"),
                    distance: d,
                });
            }
        }
        match self {
            FunctionSpec::Rational { p, q, basis } => {
                let den = poly_eval_mp(q, *basis, z);
                let den_abs = mp::to_c64(&den).norm();
                let scale = q.iter().fold(0.0f64, |m, v| m.max(v.abs())) * (1.0 + z64.norm()).powi(q.len() as i32);
                if den_abs <= 1e-14 * scale {
                    return Err(Error::NearSingularity {
                        z: format!("{z64}"),
                        distance: den_abs,
                    });
                }
                Ok(poly_eval_mp(p, *basis, z) / den)
            }
            FunctionSpec::Sum { terms } => {
                let mut acc = Complex::new(z.prec().0);
                for t in terms {
                    acc += t.eval_continuation(z, cut)?;
                }
                Ok(acc)
            }
            _ => self.eval_branched(z, cut),
        }
    }

    fn eval_branched(&self, z: &Complex, cut: Option<&CompactDescriptor>) -> Result<Complex> {
        let prec = z.prec().0;
        let z64 = mp::to_c64(z);
        let factors = self.factors();
        for f in &factors {
            let d = (z64 - f.point).norm();
            if d < SINGULAR_DISTANCE {
                return Err(Error::NearSingularity {
                    z: format!("{z64}"),
                    distance: d,
                });
            }
        }
        if let Some(k) = cut {
            self.check_cut_joins_branch_points(k)?;
        }
        let windings = match cut {
            None => {
                for f in &factors {
                    let d = seg_point_distance(Complex64::new(0.0, 0.0), z64, f.point);
                    if d < SINGULAR_DISTANCE {
                        return Err(Error::NearSingularity {
                            z: format!("{z64}"),
                            distance: d,
                        });
                    }
                }
                // A straight segment subtends less than π at each branch point.
                factors
                    .iter()
                    .map(|f| ((z64 - f.point) / (-f.point)).arg())
                    .collect::<Vec<_>>()
            }
            Some(k) => track_args(k, &factors, z64),
        };
        // L_j = Log(z - b_j) + 2πi k_j continues the principal log from z = 0.
        let pi = mp::pi(prec);
        let mut logs = Vec::with_capacity(factors.len());
        for (f, dtheta) in factors.iter().zip(&windings) {
            let start_arg = (-f.point).arg();
            let principal = (z64 - f.point).arg();
            let k = ((start_arg + dtheta - principal) / (2.0 * PI)).round();
            let mut l = Complex::with_val(prec, z - mp::complex(prec, f.point));
            l.ln_mut();
            let shift = Float::with_val(prec, &pi * (2.0 * k));
            *l.mut_imag() += shift;
            logs.push((l, start_arg));
        }
        match self {
            FunctionSpec::MarkovUniform { .. } => {
                let (lc, _) = &logs[0];
                let (ld, _) = &logs[1];
                Ok(Complex::with_val(prec, lc - ld))
            }
            _ => {
                let mut expo = Complex::new(prec);
                for (f, (l, start_arg)) in factors.iter().zip(logs) {
                    let mut t = l;
                    *t.mut_imag() -= Float::with_val(prec, start_arg);
                    t *= f.exponent.0;
                    t /= f.exponent.1;
                    expo += t;
                }
                Ok(expo.exp())
            }
        }
    }

    fn check_cut_joins_branch_points(&self, k: &CompactDescriptor) -> Result<()> {
        let (e1, e2) = k.endpoints();
        let pts = match self {
            FunctionSpec::MarkovUniform { c, d } => [Complex64::new(*c, 0.0), Complex64::new(*d, 0.0)],
            FunctionSpec::SqrtConjPair { b } => [*b, b.conj()],
            _ => {
                return Err(Error::UnsupportedFamily(
                    "a single arc cannot make a three-point algebraic function single-valued".into(),
                ))
            }
        };
        let tol = 1e-9 * (1.0 + pts[0].norm());
        let ok = ((e1 - pts[0]).norm() < tol && (e2 - pts[1]).norm() < tol)
            || ((e1 - pts[1]).norm() < tol && (e2 - pts[0]).norm() < tol);
        if !ok {
            return Err(Error::InvalidCompact(format!(
                "cut endpoints {e1}, {e2} do not join the branch points {}, {}",
                pts[0], pts[1]
            )));
        }
        Ok(())
    }
}

/// Total argument change of `z − b_j` along a path from 0 to `z` inside the
/// complement of `k`, traced in the exterior-disk coordinate.
fn track_args(k: &CompactDescriptor, factors: &[Factor], z: Complex64) -> Vec<f64> {
    let w0 = k.phi(Complex64::new(0.0, 0.0));
    let w1 = k.phi(z);
    let r = 1.5 * w0.norm().max(w1.norm());
    // radial out, circular arc, radial in
    let a0 = w0.arg();
    let mut a1 = w1.arg();
    if a1 - a0 > PI {
        a1 -= 2.0 * PI;
    } else if a0 - a1 > PI {
        a1 += 2.0 * PI;
    }
    let legs: [Box<dyn Fn(f64) -> Complex64>; 3] = [
        Box::new(move |t| w0 * (1.0 + t * (r / w0.norm() - 1.0))),
        Box::new(move |t| Complex64::from_polar(r, a0 + t * (a1 - a0))),
        Box::new(move |t| Complex64::from_polar(r + t * (w1.norm() - r), a1)),
    ];
    let mut total = vec![0.0; factors.len()];
    let mut prev = Complex64::new(0.0, 0.0);
    for leg in &legs {
        // depth-first subdivision, visited in increasing t
        let mut stack = vec![(0.0f64, 1.0f64)];
        while let Some((ta, tb)) = stack.pop() {
            let next = k.phi_inv(leg(tb));
            let incs: Vec<f64> = factors
                .iter()
                .map(|f| {
                    if next.re.is_finite() && prev.re.is_finite() {
                        ((next - f.point) / (prev - f.point)).arg()
                    } else {
                        f64::NAN
                    }
                })
                .collect();
            let too_big = incs.iter().any(|d| !(d.abs() < PI / 8.0));
            if too_big && tb - ta > 1e-12 {
                let mid = 0.5 * (ta + tb);
                stack.push((mid, tb));
                stack.push((ta, mid));
                continue;
            }
            for (acc, d) in total.iter_mut().zip(&incs) {
                if d.is_finite() {
                    *acc += d;
                }
            }
            prev = next;
        }
    }
    total
}
