//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rug::Rational;
use std::f64::consts::PI;

/// `a_k = (2/π) ∫_0^π f(cos t) cos(kt) dt` (halved for `k = 0`) by the
/// trapezoid rule with `n` intervals.
pub fn trapezoid_coeffs(f: impl Fn(f64) -> f64, kmax: usize, n: usize) -> Vec<f64> {
    let vals: Vec<f64> = (0..=n).map(|j| f((PI * j as f64 / n as f64).cos())).collect();
    (0..=kmax)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (k as f64 * PI * j as f64 / n as f64).cos();
            }
            let a = 2.0 * s / n as f64;
            if k == 0 {
                0.5 * a
            } else {
                a
            }
        })
        .collect()
}

/// Chebyshev coefficients of a monomial polynomial, exactly.
pub fn monomial_to_chebyshev(c: &[f64]) -> Vec<Rational> {
    let n = c.len();
    let mut out = vec![Rational::new(); n];
    // x^j = Σ_k e_{j,k} T_k, built from x·T_k = (T_{k+1} + T_{|k-1|})/2
    let mut xj: Vec<Rational> = vec![Rational::new(); n];
    xj[0] = Rational::from(1);
    for (j, cj) in c.iter().enumerate() {
        let cj = Rational::from_f64(*cj).expect("finite coefficient");
        for k in 0..n {
            out[k] += Rational::from(&cj * &xj[k]);
        }
        if j + 1 < n {
            let mut next = vec![Rational::new(); n];
            for k in 0..n {
                if xj[k] == 0 {
                    continue;
                }
                let half = Rational::from(&xj[k] / 2u32);
                if k + 1 < n {
                    next[k + 1] += &half;
                }
                let lower = if k == 0 { 1 } else { k - 1 };
                if lower < n {
                    next[lower] += &half;
                }
            }
            xj = next;
        }
    }
    out
}

/// Coefficient `m` of `T_j · Σ a_k T_k`.
pub fn product_coeff(a: &[Rational], j: usize, m: usize) -> Rational {
    let get = |i: usize| a.get(i).cloned().unwrap_or_default();
    let mut s = get(j + m);
    if m >= j {
        s += get(m - j);
    }
    if m > 0 && j >= m {
        s += get(j - m);
    }
    s / 2u32
}

/// Frobenius denominator with `q_M = 1` by exact Gaussian elimination.
pub fn exact_frobenius(a: &[Rational], l: usize, m: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut rows: Vec<Vec<Rational>> = (l + 1..=l + m)
        .map(|k| {
            let mut row: Vec<Rational> = (0..m).map(|j| product_coeff(a, j, k)).collect();
            row.push(-product_coeff(a, m, k));
            row
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| rows[r][col] != 0).expect("nonsingular system");
        rows.swap(col, piv);
        for r in 0..m {
            if r != col && rows[r][col] != 0 {
                let factor = Rational::from(&rows[r][col] / &rows[col][col]);
                for c in col..=m {
                    let t = Rational::from(&factor * &rows[col][c]);
                    rows[r][c] -= t;
                }
            }
        }
    }
    let mut q: Vec<Rational> = (0..m).map(|i| Rational::from(&rows[i][m] / &rows[i][i])).collect();
    q.push(Rational::from(1));
    let p = (0..=l)
        .map(|k| {
            let mut s = Rational::new();
            for (j, qj) in q.iter().enumerate() {
                s += Rational::from(qj * &product_coeff(a, j, k));
            }
            s
        })
        .collect();
    (p, q)
}

/// Scales `(p, q)` to `‖q‖₂ = 1` with the last nonzero `q` coefficient positive.
pub fn normalize(p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lead = q.iter().rev().find(|x| **x != 0.0).copied().unwrap_or(1.0);
    let s = lead.signum() / n;
    (p.iter().map(|x| x * s).collect(), q.iter().map(|x| x * s).collect())
}

fn exterior_map(c: f64, d: f64, x: f64) -> f64 {
    let s = (2.0 * x - c - d) / (d - c);
    // real point outside [c, d]: the root of ζ² − 2sζ + 1 with |ζ| > 1
    s - s.signum() * (s * s - 1.0).sqrt()
}

fn exterior_map_prime(c: f64, d: f64, x: f64) -> f64 {
    let s = (2.0 * x - c - d) / (d - c);
    (1.0 - s.signum() * s / (s * s - 1.0).sqrt()) * 2.0 / (d - c)
}

/// `g_{[c,d]}(x, t) − log(1/|x − t|)` for real `x, t` outside `[c, d]`.
pub fn segment_green_regular(c: f64, d: f64, x: f64, t: f64) -> f64 {
    let (zx, zt) = (exterior_map(c, d, x), exterior_map(c, d, t));
    let ratio = if (x - t).abs() > 1e-13 {
        (x - t) / (zx - zt)
    } else {
        1.0 / exterior_map_prime(c, d, x)
    };
    ((1.0 - zx * zt) * ratio).abs().ln()
}

// second antiderivative of log|u|
fn log_antiderivative2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.75 * u * u
    }
}

fn gauss_legendre_6() -> ([f64; 6], [f64; 6]) {
    (
        [
            -0.932_469_514_203_152,
            -0.661_209_386_466_264_5,
            -0.238_619_186_083_196_9,
            0.238_619_186_083_196_9,
            0.661_209_386_466_264_5,
            0.932_469_514_203_152,
        ],
        [
            0.171_324_492_379_170_3,
            0.360_761_573_048_138_6,
            0.467_913_934_572_691,
            0.467_913_934_572_691,
            0.360_761_573_048_138_6,
            0.171_324_492_379_170_3,
        ],
    )
}

fn project_to_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut tau = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.map(|x| (x - tau).max(0.0))
}

/// Minimum of `m ↦ mᵀ A m` over the unit simplex by accelerated projected
/// gradient with restarts.
pub fn fista_simplex(a: &DMatrix<f64>, iters: usize) -> (DVector<f64>, f64) {
    let n = a.nrows();
    let mut lmax = 0.0;
    let mut v = DVector::from_element(n, 1.0);
    for _ in 0..200 {
        let w = a * &v;
        lmax = w.norm() / v.norm();
        v = w / lmax;
    }
    let step = 1.0 / (2.0 * lmax * 1.01);
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut y = x.clone();
    let mut t: f64 = 1.0;
    let mut fx = x.dot(&(a * &x));
    for _ in 0..iters {
        let grad = 2.0 * (a * &y);
        let xn = project_to_simplex(&(&y - step * grad));
        let fxn = xn.dot(&(a * &xn));
        if fxn > fx {
            y = x.clone();
            t = 1.0;
            continue;
        }
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &xn + ((t - 1.0) / tn) * (&xn - &x);
        x = xn;
        fx = fxn;
        t = tn;
    }
    (x, fx)
}

/// Minimal mixed energy on `[-1, 1]` relative to the segment `[c, d]` over
/// densities that are constant on `n` cosine-graded panels.
pub fn discrete_min_energy(c: f64, d: f64, theta: f64, n: usize, iters: usize) -> f64 {
    let e: Vec<f64> = (0..=n).map(|i| -(PI * i as f64 / n as f64).cos()).collect();
    let (gx, gw) = gauss_legendre_6();
    let nodes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            let (a, b) = (e[i], e[i + 1]);
            (0..6)
                .map(|k| (0.5 * (a + b) + 0.5 * (b - a) * gx[k], 0.5 * (b - a) * gw[k]))
                .collect()
        })
        .collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let (a1, b1, a2, b2) = (e[i], e[i + 1], e[j], e[j + 1]);
        let f = log_antiderivative2;
        let log_int = f(b1 - a2) - f(a1 - a2) - f(b1 - b2) + f(a1 - b2);
        let mut h = 0.0;
        for &(x, wx) in &nodes[i] {
            for &(t, wt) in &nodes[j] {
                h += wx * wt * segment_green_regular(c, d, x, t);
            }
        }
        (-(theta + 1.0) * log_int + h) / ((b1 - a1) * (b2 - a2))
    });
    fista_simplex(&a, iters).1
}

/// Equilibrium constant from the projected-gradient minimizer on 200 and 400
/// panels, extrapolated for the `O(n⁻²)` discretization error.
pub fn equilibrium_constant_oracle(c: f64, d: f64, theta: f64) -> f64 {
    let coarse = discrete_min_energy(c, d, theta, 200, 3000);
    let fine = discrete_min_energy(c, d, theta, 400, 3000);
    fine + (fine - coarse) / 3.0
}

/// Green's function of the complement of the slit `[e1, e2]`.
///
/// `g(z, t) = log(1/|z−t|) − U^ν(z) − c` with `ν` the harmonic measure of
/// `t`. Writing `ν = Σ b_k T_k(s) ds/(π√(1−s²))` on `y = m + h·s` and using
/// `∫ log(1/|s−s'|) T_k(s') ds'/(π√(1−s'²)) = T_k(s)/k` (`log 2` for `k = 0`),
/// the boundary condition fixes `b_k = k·r_k` where `r_k` expand
/// `−log|y(s) − t|`. Off the slit `U^ν` is a Gauss–Chebyshev sum.
pub fn slit_green(e1: Complex64, e2: Complex64, t: Complex64, n: usize) -> impl Fn(Complex64) -> f64 {
    let (m, h) = ((e1 + e2) / 2.0, (e2 - e1) / 2.0);
    let nodes: Vec<f64> = (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect();
    let r: Vec<f64> = (0..n)
        .map(|k| {
            let s: f64 = (0..n)
                .map(|j| -(m + h * nodes[j] - t).norm().ln() * (k as f64 * PI * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect();
    let c = r[0] + h.norm().ln() - 2f64.ln();
    // density of ν against ds/(π√(1−s²)) at the nodes
    let dens: Vec<f64> = (0..n)
        .map(|j| {
            1.0 + (1..n)
                .map(|k| k as f64 * r[k] * (k as f64 * PI * (j as f64 + 0.5) / n as f64).cos())
                .sum::<f64>()
        })
        .collect();
    let points: Vec<Complex64> = nodes.iter().map(|&x| m + h * x).collect();
    move |z: Complex64| {
        let u: f64 = points.iter().zip(&dens).map(|(y, d)| -(z - y).norm().ln() * d).sum::<f64>() / n as f64;
        -(z - t).norm().ln() - u - c
    }
}

/// `a_k = (2/π) ∫_0^π f(cos θ) cos kθ dθ` by the trapezoid rule with `n`
/// intervals at `prec` bits.
pub fn mp_trapezoid_coeffs(f: impl Fn(&rug::Float) -> rug::Float, kmax: usize, n: usize, prec: u32) -> Vec<rug::Float> {
    use rug::Float;
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let mut sums = vec![Float::new(prec); kmax + 1];
    for j in 0..=n {
        let t = Float::with_val(prec, &pi * j as u32) / n as u32;
        let mut v = f(&t.clone().cos());
        if j == 0 || j == n {
            v /= 2u32;
        }
        for (k, s) in sums.iter_mut().enumerate() {
            *s += Float::with_val(prec, &t * k as u32).cos() * &v;
        }
    }
    sums.into_iter()
        .enumerate()
        .map(|(k, s)| {
            let a = s * 2u32 / n as u32;
            if k == 0 {
                a / 2u32
            } else {
                a
            }
        })
        .collect()
}

/// Harmonic measure, seen from `ζ` outside the unit disk, of the arc
/// `β ∈ [b1, b2]` by the midpoint rule on the Poisson kernel.
pub fn riemann_harmonic_measure(zeta: Complex64, b1: f64, b2: f64, n: usize) -> f64 {
    let h = (b2 - b1) / n as f64;
    let r2 = zeta.norm_sqr();
    (0..n)
        .map(|i| {
            let beta = b1 + h * (i as f64 + 0.5);
            (r2 - 1.0) / (zeta - Complex64::from_polar(1.0, beta)).norm_sqr()
        })
        .sum::<f64>()
        * h
        / (2.0 * PI)
}

/// Monomial coefficients of a random `p/q` of type `(l, m)` with monic `q`.
pub fn random_rational(rng: &mut impl rand::Rng, l: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    // q = Π (x − r_j) with the roots off a neighborhood of [-1, 1]
    let mut q = vec![1.0];
    let mut j = 0;
    while j < m {
        let root = if m - j >= 2 && rng.gen_bool(0.5) {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.6..2.0));
            j += 2;
            Some(z)
        } else {
            j += 1;
            None
        };
        let factor: Vec<f64> = match root {
            Some(z) => vec![z.norm_sqr(), -2.0 * z.re, 1.0],
            None => {
                let x: f64 = rng.gen_range(1.6..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                vec![-x, 1.0]
            }
        };
        let mut next = vec![0.0; q.len() + factor.len() - 1];
        for (i, a) in q.iter().enumerate() {
            for (k, b) in factor.iter().enumerate() {
                next[i + k] += a * b;
            }
        }
        q = next;
    }
    let p: Vec<f64> = (0..=l).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (p, q)
}
