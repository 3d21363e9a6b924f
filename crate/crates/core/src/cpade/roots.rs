use rug::{Complex, Float};

use crate::mp;

/// A polynomial root with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: usize,
}

impl Root {
    pub fn to_c64(&self) -> num_complex::Complex64 {
        mp::to_c64(&self.value)
    }
}

/// Monomial coefficients of `Σ c_k T_k(x)`, lowest degree first.
pub fn chebyshev_to_monomial(c: &[Float]) -> Vec<Float> {
    let n = c.len();
    if n == 0 {
        return vec![];
    }
    let prec = c[0].prec();
    let mut out = vec![Float::new(prec); n];
    // t_prev = T_{k-1}, t_cur = T_k as monomial vectors
    let mut t_prev = vec![Float::new(prec); n];
    let mut t_cur = vec![Float::new(prec); n];
    t_prev[0] = Float::with_val(prec, 1);
    if n > 1 {
        t_cur[1] = Float::with_val(prec, 1);
    }
    for (k, ck) in c.iter().enumerate() {
        let t = match k {
            0 => &t_prev,
            _ => &t_cur,
        };
        if !ck.is_zero() {
            for (o, ti) in out.iter_mut().zip(t.iter()) {
                if !ti.is_zero() {
                    *o += Float::with_val(prec, ck * ti);
                }
            }
        }
        if k >= 1 && k + 1 < n {
            let mut next = vec![Float::new(prec); n];
            for i in 0..n {
                let mut v = Float::with_val(prec, -&t_prev[i]);
                if i > 0 {
                    v += Float::with_val(prec, &t_cur[i - 1] * 2u32);
                }
                next[i] = v;
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    out
}

fn horner_with_derivative(a: &[Float], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec().0;
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for ak in a.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += ak;
    }
    (p, dp)
}

// Σ |a_k| |z|^k, the scale of the rounding error in p(z)
fn horner_bound(abs_a: &[Float], z: &Complex) -> Float {
    let r = Complex::with_val(53, z.abs_ref()).into_real_imag().0;
    let mut s = Float::new(53);
    for ak in abs_a.iter().rev() {
        s *= &r;
        s += ak;
    }
    s
}

fn abs_c(z: &Complex) -> Float {
    Complex::with_val(z.prec().0, z.abs_ref()).into_real_imag().0
}

/// Roots of the monomial polynomial `Σ a_k x^k` by Aberth–Ehrlich
/// iteration, clustered into multiple roots.
pub fn polynomial_roots(a: &[Float]) -> Vec<Root> {
    let Some(prec) = a.first().map(Float::prec) else {
        return vec![];
    };
    let scale = mp::max_abs(a);
    if scale.is_zero() {
        return vec![];
    }
    let trim_tol = Float::with_val(prec, &scale * mp::pow2(prec, -(prec as i32) + 16));
    let mut deg = a.len() - 1;
    while deg > 0 && Float::with_val(prec, a[deg].abs_ref()) <= trim_tol {
        deg -= 1;
    }
    // zero roots factor out exactly
    let mut low = 0;
    while low < deg && a[low].is_zero() {
        low += 1;
    }
    let mut roots: Vec<Complex> = vec![Complex::new(prec); low];
    let coeffs: Vec<Float> = a[low..=deg].to_vec();
    let n = coeffs.len() - 1;
    if n > 0 {
        roots.extend(aberth(&coeffs, prec));
    }
    cluster(roots, prec)
}

fn aberth(a: &[Float], prec: u32) -> Vec<Complex> {
    let n = a.len() - 1;
    let lead = a[n].to_f64().abs();
    let tail = a[0].to_f64().abs();
    let radius = if lead > 0.0 && tail > 0.0 {
        (tail / lead).powf(1.0 / n as f64)
    } else {
        1.0
    };
    let center = -a[n - 1].to_f64() / (n as f64 * a[n].to_f64());
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let r = radius.max(1e-3);
            Complex::with_val(prec, (center + r * t.cos(), r * t.sin()))
        })
        .collect();
    let mut done = vec![false; n];
    let tol = mp::pow2(prec, -(prec as i32) + 12);
    let abs_a: Vec<Float> = a.iter().map(|x| Float::with_val(53, x.abs_ref())).collect();
    let noise = mp::pow2(53, -(prec as i32) + 8);
    for _ in 0..2000 {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(a, &z[k]);
            if p.real().is_zero() && p.imag().is_zero() {
                done[k] = true;
                continue;
            }
            let at_noise = abs_c(&p) <= Float::with_val(53, &noise * &horner_bound(&abs_a, &z[k]));
            let ratio = Complex::with_val(prec, &p / &dp);
            let mut s = Complex::new(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    let d = Complex::with_val(prec, &z[k] - zj);
                    s += d.recip();
                }
            }
            let mut denom = Complex::with_val(prec, &ratio * &s);
            denom = -denom + 1u32;
            let w = if denom.real().is_zero() && denom.imag().is_zero() {
                ratio
            } else {
                ratio / denom
            };
            if !w.real().is_finite() || !w.imag().is_finite() {
                done[k] = true;
                continue;
            }
            z[k] -= &w;
            let size = abs_c(&w);
            let zmag = abs_c(&z[k]).max(&Float::with_val(prec, 1));
            if at_noise || size <= Float::with_val(prec, &tol * &zmag) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn cluster(mut roots: Vec<Complex>, prec: u32) -> Vec<Root> {
    let tol = mp::pow2(prec, -(prec as i32) / 4).to_f64();
    roots.sort_by(|x, y| {
        let (a, b) = (mp::to_c64(x), mp::to_c64(y));
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    let mut out: Vec<(Vec<Complex>, num_complex::Complex64)> = Vec::new();
    for r in roots {
        let r64 = mp::to_c64(&r);
        if let Some(group) = out.iter_mut().find(|(_, c)| (c - r64).norm() <= tol * (1.0 + c.norm())) {
            group.0.push(r);
        } else {
            out.push((vec![r], r64));
        }
    }
    out.into_iter()
        .map(|(members, _)| {
            let m = members.len();
            let mut mean = Complex::new(prec);
            for v in &members {
                mean += v;
            }
            mean /= m as u32;
            Root {
                value: mean,
                multiplicity: m,
            }
        })
        .collect()
}
