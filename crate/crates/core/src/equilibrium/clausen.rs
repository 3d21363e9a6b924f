//! Clausen functions `Cl_2(θ) = Σ sin(kθ)/k²` and `Cl_3(θ) = Σ cos(kθ)/k³`.
//!
//! Both are evaluated from their expansions about `θ = 0` after reduction
//! to `[-π, π]`; the coefficients `ζ(2n)/(2π)^{2n}` decay like `4^{-n}`
//! there.

use std::f64::consts::PI;
use std::sync::OnceLock;

const ZETA3: f64 = 1.202_056_903_159_594_3;
const TERMS: usize = 30;

// ζ(2n)/(2π)^{2n}, n = 1..=TERMS
fn coefficients() -> &'static [f64; TERMS] {
    static C: OnceLock<[f64; TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; TERMS];
        let two_pi_sq = (2.0 * PI) * (2.0 * PI);
        let closed = [
            PI.powi(2) / 6.0,
            PI.powi(4) / 90.0,
            PI.powi(6) / 945.0,
            PI.powi(8) / 9450.0,
            PI.powi(10) / 93555.0,
        ];
        for (i, ci) in c.iter_mut().enumerate() {
            let n = i + 1;
            let zeta = if n <= closed.len() {
                closed[n - 1]
            } else {
                (1..200).map(|k| (k as f64).powi(-2 * n as i32)).sum()
            };
            *ci = zeta / two_pi_sq.powi(n as i32);
        }
        c
    })
}

fn reduce(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

pub fn cl2(theta: f64) -> f64 {
    let t = reduce(theta);
    if t == 0.0 {
        return 0.0;
    }
    let c = coefficients();
    let t2 = t * t;
    let mut pow = t * t2;
    let mut s = 0.0;
    for (i, ci) in c.iter().enumerate() {
        let n = (i + 1) as f64;
        let term = ci * pow / (n * (2.0 * n + 1.0));
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
        pow *= t2;
    }
    t - t * t.abs().ln() + s
}

pub fn cl3(theta: f64) -> f64 {
    let t = reduce(theta);
    if t == 0.0 {
        return ZETA3;
    }
    let c = coefficients();
    let t2 = t * t;
    let mut pow = t2 * t2;
    let mut s = 0.0;
    for (i, ci) in c.iter().enumerate() {
        let n = (i + 1) as f64;
        let term = ci * pow / (n * (2.0 * n + 1.0) * (2.0 * n + 2.0));
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
        pow *= t2;
    }
    ZETA3 - 0.75 * t2 + 0.5 * t2 * t.abs().ln() - s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl2_series(t: f64) -> f64 {
        // slowly convergent; tail ~ 1/K^2 is averaged out by a long sum
        (1..2_000_000).map(|k| (k as f64 * t).sin() / (k as f64).powi(2)).sum()
    }

    fn cl3_series(t: f64) -> f64 {
        (1..200_000).map(|k| (k as f64 * t).cos() / (k as f64).powi(3)).sum()
    }

    #[test]
    fn matches_fourier_series() {
        for t in [0.1, 0.7, 1.5, 2.9, -2.0, 4.0, 7.5] {
            assert!((cl2(t) - cl2_series(t)).abs() < 1e-6, "cl2({t})");
            assert!((cl3(t) - cl3_series(t)).abs() < 1e-9, "cl3({t})");
        }
    }

    #[test]
    fn known_values() {
        // Cl_2(π/2) is Catalan's constant.
        assert!((cl2(PI / 2.0) - 0.915_965_594_177_219).abs() < 1e-14);
        // Cl_3(π) = -3/4 ζ(3)
        assert!((cl3(PI) + 0.75 * ZETA3).abs() < 1e-14);
        assert!(cl2(PI).abs() < 1e-14);
    }

    #[test]
    fn derivative_relation() {
        let h = 1e-5;
        for t in [0.3, 1.1, 2.5] {
            let d = (cl3(t + h) - cl3(t - h)) / (2.0 * h);
            assert!((d + cl2(t)).abs() < 1e-9);
        }
    }
}
