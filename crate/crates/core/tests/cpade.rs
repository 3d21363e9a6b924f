mod common;

use chebpade::chebseries::{cheb_coeffs, ChebSeries, FunctionSpec, PolyBasis};
use chebpade::cpade::{baker, frobenius, BakerOptions, BakerOutcome, RationalApproximant, Scheme};
use chebpade::mp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

fn to_float(prec: u32, r: &Rational) -> Float {
    Float::with_val(prec, r)
}

fn max_diff(a: &[Float], b: &[Float]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| Float::with_val(x.prec(), x - y).abs().to_f64())
        .fold(0.0, f64::max)
}

/// `(p, q)` scaled to `‖q‖₂ = 1`, highest `q` coefficient positive.
fn normalized_exact(p: &[Rational], q: &[Rational], prec: u32) -> (Vec<Float>, Vec<Float>) {
    let pf: Vec<Float> = p.iter().map(|x| to_float(prec, x)).collect();
    let qf: Vec<Float> = q.iter().map(|x| to_float(prec, x)).collect();
    let norm = mp::norm2(&qf);
    let lead = qf.iter().rev().find(|x| !x.is_zero()).expect("nonzero q");
    let s = if lead.is_sign_negative() { -norm } else { norm };
    (
        pf.iter().map(|x| Float::with_val(prec, x / &s)).collect(),
        qf.iter().map(|x| Float::with_val(prec, x / &s)).collect(),
    )
}

#[test]
fn frobenius_matches_exact_elimination() {
    let prec = 512;
    let (l, m) = (3, 4);
    let n = l + 2 * m + 1;
    // dyadic coefficients, exact in binary
    let a: Vec<f64> = (0..n)
        .map(|k| 0.5f64.powi(k as i32) + ((k % 3) as f64) * (-0.25f64).powi(k as i32))
        .collect();
    let series = ChebSeries::from_f64(&a, prec).unwrap();
    let exact: Vec<Rational> = a.iter().map(|&x| Rational::from_f64(x).unwrap()).collect();
    let (p, q) = common::exact_frobenius(&exact, l, m);
    let (pe, qe) = normalized_exact(&p, &q, prec);
    let r = frobenius(&series, l, m).unwrap();
    assert!(!r.is_multiple());
    let tol = 1e-100;
    assert!(max_diff(&r.approximant.q, &qe) < tol);
    assert!(max_diff(&r.approximant.p, &pe) < tol);
}

fn check_recovery(r: &RationalApproximant, p: &[f64], q: &[f64], prec: u32) -> f64 {
    let pc = common::monomial_to_chebyshev(p);
    let qc = common::monomial_to_chebyshev(q);
    let (pe, qe) = normalized_exact(&pc, &qc, prec);
    max_diff(&r.p, &pe).max(max_diff(&r.q, &qe))
}

#[test]
fn random_rationals_are_recovered_by_both_schemes() {
    let prec = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bound = 2f64.powi(-200);
    for _ in 0..6 {
        let l = rng.gen_range(0..=6);
        let m = rng.gen_range(1..=6);
        let (p, q) = common::random_rational(&mut rng, l, m);
        let spec = FunctionSpec::Rational {
            p: p.clone(),
            q: q.clone(),
            basis: PolyBasis::Monomial,
        };
        let s = cheb_coeffs(&spec, l + 2 * m, prec).unwrap();
        let fr = frobenius(&s, l, m).unwrap().approximant;
        assert!(check_recovery(&fr, &p, &q, prec) < bound, "frobenius ({l},{m})");
        let bk = baker(&s, l, m, &BakerOptions::default())
            .unwrap()
            .found()
            .expect("exists");
        assert_eq!(bk.scheme, Scheme::Baker);
        assert!(check_recovery(&bk, &p, &q, prec) < bound, "baker ({l},{m})");
        assert!(bk.residual < bound);
    }
}

/// `c_k(P/Q)` by the trapezoid rule on `[0, π]` at working precision.
fn trapezoid_coeffs_mp(r: &RationalApproximant, kmax: usize, n: usize) -> Vec<Float> {
    let prec = r.precision_bits;
    let pi = mp::pi(prec);
    let vals: Vec<(Float, Float)> = (0..=n)
        .map(|j| {
            let t = Float::with_val(prec, &pi * j as u32) / n as u32;
            let v = r.eval_real(&t.clone().cos());
            (t, v)
        })
        .collect();
    (0..=kmax)
        .map(|k| {
            let mut s = Float::new(prec);
            for (j, (t, v)) in vals.iter().enumerate() {
                let mut term = Float::with_val(prec, t * k as u32).cos() * v;
                if j == 0 || j == n {
                    term /= 2u32;
                }
                s += term;
            }
            s *= 2u32;
            s /= n as u32;
            if k == 0 {
                s /= 2u32;
            }
            s
        })
        .collect()
}

#[test]
fn baker_matches_coefficients_under_independent_quadrature() {
    let prec = 256;
    let (l, m) = (3, 4);
    let s = cheb_coeffs(&FunctionSpec::markov(2.0, 3.0), l + 2 * m, prec).unwrap();
    let r = baker(&s, l, m, &BakerOptions::default()).unwrap().found().unwrap();
    let c = trapezoid_coeffs_mp(&r, l + m, 3000);
    let err = max_diff(&c, &s.coeffs()[..=l + m]);
    assert!(err < 1e-60, "{err:e}");
    // the linear approximant does not share this property
    let fr = frobenius(&s, l, m).unwrap().approximant;
    let cf = trapezoid_coeffs_mp(&fr, l + m, 3000);
    assert!(max_diff(&cf, &s.coeffs()[..=l + m]) > 1e-20);
}

#[test]
fn odd_function_has_no_nonlinear_approximant_of_type_0_1() {
    // c_0(p/q) = 0 forces p = 0, so c_1 = 1 cannot be matched
    let s = ChebSeries::from_f64(&[0.0, 1.0, 0.0], 128).unwrap();
    match baker(&s, 0, 1, &BakerOptions::default()).unwrap() {
        BakerOutcome::Nonexistent(rep) => {
            assert_eq!((rep.l, rep.m), (0, 1));
            assert!(!rep.attempts.is_empty());
        }
        BakerOutcome::Found(r) => panic!("unexpected approximant with q = {:?}", r.q),
    }
    let lin = frobenius(&s, 0, 1).unwrap().approximant;
    assert!(lin.has_pole_on_e(1e-12));
}

#[test]
fn approximant_json_round_trip() {
    let s = cheb_coeffs(&FunctionSpec::markov(2.0, 3.0), 14, 256).unwrap();
    let r = frobenius(&s, 4, 5).unwrap().approximant;
    let text = r.to_json().unwrap();
    let back = RationalApproximant::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    assert_eq!((back.l, back.m), (4, 5));
}

#[test]
fn markov_poles_lie_on_the_support() {
    let s = cheb_coeffs(&FunctionSpec::markov(2.0, 3.0), 3 * 12 - 1, 256).unwrap();
    let r = frobenius(&s, 11, 12).unwrap().approximant;
    let poles = r.pole_list();
    assert_eq!(poles.len(), 12);
    for p in poles {
        assert!(p.im.abs() < 1e-30 && p.re > 2.0 - 1e-12 && p.re < 3.0 + 1e-12, "{p}");
    }
}

#[test]
fn simple_pole_is_recovered_by_the_linear_scheme() {
    let spec = FunctionSpec::Rational {
        p: vec![1.0],
        q: vec![-2.0, 1.0],
        basis: PolyBasis::Monomial,
    };
    let s = cheb_coeffs(&spec, 2, 256).unwrap();
    let r = frobenius(&s, 0, 1).unwrap();
    assert!(check_recovery(&r.approximant, &[1.0], &[-2.0, 1.0], 256) < 1e-70);
    assert!(r.approximant.residual < 1e-70);
}

#[test]
fn markov_type_1_2_matches_exact_rational_solve() {
    let prec = 256;
    let (l, m) = (1, 2);
    let s = cheb_coeffs(&FunctionSpec::markov(2.0, 3.0), l + 2 * m, prec).unwrap();
    let exact: Vec<Rational> = s.coeffs().iter().map(|x| x.to_rational().unwrap()).collect();
    let (p, q) = common::exact_frobenius(&exact, l, m);
    let (pe, qe) = normalized_exact(&p, &q, prec);
    let r = frobenius(&s, l, m).unwrap().approximant;
    assert!(max_diff(&r.q, &qe) < 1e-20);
    assert!(max_diff(&r.p, &pe) < 1e-20);
}

/// `c_0, c_1` of `1/(cos φ + sin φ · x)` by Chebyshev–Gauss quadrature.
fn reciprocal_coeffs(phi: f64) -> (f64, f64) {
    let n = 4000;
    let (mut c0, mut c1) = (0.0, 0.0);
    for j in 0..n {
        let t = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
        let v = 1.0 / (phi.cos() + phi.sin() * t.cos());
        c0 += v;
        c1 += v * t.cos();
    }
    (c0 / n as f64, 2.0 * c1 / n as f64)
}

#[test]
fn markov_type_0_1_matches_brute_force_search() {
    let s = cheb_coeffs(&FunctionSpec::markov(2.0, 3.0), 2, 256).unwrap();
    let (a0, a1) = (s.coeffs()[0].to_f64(), s.coeffs()[1].to_f64());
    // q = cos φ T_0 + sin φ T_1 is pole-free on E for |φ| < π/4, φ ∈ (0, π) mod π
    let mismatch = |phi: f64| {
        let (c0, c1) = reciprocal_coeffs(phi);
        c1 * a0 - c0 * a1
    };
    let admissible = |phi: f64| phi.cos().abs() > phi.sin().abs() * (1.0 + 1e-6);
    let grid: Vec<f64> = (1..4000).map(|i| std::f64::consts::PI * i as f64 / 4000.0).filter(|&p| admissible(p)).collect();
    let bracket = grid
        .windows(2)
        .find(|w| w[1] - w[0] < 1e-3 && mismatch(w[0]).signum() != mismatch(w[1]).signum())
        .expect("sign change");
    let (mut lo, mut hi) = (bracket[0], bracket[1]);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mismatch(lo).signum() == mismatch(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    let p0 = a0 / reciprocal_coeffs(phi).0;
    let r = baker(&s, 0, 1, &BakerOptions::default()).unwrap().found().unwrap();
    let got = [r.p[0].to_f64(), r.q[0].to_f64(), r.q[1].to_f64()];
    let want = [p0, phi.cos(), phi.sin()];
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
    }
}

#[test]
fn sqrt_pair_nonlinear_outcomes_are_consistent() {
    let s = cheb_coeffs(&FunctionSpec::sqrt_pair(num_complex::Complex64::new(0.3, 1.0)), 3 * 8 - 1, 256).unwrap();
    for n in 2..=8 {
        let f = s.truncated(3 * n - 1);
        let seed_on_e = frobenius(&f, n - 1, n).unwrap().approximant.has_pole_on_e(1e-8);
        match baker(&f, n - 1, n, &BakerOptions::default()).unwrap() {
            BakerOutcome::Found(r) => {
                assert!(!r.has_pole_on_e(1e-8), "n = {n}");
                assert!(r.residual < 1e-50, "n = {n}: residual {}", r.residual);
                eprintln!("n = {n}: found (linear seed pole on E: {seed_on_e})");
            }
            BakerOutcome::Nonexistent(rep) => {
                assert!(!rep.attempts.is_empty());
                eprintln!("n = {n}: nonexistent after {} seeds (linear seed pole on E: {seed_on_e})", rep.attempts.len());
            }
        }
    }
}
