//! One line per acceptance criterion; exits nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use chebpade::chebseries::{cheb_coeffs, FunctionSpec, PolyBasis};
use chebpade::cpade::Scheme;
use chebpade::cpade::{baker, frobenius, BakerOptions, RationalApproximant};
use chebpade::equilibrium::{solve_equilibrium, CompactDescriptor};
use chebpade::harness::{build_approximants, default_n_list, markov_theorem_a_suite, HarnessConfig};
use chebpade::mp;
use chebpade::scompact::{evaluate_arc, find_stationary_compact, rho_index, SearchConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed.as_secs_f64() > limit_s as f64 {
        return Err(format!(
            "runtime {:.1} s over the {limit_s} s budget",
            elapsed.as_secs_f64()
        ));
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let k = CompactDescriptor::real_segment(2.0, 3.0).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for theta in [0.0, 1.0, 3.0] {
        let eq = solve_equilibrium(&k, theta, 256).map_err(|e| e.to_string())?;
        let residual = (0..=1000)
            .map(|i| {
                let x = -(std::f64::consts::PI * i as f64 / 1000.0).cos();
                (eq.mixed_potential(Complex64::new(x, 0.0)) - eq.w).abs()
            })
            .fold(eq.residual, f64::max);
        let j = eq.measure.integrate(|z| eq.mixed_potential(z));
        let energy_gap = (eq.energy - eq.w).abs().max((j - eq.w).abs());
        let oracle = common::equilibrium_constant_oracle(2.0, 3.0, theta);
        let gap = (eq.w - oracle).abs();
        ok &= residual <= 1e-6 && energy_gap <= 1e-6 && gap <= 1e-6;
        lines.push(format!(
            "θ={theta}: residual {residual:.1e}, |J−w| {energy_gap:.1e}, |w−w_pg| {gap:.1e}"
        ));
    }
    within(start.elapsed(), 60)?;
    check(ok, lines.join("; "))
}

fn normalized(p: &[Rational], q: &[Rational], prec: u32) -> (Vec<Float>, Vec<Float>) {
    let pf: Vec<Float> = p.iter().map(|x| Float::with_val(prec, x)).collect();
    let qf: Vec<Float> = q.iter().map(|x| Float::with_val(prec, x)).collect();
    let norm = mp::norm2(&qf);
    let lead = qf.iter().rev().find(|x| !x.is_zero()).expect("nonzero q");
    let s = if lead.is_sign_negative() { -norm } else { norm };
    let scale = |v: Vec<Float>| v.into_iter().map(|x| Float::with_val(prec, x / &s)).collect();
    (scale(pf), scale(qf))
}

fn recovery_error(r: &RationalApproximant, p: &[f64], q: &[f64], prec: u32) -> f64 {
    let (pe, qe) = normalized(
        &common::monomial_to_chebyshev(p),
        &common::monomial_to_chebyshev(q),
        prec,
    );
    r.p.iter()
        .zip(&pe)
        .chain(r.q.iter().zip(&qe))
        .map(|(a, b)| Float::with_val(prec, a - b).abs().to_f64())
        .fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let prec = 256;
    let bound = 2f64.powi(-200);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let l = rng.gen_range(0..=6);
        let m = rng.gen_range(1..=6);
        let (p, q) = common::random_rational(&mut rng, l, m);
        let spec = FunctionSpec::Rational {
            p: p.clone(),
            q: q.clone(),
            basis: PolyBasis::Monomial,
        };
        let s = cheb_coeffs(&spec, l + 2 * m, prec).map_err(|e| e.to_string())?;
        let fr = frobenius(&s, l, m).map_err(|e| e.to_string())?.approximant;
        let bk = baker(&s, l, m, &BakerOptions::default())
            .map_err(|e| e.to_string())?
            .found()
            .ok_or(format!("case {case}: no nonlinear approximant of type ({l},{m})"))?;
        for r in [&fr, &bk] {
            worst = worst.max(recovery_error(r, &p, &q, prec)).max(r.residual);
        }
    }
    within(start.elapsed(), 30)?;
    check(
        worst < bound,
        format!("worst coefficient error {worst:.1e} (bound 2^-200 = {bound:.1e})"),
    )
}

fn criteria_3_and_4() -> (Outcome, Outcome) {
    let start = Instant::now();
    let cfg = HarnessConfig::default();
    let suite = match markov_theorem_a_suite(2.0, 3.0, &default_n_list(40), &cfg) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let elapsed = start.elapsed();

    let c3 = (|| {
        within(elapsed, 600)?;
        let fr = &suite.frobenius.rates;
        fr.check_filter(cfg.filter_limit_pct).map_err(|e| e.to_string())?;
        let dev_fr = fr
            .deviations_at(40)
            .ok_or("no Frobenius approximant at n = 40")?
            .into_iter()
            .fold(0.0, f64::max);
        let bk = &suite.baker.rates;
        bk.check_filter(cfg.filter_limit_pct).map_err(|e| e.to_string())?;
        let total = bk.n_list.len();
        let existing = total - suite.baker_nonexistent.len();
        let share = existing as f64 / total as f64;
        let top = bk
            .n_list
            .iter()
            .rev()
            .copied()
            .find(|n| !suite.baker_nonexistent.contains(n))
            .ok_or("no nonlinear approximant exists")?;
        let dev_bk = bk
            .deviations_at(top)
            .ok_or("missing deviations")?
            .into_iter()
            .fold(0.0, f64::max);
        check(
            dev_fr <= 0.05 && dev_bk <= 0.05 && share >= 0.6,
            format!(
                "Frobenius n=40 max dev {dev_fr:.4} ({:.1}% excluded); Baker n={top} max dev {dev_bk:.4}, {existing}/{total} exist ({:.1}% excluded); {:.0} s",
                fr.excluded_pct(),
                bk.excluded_pct(),
                elapsed.as_secs_f64()
            ),
        )
    })();

    let c4 = (|| {
        let p = &suite.frobenius.poles;
        let at40 = p.at(40).ok_or("no pole set at n = 40")?;
        let rho = p.spearman.ok_or("Spearman undefined")?;
        let first = p.sets.first().ok_or("no pole sets")?;
        check(
            rho < 0.0 && at40.distance <= 0.1 && at40.near_fraction >= 0.9,
            format!(
                "KS {:.4} (n={}) → {:.4} (n=40), Spearman {rho:.3}, near fraction {:.3}",
                first.distance, first.n, at40.distance, at40.near_fraction
            ),
        )
    })();
    (c3, c4)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::default();
    let i = Complex64::new(0.0, 1.0);
    let spec = FunctionSpec::sqrt_pair(i);
    let mut lines = Vec::new();
    let mut ok = true;
    for theta in [1.0, 3.0] {
        let r = find_stationary_compact(&spec, theta, &cfg).map_err(|e| e.to_string())?;
        let side = [-0.3, 0.3]
            .iter()
            .map(|&u| evaluate_arc(i, u, theta, &cfg).map(|(_, s)| s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let ratio = side.iter().copied().fold(f64::INFINITY, f64::min) / r.s_residual;
        ok &= r.optimal_param.abs() <= 1e-4 && r.s_residual <= 1e-3 && ratio >= 10.0;
        lines.push(format!(
            "b=i θ={theta}: u* {:.1e}, S {:.1e}, S(±0.3)/S(u*) {ratio:.0}",
            r.optimal_param, r.s_residual
        ));
    }
    let rho = rho_index(&spec);
    ok &= (rho - (1.0 + 2f64.sqrt())).abs() < 1e-12 && rho > 2f64.sqrt();
    lines.push(format!("ρ(f) {rho:.12}"));
    let b = Complex64::new(0.3, 1.0);
    let spec = FunctionSpec::sqrt_pair(b);
    let r1 = find_stationary_compact(&spec, 1.0, &cfg).map_err(|e| e.to_string())?;
    let r3 = find_stationary_compact(&spec, 3.0, &cfg).map_err(|e| e.to_string())?;
    let interior = |r: &chebpade::scompact::StationaryCompactReport| {
        r.optimal_param > r.u_range.0 + 1e-3 && r.optimal_param < r.u_range.1 - 1e-3
    };
    ok &= interior(&r1) && interior(&r3) && (r1.optimal_param - r3.optimal_param).abs() > 1e-3;
    lines.push(format!(
        "b=0.3+i: u*(1) {:.5}, u*(3) {:.5}",
        r1.optimal_param, r3.optimal_param
    ));
    within(start.elapsed(), 900)?;
    check(ok, lines.join("; "))
}

fn criterion_6() -> Outcome {
    let b = Complex64::new(0.3, 1.0);
    let spec = FunctionSpec::sqrt_pair(b);
    let r = find_stationary_compact(&spec, 3.0, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let cfg = HarnessConfig::default();
    let table = build_approximants(&spec, Scheme::Frobenius, &[40], cfg.precision_bits, &cfg.baker)
        .map_err(|e| e.to_string())?;
    let approx = table[0].approximant.as_ref().ok_or("Φ_40 does not exist")?;
    let poles = approx.pole_list();
    let near = poles.iter().filter(|&&p| r.f.distance(p) <= 0.05).count();
    let frac = near as f64 / poles.len() as f64;
    let far = poles.iter().map(|&p| r.f.distance(p)).fold(0.0, f64::max);
    check(
        frac >= 0.8,
        format!(
            "{near}/{} poles within 0.05 of F(3) (u* = {:.5}); farthest {far:.3}",
            poles.len(),
            r.optimal_param
        ),
    )
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn manifest_without_clock(bytes: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

fn criterion_7() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let runs = [
        ("markov_2_3.toml", "coeffs"),
        ("markov_2_3.toml", "approx"),
        ("markov_2_3.toml", "equilibrium"),
        ("markov_2_3.toml", "verify"),
        ("sqrt_pair.toml", "scompact"),
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (config, command) in runs {
        let mut trees = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{command}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_chebpade"))
                .arg(command)
                .arg("--config")
                .arg(root.join(config))
                .arg("--output")
                .arg(&out)
                .stderr(std::process::Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{command} on {config} exited with {status}"));
            }
            trees.push(read_dir(&out));
        }
        let (a, b) = (&trees[0], &trees[1]);
        if a.keys().ne(b.keys()) {
            return Err(format!("{command}: file sets differ"));
        }
        for (name, bytes) in a {
            if name == "manifest.json" {
                if manifest_without_clock(bytes) != manifest_without_clock(&b[name]) {
                    return Err(format!("{command}: manifests differ"));
                }
                let m = manifest_without_clock(bytes);
                for f in m["files"].as_array().unwrap() {
                    let path = f["path"].as_str().unwrap();
                    let digest = common_sha256(&a[path]);
                    if f["sha256"].as_str() != Some(digest.as_str()) {
                        return Err(format!("{command}: manifest hash of {path} does not match"));
                    }
                }
            } else if bytes != &b[name] {
                return Err(format!("{command}: {name} differs between runs"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} artifacts identical across two runs, manifest hashes verified"
    ))
}

fn common_sha256(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

fn main() {
    let mut results: Vec<(u32, Outcome)> = vec![(1, criterion_1()), (2, criterion_2())];
    let (c3, c4) = criteria_3_and_4();
    results.push((3, c3));
    results.push((4, c4));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    results.push((7, criterion_7()));
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL  {msg}")
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
