use anyhow::{bail, Context, Result};
use chebpade::chebseries::{cheb_coeffs, ChebSeries, FunctionSpec};
use chebpade::cpade::{baker, frobenius, BakerOutcome, Scheme};
use chebpade::equilibrium::{solve_equilibrium, CompactDescriptor};
use chebpade::harness::{
    build_approximants, measure_rates_with, pole_distribution_with, PoleDistributionReport, RateReport,
};
use chebpade::scompact::find_stationary_compact;
use chebpade::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::output::Output;

fn theta_tag(theta: f64) -> String {
    format!("theta{theta}")
}

pub fn coeffs(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let s = cheb_coeffs(&cfg.function, cfg.degree, cfg.precision_bits).context("coeffs")?;
    out.write("coeffs.json", &(s.to_json()? + "\n"))
}

fn approx_types(cfg: &ExperimentConfig) -> Result<Vec<(usize, usize)>> {
    let mut types: Vec<(usize, usize)> = cfg.types.iter().map(|t| (t[0], t[1])).collect();
    types.extend(cfg.n_list.iter().map(|&n| (n - 1, n)));
    if types.is_empty() {
        bail!(Error::Parse("approx needs `types` or `n_list`".into()));
    }
    Ok(types)
}

pub fn approx(cfg: &ExperimentConfig, base: &Path, out: &mut Output) -> Result<()> {
    let types = approx_types(cfg)?;
    let series = match &cfg.series {
        Some(p) => {
            let p = base.join(p);
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading series {}", p.display()))?;
            ChebSeries::from_json(&text).context("approx: series file")?
        }
        None => {
            let degree = types.iter().map(|&(l, m)| l + 2 * m).max().unwrap_or(0);
            cheb_coeffs(&cfg.function, degree, cfg.precision_bits).context("approx: coefficients")?
        }
    };
    for scheme in cfg.schemes()? {
        let results: Vec<Result<(String, String)>> = types
            .par_iter()
            .map(|&(l, m)| -> Result<(String, String)> {
                let ctx = || format!("approx: {scheme} of type ({l}, {m})");
                match scheme {
                    Scheme::Frobenius => {
                        let r = frobenius(&series, l, m).with_context(ctx)?;
                        Ok((format!("approx_frobenius_{l}_{m}.json"), r.approximant.to_json()?))
                    }
                    Scheme::Baker => match baker(&series, l, m, &cfg.harness.baker).with_context(ctx)? {
                        BakerOutcome::Found(r) => Ok((format!("approx_baker_{l}_{m}.json"), r.to_json()?)),
                        BakerOutcome::Nonexistent(rep) => Ok((
                            format!("nonexistence_baker_{l}_{m}.json"),
                            serde_json::to_string_pretty(&rep)?,
                        )),
                    },
                }
            })
            .collect();
        for r in results {
            let (name, text) = r?;
            out.write(&name, &(text + "\n"))?;
        }
    }
    Ok(())
}

fn fixed_compact(cfg: &ExperimentConfig) -> Result<Option<CompactDescriptor>> {
    if let FunctionSpec::MarkovUniform { c, d } = cfg.function {
        return Ok(Some(CompactDescriptor::real_segment(c, d)?));
    }
    Ok(cfg.compact)
}

/// `F(θ)`: the configured compact, the Markov segment or the search result.
fn compact_for(cfg: &ExperimentConfig, theta: f64) -> Result<CompactDescriptor> {
    if let Some(k) = fixed_compact(cfg)? {
        return Ok(k);
    }
    let r = find_stationary_compact(&cfg.function, theta, &cfg.search).context("scompact")?;
    Ok(r.f)
}

pub fn equilibrium(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let Some(k) = fixed_compact(cfg)? else {
        bail!(Error::Parse(
            "equilibrium needs a [compact] table unless the function is a Markov function".into()
        ));
    };
    for theta in cfg.theta_values()? {
        let eq = solve_equilibrium(&k, theta, cfg.panels).context("equilibrium")?;
        let tag = theta_tag(theta);
        out.write_json(&format!("equilibrium_{tag}.json"), &eq)?;
        out.write(&format!("equilibrium_{tag}.csv"), &eq.measure.to_csv())?;
    }
    Ok(())
}

pub fn scompact(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    for theta in cfg.theta_values()? {
        let r = find_stationary_compact(&cfg.function, theta, &cfg.search).context("scompact")?;
        let tag = theta_tag(theta);
        out.write_json(&format!("scompact_{tag}.json"), &r)?;
        out.write(&format!("scompact_{tag}_scan.csv"), &r.scan_csv())?;
    }
    Ok(())
}

struct Run {
    scheme: Scheme,
    theta: f64,
    rates: RateReport,
    poles: PoleDistributionReport,
}

fn run_reports(cfg: &ExperimentConfig, with_rates: bool) -> Result<Vec<Run>> {
    let n_list = cfg.n_list();
    let h = &cfg.harness;
    let mut runs = Vec::new();
    for (scheme, theta) in cfg.runs()? {
        let f = compact_for(cfg, theta)?;
        let lambda = solve_equilibrium(&f, theta, cfg.panels).context("equilibrium")?.measure;
        let table = build_approximants(&cfg.function, scheme, &n_list, h.precision_bits, &h.baker)
            .with_context(|| format!("approximants ({scheme})"))?;
        let points = if with_rates { h.test_points(&f) } else { vec![] };
        let rates = measure_rates_with(&cfg.function, scheme, theta, &f, &lambda, &table, &points, h)
            .context("harness: rates")?;
        let poles = pole_distribution_with(scheme, theta, &f, &lambda, &table, h).context("harness: poles")?;
        runs.push(Run {
            scheme,
            theta,
            rates,
            poles,
        });
    }
    Ok(runs)
}

fn poles_csv(r: &PoleDistributionReport) -> String {
    let mut out = String::from("n,re,im\n");
    for set in &r.sets {
        for p in &set.poles {
            let _ = writeln!(out, "{},{:e},{:e}", set.n, p.re, p.im);
        }
    }
    out
}

pub fn poles(cfg: &ExperimentConfig, out: &mut Output) -> Result<()> {
    for run in run_reports(cfg, false)? {
        let stem = format!("poles_{}_{}", run.scheme, theta_tag(run.theta));
        out.write_json(&format!("{stem}.json"), &run.poles)?;
        out.write(&format!("{stem}.csv"), &poles_csv(&run.poles))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn check(name: String, value: f64, threshold: f64, pass: bool) -> Check {
    Check {
        name,
        value,
        threshold,
        pass,
    }
}

fn run_checks(run: &Run, cfg: &ExperimentConfig) -> Vec<Check> {
    let h = &cfg.harness;
    let label = format!("{}/{}", run.scheme, theta_tag(run.theta));
    let mut checks = Vec::new();
    let r = &run.rates;
    let existing = r.n_list.len() - r.skipped.len();
    if run.scheme == Scheme::Baker {
        let share = existing as f64 / r.n_list.len().max(1) as f64;
        checks.push(check(
            format!("{label}: existing indices share"),
            share,
            0.6,
            share >= 0.6,
        ));
    }
    let pct = r.excluded_pct();
    checks.push(check(
        format!("{label}: capacity filter exclusions (%)"),
        pct,
        h.filter_limit_pct,
        pct <= h.filter_limit_pct,
    ));
    if r.exact_regime {
        return checks;
    }
    let top = r
        .n_list
        .iter()
        .rev()
        .find(|&&n| !r.skipped.iter().any(|s| s.0 == n))
        .copied();
    if let Some(dev) = top.and_then(|n| r.deviations_at(n)) {
        let worst = dev.iter().map(|d| d.abs()).fold(0.0, f64::max);
        checks.push(check(
            format!("{label}: max |observed/predicted - 1| at n = {}", top.unwrap_or(0)),
            worst,
            h.rate_tolerance,
            worst <= h.rate_tolerance,
        ));
    }
    let p = &run.poles;
    if let Some(rho) = p.spearman {
        checks.push(check(format!("{label}: Spearman(distance, n)"), rho, 0.0, rho < 0.0));
    }
    if let Some(last) = p.sets.last() {
        checks.push(check(
            format!("{label}: pole distance to balayage at n = {}", last.n),
            last.distance,
            0.1,
            last.distance <= 0.1,
        ));
        checks.push(check(
            format!("{label}: share of poles near F at n = {}", last.n),
            last.near_fraction,
            0.9,
            last.near_fraction >= 0.9,
        ));
    }
    checks
}

/// Writes the reports and returns whether every check passed.
pub fn verify(cfg: &ExperimentConfig, out: &mut Output) -> Result<bool> {
    let mut checks = Vec::new();
    for run in run_reports(cfg, true)? {
        let stem = format!("{}_{}", run.scheme, theta_tag(run.theta));
        out.write_json(&format!("rates_{stem}.json"), &run.rates)?;
        out.write(&format!("rates_{stem}.csv"), &run.rates.to_csv())?;
        out.write_json(&format!("poles_{stem}.json"), &run.poles)?;
        checks.extend(run_checks(&run, cfg));
    }
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{} {} = {:.6e} (threshold {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold
        );
    }
    out.write_json("verify_summary.json", &VerifySummary { checks, pass })?;
    Ok(pass)
}
