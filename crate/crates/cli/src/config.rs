use anyhow::{bail, Context, Result};
use chebpade::chebseries::FunctionSpec;
use chebpade::cpade::Scheme;
use chebpade::equilibrium::CompactDescriptor;
use chebpade::harness::HarnessConfig;
use chebpade::scompact::SearchConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// An experiment, read from TOML.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub function: FunctionSpec,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<String>,
    /// One `θ` per scheme; defaults to 3 for the linear and 1 for the
    /// nonlinear scheme.
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub n_list: Vec<usize>,
    /// Explicit `[L, M]` types for `approx`, in addition to `n_list`.
    #[serde(default)]
    pub types: Vec<[usize; 2]>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    /// Truncation degree for `coeffs`.
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Coefficient file used by `approx` instead of recomputing the series.
    #[serde(default)]
    pub series: Option<PathBuf>,
    #[serde(default = "default_panels")]
    pub panels: usize,
    /// Compact for `equilibrium`; otherwise the segment of a Markov function
    /// or the result of the compact search.
    #[serde(default)]
    pub compact: Option<CompactDescriptor>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub harness: HarnessConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_schemes() -> Vec<String> {
    vec!["frobenius".into(), "baker".into()]
}

fn default_precision() -> u32 {
    chebpade::mp::DEFAULT_PRECISION
}

fn default_degree() -> usize {
    80
}

fn default_panels() -> usize {
    256
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| chebpade::Error::Parse(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok((cfg, text))
    }

    pub fn validate(&self) -> Result<()> {
        self.function.validate()?;
        let schemes = self.schemes()?;
        if !self.thetas.is_empty() && self.thetas.len() != schemes.len() {
            bail!(chebpade::Error::Parse(format!(
                "{} thetas given for {} schemes",
                self.thetas.len(),
                schemes.len()
            )));
        }
        if let Some(t) = self.thetas.iter().find(|t| !(**t >= 0.0)) {
            bail!(chebpade::Error::Parse(format!("theta = {t} must be nonnegative")));
        }
        if self.n_list.contains(&0) {
            bail!(chebpade::Error::Parse("n_list entries must be positive".into()));
        }
        if self.precision_bits < 64 {
            bail!(chebpade::Error::Parse(format!(
                "precision_bits = {} is below 64",
                self.precision_bits
            )));
        }
        if let Some(k) = &self.compact {
            k.validate()?;
            if matches!(self.function, FunctionSpec::MarkovUniform { .. }) {
                bail!(chebpade::Error::Parse(
                    "a Markov function fixes its compact; drop the [compact] table".into()
                ));
            }
        }
        Ok(())
    }

    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        self.schemes
            .iter()
            .map(|s| s.parse::<Scheme>().map_err(anyhow::Error::new))
            .collect()
    }

    /// `(scheme, θ)` pairs.
    pub fn runs(&self) -> Result<Vec<(Scheme, f64)>> {
        let schemes = self.schemes()?;
        Ok(schemes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let theta = self.thetas.get(i).copied().unwrap_or(match s {
                    Scheme::Frobenius => 3.0,
                    Scheme::Baker => 1.0,
                });
                (s, theta)
            })
            .collect())
    }

    /// Distinct `θ` values in run order.
    pub fn theta_values(&self) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = Vec::new();
        for (_, t) in self.runs()? {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        Ok(out)
    }

    pub fn n_list(&self) -> Vec<usize> {
        if self.n_list.is_empty() {
            chebpade::harness::default_n_list(40)
        } else {
            self.n_list.clone()
        }
    }
}
