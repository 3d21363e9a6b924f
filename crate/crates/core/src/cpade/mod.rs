//! Chebyshev–Padé approximants of type `(L, M)`.
//!
//! Two constructions are provided. The linear one ([`frobenius`]) asks for
//! `c_k(Qf − P) = 0`, `k ≤ L + M`, and always has a solution. The nonlinear
//! one ([`baker`]) asks for `c_k(P/Q) = c_k(f)`, `k ≤ L + M`, with `P/Q`
//! holomorphic on `[-1, 1]`; it may fail to exist, which is reported as a
//! regular outcome.

mod baker;
mod frobenius;
mod roots;

pub use baker::{baker, BakerOptions, BakerOutcome, NonexistenceReport, SeedAttempt};
pub use frobenius::{frobenius, FrobeniusResult};
pub use roots::{chebyshev_to_monomial, polynomial_roots, Root};

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Frobenius,
    Baker,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Frobenius => "frobenius",
            Scheme::Baker => "baker",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frobenius" => Ok(Scheme::Frobenius),
            "baker" => Ok(Scheme::Baker),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

/// `P/Q` with `P = Σ p_j T_j`, `Q = Σ q_j T_j`, `‖q‖₂ = 1` and the highest
/// nonzero `q_j` positive.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalApproximant {
    pub p: Vec<Float>,
    pub q: Vec<Float>,
    pub scheme: Scheme,
    pub l: usize,
    pub m: usize,
    /// Condition estimate of the linear system (Frobenius) or the final
    /// Newton Jacobian (Baker).
    pub cond_estimate: f64,
    /// `max_k |c_k(Qf − P)|` (Frobenius) or `max_k |c_k(P/Q) − c_k(f)|`
    /// (Baker), relative to `Σ|a_k|`.
    pub residual: f64,
    pub precision_bits: u32,
    /// Newton steps taken (zero for Frobenius).
    pub newton_steps: usize,
}

#[derive(Serialize, Deserialize)]
struct ApproximantFile {
    scheme: Scheme,
    #[serde(rename = "type")]
    type_lm: (usize, usize),
    basis: String,
    precision_bits: u32,
    p: Vec<String>,
    q: Vec<String>,
    cond_estimate: f64,
    residual: f64,
    newton_steps: usize,
}

/// Scales `q` (and `p` alike) so that `‖q‖₂ = 1` and the highest nonzero
/// entry of `q` is positive.
pub(crate) fn normalize_pair(p: &mut [Float], q: &mut [Float]) -> Result<()> {
    let prec = q.first().map_or(64, Float::prec);
    let mut nrm = mp::norm2(q);
    if nrm.is_zero() {
        return Err(Error::Degenerate("denominator is identically zero".into()));
    }
    let tol = Float::with_val(prec, &nrm * mp::pow2(prec, -(prec as i32) + 8));
    if let Some(lead) = q.iter().rev().find(|c| Float::with_val(prec, c.abs_ref()) > tol) {
        if lead.is_sign_negative() {
            nrm = -nrm;
        }
    }
    for c in q.iter_mut().chain(p.iter_mut()) {
        *c /= &nrm;
    }
    Ok(())
}

impl RationalApproximant {
    pub fn eval(&self, z: &Complex) -> Complex {
        let prec = z.prec().0.max(self.precision_bits);
        let z = Complex::with_val(prec, z);
        mp::clenshaw_complex(&self.p, &z) / mp::clenshaw_complex(&self.q, &z)
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        mp::to_c64(&self.eval(&mp::complex(self.precision_bits, z)))
    }

    pub fn eval_real(&self, x: &Float) -> Float {
        let x = Float::with_val(self.precision_bits, x);
        mp::clenshaw(&self.p, &x) / mp::clenshaw(&self.q, &x)
    }

    /// Roots of `Q` with multiplicity (poles of `P/Q` before cancellation).
    pub fn poles(&self) -> Vec<Root> {
        polynomial_roots(&chebyshev_to_monomial(&self.q))
    }

    /// Poles as a flat list, each repeated by its multiplicity.
    pub fn pole_list(&self) -> Vec<Complex64> {
        self.poles()
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.to_c64(), r.multiplicity))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ApproximantFile {
            scheme: self.scheme,
            type_lm: (self.l, self.m),
            basis: "chebyshev".into(),
            precision_bits: self.precision_bits,
            p: self.p.iter().map(mp::to_decimal).collect(),
            q: self.q.iter().map(mp::to_decimal).collect(),
            cond_estimate: self.cond_estimate,
            residual: self.residual,
            newton_steps: self.newton_steps,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ApproximantFile = serde_json::from_str(text)?;
        if file.basis != "chebyshev" {
            return Err(Error::Parse(format!("unsupported basis {:?}", file.basis)));
        }
        let parse = |v: &[String]| {
            v.iter()
                .map(|s| mp::parse_decimal(s, file.precision_bits))
                .collect::<Result<Vec<_>>>()
        };
        Ok(Self {
            p: parse(&file.p)?,
            q: parse(&file.q)?,
            scheme: file.scheme,
            l: file.type_lm.0,
            m: file.type_lm.1,
            cond_estimate: file.cond_estimate,
            residual: file.residual,
            precision_bits: file.precision_bits,
            newton_steps: file.newton_steps,
        })
    }

    /// `true` when `Q` has a real root in `[-1 − tol, 1 + tol]`.
    pub fn has_pole_on_e(&self, tol: f64) -> bool {
        self.poles().iter().any(|r| {
            let z = r.to_c64();
            z.im.abs() <= tol && z.re.abs() <= 1.0 + tol
        })
    }
}
