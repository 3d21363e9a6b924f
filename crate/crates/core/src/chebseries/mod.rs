//! Truncated Fourier–Chebyshev expansions `f(x) ≈ Σ_{k ≤ n} a_k T_k(x)`.
//!
//! Coefficients are stored in the classical normalization (`T_k(cos t) =
//! cos kt`, `a_0` not halved). [`orthonormal_coeffs`] converts to the
//! orthonormal system `T_k / ‖T_k‖` with weight `1/√(1−x²)`.

mod function;
mod quadrature;

pub use function::{FunctionSpec, PolyBasis, SINGULAR_DISTANCE};
pub use quadrature::{aliasing_bound, ChebGrid};

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp;

/// Minimum number of Chebyshev–Gauss nodes used by [`cheb_coeffs`].
pub const MIN_NODES: usize = 256;

/// A truncated Chebyshev series at a fixed working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<Float>,
    precision_bits: u32,
}

#[derive(Serialize, Deserialize)]
struct SeriesFile {
    normalization: String,
    precision_bits: u32,
    coeffs: Vec<String>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<Float>, precision_bits: u32) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidFunction("a series needs at least one coefficient".into()));
        }
        if precision_bits < 2 {
            return Err(Error::InvalidFunction(format!(
                "precision {precision_bits} bits is too small"
            )));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidFunction(format!("coefficient {k} is not finite")));
        }
        let coeffs = coeffs.into_iter().map(|c| Float::with_val(precision_bits, c)).collect();
        Ok(Self { coeffs, precision_bits })
    }

    pub fn from_f64(coeffs: &[f64], precision_bits: u32) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| mp::from_f64(precision_bits, c)).collect(),
            precision_bits,
        )
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&Float> {
        self.coeffs.get(k)
    }

    /// Series truncated to degree `n` (or unchanged if already shorter).
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            coeffs: self.coeffs[..=n.min(self.trunc_degree())].to_vec(),
            precision_bits: self.precision_bits,
        }
    }

    /// `Σ |a_k|`, an upper bound for `max_E |f_n|` used as a scale for
    /// tolerances.
    pub fn abs_sum(&self) -> Float {
        let mut s = Float::new(self.precision_bits);
        for c in &self.coeffs {
            s += Float::with_val(self.precision_bits, c.abs_ref());
        }
        s
    }

    /// Evaluates the truncated series at `x` by Clenshaw's recurrence.
    pub fn eval(&self, x: &Float) -> Float {
        let x = Float::with_val(self.precision_bits, x);
        mp::clenshaw(&self.coeffs, &x)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SeriesFile {
            normalization: "classical".into(),
            precision_bits: self.precision_bits,
            coeffs: self.coeffs.iter().map(mp::to_decimal).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SeriesFile = serde_json::from_str(text)?;
        if file.normalization != "classical" {
            return Err(Error::Parse(format!(
                "unsupported normalization {:?}, expected \"classical\"",
                file.normalization
            )));
        }
        let coeffs = file
            .coeffs
            .iter()
            .map(|s| mp::parse_decimal(s, file.precision_bits))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs, file.precision_bits)
    }
}

/// Node count used for a series of the given degree.
pub fn node_count(degree: usize) -> usize {
    (4 * (degree + 1)).max(MIN_NODES)
}

/// Chebyshev coefficients `a_0..a_degree` of a catalog function, by
/// Chebyshev–Gauss quadrature with [`node_count`] nodes.
///
/// ```
/// use chebpade::chebseries::{cheb_coeffs, FunctionSpec, PolyBasis};
///
/// let x = FunctionSpec::Rational { p: vec![0.0, 1.0], q: vec![1.0], basis: PolyBasis::Monomial };
/// let s = cheb_coeffs(&x, 5, 128).unwrap();
/// assert!((s.coeffs()[1].to_f64() - 1.0).abs() < 1e-30);
/// assert!(s.coeffs()[3].to_f64().abs() < 1e-30);
/// ```
pub fn cheb_coeffs(spec: &FunctionSpec, degree: usize, precision_bits: u32) -> Result<ChebSeries> {
    cheb_coeffs_with_nodes(spec, degree, precision_bits, node_count(degree))
}

/// As [`cheb_coeffs`] with an explicit node count (at least `degree + 1`).
pub fn cheb_coeffs_with_nodes(
    spec: &FunctionSpec,
    degree: usize,
    precision_bits: u32,
    n_nodes: usize,
) -> Result<ChebSeries> {
    spec.validate()?;
    if n_nodes <= degree {
        return Err(Error::InvalidFunction(format!(
            "{n_nodes} nodes cannot resolve degree {degree}"
        )));
    }
    // guard digits for the summation
    let work = precision_bits + 32;
    let grid = ChebGrid::new(n_nodes, degree, work);
    let values = grid
        .nodes()
        .par_iter()
        .map(|x| spec.eval_real(x))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = grid.coeffs(&values, degree);
    ChebSeries::new(coeffs, precision_bits)
}

/// Value of the truncated series at `x ∈ [-1, 1]`.
pub fn eval_on_e(s: &ChebSeries, x: f64) -> Result<Float> {
    if !(x.abs() <= 1.0) {
        return Err(Error::InvalidFunction(format!("x = {x} lies outside [-1, 1]")));
    }
    Ok(s.eval(&mp::from_f64(s.precision_bits(), x)))
}

/// Coefficient of `T_m` in `T_j · f` from the linearization
/// `T_i T_j = (T_{i+j} + T_{|i−j|}) / 2`. Needs `a_{j+m}`.
pub(crate) fn shifted_coeff(a: &[Float], j: usize, m: usize, prec: u32) -> Float {
    if j == 0 {
        return Float::with_val(prec, &a[m]);
    }
    let mut s = Float::with_val(prec, &a[j + m]);
    if m >= j {
        s += &a[m - j];
    }
    if m > 0 && j >= m {
        s += &a[j - m];
    }
    s / 2u32
}

/// Coefficient of `T_k` in `Q · f`, with `Q = Σ q_j T_j`.
///
/// Fails with a truncation error when `f` has fewer than `k + deg Q + 1`
/// coefficients.
pub fn series_product_coeff(f: &ChebSeries, q: &[Float], k: usize) -> Result<Float> {
    let prec = f.precision_bits();
    let deg_q = q.len().saturating_sub(1);
    let needed = k + deg_q;
    if needed > f.trunc_degree() {
        return Err(Error::Truncation {
            needed,
            max_index: needed,
            available: f.coeffs().len(),
        });
    }
    let mut s = Float::new(prec);
    for (j, qj) in q.iter().enumerate() {
        if qj.is_zero() {
            continue;
        }
        s += shifted_coeff(f.coeffs(), j, k, prec) * qj;
    }
    Ok(s)
}

/// Converts classical coefficients to the orthonormal system:
/// `c_0 = √π a_0`, `c_k = √(π/2) a_k`.
pub fn orthonormal_coeffs(s: &ChebSeries) -> Vec<Float> {
    let prec = s.precision_bits();
    let pi = mp::pi(prec);
    let r0 = Float::with_val(prec, pi.sqrt_ref());
    let rk = Float::with_val(prec, &pi / 2u32).sqrt();
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| Float::with_val(prec, a * if k == 0 { &r0 } else { &rk }))
        .collect()
}

/// Inverse of [`orthonormal_coeffs`].
pub fn from_orthonormal(c: &[Float], precision_bits: u32) -> Result<ChebSeries> {
    let pi = mp::pi(precision_bits);
    let r0 = Float::with_val(precision_bits, pi.sqrt_ref());
    let rk = Float::with_val(precision_bits, &pi / 2u32).sqrt();
    let a = c
        .iter()
        .enumerate()
        .map(|(k, ck)| Float::with_val(precision_bits, ck / if k == 0 { &r0 } else { &rk }))
        .collect();
    ChebSeries::new(a, precision_bits)
}
