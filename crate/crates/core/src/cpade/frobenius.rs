use rug::Float;

use super::{normalize_pair, RationalApproximant, Scheme};
use crate::chebseries::{shifted_coeff, ChebSeries};
use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, inverse_iteration_null, minimal_degree_vector, MpMatrix, PivotedQr};
use crate::mp;

/// Output of [`frobenius`].
#[derive(Clone, Debug)]
pub struct FrobeniusResult {
    pub approximant: RationalApproximant,
    /// Orthonormalized basis of the numerical null space of the
    /// `M × (M+1)` system (denominator coefficient vectors).
    pub null_space: Vec<Vec<Float>>,
}

impl FrobeniusResult {
    /// More than one independent denominator solves the system.
    pub fn is_multiple(&self) -> bool {
        self.null_space.len() > 1
    }

    pub fn warning(&self) -> Option<String> {
        self.is_multiple().then(|| {
            format!(
                "non-unique solution: null space of dimension {}, minimal-degree denominator returned",
                self.null_space.len()
            )
        })
    }
}

fn check_length(f: &ChebSeries, l: usize, m: usize) -> Result<()> {
    let max_index = l + 2 * m;
    if f.trunc_degree() < max_index {
        return Err(Error::Truncation {
            needed: max_index + 1,
            max_index,
            available: f.coeffs().len(),
        });
    }
    Ok(())
}

pub(crate) fn system_matrix(f: &ChebSeries, l: usize, m: usize) -> MpMatrix {
    let prec = f.precision_bits();
    MpMatrix::from_fn(m, m + 1, prec, |r, j| shifted_coeff(f.coeffs(), j, l + 1 + r, prec))
}

/// Numerator coefficients `p_k = c_k(Qf)`, `k ≤ L`.
pub(crate) fn numerator_for(f: &ChebSeries, q: &[Float], l: usize) -> Vec<Float> {
    let prec = f.precision_bits();
    (0..=l)
        .map(|k| {
            let mut s = Float::new(prec);
            for (j, qj) in q.iter().enumerate() {
                if !qj.is_zero() {
                    s += shifted_coeff(f.coeffs(), j, k, prec) * qj;
                }
            }
            s
        })
        .collect()
}

fn gram_schmidt(vs: &[Vec<Float>]) -> Vec<Vec<Float>> {
    let mut out: Vec<Vec<Float>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let prec = w[0].prec();
                let mut dot = Float::new(prec);
                for (a, b) in w.iter().zip(u) {
                    dot += Float::with_val(prec, a * b);
                }
                for (a, b) in w.iter_mut().zip(u) {
                    *a -= Float::with_val(prec, b * &dot);
                }
            }
        }
        let n = mp::norm2(&w);
        if !n.is_zero() {
            for a in &mut w {
                *a /= &n;
            }
            out.push(w);
        }
    }
    out
}

/// Linear Chebyshev–Padé approximant of type `(L, M)`.
///
/// Requires `a_0..a_{L+2M}`. When the null space of the linear system has
/// dimension above one, the denominator of least degree is returned and the
/// whole null space is reported.
///
/// ```
/// use chebpade::chebseries::{cheb_coeffs, FunctionSpec, PolyBasis};
/// use chebpade::cpade::frobenius;
///
/// // f = 1/(x - 2) is reproduced exactly by type (0, 1).
/// let f = FunctionSpec::Rational { p: vec![1.0], q: vec![-2.0, 1.0], basis: PolyBasis::Monomial };
/// let s = cheb_coeffs(&f, 4, 256).unwrap();
/// let r = frobenius(&s, 0, 1).unwrap().approximant;
/// assert!(r.residual < 1e-60);
/// assert!((r.pole_list()[0].re - 2.0).abs() < 1e-30);
/// ```
pub fn frobenius(f: &ChebSeries, l: usize, m: usize) -> Result<FrobeniusResult> {
    check_length(f, l, m)?;
    let prec = f.precision_bits();
    let scale = f.abs_sum();
    if scale.is_zero() {
        return Err(Error::Degenerate("all Chebyshev coefficients vanish".into()));
    }
    let (q, null_space, cond) = if m == 0 {
        let one = vec![Float::with_val(prec, 1)];
        (one.clone(), vec![one], 1.0)
    } else {
        let a = system_matrix(f, l, m);
        let qr = PivotedQr::new(&a, &default_rank_tol(&a));
        let basis = gram_schmidt(&qr.null_space());
        let tol_rel = mp::pow2(prec, -(prec as i32) / 2);
        let mut q = if basis.len() > 1 {
            minimal_degree_vector(&basis, &tol_rel).ok_or_else(|| Error::Degenerate("empty null space".into()))?
        } else {
            basis[0].clone()
        };
        if basis.len() == 1 {
            let res = mp::max_abs(&a.mul_vec(&q));
            let bound = Float::with_val(prec, &scale * mp::pow2(prec, -(prec as i32) * 3 / 4));
            if res > bound {
                if let Ok(refined) = inverse_iteration_null(&a, &q, 3) {
                    if mp::max_abs(&a.mul_vec(&refined)) < res {
                        q = refined;
                    }
                }
            }
        }
        (q, basis, qr.cond_estimate())
    };
    let mut q = q;
    let mut p = numerator_for(f, &q, l);
    normalize_pair(&mut p, &mut q)?;
    let residual = if m == 0 {
        0.0
    } else {
        let a = system_matrix(f, l, m);
        (mp::max_abs(&a.mul_vec(&q)) / &scale).to_f64()
    };
    Ok(FrobeniusResult {
        approximant: RationalApproximant {
            p,
            q,
            scheme: Scheme::Frobenius,
            l,
            m,
            cond_estimate: cond,
            residual,
            precision_bits: prec,
            newton_steps: 0,
        },
        null_space,
    })
}
