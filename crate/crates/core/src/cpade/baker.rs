use rug::Float;
use serde::{Deserialize, Serialize};

use super::frobenius::{frobenius, numerator_for};
use super::{normalize_pair, RationalApproximant, Scheme};
use crate::chebseries::{node_count, shifted_coeff, ChebGrid, ChebSeries};
use crate::equilibrium::inverse_joukowski;
use crate::error::{Error, Result};
use crate::linalg::{Lu, MpMatrix};
use crate::mp;

/// Newton schedule for [`baker`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BakerOptions {
    pub max_steps: usize,
    pub max_halvings: usize,
    /// Perturbation sizes for the `q = 1` seeds.
    pub perturbations: Vec<f64>,
    /// Upper bound for the quadrature node count.
    pub max_nodes: usize,
}

impl Default for BakerOptions {
    fn default() -> Self {
        Self {
            max_steps: 50,
            max_halvings: 30,
            perturbations: vec![0.0, 0.1, -0.1],
            max_nodes: 16384,
        }
    }
}

/// One seed of the retry schedule and what became of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedAttempt {
    pub seed: String,
    pub outcome: String,
    pub residual: f64,
    pub steps: usize,
}

/// Record of a failed search: no seed led to a pole-free solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceReport {
    pub l: usize,
    pub m: usize,
    pub attempts: Vec<SeedAttempt>,
}

#[derive(Clone, Debug)]
pub enum BakerOutcome {
    Found(RationalApproximant),
    Nonexistent(NonexistenceReport),
}

impl BakerOutcome {
    pub fn found(self) -> Option<RationalApproximant> {
        match self {
            BakerOutcome::Found(r) => Some(r),
            BakerOutcome::Nonexistent(_) => None,
        }
    }
}

struct Problem<'a> {
    f: &'a ChebSeries,
    l: usize,
    m: usize,
    prec: u32,
    grid: ChebGrid,
    scale: Float,
}

struct Eval {
    residual: Vec<Float>,
    norm: Float,
    q_sign_change: bool,
}

impl Problem<'_> {
    fn n_eq(&self) -> usize {
        self.l + self.m + 1
    }

    fn eval(&self, p: &[Float], q: &[Float]) -> Eval {
        let prec = self.prec;
        let mut vals = Vec::with_capacity(self.grid.len());
        let mut sign = 0;
        let mut change = false;
        for x in self.grid.nodes() {
            let qv = mp::clenshaw(q, x);
            let s = if qv.is_sign_negative() { -1 } else { 1 };
            if qv.is_zero() || (sign != 0 && s != sign) {
                change = true;
            }
            sign = s;
            vals.push(mp::clenshaw(p, x) / qv);
        }
        let c = self.grid.coeffs(&vals, self.n_eq() - 1);
        let residual: Vec<Float> = c
            .iter()
            .zip(self.f.coeffs())
            .map(|(ck, ak)| Float::with_val(prec, ck - ak))
            .collect();
        let norm = mp::max_abs(&residual);
        Eval {
            residual,
            norm,
            q_sign_change: change,
        }
    }

    fn jacobian(&self, p: &[Float], q: &[Float], q_ref: &[Float]) -> MpMatrix {
        let prec = self.prec;
        let (l, m) = (self.l, self.m);
        let kmax = self.n_eq() - 1 + l.max(m);
        let mut inv_q = Vec::with_capacity(self.grid.len());
        let mut p_q2 = Vec::with_capacity(self.grid.len());
        for x in self.grid.nodes() {
            let qv = mp::clenshaw(q, x);
            let pv = mp::clenshaw(p, x);
            let iq = Float::with_val(prec, qv.recip_ref());
            p_q2.push(Float::with_val(prec, &pv * &iq) * &iq);
            inv_q.push(iq);
        }
        let g1 = self.grid.coeffs(&inv_q, kmax);
        let g2 = self.grid.coeffs(&p_q2, kmax);
        let n = self.n_eq() + 1;
        MpMatrix::from_fn(n, n, prec, |k, j| {
            if k < self.n_eq() {
                if j <= l {
                    shifted_coeff(&g1, j, k, prec)
                } else {
                    -shifted_coeff(&g2, j - l - 1, k, prec)
                }
            } else if j > l {
                q_ref[j - l - 1].clone()
            } else {
                Float::new(prec)
            }
        })
    }
}

fn pole_modulus(q: &[Float]) -> f64 {
    let r = RationalApproximant {
        p: vec![],
        q: q.to_vec(),
        scheme: Scheme::Baker,
        l: 0,
        m: q.len() - 1,
        cond_estimate: 0.0,
        residual: 0.0,
        precision_bits: q[0].prec(),
        newton_steps: 0,
    };
    r.pole_list()
        .into_iter()
        .map(|z| inverse_joukowski(z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Quadrature size that drives the aliasing error of `c_k(p/q)` below the
/// working precision, given the Bernstein parameter of the nearest pole.
fn nodes_for(rho: f64, prec: u32, l: usize, m: usize, max_nodes: usize) -> usize {
    let base = node_count(l + 2 * m);
    if !(rho > 1.0) {
        return max_nodes.max(base);
    }
    let need = ((f64::from(prec) + 64.0) * std::f64::consts::LN_2 / (2.0 * rho.ln())).ceil();
    let need = if need.is_finite() { need as usize } else { max_nodes };
    need.clamp(base, max_nodes.max(base))
}

struct Candidate {
    p: Vec<Float>,
    q: Vec<Float>,
    residual: f64,
    steps: usize,
    cond: f64,
}

fn newton(prob: &Problem, mut p: Vec<Float>, mut q: Vec<Float>, opts: &BakerOptions) -> Result<Candidate> {
    let prec = prob.prec;
    let q_ref = q.clone();
    let floor = Float::with_val(prec, &prob.scale * mp::pow2(prec, -(prec as i32) + 40));
    let mut cur = prob.eval(&p, &q);
    let mut steps = 0;
    let mut slow = 0;
    let mut cond = 1.0;
    while steps < opts.max_steps && cur.norm > floor {
        let jac = prob.jacobian(&p, &q, &q_ref);
        cond = jacobian_cond(&jac);
        let lu = Lu::new(&jac)?;
        let mut rhs: Vec<Float> = cur.residual.iter().map(|r| Float::with_val(prec, -r)).collect();
        let mut qdot = Float::new(prec);
        for (a, b) in q_ref.iter().zip(&q) {
            qdot += Float::with_val(prec, a * b);
        }
        rhs.push(Float::with_val(prec, 1) - qdot);
        let delta = lu.solve(&rhs);
        let mut t = Float::with_val(prec, 1);
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let np: Vec<Float> = p
                .iter()
                .zip(&delta)
                .map(|(a, d)| Float::with_val(prec, a + Float::with_val(prec, d * &t)))
                .collect();
            let nq: Vec<Float> = q
                .iter()
                .zip(&delta[prob.l + 1..])
                .map(|(a, d)| Float::with_val(prec, a + Float::with_val(prec, d * &t)))
                .collect();
            let trial = prob.eval(&np, &nq);
            if !trial.q_sign_change && trial.norm.is_finite() && trial.norm < cur.norm {
                accepted = Some((np, nq, trial));
                break;
            }
            t /= 2u32;
        }
        steps += 1;
        let Some((np, nq, trial)) = accepted else {
            break;
        };
        // stagnation: quadratic convergence has ended
        let ratio = Float::with_val(prec, &trial.norm / &cur.norm).to_f64();
        slow = if ratio > 0.5 { slow + 1 } else { 0 };
        p = np;
        q = nq;
        cur = trial;
        if slow >= 3 {
            break;
        }
    }
    let residual = Float::with_val(prec, &cur.norm / &prob.scale).to_f64();
    if cur.q_sign_change {
        return Err(Error::Degenerate("denominator changes sign on [-1, 1]".into()));
    }
    Ok(Candidate {
        p,
        q,
        residual,
        steps,
        cond,
    })
}

fn jacobian_cond(j: &MpMatrix) -> f64 {
    let qr = crate::linalg::PivotedQr::new(j, &Float::new(j.prec()));
    qr.cond_estimate()
}

fn pad(v: &[Float], len: usize, prec: u32) -> Vec<Float> {
    let mut out = v.to_vec();
    out.resize(len, Float::new(prec));
    out
}

/// Nonlinear Chebyshev–Padé approximant `F_{L,M}` with
/// `c_k(F_{L,M}) = c_k(f)`, `k ≤ L + M`, and no pole on `[-1, 1]`.
///
/// The coefficients `c_k(p/q)` are recomputed by Chebyshev–Gauss quadrature
/// of `p/q` itself, so only the series of `f` is needed. Newton's method runs
/// from the seeds Frobenius `(L, M)`, Frobenius `(L−1, M−1)` and `q = 1 + εT_1`
/// for each `ε` in the options until the residual stops improving; a seed is
/// accepted when its residual is below `2^(−prec/2)` relative to `Σ|a_k|`.
/// Failure of all seeds is returned as a [`NonexistenceReport`].
pub fn baker(f: &ChebSeries, l: usize, m: usize, opts: &BakerOptions) -> Result<BakerOutcome> {
    let prec = f.precision_bits();
    let first = frobenius(f, l, m)?.approximant;
    let scale = f.abs_sum();
    let accept = mp::pow2(prec, -(prec as i32) / 2).to_f64();

    let mut seeds: Vec<(String, Vec<Float>, Vec<Float>)> = Vec::new();
    let mut attempts = Vec::new();
    if first.has_pole_on_e(1e-12) {
        attempts.push(SeedAttempt {
            seed: format!("frobenius({l},{m})"),
            outcome: "seed has a pole on [-1, 1]".into(),
            residual: f64::NAN,
            steps: 0,
        });
    } else {
        seeds.push((format!("frobenius({l},{m})"), first.p.clone(), first.q.clone()));
    }
    if l >= 1 && m >= 1 {
        let lower = frobenius(f, l - 1, m - 1)?.approximant;
        if lower.has_pole_on_e(1e-12) {
            attempts.push(SeedAttempt {
                seed: format!("frobenius({},{})", l - 1, m - 1),
                outcome: "seed has a pole on [-1, 1]".into(),
                residual: f64::NAN,
                steps: 0,
            });
        } else {
            seeds.push((
                format!("frobenius({},{})", l - 1, m - 1),
                pad(&lower.p, l + 1, prec),
                pad(&lower.q, m + 1, prec),
            ));
        }
    }
    for &eps in &opts.perturbations {
        let mut q = vec![Float::new(prec); m + 1];
        q[0] = Float::with_val(prec, 1);
        if m >= 1 {
            q[1] = mp::from_f64(prec, eps);
        }
        let p = numerator_for(f, &q, l);
        seeds.push((format!("q = 1 + ({eps})T_1"), p, q));
    }

    for (name, mut p, mut q) in seeds {
        normalize_pair(&mut p, &mut q)?;
        let rho = pole_modulus(&q);
        let grid = ChebGrid::new(nodes_for(rho, prec, l, m, opts.max_nodes), l + m + l.max(m), prec);
        let prob = Problem {
            f,
            l,
            m,
            prec,
            grid,
            scale: scale.clone(),
        };
        let cand = match newton(&prob, p, q, opts) {
            Ok(c) => c,
            Err(e) => {
                attempts.push(SeedAttempt {
                    seed: name,
                    outcome: format!("newton failed: {e}"),
                    residual: f64::NAN,
                    steps: 0,
                });
                continue;
            }
        };
        if !(cand.residual <= accept) {
            attempts.push(SeedAttempt {
                seed: name,
                outcome: "no convergence".into(),
                residual: cand.residual,
                steps: cand.steps,
            });
            continue;
        }
        let (mut p, mut q) = (cand.p, cand.q);
        normalize_pair(&mut p, &mut q)?;
        let r = RationalApproximant {
            p,
            q,
            scheme: Scheme::Baker,
            l,
            m,
            cond_estimate: cand.cond,
            residual: cand.residual,
            precision_bits: prec,
            newton_steps: cand.steps,
        };
        if r.has_pole_on_e(1e-12) {
            attempts.push(SeedAttempt {
                seed: name,
                outcome: "converged to a candidate with a pole on [-1, 1]".into(),
                residual: cand.residual,
                steps: cand.steps,
            });
            continue;
        }
        return Ok(BakerOutcome::Found(r));
    }
    Ok(BakerOutcome::Nonexistent(NonexistenceReport { l, m, attempts }))
}
