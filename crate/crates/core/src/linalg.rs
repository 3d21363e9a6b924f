//! Dense linear algebra at arbitrary precision.
//!
//! Only what the Padé constructions need: Householder QR with column
//! pivoting (rank detection and null spaces), inverse-iteration refinement
//! of a null direction, and LU with partial pivoting for square solves.

use rug::Float;

use crate::error::{Error, Result};
use crate::mp;

/// Row-major dense matrix of [`Float`] entries at a common precision.
#[derive(Clone, Debug)]
pub struct MpMatrix {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Float>,
}

impl MpMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Self {
            rows,
            cols,
            prec,
            data: vec![Float::new(prec); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Float) -> Self {
        let mut m = Self::zeros(rows, cols, prec);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = Float::with_val(prec, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        self.data[i * self.cols + j] = v;
    }

    pub fn frobenius_norm(&self) -> Float {
        mp::norm2(&self.data)
    }

    pub fn mul_vec(&self, x: &[Float]) -> Vec<Float> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Float::new(self.prec);
                for (j, xj) in x.iter().enumerate() {
                    s += Float::with_val(self.prec, self.get(i, j) * xj);
                }
                s
            })
            .collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `AᵀA`
    pub fn gram(&self) -> MpMatrix {
        let n = self.cols;
        let mut g = MpMatrix::zeros(n, n, self.prec);
        for a in 0..n {
            for b in a..n {
                let mut s = Float::new(self.prec);
                for i in 0..self.rows {
                    s += Float::with_val(self.prec, self.get(i, a) * self.get(i, b));
                }
                g.set(b, a, s.clone());
                g.set(a, b, s);
            }
        }
        g
    }
}

/// Householder QR factorization with column pivoting, `A P = Q R`.
///
/// Only `R` and the permutation are kept; the null-space computation does
/// not need `Q`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    r: MpMatrix,
    perm: Vec<usize>,
    rank: usize,
}

impl PivotedQr {
    /// Factor `a`; diagonal entries of `R` at or below `rank_tol` end the
    /// numerical rank.
    pub fn new(a: &MpMatrix, rank_tol: &Float) -> Self {
        let (m, n, prec) = (a.rows, a.cols, a.prec);
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut rank = steps;
        for k in 0..steps {
            // Pivot on the remaining column of largest norm.
            let mut best = k;
            let mut best_norm = Float::new(prec);
            for j in k..n {
                let mut s = Float::new(prec);
                for i in k..m {
                    s += Float::with_val(prec, r.get(i, j).square_ref());
                }
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            r.swap_cols(k, best);
            perm.swap(k, best);
            let norm = best_norm.sqrt();
            if norm <= *rank_tol {
                rank = k;
                for i in k..m {
                    for j in k..n {
                        r.set(i, j, Float::new(prec));
                    }
                }
                break;
            }
            let alpha = if r.get(k, k).is_sign_negative() { norm } else { -norm };
            let mut v: Vec<Float> = (k..m).map(|i| r.get(i, k).clone()).collect();
            v[0] -= &alpha;
            let vtv = mp::norm2(&v).square();
            if !vtv.is_zero() {
                for j in k..n {
                    let mut dot = Float::new(prec);
                    for (off, vi) in v.iter().enumerate() {
                        dot += Float::with_val(prec, vi * r.get(k + off, j));
                    }
                    let scale = Float::with_val(prec, &dot * 2u32) / &vtv;
                    for (off, vi) in v.iter().enumerate() {
                        let upd = Float::with_val(prec, vi * &scale);
                        *r.get_mut(k + off, j) -= upd;
                    }
                }
            }
            r.set(k, k, alpha);
            for i in k + 1..m {
                r.set(i, k, Float::new(prec));
            }
        }
        Self { r, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn r(&self) -> &MpMatrix {
        &self.r
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `|R_00| / |R_{r-1,r-1}|`, a cheap condition estimate of the
    /// full-rank part.
    pub fn cond_estimate(&self) -> f64 {
        if self.rank == 0 {
            return f64::INFINITY;
        }
        let first = Float::with_val(self.r.prec, self.r.get(0, 0).abs_ref());
        let last = Float::with_val(self.r.prec, self.r.get(self.rank - 1, self.rank - 1).abs_ref());
        (first / last).to_f64()
    }

    /// Basis of the numerical null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<Float>> {
        let n = self.r.cols;
        let rk = self.rank;
        let prec = self.r.prec;
        let mut basis = Vec::with_capacity(n - rk);
        for free in rk..n {
            // Back substitution R11 y = -R12[:, free].
            let mut y = vec![Float::new(prec); n];
            y[free] = Float::with_val(prec, 1);
            for i in (0..rk).rev() {
                let mut s = Float::with_val(prec, self.r.get(i, free));
                for (j, yj) in y.iter().enumerate().take(rk).skip(i + 1) {
                    s += Float::with_val(prec, self.r.get(i, j) * yj);
                }
                y[i] = -s / self.r.get(i, i);
            }
            let mut x = vec![Float::new(prec); n];
            for (pos, &col) in self.perm.iter().enumerate() {
                x[col] = y[pos].clone();
            }
            basis.push(x);
        }
        basis
    }
}

/// Default rank threshold: a few thousand ulps of `‖A‖_F`.
pub fn default_rank_tol(a: &MpMatrix) -> Float {
    let prec = a.prec;
    a.frobenius_norm() * mp::pow2(prec, -(prec as i32) + 24)
}

/// Reduce a null-space basis so that its last vector has the smallest
/// possible index of its last significant entry (minimal polynomial degree).
pub fn minimal_degree_vector(basis: &[Vec<Float>], tol_rel: &Float) -> Option<Vec<Float>> {
    let mut vecs: Vec<Vec<Float>> = basis.to_vec();
    let d = vecs.len();
    if d == 0 {
        return None;
    }
    let n = vecs[0].len();
    let prec = vecs[0][0].prec();
    let scale = vecs
        .iter()
        .map(|v| mp::max_abs(v))
        .fold(Float::new(prec), |a, b| a.max(&b));
    let tol = Float::with_val(prec, &scale * tol_rel);
    let mut used = vec![false; d];
    let mut last_pivot = None;
    for row in (0..n).rev() {
        let mut best = None;
        let mut best_abs = tol.clone();
        for (k, v) in vecs.iter().enumerate() {
            if used[k] {
                continue;
            }
            let a = Float::with_val(prec, v[row].abs_ref());
            if a > best_abs {
                best_abs = a;
                best = Some(k);
            }
        }
        let Some(p) = best else { continue };
        used[p] = true;
        last_pivot = Some(p);
        let pivot = vecs[p].clone();
        for (k, v) in vecs.iter_mut().enumerate() {
            if used[k] {
                continue;
            }
            let factor = Float::with_val(prec, &v[row] / &pivot[row]);
            for (vi, pi) in v.iter_mut().zip(&pivot) {
                *vi -= Float::with_val(prec, pi * &factor);
            }
            v[row] = Float::new(prec);
        }
        if used.iter().all(|&u| u) {
            break;
        }
    }
    last_pivot.map(|p| vecs[p].clone())
}

/// Refine an approximate null direction of `a` by inverse iteration on
/// `AᵀA + μI` with a tiny shift.
pub fn inverse_iteration_null(a: &MpMatrix, start: &[Float], steps: usize) -> Result<Vec<Float>> {
    let prec = a.prec;
    let mut g = a.gram();
    let shift = a.frobenius_norm().square() * mp::pow2(prec, -(prec as i32) + 8);
    for i in 0..g.rows {
        *g.get_mut(i, i) += &shift;
    }
    let lu = Lu::new(&g)?;
    let mut x = start.to_vec();
    for _ in 0..steps {
        x = lu.solve(&x);
        let nrm = mp::norm2(&x);
        if nrm.is_zero() {
            return Err(Error::Degenerate("inverse iteration collapsed to zero".into()));
        }
        for xi in &mut x {
            *xi /= &nrm;
        }
    }
    Ok(x)
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: MpMatrix,
    piv: Vec<usize>,
}

impl Lu {
    pub fn new(a: &MpMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Degenerate(format!("LU of a {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let prec = a.prec;
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = Float::with_val(prec, lu.get(k, k).abs_ref());
            for i in k + 1..n {
                let v = Float::with_val(prec, lu.get(i, k).abs_ref());
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best.is_zero() {
                return Err(Error::Degenerate(format!("singular matrix at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu.get(k, k).clone();
            for i in k + 1..n {
                let factor = Float::with_val(prec, lu.get(i, k) / &pivot);
                if factor.is_zero() {
                    lu.set(i, k, factor);
                    continue;
                }
                for j in k + 1..n {
                    let upd = Float::with_val(prec, lu.get(k, j) * &factor);
                    *lu.get_mut(i, j) -= upd;
                }
                lu.set(i, k, factor);
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, b: &[Float]) -> Vec<Float> {
        let n = self.lu.rows;
        let prec = self.lu.prec;
        let mut x: Vec<Float> = self.piv.iter().map(|&i| Float::with_val(prec, &b[i])).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = Float::with_val(prec, self.lu.get(i, j) * &x[j]);
                x[i] -= upd;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let upd = Float::with_val(prec, self.lu.get(i, j) * &x[j]);
                x[i] -= upd;
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }
}
