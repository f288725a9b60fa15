//! Dense complex matrix kernel.
//!
//! Everything the rest of the crate needs from linear algebra lives here:
//! Kronecker and Hadamard products, partial transposition and partial trace
//! over an arbitrary equal-dimension tensor factorization, and a
//! deterministic Hermitian eigensolver with a PSD decision procedure.
//!
//! The eigensolver reduces the matrix to real symmetric tridiagonal form by
//! complex Householder reflections and then runs the implicit-shift QL
//! iteration. No randomization is involved anywhere, so identical inputs
//! produce identical output bits on a given platform.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shorthand for the scalar type used throughout the crate.
pub type C64 = Complex64;

/// Relative tolerance for accepting a matrix as Hermitian:
/// `max|A - A*| <= HERMITIAN_REL_TOL * max(1, max|A|)`.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows_a: rows,
                cols_a: cols,
                rows_b: data.len(),
                cols_b: 1,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn add_assign_at(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] += value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                rows_a: self.rows,
                cols_a: self.cols,
                rows_b: other.rows,
                cols_b: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.add_assign_at(i, j, a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                left: self.cols,
                right: v.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max |A - A*|`; infinite for non-square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_REL_TOL * self.max_abs().max(1.0)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                rows_a: self.rows,
                cols_a: self.cols,
                rows_b: other.rows,
                cols_b: other.cols,
            });
        }
        Ok(())
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Tensor factorization profile: `n` factors of equal local dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimsProfile {
    d: usize,
    n: usize,
    total: usize,
}

impl DimsProfile {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 || n < 1 {
            return Err(Error::InvalidDims { d, n });
        }
        let total = d
            .checked_pow(n as u32)
            .filter(|&t| t <= 1 << 30)
            .ok_or(Error::DimensionOverflow { d, n })?;
        Ok(Self { d, n, total })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Place value of factor `f`; the first factor is most significant.
    #[inline]
    pub fn place(&self, factor: usize) -> usize {
        self.d.pow((self.n - 1 - factor) as u32)
    }

    /// Splits a composite index into per-factor digits, first factor first.
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.n];
        for f in (0..self.n).rev() {
            digits[f] = index % self.d;
            index /= self.d;
        }
        digits
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d + x)
    }
}

/// Kronecker product: `(a ⊗ b)[(i*rb + k), (j*cb + l)] = a[i,j] b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let v = a.get(i, j);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out.set(i * rb + k, j * cb + l, v * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Entrywise (Hadamard) product.
pub fn hadamard(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch {
            rows_a: a.rows(),
            cols_a: a.cols(),
            rows_b: b.rows(),
            cols_b: b.cols(),
        });
    }
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    ComplexMatrix::new(a.rows(), a.cols(), data)
}

fn check_operator_dims(rho: &ComplexMatrix, dims: DimsProfile) -> Result<()> {
    if rho.rows() != dims.total() || rho.cols() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    Ok(())
}

/// Partial transposition over the factors selected by `mask`.
///
/// `mask` has one entry per factor (length `n`); on masked factors the row
/// and column sub-indices are swapped. The operation is an involution and
/// preserves both the trace and Hermiticity.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    mask: &[bool],
) -> Result<ComplexMatrix> {
    check_operator_dims(rho, dims)?;
    if mask.len() != dims.n() {
        return Err(Error::LengthMismatch {
            left: dims.n(),
            right: mask.len(),
        });
    }
    let total = dims.total();
    let swapped: Vec<(usize, isize)> = (0..dims.n())
        .filter(|&f| mask[f])
        .map(|f| (f, dims.place(f) as isize))
        .collect();
    if swapped.is_empty() {
        return Ok(rho.clone());
    }
    let digits: Vec<Vec<usize>> = (0..total).map(|i| dims.decompose(i)).collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            let mut src_r = r as isize;
            let mut src_c = c as isize;
            for &(f, place) in &swapped {
                let delta = digits[c][f] as isize - digits[r][f] as isize;
                src_r += delta * place;
                src_c -= delta * place;
            }
            out.set(r, c, rho.get(src_r as usize, src_c as usize));
        }
    }
    Ok(out)
}

/// Partial trace over the factors listed in `dropped` (0-based).
///
/// Dropping every factor yields the 1x1 matrix `[Tr rho]`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    dropped: &[usize],
) -> Result<ComplexMatrix> {
    check_operator_dims(rho, dims)?;
    let mut drop = dropped.to_vec();
    drop.sort_unstable();
    drop.dedup();
    for &f in &drop {
        if f >= dims.n() {
            return Err(Error::FactorOutOfRange {
                index: f,
                n: dims.n(),
            });
        }
    }
    let kept: Vec<usize> = (0..dims.n()).filter(|f| !drop.contains(f)).collect();
    let out_dim = dims.d().pow(kept.len() as u32);
    let total = dims.total();

    // For each composite index, precompute its projection onto the kept and
    // dropped sub-indices.
    let mut kept_part = vec![0usize; total];
    let mut drop_part = vec![0usize; total];
    for idx in 0..total {
        let digits = dims.decompose(idx);
        kept_part[idx] = kept.iter().fold(0, |acc, &f| acc * dims.d() + digits[f]);
        drop_part[idx] = drop.iter().fold(0, |acc, &f| acc * dims.d() + digits[f]);
    }

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..total {
        for c in 0..total {
            if drop_part[r] == drop_part[c] {
                out.add_assign_at(kept_part[r], kept_part[c], rho.get(r, c));
            }
        }
    }
    Ok(out)
}

/// Partial trace phrased through the set of factors to keep.
pub fn partial_trace_keep(
    rho: &ComplexMatrix,
    dims: DimsProfile,
    kept: &[usize],
) -> Result<ComplexMatrix> {
    if kept.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    for &f in kept {
        if f >= dims.n() {
            return Err(Error::FactorOutOfRange {
                index: f,
                n: dims.n(),
            });
        }
    }
    let dropped: Vec<usize> = (0..dims.n()).filter(|f| !kept.contains(f)).collect();
    partial_trace(rho, dims, &dropped)
}

/// Reduces a Hermitian matrix to real symmetric tridiagonal form by complex
/// Householder reflections. Returns the diagonal and the subdiagonal (the
/// latter with the unitary phases absorbed, which leaves the spectrum
/// unchanged).
fn hermitian_tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut m = a.clone();
    let zero = C64::new(0.0, 0.0);

    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += m.get(i, k).norm_sqr();
        }
        if norm_sq == 0.0 {
            continue;
        }
        let norm = norm_sq.sqrt();
        let alpha = m.get(k + 1, k);
        let phase = if alpha.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            alpha / alpha.norm()
        };
        let beta = -phase * norm;

        // Householder vector v (normalized), H = I - 2 v v*.
        let mut v = vec![zero; n - k - 1];
        v[0] = alpha - beta;
        for i in k + 2..n {
            v[i - k - 1] = m.get(i, k);
        }
        let v_norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sq == 0.0 {
            continue;
        }
        let inv = 1.0 / v_norm_sq.sqrt();
        for z in &mut v {
            *z *= inv;
        }

        // Rank-2 update of the trailing block: M <- M - 2 v q* - 2 q v*
        // with p = M v and q = p - (v* p) v.
        let sub = n - k - 1;
        let mut p = vec![zero; sub];
        for i in 0..sub {
            let mut acc = zero;
            for j in 0..sub {
                acc += m.get(k + 1 + i, k + 1 + j) * v[j];
            }
            p[i] = acc;
        }
        let vp: C64 = v.iter().zip(&p).map(|(x, y)| x.conj() * y).sum();
        let q: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vp * vi).collect();
        for i in 0..sub {
            for j in 0..sub {
                let delta = v[i] * q[j].conj() + q[i] * v[j].conj();
                let cur = m.get(k + 1 + i, k + 1 + j);
                m.set(k + 1 + i, k + 1 + j, cur - 2.0 * delta);
            }
        }

        m.set(k + 1, k, beta);
        m.set(k, k + 1, beta.conj());
        for i in k + 2..n {
            m.set(i, k, zero);
            m.set(k, i, zero);
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    let mut sub = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        sub[i] = m.get(i + 1, i).norm();
    }
    (diag, sub)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix
/// (diagonal `d`, subdiagonal `e`); eigenvalues land in `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::EigenvalueConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
///
/// Rejects inputs whose Hermitian deviation exceeds
/// [`HERMITIAN_REL_TOL`] relative to `max(1, max|A|)`.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let deviation = a.hermitian_deviation();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN deviations must be rejected
    if !(deviation <= HERMITIAN_REL_TOL * a.max_abs().max(1.0)) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = hermitian_tridiagonalize(a);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Tolerance policy for PSD verdicts: a Hermitian matrix counts as
/// semi-positive when `lambda_min >= -relative * max(1, lambda_max)`.
///
/// The floor of 1 keeps the test meaningful for unnormalized inputs whose
/// spectrum sits near zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdTolerance {
    pub relative: f64,
}

impl Default for PsdTolerance {
    fn default() -> Self {
        Self { relative: 1e-10 }
    }
}

impl PsdTolerance {
    pub fn new(relative: f64) -> Self {
        Self { relative }
    }

    pub fn epsilon(&self, lambda_max: f64) -> f64 {
        self.relative * lambda_max.max(1.0)
    }
}

/// PSD verdict together with the minimum eigenvalue.
pub fn is_psd(a: &ComplexMatrix, tol: PsdTolerance) -> Result<(bool, f64)> {
    let eigs = hermitian_eigenvalues(a)?;
    if eigs.is_empty() {
        return Ok((true, 0.0));
    }
    let min = eigs[0];
    let max = eigs[eigs.len() - 1];
    Ok((min >= -tol.epsilon(max), min))
}
