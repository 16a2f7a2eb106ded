//! Field-tagged dense matrices over ℂ with ℝ embedded.
//!
//! Every matrix carries a [`Field`] tag. A `Real` matrix stores complex
//! entries whose imaginary parts are exactly zero; this is checked when a
//! matrix is built from outside data and maintained by every operation here
//! (products, sums and decompositions of real matrices stay real bit for bit).
//!
//! The singular value decomposition is the only decomposition: polar factors,
//! null spaces, least squares and principal angles are all derived from it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{shape, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn of_scalar(z: C64) -> Field {
        if z.im == 0.0 {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("R"),
            Field::Complex => f.write_str("C"),
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    /// Builds a matrix from row-major entries, enforcing the field invariant.
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<C64>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(z) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {z}")));
        }
        if field == Field::Real {
            if let Some(z) = data.iter().find(|z| z.im != 0.0) {
                return Err(Error::InvalidInput(format!(
                    "real matrix with non-zero imaginary part {}",
                    z.im
                )));
            }
        }
        Ok(Mat {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a complex matrix, narrowing the tag to `Real` when every
    /// imaginary part is zero.
    pub fn from_complex(rows: usize, cols: usize, data: Vec<C64>) -> Result<Mat> {
        let field = if data.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Mat::new(field, rows, cols, data)
    }

    pub fn real(rows: usize, cols: usize, data: &[f64]) -> Result<Mat> {
        Mat::new(
            Field::Real,
            rows,
            cols,
            data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    /// Real matrix from literal rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Mat::real(rows.len(), cols, &data).expect("finite literal")
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Mat {
        Mat {
            field,
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(Field::Real, n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// 1x1 matrix holding `z`.
    pub fn scalar(z: C64) -> Mat {
        Mat {
            field: Field::of_scalar(z),
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn diag(entries: &[C64]) -> Mat {
        let n = entries.len();
        let mut m = Mat::zeros(Field::Real, n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m.field = if entries.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        m
    }

    /// Fills entries from `f`. For a `Real` tag, imaginary parts are dropped.
    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = f(i, j);
                data.push(match field {
                    Field::Real => C64::new(z.re, 0.0),
                    Field::Complex => z,
                });
            }
        }
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    /// Sets one entry; promotes the tag to `Complex` if needed.
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        if z.im != 0.0 {
            self.field = Field::Complex;
        }
        self.data[i * self.cols + j] = z;
    }

    /// Re-tags the matrix. Demotion to `Real` requires zero imaginary parts.
    pub fn into_field(mut self, field: Field) -> Result<Mat> {
        if field == Field::Real && self.data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "cannot narrow a matrix with imaginary entries to the real field".into(),
            ));
        }
        self.field = field;
        Ok(self)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(shape("matmul", self.shape(), other.shape()));
        }
        let (m, n) = (self.rows, other.cols);
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                // signed permutation matrices dominate this crate
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Mat {
            field: self.field.join(other.field),
            rows: m,
            cols: n,
            data: out,
        })
    }

    /// `self* · other` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return Err(shape("adjoint_mul", self.shape(), other.shape()));
        }
        let (m, n) = (self.cols, other.cols);
        let mut out = vec![ZERO; m * n];
        for k in 0..self.rows {
            let brow = &other.data[k * n..(k + 1) * n];
            for i in 0..m {
                let a = self.data[k * self.cols + i].conj();
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out[i * n..(i + 1) * n].iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Mat {
            field: self.field.join(other.field),
            rows: m,
            cols: n,
            data: out,
        })
    }

    fn zip_with(
        &self,
        other: &Mat,
        op: &'static str,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<Mat> {
        if self.shape() != other.shape() {
            return Err(shape(op, self.shape(), other.shape()));
        }
        Ok(Mat {
            field: self.field.join(other.field),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, z: C64) -> Mat {
        Mat {
            field: self.field.join(Field::of_scalar(z)),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * z).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Mat {
        self.scale(C64::new(x, 0.0))
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Mat) -> Mat {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let base = (i * other.rows + k) * cols + j * other.cols;
                    for l in 0..other.cols {
                        out[base + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Mat {
            field: self.field.join(other.field),
            rows,
            cols,
            data: out,
        }
    }

    /// Largest entry modulus, ‖·‖_max.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(shape("trace", self.shape(), self.shape()));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// ‖self − other‖_max.
    pub fn max_diff(&self, other: &Mat) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(shape("max_diff", self.shape(), other.shape()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// ‖A*A − I‖_max.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint_mul(self).expect("square gram");
        identity_residual(&g)
    }

    pub fn submatrix(&self, row: usize, col: usize, rows: usize, cols: usize) -> Mat {
        assert!(row + rows <= self.rows && col + cols <= self.cols, "submatrix out of range");
        Mat::from_fn(self.field, rows, cols, |i, j| self.get(row + i, col + j))
    }

    pub fn column(&self, j: usize) -> Mat {
        self.submatrix(0, j, self.rows, 1)
    }

    /// Writes `block` with its top-left corner at (row, col).
    pub fn set_block(&mut self, row: usize, col: usize, block: &Mat) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        self.field = self.field.join(block.field);
        for i in 0..block.rows {
            let dst = (row + i) * self.cols + col;
            self.data[dst..dst + block.cols]
                .copy_from_slice(&block.data[i * block.cols..(i + 1) * block.cols]);
        }
    }

    pub fn vstack(parts: &[&Mat]) -> Result<Mat> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if let Some(bad) = parts.iter().find(|m| m.cols != cols) {
            return Err(shape("vstack", (0, cols), bad.shape()));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Mat::zeros(Field::Real, rows, cols);
        let mut r = 0;
        for m in parts {
            out.set_block(r, 0, m);
            r += m.rows;
        }
        Ok(out)
    }

    pub fn hstack(parts: &[&Mat]) -> Result<Mat> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if let Some(bad) = parts.iter().find(|m| m.rows != rows) {
            return Err(shape("hstack", (rows, 0), bad.shape()));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(Field::Real, rows, cols);
        let mut c = 0;
        for m in parts {
            out.set_block(0, c, m);
            c += m.cols;
        }
        Ok(out)
    }

    pub fn block_diag(parts: &[&Mat]) -> Mat {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(Field::Real, rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_block(r, c, m);
            r += m.rows;
            c += m.cols;
        }
        out
    }

    /// Euclidean norm of all entries viewed as one vector.
    pub fn vec_norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

/// ‖G − I‖_max for square G.
pub fn identity_residual(g: &Mat) -> f64 {
    let n = g.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..g.cols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g.get(i, j) - target).norm());
        }
    }
    worst
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;

    /// Panics on non-conforming shapes; use [`Mat::matmul`] for a checked product.
    fn mul(self, rhs: &'a Mat) -> Mat {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;

    fn add(self, rhs: &'a Mat) -> Mat {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;

    fn sub(self, rhs: &'a Mat) -> Mat {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Mat {
    type Output = Mat;

    fn neg(self) -> Mat {
        self.scale_real(-1.0)
    }
}

/// Thin singular value decomposition `a = u · diag(s) · v*`.
///
/// With k = min(rows, cols): `u` is rows×k, `v` is cols×k, and `s` is
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    pub fn reconstruct(&self) -> Mat {
        let sd = Mat::diag(&self.s.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        &(&self.u * &sd) * &self.v.adjoint()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Mat) -> Result<Svd> {
    if a.rows >= a.cols {
        jacobi_svd(a)
    } else {
        let t = jacobi_svd(&a.adjoint())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn dot_conj(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Unit-modulus phase of `z`; exact ±1 for real input.
fn phase_of(z: C64) -> C64 {
    if z.im == 0.0 {
        C64::new(z.re.signum(), 0.0)
    } else {
        z / z.norm()
    }
}

fn jacobi_svd(a: &Mat) -> Result<Svd> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let field = a.field;
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(&w[p]);
                let beta = norm_sqr(&w[q]);
                let gamma = dot_conj(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = phase_of(gamma).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, ph, c, s);
                rotate(&mut v, p, q, ph, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps ({m}x{n})"
        )));
    }

    let norms: Vec<f64> = w.iter().map(|c| norm_sqr(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut ucols: Vec<Option<Vec<C64>>> = order
        .iter()
        .map(|&j| {
            let nj = norms[j];
            (nj > f64::MIN_POSITIVE * 1e4)
                .then(|| w[j].iter().map(|z| z / nj).collect::<Vec<_>>())
        })
        .collect();
    // columns annihilated exactly need an orthonormal completion
    for k in 0..n {
        if ucols[k].is_none() {
            let basis: Vec<&Vec<C64>> = ucols.iter().flatten().collect();
            ucols[k] = Some(best_completion(&basis, m));
        }
    }

    let mut u = Mat::zeros(field, m, n);
    let mut vm = Mat::zeros(field, n, n);
    for (k, &j) in order.iter().enumerate() {
        let uc = ucols[k].as_ref().expect("filled");
        for i in 0..m {
            u.data[i * n + k] = uc[i];
        }
        for i in 0..n {
            vm.data[i * n + k] = v[j][i];
        }
    }
    Ok(Svd { u, s, v: vm })
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, ph: C64, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * ph;
        *xp = a * c - b * s;
        *xq = a * s + b * c;
    }
}

fn orthogonalize(x: &mut [C64], basis: &[&Vec<C64>]) {
    // twice is enough
    for _ in 0..2 {
        for b in basis {
            let h = dot_conj(b, x);
            for (xi, bi) in x.iter_mut().zip(b.iter()) {
                *xi -= h * bi;
            }
        }
    }
}

/// Unit vector orthogonal to `basis`, taken from the standard basis vector
/// with the largest residual (lowest index on ties).
fn best_completion(basis: &[&Vec<C64>], dim: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for e in 0..dim {
        let mut x = vec![ZERO; dim];
        x[e] = ONE;
        orthogonalize(&mut x, basis);
        let nx = norm_sqr(&x).sqrt();
        if best.as_ref().is_none_or(|(bn, _)| nx > *bn + 1e-12) {
            best = Some((nx, x));
        }
    }
    let (nx, x) = best.expect("dim > 0");
    x.into_iter().map(|z| z / nx).collect()
}

pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// Operator (spectral) norm.
pub fn op_norm(a: &Mat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Unitary polar factor `U·V*` of a square invertible matrix.
pub fn polar_unitary(a: &Mat) -> Result<Mat> {
    if !a.is_square() {
        return Err(shape("polar_unitary", a.shape(), a.shape()));
    }
    let d = svd(a)?;
    let largest = d.s.first().copied().unwrap_or(0.0);
    let smallest = d.s.last().copied().unwrap_or(0.0);
    if !(smallest > 1e-10 * largest) {
        return Err(Error::Singular { smallest, largest });
    }
    Ok(&d.u * &d.v.adjoint())
}

/// Orthonormal basis (as columns) of the numerical null space: right singular
/// vectors whose singular value is at most `tol · s_max`.
pub fn nullspace(a: &Mat, tol: f64) -> Result<Mat> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("nullspace tolerance must be positive, got {tol}")));
    }
    let n = a.cols;
    if n == 0 {
        return Ok(Mat::zeros(a.field, 0, 0));
    }
    // reduce to a square problem with the same null space
    let square = if a.rows > n {
        householder_r(a)
    } else if a.rows < n {
        let mut padded = Mat::zeros(a.field, n, n);
        padded.set_block(0, 0, a);
        padded
    } else {
        a.clone()
    };
    let d = svd(&square)?;
    let smax = d.s[0];
    let keep: Vec<usize> = (0..n).filter(|&j| smax == 0.0 || d.s[j] <= tol * smax).collect();
    let mut out = Mat::zeros(a.field, n, keep.len());
    for (k, &j) in keep.iter().enumerate() {
        for i in 0..n {
            out.data[i * keep.len() + k] = d.v.get(i, j);
        }
    }
    Ok(out)
}

/// Upper-triangular factor R (cols×cols) of a Householder QR of a tall matrix.
fn householder_r(a: &Mat) -> Mat {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    for k in 0..n.min(m) {
        let x = &cols[k][k..];
        let xn = norm_sqr(x).sqrt();
        if xn == 0.0 {
            continue;
        }
        let ph = if x[0] == ZERO { ONE } else { phase_of(x[0]) };
        let alpha = -ph * xn;
        let mut v: Vec<C64> = x.to_vec();
        v[0] -= alpha;
        let vn = norm_sqr(&v).sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        for col in cols.iter_mut().skip(k) {
            let seg = &mut col[k..];
            let h = dot_conj(&v, seg) * 2.0;
            for (s, vi) in seg.iter_mut().zip(&v) {
                *s -= h * vi;
            }
        }
    }
    Mat::from_fn(a.field, n, n, |i, j| if i <= j { cols[j][i] } else { ZERO })
}

/// Minimum-norm least-squares solution of `a·x ≈ b`.
pub fn lstsq(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.rows != b.rows {
        return Err(shape("lstsq", a.shape(), b.shape()));
    }
    let d = svd(a)?;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let inv: Vec<C64> = d
        .s
        .iter()
        .map(|&s| if s > 1e-12 * smax { C64::new(1.0 / s, 0.0) } else { ZERO })
        .collect();
    let ub = d.u.adjoint_mul(b)?;
    Ok(&d.v * &(&Mat::diag(&inv) * &ub))
}

/// Extends orthonormal columns `q` (d×k) to a d×d unitary whose first k
/// columns are `q`.
pub fn complete_orthonormal_basis(q: &Mat) -> Result<Mat> {
    let (d, k) = q.shape();
    if k > d {
        return Err(shape("complete_orthonormal_basis", q.shape(), (d, d)));
    }
    let gram_err = identity_residual(&q.adjoint_mul(q)?);
    if gram_err > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "columns are not orthonormal (residual {gram_err:e})"
        )));
    }
    let mut basis: Vec<Vec<C64>> = (0..k).map(|j| (0..d).map(|i| q.get(i, j)).collect()).collect();
    while basis.len() < d {
        let refs: Vec<&Vec<C64>> = basis.iter().collect();
        let next = best_completion(&refs, d);
        basis.push(next);
    }
    Ok(Mat::from_fn(q.field, d, d, |i, j| basis[j][i]))
}

/// Haar-like random unitary (orthogonal for `Field::Real`).
pub fn random_unitary<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Mat {
    let g = random_gaussian(field, n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut x: Vec<C64> = (0..n).map(|i| g.get(i, j)).collect();
        let refs: Vec<&Vec<C64>> = cols.iter().collect();
        orthogonalize(&mut x, &refs);
        let nx = norm_sqr(&x).sqrt();
        cols.push(x.into_iter().map(|z| z / nx).collect());
    }
    Mat::from_fn(field, n, n, |i, j| cols[j][i])
}

/// Matrix of independent standard normal entries (complex: unit variance per part).
pub fn random_gaussian<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(field, rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        match field {
            Field::Real => C64::new(re, 0.0),
            Field::Complex => C64::new(re, rng.sample(StandardNormal)),
        }
    })
}
