//! Regular simplices and ρ-simplices.

use crate::error::{shape, Error, Result};
use crate::linalg::{identity_residual, Field, Mat, C64};
use crate::radon_hurwitz::{verify_rho_orthonormal, RhoOrthonormalSeq};

/// Ψ_m: an (m−1)×m real matrix whose columns form a regular simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMatrix {
    pub m: usize,
    pub mat: Mat,
}

impl SimplexMatrix {
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j).re
    }
}

/// Builds Ψ_m by the upper-triangular recursion from Ψ₂ = [1 −1].
pub fn simplex_matrix(m: usize) -> Result<SimplexMatrix> {
    if m < 2 {
        return Err(Error::Domain(format!("simplex needs m >= 2, got {m}")));
    }
    let mut psi = Mat::from_real_rows(&[&[1.0, -1.0]]);
    for k in 3..=m {
        let kf = k as f64;
        let lift = (kf * (kf - 2.0)).sqrt();
        let prev = psi;
        psi = Mat::from_fn(Field::Real, k - 1, k, |i, j| {
            let v = match (i, j) {
                (0, 0) => kf - 1.0,
                (0, _) => -1.0,
                (_, 0) => 0.0,
                _ => lift * prev.get(i - 1, j - 1).re,
            };
            C64::new(v / (kf - 1.0), 0.0)
        });
    }
    Ok(SimplexMatrix { m, mat: psi })
}

/// n−1 unitaries with B_i*B_j + B_j*B_i = −2/(n−2)·I for i ≠ j.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoSimplex {
    pub field: Field,
    pub r: usize,
    pub n: usize,
    pub mats: Vec<Mat>,
}

impl RhoSimplex {
    /// Wraps `mats` as a simplex with n = mats.len() + 1. Does not verify.
    pub fn new(field: Field, mats: Vec<Mat>) -> Result<RhoSimplex> {
        if mats.len() < 2 {
            return Err(Error::Domain(format!(
                "a rho-simplex needs at least 2 members, got {}",
                mats.len()
            )));
        }
        let r = mats[0].rows();
        if let Some(bad) = mats.iter().find(|b| b.shape() != (r, r)) {
            return Err(shape("RhoSimplex::new", bad.shape(), (r, r)));
        }
        if field == Field::Real && mats.iter().any(|b| b.field() != Field::Real) {
            return Err(Error::InvalidInput("complex member in a real rho-simplex".into()));
        }
        Ok(RhoSimplex {
            field,
            r,
            n: mats.len() + 1,
            mats,
        })
    }
}

/// B_j = Σ_i Ψ_{n−1}(i,j)·C_i for a ρ-orthonormal sequence of length n−2.
pub fn rho_simplex_from_orthonormal(seq: &RhoOrthonormalSeq) -> Result<RhoSimplex> {
    if seq.is_empty() {
        return Err(Error::InvalidInput("empty rho-orthonormal sequence".into()));
    }
    let res = verify_rho_orthonormal(&seq.mats)?;
    if res > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "sequence is not rho-orthonormal (residual {res:e})"
        )));
    }
    let psi = simplex_matrix(seq.len() + 1)?;
    RhoSimplex::new(seq.field, combine(&psi, &seq.mats))
}

/// Columns of Ψ used as coefficients over `mats`.
pub(crate) fn combine(psi: &SimplexMatrix, mats: &[Mat]) -> Vec<Mat> {
    let r = mats[0].rows();
    let field = mats.iter().fold(Field::Real, |f, c| f.join(c.field()));
    (0..psi.m)
        .map(|j| {
            mats.iter().enumerate().fold(Mat::zeros(field, r, r), |acc, (i, c)| {
                let w = psi.coeff(i, j);
                if w == 0.0 {
                    acc
                } else {
                    &acc + &c.scale_real(w)
                }
            })
        })
        .collect()
}

/// (B₁*·B_i)_i, whose first member is exactly I.
pub fn normalize_rho_simplex(s: &RhoSimplex) -> RhoSimplex {
    let b1 = s.mats[0].adjoint();
    let mut mats: Vec<Mat> = s.mats.iter().map(|b| &b1 * b).collect();
    mats[0] = Mat::identity(s.r);
    RhoSimplex {
        field: s.field,
        r: s.r,
        n: s.n,
        mats,
    }
}

/// Max of unitarity residuals and ‖B_i*B_j + B_j*B_i + 2/(n−2)·I‖_max.
pub fn verify_rho_simplex(s: &RhoSimplex) -> Result<f64> {
    let r = s.r;
    if let Some(bad) = s.mats.iter().find(|b| b.shape() != (r, r)) {
        return Err(shape("verify_rho_simplex", bad.shape(), (r, r)));
    }
    let target = Mat::identity(r).scale_real(-2.0 / (s.n as f64 - 2.0));
    let mut worst: f64 = 0.0;
    for (i, a) in s.mats.iter().enumerate() {
        worst = worst.max(identity_residual(&a.adjoint_mul(a)?));
        for b in &s.mats[i + 1..] {
            let sum = &a.adjoint_mul(b)? + &b.adjoint_mul(a)?;
            worst = worst.max(sum.max_diff(&target)?);
        }
    }
    Ok(worst)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Orthonormal basis (υ_i) of the span of a regular simplex (φ_j) such that
/// φ_j = Σ_i Ψ_m(i,j)·υ_i.
///
/// Gram–Schmidt on φ₁..φ_{m−1}, so υ₁ = φ₁ and υ_j ∈ span(φ₁..φ_j).
pub fn simplex_basis_recovery(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = vectors.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 vectors, got {m}")));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::InvalidInput("vectors have different lengths".into()));
    }
    let off = -1.0 / (m as f64 - 1.0);
    let mut worst: f64 = 0.0;
    for (i, x) in vectors.iter().enumerate() {
        for (j, y) in vectors.iter().enumerate() {
            let want = if i == j { 1.0 } else { off };
            worst = worst.max((dot(x, y) - want).abs());
        }
    }
    if worst > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "not a regular simplex (Gram residual {worst:e})"
        )));
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for phi in &vectors[..m - 1] {
        let mut x = phi.clone();
        for _ in 0..2 {
            for u in &basis {
                let h = dot(u, &x);
                x.iter_mut().zip(u).for_each(|(xi, ui)| *xi -= h * ui);
            }
        }
        let nx = dot(&x, &x).sqrt();
        basis.push(x.into_iter().map(|v| v / nx).collect());
    }
    Ok(basis)
}

/// φ_j = Σ_i Ψ_m(i,j)·υ_i.
pub fn simplex_synthesize(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let psi = simplex_matrix(basis.len() + 1)?;
    let dim = basis.first().map_or(0, |u| u.len());
    Ok((0..psi.m)
        .map(|j| {
            let mut v = vec![0.0; dim];
            for (i, u) in basis.iter().enumerate() {
                let w = psi.coeff(i, j);
                v.iter_mut().zip(u).for_each(|(vk, uk)| *vk += w * uk);
            }
            v
        })
        .collect())
}
