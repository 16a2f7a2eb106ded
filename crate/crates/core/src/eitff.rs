//! Equi-isoclinic tight fusion frames with d = 2r: construction,
//! canonical form, verification, Naimark complements and block OMP.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{shape, Error, Result};
use crate::linalg::{
    complete_orthonormal_basis, identity_residual, lstsq, op_norm, polar_unitary,
    random_gaussian, singular_values, svd, Field, Mat,
};
use crate::radon_hurwitz::{build_rho_orthonormal, rho_number};
use crate::simplex::{combine, rho_simplex_from_orthonormal, simplex_matrix, verify_rho_simplex, RhoSimplex};
use crate::symmetry::{total_symmetry_data, totally_symmetric_exists, Existence};

/// n subspaces of F^d, each given by a d×r isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionFrame {
    pub field: Field,
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub isometries: Vec<Mat>,
}

impl FusionFrame {
    /// Checks shapes, field tags, and that each member is an isometry to 1e−8.
    pub fn new(field: Field, isometries: Vec<Mat>) -> Result<FusionFrame> {
        let frame = FusionFrame::unchecked(field, isometries)?;
        for (i, p) in frame.isometries.iter().enumerate() {
            let res = p.unitarity_residual();
            if res > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "subspace {} is not given by an isometry (residual {res:e})",
                    i + 1
                )));
            }
        }
        Ok(frame)
    }

    /// Shape and field checks only, so damaged frames can still be measured.
    pub fn unchecked(field: Field, isometries: Vec<Mat>) -> Result<FusionFrame> {
        let Some(first) = isometries.first() else {
            return Err(Error::InvalidInput("a frame needs at least one subspace".into()));
        };
        let (d, r) = first.shape();
        if r == 0 || r > d {
            return Err(Error::InvalidInput(format!("isometry shape {d}x{r} needs 1 <= r <= d")));
        }
        if let Some(bad) = isometries.iter().find(|p| p.shape() != (d, r)) {
            return Err(shape("FusionFrame::new", bad.shape(), (d, r)));
        }
        if field == Field::Real && isometries.iter().any(|p| p.field() != Field::Real) {
            return Err(Error::InvalidInput("complex isometry in a real frame".into()));
        }
        Ok(FusionFrame {
            field,
            d,
            r,
            n: isometries.len(),
            isometries,
        })
    }

    /// Φ_i Φ_i*.
    pub fn projection(&self, i: usize) -> Mat {
        let p = &self.isometries[i];
        p * &p.adjoint()
    }

    pub fn projections(&self) -> Vec<Mat> {
        (0..self.n).map(|i| self.projection(i)).collect()
    }

    /// Φ_i* Φ_j.
    pub fn cross_gram(&self, i: usize, j: usize) -> Mat {
        self.isometries[i]
            .adjoint_mul(&self.isometries[j])
            .expect("same shape")
    }

    /// The d × nr synthesis operator [Φ_1 … Φ_n].
    pub fn synthesis(&self) -> Mat {
        let refs: Vec<&Mat> = self.isometries.iter().collect();
        Mat::hstack(&refs).expect("same shape")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitffParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
}

pub fn eitff_params(n: usize) -> Result<EitffParams> {
    if n < 3 {
        return Err(Error::Domain(format!("n must be at least 3, got {n}")));
    }
    let nf = n as f64;
    let alpha = ((nf - 2.0) / (2.0 * nf - 2.0)).sqrt();
    Ok(EitffParams {
        n,
        alpha,
        beta: (nf / (2.0 * nf - 2.0)).sqrt(),
        sigma: alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Generic,
    Skew,
    TotallySymmetric,
}

/// Φ_i = [αI; βB_i] for i < n and Φ_n = [I; 0].
pub fn frame_from_simplex(s: &RhoSimplex) -> Result<FusionFrame> {
    let p = eitff_params(s.n)?;
    let id = Mat::identity(s.r);
    let mut isos: Vec<Mat> = s
        .mats
        .iter()
        .map(|b| Mat::vstack(&[&id.scale_real(p.alpha), &b.scale_real(p.beta)]))
        .collect::<Result<_>>()?;
    isos.push(Mat::vstack(&[&id, &Mat::zeros(Field::Real, s.r, s.r)])?);
    FusionFrame::new(s.field, isos)
}

fn check_generic(field: Field, r: usize, n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::Domain(format!("n must be at least 3, got {n}")));
    }
    let rho = rho_number(field, r)?;
    if n > rho + 2 {
        return Err(Error::Infeasible {
            bound: "n <= rho+2".into(),
            detail: format!("n={n} but rho_{field}({r})={rho}"),
        });
    }
    Ok(rho)
}

/// Skew-Hermitian ρ-simplex of n−1 members, n ≤ ρ+1.
pub fn skew_rho_simplex(field: Field, r: usize, n: usize) -> Result<RhoSimplex> {
    let rho = check_generic(field, r, n)?;
    if n > rho + 1 {
        return Err(Error::Infeasible {
            bound: "n <= rho+1".into(),
            detail: format!("skew simplices need n <= rho+1; n={n}, rho_{field}({r})={rho}"),
        });
    }
    let seq = build_rho_orthonormal(field, r, n - 1)?;
    let skew = non_identity_members(&seq.mats);
    let psi = simplex_matrix(n - 1)?;
    RhoSimplex::new(field, combine(&psi, &skew))
}

/// Members of a ρ-orthonormal sequence other than its identity member,
/// which are then anticommuting skew-Hermitian unitaries.
pub(crate) fn non_identity_members(mats: &[Mat]) -> Vec<Mat> {
    let r = mats[0].rows();
    let id = Mat::identity(r);
    let pos = mats
        .iter()
        .position(|c| c.max_diff(&id).expect("square") == 0.0)
        .expect("built sequences contain the identity");
    mats.iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, c)| c.clone())
        .collect()
}

/// The ρ-simplex behind `build_eitff`.
pub fn build_simplex(field: Field, r: usize, n: usize, variant: Variant) -> Result<RhoSimplex> {
    match variant {
        Variant::Generic => {
            check_generic(field, r, n)?;
            rho_simplex_from_orthonormal(&build_rho_orthonormal(field, r, n - 2)?)
        }
        Variant::Skew => skew_rho_simplex(field, r, n),
        Variant::TotallySymmetric => {
            let verdict = totally_symmetric_exists(field, r, n)?;
            match verdict.answer {
                Existence::Yes if n == 3 => build_simplex(field, r, n, Variant::Generic),
                Existence::Yes => rho_simplex_from_orthonormal(&total_symmetry_data(field, r, n)?.cs),
                Existence::No => Err(Error::Infeasible {
                    bound: verdict.bound.unwrap_or_else(|| "total symmetry".into()),
                    detail: verdict.reason,
                }),
                Existence::Unknown => Err(Error::UnknownFeasibility(verdict.reason)),
            }
        }
    }
}

pub fn build_eitff(field: Field, r: usize, n: usize, variant: Variant) -> Result<FusionFrame> {
    frame_from_simplex(&build_simplex(field, r, n, variant)?)
}

/// Whether some EITFF(2r, r, n) exists, with a short reason.
pub fn eitff_exists(field: Field, r: usize, n: usize) -> Result<(bool, String)> {
    if n < 3 {
        return Err(Error::Domain(format!("n must be at least 3, got {n}")));
    }
    let rho = rho_number(field, r)?;
    Ok(if n <= rho + 2 {
        (true, format!("n <= rho+2 = {} for rho_{field}({r}) = {rho}", rho + 2))
    } else {
        (false, format!("n > rho+2 = {} for rho_{field}({r}) = {rho}", rho + 2))
    })
}

pub fn welch_bound(d: usize, r: usize, n: usize) -> Result<f64> {
    if n < 2 || n * r < d {
        return Err(Error::Domain(format!(
            "Welch bound needs n >= 2 and nr >= d (d={d}, r={r}, n={n})"
        )));
    }
    Ok((((n * r - d) as f64) / ((d * (n - 1)) as f64)).sqrt())
}

/// max over i ≠ j of ‖Φ_i*Φ_j‖_op.
pub fn block_coherence(frame: &FusionFrame) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..frame.n {
        for j in i + 1..frame.n {
            worst = worst.max(op_norm(&frame.cross_gram(i, j))?);
        }
    }
    Ok(worst)
}

/// Principal angles between subspaces i and j, nondecreasing.
pub fn principal_angles_pair(frame: &FusionFrame, i: usize, j: usize) -> Result<Vec<f64>> {
    let s = singular_values(&frame.cross_gram(i, j))?;
    Ok(s.iter().map(|c| c.clamp(0.0, 1.0).acos()).collect())
}

/// Principal angles for every pair i < j.
pub fn principal_angles(frame: &FusionFrame) -> Result<Vec<((usize, usize), Vec<f64>)>> {
    let mut out = Vec::new();
    for i in 0..frame.n {
        for j in i + 1..frame.n {
            out.push(((i, j), principal_angles_pair(frame, i, j)?));
        }
    }
    Ok(out)
}

/// √(1 − ‖Φ_i*Φ_j‖²_op).
pub fn spectral_distance(frame: &FusionFrame, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::Domain("spectral distance needs two different subspaces".into()));
    }
    let c = op_norm(&frame.cross_gram(i, j))?.min(1.0);
    Ok((1.0 - c * c).max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub isometry_residual: f64,
    pub tightness_residual: f64,
    pub equiisoclinic_residual: f64,
    pub welch_gap: f64,
    pub block_coherence: f64,
    pub welch_bound: f64,
    pub gerzon_ok: bool,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        let tol = self.tolerance;
        self.isometry_residual <= tol
            && self.tightness_residual <= tol
            && self.equiisoclinic_residual <= tol
            && self.welch_gap <= tol
            && self.gerzon_ok
    }
}

/// Largest n allowed for nonidentical equi-isoclinic subspaces.
pub fn gerzon_bound(field: Field, d: usize, r: usize) -> usize {
    match field {
        Field::Real => d * (d + 1) / 2 - r * (r + 1) / 2 + 1,
        Field::Complex => d * d - r * r + 1,
    }
}

pub fn verify_eitff(frame: &FusionFrame, tol: f64) -> Result<VerificationReport> {
    let (d, r, n) = (frame.d, frame.r, frame.n);
    let isometry_residual = frame
        .isometries
        .iter()
        .map(|p| p.unitarity_residual())
        .fold(0.0, f64::max);

    let mut frame_op = Mat::zeros(frame.field, d, d);
    for p in &frame.isometries {
        frame_op = &frame_op + &(p * &p.adjoint());
    }
    let tightness_residual = frame_op
        .max_diff(&Mat::identity(d).scale_real((n * r) as f64 / d as f64))?;

    let (sigma2, wb) = if n >= 2 && n * r >= d {
        (((n * r - d) as f64) / ((d * (n - 1)) as f64), welch_bound(d, r, n)?)
    } else {
        (0.0, 0.0)
    };
    let target = Mat::identity(r).scale_real(sigma2);
    let mut equiisoclinic_residual: f64 = 0.0;
    let mut identical = true;
    for i in 0..n {
        for j in i + 1..n {
            let g = frame.cross_gram(i, j);
            let gg = &g * &g.adjoint();
            equiisoclinic_residual = equiisoclinic_residual.max(gg.max_diff(&target)?);
            // Φ_i*Φ_j unitary means equal subspaces
            if identity_residual(&gg) > tol {
                identical = false;
            }
        }
    }
    let coherence = if n >= 2 { block_coherence(frame)? } else { 0.0 };
    let gerzon_ok = identical || n <= gerzon_bound(frame.field, d, r);
    Ok(VerificationReport {
        isometry_residual,
        tightness_residual,
        equiisoclinic_residual,
        welch_gap: coherence - wb,
        block_coherence: coherence,
        welch_bound: wb,
        gerzon_ok,
        tolerance: tol,
    })
}

/// Rewrites an EITFF(2r, r, n) in the form [αI; βB_i], [I; 0] and returns the
/// extracted ρ-simplex.
pub fn canonicalize(frame: &FusionFrame) -> Result<(FusionFrame, RhoSimplex)> {
    if frame.d != 2 * frame.r {
        return Err(Error::Domain(format!("canonical form needs d = 2r (d={}, r={})", frame.d, frame.r)));
    }
    if frame.n < 3 {
        return Err(Error::Domain(format!("canonical form needs n >= 3, got {}", frame.n)));
    }
    let report = verify_eitff(frame, 1e-8)?;
    if !report.pass() {
        return Err(Error::InvalidInput(format!(
            "input is not an EITFF at tolerance 1e-8 (tightness {:e}, equi-isoclinic {:e})",
            report.tightness_residual, report.equiisoclinic_residual
        )));
    }
    let (r, n) = (frame.r, frame.n);
    let p = eitff_params(n)?;
    let upsilon = complete_orthonormal_basis(&frame.isometries[n - 1])?;
    let blocks: Vec<Mat> = frame.isometries[..n - 1]
        .iter()
        .map(|phi| {
            let omega = upsilon.adjoint_mul(phi)?;
            let z = polar_unitary(&omega.submatrix(0, 0, r, r))?;
            let lower = omega.submatrix(r, 0, r, r);
            Ok(&lower.scale_real(1.0 / p.beta) * &z.adjoint())
        })
        .collect::<Result<_>>()?;
    let simplex = RhoSimplex::new(frame.field, blocks)?;
    Ok((frame_from_simplex(&simplex)?, simplex))
}

/// Reads B_i off a frame already in canonical form.
pub fn canonical_simplex(frame: &FusionFrame, tol: f64) -> Result<RhoSimplex> {
    let (r, n) = (frame.r, frame.n);
    if frame.d != 2 * r || n < 3 {
        return Err(Error::InvalidInput("frame is not an EITFF(2r, r, n) with n >= 3".into()));
    }
    let p = eitff_params(n)?;
    let last = Mat::vstack(&[&Mat::identity(r), &Mat::zeros(Field::Real, r, r)])?;
    if frame.isometries[n - 1].max_diff(&last)? > tol {
        return Err(Error::InvalidInput("last subspace is not [I; 0]".into()));
    }
    let top = Mat::identity(r).scale_real(p.alpha);
    let mut blocks = Vec::with_capacity(n - 1);
    for phi in &frame.isometries[..n - 1] {
        if phi.submatrix(0, 0, r, r).max_diff(&top)? > tol {
            return Err(Error::InvalidInput("upper block is not alpha*I".into()));
        }
        blocks.push(phi.submatrix(r, 0, r, r).scale_real(1.0 / p.beta));
    }
    let s = RhoSimplex::new(frame.field, blocks)?;
    let res = verify_rho_simplex(&s)?;
    if res > tol.max(1e-9) {
        return Err(Error::InvalidInput(format!("blocks are not a rho-simplex (residual {res:e})")));
    }
    Ok(s)
}

/// Isometries Φ̃_i of dimension nr − d with Φ̃_i*Φ̃_j = −d/(nr−d)·Φ_i*Φ_j, i ≠ j.
pub fn naimark_complement(frame: &FusionFrame) -> Result<FusionFrame> {
    let (d, r, n) = (frame.d, frame.r, frame.n);
    let nr = n * r;
    if nr <= d {
        return Err(Error::Domain(format!("complement needs nr > d (nr={nr}, d={d})")));
    }
    let report = verify_eitff(frame, 1e-8)?;
    if report.tightness_residual > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "frame is not tight (residual {:e})",
            report.tightness_residual
        )));
    }
    let k = nr - d;
    let scale = nr as f64 / k as f64;
    let phi = frame.synthesis();
    let gram = phi.adjoint_mul(&phi)?.scale_real(-(d as f64) / nr as f64);
    let g = (&Mat::identity(nr) + &gram).scale_real(scale);
    let dec = svd(&g)?;
    let keep: Vec<usize> = (0..nr).filter(|&j| dec.s[j] > 0.5 * scale).collect();
    if keep.len() != k {
        return Err(Error::Numeric(format!(
            "complement Gram has {} large eigenvalues, expected {k}",
            keep.len()
        )));
    }
    let tilde = Mat::from_fn(g.field(), k, nr, |a, col| {
        let j = keep[a];
        dec.v.get(col, j).conj() * dec.s[j].sqrt()
    });
    let isos = (0..n).map(|i| tilde.submatrix(0, i * r, k, r)).collect();
    FusionFrame::new(frame.field, isos)
}

/// Greedy block-sparse recovery result: selected blocks and coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSparse {
    pub support: Vec<usize>,
    pub coefficients: Vec<Mat>,
}

/// Block orthogonal matching pursuit with k greedy steps.
pub fn block_omp_recover(frame: &FusionFrame, y: &Mat, k: usize) -> Result<BlockSparse> {
    if k < 1 {
        return Err(Error::Domain("sparsity k must be at least 1".into()));
    }
    if y.shape() != (frame.d, 1) {
        return Err(shape("block_omp_recover", y.shape(), (frame.d, 1)));
    }
    let ynorm = y.frobenius_norm();
    let mut residual = y.clone();
    let mut support: Vec<usize> = Vec::new();
    let mut coef = Mat::zeros(y.field(), 0, 1);
    for _ in 0..k.min(frame.n) {
        if residual.frobenius_norm() <= 1e-14 * ynorm {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, phi) in frame.isometries.iter().enumerate() {
            if support.contains(&i) {
                continue;
            }
            let score = phi.adjoint_mul(&residual)?.frobenius_norm();
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        let (i, _) = best.expect("unselected block remains");
        support.push(i);
        let refs: Vec<&Mat> = support.iter().map(|&s| &frame.isometries[s]).collect();
        let a = Mat::hstack(&refs)?;
        coef = lstsq(&a, y)?;
        residual = y - &(&a * &coef);
    }
    let r = frame.r;
    let coefficients = (0..support.len()).map(|t| coef.submatrix(t * r, 0, r, 1)).collect();
    Ok(BlockSparse {
        support,
        coefficients,
    })
}

/// Sparsity below which block OMP provably recovers: (1/μ + 1)/2.
pub fn omp_guarantee(coherence: f64) -> f64 {
    if coherence == 0.0 {
        f64::INFINITY
    } else {
        (1.0 / coherence + 1.0) / 2.0
    }
}

/// Random k-block-sparse trials; returns how many were recovered exactly.
pub fn omp_trials(frame: &FusionFrame, k: usize, trials: usize, seed: u64) -> Result<usize> {
    if k < 1 || k > frame.n {
        return Err(Error::Domain(format!("sparsity must be in 1..={}, got {k}", frame.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recovered = 0;
    for _ in 0..trials {
        let mut support: Vec<usize> = sample(&mut rng, frame.n, k).into_vec();
        support.sort_unstable();
        let coeffs: Vec<Mat> = support
            .iter()
            .map(|_| random_gaussian(frame.field, frame.r, 1, &mut rng))
            .collect();
        let mut y = Mat::zeros(frame.field, frame.d, 1);
        for (&i, x) in support.iter().zip(&coeffs) {
            y = &y + &(&frame.isometries[i] * x);
        }
        let got = block_omp_recover(frame, &y, k)?;
        let mut pairs: Vec<(usize, &Mat)> = got.support.iter().copied().zip(&got.coefficients).collect();
        pairs.sort_by_key(|p| p.0);
        let ok = pairs.len() == k
            && pairs.iter().zip(support.iter().zip(&coeffs)).all(|((gi, gx), (&si, sx))| {
                *gi == si && gx.max_diff(sx).unwrap_or(f64::INFINITY) <= 1e-8 * (1.0 + sx.max_abs())
            });
        if ok {
            recovered += 1;
        }
    }
    Ok(recovered)
}
