//! Permutation symmetries of fusion frames: certificates, explicit witnesses
//! for skew simplices, numerical witness search, and total-symmetry data.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eitff::{
    canonical_simplex, eitff_params, frame_from_simplex, non_identity_members, FusionFrame,
};
use crate::error::{shape, Error, Result};
use crate::linalg::{nullspace, polar_unitary, singular_values, Field, Mat, C64, ZERO};
use crate::radon_hurwitz::{
    build_rho_orthonormal, decompose_r, inflate_real, rho_number, size16_family, tensor,
    Generator, RhoOrthonormalSeq,
};
use crate::simplex::{RhoSimplex, verify_rho_simplex};

/// A permutation of {0, …, n−1}; printed and parsed 1-indexed in one-line form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Permutation> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("not a permutation of 1..{n}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Swaps i and j (0-indexed).
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Permutation> {
        if i >= n || j >= n || i == j {
            return Err(Error::Domain(format!("bad transposition ({}, {}) on {n} points", i + 1, j + 1)));
        }
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i, j);
        Ok(Permutation { image })
    }

    /// Maps i → i+1 → i+2 → i (0-indexed).
    pub fn three_cycle(n: usize, i: usize) -> Result<Permutation> {
        if i + 2 >= n {
            return Err(Error::Domain(format!("3-cycle at {} does not fit in {n} points", i + 1)));
        }
        let mut image: Vec<usize> = (0..n).collect();
        image[i] = i + 1;
        image[i + 1] = i + 2;
        image[i + 2] = i;
        Ok(Permutation { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::Domain("composing permutations of different sizes".into()));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    /// The swapped pair (j, k), j < k, if this is a transposition.
    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.n()).filter(|&i| self.image[i] != i).collect();
        match moved[..] {
            [j, k] if self.image[j] == k => Some((j, k)),
            _ => None,
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Permutation> {
        let image = s
            .split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::InvalidInput(format!("bad permutation entry {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if image.is_empty() {
            return Err(Error::InvalidInput("empty permutation".into()));
        }
        Permutation::new(image)
    }
}

/// A unitary Υ with Υ Π_i Υ* = Π_σ(i) for every i.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCertificate {
    pub sigma: Permutation,
    pub upsilon: Mat,
    pub residual: f64,
}

/// max_i ‖Υ Π_i Υ* − Π_σ(i)‖_max.
pub fn check_certificate(frame: &FusionFrame, sigma: &Permutation, upsilon: &Mat) -> Result<f64> {
    if sigma.n() != frame.n {
        return Err(shape("check_certificate", (sigma.n(), 0), (frame.n, 0)));
    }
    if upsilon.shape() != (frame.d, frame.d) {
        return Err(shape("check_certificate", upsilon.shape(), (frame.d, frame.d)));
    }
    let projs = frame.projections();
    let ua = upsilon.adjoint();
    let mut worst: f64 = 0.0;
    for (i, p) in projs.iter().enumerate() {
        let moved = &(upsilon * p) * &ua;
        worst = worst.max(moved.max_diff(&projs[sigma.apply(i)])?);
    }
    Ok(worst)
}

fn certify(frame: &FusionFrame, sigma: Permutation, upsilon: Mat) -> Result<SymmetryCertificate> {
    let residual = check_certificate(frame, &sigma, &upsilon)?;
    Ok(SymmetryCertificate {
        sigma,
        upsilon,
        residual,
    })
}

fn transposition_upsilon(s: &RhoSimplex, j: usize, k: usize) -> Result<Mat> {
    let n = s.n;
    if !(j < k && k < n) {
        return Err(Error::Domain(format!("need 1 <= j < k <= {n}, got ({}, {})", j + 1, k + 1)));
    }
    if let Some(res) = s.mats.iter().map(|b| (&b.adjoint() + b).max_abs()).find(|&x| x > 1e-12) {
        return Err(Error::InvalidInput(format!("simplex is not skew-Hermitian (residual {res:e})")));
    }
    let p = eitff_params(n)?;
    let bj = &s.mats[j];
    Ok(if k < n - 1 {
        let a = (bj - &s.mats[k]).scale_real(p.alpha);
        Mat::block_diag(&[&a, &-&a])
    } else {
        let id = Mat::identity(s.r).scale_real(p.beta);
        let top = Mat::hstack(&[&bj.scale_real(p.alpha), &id])?;
        let bot = Mat::hstack(&[&-&id, &bj.scale_real(-p.alpha)])?;
        Mat::vstack(&[&top, &bot])?
    })
}

/// Explicit witness for swapping subspaces j < k (0-indexed) of the frame
/// built from a skew-Hermitian ρ-simplex.
pub fn transposition_witness(s: &RhoSimplex, j: usize, k: usize) -> Result<SymmetryCertificate> {
    let upsilon = transposition_upsilon(s, j, k)?;
    let frame = frame_from_simplex(s)?;
    certify(&frame, Permutation::transposition(s.n, j, k)?, upsilon)
}

/// Witness for σ1∘σ2 on a canonical EITFF(2r, r, n), from explicit witnesses
/// on the doubled skew simplex.
pub fn alternating_witness(
    frame: &FusionFrame,
    sigma1: &Permutation,
    sigma2: &Permutation,
) -> Result<SymmetryCertificate> {
    if frame.n < 4 {
        return Err(Error::Domain(format!("need n >= 4, got {}", frame.n)));
    }
    let (Some((j1, k1)), Some((j2, k2))) = (sigma1.as_transposition(), sigma2.as_transposition()) else {
        return Err(Error::InvalidInput("both permutations must be transpositions".into()));
    };
    if sigma1.n() != frame.n || sigma2.n() != frame.n {
        return Err(Error::Domain("permutation size differs from frame".into()));
    }
    let base = canonical_simplex(frame, 1e-9)?;
    let rh = base.r;
    let z = Mat::zeros(Field::Real, rh, rh);
    let doubled = base
        .mats
        .iter()
        .map(|b| {
            let top = Mat::hstack(&[&z, &-&b.adjoint()])?;
            let bot = Mat::hstack(&[b, &z])?;
            Mat::vstack(&[&top, &bot])
        })
        .collect::<Result<Vec<_>>>()?;
    let doubled = RhoSimplex::new(base.field, doubled)?;
    let u1 = transposition_upsilon(&doubled, j1, k1)?;
    let u2 = transposition_upsilon(&doubled, j2, k2)?;

    // block permutation (1, 4, 2, 3) with blocks of size r̂
    let id = Mat::identity(rh);
    let mut p = Mat::zeros(Field::Real, 4 * rh, 4 * rh);
    for (row, col) in [(0, 0), (1, 3), (2, 1), (3, 2)] {
        p.set_block(row * rh, col * rh, &id);
    }
    let pa = p.adjoint();
    let prod = &(&(&p * &u1) * &pa) * &(&(&p * &u2) * &pa);
    let corner = prod.submatrix(0, 0, 2 * rh, 2 * rh);
    certify(frame, sigma1.compose(sigma2)?, corner)
}

/// Searches for a unitary intertwiner Υ Π_i = Π_σ(i) Υ.
///
/// `None` means no witness was found at this tolerance, not that none exists.
pub fn find_witness(
    frame: &FusionFrame,
    sigma: &Permutation,
    tol: f64,
    seed: u64,
) -> Result<Option<SymmetryCertificate>> {
    if sigma.n() != frame.n {
        return Err(shape("find_witness", (sigma.n(), 0), (frame.n, 0)));
    }
    let d = frame.d;
    let projs = frame.projections();
    let id = Mat::identity(d);
    // row-major vec: vec(ΥΠ) = (I ⊗ Πᵀ)vec(Υ), vec(ΠΥ) = (Π ⊗ I)vec(Υ)
    let blocks: Vec<Mat> = (0..frame.n)
        .map(|i| &id.kron(&projs[i].transpose()) - &projs[sigma.apply(i)].kron(&id))
        .collect();
    let refs: Vec<&Mat> = blocks.iter().collect();
    let op = Mat::vstack(&refs)?;
    let basis = nullspace(&op, 1e-10)?;
    if basis.cols() == 0 {
        return Ok(None);
    }
    let unvec = |v: &dyn Fn(usize) -> C64| Mat::from_fn(op.field(), d, d, |a, b| v(a * d + b));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..basis.cols()).map(|_| rng.sample(StandardNormal)).collect();
    let mut candidates = vec![unvec(&|k| {
        (0..basis.cols()).fold(ZERO, |acc, c| acc + basis.get(k, c) * weights[c])
    })];
    candidates.extend((0..basis.cols()).map(|c| unvec(&|k| basis.get(k, c))));

    for x in candidates {
        let s = singular_values(&x)?;
        let (smax, smin) = (s[0], s[s.len() - 1]);
        if !(smin > 1e-8 * smax) {
            continue;
        }
        let upsilon = polar_unitary(&x)?;
        let residual = check_certificate(frame, sigma, &upsilon)?;
        if residual <= tol {
            return Ok(Some(SymmetryCertificate {
                sigma: sigma.clone(),
                upsilon,
                residual,
            }));
        }
    }
    Ok(None)
}

/// Moves a certificate of a tight frame to a Naimark complement of it.
pub fn transfer_to_complement(
    frame: &FusionFrame,
    complement: &FusionFrame,
    cert: &SymmetryCertificate,
) -> Result<SymmetryCertificate> {
    if complement.n != frame.n || complement.r != frame.r {
        return Err(Error::InvalidInput("complement does not match the frame".into()));
    }
    let nr = frame.n * frame.r;
    let k = complement.d;
    let sigma = &cert.sigma;
    let ua = cert.upsilon.adjoint();
    let mut acc = Mat::zeros(frame.field.join(cert.upsilon.field()), k, k);
    for i in 0..frame.n {
        let si = sigma.apply(i);
        let z = frame.isometries[i].adjoint_mul(&(&ua * &frame.isometries[si]))?;
        let term = &(&complement.isometries[si] * &z.adjoint()) * &complement.isometries[i].adjoint();
        acc = &acc + &term;
    }
    certify(complement, sigma.clone(), acc.scale_real(k as f64 / nr as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Existence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Existence::Yes => "yes",
            Existence::No => "no",
            Existence::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub answer: Existence,
    pub reason: String,
    /// The violated bound when the answer is no.
    pub bound: Option<String>,
}

/// Existence of a totally symmetric EITFF(2r, r, n).
pub fn totally_symmetric_exists(field: Field, r: usize, n: usize) -> Result<Verdict> {
    if n < 3 {
        return Err(Error::Domain(format!("n must be at least 3, got {n}")));
    }
    let rho = rho_number(field, r)?;
    let c = decompose_r(r)?.c;
    let yes = |reason: String| Verdict { answer: Existence::Yes, reason, bound: None };
    let no = |reason: String, bound: &str| Verdict {
        answer: Existence::No,
        reason,
        bound: Some(bound.into()),
    };
    Ok(if n <= rho + 1 {
        yes(format!("n <= rho+1 = {}: a skew-Hermitian simplex exists", rho + 1))
    } else if n > rho + 2 {
        no(format!("n > rho+2 = {}: no EITFF exists at all", rho + 2), "n <= rho+2")
    } else {
        match (field, c) {
            (Field::Complex, _) => no(
                format!("complex field at n = rho+2 = {}: total symmetry needs n <= rho+1", rho + 2),
                "n <= rho+1",
            ),
            (Field::Real, 0 | 1) => yes(format!(
                "real field at n = rho+2 with c = {c}: explicit commuting/anticommuting data exists"
            )),
            (Field::Real, 3) => no(
                "real field at n = rho+2 with c = 3: the complex obstruction applies".into(),
                "n <= rho+1",
            ),
            _ => Verdict {
                answer: Existence::Unknown,
                reason: "real field at n = rho+2 with c = 2 is an open case".into(),
                bound: None,
            },
        }
    })
}

/// A ρ-orthonormal sequence starting with I plus a unitary U that commutes
/// with every member except the last, which it anticommutes with.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalSymmetryData {
    pub field: Field,
    pub r: usize,
    pub n: usize,
    pub cs: RhoOrthonormalSeq,
    pub u: Mat,
}

impl TotalSymmetryData {
    /// Max of ‖UC_{last} + C_{last}U‖ and ‖UC_i − C_iU‖ over the others.
    pub fn residual(&self) -> f64 {
        let m = self.cs.len();
        self.cs
            .mats
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (uc, cu) = (&self.u * c, c * &self.u);
                if i + 1 == m { (&uc + &cu).max_abs() } else { (&uc - &cu).max_abs() }
            })
            .fold(0.0, f64::max)
    }

    /// Certificate for swapping subspaces n−2 and n−1 (1-indexed) of the
    /// frame built from this data.
    pub fn certificate(&self, frame: &FusionFrame) -> Result<SymmetryCertificate> {
        let sigma = Permutation::transposition(self.n, self.n - 3, self.n - 2)?;
        certify(frame, sigma, Mat::block_diag(&[&self.u, &self.u]))
    }
}

pub fn total_symmetry_data(field: Field, r: usize, n: usize) -> Result<TotalSymmetryData> {
    if n < 4 {
        return Err(Error::Domain(format!("total symmetry data needs n >= 4, got {n}")));
    }
    let verdict = totally_symmetric_exists(field, r, n)?;
    match verdict.answer {
        Existence::No => {
            return Err(Error::Infeasible {
                bound: verdict.bound.unwrap_or_default(),
                detail: verdict.reason,
            })
        }
        Existence::Unknown => return Err(Error::UnknownFeasibility(verdict.reason)),
        Existence::Yes => {}
    }
    let rho = rho_number(field, r)?;
    let (mats, u) = if n <= rho + 1 {
        let seq = build_rho_orthonormal(field, r, n - 1)?;
        let d = non_identity_members(&seq.mats);
        let u = &d[n - 3] * &d[n - 4];
        let mut mats = vec![Mat::identity(r)];
        mats.extend(d[..n - 3].iter().cloned());
        (mats, u)
    } else {
        real_extremal_data(r)?
    };
    let data = TotalSymmetryData {
        field,
        r,
        n,
        cs: RhoOrthonormalSeq { field, r, mats },
        u,
    };
    debug_assert!(data.residual() <= 1e-12);
    Ok(data)
}

/// Real data at n = ρ+2 for c ∈ {0, 1}.
fn real_extremal_data(r: usize) -> Result<(Vec<Mat>, Mat)> {
    use Generator::*;
    let dec = decompose_r(r)?;
    let (mut skew, mut u, mut size, rounds) = match (dec.b, dec.c) {
        (_, 1) => (vec![R.mat()], M.mat(), 2, dec.b),
        (b, 0) if b >= 1 => (size16_family(), tensor(&[I, M, M, M]), 16, b - 1),
        _ => return Err(Error::Domain(format!("no extremal total-symmetry data for r={r}"))),
    };
    for _ in 0..rounds {
        skew = inflate_real(&skew, size)?;
        u = Mat::identity(16).kron(&u);
        size *= 16;
    }
    // the single member anticommuting with U goes last
    let anti: Vec<bool> = skew
        .iter()
        .map(|c| (&(&u * c) + &(c * &u)).max_abs() == 0.0)
        .collect();
    if anti.iter().filter(|&&a| a).count() != 1 {
        return Err(Error::Numeric("expected exactly one anticommuting member".into()));
    }
    let pos = anti.iter().position(|&a| a).expect("one");
    let last = skew.remove(pos);
    skew.push(last);

    let odd = Mat::identity(dec.odd_part());
    let mut mats = vec![Mat::identity(r)];
    mats.extend(skew.iter().map(|c| odd.kron(c)));
    Ok((mats, odd.kron(&u)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    Total,
    Alternating,
    Other,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Total => "total",
            SymmetryClass::Alternating => "alternating",
            SymmetryClass::Other => "other",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub class: SymmetryClass,
    pub witnesses: Vec<SymmetryCertificate>,
}

pub const PROBE_MAX_N: usize = 8;

/// Classifies the symmetry group by searching for witnesses of its generators:
/// adjacent transpositions for total, consecutive 3-cycles for alternating.
pub fn probe_symmetry(frame: &FusionFrame, tol: f64, seed: u64) -> Result<ProbeResult> {
    let n = frame.n;
    if n > PROBE_MAX_N {
        return Err(Error::Domain(format!("probing is limited to n <= {PROBE_MAX_N}, got {n}")));
    }
    let search = |gens: Vec<Permutation>| -> Result<Option<Vec<SymmetryCertificate>>> {
        let mut found = Vec::with_capacity(gens.len());
        for (t, g) in gens.iter().enumerate() {
            match find_witness(frame, g, tol, seed.wrapping_add(t as u64))? {
                Some(c) => found.push(c),
                None => return Ok(None),
            }
        }
        Ok(Some(found))
    };
    let adjacent = (0..n.saturating_sub(1))
        .map(|i| Permutation::transposition(n, i, i + 1))
        .collect::<Result<Vec<_>>>()?;
    if let Some(witnesses) = search(adjacent)? {
        return Ok(ProbeResult { class: SymmetryClass::Total, witnesses });
    }
    let cycles = (0..n.saturating_sub(2))
        .map(|i| Permutation::three_cycle(n, i))
        .collect::<Result<Vec<_>>>()?;
    if let Some(witnesses) = search(cycles)? {
        return Ok(ProbeResult { class: SymmetryClass::Alternating, witnesses });
    }
    Ok(ProbeResult { class: SymmetryClass::Other, witnesses: Vec::new() })
}

/// Checks that a simplex is skew-Hermitian and a ρ-simplex.
pub fn is_skew_simplex(s: &RhoSimplex, tol: f64) -> Result<bool> {
    let skew = s.mats.iter().all(|b| (&b.adjoint() + b).max_abs() <= tol);
    Ok(skew && verify_rho_simplex(s)? <= tol)
}
