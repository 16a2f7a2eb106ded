//! Radon–Hurwitz numbers and explicit ρ-orthonormal unitary families.

use crate::error::{shape, Error, Result};
use crate::linalg::{identity_residual, Field, Mat, C64, I as IMAG, ONE};

/// r = (2a+1)·2^(4b+c) with 0 ≤ c ≤ 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhDecomposition {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl RhDecomposition {
    pub fn odd_part(&self) -> usize {
        2 * self.a + 1
    }

    pub fn reconstruct(&self) -> usize {
        self.odd_part() << (4 * self.b + self.c)
    }
}

pub fn decompose_r(r: usize) -> Result<RhDecomposition> {
    if r == 0 {
        return Err(Error::Domain("r must be positive".into()));
    }
    let k = r.trailing_zeros() as usize;
    Ok(RhDecomposition {
        a: ((r >> k) - 1) / 2,
        b: k / 4,
        c: k % 4,
    })
}

pub fn rho_number(field: Field, r: usize) -> Result<usize> {
    let RhDecomposition { b, c, .. } = decompose_r(r)?;
    Ok(match field {
        Field::Real => 8 * b + (1 << c),
        Field::Complex => 8 * b + 2 * c + 2,
    })
}

/// The 2×2 building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    I,
    M,
    T,
    R,
}

impl Generator {
    pub fn mat(self) -> Mat {
        let rows: [[f64; 2]; 2] = match self {
            Generator::I => [[1.0, 0.0], [0.0, 1.0]],
            Generator::M => [[1.0, 0.0], [0.0, -1.0]],
            Generator::T => [[0.0, 1.0], [1.0, 0.0]],
            Generator::R => [[0.0, -1.0], [1.0, 0.0]],
        };
        Mat::from_real_rows(&[&rows[0], &rows[1]])
    }
}

/// Left-to-right Kronecker product of generators.
pub fn tensor(gens: &[Generator]) -> Mat {
    gens.iter()
        .fold(Mat::identity(1), |acc, g| acc.kron(&g.mat()))
}

/// ⟨a, b⟩ = Re Tr(a*b) / r.
pub fn rho_inner(a: &Mat, b: &Mat) -> Result<f64> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(shape("rho_inner", a.shape(), b.shape()));
    }
    let tr: C64 = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |k| (i, k)))
        .map(|(i, k)| a.get(k, i).conj() * b.get(k, i))
        .sum();
    Ok(tr.re / a.rows() as f64)
}

/// A sequence of r×r unitaries, pairwise ρ-orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoOrthonormalSeq {
    pub field: Field,
    pub r: usize,
    pub mats: Vec<Mat>,
}

impl RhoOrthonormalSeq {
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }
}

/// The size-16 family, in column order of its usual two-column display.
pub fn size16_family() -> Vec<Mat> {
    use Generator::*;
    [
        [R, T, T, T],
        [T, R, T, M],
        [T, M, R, T],
        [T, T, M, R],
        [R, M, M, M],
        [M, R, M, T],
        [M, T, R, M],
        [M, M, T, R],
    ]
    .iter()
    .map(|g| tensor(g))
    .collect()
}

/// Maximal anticommuting skew-symmetric orthogonal families for r ∈ {2,4,8,16}.
pub fn real_base_family(r: usize) -> Result<Vec<Mat>> {
    use Generator::*;
    let words: Vec<Vec<Generator>> = match r {
        2 => vec![vec![R]],
        4 => vec![vec![I, R], vec![R, T], vec![R, M]],
        8 => vec![
            vec![M, M, R],
            vec![M, T, R],
            vec![M, R, I],
            vec![T, R, M],
            vec![T, R, T],
            vec![T, I, R],
            vec![R, I, I],
        ],
        16 => return Ok(size16_family()),
        _ => return Err(Error::Domain(format!("no base family for r={r}; expected 2, 4, 8 or 16"))),
    };
    Ok(words.iter().map(|w| tensor(w)).collect())
}

/// Max residual of skew-Hermitian, unitary and pairwise anticommuting.
fn skew_family_residual(seq: &[Mat]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in seq.iter().enumerate() {
        worst = worst.max((&a.adjoint() + a).max_abs());
        worst = worst.max(a.unitarity_residual());
        for b in &seq[i + 1..] {
            worst = worst.max((&(a * b) + &(b * a)).max_abs());
        }
    }
    worst
}

/// Turns m anticommuting skew-Hermitian unitaries of size r into m+8 of size 16r.
///
/// `r` is explicit so the empty family can be inflated.
pub fn inflate_real(seq: &[Mat], r: usize) -> Result<Vec<Mat>> {
    if let Some(bad) = seq.iter().find(|c| c.shape() != (r, r)) {
        return Err(shape("inflate_real", bad.shape(), (r, r)));
    }
    let res = skew_family_residual(seq);
    if res > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "family is not anticommuting skew-Hermitian unitary (residual {res:e})"
        )));
    }
    use Generator::R;
    let r4 = tensor(&[R, R, R, R]);
    let id = Mat::identity(r);
    let mut out: Vec<Mat> = seq.iter().map(|c| r4.kron(c)).collect();
    out.extend(size16_family().iter().map(|e| e.kron(&id)));
    Ok(out)
}

fn complex_double(seq: &[Mat]) -> Vec<Mat> {
    let s = seq.first().map_or(1, |c| c.rows());
    let z = Mat::zeros(Field::Real, s, s);
    let mut out: Vec<Mat> = seq
        .iter()
        .map(|c| {
            let top = Mat::hstack(&[&z, &-&c.adjoint()]).expect("square");
            let bot = Mat::hstack(&[c, &z]).expect("square");
            Mat::vstack(&[&top, &bot]).expect("square")
        })
        .collect();
    let id = Mat::identity(s);
    out.push(Generator::M.mat().scale(IMAG).kron(&id));
    out.push(Mat::identity(2 * s));
    out
}

fn maximal_sequence(field: Field, r: usize) -> Result<Vec<Mat>> {
    let dec = decompose_r(r)?;
    let odd = Mat::identity(dec.odd_part());
    let core = match field {
        Field::Complex => {
            let mut seq = vec![Mat::scalar(IMAG), Mat::scalar(ONE)];
            for _ in 0..4 * dec.b + dec.c {
                seq = complex_double(&seq);
            }
            seq
        }
        Field::Real => {
            let mut skew = if dec.c == 0 { Vec::new() } else { real_base_family(1 << dec.c)? };
            let mut size = 1 << dec.c;
            for _ in 0..dec.b {
                skew = inflate_real(&skew, size)?;
                size *= 16;
            }
            let mut seq = vec![Mat::identity(size)];
            seq.extend(skew);
            seq
        }
    };
    Ok(core.iter().map(|c| odd.kron(c)).collect())
}

/// Length-m ρ-orthonormal sequence in F^{r×r}.
///
/// Complex sequences end with the identity and truncation keeps the last m;
/// real sequences start with the identity and truncation keeps the first m.
/// Either way the identity is always a member.
pub fn build_rho_orthonormal(field: Field, r: usize, m: usize) -> Result<RhoOrthonormalSeq> {
    if m < 1 {
        return Err(Error::Domain("sequence length must be at least 1".into()));
    }
    let rho = rho_number(field, r)?;
    if m > rho {
        return Err(Error::Infeasible {
            bound: format!("m <= rho = {rho}"),
            detail: format!("{m} rho-orthonormal matrices requested in {field}^({r}x{r})"),
        });
    }
    let mut mats = maximal_sequence(field, r)?;
    match field {
        Field::Complex => {
            mats.drain(..rho - m);
        }
        Field::Real => mats.truncate(m),
    }
    let mats = mats
        .into_iter()
        .map(|c| {
            let f = if c.data().iter().all(|z| z.im == 0.0) { Field::Real } else { Field::Complex };
            c.into_field(f).expect("narrowing checked")
        })
        .collect();
    Ok(RhoOrthonormalSeq { field, r, mats })
}

/// max of ‖C_i*C_i − I‖_max and ‖C_i*C_j + C_j*C_i‖_max over i ≠ j.
pub fn verify_rho_orthonormal(mats: &[Mat]) -> Result<f64> {
    let n = mats.first().map_or(0, |c| c.rows());
    if let Some(bad) = mats.iter().find(|c| c.shape() != (n, n)) {
        return Err(shape("verify_rho_orthonormal", bad.shape(), (n, n)));
    }
    let mut worst: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        worst = worst.max(identity_residual(&a.adjoint_mul(a)?));
        for b in &mats[i + 1..] {
            let s = &a.adjoint_mul(b)? + &b.adjoint_mul(a)?;
            worst = worst.max(s.max_abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Generator::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_r(16).unwrap(), RhDecomposition { a: 0, b: 1, c: 0 });
        assert_eq!(decompose_r(2).unwrap(), RhDecomposition { a: 0, b: 0, c: 1 });
        assert_eq!(decompose_r(24).unwrap(), RhDecomposition { a: 1, b: 0, c: 3 });
        assert!(decompose_r(0).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_number(Field::Real, 2).unwrap(), 2);
        assert_eq!(rho_number(Field::Complex, 2).unwrap(), 4);
        assert_eq!(rho_number(Field::Real, 8).unwrap(), 8);
        assert_eq!(rho_number(Field::Complex, 8).unwrap(), 8);
        assert_eq!(rho_number(Field::Real, 1).unwrap(), 1);
        assert_eq!(rho_number(Field::Complex, 1).unwrap(), 2);
        assert_eq!(rho_number(Field::Real, 16).unwrap(), 9);
    }

    #[test]
    fn generator_relations() {
        let (m, t, r) = (M.mat(), T.mat(), R.mat());
        assert_eq!(r.transpose(), r.scale_real(-1.0));
        assert_eq!(m.transpose(), m);
        assert_eq!(t.transpose(), t);
        for (a, b) in [(&m, &t), (&m, &r), (&t, &r)] {
            assert_eq!((&(a * b) + &(b * a)).max_abs(), 0.0);
        }
        for g in [&m, &t, &r] {
            assert_eq!(g.unitarity_residual(), 0.0);
        }
    }

    #[test]
    fn rho_inner_examples() {
        let (i, r) = (I.mat(), R.mat());
        assert_eq!(rho_inner(&i, &i).unwrap(), 1.0);
        assert_eq!(rho_inner(&i, &r).unwrap(), 0.0);
        assert_eq!(rho_inner(&r, &r).unwrap(), 1.0);
        assert!(rho_inner(&i, &Mat::identity(3)).is_err());
    }

    #[test]
    fn base_families() {
        assert_eq!(real_base_family(2).unwrap(), vec![R.mat()]);
        let f4 = real_base_family(4).unwrap();
        assert_eq!(f4.len(), 3);
        assert_eq!(f4[0], tensor(&[I, R]));
        let f8 = real_base_family(8).unwrap();
        assert_eq!(f8.len(), 7);
        assert_eq!(f8[6], tensor(&[R, I, I]));
        let f16 = real_base_family(16).unwrap();
        assert_eq!(f16.len(), 8);
        assert_eq!(f16[0], tensor(&[R, T, T, T]));
        assert_eq!(f16[4], tensor(&[R, M, M, M]));
        for (r, f) in [(2, vec![R.mat()]), (4, f4), (8, f8), (16, f16)] {
            assert_eq!(f.len(), rho_number(Field::Real, r).unwrap() - 1);
            assert_eq!(skew_family_residual(&f), 0.0);
        }
        assert!(matches!(real_base_family(32), Err(Error::Domain(_))));
    }

    #[test]
    fn inflation_examples() {
        let once = inflate_real(&[R.mat()], 2).unwrap();
        assert_eq!(once.len(), 9);
        assert_eq!(once[0].shape(), (32, 32));
        assert_eq!(skew_family_residual(&once), 0.0);

        assert_eq!(inflate_real(&[], 1).unwrap(), size16_family());

        let twice = inflate_real(&once, 32).unwrap();
        assert_eq!(twice.len(), 17);
        assert_eq!(twice[0].shape(), (512, 512));
        assert_eq!(twice.len(), rho_number(Field::Real, 512).unwrap() - 1);
        assert!(skew_family_residual(&twice) <= 1e-12);
    }

    #[test]
    fn inflation_rejects_commuting_input() {
        let bad = [R.mat(), R.mat()];
        assert!(matches!(inflate_real(&bad, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(inflate_real(&[M.mat()], 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn complex_sequence_examples() {
        let s = build_rho_orthonormal(Field::Complex, 2, 4).unwrap();
        let want = vec![T.mat().scale(IMAG), R.mat(), M.mat().scale(IMAG), I.mat()];
        assert_eq!(s.mats, want);

        let s = build_rho_orthonormal(Field::Complex, 4, 6).unwrap();
        let want = vec![
            tensor(&[T, T]).scale(IMAG),
            tensor(&[T, R]),
            tensor(&[T, M]).scale(IMAG),
            tensor(&[R, I]),
            tensor(&[M, I]).scale(IMAG),
            tensor(&[I, I]),
        ];
        assert_eq!(s.mats, want);
    }

    #[test]
    fn real_sequence_examples() {
        let s = build_rho_orthonormal(Field::Real, 1, 1).unwrap();
        assert_eq!(s.mats, vec![Mat::identity(1)]);
        let s = build_rho_orthonormal(Field::Real, 2, 2).unwrap();
        assert_eq!(s.mats, vec![I.mat(), R.mat()]);
        assert_eq!(verify_rho_orthonormal(&s.mats).unwrap(), 0.0);
    }

    #[test]
    fn truncation_keeps_identity() {
        let s = build_rho_orthonormal(Field::Complex, 4, 3).unwrap();
        assert_eq!(s.mats.last().unwrap(), &Mat::identity(4));
        assert_eq!(s.mats[0], tensor(&[R, I]));
        let s = build_rho_orthonormal(Field::Real, 8, 3).unwrap();
        assert_eq!(s.mats[0], Mat::identity(8));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn odd_part_tensored_on_left() {
        let s = build_rho_orthonormal(Field::Real, 6, 2).unwrap();
        assert_eq!(s.mats[1], Mat::identity(3).kron(&R.mat()));
    }

    #[test]
    fn sequence_errors() {
        assert!(matches!(build_rho_orthonormal(Field::Real, 2, 3), Err(Error::Infeasible { .. })));
        assert!(matches!(build_rho_orthonormal(Field::Real, 2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn verify_examples() {
        assert_eq!(verify_rho_orthonormal(&[I.mat(), R.mat()]).unwrap(), 0.0);
        assert_eq!(verify_rho_orthonormal(&[I.mat(), M.mat()]).unwrap(), 2.0);
        assert_eq!(verify_rho_orthonormal(&[I.mat()]).unwrap(), 0.0);
        assert!(verify_rho_orthonormal(&[I.mat(), Mat::identity(3)]).is_err());
    }

    #[test]
    fn maximal_sequences_up_to_64() {
        for r in 1..=64 {
            for field in [Field::Real, Field::Complex] {
                let rho = rho_number(field, r).unwrap();
                let s = build_rho_orthonormal(field, r, rho).unwrap();
                assert_eq!(s.len(), rho);
                assert!(s.mats.iter().all(|c| c.shape() == (r, r)));
                assert!(verify_rho_orthonormal(&s.mats).unwrap() <= 1e-12, "{field} r={r}");
                if field == Field::Real {
                    assert!(s.mats.iter().all(|c| c.field() == Field::Real));
                }
                for (i, a) in s.mats.iter().enumerate() {
                    for (j, b) in s.mats.iter().enumerate() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((rho_inner(a, b).unwrap() - want).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn decomposition_roundtrip(r in 1usize..100_000) {
            let d = decompose_r(r).unwrap();
            prop_assert!(d.c <= 3);
            prop_assert_eq!(d.reconstruct(), r);
        }

        #[test]
        fn complex_rho_doubles(r in 1usize..=128) {
            prop_assert_eq!(
                rho_number(Field::Complex, 2 * r).unwrap(),
                rho_number(Field::Complex, r).unwrap() + 2
            );
        }

        #[test]
        fn real_rho_bounded_by_complex(r in 1usize..100_000) {
            let (re, cx) = (rho_number(Field::Real, r).unwrap(), rho_number(Field::Complex, r).unwrap());
            prop_assert!(re <= cx);
            prop_assert_eq!(re == cx, decompose_r(r).unwrap().c == 3);
        }
    }
}
