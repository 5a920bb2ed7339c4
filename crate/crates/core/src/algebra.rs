//! Matrix Lie algebra arithmetic.
//!
//! Elements are dense `n x n` complex matrices, anti-Hermitian and traceless
//! in `su(n)` mode. The abelian mode keeps the same matrices but replaces
//! every bracket by zero, which turns the monopole system into a linear one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Real 2x2 matrix, row-major.
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY2: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
pub const ALPHA1: Mat2 = [[1.0, 0.0], [0.0, -1.0]];
pub const ALPHA2: Mat2 = [[0.0, 1.0], [1.0, 0.0]];
pub const BETA: Mat2 = [[0.0, 1.0], [-1.0, 0.0]];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Largest absolute entry.
pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// The constant matrices of the first-order system: `alpha = (alpha1, alpha2)`
/// generates the spatial transport and `beta` contracts the pair in the second
/// slot of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureMatrices {
    pub alpha1: Mat2,
    pub alpha2: Mat2,
    pub beta: Mat2,
}

impl StructureMatrices {
    pub const fn new() -> Self {
        Self {
            alpha1: ALPHA1,
            alpha2: ALPHA2,
            beta: BETA,
        }
    }

    /// `alpha . xi = alpha1 xi_1 + alpha2 xi_2`.
    pub fn alpha_dot(&self, xi: [f64; 2]) -> Mat2 {
        [
            [
                self.alpha1[0][0] * xi[0] + self.alpha2[0][0] * xi[1],
                self.alpha1[0][1] * xi[0] + self.alpha2[0][1] * xi[1],
            ],
            [
                self.alpha1[1][0] * xi[0] + self.alpha2[1][0] * xi[1],
                self.alpha1[1][1] * xi[0] + self.alpha2[1][1] * xi[1],
            ],
        ]
    }
}

impl Default for StructureMatrices {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    /// `su(n)`: anti-Hermitian traceless matrices with the commutator bracket.
    Su,
    /// Same matrices, bracket identically zero.
    Abelian,
}

/// Which algebra a value lives in: kind plus matrix size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Algebra {
    pub kind: AlgebraKind,
    pub dim: usize,
}

impl Algebra {
    pub const SU2: Algebra = Algebra {
        kind: AlgebraKind::Su,
        dim: 2,
    };
    pub const ABELIAN2: Algebra = Algebra {
        kind: AlgebraKind::Abelian,
        dim: 2,
    };

    pub fn su(dim: usize) -> Result<Self> {
        Self::new(AlgebraKind::Su, dim)
    }

    pub fn abelian(dim: usize) -> Result<Self> {
        Self::new(AlgebraKind::Abelian, dim)
    }

    pub fn new(kind: AlgebraKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "algebra matrix size must be at least 2, got {dim}"
            )));
        }
        Ok(Self { kind, dim })
    }

    pub fn is_abelian(&self) -> bool {
        self.kind == AlgebraKind::Abelian
    }

    /// Number of complex matrix entries.
    pub fn entries(&self) -> usize {
        self.dim * self.dim
    }
}

impl Default for Algebra {
    fn default() -> Self {
        Self::SU2
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::Su => write!(f, "su({})", self.dim),
            AlgebraKind::Abelian => write!(f, "abelian({})", self.dim),
        }
    }
}

/// A value in the Lie algebra, stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    algebra: Algebra,
    entries: Vec<Complex64>,
}

impl LieElement {
    pub fn zero(algebra: Algebra) -> Self {
        Self {
            algebra,
            entries: vec![Complex64::new(0.0, 0.0); algebra.entries()],
        }
    }

    /// Wraps raw entries without checking the anti-Hermitian invariant.
    pub fn from_entries(algebra: Algebra, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != algebra.entries() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                algebra.dim,
                algebra.dim
            )));
        }
        Ok(Self { algebra, entries })
    }

    /// The generators `e_a = -i sigma_a` of `su(2)`, normalized so that
    /// `[e_1, e_2] = 2 e_3` (cyclically).
    pub fn su2_basis(algebra: Algebra) -> Result<[LieElement; 3]> {
        if algebra.dim != 2 {
            return Err(Error::DimensionMismatch(
                "su(2) basis needs 2x2 matrices".into(),
            ));
        }
        let c = Complex64::new;
        let z = c(0.0, 0.0);
        let e1 = vec![z, c(0.0, -1.0), c(0.0, -1.0), z];
        let e2 = vec![z, c(-1.0, 0.0), c(1.0, 0.0), z];
        let e3 = vec![c(0.0, -1.0), z, z, c(0.0, 1.0)];
        Ok([
            Self::from_entries(algebra, e1)?,
            Self::from_entries(algebra, e2)?,
            Self::from_entries(algebra, e3)?,
        ])
    }

    /// Random element with independent standard normal-ish components,
    /// projected onto anti-Hermitian traceless matrices.
    pub fn random<R: Rng + ?Sized>(algebra: Algebra, rng: &mut R) -> Self {
        let entries = (0..algebra.entries())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut out = Self { algebra, entries };
        project_anti_hermitian_traceless(algebra.dim, &mut out.entries);
        out
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.algebra.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|X + X^dagger|` in the Frobenius norm.
    pub fn anti_hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) + self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            algebra: self.algebra,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Plain matrix product. Not closed in the algebra; used by `pair_dot`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        matmul_acc(n, &self.entries, &other.entries, &mut out, 1.0);
        Ok(Self {
            algebra: self.algebra,
            entries: out,
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            algebra: self.algebra,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch in add");
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch in sub");
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &LieElement {
    type Output = LieElement;
    fn mul(self, rhs: f64) -> LieElement {
        self.scale(rhs)
    }
}

fn check_same(x: &LieElement, y: &LieElement) -> Result<()> {
    if x.algebra != y.algebra {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            x.algebra, y.algebra
        )));
    }
    Ok(())
}

/// `out += scale * a b` for row-major `n x n` matrices.
pub(crate) fn matmul_acc(n: usize, a: &[Complex64], b: &[Complex64], out: &mut [Complex64], scale: f64) {
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k] * scale;
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
}

/// Replaces `x` by `(x - x^dagger)/2 - tr/n` in place.
pub(crate) fn project_anti_hermitian_traceless(n: usize, x: &mut [Complex64]) {
    for i in 0..n {
        for j in i..n {
            let a = x[i * n + j];
            let b = x[j * n + i];
            let upper = (a - b.conj()) * 0.5;
            x[i * n + j] = upper;
            x[j * n + i] = -upper.conj();
        }
    }
    let tr: Complex64 = (0..n).map(|i| x[i * n + i]).sum::<Complex64>() / n as f64;
    for i in 0..n {
        x[i * n + i] -= tr;
    }
}

/// Lie bracket `XY - YX`; zero in abelian mode.
pub fn bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    check_same(x, y)?;
    let mut out = LieElement::zero(x.algebra);
    if x.algebra.is_abelian() {
        return Ok(out);
    }
    let n = x.dim();
    let mut yx = LieElement::zero(x.algebra);
    matmul_acc(n, &x.entries, &y.entries, &mut out.entries, 1.0);
    matmul_acc(n, &y.entries, &x.entries, &mut yx.entries, 1.0);
    for (o, q) in out.entries.iter_mut().zip(&yx.entries) {
        *o -= q;
    }
    Ok(out)
}

/// A value of `u`, `v` or `N(a, b)` at one point: an ordered pair of
/// algebra elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PairValue {
    pub first: LieElement,
    pub second: LieElement,
}

impl PairValue {
    pub fn new(first: LieElement, second: LieElement) -> Result<Self> {
        check_same(&first, &second)?;
        Ok(Self { first, second })
    }

    pub fn zero(algebra: Algebra) -> Self {
        Self {
            first: LieElement::zero(algebra),
            second: LieElement::zero(algebra),
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.first.algebra()
    }

    /// Applies a real 2x2 matrix to the pair index.
    pub fn apply_mat2(&self, m: &Mat2) -> Self {
        let first = &self.first.scale(m[0][0]) + &self.second.scale(m[0][1]);
        let second = &self.first.scale(m[1][0]) + &self.second.scale(m[1][1]);
        Self { first, second }
    }
}

/// `a . b = a_1 b_1 + a_2 b_2` with matrix products.
pub fn pair_dot(a: &PairValue, b: &PairValue) -> Result<LieElement> {
    check_same(&a.first, &b.first)?;
    check_same(&a.second, &b.second)?;
    check_same(&a.first, &a.second)?;
    let first = a.first.matmul(&b.first)?;
    let second = a.second.matmul(&b.second)?;
    Ok(&first + &second)
}

/// Second slot of `N(a, .)` written as the contraction `(beta a) . a`.
pub fn beta_contraction(a: &PairValue) -> Result<LieElement> {
    let beta_a = a.apply_mat2(&BETA);
    pair_dot(&beta_a, a)
}

/// `N(a, b) = ( (a.b - b.a)/2 , (beta a).a )`; identically zero in abelian
/// mode.
pub fn nonlinearity_n(a: &PairValue, b: &PairValue) -> Result<PairValue> {
    check_same(&a.first, &b.first)?;
    let algebra = a.algebra();
    if algebra.is_abelian() {
        return Ok(PairValue::zero(algebra));
    }
    let ab = pair_dot(a, b)?;
    let ba = pair_dot(b, a)?;
    let first = (&ab - &ba).scale(0.5);
    let second = beta_contraction(a)?;
    Ok(PairValue { first, second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &LieElement, b: &LieElement, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn structure_matrices_are_exact() {
        let s = StructureMatrices::new();
        assert_eq!(s.alpha1, [[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(s.alpha2, [[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(s.beta, [[0.0, 1.0], [-1.0, 0.0]]);
        assert_eq!(mat2_mul(&ALPHA1, &ALPHA1), IDENTITY2);
        assert_eq!(mat2_mul(&ALPHA2, &ALPHA2), IDENTITY2);
        let anti = mat2_add(&mat2_mul(&ALPHA1, &ALPHA2), &mat2_mul(&ALPHA2, &ALPHA1));
        assert_eq!(anti, [[0.0; 2]; 2]);
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = LieElement::random(Algebra::SU2, &mut rng);
        assert_eq!(bracket(&x, &x).unwrap().norm(), 0.0);
    }

    #[test]
    fn su2_basis_commutators() {
        // Hand multiplication: (-i s1)(-i s2) - (-i s2)(-i s1) = -(2 i s3) = 2 e3.
        let [e1, e2, e3] = LieElement::su2_basis(Algebra::SU2).unwrap();
        assert!(close(&bracket(&e1, &e2).unwrap(), &e3.scale(2.0), 0.0));
        assert!(close(&bracket(&e2, &e3).unwrap(), &e1.scale(2.0), 0.0));
        assert!(close(&bracket(&e3, &e1).unwrap(), &e2.scale(2.0), 0.0));
        for e in [&e1, &e2, &e3] {
            assert_eq!(e.anti_hermitian_defect(), 0.0);
            assert_eq!(e.trace().norm(), 0.0);
        }
    }

    #[test]
    fn abelian_bracket_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = LieElement::random(Algebra::ABELIAN2, &mut rng);
        let y = LieElement::random(Algebra::ABELIAN2, &mut rng);
        assert_eq!(bracket(&x, &y).unwrap().norm(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = LieElement::zero(Algebra::SU2);
        let y = LieElement::zero(Algebra::su(3).unwrap());
        assert!(matches!(bracket(&x, &y), Err(Error::DimensionMismatch(_))));
        let z = LieElement::zero(Algebra::ABELIAN2);
        assert!(bracket(&x, &z).is_err());
        assert!(Algebra::su(1).is_err());
    }

    #[test]
    fn bracket_stays_in_su_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2, 3, 4] {
            let alg = Algebra::su(dim).unwrap();
            let x = LieElement::random(alg, &mut rng);
            let y = LieElement::random(alg, &mut rng);
            let z = bracket(&x, &y).unwrap();
            assert!(z.anti_hermitian_defect() < 1e-12);
            assert!(z.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn jacobi_identity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x = LieElement::random(Algebra::SU2, &mut rng);
            let y = LieElement::random(Algebra::SU2, &mut rng);
            let z = LieElement::random(Algebra::SU2, &mut rng);
            let a = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
            let b = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
            let c = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
            worst = worst.max((&(&a + &b) + &c).norm());
        }
        assert!(worst <= 1e-12, "Jacobi defect {worst}");
    }

    #[test]
    fn pair_dot_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = LieElement::random(Algebra::SU2, &mut rng);
        let y = LieElement::random(Algebra::SU2, &mut rng);
        let zero = LieElement::zero(Algebra::SU2);
        let a = PairValue::new(zero.clone(), x.clone()).unwrap();
        let b = PairValue::new(zero.clone(), y.clone()).unwrap();
        assert!(close(&pair_dot(&a, &b).unwrap(), &x.matmul(&y).unwrap(), 1e-15));

        let a = PairValue::new(x.clone(), y.clone()).unwrap();
        let expect = &x.matmul(&x).unwrap() + &y.matmul(&y).unwrap();
        assert!(close(&pair_dot(&a, &a).unwrap(), &expect, 1e-15));
    }

    /// `u = (A0 + A1, phi + A2)`, `v = (A0 - A1, phi - A2)` at one point.
    fn uv_from_fields(
        phi: &LieElement,
        a0: &LieElement,
        a1: &LieElement,
        a2: &LieElement,
    ) -> (PairValue, PairValue) {
        (
            PairValue::new(a0 + a1, phi + a2).unwrap(),
            PairValue::new(a0 - a1, phi - a2).unwrap(),
        )
    }

    #[test]
    fn nonlinearity_reproduces_component_right_hand_sides() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = |x: &LieElement, y: &LieElement| bracket(x, y).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let phi = LieElement::random(Algebra::SU2, &mut rng);
            let a0 = LieElement::random(Algebra::SU2, &mut rng);
            let a1 = LieElement::random(Algebra::SU2, &mut rng);
            let a2 = LieElement::random(Algebra::SU2, &mut rng);
            let (u, v) = uv_from_fields(&phi, &a0, &a1, &a2);

            // Right-hand sides of the four component equations.
            let rhs_phi = &b(&a2, &a1) + &b(&phi, &a0);
            let rhs_a0 = LieElement::zero(Algebra::SU2);
            let rhs_a1 = &b(&a2, &phi) + &b(&a1, &a0);
            let rhs_a2 = &b(&phi, &a1) + &b(&a2, &a0);

            let nuv = nonlinearity_n(&u, &v).unwrap();
            let nvu = nonlinearity_n(&v, &u).unwrap();
            // u_1 = A0 + A1, u_2 = phi + A2, v_1 = A0 - A1, v_2 = phi - A2.
            worst = worst.max((&nuv.first - &(&rhs_a0 + &rhs_a1)).norm());
            worst = worst.max((&nuv.second - &(&rhs_phi + &rhs_a2)).norm());
            worst = worst.max((&nvu.first - &(&rhs_a0 - &rhs_a1)).norm());
            worst = worst.max((&nvu.second - &(&rhs_phi - &rhs_a2)).norm());

            // First slot of N(u, v) on its own: [A1, A0] + [A2, phi].
            let half = (&pair_dot(&u, &v).unwrap() - &pair_dot(&v, &u).unwrap()).scale(0.5);
            worst = worst.max((&half - &(&b(&a1, &a0) + &b(&a2, &phi))).norm());
        }
        assert!(worst <= 1e-12, "component identity defect {worst}");
    }

    #[test]
    fn second_slot_two_ways_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = LieElement::random(Algebra::SU2, &mut rng);
            let y = LieElement::random(Algebra::SU2, &mut rng);
            let a = PairValue::new(x.clone(), y.clone()).unwrap();
            let contraction = beta_contraction(&a).unwrap();
            let direct = bracket(&y, &x).unwrap();
            assert_eq!(contraction, direct);
            let n = nonlinearity_n(&a, &a).unwrap();
            assert_eq!(n.second, direct);
        }
    }

    #[test]
    fn abelian_nonlinearity_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = PairValue::new(
            LieElement::random(Algebra::ABELIAN2, &mut rng),
            LieElement::random(Algebra::ABELIAN2, &mut rng),
        )
        .unwrap();
        let b = PairValue::new(
            LieElement::random(Algebra::ABELIAN2, &mut rng),
            LieElement::random(Algebra::ABELIAN2, &mut rng),
        )
        .unwrap();
        let n = nonlinearity_n(&a, &b).unwrap();
        assert_eq!(n, PairValue::zero(Algebra::ABELIAN2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn element(seed: u64) -> LieElement {
            LieElement::random(Algebra::SU2, &mut ChaCha8Rng::seed_from_u64(seed))
        }

        proptest! {
            #[test]
            fn bracket_is_bilinear_and_antisymmetric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), c in -3.0..3.0f64) {
                let (x, y, z) = (element(s1), element(s2), element(s3));
                let lhs = bracket(&(&x.scale(c) + &z), &y).unwrap();
                let rhs = &bracket(&x, &y).unwrap().scale(c) + &bracket(&z, &y).unwrap();
                prop_assert!((&lhs - &rhs).norm() < 1e-12);
                let anti = &bracket(&x, &y).unwrap() + &bracket(&y, &x).unwrap();
                prop_assert!(anti.norm() < 1e-15);
            }
        }
    }
}
