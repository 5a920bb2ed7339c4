//! The rank-one Fourier projections `m_+-(xi) = (I +- alpha.xi/|xi|)/2` that
//! split `alpha . grad` into the two half-wave operators `+-i|grad|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Mat2, StructureMatrices, IDENTITY2};
use crate::error::{Error, Result};
use crate::spectral::{apply_matrix_multiplier, to_repr, Field, PairField, Repr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `m_sign(xi)`. At the origin the symbol is taken to be `I/2`, which keeps
/// `m_+ + m_- = I` and symmetry.
pub fn m_symbol(xi: [f64; 2], sign: Sign) -> Mat2 {
    let r = xi[0].hypot(xi[1]);
    if r == 0.0 {
        return [[0.5, 0.0], [0.0, 0.5]];
    }
    let a = StructureMatrices::new().alpha_dot([xi[0] / r, xi[1] / r]);
    let s = 0.5 * sign.value();
    [
        [0.5 + s * a[0][0], s * a[0][1]],
        [s * a[1][0], 0.5 + s * a[1][1]],
    ]
}

fn complexify(m: &Mat2) -> [[Complex64; 2]; 2] {
    let c = |x: f64| Complex64::new(x, 0.0);
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

/// `M_sign f`, acting on the pair index mode by mode.
pub fn project(f: &PairField, sign: Sign) -> Result<PairField> {
    apply_matrix_multiplier(f, |xi| complexify(&m_symbol(xi, sign)))
}

/// `alpha_1 d_1 + alpha_2 d_2`, computed spectrally as the symbol
/// `i alpha . xi`. Accepts either representation and returns the same one.
pub fn alpha_grad(f: &PairField) -> Result<PairField> {
    let repr = f.repr();
    let hat = to_repr(f, Repr::Fourier)?;
    let structure = StructureMatrices::new();
    let out = apply_matrix_multiplier(&hat, |xi| {
        let a = structure.alpha_dot(xi);
        let i = Complex64::new(0.0, 1.0);
        [[i * a[0][0], i * a[0][1]], [i * a[1][0], i * a[1][1]]]
    })?;
    to_repr(&out, repr)
}

/// Same operator assembled as `i |grad| (M_+ - M_-)`.
pub fn alpha_grad_via_projections(f: &PairField) -> Result<PairField> {
    let repr = f.repr();
    let hat = to_repr(f, Repr::Fourier)?;
    let out = apply_matrix_multiplier(&hat, |xi| {
        let r = xi[0].hypot(xi[1]);
        let p = m_symbol(xi, Sign::Plus);
        let m = m_symbol(xi, Sign::Minus);
        let i_r = Complex64::new(0.0, r);
        [
            [i_r * (p[0][0] - m[0][0]), i_r * (p[0][1] - m[0][1])],
            [i_r * (p[1][0] - m[1][0]), i_r * (p[1][1] - m[1][1])],
        ]
    })?;
    to_repr(&out, repr)
}

/// Largest singular value of a real 2x2 matrix.
pub fn spectral_norm2(a: &Mat2) -> f64 {
    let fro2: f64 = a.iter().flatten().map(|x| x * x).sum();
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    (0.5 * (fro2 + disc.sqrt())).sqrt()
}

/// `|| m_{signs.0}(eta) m_{signs.1}(xi) ||` in operator norm.
pub fn projection_product_norm(xi: [f64; 2], eta: [f64; 2], signs: (Sign, Sign)) -> Result<f64> {
    if xi == [0.0, 0.0] || eta == [0.0, 0.0] {
        return Err(Error::ZeroVector);
    }
    let product = crate::algebra::mat2_mul(&m_symbol(eta, signs.0), &m_symbol(xi, signs.1));
    Ok(spectral_norm2(&product))
}

/// Worst deviation from the projection identities at `xi` (and `-xi` for
/// parity): idempotence, orthogonality, resolution of identity, symmetry,
/// `beta m_+- = m_-+ beta` and `m_-(xi) = m_+(-xi)`.
pub fn projection_identity_defect(xi: [f64; 2]) -> f64 {
    use crate::algebra::{mat2_add, mat2_max_abs, mat2_mul, mat2_sub, mat2_transpose, BETA};
    let p = m_symbol(xi, Sign::Plus);
    let m = m_symbol(xi, Sign::Minus);
    let checks = [
        mat2_sub(&mat2_mul(&p, &p), &p),
        mat2_sub(&mat2_mul(&m, &m), &m),
        mat2_mul(&p, &m),
        mat2_mul(&m, &p),
        mat2_sub(&mat2_add(&p, &m), &IDENTITY2),
        mat2_sub(&mat2_transpose(&p), &p),
        mat2_sub(&mat2_mul(&BETA, &p), &mat2_mul(&m, &BETA)),
        mat2_sub(&mat2_mul(&BETA, &m), &mat2_mul(&p, &BETA)),
        mat2_sub(&m, &m_symbol([-xi[0], -xi[1]], Sign::Plus)),
    ];
    checks.iter().map(mat2_max_abs).fold(0.0, f64::max)
}
