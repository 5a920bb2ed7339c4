//! The bilinear operators `Q_+-` and `S^alpha_+-` by direct summation over
//! interacting mode pairs.
//!
//! For output frequency `xi = p + q` with `p = xi - eta` (from `psi`) and
//! `q = eta` (from `phi`) the weights are
//!
//! ```text
//! Q_+-:       theta(p, +-q)           (pi when p or q vanishes)
//! S^alpha_+-: r_+-(p + q, q)^alpha
//! ```
//!
//! Sums are circular on the grid, with the same normalization as a pointwise
//! product, so `S^0_+-(psi, phi) = psi * phi`. Only modes that are nonzero in
//! some time slice take part, so band-limited inputs are cheap.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::geometry::{r_weights, theta};
use super::spacetime::SpaceTimeField;
use crate::error::{Error, Result};
use crate::projections::Sign;
use crate::spectral::{to_repr, Field, GridSpec, Repr, ScalarField};

/// Largest spatial size accepted by the direct sums.
pub const MAX_SPATIAL_N: usize = 32;
/// Largest number of time samples accepted by the direct sums.
pub const MAX_TIME_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BilinearKind {
    Q(Sign),
    S { alpha: f64, sign: Sign },
}

impl BilinearKind {
    fn validate(&self) -> Result<()> {
        if let BilinearKind::S { alpha, .. } = self {
            if !(*alpha >= 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidArgument(format!("alpha must be nonnegative, got {alpha}")));
            }
        }
        Ok(())
    }

    /// Weight for `psi` at wavevector `p` and `phi` at `q` (integer units,
    /// scaled by `dk`).
    pub fn weight(&self, p: [i64; 2], q: [i64; 2], dk: f64) -> f64 {
        let pf = [p[0] as f64, p[1] as f64];
        let qf = [q[0] as f64, q[1] as f64];
        match *self {
            BilinearKind::Q(sign) => {
                let qs = if sign == Sign::Plus { qf } else { [-qf[0], -qf[1]] };
                theta(pf, qs).unwrap_or(PI)
            }
            BilinearKind::S { alpha, sign } => {
                if alpha == 0.0 {
                    return 1.0;
                }
                let (rp, rm) = r_weights([pf[0] + qf[0], pf[1] + qf[1]], qf);
                let r = if sign == Sign::Plus { rp } else { rm };
                (dk * r).powf(alpha)
            }
        }
    }
}

fn check_budget(space: GridSpec, nt: usize) -> Result<()> {
    if space.n() > MAX_SPATIAL_N || nt > MAX_TIME_N {
        return Err(Error::Budget(format!(
            "direct bilinear sums are capped at N <= {MAX_SPATIAL_N}, N_t <= {MAX_TIME_N}; got N = {}, N_t = {nt}",
            space.n()
        )));
    }
    Ok(())
}

/// Direct sum over `slices` time slices of mixed data (index `j * N^2 + k`).
fn direct_sum(space: GridSpec, slices: usize, psi: &[Complex64], phi: &[Complex64], kind: BilinearKind) -> Vec<Complex64> {
    let ns = space.points();
    let active = |data: &[Complex64]| -> Vec<usize> {
        (0..ns)
            .filter(|&k| (0..slices).any(|j| data[j * ns + k] != Complex64::new(0.0, 0.0)))
            .collect()
    };
    let ap = active(psi);
    let aq = active(phi);
    let norm = 1.0 / space.length();
    let dk = space.dk();
    let mut out = vec![Complex64::new(0.0, 0.0); slices * ns];
    for &ip in &ap {
        let p = space.wavevector(ip);
        for &iq in &aq {
            let q = space.wavevector(iq);
            let w = kind.weight(p, q, dk);
            if w == 0.0 {
                continue;
            }
            let target = space.mode_index([p[0] + q[0], p[1] + q[1]]);
            let wn = w * norm;
            for j in 0..slices {
                out[j * ns + target] += psi[j * ns + ip] * phi[j * ns + iq] * wn;
            }
        }
    }
    out
}

/// Bilinear form of two spatial fields; the result is in Fourier representation.
pub fn bilinear_spatial(psi: &ScalarField, phi: &ScalarField, kind: BilinearKind) -> Result<ScalarField> {
    kind.validate()?;
    if psi.grid() != phi.grid() {
        return Err(Error::GridMismatch("operands live on different grids".into()));
    }
    let grid = psi.grid();
    check_budget(grid, 1)?;
    let a = to_repr(psi, Repr::Fourier)?;
    let b = to_repr(phi, Repr::Fourier)?;
    let out = direct_sum(grid, 1, a.data(), b.data(), kind);
    ScalarField::from_data(grid, Repr::Fourier, out)
}

/// Bilinear form of two space-time fields, slice by slice in time.
pub fn bilinear(psi: &SpaceTimeField, phi: &SpaceTimeField, kind: BilinearKind) -> Result<SpaceTimeField> {
    kind.validate()?;
    psi.check_compatible(phi)?;
    let grid = psi.grid();
    check_budget(grid.space, grid.nt())?;
    let out = direct_sum(grid.space, grid.nt(), &psi.to_mixed(), &phi.to_mixed(), kind);
    SpaceTimeField::from_mixed(grid, out)
}

pub fn q_form(psi: &SpaceTimeField, phi: &SpaceTimeField, sign: Sign) -> Result<SpaceTimeField> {
    bilinear(psi, phi, BilinearKind::Q(sign))
}

pub fn s_form(psi: &SpaceTimeField, phi: &SpaceTimeField, alpha: f64, sign: Sign) -> Result<SpaceTimeField> {
    bilinear(psi, phi, BilinearKind::S { alpha, sign })
}

pub fn q_form_spatial(psi: &ScalarField, phi: &ScalarField, sign: Sign) -> Result<ScalarField> {
    bilinear_spatial(psi, phi, BilinearKind::Q(sign))
}

pub fn s_form_spatial(psi: &ScalarField, phi: &ScalarField, alpha: f64, sign: Sign) -> Result<ScalarField> {
    bilinear_spatial(psi, phi, BilinearKind::S { alpha, sign })
}

/// Largest coefficient difference, for tests and reports.
pub fn max_coeff_diff<F: Field>(a: &F, b: &F) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .flat_map(|(x, y)| x.data().iter().zip(y.data()).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nullform::spacetime::SpaceTimeGrid;
    use crate::spectral::{transform, Direction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, 2.0 * PI).unwrap()
    }

    fn random_scalar(g: GridSpec, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..g.points())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ScalarField::from_data(g, Repr::Fourier, data).unwrap()
    }

    #[test]
    fn parallel_single_modes_cancel() {
        let g = grid(16);
        let one = Complex64::new(1.0, 0.0);
        let a = ScalarField::mode(g, [1, 0], one);
        let out = q_form_spatial(&a, &a, Sign::Plus).unwrap();
        assert!(out.data().iter().all(|z| *z == Complex64::new(0.0, 0.0)));

        let b = ScalarField::mode(g, [-2, 0], one);
        let out = q_form_spatial(&a, &b, Sign::Minus).unwrap();
        assert!(out.data().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let out = s_form_spatial(&a, &ScalarField::mode(g, [3, 0], one), 0.5, Sign::Plus).unwrap();
        assert!(out.data().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn orthogonal_single_modes() {
        let g = grid(16);
        let c1 = Complex64::new(0.5, -1.0);
        let c2 = Complex64::new(2.0, 0.25);
        let out = q_form_spatial(&ScalarField::mode(g, [1, 0], c1), &ScalarField::mode(g, [0, 1], c2), Sign::Plus)
            .unwrap();
        let idx = g.mode_index([1, 1]);
        let expect = c1 * c2 * (PI / 2.0) / g.length();
        for (i, z) in out.data().iter().enumerate() {
            if i == idx {
                assert!((z - expect).norm() < 1e-15);
            } else {
                assert_eq!(*z, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn s_minus_single_mode_weight() {
        let g = grid(16);
        let one = Complex64::new(1.0, 0.0);
        let out = s_form_spatial(&ScalarField::mode(g, [-1, 1], one), &ScalarField::mode(g, [1, 1], one), 1.0, Sign::Minus)
            .unwrap();
        let z = out.data()[g.mode_index([0, 2])];
        assert!((z * g.length() - 2.0).norm() < 1e-14);
    }

    #[test]
    fn s_zero_is_pointwise_product() {
        let g = grid(16);
        let a = random_scalar(g, 1);
        let b = random_scalar(g, 2);
        let out = s_form_spatial(&a, &b, 0.0, Sign::Plus).unwrap();
        let pa = transform(&a, Direction::Inverse).unwrap();
        let pb = transform(&b, Direction::Inverse).unwrap();
        let prod: Vec<_> = pa.data().iter().zip(pb.data()).map(|(x, y)| x * y).collect();
        let prod = transform(&ScalarField::from_data(g, Repr::Physical, prod).unwrap(), Direction::Forward).unwrap();
        assert!(max_coeff_diff(&out, &prod) < 1e-11);
    }

    #[test]
    fn bilinearity() {
        let g = grid(8);
        let (a, b, c) = (random_scalar(g, 3), random_scalar(g, 4), random_scalar(g, 5));
        let k = Complex64::new(0.3, -1.7);
        let mut ab = a.clone();
        ab.axpy(k, &b).unwrap();
        for kind in [BilinearKind::Q(Sign::Plus), BilinearKind::S { alpha: 0.3, sign: Sign::Minus }] {
            let lhs = bilinear_spatial(&ab, &c, kind).unwrap();
            let mut rhs = bilinear_spatial(&a, &c, kind).unwrap();
            rhs.axpy(k, &bilinear_spatial(&b, &c, kind).unwrap()).unwrap();
            assert!(max_coeff_diff(&lhs, &rhs) < 1e-12);
            let lhs = bilinear_spatial(&c, &ab, kind).unwrap();
            let mut rhs = bilinear_spatial(&c, &a, kind).unwrap();
            rhs.axpy(k, &bilinear_spatial(&c, &b, kind).unwrap()).unwrap();
            assert!(max_coeff_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let a = random_scalar(grid(8), 1);
        let b = random_scalar(grid(16), 1);
        assert!(matches!(q_form_spatial(&a, &b, Sign::Plus), Err(Error::GridMismatch(_))));
        assert!(s_form_spatial(&a, &a, -1.0, Sign::Plus).is_err());
        let big = random_scalar(grid(64), 1);
        assert!(matches!(q_form_spatial(&big, &big, Sign::Plus), Err(Error::Budget(_))));
        let st = SpaceTimeGrid::new(128, 1.0, grid(8)).unwrap();
        let f = SpaceTimeField::zeros(st);
        assert!(matches!(q_form(&f, &f, Sign::Plus), Err(Error::Budget(_))));
    }

    #[test]
    fn space_time_matches_slicewise_spatial() {
        let st = SpaceTimeGrid::new(4, 2.0 * PI, grid(8)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rand_field = || {
            let c = (0..st.points()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            SpaceTimeField::from_coeffs(st, c).unwrap()
        };
        let (a, b) = (rand_field(), rand_field());
        let out = q_form(&a, &b, Sign::Minus).unwrap().to_mixed();
        let (ma, mb) = (a.to_mixed(), b.to_mixed());
        let ns = st.space.points();
        for j in 0..st.nt() {
            let sa = ScalarField::from_data(st.space, Repr::Fourier, ma[j * ns..(j + 1) * ns].to_vec()).unwrap();
            let sb = ScalarField::from_data(st.space, Repr::Fourier, mb[j * ns..(j + 1) * ns].to_vec()).unwrap();
            let slice = q_form_spatial(&sa, &sb, Sign::Minus).unwrap();
            for (x, y) in slice.data().iter().zip(&out[j * ns..(j + 1) * ns]) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }
}
