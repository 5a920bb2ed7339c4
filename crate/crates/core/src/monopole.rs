//! Physical variables, the `u`/`v` change of variables and residual
//! diagnostics for the componentized monopole system in Lorenz gauge:
//!
//! ```text
//! d_t phi + d_1 A2 - d_2 A1 = [A2, A1] + [phi, A0]
//! d_t A0  - d_1 A1 - d_2 A2 = 0
//! d_t A1  - d_1 A0 - d_2 phi = [A2, phi] + [A1, A0]
//! d_t A2  + d_1 phi - d_2 A0 = [phi, A1] + [A2, A0]
//! ```

use num_complex::Complex64;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::spectral::{
    apply_multiplier, to_repr, transform_in_place, Direction, Field, GridSpec, LieField, PairField,
    Repr, ScalarField,
};

/// `phi, A0, A1, A2` on a common grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonopoleState {
    pub phi: LieField,
    pub a0: LieField,
    pub a1: LieField,
    pub a2: LieField,
    pub t: f64,
}

impl MonopoleState {
    pub fn new(phi: LieField, a0: LieField, a1: LieField, a2: LieField, t: f64) -> Result<Self> {
        let state = Self { phi, a0, a1, a2, t };
        let algebra = state.phi.algebra();
        for f in [&state.a0, &state.a1, &state.a2] {
            if f.algebra() != algebra {
                return Err(Error::DimensionMismatch("fields disagree on algebra".into()));
            }
            state.phi.check_compatible(f)?;
        }
        Ok(state)
    }

    pub fn zeros(grid: GridSpec, algebra: Algebra, repr: Repr) -> Self {
        let z = LieField::zeros(grid, algebra, repr);
        Self {
            phi: z.clone(),
            a0: z.clone(),
            a1: z.clone(),
            a2: z,
            t: 0.0,
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.phi.algebra()
    }

    pub fn fields(&self) -> [&LieField; 4] {
        [&self.phi, &self.a0, &self.a1, &self.a2]
    }

    pub fn max_algebra_defect(&self) -> Result<f64> {
        self.fields()
            .iter()
            .map(|f| f.max_algebra_defect())
            .try_fold(0.0_f64, |m, d| Ok(m.max(d?)))
    }
}

impl Field for MonopoleState {
    fn components(&self) -> Vec<&ScalarField> {
        self.fields().into_iter().flat_map(|f| f.entries()).collect()
    }

    fn components_mut(&mut self) -> Vec<&mut ScalarField> {
        [&mut self.phi, &mut self.a0, &mut self.a1, &mut self.a2]
            .into_iter()
            .flat_map(|f| f.entries_mut().iter_mut())
            .collect()
    }
}

fn combine(a: &LieField, ca: f64, b: &LieField, cb: f64) -> LieField {
    let mut out = a.clone();
    out.scale_in_place(Complex64::new(ca, 0.0));
    out.axpy(Complex64::new(cb, 0.0), b)
        .expect("fields of one state share grid and representation");
    out
}

/// `u = (A0 + A1, phi + A2)`, `v = (A0 - A1, phi - A2)`.
pub fn to_uv(state: &MonopoleState) -> (PairField, PairField) {
    let u = PairField {
        first: combine(&state.a0, 1.0, &state.a1, 1.0),
        second: combine(&state.phi, 1.0, &state.a2, 1.0),
    };
    let v = PairField {
        first: combine(&state.a0, 1.0, &state.a1, -1.0),
        second: combine(&state.phi, 1.0, &state.a2, -1.0),
    };
    (u, v)
}

/// Inverse of [`to_uv`].
pub fn from_uv(u: &PairField, v: &PairField, t: f64) -> Result<MonopoleState> {
    if u.algebra() != v.algebra() {
        return Err(Error::DimensionMismatch("u and v disagree on algebra".into()));
    }
    u.check_compatible(v)?;
    MonopoleState::new(
        combine(&u.second, 0.5, &v.second, 0.5),
        combine(&u.first, 0.5, &v.first, 0.5),
        combine(&u.first, 0.5, &v.first, -0.5),
        combine(&u.second, 0.5, &v.second, -0.5),
        t,
    )
}

fn require_physical<F: Field>(f: &F) -> Result<()> {
    if f.repr() != Repr::Physical {
        return Err(Error::Representation {
            expected: "physical",
            found: f.repr().name(),
        });
    }
    Ok(())
}

/// `out += scale [x, y]` pointwise on physical-space fields.
fn bracket_acc(out: &mut LieField, x: &LieField, y: &LieField, scale: f64) {
    let n = x.algebra().dim;
    let points = x.grid().points();
    let xs = x.entries();
    let ys = y.entries();
    for i in 0..n {
        for j in 0..n {
            let dst = out.entries_mut()[i * n + j].data_mut();
            for k in 0..n {
                let xik = xs[i * n + k].data();
                let ykj = ys[k * n + j].data();
                let yik = ys[i * n + k].data();
                let xkj = xs[k * n + j].data();
                for p in 0..points {
                    dst[p] += (xik[p] * ykj[p] - yik[p] * xkj[p]) * scale;
                }
            }
        }
    }
}

/// Pointwise bracket of two physical-space fields; zero in abelian mode.
pub fn bracket_field(x: &LieField, y: &LieField) -> Result<LieField> {
    if x.algebra() != y.algebra() {
        return Err(Error::DimensionMismatch("bracket of fields in different algebras".into()));
    }
    x.check_compatible(y)?;
    require_physical(x)?;
    let mut out = LieField::zeros(x.grid(), x.algebra(), Repr::Physical);
    if !x.algebra().is_abelian() {
        bracket_acc(&mut out, x, y, 1.0);
    }
    Ok(out)
}

/// Pointwise `N(a, b) = ( ([a1, b1] + [a2, b2]) / 2, [a2, a1] )` on
/// physical-space pair fields. The first slot is `(a.b - b.a)/2` and the
/// second `(beta a).a` with the products expanded into commutators.
pub fn nonlinearity_field(a: &PairField, b: &PairField) -> Result<PairField> {
    if a.algebra() != b.algebra() {
        return Err(Error::DimensionMismatch("N(a, b) of fields in different algebras".into()));
    }
    a.check_compatible(b)?;
    require_physical(a)?;
    let mut out = PairField::zeros(a.grid(), a.algebra(), Repr::Physical);
    if a.algebra().is_abelian() {
        return Ok(out);
    }
    bracket_acc(&mut out.first, &a.first, &b.first, 0.5);
    bracket_acc(&mut out.first, &a.second, &b.second, 0.5);
    bracket_acc(&mut out.second, &a.second, &a.first, 1.0);
    Ok(out)
}

fn derivative(f: &LieField, axis: usize) -> LieField {
    apply_multiplier(f, |xi| Complex64::new(0.0, xi[axis])).expect("fourier input")
}

/// `L^2` norms of the four equation residuals at the midpoint of two
/// snapshots. The time derivative is the centered difference of the
/// snapshots, all other terms use the average of the two states; spatial
/// derivatives are spectral. Returned in equation order
/// `[phi, A0 (Lorenz), A1, A2]`.
pub fn monopole_residuals(prev: &MonopoleState, next: &MonopoleState) -> Result<[f64; 4]> {
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "residuals need increasing snapshot times, got gap {dt}"
        )));
    }
    if prev.algebra() != next.algebra() {
        return Err(Error::DimensionMismatch("snapshots disagree on algebra".into()));
    }
    if prev.grid() != next.grid() {
        return Err(Error::GridMismatch("snapshots live on different grids".into()));
    }
    let p = to_repr(prev, Repr::Fourier)?;
    let n = to_repr(next, Repr::Fourier)?;

    let mut dtdt = n.clone();
    dtdt.axpy(Complex64::new(-1.0, 0.0), &p)?;
    dtdt.scale_in_place(Complex64::new(1.0 / dt, 0.0));

    let mut mid = p.clone();
    mid.axpy(Complex64::new(1.0, 0.0), &n)?;
    mid.scale_in_place(Complex64::new(0.5, 0.0));
    let mid_phys = to_repr(&mid, Repr::Physical)?;

    let br = |x: &LieField, y: &LieField| bracket_field(x, y);
    let (phi, a0, a1, a2) = (&mid_phys.phi, &mid_phys.a0, &mid_phys.a1, &mid_phys.a2);
    // Bracket right-hand sides, physical space.
    let mut rhs = [
        br(a2, a1)?,
        LieField::zeros(mid.grid(), mid.algebra(), Repr::Physical),
        br(a2, phi)?,
        br(phi, a1)?,
    ];
    rhs[0].axpy(Complex64::new(1.0, 0.0), &br(phi, a0)?)?;
    rhs[2].axpy(Complex64::new(1.0, 0.0), &br(a1, a0)?)?;
    rhs[3].axpy(Complex64::new(1.0, 0.0), &br(a2, a0)?)?;
    for r in &mut rhs {
        transform_in_place(r, Direction::Forward)?;
    }

    let one = Complex64::new(1.0, 0.0);
    let d = |f: &LieField, axis| derivative(f, axis);
    // (time derivative, [(coefficient, spatial derivative term)])
    let terms: [(&LieField, [(f64, LieField); 2]); 4] = [
        (&dtdt.phi, [(1.0, d(&mid.a2, 0)), (-1.0, d(&mid.a1, 1))]),
        (&dtdt.a0, [(-1.0, d(&mid.a1, 0)), (-1.0, d(&mid.a2, 1))]),
        (&dtdt.a1, [(-1.0, d(&mid.a0, 0)), (-1.0, d(&mid.phi, 1))]),
        (&dtdt.a2, [(1.0, d(&mid.phi, 0)), (-1.0, d(&mid.a0, 1))]),
    ];
    let mut out = [0.0; 4];
    for (k, ((time, spatial), bracket_rhs)) in terms.iter().zip(&rhs).enumerate() {
        let mut r = (*time).clone();
        for (c, term) in spatial {
            r.axpy(Complex64::new(*c, 0.0), term)?;
        }
        r.axpy(-one, bracket_rhs)?;
        out[k] = crate::spectral::sobolev_norm(&r, 0.0);
    }
    Ok(out)
}

/// `lambda * state(lambda x)` on the same grid: the Fourier coefficient at
/// wavevector `k` moves to `lambda k` and is multiplied by `lambda`. Content
/// that would leave the grid band is discarded. The time stamp becomes
/// `t / lambda`, so that scaling commutes with evolution in the sense
/// `evolve(scale(f), t) = scale(evolve(f, lambda t))`.
pub fn scaling_map(state: &MonopoleState, lambda: usize) -> Result<MonopoleState> {
    let grid = state.grid();
    if lambda == 0 || grid.n() % lambda != 0 {
        return Err(Error::InvalidArgument(format!(
            "scale factor {lambda} does not divide N = {}",
            grid.n()
        )));
    }
    let repr = state.repr();
    let hat = to_repr(state, Repr::Fourier)?;
    let mut out = hat.clone();
    out.fill_zero();
    let half = (grid.n() / 2) as i64;
    let l = lambda as i64;
    for (dst, src) in out.components_mut().into_iter().zip(hat.components()) {
        let data = dst.data_mut();
        for (i, z) in src.data().iter().enumerate() {
            let [k1, k2] = grid.wavevector(i);
            let (m1, m2) = (k1 * l, k2 * l);
            if m1.abs() < half && m2.abs() < half {
                data[grid.mode_index([m1, m2])] = z * lambda as f64;
            }
        }
    }
    out.t = state.t / lambda as f64;
    to_repr(&out, repr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bracket, nonlinearity_n};
    use crate::spectral::make_smooth_data;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n, 2.0 * PI).unwrap()
    }

    fn random_state(g: GridSpec, algebra: Algebra, seed: u64) -> MonopoleState {
        let p = make_smooth_data(3.0, seed, 1.0, g, algebra).unwrap();
        let q = make_smooth_data(3.0, seed + 1, 1.0, g, algebra).unwrap();
        MonopoleState::new(p.first, p.second, q.first, q.second, 0.0).unwrap()
    }

    fn max_diff<F: Field>(a: &F, b: &F) -> f64 {
        a.components()
            .iter()
            .zip(b.components())
            .flat_map(|(x, y)| x.data().iter().zip(y.data()).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn uv_examples() {
        let g = grid(8);
        let s = random_state(g, Algebra::SU2, 1);
        let (u, v) = to_uv(&s);
        let sum = |a: &LieField, b: &LieField, c: f64| combine(a, 1.0, b, c);
        assert_eq!(u.first, sum(&s.a0, &s.a1, 1.0));
        assert_eq!(u.second, sum(&s.phi, &s.a2, 1.0));
        assert_eq!(v.first, sum(&s.a0, &s.a1, -1.0));
        assert_eq!(v.second, sum(&s.phi, &s.a2, -1.0));
        let back = from_uv(&u, &v, 0.0).unwrap();
        assert!(max_diff(&back, &s) < 1e-14);

        let z = MonopoleState::zeros(g, Algebra::SU2, Repr::Fourier);
        let (zu, zv) = to_uv(&z);
        assert_eq!(zu, PairField::zeros(g, Algebra::SU2, Repr::Fourier));
        assert_eq!(zv, zu);
    }

    #[test]
    fn from_uv_examples() {
        let g = grid(8);
        let p = make_smooth_data(2.0, 3, 1.0, g, Algebra::SU2).unwrap();
        let s = from_uv(&p, &p, 0.0).unwrap();
        let zero = LieField::zeros(g, Algebra::SU2, Repr::Fourier);
        assert_eq!(s.a1, zero);
        assert_eq!(s.a2, zero);
        assert!(max_diff(&s.a0, &p.first) < 1e-15);
        assert!(max_diff(&s.phi, &p.second) < 1e-15);

        let mut neg = p.clone();
        neg.scale_in_place(Complex64::new(-1.0, 0.0));
        let s = from_uv(&p, &neg, 0.0).unwrap();
        assert_eq!(s.a0, zero);
        assert_eq!(s.phi, zero);
        assert!(max_diff(&s.a1, &p.first) < 1e-15);
        assert!(max_diff(&s.a2, &p.second) < 1e-15);

        let other = PairField::zeros(grid(16), Algebra::SU2, Repr::Fourier);
        assert!(from_uv(&p, &other, 0.0).is_err());
    }

    #[test]
    fn field_nonlinearity_matches_pointwise_algebra() {
        let g = grid(8);
        let s = to_repr(&random_state(g, Algebra::SU2, 5), Repr::Physical).unwrap();
        let (u, v) = to_uv(&s);
        let nuv = nonlinearity_field(&u, &v).unwrap();
        let nvu = nonlinearity_field(&v, &u).unwrap();
        let mut worst: f64 = 0.0;
        for p in 0..g.points() {
            let (up, vp) = (u.value_at(p), v.value_at(p));
            let a = nonlinearity_n(&up, &vp).unwrap();
            let b = nonlinearity_n(&vp, &up).unwrap();
            let fa = nuv.value_at(p);
            let fb = nvu.value_at(p);
            for (x, y) in [(&a.first, &fa.first), (&a.second, &fa.second), (&b.first, &fb.first), (&b.second, &fb.second)] {
                worst = worst.max((x - y).norm());
            }
            let direct = bracket(&s.phi.value_at(p), &s.a0.value_at(p)).unwrap();
            let field = bracket_field(&s.phi, &s.a0).unwrap().value_at(p);
            worst = worst.max((&direct - &field).norm());
        }
        assert!(worst < 1e-12, "pointwise mismatch {worst}");
    }

    #[test]
    fn residuals_of_zero_trajectory_vanish() {
        let g = grid(8);
        let mut a = MonopoleState::zeros(g, Algebra::SU2, Repr::Physical);
        let mut b = a.clone();
        b.t = 0.1;
        assert_eq!(monopole_residuals(&a, &b).unwrap(), [0.0; 4]);
        a.t = 0.1;
        assert!(monopole_residuals(&a, &b).is_err());
    }

    /// For a static constant abelian state every residual vanishes; for a
    /// static non-constant state the residual is the pure spatial part.
    #[test]
    fn residuals_pick_up_spatial_terms() {
        let g = grid(16);
        let mut s = MonopoleState::zeros(g, Algebra::ABELIAN2, Repr::Fourier);
        // A1 = single mode in x_2 direction: R_phi = -d_2 A1, R_A0 = -d_1 A1 = 0.
        let k = [0_i64, 1];
        s.a1.entries_mut()[1] = ScalarField::mode(g, k, Complex64::new(1.0, 0.0));
        let mut later = s.clone();
        later.t = 0.5;
        let r = monopole_residuals(&s, &later).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-14);
        assert!(r[1].abs() < 1e-14);
        assert!(r[2].abs() < 1e-14);
        assert!(r[3].abs() < 1e-14);
    }

    #[test]
    fn scaling_examples() {
        let g = grid(16);
        let s = random_state(g, Algebra::SU2, 7);
        assert_eq!(scaling_map(&s, 1).unwrap(), s);
        assert!(scaling_map(&s, 3).is_err());
        assert!(scaling_map(&s, 0).is_err());

        let mut m = MonopoleState::zeros(g, Algebra::SU2, Repr::Fourier);
        let c = Complex64::new(0.3, -0.4);
        m.phi.entries_mut()[2] = ScalarField::mode(g, [1, -2], c);
        let scaled = scaling_map(&m, 2).unwrap();
        let data = scaled.phi.entries()[2].data();
        let idx = g.mode_index([2, -4]);
        assert!((data[idx] - c * 2.0).norm() < 1e-15);
        let others: f64 = data.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, z)| z.norm()).sum();
        assert_eq!(others, 0.0);
    }
}
