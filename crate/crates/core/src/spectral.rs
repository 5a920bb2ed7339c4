//! Periodic grids, Fourier transforms, multipliers and Sobolev norms.
//!
//! Fields live on the torus `[0, L)^2` sampled at `N x N` points. Fourier
//! coefficients are normalized against the orthonormal basis
//! `e^{i xi.x} / L`, i.e. `c(xi) = (L / N^2) sum_j f(x_j) e^{-i xi.x_j}`. The
//! transform is unitary between the grid with cell measure `(L/N)^2` and the
//! coefficient sequence, so `||f||_{L^2(torus)}` is the plain `l^2` norm of
//! the coefficients and the same function has the same coefficients on every
//! resolution.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::algebra::{project_anti_hermitian_traceless, Algebra, LieElement, PairValue};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!("torus length must be positive, got {length}")));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.n * self.n
    }

    /// Fundamental frequency `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Signed integer wavenumber of array index `i`, in `-N/2..N/2`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Array index of integer wavenumber `k`, wrapping modulo `N`.
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Frequency vector of flat mode index `idx = i1 * N + i2`.
    #[inline]
    pub fn freq(&self, idx: usize) -> [f64; 2] {
        let dk = self.dk();
        [
            dk * self.wavenumber(idx / self.n) as f64,
            dk * self.wavenumber(idx % self.n) as f64,
        ]
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 2] {
        [self.wavenumber(idx / self.n), self.wavenumber(idx % self.n)]
    }

    /// Flat index of the wavevector `k`, wrapping.
    #[inline]
    pub fn mode_index(&self, k: [i64; 2]) -> usize {
        self.index_of(k[0]) * self.n + self.index_of(k[1])
    }

    /// Physical coordinate of flat point index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        [dx * (idx / self.n) as f64, dx * (idx % self.n) as f64]
    }

    /// True when the mode survives the 2/3 rule: `max |k_i| <= N/3`.
    #[inline]
    pub fn in_dealias_band(&self, idx: usize) -> bool {
        let [k1, k2] = self.wavevector(idx);
        let cut = self.n as f64 / 3.0;
        (k1.abs() as f64) <= cut && (k2.abs() as f64) <= cut
    }

    /// Forward scale from raw DFT sums to coefficients.
    fn forward_scale(&self) -> f64 {
        self.length / self.points() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Physical,
    Fourier,
}

impl Repr {
    pub fn name(&self) -> &'static str {
        match self {
            Repr::Physical => "physical",
            Repr::Fourier => "fourier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Physical to Fourier.
    Forward,
    /// Fourier to physical.
    Inverse,
}

/// Cached 2D FFT for one grid size.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Shared plan for size `n`.
    pub fn plan(n: usize) -> Arc<Fft2> {
        static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft2>>>> = OnceLock::new();
        let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = plans.lock().expect("fft plan cache poisoned");
        guard.entry(n).or_insert_with(|| Arc::new(Fft2::new(n))).clone()
    }

    /// Unnormalized 2D transform in place.
    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n);
        let fft = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        fft.process(data);
        transpose_square(data, n);
        fft.process(data);
        transpose_square(data, n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Complex scalar field on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    repr: Repr,
    data: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec, repr: Repr) -> Self {
        Self {
            grid,
            repr,
            data: vec![ZERO; grid.points()],
        }
    }

    pub fn from_data(grid: GridSpec, repr: Repr, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.points() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}x{} grid",
                data.len(),
                grid.n(),
                grid.n()
            )));
        }
        Ok(Self { grid, repr, data })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let data = (0..grid.points()).map(|i| f(grid.point(i))).collect();
        Self {
            grid,
            repr: Repr::Physical,
            data,
        }
    }

    /// Single Fourier mode `coeff * e^{i k.x} / L`.
    pub fn mode(grid: GridSpec, k: [i64; 2], coeff: Complex64) -> Self {
        let mut out = Self::zeros(grid, Repr::Fourier);
        out.data[grid.mode_index(k)] = coeff;
        out
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    fn transform_in_place(&mut self, direction: Direction) -> Result<()> {
        let expected = match direction {
            Direction::Forward => Repr::Physical,
            Direction::Inverse => Repr::Fourier,
        };
        if self.repr != expected {
            return Err(Error::Representation {
                expected: expected.name(),
                found: self.repr.name(),
            });
        }
        Fft2::plan(self.grid.n).process(&mut self.data, direction);
        let scale = match direction {
            Direction::Forward => self.grid.forward_scale(),
            Direction::Inverse => 1.0 / self.grid.length,
        };
        for z in &mut self.data {
            *z *= scale;
        }
        self.repr = match direction {
            Direction::Forward => Repr::Fourier,
            Direction::Inverse => Repr::Physical,
        };
        Ok(())
    }

    /// Discrete `L^2` norm of the grid values, `sqrt(dx^2 sum |f_j|^2)`,
    /// computed in physical space.
    pub fn physical_l2(&self) -> Result<f64> {
        let phys = to_repr(self, Repr::Physical)?;
        let sum: f64 = phys.data.iter().map(|z| z.norm_sqr()).sum();
        Ok((sum * self.grid.dx() * self.grid.dx()).sqrt())
    }
}

/// Common surface of scalar, algebra-valued and pair-valued grid fields.
pub trait Field: Clone {
    fn components(&self) -> Vec<&ScalarField>;
    fn components_mut(&mut self) -> Vec<&mut ScalarField>;

    fn grid(&self) -> GridSpec {
        self.components()[0].grid
    }

    fn repr(&self) -> Repr {
        self.components()[0].repr
    }

    fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Same grid, representation and component count.
    fn check_compatible(&self, other: &Self) -> Result<()> {
        let a = self.components();
        let b = other.components();
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} components",
                a.len(),
                b.len()
            )));
        }
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid(),
                other.grid()
            )));
        }
        if self.repr() != other.repr() {
            return Err(Error::Representation {
                expected: self.repr().name(),
                found: other.repr().name(),
            });
        }
        Ok(())
    }

    /// `self += a * other`.
    fn axpy(&mut self, a: Complex64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (dst, src) in self.components_mut().into_iter().zip(other.components()) {
            for (d, s) in dst.data.iter_mut().zip(&src.data) {
                *d += a * s;
            }
        }
        Ok(())
    }

    fn scale_in_place(&mut self, a: Complex64) {
        for c in self.components_mut() {
            for z in &mut c.data {
                *z *= a;
            }
        }
    }

    fn fill_zero(&mut self) {
        for c in self.components_mut() {
            c.data.fill(ZERO);
        }
    }
}

impl Field for ScalarField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
    fn components_mut(&mut self) -> Vec<&mut ScalarField> {
        vec![self]
    }
}

/// Algebra-valued field: one scalar field per matrix entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LieField {
    algebra: Algebra,
    entries: Vec<ScalarField>,
}

impl LieField {
    pub fn zeros(grid: GridSpec, algebra: Algebra, repr: Repr) -> Self {
        Self {
            algebra,
            entries: vec![ScalarField::zeros(grid, repr); algebra.entries()],
        }
    }

    pub fn from_entries(algebra: Algebra, entries: Vec<ScalarField>) -> Result<Self> {
        if entries.len() != algebra.entries() {
            return Err(Error::DimensionMismatch(format!(
                "{} entry fields for {algebra}",
                entries.len()
            )));
        }
        let grid = entries[0].grid;
        let repr = entries[0].repr;
        if entries.iter().any(|e| e.grid != grid || e.repr != repr) {
            return Err(Error::GridMismatch("entry fields disagree".into()));
        }
        Ok(Self { algebra, entries })
    }

    /// Samples a pointwise algebra-valued function.
    pub fn from_fn(grid: GridSpec, algebra: Algebra, f: impl Fn([f64; 2]) -> LieElement) -> Result<Self> {
        let mut out = Self::zeros(grid, algebra, Repr::Physical);
        for p in 0..grid.points() {
            let value = f(grid.point(p));
            if value.algebra() != algebra {
                return Err(Error::DimensionMismatch(format!(
                    "function returned {} for a {algebra} field",
                    value.algebra()
                )));
            }
            for (e, z) in value.entries().iter().enumerate() {
                out.entries[e].data[p] = *z;
            }
        }
        Ok(out)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [ScalarField] {
        &mut self.entries
    }

    /// Value at flat grid index `p` (in whatever representation the field is).
    pub fn value_at(&self, p: usize) -> LieElement {
        let entries = self.entries.iter().map(|e| e.data[p]).collect();
        LieElement::from_entries(self.algebra, entries).expect("entry count matches algebra")
    }

    /// Largest pointwise `|X + X^dagger| + |tr X|` in physical space.
    pub fn max_algebra_defect(&self) -> Result<f64> {
        let phys = to_repr(self, Repr::Physical)?;
        let mut worst: f64 = 0.0;
        for p in 0..self.grid().points() {
            let x = phys.value_at(p);
            worst = worst.max(x.anti_hermitian_defect() + x.trace().norm());
        }
        Ok(worst)
    }

    /// Projects every grid value onto anti-Hermitian traceless matrices.
    pub fn project_to_algebra(&mut self) -> Result<()> {
        if self.repr() != Repr::Physical {
            return Err(Error::Representation {
                expected: "physical",
                found: self.repr().name(),
            });
        }
        let n = self.algebra.dim;
        let mut buf = vec![ZERO; n * n];
        for p in 0..self.grid().points() {
            for (e, b) in buf.iter_mut().enumerate() {
                *b = self.entries[e].data[p];
            }
            project_anti_hermitian_traceless(n, &mut buf);
            for (e, b) in buf.iter().enumerate() {
                self.entries[e].data[p] = *b;
            }
        }
        Ok(())
    }
}

impl Field for LieField {
    fn components(&self) -> Vec<&ScalarField> {
        self.entries.iter().collect()
    }
    fn components_mut(&mut self) -> Vec<&mut ScalarField> {
        self.entries.iter_mut().collect()
    }
}

/// Pair-valued field: the values of `u`, `v` or `N(a, b)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PairField {
    pub first: LieField,
    pub second: LieField,
}

impl PairField {
    pub fn new(first: LieField, second: LieField) -> Result<Self> {
        if first.algebra != second.algebra {
            return Err(Error::DimensionMismatch("pair slots disagree on algebra".into()));
        }
        first.check_compatible(&second)?;
        Ok(Self { first, second })
    }

    pub fn zeros(grid: GridSpec, algebra: Algebra, repr: Repr) -> Self {
        Self {
            first: LieField::zeros(grid, algebra, repr),
            second: LieField::zeros(grid, algebra, repr),
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.first.algebra
    }

    pub fn value_at(&self, p: usize) -> PairValue {
        PairValue {
            first: self.first.value_at(p),
            second: self.second.value_at(p),
        }
    }

    pub fn max_algebra_defect(&self) -> Result<f64> {
        Ok(self.first.max_algebra_defect()?.max(self.second.max_algebra_defect()?))
    }
}

impl Field for PairField {
    fn components(&self) -> Vec<&ScalarField> {
        self.first.entries.iter().chain(&self.second.entries).collect()
    }
    fn components_mut(&mut self) -> Vec<&mut ScalarField> {
        self.first
            .entries
            .iter_mut()
            .chain(self.second.entries.iter_mut())
            .collect()
    }
}

/// Transforms every component in place.
pub fn transform_in_place<F: Field>(f: &mut F, direction: Direction) -> Result<()> {
    for c in f.components_mut() {
        c.transform_in_place(direction)?;
    }
    Ok(())
}

/// Forward or inverse transform of every component.
pub fn transform<F: Field>(f: &F, direction: Direction) -> Result<F> {
    let mut out = f.clone();
    transform_in_place(&mut out, direction)?;
    Ok(out)
}

/// Copy of `f` in the requested representation.
pub fn to_repr<F: Field>(f: &F, repr: Repr) -> Result<F> {
    match (f.repr(), repr) {
        (a, b) if a == b => Ok(f.clone()),
        (_, Repr::Fourier) => transform(f, Direction::Forward),
        (_, Repr::Physical) => transform(f, Direction::Inverse),
    }
}

fn require_fourier<F: Field>(f: &F) -> Result<()> {
    if f.repr() != Repr::Fourier {
        return Err(Error::Representation {
            expected: "fourier",
            found: f.repr().name(),
        });
    }
    Ok(())
}

/// Coefficient-wise multiplication by a scalar symbol `sigma(xi)`.
pub fn apply_multiplier<F: Field>(f: &F, symbol: impl Fn([f64; 2]) -> Complex64) -> Result<F> {
    require_fourier(f)?;
    let grid = f.grid();
    let table = (0..grid.points())
        .map(|i| {
            let xi = grid.freq(i);
            let s = symbol(xi);
            if s.re.is_finite() && s.im.is_finite() {
                Ok(s)
            } else {
                Err(Error::NonFinite(format!("multiplier symbol at xi = {xi:?}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = f.clone();
    for c in out.components_mut() {
        for (z, s) in c.data.iter_mut().zip(&table) {
            *z *= s;
        }
    }
    Ok(out)
}

/// Applies a 2x2 complex matrix symbol to the pair index at every mode.
pub fn apply_matrix_multiplier(
    f: &PairField,
    symbol: impl Fn([f64; 2]) -> [[Complex64; 2]; 2],
) -> Result<PairField> {
    require_fourier(f)?;
    let grid = f.grid();
    let mut out = f.clone();
    for i in 0..grid.points() {
        let xi = grid.freq(i);
        let m = symbol(xi);
        if m.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("matrix symbol at xi = {xi:?}")));
        }
        for e in 0..f.algebra().entries() {
            let a = f.first.entries[e].data[i];
            let b = f.second.entries[e].data[i];
            out.first.entries[e].data[i] = m[0][0] * a + m[0][1] * b;
            out.second.entries[e].data[i] = m[1][0] * a + m[1][1] * b;
        }
    }
    Ok(out)
}

/// `Lambda^s`, symbol `<xi>^s`.
pub fn apply_lambda<F: Field>(f: &F, s: f64) -> Result<F> {
    apply_multiplier(f, |xi| Complex64::new(japanese(xi[0].hypot(xi[1])).powf(s), 0.0))
}

/// `D^s`, symbol `|xi|^s` with `|0|^s = 0` for `s > 0`. Negative `s` is only
/// accepted when every component has a vanishing zero mode.
pub fn apply_d<F: Field>(f: &F, s: f64) -> Result<F> {
    require_fourier(f)?;
    if s < 0.0 && f.components().iter().any(|c| c.data[0] != ZERO) {
        return Err(Error::InvalidArgument(format!(
            "D^{s} is singular on a nonzero zero mode"
        )));
    }
    apply_multiplier(f, |xi| {
        let r = xi[0].hypot(xi[1]);
        if r == 0.0 {
            if s == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        } else {
            Complex64::new(r.powf(s), 0.0)
        }
    })
}

/// `||Lambda^s f||_{L^2}` summed over all components (Frobenius over matrix
/// entries and pair slots).
pub fn sobolev_norm<F: Field>(f: &F, s: f64) -> f64 {
    let fourier = to_repr(f, Repr::Fourier).expect("transform between valid representations");
    let grid = fourier.grid();
    let weights: Vec<f64> = (0..grid.points())
        .map(|i| {
            let xi = grid.freq(i);
            japanese(xi[0].hypot(xi[1])).powf(2.0 * s)
        })
        .collect();
    fourier
        .components()
        .iter()
        .map(|c| {
            c.data
                .iter()
                .zip(&weights)
                .map(|(z, w)| w * z.norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// 2/3-rule truncation in place.
pub fn dealias_in_place<F: Field>(f: &mut F) -> Result<()> {
    require_fourier(f)?;
    let grid = f.grid();
    let mask: Vec<bool> = (0..grid.points()).map(|i| grid.in_dealias_band(i)).collect();
    for c in f.components_mut() {
        for (z, keep) in c.data.iter_mut().zip(&mask) {
            if !keep {
                *z = ZERO;
            }
        }
    }
    Ok(())
}

pub fn dealias<F: Field>(f: &F) -> Result<F> {
    let mut out = f.clone();
    dealias_in_place(&mut out)?;
    Ok(out)
}

/// Moves a Fourier-space field to another resolution with the same torus
/// length: zero-padding when refining, truncation when coarsening. Modes that
/// would land on the target Nyquist row or column are dropped.
pub fn resample<F: Field>(f: &F, target: GridSpec) -> Result<F> {
    require_fourier(f)?;
    let source = f.grid();
    if (source.length - target.length).abs() > 1e-12 * source.length {
        return Err(Error::GridMismatch("resampling requires equal torus lengths".into()));
    }
    let half = (target.n / 2) as i64;
    let mut out = f.clone();
    for (dst, src) in out.components_mut().into_iter().zip(f.components()) {
        let mut data = vec![ZERO; target.points()];
        for (i, z) in src.data.iter().enumerate() {
            let [k1, k2] = source.wavevector(i);
            if k1.abs() < half && k2.abs() < half {
                data[target.mode_index([k1, k2])] = *z;
            }
        }
        dst.data = data;
        dst.grid = target;
    }
    Ok(out)
}

/// Random algebra-valued pair field with coefficient magnitudes
/// `<xi>^{-(s+1)}` and uniform phases inside the 2/3 band, projected onto the
/// algebra pointwise and rescaled to `||.||_{H^s} = amplitude`.
pub fn make_rough_data(s: f64, seed: u64, amplitude: f64, grid: GridSpec, algebra: Algebra) -> Result<PairField> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("rough data needs s > 0, got {s}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = random_spectrum_pair(grid, algebra, &mut rng, |r| japanese(r).powf(-(s + 1.0)))?;
    rescale_to(&mut out, s, amplitude);
    Ok(out)
}

/// Smooth random data: Gaussian spectral envelope `exp(-|xi|^2 / (2 width^2))`,
/// rescaled to `||.||_{L^2} = amplitude`.
pub fn make_smooth_data(width: f64, seed: u64, amplitude: f64, grid: GridSpec, algebra: Algebra) -> Result<PairField> {
    if !(width > 0.0) {
        return Err(Error::InvalidArgument(format!("spectral width must be positive, got {width}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = random_spectrum_pair(grid, algebra, &mut rng, |r| (-0.5 * (r / width).powi(2)).exp())?;
    rescale_to(&mut out, 0.0, amplitude);
    Ok(out)
}

fn random_spectrum_pair(
    grid: GridSpec,
    algebra: Algebra,
    rng: &mut ChaCha8Rng,
    envelope: impl Fn(f64) -> f64,
) -> Result<PairField> {
    let mut out = PairField::zeros(grid, algebra, Repr::Fourier);
    for c in out.components_mut() {
        for (i, z) in c.data.iter_mut().enumerate() {
            if !grid.in_dealias_band(i) {
                continue;
            }
            let xi = grid.freq(i);
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            *z = Complex64::from_polar(envelope(xi[0].hypot(xi[1])), phase);
        }
    }
    transform_in_place(&mut out, Direction::Inverse)?;
    out.first.project_to_algebra()?;
    out.second.project_to_algebra()?;
    transform_in_place(&mut out, Direction::Forward)?;
    dealias_in_place(&mut out)?;
    Ok(out)
}

fn rescale_to<F: Field>(f: &mut F, s: f64, amplitude: f64) {
    let norm = sobolev_norm(f, s);
    let factor = if norm > 0.0 { amplitude / norm } else { 0.0 };
    f.scale_in_place(Complex64::new(factor, 0.0));
}
