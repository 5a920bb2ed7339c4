//! Fields on the space-time torus `[0, T) x [0, L)^2` and the `X^{s,b}_+-`,
//! `H^{s,b}` norms.
//!
//! Coefficients are normalized like the spatial ones: `c(tau, xi)` is
//! `sqrt(T L^2)` times the mean of `f e^{-i(tau t + xi.x)}`, so the `l^2` norm
//! of the coefficients is the `L^2` norm on the torus. A free wave
//! `e^{+it|grad|} f` is supported near `tau = +|xi|`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::projections::Sign;
use crate::spectral::{japanese, transform_in_place, Direction, GridSpec, Repr, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    pub space: GridSpec,
    nt: usize,
    period: f64,
}

impl SpaceTimeGrid {
    pub fn new(nt: usize, period: f64, space: GridSpec) -> Result<Self> {
        if nt < 2 || nt % 2 != 0 {
            return Err(Error::InvalidGrid(format!("time samples must be even and at least 2, got {nt}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidGrid(format!("time period must be positive, got {period}")));
        }
        Ok(Self { space, nt, period })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn points(&self) -> usize {
        self.nt * self.space.points()
    }

    pub fn volume(&self) -> f64 {
        self.period * self.space.length() * self.space.length()
    }

    pub fn dtau(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    /// Signed temporal wavenumber of index `m` (Nyquist maps to `-nt/2`).
    pub fn time_wavenumber(&self, m: usize) -> i64 {
        let m = m as i64;
        let nt = self.nt as i64;
        if m < nt / 2 {
            m
        } else {
            m - nt
        }
    }

    pub fn time_index(&self, k: i64) -> usize {
        k.rem_euclid(self.nt as i64) as usize
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.period / self.nt as f64
    }

    pub fn tau(&self, m: usize) -> f64 {
        self.time_wavenumber(m) as f64 * self.dtau()
    }
}

/// Space-time field stored by its coefficients, index `m * N^2 + spatial`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: SpaceTimeGrid,
    coeffs: Vec<Complex64>,
}

fn time_transform(grid: &SpaceTimeGrid, data: &mut [Complex64], direction: Direction) {
    let nt = grid.nt();
    let ns = grid.space.points();
    let mut planner = FftPlanner::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(nt),
        Direction::Inverse => planner.plan_fft_inverse(nt),
    };
    let scale = match direction {
        Direction::Forward => grid.period().sqrt() / nt as f64,
        Direction::Inverse => 1.0 / grid.period().sqrt(),
    };
    let mut column = vec![Complex64::new(0.0, 0.0); nt];
    for p in 0..ns {
        for (j, c) in column.iter_mut().enumerate() {
            *c = data[j * ns + p];
        }
        fft.process(&mut column);
        for (j, c) in column.iter().enumerate() {
            data[j * ns + p] = c * scale;
        }
    }
}

impl SpaceTimeField {
    pub fn zeros(grid: SpaceTimeGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn from_coeffs(grid: SpaceTimeGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                grid.points(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    /// Single coefficient `coeff` at `(k_t, k)`.
    pub fn mode(grid: SpaceTimeGrid, kt: i64, k: [i64; 2], coeff: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        let idx = grid.time_index(kt) * grid.space.points() + grid.space.mode_index(k);
        f.coeffs[idx] = coeff;
        f
    }

    /// From point samples `f(t_j, x_p)`, index `j * N^2 + p`.
    pub fn from_samples(grid: SpaceTimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} samples, got {}",
                grid.points(),
                samples.len()
            )));
        }
        let ns = grid.space.points();
        let mut mixed = Vec::with_capacity(samples.len());
        for slice in samples.chunks(ns) {
            let mut f = ScalarField::from_data(grid.space, Repr::Physical, slice.to_vec())?;
            transform_in_place(&mut f, Direction::Forward)?;
            mixed.extend_from_slice(f.data());
        }
        Self::from_mixed(grid, mixed)
    }

    pub fn from_fn(grid: SpaceTimeGrid, f: impl Fn(f64, [f64; 2]) -> Complex64) -> Self {
        let ns = grid.space.points();
        let samples = (0..grid.points())
            .map(|i| f(grid.time(i / ns), grid.space.point(i % ns)))
            .collect();
        Self::from_samples(grid, samples).expect("sizes match")
    }

    /// From spatial coefficients at each time sample, index `j * N^2 + k`.
    pub fn from_mixed(grid: SpaceTimeGrid, mut mixed: Vec<Complex64>) -> Result<Self> {
        if mixed.len() != grid.points() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values, got {}",
                grid.points(),
                mixed.len()
            )));
        }
        time_transform(&grid, &mut mixed, Direction::Forward);
        Ok(Self { grid, coeffs: mixed })
    }

    /// Spatial coefficients at each time sample.
    pub fn to_mixed(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        time_transform(&self.grid, &mut data, Direction::Inverse);
        data
    }

    pub fn to_samples(&self) -> Vec<Complex64> {
        let ns = self.grid.space.points();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for slice in self.to_mixed().chunks(ns) {
            let mut f = ScalarField::from_data(self.grid.space, Repr::Fourier, slice.to_vec()).expect("sizes match");
            transform_in_place(&mut f, Direction::Inverse).expect("fourier slice");
            out.extend_from_slice(f.data());
        }
        out
    }

    pub fn grid(&self) -> SpaceTimeGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("space-time grids differ".into()));
        }
        Ok(())
    }

    fn remap(&self, f: impl Fn(i64, [i64; 2]) -> (i64, [i64; 2]), conj: bool) -> Self {
        let g = self.grid;
        let ns = g.space.points();
        let mut out = Self::zeros(g);
        for (i, c) in self.coeffs.iter().enumerate() {
            let (m, p) = (i / ns, i % ns);
            let (kt, k) = f(g.time_wavenumber(m), g.space.wavevector(p));
            let j = g.time_index(kt) * ns + g.space.mode_index(k);
            out.coeffs[j] = if conj { c.conj() } else { *c };
        }
        out
    }

    /// `psi(-t, x)`.
    pub fn time_reflect(&self) -> Self {
        self.remap(|kt, k| (-kt, k), false)
    }

    /// `psi(t, -x)`.
    pub fn space_reflect(&self) -> Self {
        self.remap(|kt, k| (kt, [-k[0], -k[1]]), false)
    }

    /// Complex conjugate `psi*`.
    pub fn conjugate(&self) -> Self {
        self.remap(|kt, k| (-kt, [-k[0], -k[1]]), true)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sup_t ||psi(t)||_{L^2_x}` over the time samples.
    pub fn linf_l2_norm(&self) -> f64 {
        let ns = self.grid.space.points();
        self.to_mixed()
            .chunks(ns)
            .map(|s| s.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Weighted `l^2` norm with squared weight `w2(tau, |xi|)`. At the temporal
    /// Nyquist index the squared weight is averaged over `+-tau_N`, which makes
    /// the discrete time reflection exact.
    fn weighted_norm(&self, w2: impl Fn(f64, f64) -> f64) -> f64 {
        let g = self.grid;
        let ns = g.space.points();
        let nyquist = g.nt() / 2;
        let abs_xi: Vec<f64> = (0..ns).map(|p| {
            let xi = g.space.freq(p);
            xi[0].hypot(xi[1])
        }).collect();
        let mut total = 0.0;
        for m in 0..g.nt() {
            let tau = g.tau(m);
            for p in 0..ns {
                let c = self.coeffs[m * ns + p];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let w = if m == nyquist {
                    0.5 * (w2(tau, abs_xi[p]) + w2(-tau, abs_xi[p]))
                } else {
                    w2(tau, abs_xi[p])
                };
                total += w * c.norm_sqr();
            }
        }
        total.sqrt()
    }
}

/// `||<tau -+ |xi|>^b <xi>^s psi~||_{l^2}`, `-+` following `sign`.
pub fn xsb_norm(psi: &SpaceTimeField, s: f64, b: f64, sign: Sign) -> f64 {
    let sv = sign.value();
    psi.weighted_norm(|tau, a| japanese(tau - sv * a).powf(2.0 * b) * japanese(a).powf(2.0 * s))
}

/// `||<|tau| - |xi|>^b <xi>^s psi~||_{l^2}`.
pub fn hsb_norm(psi: &SpaceTimeField, s: f64, b: f64) -> f64 {
    psi.weighted_norm(|tau, a| japanese(tau.abs() - a).powf(2.0 * b) * japanese(a).powf(2.0 * s))
}

/// Restriction of `psi` to spatial frequencies with `|xi| < radius`.
pub fn low_frequency_part(psi: &SpaceTimeField, radius: f64) -> SpaceTimeField {
    let g = psi.grid();
    let ns = g.space.points();
    let mut out = psi.clone();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        let xi = g.space.freq(i % ns);
        if xi[0].hypot(xi[1]) >= radius {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    out
}
