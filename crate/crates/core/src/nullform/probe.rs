//! Sampling probes for the bilinear estimate
//! `||Q_+-(psi, phi)||_{H^{s, b-1+eps}} <~ ||psi||_{X^{s,b}_+} ||phi||_{X^{s,b}_+-}`.
//!
//! Each sample is a pair of band-limited trigonometric polynomials in `x`
//! with continuous time profiles, drawn once and realized on every grid of
//! the study, so the refinement only changes the discretization.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bilinear::q_form;
use super::spacetime::{hsb_norm, low_frequency_part, xsb_norm, SpaceTimeField, SpaceTimeGrid};
use crate::error::{Error, Result};
use crate::projections::Sign;
use crate::spectral::japanese;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFamily {
    /// Windowed free waves `e^{+-it|grad|} f` with rough `f`.
    FreeWave,
    /// Free waves times `e^{i tau0 t}`.
    ModulatedFreeWave,
    /// Gaussian bumps in time and frequency.
    Bump,
    /// Cycles through the three families above.
    Mixed,
    /// Free waves supported on a single ray of modes (opposite rays for `-`).
    Parallel,
}

impl ProbeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeFamily::FreeWave => "free-wave",
            ProbeFamily::ModulatedFreeWave => "modulated-free-wave",
            ProbeFamily::Bump => "bump",
            ProbeFamily::Mixed => "mixed",
            ProbeFamily::Parallel => "parallel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "free-wave" => ProbeFamily::FreeWave,
            "modulated-free-wave" => ProbeFamily::ModulatedFreeWave,
            "bump" => ProbeFamily::Bump,
            "mixed" => ProbeFamily::Mixed,
            "parallel" => ProbeFamily::Parallel,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// `e^{i (sheet |xi| + tau0) t}`
    Wave { sheet: f64, tau0: f64 },
    /// `exp(-(t - t0)^2 / (2 sigma^2)) e^{i omega t}`
    Bump { t0: f64, sigma: f64, omega: f64 },
}

/// Grid-independent description of one space-time function: spatial Fourier
/// coefficients (integer wavevectors) and a time profile, multiplied by the
/// raised-cosine window `sin^2(pi t / T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFunction {
    modes: Vec<([i64; 2], Complex64)>,
    profile: Profile,
}

impl ProbeFunction {
    pub fn zero() -> Self {
        Self {
            modes: Vec::new(),
            profile: Profile::Wave { sheet: 1.0, tau0: 0.0 },
        }
    }

    pub fn realize(&self, grid: SpaceTimeGrid) -> Result<SpaceTimeField> {
        let ns = grid.space.points();
        let half = grid.space.n() as i64 / 2;
        let mut mixed = vec![Complex64::new(0.0, 0.0); grid.points()];
        let period = grid.period();
        for &(k, c) in &self.modes {
            if k[0].abs() >= half || k[1].abs() >= half {
                return Err(Error::GridMismatch(format!("mode {k:?} does not fit on an N = {} grid", grid.space.n())));
            }
            let p = grid.space.mode_index(k);
            let abs_xi = (k[0] as f64).hypot(k[1] as f64) * grid.space.dk();
            for j in 0..grid.nt() {
                let t = grid.time(j);
                let window = (PI * t / period).sin().powi(2);
                let profile = match self.profile {
                    Profile::Wave { sheet, tau0 } => Complex64::from_polar(1.0, (sheet * abs_xi + tau0) * t),
                    Profile::Bump { t0, sigma, omega } => {
                        Complex64::from_polar((-(t - t0).powi(2) / (2.0 * sigma * sigma)).exp(), omega * t)
                    }
                };
                mixed[j * ns + p] = c * window * profile;
            }
        }
        SpaceTimeField::from_mixed(grid, mixed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub family: ProbeFamily,
    pub samples: usize,
    pub s: f64,
    pub b: f64,
    pub eps: f64,
    pub sign: Sign,
    /// Spatial modes are drawn from `|k_i| <= band`.
    pub band: i64,
    pub seed: u64,
}

fn random_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

fn band_modes(band: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for a in -band..=band {
        for b in -band..=band {
            if a != 0 || b != 0 {
                out.push([a, b]);
            }
        }
    }
    out
}

fn rough_modes(rng: &mut ChaCha8Rng, band: i64, s: f64, dk: f64) -> Vec<([i64; 2], Complex64)> {
    let all = band_modes(band);
    let keep = rng.gen_range(1..=all.len());
    let mut modes: Vec<_> = all
        .into_iter()
        .map(|k| {
            let xi = (k[0] as f64).hypot(k[1] as f64) * dk;
            let amp = rng.gen_range(0.0..1.0) * japanese(xi).powf(-(s + 1.0));
            (k, random_phase(rng) * amp)
        })
        .collect();
    // Keep a random subset so that few-mode configurations are visited too.
    for i in (1..modes.len()).rev() {
        let j = rng.gen_range(0..=i);
        modes.swap(i, j);
    }
    modes.truncate(keep);
    modes
}

fn bump_modes(rng: &mut ChaCha8Rng, band: i64) -> Vec<([i64; 2], Complex64)> {
    let center = [rng.gen_range(-band as f64..=band as f64), rng.gen_range(-band as f64..=band as f64)];
    let width: f64 = rng.gen_range(0.5..2.0);
    let shift = [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
    band_modes(band)
        .into_iter()
        .map(|k| {
            let d2 = (k[0] as f64 - center[0]).powi(2) + (k[1] as f64 - center[1]).powi(2);
            let phase = -(k[0] as f64 * shift[0] + k[1] as f64 * shift[1]);
            (k, Complex64::from_polar((-d2 / (2.0 * width * width)).exp(), phase))
        })
        .collect()
}

const RAYS: [[i64; 2]; 8] = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, 1], [1, -2], [2, -1]];

fn ray_modes(rng: &mut ChaCha8Rng, dir: [i64; 2], band: i64, s: f64, dk: f64) -> Vec<([i64; 2], Complex64)> {
    (1..)
        .map(|m| [m * dir[0], m * dir[1]])
        .take_while(|k| k[0].abs() <= band && k[1].abs() <= band)
        .map(|k| {
            let xi = (k[0] as f64).hypot(k[1] as f64) * dk;
            (k, random_phase(rng) * rng.gen_range(0.1..1.0) * japanese(xi).powf(-(s + 1.0)))
        })
        .collect()
}

/// Draws `(psi, phi)` for sample `index`; `dk` is the spatial frequency unit
/// shared by every grid of the study.
pub fn draw_pair(config: &ProbeConfig, index: usize, dk: f64, period: f64) -> (ProbeFunction, ProbeFunction) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index as u64);
    let sheet = config.sign.value();
    let family = match config.family {
        ProbeFamily::Mixed => [ProbeFamily::FreeWave, ProbeFamily::ModulatedFreeWave, ProbeFamily::Bump][index % 3],
        f => f,
    };
    let wave = |sheet: f64, tau0: f64| Profile::Wave { sheet, tau0 };
    match family {
        ProbeFamily::FreeWave => (
            ProbeFunction { modes: rough_modes(&mut rng, config.band, config.s, dk), profile: wave(1.0, 0.0) },
            ProbeFunction { modes: rough_modes(&mut rng, config.band, config.s, dk), profile: wave(sheet, 0.0) },
        ),
        ProbeFamily::ModulatedFreeWave => {
            let (t1, t2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            (
                ProbeFunction { modes: rough_modes(&mut rng, config.band, config.s, dk), profile: wave(1.0, t1) },
                ProbeFunction { modes: rough_modes(&mut rng, config.band, config.s, dk), profile: wave(sheet, t2) },
            )
        }
        ProbeFamily::Bump => {
            let bump = |rng: &mut ChaCha8Rng| ProbeFunction {
                modes: bump_modes(rng, config.band),
                profile: Profile::Bump {
                    t0: rng.gen_range(0.35..0.65) * period,
                    sigma: rng.gen_range(0.3..1.0),
                    omega: rng.gen_range(-3.0..3.0),
                },
            };
            (bump(&mut rng), bump(&mut rng))
        }
        ProbeFamily::Parallel => {
            let mut dir = RAYS[rng.gen_range(0..RAYS.len())];
            if rng.gen_bool(0.5) {
                dir = [-dir[0], -dir[1]];
            }
            let other = if config.sign == Sign::Plus { dir } else { [-dir[0], -dir[1]] };
            (
                ProbeFunction { modes: ray_modes(&mut rng, dir, config.band, config.s, dk), profile: wave(1.0, 0.0) },
                ProbeFunction { modes: ray_modes(&mut rng, other, config.band, config.s, dk), profile: wave(sheet, 0.0) },
            )
        }
        ProbeFamily::Mixed => unreachable!(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRatios {
    /// `||Q||_{H^{s,b-1+eps}} / (||psi||_{X_+} ||phi||_{X_+-})`
    pub rho: f64,
    /// Same with `phi` measured in the other sheet, `X^{s,b}_-+`.
    pub rho_alt: f64,
    /// `||Q restricted to |xi| < 1||_{H^{s,b-1+eps}} / (||psi||_{L^inf L^2} ||phi||_{L^2})`
    pub low: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn pair_ratios(psi: &SpaceTimeField, phi: &SpaceTimeField, s: f64, b: f64, eps: f64, sign: Sign) -> Result<PairRatios> {
    let q = q_form(psi, phi, sign)?;
    let num = hsb_norm(&q, s, b - 1.0 + eps);
    let x_psi = xsb_norm(psi, s, b, Sign::Plus);
    let low = hsb_norm(&low_frequency_part(&q, 1.0), s, b - 1.0 + eps);
    Ok(PairRatios {
        rho: ratio(num, x_psi * xsb_norm(phi, s, b, sign)),
        rho_alt: ratio(num, x_psi * xsb_norm(phi, s, b, sign.flip())),
        low: ratio(low, psi.linf_l2_norm() * phi.l2_norm()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioStats {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

impl RatioStats {
    pub fn from_values(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        let q = |p: f64| {
            if v.is_empty() {
                return 0.0;
            }
            let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
            v[rank - 1]
        };
        Self {
            count: v.len(),
            max: v.last().copied().unwrap_or(0.0),
            mean: if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 },
            q50: q(0.5),
            q90: q(0.9),
            q99: q(0.99),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridStats {
    pub nt: usize,
    pub n: usize,
    pub rho: RatioStats,
    pub rho_alt: RatioStats,
    pub low: RatioStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub index: usize,
    pub ratios: Vec<PairRatios>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub config: ProbeConfig,
    /// One entry per grid, coarsest first.
    pub grids: Vec<GridStats>,
    /// `|max rho(fine) - max rho(coarse)| / max rho(coarse)` per refinement.
    pub max_drift: Vec<f64>,
    #[serde(skip)]
    pub rows: Vec<ProbeRow>,
}

/// Runs `config.samples` pairs on each grid (coarsest first). All grids must
/// share `L` and `T`.
pub fn estimate_probe(config: &ProbeConfig, grids: &[SpaceTimeGrid]) -> Result<ProbeReport> {
    let first = grids
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one grid is required".into()))?;
    if config.band < 1 {
        return Err(Error::InvalidArgument("band must be at least 1".into()));
    }
    for g in grids {
        if g.space.length() != first.space.length() || g.period() != first.period() {
            return Err(Error::GridMismatch("probe grids must share L and T".into()));
        }
    }
    let dk = first.space.dk();
    let mut rows = Vec::with_capacity(config.samples);
    for index in 0..config.samples {
        let (psi, phi) = draw_pair(config, index, dk, first.period());
        let ratios = grids
            .iter()
            .map(|&g| pair_ratios(&psi.realize(g)?, &phi.realize(g)?, config.s, config.b, config.eps, config.sign))
            .collect::<Result<Vec<_>>>()?;
        rows.push(ProbeRow { index, ratios });
    }
    let stats: Vec<GridStats> = grids
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let col = |f: fn(&PairRatios) -> f64| rows.iter().map(|r| f(&r.ratios[i])).collect::<Vec<_>>();
            GridStats {
                nt: g.nt(),
                n: g.space.n(),
                rho: RatioStats::from_values(&col(|r| r.rho)),
                rho_alt: RatioStats::from_values(&col(|r| r.rho_alt)),
                low: RatioStats::from_values(&col(|r| r.low)),
            }
        })
        .collect();
    let max_drift = stats
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].rho.max, w[1].rho.max);
            if a == 0.0 {
                if b == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                (b - a).abs() / a
            }
        })
        .collect();
    Ok(ProbeReport {
        config: *config,
        grids: stats,
        max_drift,
        rows,
    })
}
