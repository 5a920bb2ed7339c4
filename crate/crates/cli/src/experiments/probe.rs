//! Bilinear-estimate probe and space-time norm tables.

use serde::Serialize;
use serde_json::{json, Value};

use monopole_core::nullform::bilinear::{MAX_SPATIAL_N, MAX_TIME_N};
use monopole_core::nullform::{
    angle_chain_report, estimate_probe, hsb_norm, xsb_norm, ProbeConfig, SpaceTimeGrid,
};
use monopole_core::nullform::probe::draw_pair;
use monopole_core::projections::Sign;
use monopole_core::spectral::{sobolev_norm, GridSpec};

use super::{initial_uv, Output};
use crate::config::RunConfig;
use crate::error::CliError;

const CHAIN_SAMPLES: usize = 100_000;

fn probe_config(config: &RunConfig, sign: Sign) -> ProbeConfig {
    ProbeConfig {
        family: config.family,
        samples: config.samples,
        s: config.s,
        b: config.b,
        eps: config.eps,
        sign,
        band: config.band,
        seed: config.seed,
    }
}

fn probe_grids(config: &RunConfig) -> Result<Vec<SpaceTimeGrid>, CliError> {
    let mut sizes = vec![(config.probe_nt, config.probe_n)];
    if config.refine {
        sizes.push((2 * config.probe_nt, 2 * config.probe_n));
    }
    sizes
        .into_iter()
        .map(|(nt, n)| {
            if n > MAX_SPATIAL_N || nt > MAX_TIME_N {
                return Err(CliError::Budget(format!(
                    "probe grid {nt} x {n}^2 exceeds the cap {MAX_TIME_N} x {MAX_SPATIAL_N}^2"
                )));
            }
            let space = GridSpec::new(n, config.length)?;
            Ok(SpaceTimeGrid::new(nt, config.probe_period, space)?)
        })
        .collect()
}

#[derive(Serialize)]
struct ProbeCsvRow {
    sign: Sign,
    index: usize,
    nt: usize,
    n: usize,
    rho: f64,
    rho_alt: f64,
    low: f64,
}

pub(super) fn probe(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let grids = probe_grids(config)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for sign in config.sign.signs() {
        let report = estimate_probe(&probe_config(config, sign), &grids)?;
        for row in &report.rows {
            for (g, r) in grids.iter().zip(&row.ratios) {
                rows.push(ProbeCsvRow {
                    sign,
                    index: row.index,
                    nt: g.nt(),
                    n: g.space.n(),
                    rho: r.rho,
                    rho_alt: r.rho_alt,
                    low: r.low,
                });
            }
        }
        reports.push(report);
    }
    out.csv("probe.csv", &rows)?;
    let results = json!({
        "reports": reports,
        "angle_chain": angle_chain_report(CHAIN_SAMPLES, config.seed),
    });
    Ok((results, 0))
}

#[derive(Serialize)]
struct DataNormRow {
    s: f64,
    u: f64,
    v: f64,
    total: f64,
}

#[derive(Serialize)]
struct SpaceTimeNormRow {
    index: usize,
    l2: f64,
    linf_l2: f64,
    xsb_plus: f64,
    xsb_minus: f64,
    hsb: f64,
    reflection_error: f64,
}

/// Sobolev norms of the initial data and `X^{s,b}`, `H^{s,b}` norms of the
/// probe functions on the coarse probe grid.
pub(super) fn norms(config: &RunConfig, out: &Output) -> Result<(Value, i32), CliError> {
    let scfg = config.solver_config()?;
    let (u, v) = initial_uv(config, &scfg)?;
    let data: Vec<_> = config
        .norm_s
        .iter()
        .map(|&s| {
            let (a, b) = (sobolev_norm(&u, s), sobolev_norm(&v, s));
            DataNormRow { s, u: a, v: b, total: a.hypot(b) }
        })
        .collect();
    out.csv("data_norms.csv", &data)?;

    let grid = probe_grids(config)?[0];
    let pc = probe_config(config, Sign::Plus);
    let (s, b) = (config.s, config.b);
    let mut rows = Vec::with_capacity(config.samples);
    let mut worst: f64 = 0.0;
    for index in 0..config.samples {
        let (psi, _) = draw_pair(&pc, index, grid.space.dk(), grid.period());
        let f = psi.realize(grid)?;
        let plus = xsb_norm(&f, s, b, Sign::Plus);
        let minus = xsb_norm(&f, s, b, Sign::Minus);
        let h = hsb_norm(&f, s, b);
        let rel = |x: f64, y: f64| if y > 0.0 { (x - y).abs() / y } else { x.abs() };
        let tr = f.time_reflect();
        let err = rel(xsb_norm(&tr, s, b, Sign::Minus), plus)
            .max(rel(xsb_norm(&tr, s, b, Sign::Plus), minus))
            .max(rel(xsb_norm(&f.space_reflect(), s, b, Sign::Plus), plus))
            .max(rel(hsb_norm(&tr, s, b), h));
        worst = worst.max(err);
        rows.push(SpaceTimeNormRow {
            index,
            l2: f.l2_norm(),
            linf_l2: f.linf_l2_norm(),
            xsb_plus: plus,
            xsb_minus: minus,
            hsb: h,
            reflection_error: err,
        });
    }
    out.csv("spacetime_norms.csv", &rows)?;
    let results = json!({
        "data_norms": data,
        "spacetime_samples": rows.len(),
        "max_reflection_error": worst,
        "grid": { "nt": grid.nt(), "n": grid.space.n(), "period": grid.period() },
    });
    Ok((results, 0))
}
