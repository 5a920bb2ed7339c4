//! Angles, cone-distance weights and the pointwise inequalities behind the
//! null-form estimate.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Unsigned angle between `xi` and `eta`, in `[0, pi]`.
///
/// Evaluated as `atan2(|xi x eta|, xi.eta)`, which agrees with the arccosine
/// of the normalized inner product but keeps full relative accuracy near
/// `0` and `pi`.
pub fn theta(xi: [f64; 2], eta: [f64; 2]) -> Result<f64> {
    if norm(xi) == 0.0 || norm(eta) == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(cross(xi, eta).abs().atan2(dot(xi, eta)))
}

/// `|x||y| - x.y`, accurate when `x` and `y` are nearly parallel.
fn one_minus_cos_scaled(x: [f64; 2], y: [f64; 2]) -> f64 {
    let p = norm(x) * norm(y);
    let d = dot(x, y);
    if d > 0.0 {
        let c = cross(x, y);
        c * c / (p + d)
    } else {
        p - d
    }
}

/// `|x||y| + x.y`, accurate when `x` and `y` are nearly antiparallel.
fn one_plus_cos_scaled(x: [f64; 2], y: [f64; 2]) -> f64 {
    let p = norm(x) * norm(y);
    let d = dot(x, y);
    if d < 0.0 {
        let c = cross(x, y);
        c * c / (p - d)
    } else {
        p + d
    }
}

/// `(r_+, r_-)` with `r_+ = |xi - eta| + |eta| - |xi|` and
/// `r_- = |xi| - ||xi - eta| - |eta||`.
///
/// Both are rewritten through the product identities
/// `r_+ (|eta| + |xi-eta| + |xi|) = 2(|eta||xi-eta| - eta.(xi-eta))` and
/// `r_- (|xi| + ||xi-eta| - |eta||) = 2(|xi-eta||eta| + eta.(xi-eta))`, which
/// avoids cancellation and returns exact zeros on collinear input.
pub fn r_weights(xi: [f64; 2], eta: [f64; 2]) -> (f64, f64) {
    let x = sub(xi, eta);
    let a = norm(x);
    let b = norm(eta);
    let c = norm(xi);
    let plus_den = a + b + c;
    let r_plus = if plus_den == 0.0 {
        0.0
    } else {
        2.0 * one_minus_cos_scaled(x, eta) / plus_den
    };
    let minus_den = c + (a - b).abs();
    let r_minus = if minus_den == 0.0 {
        0.0
    } else {
        2.0 * one_plus_cos_scaled(x, eta) / minus_den
    };
    (r_plus.max(0.0), r_minus.max(0.0))
}

/// Uniform samples of pairs `(xi, eta)` with components in `[-scale, scale]`.
pub fn random_frequency_pairs(count: usize, scale: f64, seed: u64) -> Vec<([f64; 2], [f64; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v = || [rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)];
            (v(), v())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleIdentityReport {
    pub samples: usize,
    /// Samples with `xi - eta = 0`, `eta = 0` or `xi = 0`, or exactly
    /// collinear input where the comparability ratio is `0/0`.
    pub degenerate: usize,
    /// Largest `|lhs - rhs| / (|eta| + |xi - eta|)^2` over both identities.
    pub max_identity_residual: f64,
    pub ratio_plus: (f64, f64),
    pub ratio_minus: (f64, f64),
    /// Analytic range `[1, pi^2/2]` for both ratios.
    pub ratio_bounds: (f64, f64),
}

impl AngleIdentityReport {
    pub fn passes(&self, identity_tol: f64, ratio_tol: f64) -> bool {
        let (lo, hi) = self.ratio_bounds;
        self.max_identity_residual <= identity_tol
            && [self.ratio_plus, self.ratio_minus]
                .iter()
                .all(|&(a, b)| a >= lo - ratio_tol && b <= hi + ratio_tol)
    }
}

/// Checks the two product identities and the two-sided comparability
/// `theta^2(xi-eta, eta) ~ (|xi-eta| + |eta|) r_+ / (|xi-eta||eta|)` and
/// `theta^2(xi-eta, -eta) ~ |xi| r_- / (|xi-eta||eta|)`.
pub fn check_angle_identities(samples: &[([f64; 2], [f64; 2])]) -> AngleIdentityReport {
    let mut report = AngleIdentityReport {
        samples: samples.len(),
        degenerate: 0,
        max_identity_residual: 0.0,
        ratio_plus: (f64::INFINITY, f64::NEG_INFINITY),
        ratio_minus: (f64::INFINITY, f64::NEG_INFINITY),
        ratio_bounds: (1.0, PI * PI / 2.0),
    };
    for &(xi, eta) in samples {
        let x = sub(xi, eta);
        let (a, b, c) = (norm(x), norm(eta), norm(xi));
        if a == 0.0 || b == 0.0 || c == 0.0 {
            report.degenerate += 1;
            continue;
        }
        let scale = (a + b) * (a + b);
        let d = dot(eta, x);
        let lhs1 = (b + a - c) * (b + a + c);
        let rhs1 = 2.0 * (b * a - d);
        let lhs2 = (c + (a - b).abs()) * (c - (a - b).abs());
        let rhs2 = 2.0 * (a * b + d);
        let res = ((lhs1 - rhs1).abs().max((lhs2 - rhs2).abs())) / scale;
        report.max_identity_residual = report.max_identity_residual.max(res);

        let (rp, rm) = r_weights(xi, eta);
        let neg_eta = [-eta[0], -eta[1]];
        let tp = theta(x, eta).expect("nonzero");
        let tm = theta(x, neg_eta).expect("nonzero");
        let bound_p = (a + b) / (a * b) * rp;
        let bound_m = c / (a * b) * rm;
        if bound_p == 0.0 || bound_m == 0.0 {
            report.degenerate += 1;
            continue;
        }
        let qp = tp * tp / bound_p;
        let qm = tm * tm / bound_m;
        report.ratio_plus = (report.ratio_plus.0.min(qp), report.ratio_plus.1.max(qp));
        report.ratio_minus = (report.ratio_minus.0.min(qm), report.ratio_minus.1.max(qm));
    }
    report
}

/// One sample `(tau, lambda, xi, eta)` of the modulation inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSample {
    pub tau: f64,
    pub lambda: f64,
    pub xi: [f64; 2],
    pub eta: [f64; 2],
}

/// `(r_+ - rhs_+, r_- - rhs_-)` where
/// `rhs_+- = ||tau| - |xi|| + |tau - lambda - |xi-eta|| + |lambda -+ |eta||`.
/// Nonpositive entries mean the inequality holds.
pub fn modulation_excess(p: &ModulationSample) -> (f64, f64) {
    let (rp, rm) = r_weights(p.xi, p.eta);
    let a = norm(sub(p.xi, p.eta));
    let b = norm(p.eta);
    let c = norm(p.xi);
    let common = (p.tau.abs() - c).abs() + (p.tau - p.lambda - a).abs();
    (rp - (common + (p.lambda - b).abs()), rm - (common + (p.lambda + b).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `r - rhs` seen, either sign.
    pub max_excess: f64,
}

/// Rounding slack relative to the size of the sample.
const MODULATION_SLACK: f64 = 1e-12;

pub fn check_modulation_inequality(samples: &[ModulationSample]) -> ModulationReport {
    let mut report = ModulationReport {
        samples: samples.len(),
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for p in samples {
        let (ep, em) = modulation_excess(p);
        let scale = 1.0 + p.tau.abs() + p.lambda.abs() + norm(p.xi) + norm(p.eta);
        if ep.max(em) > MODULATION_SLACK * scale {
            report.violations += 1;
        }
        report.max_excess = report.max_excess.max(ep.max(em));
    }
    report
}

/// Random samples with every coordinate uniform in `[-scale, scale]`; one in
/// four is pinned to a cone point `tau = +-|xi|`, `lambda = +-|eta|`.
pub fn random_modulation_samples(count: usize, scale: f64, seed: u64) -> Vec<ModulationSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut u = || rng.gen_range(-scale..scale);
            let xi = [u(), u()];
            let eta = [u(), u()];
            let (mut tau, mut lambda) = (u(), u());
            if i % 4 == 3 {
                tau = if tau < 0.0 { -norm(xi) } else { norm(xi) };
                lambda = if lambda < 0.0 { -norm(eta) } else { norm(eta) };
            }
            ModulationSample { tau, lambda, xi, eta }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleChainReport {
    pub samples: usize,
    /// Largest `theta(xi-eta, eta) / (r_+ / |xi-eta|)^{1/2}` over samples
    /// with `|eta| >= |xi-eta|`.
    pub max_constant: f64,
    pub theta_at_max: f64,
    /// `pi`, from the comparability constants: `theta^2 <= pi^2 sin^2(theta/2)`
    /// and `sin^2(theta/2) <= r_+ / |xi-eta|`.
    pub analytic_bound: f64,
    /// `pi^2 / (4 sqrt 2)`, the value commonly quoted for this chain.
    pub reference_constant: f64,
}

/// Samples the chain `theta(xi-eta, eta) <= C (r_+ / |xi-eta|)^{1/2}` for
/// `|eta| >= |xi-eta|`. Half of the samples are drawn near the antiparallel
/// configuration where the constant is largest.
pub fn angle_chain_report(count: usize, seed: u64) -> AngleChainReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0.0, 0.0);
    for i in 0..count {
        let a: f64 = rng.gen_range(0.01..10.0);
        let b: f64 = a * rng.gen_range(1.0..20.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let angle: f64 = if i % 2 == 0 {
            rng.gen_range(0.0..PI)
        } else {
            PI - rng.gen_range(0.0..1e-3f64)
        };
        let x = [a * phi.cos(), a * phi.sin()];
        let eta = [b * (phi + angle).cos(), b * (phi + angle).sin()];
        let xi = [x[0] + eta[0], x[1] + eta[1]];
        let (rp, _) = r_weights(xi, eta);
        if rp == 0.0 {
            continue;
        }
        let t = theta(x, eta).expect("nonzero");
        let c = t / (rp / a).sqrt();
        if c > best.0 {
            best = (c, t);
        }
    }
    AngleChainReport {
        samples: count,
        max_constant: best.0,
        theta_at_max: best.1,
        analytic_bound: PI,
        reference_constant: PI * PI / (4.0 * 2f64.sqrt()),
    }
}
