//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use monopole_core::algebra::{mat2_add, mat2_max_abs, mat2_mul, mat2_sub, Algebra, BETA, IDENTITY2};
use monopole_core::evolution::{evolve, evolve_monopole, DiagonalState, RunStatus, SolverConfig};
use monopole_core::monopole::{monopole_residuals, scaling_map, MonopoleState};
use monopole_core::nullform::bilinear::BilinearKind;
use monopole_core::nullform::{
    check_angle_identities, check_modulation_inequality, estimate_probe, exponent_admissible, hsb_norm, minus_case,
    plus_case, q_form, q_form_spatial, s_form, s_form_spatial, theta, xsb_norm, ExponentCondition, ExponentTuple,
    ProbeConfig, ProbeFamily, SpaceTimeField, SpaceTimeGrid,
};
use monopole_core::nullform::geometry::{random_frequency_pairs, random_modulation_samples};
use monopole_core::projections::{m_symbol, projection_product_norm, Sign};
use monopole_core::spectral::{
    apply_matrix_multiplier, japanese, make_rough_data, make_smooth_data, resample, sobolev_norm, Field,
    GridSpec, PairField, Repr, ScalarField,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.map_or(true, |b| elapsed < b);
    let pass = out.pass && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(", budget {:.0?}", b));
    println!(
        "[{}] {:>2} {}: {} ({:.2?}{})",
        if pass { "PASS" } else { "FAIL" },
        id,
        name,
        out.detail,
        elapsed,
        budget_note
    );
    pass
}

fn torus(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0 * PI).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn diff_norm<F: Field>(a: &F, b: &F, s: f64) -> f64 {
    let mut d = a.clone();
    d.axpy(c(-1.0), b).unwrap();
    sobolev_norm(&d, s)
}

fn projection_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let xi = [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)];
        let p = m_symbol(xi, Sign::Plus);
        let m = m_symbol(xi, Sign::Minus);
        let checks = [
            mat2_sub(&mat2_mul(&p, &p), &p),
            mat2_sub(&mat2_mul(&m, &m), &m),
            mat2_mul(&p, &m),
            mat2_sub(&mat2_add(&p, &m), &IDENTITY2),
            mat2_sub(&mat2_mul(&BETA, &p), &mat2_mul(&m, &BETA)),
            mat2_sub(&mat2_mul(&BETA, &m), &mat2_mul(&p, &BETA)),
            mat2_sub(&m, &m_symbol([-xi[0], -xi[1]], Sign::Plus)),
        ];
        worst = checks.iter().map(mat2_max_abs).fold(worst, f64::max);
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max defect {worst:.2e} over 1e4 frequencies (tol 1e-12)"),
    }
}

fn null_structure_product_law() -> Outcome {
    let pairs = random_frequency_pairs(100_000, 20.0, 2);
    let mut cos_err: f64 = 0.0;
    let mut bound_excess = f64::NEG_INFINITY;
    for (xi, eta) in pairs {
        let norm = projection_product_norm(xi, eta, (Sign::Plus, Sign::Plus)).unwrap();
        let th = theta(xi, eta).unwrap();
        cos_err = cos_err.max((norm - (th / 2.0).cos()).abs());
        let half_angle = 0.5 * theta(xi, [-eta[0], -eta[1]]).unwrap();
        bound_excess = bound_excess.max(norm - half_angle);
    }
    Outcome {
        pass: cos_err <= 1e-10 && bound_excess <= 0.0,
        detail: format!(
            "max |norm - cos(theta/2)| = {cos_err:.2e} (tol 1e-10), max norm - theta(xi,-eta)/2 = {bound_excess:.3e} (must be <= 0) over 1e5 pairs"
        ),
    }
}

fn angle_identities() -> Outcome {
    let r = check_angle_identities(&random_frequency_pairs(100_000, 20.0, 3));
    Outcome {
        pass: r.passes(1e-10, 1e-9) && r.samples - r.degenerate >= 99_000,
        detail: format!(
            "identity residual {:.2e} (tol 1e-10), ratio+ in [{:.6}, {:.6}], ratio- in [{:.6}, {:.6}], bounds [1, {:.6}], {} degenerate of {}",
            r.max_identity_residual,
            r.ratio_plus.0,
            r.ratio_plus.1,
            r.ratio_minus.0,
            r.ratio_minus.1,
            r.ratio_bounds.1,
            r.degenerate,
            r.samples
        ),
    }
}

fn modulation_inequality() -> Outcome {
    let r = check_modulation_inequality(&random_modulation_samples(1_000_000, 20.0, 4));
    Outcome {
        pass: r.violations == 0,
        detail: format!("{} violations in {} samples, max excess {:.3e}", r.violations, r.samples, r.max_excess),
    }
}

/// `exp(+- t alpha.xi) = cos(t|xi|) I +- i sin(t|xi|) alpha.xi/|xi|` applied
/// mode by mode.
fn exact_free(f: &PairField, t: f64, sign: f64) -> PairField {
    apply_matrix_multiplier(f, |xi| {
        let a = xi[0].hypot(xi[1]);
        if a == 0.0 {
            return [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
        }
        let (cs, sn) = ((t * a).cos(), sign * (t * a).sin());
        let (n1, n2) = (xi[0] / a, xi[1] / a);
        let i = Complex64::new(0.0, 1.0);
        [[c(cs) + i * sn * n1, i * sn * n2], [i * sn * n2, c(cs) - i * sn * n1]]
    })
    .unwrap()
}

fn abelian_exactness() -> Outcome {
    let g = torus(64);
    let mut cfg = SolverConfig::new(g, 0.01, 1.0);
    cfg.algebra = Algebra::ABELIAN2;
    let mut worst: f64 = 0.0;

    let mut single = PairField::zeros(g, Algebra::ABELIAN2, Repr::Fourier);
    single.first.entries_mut()[0].data_mut()[g.mode_index([3, -2])] = Complex64::new(0.0, 1.0);
    single.second.entries_mut()[0].data_mut()[g.mode_index([-3, 2])] = Complex64::new(0.0, 1.0);
    let mut cases = vec![(single.clone(), single)];
    for seed in 0..3 {
        cases.push((
            make_rough_data(0.3, 10 + seed, 1.0, g, Algebra::ABELIAN2).unwrap(),
            make_smooth_data(1.5, 20 + seed, 1.0, g, Algebra::ABELIAN2).unwrap(),
        ));
    }
    for (u0, v0) in &cases {
        let traj = evolve(u0, v0, &cfg).unwrap();
        let (u, v) = traj.last().to_uv();
        worst = worst.max(diff_norm(&u, &exact_free(u0, 1.0, 1.0), 0.0));
        worst = worst.max(diff_norm(&v, &exact_free(v0, 1.0, -1.0), 0.0));
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max L2 error {worst:.2e} at T = 1, N = 64, {} data sets (tol 1e-10)", cases.len()),
    }
}

fn nonabelian_convergence() -> Outcome {
    let g = torus(64);
    let u0 = make_smooth_data(2.5, 11, 1.0, g, Algebra::SU2).unwrap();
    let v0 = make_smooth_data(2.5, 12, 1.0, g, Algebra::SU2).unwrap();
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let mut finals = Vec::new();
    let mut residuals = Vec::new();
    for dt in dts {
        let mut cfg = SolverConfig::new(g, dt, 0.5);
        cfg.blowup_factor = f64::INFINITY;
        let traj = evolve(&u0, &v0, &cfg).unwrap();
        let states = traj.monopole_states();
        let mut r = [0.0f64; 4];
        for w in states.windows(2) {
            let x = monopole_residuals(&w[0], &w[1]).unwrap();
            for i in 0..4 {
                r[i] = r[i].max(x[i]);
            }
        }
        finals.push(traj.last().clone());
        residuals.push(r);
    }
    let diffs: Vec<f64> = finals.windows(2).map(|w| diff_norm(&w[0], &w[1], 0.0)).collect();
    let orders: Vec<f64> = diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let res_orders: Vec<[f64; 4]> = residuals
        .windows(2)
        .map(|w| std::array::from_fn(|i| (w[0][i] / w[1][i]).log2()))
        .collect();
    let ok_sol = orders.iter().all(|p| (p - 4.0).abs() <= 0.3);
    let ok_res = res_orders.iter().flatten().all(|p| (p - 2.0).abs() <= 0.3);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
    let res_min: Vec<f64> = res_orders.iter().map(|r| r.iter().cloned().fold(f64::NAN, f64::min)).collect();
    let res_max: Vec<f64> = res_orders.iter().map(|r| r.iter().cloned().fold(f64::NAN, f64::max)).collect();
    Outcome {
        pass: ok_sol && ok_res,
        detail: format!(
            "solution orders [{}] (want 4 +- 0.3), residual orders (phi, Lorenz, A1, A2) min [{}] max [{}] (want 2 +- 0.3)",
            fmt(&orders),
            fmt(&res_min),
            fmt(&res_max)
        ),
    }
}

fn null_cancellation() -> Outcome {
    let g = torus(16);
    let st = SpaceTimeGrid::new(8, 2.0 * PI, g).unwrap();
    let pairs: [([i64; 2], [i64; 2]); 5] = [
        ([1, 0], [1, 0]),
        ([1, 0], [3, 0]),
        ([1, 1], [2, 2]),
        ([-1, 2], [-3, 6]),
        ([0, -2], [0, -1]),
    ];
    let coeff = Complex64::new(0.7, -0.4);
    let mut nonzero = 0usize;
    let mut checked = 0usize;
    for (p, q) in pairs {
        let a = ScalarField::mode(g, p, coeff);
        let b = ScalarField::mode(g, q, coeff);
        let sa = SpaceTimeField::mode(st, 1, p, coeff);
        let sb = SpaceTimeField::mode(st, -2, q, coeff);
        let mut outputs = vec![
            q_form_spatial(&a, &b, Sign::Plus).unwrap().into_data(),
            q_form(&sa, &sb, Sign::Plus).unwrap().coeffs().to_vec(),
        ];
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            outputs.push(s_form_spatial(&a, &b, alpha, Sign::Plus).unwrap().into_data());
            outputs.push(s_form(&sa, &sb, alpha, Sign::Plus).unwrap().coeffs().to_vec());
        }
        for out in outputs {
            checked += 1;
            if out.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
                nonzero += 1;
            }
        }
    }
    let control = q_form_spatial(&ScalarField::mode(g, [1, 0], coeff), &ScalarField::mode(g, [0, 1], coeff), Sign::Plus)
        .unwrap();
    let control_live = control.data().iter().any(|z| z.norm() > 0.0);
    let weight_zero = BilinearKind::S { alpha: 0.5, sign: Sign::Plus }.weight([2, 1], [4, 2], 1.0) == 0.0;
    Outcome {
        pass: nonzero == 0 && control_live && weight_zero,
        detail: format!("{nonzero} of {checked} collinear outputs nonzero (must be exactly 0); orthogonal control nonzero: {control_live}"),
    }
}

fn norm_identities() -> Outcome {
    let g = torus(8);
    let st = SpaceTimeGrid::new(16, 2.0 * PI, g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let coeffs = (0..st.points())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = SpaceTimeField::from_coeffs(st, coeffs).unwrap();
        let (tr, sr) = (f.time_reflect(), f.space_reflect());
        for (s, b) in [(0.3, 0.76), (0.0, -0.2), (1.0, 0.5), (-0.5, 1.0)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let x = xsb_norm(&f, s, b, sign);
                let rel = |y: f64| (y - x).abs() / x;
                worst = worst.max(rel(xsb_norm(&tr, s, b, sign.flip())));
                worst = worst.max(rel(xsb_norm(&sr, s, b, sign)));
            }
            let h = hsb_norm(&f, s, b);
            worst = worst.max((hsb_norm(&tr, s, b) - h).abs() / h);
            worst = worst.max((hsb_norm(&sr, s, b) - h).abs() / h);
        }
    }
    let mut cone: f64 = 0.0;
    for (k, kt) in [([3i64, 4i64], 5i64), ([0, 2], 2), ([-6, -8], 10)] {
        let xi = (k[0] as f64).hypot(k[1] as f64);
        for s in [0.3, 1.0, -0.4] {
            let want = japanese(xi).powf(s);
            let plus = xsb_norm(&SpaceTimeField::mode(SpaceTimeGrid::new(32, 2.0 * PI, torus(32)).unwrap(), kt, k, c(1.0)), s, 0.76, Sign::Plus);
            let minus = xsb_norm(&SpaceTimeField::mode(SpaceTimeGrid::new(32, 2.0 * PI, torus(32)).unwrap(), -kt, k, c(1.0)), s, 0.76, Sign::Minus);
            cone = cone.max((plus - want).abs() / want).max((minus - want).abs() / want);
        }
    }
    Outcome {
        pass: worst <= 1e-12 && cone <= 1e-15,
        detail: format!("reflection identities max rel error {worst:.2e} (tol 1e-12); on-cone weight rel error {cone:.2e}"),
    }
}

fn exponent_checker() -> Outcome {
    use ExponentCondition::*;
    let plus = exponent_admissible(&plus_case(0.76, 0.04));
    let minus = exponent_admissible(&minus_case(0.76, 0.04));
    let excl_single = exponent_admissible(&ExponentTuple { s: 0.5, alpha: 0.25, s1: 0.75, s2: 0.5, b_prime: 0.6 });
    let excl_sum = exponent_admissible(&ExponentTuple { s: -0.25, alpha: 0.25, s1: 0.25, s2: 0.25, b_prime: 0.6 });
    let small_alpha = exponent_admissible(&ExponentTuple { s: 0.4, alpha: 0.2, s1: 0.4, s2: 0.7, b_prime: 0.56 });
    let pass = plus.admissible
        && minus.admissible
        && excl_single.failures == vec![ExcludedS1Endpoint]
        && excl_sum.failures == vec![ExcludedSumEndpoint]
        && small_alpha.failures == vec![AlphaLowerBound];
    Outcome {
        pass,
        detail: format!(
            "+ case {}, - case {}, (s1, alpha) = (3/4, 1/4) rejected by {:?}, (s1 + s2, alpha) = (1/2, 1/4) rejected by {:?}, alpha = 0.2 rejected by {:?}",
            plus.admissible,
            minus.admissible,
            excl_single.failure_names(),
            excl_sum.failure_names(),
            small_alpha.failure_names()
        ),
    }
}

fn estimate_probe_refinement() -> Outcome {
    let coarse = SpaceTimeGrid::new(32, 2.0 * PI, torus(16)).unwrap();
    let fine = SpaceTimeGrid::new(64, 2.0 * PI, torus(32)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let cfg = ProbeConfig { family: ProbeFamily::Mixed, samples: 1000, s: 0.3, b: 0.76, eps: 0.04, sign, band: 3, seed: 42 };
        let r = estimate_probe(&cfg, &[coarse, fine]).unwrap();
        let (mc, mf) = (r.grids[0].rho.max, r.grids[1].rho.max);
        pass &= mc.is_finite() && mf.is_finite() && mc > 0.0 && r.max_drift[0] < 0.10;
        let par = estimate_probe(&ProbeConfig { family: ProbeFamily::Parallel, samples: 100, ..cfg }, &[coarse, fine]).unwrap();
        let par_max = par.grids.iter().map(|g| g.rho.max).fold(0.0, f64::max);
        pass &= par_max == 0.0;
        parts.push(format!(
            "Q{}: max rho {mc:.4} -> {mf:.4} (drift {:.2e}, tol 0.10), q99 {:.4}, parallel max rho {par_max}",
            sign.symbol(),
            r.max_drift[0],
            r.grids[0].rho.q99
        ));
    }
    Outcome { pass, detail: format!("1000 pairs per sign; {}", parts.join("; ")) }
}

fn scaling_symmetry() -> Outcome {
    let g = torus(128);
    let algebra = Algebra::ABELIAN2;
    let fields: Vec<_> = (0..4)
        .map(|k| make_smooth_data(0.8, 30 + k, 1.0, g, algebra).unwrap())
        .collect();
    let data = MonopoleState::new(
        fields[0].first.clone(),
        fields[1].first.clone(),
        fields[2].second.clone(),
        fields[3].second.clone(),
        0.0,
    )
    .unwrap();
    let t = 0.5;
    let lambda = 2usize;
    let mut cfg = SolverConfig::new(g, 0.05, t);
    cfg.algebra = algebra;
    let lhs = evolve_monopole(&scaling_map(&data, lambda).unwrap(), &cfg).unwrap().last().to_monopole();
    cfg.horizon = lambda as f64 * t;
    let rhs = scaling_map(&evolve_monopole(&data, &cfg).unwrap().last().to_monopole(), lambda).unwrap();
    let err = diff_norm(&lhs, &rhs, 0.0);
    let scale = sobolev_norm(&lhs, 0.0);
    Outcome {
        pass: err <= 1e-10 && (lhs.t - rhs.t).abs() < 1e-14 && scale > 0.1,
        detail: format!("L2 mismatch {err:.2e} (tol 1e-10) at t = {t}, lambda = 2, N = 128, |state| = {scale:.3}"),
    }
}

fn regularity_persistence() -> Outcome {
    let base = torus(64);
    let u0 = make_rough_data(0.3, 5, 1.0, base, Algebra::SU2).unwrap();
    let v0 = make_rough_data(0.3, 6, 1.0, base, Algebra::SU2).unwrap();
    let mut finals: Vec<DiagonalState> = Vec::new();
    for n in [64usize, 128, 256] {
        let g = torus(n);
        let mut cfg = SolverConfig::new(g, 0.005, 0.25);
        cfg.blowup_factor = f64::INFINITY;
        let traj = evolve(&resample(&u0, g).unwrap(), &resample(&v0, g).unwrap(), &cfg).unwrap();
        assert_eq!(traj.status, RunStatus::Completed);
        finals.push(traj.last().clone());
    }
    let gap = |coarse: &DiagonalState, fine: &DiagonalState| {
        let g = fine.u_plus.grid();
        let (u, v) = coarse.to_uv();
        let (uf, vf) = fine.to_uv();
        let du = diff_norm(&resample(&u, g).unwrap(), &uf, 0.26);
        let dv = diff_norm(&resample(&v, g).unwrap(), &vf, 0.26);
        du.hypot(dv)
    };
    let d1 = gap(&finals[0], &finals[1]);
    let d2 = gap(&finals[1], &finals[2]);
    Outcome {
        pass: d1 / d2 >= 2.0,
        detail: format!("H^0.26 gaps |S64 - S128| = {d1:.3e}, |S128 - S256| = {d2:.3e}, ratio {:.1} (want >= 2)", d1 / d2),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "projection algebra", Some(secs(1)), projection_algebra),
        run(2, "null-structure product law", Some(secs(5)), null_structure_product_law),
        run(3, "angle identities", Some(secs(5)), angle_identities),
        run(4, "modulation inequality", Some(secs(10)), modulation_inequality),
        run(5, "abelian exactness", None, abelian_exactness),
        run(6, "nonabelian convergence", Some(secs(120)), nonabelian_convergence),
        run(7, "null cancellation", None, null_cancellation),
        run(8, "norm identities", None, norm_identities),
        run(9, "exponent checker", None, exponent_checker),
        run(10, "estimate probe", Some(secs(600)), estimate_probe_refinement),
        run(11, "scaling symmetry", None, scaling_symmetry),
        run(12, "regularity persistence", Some(secs(300)), regularity_persistence),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
