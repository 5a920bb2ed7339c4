//! Admissibility of exponent tuples `(s, alpha, s1, s2, b')` for the
//! homogeneous null-form estimate
//! `||D^s S^alpha(psi, phi)||_{L^2} <~ ||D^{s1} psi||_{X^{0,b'}} ||D^{s2} phi||_{X^{0,b'}}`.

use serde::Serialize;

/// Slack for the equality and the inequalities, so that tuples built from
/// decimal inputs are not rejected by rounding.
pub const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTuple {
    pub s: f64,
    pub alpha: f64,
    pub s1: f64,
    pub s2: f64,
    pub b_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentCondition {
    /// `s + alpha = s1 + s2 - 1/2`
    ScalingRelation,
    /// `alpha >= 1/4`
    AlphaLowerBound,
    /// `s1 <= alpha + 1/2`
    S1UpperBound,
    /// `s2 <= alpha + 1/2`
    S2UpperBound,
    /// `s1 + s2 >= 1/2`
    SumLowerBound,
    /// `s > -1/2`
    SLowerBound,
    /// `b' > 1/2`
    BPrimeLowerBound,
    /// `(s1, alpha) != (3/4, 1/4)`
    ExcludedS1Endpoint,
    /// `(s2, alpha) != (3/4, 1/4)`
    ExcludedS2Endpoint,
    /// `(s1 + s2, alpha) != (1/2, 1/4)`
    ExcludedSumEndpoint,
}

impl ExponentCondition {
    pub fn name(&self) -> &'static str {
        match self {
            ExponentCondition::ScalingRelation => "s + alpha = s1 + s2 - 1/2",
            ExponentCondition::AlphaLowerBound => "alpha >= 1/4",
            ExponentCondition::S1UpperBound => "s1 <= alpha + 1/2",
            ExponentCondition::S2UpperBound => "s2 <= alpha + 1/2",
            ExponentCondition::SumLowerBound => "s1 + s2 >= 1/2",
            ExponentCondition::SLowerBound => "s > -1/2",
            ExponentCondition::BPrimeLowerBound => "b' > 1/2",
            ExponentCondition::ExcludedS1Endpoint => "(s1, alpha) != (3/4, 1/4)",
            ExponentCondition::ExcludedS2Endpoint => "(s2, alpha) != (3/4, 1/4)",
            ExponentCondition::ExcludedSumEndpoint => "(s1 + s2, alpha) != (1/2, 1/4)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub failures: Vec<ExponentCondition>,
}

impl Admissibility {
    pub fn failure_names(&self) -> Vec<&'static str> {
        self.failures.iter().map(ExponentCondition::name).collect()
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXPONENT_TOL
}

pub fn exponent_admissible(e: &ExponentTuple) -> Admissibility {
    use ExponentCondition::*;
    let mut failures = Vec::new();
    let mut require = |ok: bool, c| {
        if !ok {
            failures.push(c);
        }
    };
    require(near(e.s + e.alpha, e.s1 + e.s2 - 0.5), ScalingRelation);
    require(e.alpha >= 0.25 - EXPONENT_TOL, AlphaLowerBound);
    require(e.s1 <= e.alpha + 0.5 + EXPONENT_TOL, S1UpperBound);
    require(e.s2 <= e.alpha + 0.5 + EXPONENT_TOL, S2UpperBound);
    require(e.s1 + e.s2 >= 0.5 - EXPONENT_TOL, SumLowerBound);
    require(e.s > -0.5 + EXPONENT_TOL, SLowerBound);
    require(e.b_prime > 0.5 + EXPONENT_TOL, BPrimeLowerBound);
    let endpoint_alpha = near(e.alpha, 0.25);
    require(!(endpoint_alpha && near(e.s1, 0.75)), ExcludedS1Endpoint);
    require(!(endpoint_alpha && near(e.s2, 0.75)), ExcludedS2Endpoint);
    require(!(endpoint_alpha && near(e.s1 + e.s2, 0.5)), ExcludedSumEndpoint);
    Admissibility {
        admissible: failures.is_empty(),
        failures,
    }
}

/// Tuple used for `Q_+`: `s = alpha = b - 1/2 + eps`, `s1 = s`,
/// `s2 = s + 1/2`, `b' = 2b - 1 + eps`.
pub fn plus_case(b: f64, eps: f64) -> ExponentTuple {
    let s = b - 0.5 + eps;
    ExponentTuple {
        s,
        alpha: s,
        s1: s,
        s2: s + 0.5,
        b_prime: 2.0 * b - 1.0 + eps,
    }
}

/// Tuple used for `Q_-`: `s1 = s2 = s + 1/2`, `alpha = b - 1/2 + eps`,
/// `b' = 2b - 1 + eps`. The angle bound for `Q_-` carries an extra
/// `|xi|^{1/2}`, so the output derivative is `D^{s + 1/2}` and that is the
/// `s` entry of the tuple.
pub fn minus_case(b: f64, eps: f64) -> ExponentTuple {
    let s = b - 0.5 + eps;
    ExponentTuple {
        s: s + 0.5,
        alpha: s,
        s1: s + 0.5,
        s2: s + 0.5,
        b_prime: 2.0 * b - 1.0 + eps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExponentCondition::*;

    #[test]
    fn paper_cases_pass() {
        let p = plus_case(0.76, 0.04);
        assert!((p.s - 0.3).abs() < 1e-15 && (p.s2 - 0.8).abs() < 1e-15);
        assert!(exponent_admissible(&p).admissible);
        let m = minus_case(0.76, 0.04);
        assert!(exponent_admissible(&m).admissible, "{:?}", exponent_admissible(&m));
    }

    #[test]
    fn minus_case_with_undifferentiated_output_fails_scaling() {
        let mut m = minus_case(0.76, 0.04);
        m.s -= 0.5;
        assert_eq!(exponent_admissible(&m).failures, vec![ScalingRelation]);
    }

    #[test]
    fn small_alpha_rejected() {
        let e = ExponentTuple { s: 0.4, alpha: 0.2, s1: 0.4, s2: 0.7, b_prime: 0.56 };
        let r = exponent_admissible(&e);
        assert!(!r.admissible);
        assert_eq!(r.failures, vec![AlphaLowerBound]);
        assert_eq!(r.failure_names(), vec!["alpha >= 1/4"]);
    }

    #[test]
    fn exclusions() {
        let e = ExponentTuple { s: 0.75, alpha: 0.25, s1: 0.75, s2: 0.75, b_prime: 0.6 };
        assert_eq!(exponent_admissible(&e).failures, vec![ExcludedS1Endpoint, ExcludedS2Endpoint]);
        let e = ExponentTuple { s: 0.5, alpha: 0.25, s1: 0.75, s2: 0.5, b_prime: 0.6 };
        assert_eq!(exponent_admissible(&e).failures, vec![ExcludedS1Endpoint]);
        let e = ExponentTuple { s: -0.25, alpha: 0.25, s1: 0.25, s2: 0.25, b_prime: 0.6 };
        assert_eq!(exponent_admissible(&e).failures, vec![ExcludedSumEndpoint]);
    }

    #[test]
    fn remaining_conditions_are_named() {
        let e = ExponentTuple { s: -0.6, alpha: 0.3, s1: 0.9, s2: -0.7, b_prime: 0.5 };
        let r = exponent_admissible(&e);
        assert_eq!(r.failures, vec![S1UpperBound, SumLowerBound, SLowerBound, BPrimeLowerBound]);
    }
}
