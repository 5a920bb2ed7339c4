//! Angles, modulation weights, the bilinear operators `Q_+-` and
//! `S^alpha_+-`, `X^{s,b}` and `H^{s,b}` norms, and estimate probes.

pub mod bilinear;
pub mod exponents;
pub mod geometry;
pub mod probe;
pub mod spacetime;

pub use bilinear::{q_form, q_form_spatial, s_form, s_form_spatial, BilinearKind};
pub use exponents::{exponent_admissible, minus_case, plus_case, Admissibility, ExponentCondition, ExponentTuple};
pub use geometry::{
    angle_chain_report, check_angle_identities, check_modulation_inequality, r_weights, theta, ModulationSample,
};
pub use probe::{estimate_probe, ProbeConfig, ProbeFamily, ProbeReport};
pub use spacetime::{hsb_norm, xsb_norm, SpaceTimeField, SpaceTimeGrid};
