//! Curves in the Lorentz-Minkowski plane whose curvature is prescribed as a
//! function of position.
//!
//! The crate has four layers:
//! [`plane`] (metric, frames, pseudopolar and null coordinates),
//! [`quadrature`] (reconstruction from a momentum `K(ρ)` or `K(v)`),
//! [`catalog`] (closed-form families used as ground truth) and
//! [`verify`] (executable invariant checks).

pub mod catalog;
pub mod error;
pub mod plane;
pub mod quadrature;
pub mod samples;
pub mod verify;

pub use error::{Error, Result};
pub use plane::{
    causal_character, causal_character_with_tolerance, from_pseudopolar, metric, orthochrone,
    pseudodistance, pseudodistance_origin, signed_curvature_from_jet, to_pseudopolar, uv_coords,
    xy_from_uv, Branch, CausalCharacter, CausalSign, FrenetFrame, Jet, PlanePoint, PlaneVector,
    PseudopolarPoint, Side, Vec2,
};
pub use quadrature::{MomentumSpec, SamplingPolicy, SolveRequest, Spacing, Tolerances, Variable};
pub use samples::{numeric_curvature, CurveSamples};
