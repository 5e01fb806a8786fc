//! Twist maps of the plane from generating functions, Moser interpolation,
//! chained twist systems, the discrete action, and the gradient-like
//! recurrence flow locating stationary braids.

mod chain;
mod flow;
mod genfn;
mod moser;

pub use chain::{
    build_chained_isotopy, ChainParams, ChainedIsotopy, Composed, LocalRotation, PlaneMap,
    RecurrenceSystem, Step, TracedSet,
};
pub use flow::{
    find_stationary, lift_orbit, verify_orbit_braiding, FlowOptions, FlowOutcome, OrbitChecks,
    Solution,
};
pub use genfn::{
    psi_rotation, rotation_gf, upsilon_rotation, GeneratingFn, GfMap, RotationGf, ZonedGf,
};
pub use moser::{gauss_legendre, MoserFlow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("rotation angle {0} outside (0, pi)")]
    BadAngle(f64),
    #[error("rotation order {0} must be at least 3")]
    BadOrder(usize),
    #[error("root find failed: {0}")]
    RootFind(String),
    #[error("twist condition violated by factor {0} (min sampled df/dy = {1})")]
    TwistViolation(String, f64),
    #[error("flow did not converge: residual {0}")]
    NonConvergence(f64),
    #[error("orbit verification failed: {0}")]
    Verification(String),
    #[error("invalid system: {0}")]
    BadSystem(String),
}

/// Convert an `f64` literal into the working scalar.
pub(crate) fn fr<F: crate::Real>(v: f64) -> F {
    F::from_f64(v).expect("literal fits the scalar")
}
