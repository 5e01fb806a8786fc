//! Discretized braid classes, their topological invariants, and a variational
//! search for periodic orbits of compositions of positive twist maps of the
//! plane.
//!
//! The crate splits into a combinatorial half and a numerical half:
//!
//! * [`word`], [`braid`], [`colored`], [`conley`] work with exact arithmetic
//!   (`Rat`) on discretized braids: validation, braid words, positive
//!   conjugacy, 2-colored classes and their fibers, and relative homology of
//!   the associated cube-complex index pairs.
//! * [`dynamics`] and [`forcing`] work over a floating scalar ([`Real`]) on
//!   generating functions, Moser interpolation, chained twist systems, the
//!   discrete action, and the gradient-like recurrence flow that locates
//!   stationary braids.
//!
//! All value types are immutable after construction and safe to share across
//! threads; every search in the crate is deterministic.

pub mod braid;
pub mod colored;
pub mod conley;
pub mod dynamics;
pub mod forcing;
pub mod garside;
pub mod io;
pub mod lattice;
pub mod snf;
pub mod word;

/// Exact scalar used for braid anchors.
pub type Rat = num::BigRational;
/// Arbitrary-precision integer backing [`Rat`].
pub type Int = num::BigInt;

/// Floating scalar for the dynamics half of the crate.
pub trait Real:
    num::Float
    + num::traits::FloatConst
    + num::FromPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Default dynamics scalar.
pub type R64 = f64;

/// Shorthand for an exact rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Shorthand for an exact integer rational.
pub fn rati(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

/// Approximate an exact rational by the nearest double.
pub fn rat_to_f64(v: &Rat) -> f64 {
    use num::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}
