//! Toric plurisubharmonic geodesics and Monge-Ampère capacities.
//!
//! Compact, polynomially convex Reinhardt sets in the unit polydisk are
//! handled through their logarithmic images, complete convex bodies in the
//! negative orthant ([`LogBody`]). On top of that this crate provides
//!
//! - the geodesic between relative extremal functions and its level sets,
//!   evaluated exactly through the Legendre transform ([`transform`]);
//! - copolar covolumes, capacities and Reinhardt volumes with deterministic
//!   and Monte Carlo estimators ([`measures`], [`capacity`]);
//! - sweeps along the geometric-mean interpolation that check log-convexity
//!   of capacity, its linear bound, and log-concavity of volume.

// `!(x > 0.0)` comparisons are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod capacity;
pub mod error;
mod facets;
pub mod logbody;
pub mod lp;
pub mod measures;
pub mod rng;
pub mod transform;

pub use capacity::{
    capacity, capacity_scaled, check_volume_bm, equality_margin, sweep, sweep_scaled,
    CapacityRecord, Margin, SweepReport, TGrid, Verdicts, VolumeRecord, VolumeReport,
};
pub use error::{Error, Result};
pub use logbody::{DualVector, LogBody};
pub use measures::{
    covolume, covolume_region_sampling, exp_integral, reinhardt_volume, Budget, EstimateMethod,
    IntegralEstimate, Method,
};
pub use transform::{extremal_value, GeodesicSpec, PotentialValue};
