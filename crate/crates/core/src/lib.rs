//! Convex lattice polygonal lines: exact enumeration, Gibbs sampling,
//! calibration of the grand-canonical ensemble and limit-shape geometry.
//!
//! The numeric modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod calibration;
pub mod count;
pub mod error;
pub mod experiments;
pub mod gibbs;
pub mod lattice;
pub mod quadrature;
pub mod scalar;
pub mod shapes;
pub mod special;
pub mod tolerances;

pub use calibration::{exact_calibrate, predicted_log_pnk, CalibrationTarget};
pub use count::{count_lines_k, max_vertices, CountTable};
pub use error::{Error, Result};
pub use lattice::{
    omega_to_polyline, polyline_to_omega, primitive_vectors_by_weight, primitive_vectors_in_box,
    ConvexPolyline, MultiplicityDistribution, PrimitiveVector, SlopeOrder,
};
pub use scalar::Real;

pub type EnergyModel64 = gibbs::EnergyModel<f64>;
pub type GibbsParams64 = gibbs::GibbsParams<f64>;
pub type MomentReport64 = gibbs::MomentReport<f64>;
pub type CalibrationResult64 = calibration::CalibrationResult<f64>;
pub type Prediction64 = calibration::Prediction<f64>;
pub type ShapeCurve64 = shapes::ShapeCurve<f64>;
pub type NormalizedPolyline64 = shapes::NormalizedPolyline<f64>;
pub type AsymptoticProfile64 = special::AsymptoticProfile<f64>;
