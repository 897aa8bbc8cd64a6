//! Invariant Einstein metrics on the spaces `F^{n+1}/diag(F)`.
//!
//! Metrics are parameterized by lower-triangular matrices with positive
//! diagonal ([`TriangularMetric`]). Einstein metrics are the critical points
//! of the normalized scalar curvature `S̃` at fixed volume; [`solver`] finds
//! them numerically, [`isometry`] groups them into classes, and [`catalog`]
//! builds the standard and routine ones and counts partitions.
//!
//! The metric and curvature code is generic over the scalar type (`f32`,
//! `f64`, [`DoubleDouble`], [`Dual`], or exact `BigRational` where no square
//! roots are needed). Root finding and classification run in `f64`.

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod isometry;
pub mod linalg;
pub mod metric;
pub mod reference;
pub mod scalar;
pub mod solver;

pub use catalog::{
    bounds, catalog, enumerate_compositions, partition_count, routine_critical_points, routine_from_partition,
    standard_einstein_matrix, standard_matrix, Catalog, Partition, PartitionSummary,
};
pub use curvature::{
    einstein_constant, gradient_ratio, scalar_curvature_general, scalar_curvature_triangular, CurvatureReport,
};
pub use error::{Error, Result};
pub use isometry::{apply_move, canonical_form, classify, hat, orbit_group, t_matrix, ClassReport, IsometryClass};
pub use linalg::GeneralFrame;
pub use metric::{cholesky_canonical, RatioCoordinates, TriangularMetric};
pub use reference::{reference_set, verify_against_reference, MatchReport};
pub use scalar::{DoubleDouble, Dual, Real, Scalar};
pub use solver::{multistart, newton_solve, normalize, residual, CriticalPoint, Normalization, SolverOptions};

/// Double-precision metric, the type used by the solver and classifier.
pub type Metric = TriangularMetric<f64>;
pub type Metric32 = TriangularMetric<f32>;
/// Exact metric over the rationals.
pub type RationalMetric = TriangularMetric<num_rational::BigRational>;
pub type Frame = GeneralFrame<f64>;
pub type Coords = RatioCoordinates<f64>;
pub type RationalCoords = RatioCoordinates<num_rational::BigRational>;
