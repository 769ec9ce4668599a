//! Coordinate-based computational geometry for tangent bundles carrying
//! the rescaled Sasaki and rescaled Cheeger-Gromoll metrics.
//!
//! The crate has two halves that deliberately do not share code paths:
//!
//! * a generic brute-force Riemannian calculus ([`engine`]) driven by
//!   truncated-Taylor jets ([`jet`]), which applied to the assembled
//!   2m x 2m bundle metric ([`bundle`]) acts as the oracle;
//! * closed-form evaluators for the connection, curvature, sectional and
//!   scalar curvature of both bundle metrics ([`sasaki`], [`cg`]) and the
//!   geodesic machinery ([`geodesics`]).
//!
//! The [`verify`] module adjudicates every closed form against the oracle
//! over seeded samples and emits machine-readable reports; `tbcurv-cli`
//! exposes the whole thing on the command line.

pub mod basecalc;
pub mod bundle;
pub mod cg;
pub mod engine;
pub mod error;
pub mod expr;
pub mod geodesics;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod sample;
pub mod sasaki;
pub mod verify;

pub use bundle::{BundleMetric, Lift, LiftDecomposition, MetricVariant};
pub use error::{GeomError, Result};
pub use expr::{parse, Expr};
pub use jet::Jet;
pub use sasaki::FrameResult;
pub use verify::{run_suite, RunConfig, VerificationItem, VerificationReport};
pub use manifold::{catalog, ChartedManifold, FiberScalars, ScalingField, TangentPoint};


