//! Numerical toolkit for comparing the lengths of two closed curves that
//! bound a thin annulus: bounded-turning checks, cutoff smoothing, normal
//! disk foliations, disk/mesh cross-sections and a chart-based Riemannian
//! backend, tied together by an end-to-end verification harness.

pub mod error;
pub mod foliation;
pub mod geometry;
pub mod intersection;
pub mod numeric;
pub mod riemannian;
pub mod smoothing;
pub mod vec3;
pub mod verify;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use geometry::{
    arc_length, check_hypotheses, check_turning_condition, AnnulusSurface, DiscreteCurve, HypothesisConfig,
    HypothesisReport, TriMesh, TurningReport,
};
pub use smoothing::{closeness_certificate, make_cutoff, smooth, CutoffFunction, SmoothedCurve};
pub use vec3::{Mat3, Vec3};
