//! Foundational geometry: polylines, triangle meshes and the hypothesis
//! checks of the length-comparison theorem.

pub mod curve;
pub mod hypotheses;
pub mod mesh;
pub mod shapes;
pub mod spatial;

pub use curve::{arc_length, check_turning_condition, DiscreteCurve, TurningReport};
pub use hypotheses::{check_hypotheses, HypothesisConfig, HypothesisReport};
pub use mesh::{AnnulusSurface, TriMesh};
