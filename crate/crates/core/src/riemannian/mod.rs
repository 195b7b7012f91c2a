//! Chart-based Riemannian backend: model metrics, geodesics, parallel
//! transport, Jacobi fields, geodesic smoothing and metric rescaling.

mod curve;
mod geodesic;
pub mod metric;
mod smoothing;
mod transport;


pub use curve::{segment_length, total_curvature_to_turning, CurvatureTurningAudit, MetricCurve};
pub use geodesic::{exp_map, exp_point, geodesic_endpoint, log_map, GeodesicResult, GEODESIC_STEPS, LOG_MAX_ITERS};
pub use metric::{ManifoldChart, MetricModel};
pub use smoothing::{
    lemma_a1_certificate, lemma_a1_certificate_with, rescale_factor, rescale_metric, smooth_riemannian,
    LemmaA1Certificate, LemmaA1Config, RiemannianSmoothedCurve,
};
pub use transport::{jacobi_field, parallel_transport, TransportResult, TRANSPORT_SUBSTEPS};
