//! The cutoff χ and the smoothed curve γ̃₀ built from it.

mod cutoff;
pub mod jet;
mod smoothed;

pub use cutoff::{make_cutoff, CutoffFunction, MAX_ORDER};
pub(crate) use smoothed::blend_weight;
pub use smoothed::{
    blend_bounds, closeness_certificate, closeness_certificate_with, smooth, CertificateConfig, ClosenessCertificate,
    Derivatives, SmoothedCurve,
};
