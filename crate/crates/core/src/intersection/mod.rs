//! Cross-sections of the annulus by the assigned disks: crossing segments,
//! their components and endpoints, and the sampled Λ and co-area audits.

mod lambda;
mod slice;

pub use lambda::{
    coarea_audit, coarea_from_estimate, estimate_lambda, estimate_lambda_with, CoareaAudit, LambdaConfig,
    LambdaEstimate, LambdaSample, PhiClass,
};
pub use slice::{
    disk_mesh_intersect, Component, CrossingSegment, EndpointClass, FarEnd, IntersectionCurve, MeshIndex, ANGLE_TOL,
};

#[cfg(test)]
mod tests;
