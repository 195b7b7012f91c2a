//! Normal-disk foliation around the smoothed curve: the disks `D_s`, the
//! chart Ψ with its Newton inverse, and the assignment `x ↦ Δ_x`.

mod assignment;
mod chart;
mod disk;

pub use assignment::{
    assign_disks, assign_disks_with, canonical_u, canonical_u_gradient, phi, solve_h, AssignmentConfig,
    AssignmentStats, DiskAssignment,
};
pub use chart::{
    build_chart, build_chart_with, ChartConfig, ChartCoords, FoliationChart, GridReport, CYLINDER_HALF_LENGTH,
    CYLINDER_RADIUS_SQ, MAX_INTERVAL,
};
pub use disk::{disk_at, Disk};

#[cfg(test)]
mod tests;
