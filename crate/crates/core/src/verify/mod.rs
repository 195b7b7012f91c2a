//! Instance generators and the end-to-end verification harness.

pub mod embedding;
mod instance;
mod report;
mod sweep;
mod theorem;

pub use instance::{
    gen_bump, gen_offset_annulus, gen_wiggly, ruled_annulus, Backend, Instance, Provenance, BUMP_INTEGRAL,
};
pub use report::{
    verdict_for, CCandidates, CorollaryCheck, PhiCounts, PhiSummary, Verdict, VerificationReport, VerifyConfig,
    WindowReport, DEFAULT_C_BUDGET, REPORT_SCHEMA_VERSION,
};
pub use sweep::{
    estimate_C, regenerate, search_counterexample, shipped_fixtures, CEstimate, CPoint, FamilySpec, SearchConfig,
    SearchFamily, SearchOutcome, TrialOutcome, TrialRecord, FIXTURE_SEED,
};
pub use theorem::{
    chart_area, chart_for, circular_union_length, partition_windows, verify_corollary_13, verify_in_chart,
    verify_theorem,
};
