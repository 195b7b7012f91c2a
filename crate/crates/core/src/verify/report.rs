//! Configuration and report types of the verification harness.

use serde::{Deserialize, Serialize};

use super::instance::Provenance;
use crate::geometry::HypothesisConfig;
use crate::geometry::HypothesisReport;
use crate::intersection::LambdaConfig;

/// Version of the JSON layout of [`VerificationReport`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default envelope for the unquantified constant `C`.
pub const DEFAULT_C_BUDGET: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Verdict threshold is `1 − c_budget·ε`.
    pub c_budget: f64,
    pub lambda: LambdaConfig,
    pub hypotheses: HypothesisConfig,
    /// Allowance in `Σᵢ ℋ¹(φ(Jᵢ ∩ Λ)) ≤ Length(Γ₁)·(1 + phi_slack)`.
    pub phi_slack: f64,
    /// Audit only this many evenly spaced windows; `Some(0)` skips the
    /// smoothing and foliation stages and reports lengths only.
    pub max_windows: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            c_budget: DEFAULT_C_BUDGET,
            lambda: LambdaConfig::default(),
            hypotheses: HypothesisConfig::default(),
            phi_slack: 0.01,
            max_windows: None,
        }
    }
}

impl VerifyConfig {
    /// Lengths and hypotheses only.
    pub fn ratio_only() -> Self {
        VerifyConfig { max_windows: Some(0), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhiCounts {
    pub on_gamma1: usize,
    pub on_gamma0: usize,
    pub rim: usize,
    pub dangling: usize,
    pub missing: usize,
}

/// Audits of one window `J = [t₀, t₁]` of Γ₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub index: usize,
    pub window: (f64, f64),
    pub lambda_fraction: f64,
    pub lambda_threshold: f64,
    pub lambda_pass: bool,
    /// Samples whose disk could not be built.
    pub failed_samples: usize,
    pub phi: PhiCounts,
    pub coarea_ratio: f64,
    pub coarea_pass: bool,
    /// Lower bound for `ℋ¹(φ(J ∩ Λ))`, in units of Γ₁'s length.
    pub phi_measure: f64,
    /// `phi_measure / Length(J)` with both measured in chart coordinates.
    pub phi_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiSummary {
    /// Number of φ samples landing on Γ₁.
    pub samples: usize,
    /// No two φ samples share an arc-length parameter on Γ₁.
    pub injective: bool,
    /// Smallest arc-length gap between φ images (circular).
    pub min_separation: f64,
    /// `Σᵢ ℋ¹(φ(Jᵢ ∩ Λ))` over audited windows.
    pub measure_sum: f64,
    /// `Length(Γ₁)·(1 + phi_slack)`.
    pub measure_bound: f64,
    pub measure_ok: bool,
}

/// Measured values of `C` implied by the different inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CCandidates {
    /// `max(0, (1 − ratio)/ε)`.
    pub from_ratio: f64,
    /// `max over windows of max(0, (1 − phi_fraction)/ε)`.
    pub from_phi: Option<f64>,
    /// `max over windows of max(0, (1 − fraction)/ε)` for the Λ share.
    pub from_lambda: Option<f64>,
}

/// Preconditions of the curvature-bounded variant, in the original metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryCheck {
    pub curvature_bound: f64,
    pub r: f64,
    pub factor: f64,
    /// Largest `∫|k| ds` over windows of length `r`.
    pub total_curvature: f64,
    pub total_curvature_ok: bool,
    pub area: f64,
    /// `r²ε²/(1000K)`.
    pub area_budget: f64,
    pub area_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub library_version: String,
    pub backend: String,
    pub provenance: Provenance,
    pub eps: f64,
    pub c_budget: f64,
    pub hypotheses: Option<HypothesisReport>,
    pub hypotheses_pass: bool,
    pub length0: f64,
    pub length1: f64,
    pub ratio: f64,
    /// `1 − c_budget·ε`.
    pub threshold: f64,
    pub windows: Vec<WindowReport>,
    pub windows_total: usize,
    pub phi: Option<PhiSummary>,
    pub c_candidates: CCandidates,
    pub corollary: Option<CorollaryCheck>,
    pub errors: Vec<String>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn all_lambda_pass(&self) -> bool {
        self.windows.iter().all(|w| w.lambda_pass)
    }

    pub fn min_lambda_fraction(&self) -> Option<f64> {
        self.windows.iter().map(|w| w.lambda_fraction).reduce(f64::min)
    }
}

/// `ratio ≥ 1 − c_budget·ε`; NaN ratios fail.
pub fn verdict_for(ratio: f64, eps: f64, c_budget: f64) -> Verdict {
    if ratio >= 1.0 - c_budget * eps {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
