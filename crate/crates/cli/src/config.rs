//! Run configuration: the subcommand with all of its arguments. It is
//! serialized verbatim into every output so any run can be replayed.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Offset,
    Wiggly,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Radius of the reference circle.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: f64,
    /// Radial gap between the two curves.
    #[arg(long)]
    pub delta: f64,
    /// Scale ε; the generator rejects instances with area above ε².
    #[arg(long)]
    pub eps: f64,
    /// Number of spokes [default: ceil(2πR)].
    #[arg(long)]
    pub n: Option<usize>,
    /// Out-of-plane amplitude (wiggly).
    #[arg(long, default_value_t = 0.0)]
    pub amp: f64,
    /// Angular frequency of the wiggle (wiggly).
    #[arg(long, default_value_t = 0.0)]
    pub freq: f64,
    /// Arc-length half-width of the bump (bump).
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
    /// Bump height (bump) [default: eps²/(4·half_width·∫bump)].
    #[arg(long)]
    pub height: Option<f64>,
    /// Seed for the spoke phase and the wiggle or bump placement.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Metric recorded in the manifest: euclidean, sphere:<R>,
    /// flat-torus:<L> or perturbed:<amplitude>.
    #[arg(long, default_value = "euclidean")]
    pub backend: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CheckArgs {
    /// Instance manifest written by `generate`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Arc-length window of the turning condition.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// Sample spacing of the short-loop audit.
    #[arg(long, default_value_t = 0.125)]
    pub subsegment_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SmoothArgs {
    /// Instance manifest written by `generate`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Rows of smooth.csv.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FoliateArgs {
    /// Instance manifest written by `generate`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Start of the chart interval.
    #[arg(long, default_value_t = 0.0)]
    pub s0: f64,
    /// Length of the chart interval (below 20).
    #[arg(long, default_value_t = 10.0)]
    pub length: f64,
    /// Rows of foliation.csv.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IntersectArgs {
    /// Instance manifest written by `generate`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Window start; the window length must lie in [1, 2].
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.5)]
    pub t1: f64,
    /// Stratified samples in the window.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Instance manifest written by `generate`.
    #[arg(long)]
    pub instance: PathBuf,
    /// Override the manifest backend.
    #[arg(long)]
    pub backend: Option<String>,
    /// Verdict threshold is 1 − c_budget·eps.
    #[arg(long, default_value_t = coarea_core::verify::DEFAULT_C_BUDGET)]
    pub c_budget: f64,
    /// Audit at most this many evenly spaced windows; 0 reports lengths only.
    #[arg(long)]
    pub max_windows: Option<usize>,
    /// Λ samples per window.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Sample spacing of the short-loop audit.
    #[arg(long, default_value_t = 0.125)]
    pub subsegment_spacing: f64,
    /// Sectional curvature bound K for the curvature-bounded variant.
    #[arg(long, requires = "corollary_r")]
    pub corollary_k: Option<f64>,
    /// Scale r of the curvature-bounded variant.
    #[arg(long, requires = "corollary_k")]
    pub corollary_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Instance family; every member uses R = 2/ε.
    #[arg(long, value_enum)]
    pub family: Family,
    /// Comma-separated ε values (at least three, spanning two decades).
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// Generator seed, shared by the search.
    #[arg(long, default_value_t = coarea_core::verify::FIXTURE_SEED)]
    pub seed: u64,
    /// Wiggle frequency (wiggly).
    #[arg(long, default_value_t = 40.0)]
    pub freq: f64,
    /// Bump half-width (bump).
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
    /// Verdict threshold is 1 − c_budget·eps.
    #[arg(long, default_value_t = coarea_core::verify::DEFAULT_C_BUDGET)]
    pub c_budget: f64,
    /// Windows audited per instance; 0 reports lengths only.
    #[arg(long, default_value_t = 0)]
    pub max_windows: usize,
    /// Trials of a counterexample search at the smallest ε; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub search_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    /// Number of random trials.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    /// Trial i draws from stream i of this seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scale ε of every trial.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Comma-separated families to draw from.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "offset,wiggly,bump")]
    pub families: Vec<Family>,
    /// Margin is (1 − c_budget·eps) − ratio.
    #[arg(long, default_value_t = coarea_core::verify::DEFAULT_C_BUDGET)]
    pub c_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Generate an instance: two curve files, a mesh and a manifest.
    Generate(GenerateArgs),
    /// Evaluate the hypotheses on an instance.
    Check(CheckArgs),
    /// Smooth Γ₀ and certify its closeness to the polyline.
    Smooth(SmoothArgs),
    /// Build a normal-disk chart and the disk assignment.
    Foliate(FoliateArgs),
    /// Cut Σ with the assigned disks over one window.
    Intersect(IntersectArgs),
    /// Run the full verification on an instance.
    Verify(VerifyArgs),
    /// Estimate C over an ε list, optionally followed by a search.
    Sweep(SweepArgs),
    /// Randomized counterexample search.
    Search(SearchArgs),
}

impl Command {
    /// Replaces every seed with `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        match self {
            Command::Generate(a) => a.seed = seed,
            Command::Sweep(a) => a.seed = seed,
            Command::Search(a) => a.seed = seed,
            _ => {}
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Provenance block embedded in every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub library_version: String,
    pub config_hash: String,
    pub config: Command,
}

impl Meta {
    pub fn new(cmd: &Command) -> Meta {
        Meta {
            tool: "coarea".into(),
            library_version: coarea_core::VERSION.into(),
            config_hash: cmd.hash(),
            config: cmd.clone(),
        }
    }
}

/// Reads a run configuration from a bare config JSON, any JSON output
/// (its `meta.config`), or a CSV/OBJ output (its `# config=` line).
pub fn load_config(path: &std::path::Path) -> Result<Command, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) {
        let cfg = if value.get("command").is_some() {
            value
        } else if let Some(c) = value.get("meta").and_then(|m| m.get("config")) {
            c.clone()
        } else {
            return Err(bad("JSON has neither a `command` nor a `meta.config` field".into()));
        };
        return serde_json::from_value(cfg).map_err(|e| bad(e.to_string()));
    }
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# config="))
        .ok_or_else(|| bad("no embedded configuration found".into()))?;
    serde_json::from_str(line).map_err(|e| bad(e.to_string()))
}
