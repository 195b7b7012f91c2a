//! ε-sweeps estimating `C` and the randomized counterexample search.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::{gen_bump, gen_offset_annulus, gen_wiggly, Instance, Provenance, BUMP_INTEGRAL};
use super::report::{Verdict, VerifyConfig};
use super::theorem::verify_theorem;
use crate::error::{Error, Result};
use crate::geometry::HypothesisConfig;

/// Spokes for a circle of radius `r` with spacing at most 1.
fn spokes(r: f64) -> usize {
    (2.0 * PI * r).ceil() as usize
}

/// A one-parameter family of instances indexed by ε. Every member uses
/// `R = 2/ε` and a polygon spacing of about 1, so the turning condition
/// holds, and keeps the area at `ε²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    /// Concentric circles `R` and `R + δ`.
    Offset,
    /// Offset annulus with an out-of-plane wiggle of amplitude `δ`.
    Wiggly { freq: f64 },
    /// Planar bump on Γ₀ of the given half-width, cut short by Γ₁.
    Bump { half_width: f64 },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Offset => "offset",
            FamilySpec::Wiggly { .. } => "wiggly",
            FamilySpec::Bump { .. } => "bump",
        }
    }

    /// The member at scale `eps`.
    pub fn instance(&self, eps: f64, seed: u64) -> Result<Instance> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let r = 2.0 / eps;
        let n = spokes(r);
        let strip = eps * eps / (2.0 * PI * r);
        match *self {
            FamilySpec::Offset => gen_offset_annulus(r, strip / 2.0, n, eps, seed),
            FamilySpec::Wiggly { freq } => {
                let delta = strip / 2.0;
                gen_wiggly(r, delta, delta, freq, n, eps, seed)
            }
            FamilySpec::Bump { half_width } => {
                let height = eps * eps / (4.0 * half_width * BUMP_INTEGRAL);
                gen_bump(r, strip / 4.0, half_width, height, n, eps, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CPoint {
    pub eps: f64,
    pub length0: f64,
    pub length1: f64,
    pub ratio: f64,
    /// `max(0, (1 − ratio)/ε)`.
    pub c_hat: f64,
    pub hypotheses_pass: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CEstimate {
    pub family: FamilySpec,
    pub seed: u64,
    pub points: Vec<CPoint>,
    pub c_hat: f64,
    /// `max/min` of the per-ε values; 1 when all vanish.
    pub stability: f64,
}

/// Runs the family at each ε and reports the largest implied `C`.
#[allow(non_snake_case)]
pub fn estimate_C(family: &FamilySpec, eps_list: &[f64], seed: u64, cfg: &VerifyConfig) -> Result<CEstimate> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "insufficient sweep: need at least 3 eps values, got {}",
            eps_list.len()
        )));
    }
    if eps_list.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument("eps values must be positive and finite".into()));
    }
    let lo = eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps_list.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidArgument(format!(
            "insufficient sweep: eps range {lo:e}..{hi:e} spans under 2 decades"
        )));
    }
    let points: Vec<CPoint> = eps_list
        .par_iter()
        .map(|&eps| {
            let inst = family.instance(eps, seed)?;
            let rep = verify_theorem(&inst, cfg);
            Ok(CPoint {
                eps,
                length0: rep.length0,
                length1: rep.length1,
                ratio: rep.ratio,
                c_hat: rep.c_candidates.from_ratio,
                hypotheses_pass: rep.hypotheses_pass,
                verdict: rep.verdict,
            })
        })
        .collect::<Result<_>>()?;
    let c_hat = points.iter().map(|p| p.c_hat).fold(0.0, f64::max);
    let c_min = points.iter().map(|p| p.c_hat).fold(f64::INFINITY, f64::min);
    let stability = if c_hat == 0.0 {
        1.0
    } else if c_min == 0.0 {
        f64::INFINITY
    } else {
        c_hat / c_min
    };
    Ok(CEstimate { family: *family, seed, points, c_hat, stability })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchFamily {
    Offset,
    Wiggly,
    Bump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub eps: f64,
    pub families: Vec<SearchFamily>,
    pub verify: VerifyConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eps: 1e-3,
            families: vec![SearchFamily::Offset, SearchFamily::Wiggly, SearchFamily::Bump],
            verify: VerifyConfig {
                // the short-loop audit is a consequence, not a hypothesis; a
                // coarser grid keeps a thousand trials cheap
                hypotheses: HypothesisConfig { subsegment_spacing: 0.5, ..Default::default() },
                ..VerifyConfig::ratio_only()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialOutcome {
    /// The generator refused the parameters.
    Rejected(String),
    /// The instance violates a hypothesis and is not scored.
    Excluded,
    Scored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub family: SearchFamily,
    pub provenance: Option<Provenance>,
    pub outcome: TrialOutcome,
    pub ratio: Option<f64>,
    /// `(1 − C_budget·ε) − ratio`; positive would be a counterexample.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub budget: usize,
    pub seed: u64,
    pub eps: f64,
    pub c_budget: f64,
    pub scored: usize,
    pub excluded: usize,
    pub rejected: usize,
    pub worst_margin: Option<f64>,
    pub worst: Option<TrialRecord>,
    pub trials: Vec<TrialRecord>,
}

fn draw_trial(index: usize, seed: u64, cfg: &SearchConfig) -> (SearchFamily, Result<Instance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let family = cfg.families[rng.gen_range(0..cfg.families.len())];
    let eps = cfg.eps;
    let r = rng.gen_range(2.0 / eps..3.0 / eps);
    let n = spokes(r);
    let strip = eps * eps / (2.0 * PI * r);
    let u: f64 = rng.gen_range(0.01..1.0);
    let gen_seed: u64 = rng.gen();
    let inst = match family {
        SearchFamily::Offset => gen_offset_annulus(r, strip * u, n, eps, gen_seed),
        SearchFamily::Wiggly => {
            let delta = strip * u / 2.0;
            let amp = delta * rng.gen_range(0.0..1.0);
            let freq = rng.gen_range(1..=200) as f64;
            gen_wiggly(r, delta, amp, freq, n, eps, gen_seed)
        }
        SearchFamily::Bump => {
            let hw = rng.gen_range(1.0..20.0);
            let height = rng.gen_range(0.0..1.0) * eps * eps / (2.0 * hw * BUMP_INTEGRAL);
            gen_bump(r, strip * u / 2.0, hw, height, n, eps, gen_seed)
        }
    };
    (family, inst)
}

fn run_trial(index: usize, seed: u64, cfg: &SearchConfig) -> TrialRecord {
    let (family, inst) = draw_trial(index, seed, cfg);
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            return TrialRecord {
                index,
                family,
                provenance: None,
                outcome: TrialOutcome::Rejected(e.to_string()),
                ratio: None,
                margin: None,
            }
        }
    };
    let rep = verify_theorem(&inst, &cfg.verify);
    let scored = rep.hypotheses_pass;
    TrialRecord {
        index,
        family,
        provenance: Some(inst.provenance),
        outcome: if scored { TrialOutcome::Scored } else { TrialOutcome::Excluded },
        ratio: Some(rep.ratio),
        margin: scored.then(|| (1.0 - cfg.verify.c_budget * cfg.eps) - rep.ratio),
    }
}

/// Randomized search for an instance that satisfies the hypotheses yet has
/// `ratio < 1 − C_budget·ε`. Trial `i` draws from its own ChaCha stream, so
/// results do not depend on scheduling; they are merged in trial order.
pub fn search_counterexample(budget: usize, seed: u64, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.families.is_empty() {
        return Err(Error::InvalidArgument("search needs at least one family".into()));
    }
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {}", cfg.eps)));
    }
    let trials: Vec<TrialRecord> = (0..budget).into_par_iter().map(|i| run_trial(i, seed, cfg)).collect();
    let mut out = SearchOutcome {
        budget,
        seed,
        eps: cfg.eps,
        c_budget: cfg.verify.c_budget,
        scored: 0,
        excluded: 0,
        rejected: 0,
        worst_margin: None,
        worst: None,
        trials: Vec::new(),
    };
    for t in &trials {
        match t.outcome {
            TrialOutcome::Scored => out.scored += 1,
            TrialOutcome::Excluded => out.excluded += 1,
            TrialOutcome::Rejected(_) => out.rejected += 1,
        }
        if let Some(m) = t.margin {
            if out.worst_margin.map_or(true, |w| m > w) {
                out.worst_margin = Some(m);
                out.worst = Some(t.clone());
            }
        }
    }
    out.trials = trials;
    Ok(out)
}

/// Rebuilds an instance from its provenance record.
pub fn regenerate(p: &Provenance) -> Result<Instance> {
    let get = |k: &str| {
        p.params
            .iter()
            .find(|(name, _)| name == k)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::InvalidArgument(format!("provenance lacks parameter {k}")))
    };
    let n = get("n")? as usize;
    match p.generator.as_str() {
        "offset" => gen_offset_annulus(get("R")?, get("delta")?, n, get("eps")?, p.seed),
        "wiggly" => gen_wiggly(get("R")?, get("delta")?, get("amp")?, get("freq")?, n, get("eps")?, p.seed),
        "bump" => gen_bump(get("R")?, get("delta")?, get("half_width")?, get("height")?, n, get("eps")?, p.seed),
        g => Err(Error::InvalidArgument(format!("unknown generator {g}"))),
    }
}

/// Seed of the shipped fixtures.
pub const FIXTURE_SEED: u64 = 1;

/// The fixture set shipped with the harness: every family at ε = 10⁻² and
/// ε = 10⁻³.
pub fn shipped_fixtures() -> Vec<(FamilySpec, f64)> {
    let families = [FamilySpec::Offset, FamilySpec::Wiggly { freq: 40.0 }, FamilySpec::Bump { half_width: 5.0 }];
    families.iter().flat_map(|&f| [(f, 1e-2), (f, 1e-3)]).collect()
}
