//! Shared inputs for the criterion benchmarks in `benches/`.

use coarea_core::verify::{FamilySpec, Instance, FIXTURE_SEED};

/// The offset fixture at scale `eps` (`R = 2/ε`).
pub fn offset_fixture(eps: f64) -> Instance {
    FamilySpec::Offset.instance(eps, FIXTURE_SEED).expect("fixture parameters are admissible")
}
