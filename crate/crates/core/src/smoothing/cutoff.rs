use serde::{Deserialize, Serialize};

use super::jet::Jet;

/// Highest derivative order the cutoff evaluates.
pub const MAX_ORDER: usize = 4;

type J = Jet<{ MAX_ORDER + 1 }>;

/// Half-width of the transition band of the cutoff.
const HALF_BAND: f64 = 0.25;

/// Below this argument `e^{-1/x}` and all its derivatives are under 1e-60.
const FLAT_BELOW: f64 = 1.0 / 200.0;

/// Smooth monotone step: 0 on `(-∞, -1/4]`, 1 on `[1/4, ∞)`.
///
/// Built from the transition `f(x) = e^{-1/x}` (`x > 0`) as
/// `χ(u) = f(u + 1/4) / (f(u + 1/4) + f(1/4 - u))`, so `χ(−u) = 1 − χ(u)`
/// and `χ(0) = 1/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CutoffFunction;

fn transition(x: J) -> J {
    if x.value() <= FLAT_BELOW {
        J::constant(0.0)
    } else {
        (-x.recip()).exp()
    }
}

impl CutoffFunction {
    /// Taylor jet of χ at `u` (coefficients, not derivatives).
    pub(crate) fn jet(&self, u: f64) -> J {
        if u <= -HALF_BAND {
            return J::constant(0.0);
        }
        if u >= HALF_BAND {
            return J::constant(1.0);
        }
        let a = transition(J::variable(u + HALF_BAND, 1.0));
        let b = transition(J::variable(HALF_BAND - u, -1.0));
        a * (a + b).recip()
    }

    pub fn value(&self, u: f64) -> f64 {
        self.jet(u).value()
    }

    /// `χ⁽ᵐ⁾(u)` for `m ≤ MAX_ORDER`.
    pub fn derivative(&self, u: f64, m: usize) -> f64 {
        assert!(m <= MAX_ORDER, "cutoff derivatives are available up to order {MAX_ORDER}");
        self.jet(u).derivative(m)
    }

    /// `[χ, χ', …, χ⁽⁴⁾]` at `u`.
    pub fn derivatives(&self, u: f64) -> [f64; MAX_ORDER + 1] {
        self.jet(u).derivatives()
    }
}

/// The fixed cutoff used by every smoothing construction.
pub fn make_cutoff() -> CutoffFunction {
    CutoffFunction
}
