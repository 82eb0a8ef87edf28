//! Random scenario generators for property checks and the acceptance suite.
//! Draws that land within `margin` of a degenerate configuration are
//! resampled.

use rand::Rng;

use crate::model::{
    Belief, BinarySignal, BlackwellConstraint, PayoffMatrix, Preferences, Scenario,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingBounds {
    /// Minimum distance between the two cutoffs, and of each cutoff from 0 and 1.
    pub margin: f64,
    /// Bounds on each private likelihood.
    pub accuracy: (f64, f64),
}

impl Default for SamplingBounds {
    fn default() -> Self {
        SamplingBounds {
            margin: 0.02,
            accuracy: (0.3, 0.99),
        }
    }
}

/// Payoff matrix with the correct action strictly better in each state.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R) -> PayoffMatrix<f64> {
    let u01 = rng.random_range(-1.0..1.0);
    let u10 = rng.random_range(-1.0..1.0);
    let u00 = u01 + rng.random_range(0.05..1.5);
    let u11 = u10 + rng.random_range(0.05..1.5);
    PayoffMatrix::new(u00, u01, u10, u11)
}

pub fn random_preferences<R: Rng + ?Sized>(
    rng: &mut R,
    bounds: &SamplingBounds,
) -> Preferences<f64> {
    loop {
        let Ok(prefs) = Preferences::new(random_matrix(rng), random_matrix(rng)) else {
            continue;
        };
        let (p, a) = (prefs.principal_cutoff().get(), prefs.agent_cutoff().get());
        let m = bounds.margin;
        if (p - a).abs() > m && [p, a].iter().all(|c| *c > m && *c < 1.0 - m) {
            return prefs;
        }
    }
}

/// Informative private signal with likelihoods in `bounds.accuracy`.
pub fn random_signal<R: Rng + ?Sized>(rng: &mut R, bounds: &SamplingBounds) -> BinarySignal<f64> {
    let (lo, hi) = bounds.accuracy;
    loop {
        let t0 = rng.random_range(lo..hi);
        let t1 = rng.random_range(lo..hi);
        if t0 + t1 > 1.0 + bounds.margin {
            if let Ok(s) = BinarySignal::new(t0, t1) {
                return s;
            }
        }
    }
}

/// Pair `(weaker, stronger)` where the stronger signal garbles into the
/// weaker one.
pub fn random_blackwell_pair<R: Rng + ?Sized>(
    rng: &mut R,
    bounds: &SamplingBounds,
) -> (BinarySignal<f64>, BinarySignal<f64>) {
    let strong = random_signal(rng, bounds);
    loop {
        // Garble: keep each realization with probability k0/k1, otherwise flip.
        let k0: f64 = rng.random_range(0.5..1.0);
        let k1: f64 = rng.random_range(0.5..1.0);
        let t0 = strong.t0() * k0 + (1.0 - strong.t0()) * (1.0 - k1);
        let t1 = strong.t1() * k1 + (1.0 - strong.t1()) * (1.0 - k0);
        if t0 + t1 > 1.0 + bounds.margin {
            if let Ok(weak) = BinarySignal::new(t0, t1) {
                return (weak, strong);
            }
        }
    }
}

/// Prior and a constraint that brackets it.
pub fn random_prior_and_constraint<R: Rng + ?Sized>(
    rng: &mut R,
    bounds: &SamplingBounds,
) -> (Belief<f64>, BlackwellConstraint<f64>) {
    let m = bounds.margin;
    let prior: f64 = rng.random_range(m..1.0 - m);
    let lo = rng.random_range(0.0..prior);
    let hi = rng.random_range(prior..1.0);
    let b = |x| Belief::new(x).expect("sampled inside [0, 1]");
    (
        b(prior),
        BlackwellConstraint::new(b(lo), b(hi)).expect("lo < hi"),
    )
}

pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, bounds: &SamplingBounds) -> Scenario<f64> {
    let prefs = random_preferences(rng, bounds);
    let signal = random_signal(rng, bounds);
    let (prior, constraint) = random_prior_and_constraint(rng, bounds);
    Scenario::new(prior, prefs, signal, constraint).expect("sampled scenario is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::blackwell_leq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bounds = SamplingBounds::default();
        for _ in 0..200 {
            let s = random_scenario(&mut rng, &bounds);
            assert!(!s.prefs.is_aligned());
            assert!(s.agent_signal.is_informative());
            assert!(s.constraint.brackets(s.prior));
            let (weak, strong) = random_blackwell_pair(&mut rng, &bounds);
            assert!(blackwell_leq(&weak, &strong, Belief::new(0.5).unwrap()));
        }
    }
}
