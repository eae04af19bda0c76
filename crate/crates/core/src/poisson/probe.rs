use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::num::rat;
use crate::expr::Rational;

pub const DEFAULT_SEED: u64 = 0x5eed_f01;
pub const NUM_PROBES: usize = 32;

/// Settings shared by every probe-based check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    /// Extra points appended after the generated ones.
    pub extra_points: Vec<Vec<Rational>>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: DEFAULT_SEED,
            extra_points: Vec::new(),
        }
    }
}

impl CheckConfig {
    pub fn with_seed(seed: u64) -> Self {
        CheckConfig {
            seed,
            ..Default::default()
        }
    }

    /// The origin, the all-ones point, then seeded points with coordinates
    /// in `{k/4 : -8 <= k <= 8}`, followed by the extra points of matching
    /// dimension.
    pub fn probe_points(&self, dim: usize) -> Vec<Vec<Rational>> {
        let mut pts = vec![vec![rat(0, 1); dim], vec![rat(1, 1); dim]];
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (dim as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        while pts.len() < NUM_PROBES {
            pts.push((0..dim).map(|_| rat(rng.gen_range(-8..=8), 4)).collect());
        }
        pts.extend(self.extra_points.iter().filter(|p| p.len() == dim).cloned());
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let a = CheckConfig::default().probe_points(3);
        let b = CheckConfig::default().probe_points(3);
        assert_eq!(a, b);
        assert_eq!(a.len(), NUM_PROBES);
        assert!(a.iter().flatten().all(|x| *x >= rat(-2, 1) && *x <= rat(2, 1)));
        assert_ne!(a, CheckConfig::with_seed(7).probe_points(3));
    }
}
