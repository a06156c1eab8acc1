use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Instance, Time};

/// Random instance distribution: integer setups in `setup_range`, lower
/// processing bounds in `p_lo_range`, upper bounds uniform in
/// `[p_lo, 2 * p_lo]`. All ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub setup_range: (Time, Time),
    pub p_lo_range: (Time, Time),
}

impl GeneratorConfig {
    pub fn new(seed: u64, n: usize, m: usize) -> Self {
        GeneratorConfig {
            seed,
            n,
            m,
            setup_range: (1, 10),
            p_lo_range: (1, 50),
        }
    }
}

/// Draws an instance; identical configs give identical instances.
///
/// # Panics
/// If `n` or `m` is zero or a range is inverted.
pub fn generate_instance(cfg: &GeneratorConfig) -> Instance {
    assert!(cfg.n >= 1 && cfg.m >= 1, "need at least one job and one machine");
    let (s_lo, s_hi) = cfg.setup_range;
    let (p_min, p_max) = cfg.p_lo_range;
    assert!(s_lo <= s_hi && p_min <= p_max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let w = cfg.n + 1;
    let setups: Vec<Time> = (0..cfg.m * w * w).map(|_| rng.gen_range(s_lo..=s_hi)).collect();
    let mut intervals = Vec::with_capacity(cfg.m * cfg.n);
    for _ in 0..cfg.m * cfg.n {
        let lo = rng.gen_range(p_min..=p_max);
        let hi = rng.gen_range(lo..=2 * lo);
        intervals.push((lo, hi));
    }
    Instance::from_fn(
        cfg.n,
        cfg.m,
        |i, j, k| setups[(i * w + j) * w + k],
        |i, j| intervals[i * cfg.n + (j - 1)],
    )
}
