//! Monte Carlo trial simulator, independent of the integration engine.
//!
//! Each replicate recruits `ceil(n)` patients to arm 0 and `ceil(r n)` to
//! arm 1 per stage, forms the Z statistic from the accumulated arm means and
//! applies the design's stopping rule. Only the per-stage arm totals enter
//! the statistic, so each stage draws those totals directly, which has
//! exactly the distribution of summing the individual normal outcomes.
//!
//! Replicates are split into fixed blocks; block `b` uses its own ChaCha
//! stream `(seed, b)`, so results do not depend on the worker count.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::InformationSchedule;
use crate::designs::Design;
use crate::error::{Error, Result};
use crate::integrate::Sidedness;
use crate::normal;

const BLOCK: u64 = 8192;

#[derive(Debug, Clone, Copy)]
pub struct SimConfig<'a> {
    pub design: &'a Design,
    pub replicates: u64,
    pub seed: u64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub replicates: u64,
    pub seed: u64,
    pub tau: f64,
    /// Integer per-stage recruitment actually simulated, arm 0 then arm 1.
    pub group_sizes: (u64, u64),
    pub reject_rate: f64,
    pub accept_rate: f64,
    pub mean_n: f64,
    pub reject_se: f64,
    pub accept_se: f64,
    pub mean_n_se: f64,
    pub reject_at: Vec<f64>,
    pub accept_at: Vec<f64>,
    pub stage_stop_frequencies: Vec<f64>,
}

impl SimResult {
    /// Binomial standard error of a rate estimated from these replicates.
    pub fn rate_se(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.replicates as f64).sqrt()
    }
}

/// The information schedule at the integer group sizes the simulator uses.
pub fn rounded_schedule(design: &Design) -> Result<InformationSchedule> {
    let (n0, n1) = design.integer_group_sizes();
    InformationSchedule::from_arm_sizes(&design.params, n0 as f64, n1 as f64)
}

#[derive(Debug, Clone, Default)]
struct Tally {
    reject: Vec<u64>,
    accept: Vec<u64>,
    sum_n: f64,
    sum_n2: f64,
}

impl Tally {
    fn new(stages: usize) -> Self {
        Tally {
            reject: vec![0; stages],
            accept: vec![0; stages],
            ..Tally::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.reject.iter_mut().zip(&other.reject) {
            *a += b;
        }
        for (a, b) in self.accept.iter_mut().zip(&other.accept) {
            *a += b;
        }
        self.sum_n += other.sum_n;
        self.sum_n2 += other.sum_n2;
        self
    }
}

/// Uniform on (0, 1) from the top 53 bits.
#[inline]
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn simulate_trials(config: &SimConfig<'_>) -> Result<SimResult> {
    if config.replicates == 0 {
        return Err(Error::domain("replicates", "must be at least 1"));
    }
    if !config.tau.is_finite() {
        return Err(Error::domain("tau", "must be finite"));
    }
    let design = config.design;
    let params = &design.params;
    let stages = params.stages;
    let (n0, n1) = design.integer_group_sizes();
    let schedule = rounded_schedule(design)?;
    let root_info: Vec<f64> = schedule.info.iter().map(|i| i.sqrt()).collect();
    let sd0 = params.sigma0 * (n0 as f64).sqrt();
    let sd1 = params.sigma1 * (n1 as f64).sqrt();
    let mean1 = config.tau * n1 as f64;
    let lower = design.bounds.futility();
    let upper = design.bounds.efficacy();
    let two_sided = design.bounds.sidedness() == Sidedness::TwoSided;

    let blocks = config.replicates.div_ceil(BLOCK);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(block);
            let count = BLOCK.min(config.replicates - block * BLOCK);
            let mut t = Tally::new(stages);
            for _ in 0..count {
                let (mut sum0, mut sum1) = (0.0, 0.0);
                for l in 0..stages {
                    sum0 += sd0 * normal::quantile(open_unit(&mut rng));
                    sum1 += mean1 + sd1 * normal::quantile(open_unit(&mut rng));
                    let stage = (l + 1) as f64;
                    let z = (sum1 / (stage * n1 as f64) - sum0 / (stage * n0 as f64)) * root_info[l];
                    let stat = if two_sided { z.abs() } else { z };
                    let decided = if stat >= upper[l] {
                        t.reject[l] += 1;
                        true
                    } else if stat < lower[l] {
                        t.accept[l] += 1;
                        true
                    } else {
                        false
                    };
                    if decided {
                        let n = schedule.cumulative_samples[l];
                        t.sum_n += n;
                        t.sum_n2 += n * n;
                        break;
                    }
                }
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(stages), Tally::merge);

    let reps = config.replicates as f64;
    let reject_at: Vec<f64> = tally.reject.iter().map(|&c| c as f64 / reps).collect();
    let accept_at: Vec<f64> = tally.accept.iter().map(|&c| c as f64 / reps).collect();
    let reject_rate = tally.reject.iter().sum::<u64>() as f64 / reps;
    let accept_rate = tally.accept.iter().sum::<u64>() as f64 / reps;
    let mean_n = tally.sum_n / reps;
    let var_n = if config.replicates > 1 {
        ((tally.sum_n2 - reps * mean_n * mean_n) / (reps - 1.0)).max(0.0)
    } else {
        0.0
    };
    let binomial = |p: f64| (p * (1.0 - p) / reps).sqrt();
    Ok(SimResult {
        replicates: config.replicates,
        seed: config.seed,
        tau: config.tau,
        group_sizes: (n0, n1),
        reject_se: binomial(reject_rate),
        accept_se: binomial(accept_rate),
        mean_n_se: (var_n / reps).sqrt(),
        reject_rate,
        accept_rate,
        mean_n,
        stage_stop_frequencies: reject_at.iter().zip(&accept_at).map(|(r, a)| r + a).collect(),
        reject_at,
        accept_at,
    })
}
