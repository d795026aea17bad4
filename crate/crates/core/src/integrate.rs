//! Stage-wise stopping probabilities by recursive numerical integration.
//!
//! With score `S_l = Z_l sqrt(I_l)` the increments `S_l - S_{l-1}` are
//! independent `N(tau dI, dI)`, so given `Z_{l-1} = u` the next statistic is
//! normal with mean `(u sqrt(I_{l-1}) + tau dI) / sqrt(I_l)` and variance
//! `dI / I_l`. The sub-density of `Z_l` on the continuation region is carried
//! forward on a composite Gauss–Legendre grid; exit probabilities at each
//! stage are integrals of that density against closed-form normal tail masses,
//! so no infinite limits are ever truncated on the crossing side.

use serde::{Deserialize, Serialize};

use crate::canonical::InformationSchedule;
use crate::error::{Error, Result};
use crate::normal;
use crate::quadrature::{push_composite, PANEL_ORDER};

/// Half-width, in marginal standard deviations, kept when a continuation
/// interval is unbounded.
const TAIL_CLAMP: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// Stopping boundaries for every stage.
///
/// Two-sided: stop and reject when `|Z_l| >= upper[l]`, stop and accept when
/// `|Z_l| < lower[l]`. One-sided: reject when `Z_l >= upper[l]`, accept when
/// `Z_l < lower[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    sidedness: Sidedness,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundarySet {
    /// Futility `a` and efficacy `r` boundaries for a two-sided test.
    pub fn two_sided(futility: Vec<f64>, efficacy: Vec<f64>) -> Result<Self> {
        Self::new(Sidedness::TwoSided, futility, efficacy)
    }

    /// Futility `f` and efficacy `e` boundaries for a one-sided test.
    pub fn one_sided(futility: Vec<f64>, efficacy: Vec<f64>) -> Result<Self> {
        Self::new(Sidedness::OneSided, futility, efficacy)
    }

    pub fn new(sidedness: Sidedness, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Structure(format!(
                "{} futility vs {} efficacy boundaries",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::Structure("no stages".into()));
        }
        let last = lower.len() - 1;
        for (l, (&lo, &up)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || up.is_nan() {
                return Err(Error::domain("boundary", format!("NaN at stage {}", l + 1)));
            }
            if sidedness == Sidedness::TwoSided && lo < 0.0 {
                return Err(Error::domain(
                    "boundary",
                    format!("two-sided futility bound {lo} < 0 at stage {}", l + 1),
                ));
            }
            if l < last && lo >= up {
                return Err(Error::InfeasibleShape {
                    stage: l + 1,
                    lower: lo,
                    upper: up,
                });
            }
        }
        if lower[last] != upper[last] || !upper[last].is_finite() {
            return Err(Error::domain(
                "boundary",
                format!(
                    "final futility {} and efficacy {} must be equal and finite",
                    lower[last], upper[last]
                ),
            ));
        }
        Ok(BoundarySet {
            sidedness,
            lower,
            upper,
        })
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn stages(&self) -> usize {
        self.upper.len()
    }

    pub fn futility(&self) -> &[f64] {
        &self.lower
    }

    pub fn efficacy(&self) -> &[f64] {
        &self.upper
    }

    /// Probabilities of (reject, accept) at stage `l` for `Z_l ~ N(mean, sd^2)`.
    fn exit_masses(&self, l: usize, mean: f64, sd: f64) -> (f64, f64) {
        let up = self.upper[l];
        let lo = self.lower[l];
        match self.sidedness {
            Sidedness::TwoSided => {
                let reject = normal::sf((up - mean) / sd) + normal::cdf((-up - mean) / sd);
                let accept = if lo > 0.0 {
                    normal::interval((-lo - mean) / sd, (lo - mean) / sd)
                } else {
                    0.0
                };
                (reject, accept)
            }
            Sidedness::OneSided => (normal::sf((up - mean) / sd), normal::cdf((lo - mean) / sd)),
        }
    }

    /// Continuation intervals of stage `l`.
    fn continuation(&self, l: usize) -> Vec<(f64, f64)> {
        let up = self.upper[l];
        let lo = self.lower[l];
        match self.sidedness {
            Sidedness::TwoSided if lo > 0.0 => vec![(-up, -lo), (lo, up)],
            Sidedness::TwoSided => vec![(-up, up)],
            Sidedness::OneSided => vec![(lo, up)],
        }
    }
}

/// Per-stage probabilities of stopping to reject or accept H0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingProbabilities {
    pub reject_at: Vec<f64>,
    pub accept_at: Vec<f64>,
}

impl StoppingProbabilities {
    pub fn rejection(&self) -> f64 {
        self.reject_at.iter().sum()
    }

    pub fn acceptance(&self) -> f64 {
        self.accept_at.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.rejection() + self.acceptance()
    }

    /// Probability that the trial stops at each stage.
    pub fn stop_at(&self) -> Vec<f64> {
        self.reject_at.iter().zip(&self.accept_at).map(|(r, a)| r + a).collect()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.reject_at
            .iter()
            .zip(&other.reject_at)
            .chain(self.accept_at.iter().zip(&other.accept_at))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Quadrature settings for the recursive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    /// Minimum nodes per continuation sub-interval.
    pub nodes: usize,
    /// Absolute tolerance on every returned probability.
    pub tolerance: f64,
    /// Re-run with doubled nodes and check the difference against `tolerance`.
    pub refine: bool,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            nodes: 64,
            tolerance: 1e-8,
            refine: true,
        }
    }
}

impl Integrator {
    /// Single pass at the default node count, without the refinement check.
    pub fn fast() -> Self {
        Integrator {
            refine: false,
            ..Integrator::default()
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn stopping_probabilities(
        &self,
        bounds: &BoundarySet,
        schedule: &InformationSchedule,
        tau: f64,
    ) -> Result<StoppingProbabilities> {
        if bounds.stages() != schedule.stages() {
            return Err(Error::Structure(format!(
                "{} boundary stages vs {} information levels",
                bounds.stages(),
                schedule.stages()
            )));
        }
        if !tau.is_finite() {
            return Err(Error::domain("tau", "must be finite"));
        }
        let coarse = propagate(bounds, &schedule.info, tau, self.nodes.max(PANEL_ORDER));
        if !self.refine {
            return Ok(coarse);
        }
        let fine = propagate(bounds, &schedule.info, tau, 2 * self.nodes.max(PANEL_ORDER));
        let estimate = coarse.max_abs_diff(&fine);
        if estimate > self.tolerance {
            return Err(Error::Quadrature {
                tolerance: self.tolerance,
                estimate,
            });
        }
        Ok(fine)
    }

    pub fn rejection_probability(
        &self,
        bounds: &BoundarySet,
        schedule: &InformationSchedule,
        tau: f64,
    ) -> Result<f64> {
        Ok(self.stopping_probabilities(bounds, schedule, tau)?.rejection())
    }

    pub fn expected_sample_size(
        &self,
        bounds: &BoundarySet,
        schedule: &InformationSchedule,
        tau: f64,
    ) -> Result<f64> {
        let p = self.stopping_probabilities(bounds, schedule, tau)?;
        Ok(expected_from(&p, schedule))
    }
}

pub(crate) fn expected_from(p: &StoppingProbabilities, schedule: &InformationSchedule) -> f64 {
    p.stop_at()
        .iter()
        .zip(&schedule.cumulative_samples)
        .map(|(p, n)| p * n)
        .sum()
}

/// Stage-wise stopping probabilities with the default integrator.
pub fn stopping_probabilities(
    bounds: &BoundarySet,
    schedule: &InformationSchedule,
    tau: f64,
) -> Result<StoppingProbabilities> {
    Integrator::default().stopping_probabilities(bounds, schedule, tau)
}

pub fn rejection_probability(bounds: &BoundarySet, schedule: &InformationSchedule, tau: f64) -> Result<f64> {
    Integrator::default().rejection_probability(bounds, schedule, tau)
}

pub fn expected_sample_size(bounds: &BoundarySet, schedule: &InformationSchedule, tau: f64) -> Result<f64> {
    Integrator::default().expected_sample_size(bounds, schedule, tau)
}

fn propagate(bounds: &BoundarySet, info: &[f64], tau: f64, nodes: usize) -> StoppingProbabilities {
    let stages = info.len();
    let root_info: Vec<f64> = info.iter().map(|i| i.sqrt()).collect();
    let mut reject_at = Vec::with_capacity(stages);
    let mut accept_at = Vec::with_capacity(stages);

    let first_mean = tau * root_info[0];
    let (r, a) = bounds.exit_masses(0, first_mean, 1.0);
    reject_at.push(r);
    accept_at.push(a);

    // grid[i], mass[i] = quadrature weight times sub-density of Z_l at grid[i]
    let mut grid = Vec::new();
    let mut mass = Vec::new();
    if stages > 1 {
        let spread = transition_spread(info, 0);
        let (mut w, mut z) = (Vec::new(), Vec::new());
        lay_grid(bounds, 0, first_mean, spread, nodes, &mut z, &mut w);
        mass = z.iter().zip(&w).map(|(z, w)| w * normal::pdf(z - first_mean)).collect();
        grid = z;
    }

    for l in 1..stages {
        let d_info = info[l] - info[l - 1];
        let sd = (d_info / info[l]).sqrt();
        let scale = root_info[l - 1] / root_info[l];
        let shift = tau * d_info / root_info[l];

        let (mut r, mut a) = (0.0, 0.0);
        for (u, m) in grid.iter().zip(&mass) {
            let (pr, pa) = bounds.exit_masses(l, u * scale + shift, sd);
            r += m * pr;
            a += m * pa;
        }
        reject_at.push(r);
        accept_at.push(a);

        if l + 1 == stages {
            break;
        }
        let spread = transition_spread(info, l).min(sd);
        let (mut z, mut w) = (Vec::new(), Vec::new());
        lay_grid(bounds, l, tau * root_info[l], spread, nodes, &mut z, &mut w);
        let inv_sd = 1.0 / sd;
        let next: Vec<f64> = z
            .iter()
            .zip(&w)
            .map(|(&zj, &wj)| {
                let density: f64 = grid
                    .iter()
                    .zip(&mass)
                    .map(|(u, m)| m * normal::pdf((zj - u * scale - shift) * inv_sd))
                    .sum();
                wj * density * inv_sd
            })
            .collect();
        grid = z;
        mass = next;
    }

    StoppingProbabilities {
        reject_at,
        accept_at,
    }
}

/// Standard deviation, on the stage-`l` scale, of the kernel that carries
/// `Z_l` into `Z_{l+1}`.
fn transition_spread(info: &[f64], l: usize) -> f64 {
    ((info[l + 1] - info[l]) / info[l]).sqrt()
}

fn lay_grid(
    bounds: &BoundarySet,
    l: usize,
    marginal_mean: f64,
    spread: f64,
    nodes: usize,
    z: &mut Vec<f64>,
    w: &mut Vec<f64>,
) {
    let base_panels = nodes.div_ceil(PANEL_ORDER);
    let density = nodes as f64 / 64.0;
    for (lo, hi) in bounds.continuation(l) {
        let lo = lo.max(marginal_mean - TAIL_CLAMP);
        let hi = hi.min(marginal_mean + TAIL_CLAMP);
        if hi <= lo {
            continue;
        }
        let by_width = (density * (hi - lo) / (2.0 * spread)).ceil() as usize;
        push_composite(lo, hi, base_panels.max(by_width), z, w);
    }
}
