//! Operating characteristics of a solved design: the summary vector
//! `(P(reject | 0), E(N | 0), P(reject | delta), E(N | delta), max E(N), max N)`
//! and power / expected-sample-size curves over a grid of effects.

use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::integrate::{self, Integrator, Sidedness};
use crate::search::golden_max;

pub const DEFAULT_CURVE_POINTS: usize = 101;
const PRESCAN_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceSummary {
    pub p_reject_null: f64,
    pub ess_null: f64,
    pub p_reject_alt: f64,
    pub ess_alt: f64,
    pub max_ess: f64,
    /// Effect at which `max_ess` is attained.
    pub argmax_tau: f64,
    pub max_n: f64,
}

impl PerformanceSummary {
    /// The six summary entries in reporting order.
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.p_reject_null,
            self.ess_null,
            self.p_reject_alt,
            self.ess_alt,
            self.max_ess,
            self.max_n,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceCurve {
    pub tau: Vec<f64>,
    pub power: Vec<f64>,
    pub ess: Vec<f64>,
}

impl PerformanceCurve {
    /// CSV with header `tau,power,ess`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,power,ess\n");
        for ((t, p), e) in self.tau.iter().zip(&self.power).zip(&self.ess) {
            out.push_str(&format!("{t},{p},{e}\n"));
        }
        out
    }
}

/// Effect range searched for the maximum expected sample size and used for
/// default curves.
pub fn default_tau_range(design: &Design) -> (f64, f64) {
    let delta = design.params.delta;
    match design.family.sidedness() {
        Sidedness::TwoSided => (-2.0 * delta, 2.0 * delta),
        Sidedness::OneSided => (-delta, 2.0 * delta),
    }
}

pub fn summarize(design: &Design) -> Result<PerformanceSummary> {
    summarize_with(design, &Integrator::default())
}

pub fn summarize_with(design: &Design, integrator: &Integrator) -> Result<PerformanceSummary> {
    let eval = |tau: f64| integrator.stopping_probabilities(&design.bounds, &design.schedule, tau);
    let null = eval(0.0)?;
    let alt = eval(design.params.delta)?;
    let (argmax_tau, max_ess) = max_expected_sample_size(design, integrator)?;
    Ok(PerformanceSummary {
        p_reject_null: null.rejection(),
        ess_null: integrate::expected_from(&null, &design.schedule),
        p_reject_alt: alt.rejection(),
        ess_alt: integrate::expected_from(&alt, &design.schedule),
        max_ess,
        argmax_tau,
        max_n: design.max_n(),
    })
}

/// Maximum of E(N | tau): a coarse grid picks the bracket, golden-section
/// refines inside it.
pub fn max_expected_sample_size(design: &Design, integrator: &Integrator) -> Result<(f64, f64)> {
    let (lo, hi) = default_tau_range(design);
    let failure = Cell::new(None);
    let ess = |tau: f64| match integrator.expected_sample_size(&design.bounds, &design.schedule, tau) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..PRESCAN_POINTS).map(|i| lo + i as f64 * step).collect();
    let values: Vec<f64> = grid.iter().map(|&t| ess(t)).collect();
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let best = (0..grid.len())
        .max_by(|&i, &j| values[i].total_cmp(&values[j]))
        .expect("non-empty grid");
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (tau, value) = golden_max(ess, a, b, 1e-7 * design.params.delta)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if value >= values[best] {
        Ok((tau, value))
    } else {
        Ok((grid[best], values[best]))
    }
}

/// Power and expected sample size on a uniform grid from `tau_lo` to `tau_hi`.
pub fn curves(design: &Design, tau_lo: f64, tau_hi: f64, points: usize) -> Result<PerformanceCurve> {
    if tau_lo >= tau_hi || !tau_lo.is_finite() || !tau_hi.is_finite() {
        return Err(Error::domain("tau range", format!("[{tau_lo}, {tau_hi}] is empty")));
    }
    if points < 2 {
        return Err(Error::domain("tau points", format!("{points} < 2")));
    }
    let step = (tau_hi - tau_lo) / (points - 1) as f64;
    let tau: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { tau_hi } else { tau_lo + i as f64 * step })
        .collect();
    let integrator = Integrator::default();
    let evaluated = tau
        .par_iter()
        .map(|&t| {
            let p = integrator.stopping_probabilities(&design.bounds, &design.schedule, t)?;
            Ok((p.rejection(), integrate::expected_from(&p, &design.schedule)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (power, ess) = evaluated.into_iter().unzip();
    Ok(PerformanceCurve { tau, power, ess })
}

/// Curves over the default range and point count.
pub fn default_curves(design: &Design) -> Result<PerformanceCurve> {
    let (lo, hi) = default_tau_range(design);
    curves(design, lo, hi, DEFAULT_CURVE_POINTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::TrialParams;
    use crate::designs::{design_double_triangular, design_triangular, design_wang_tsiatis};

    fn example1() -> TrialParams {
        TrialParams {
            stages: 2,
            sigma0: 2.0,
            sigma1: 2.0,
            ..TrialParams::default()
        }
    }

    #[test]
    fn example1_double_triangular_summary() {
        let d = design_double_triangular(&example1()).unwrap();
        let s = summarize(&d).unwrap();
        assert!((s.p_reject_null - 0.053).abs() < 5e-4);
        assert!((s.p_reject_alt - 0.800).abs() < 5e-4);
        assert!((s.max_ess - 2716.4).abs() < 1.0, "{}", s.max_ess);
        assert!((s.max_n - 3501.9).abs() < 0.1);
        assert!(s.ess_null <= s.max_ess && s.ess_alt <= s.max_ess && s.max_ess <= s.max_n);
    }

    #[test]
    fn single_stage_summary() {
        let d = design_wang_tsiatis(&example1().with_stages(1).with_omega(0.5)).unwrap();
        let s = summarize(&d).unwrap();
        for v in [s.ess_null, s.ess_alt, s.max_ess] {
            assert!((v - s.max_n).abs() < 1e-9 * s.max_n);
        }
    }

    #[test]
    fn two_sided_curve_symmetry() {
        let d = design_double_triangular(&example1()).unwrap();
        let c = curves(&d, -0.4, 0.4, 41).unwrap();
        assert_eq!(c.tau[0], -0.4);
        assert_eq!(c.tau[40], 0.4);
        for i in 0..41 {
            assert!((c.power[i] - c.power[40 - i]).abs() < 1e-10);
            assert!((c.ess[i] - c.ess[40 - i]).abs() < 1e-7);
        }
        assert!((c.power[20] - d.attained_alpha).abs() < 1e-10);
    }

    #[test]
    fn max_ess_dominates_grid() {
        let params = TrialParams {
            stages: 3,
            delta: 0.25,
            alpha: 0.1,
            beta: 0.1,
            sigma0: 1.0,
            sigma1: 2.0,
            ratio: 2.0,
            omega: None,
        };
        let d = design_triangular(&params).unwrap();
        let s = summarize(&d).unwrap();
        let c = default_curves(&d).unwrap();
        assert!(c.ess.iter().all(|&e| e <= s.max_ess + 1e-6));
        assert!(c.power.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn curve_validation_and_csv() {
        let d = design_double_triangular(&example1()).unwrap();
        assert!(curves(&d, 0.1, 0.1, 5).is_err());
        assert!(curves(&d, 0.0, 0.1, 1).is_err());
        let csv = curves(&d, 0.0, 0.2, 3).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tau,power,ess");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }
}
