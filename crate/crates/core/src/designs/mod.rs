//! The six design families and their calibration.
//!
//! Two-sided: Haybittle–Peto, Wang–Tsiatis, the power family of inner wedge
//! designs and the double triangular test. One-sided: the power family and
//! the triangular test. The triangular tests are closed-form and only
//! approximately attain their error rates; every other family is calibrated
//! numerically.

mod searched;
mod whitehead;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::canonical::{covariance, CovarianceMatrix, InformationSchedule, TrialParams};
use crate::error::{Error, Result};
use crate::integrate::{self, BoundarySet, Integrator, Sidedness, StoppingProbabilities};
use crate::normal;
use crate::search::NelderMead;

pub use searched::{design_haybittle_peto, design_inner_wedge, design_power_family, design_wang_tsiatis};
pub use whitehead::{design_double_triangular, design_triangular};

/// Tolerance on attained error rates for numerically calibrated families.
pub const SEARCHED_TOLERANCE: f64 = 1e-5;
/// Tolerance on attained error rates for the closed-form triangular tests.
pub const CLOSED_FORM_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    HaybittlePeto,
    WangTsiatis,
    InnerWedge,
    DoubleTriangular,
    PowerFamily,
    Triangular,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::HaybittlePeto,
        Family::WangTsiatis,
        Family::InnerWedge,
        Family::DoubleTriangular,
        Family::PowerFamily,
        Family::Triangular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::HaybittlePeto => "haybittle-peto",
            Family::WangTsiatis => "wang-tsiatis",
            Family::InnerWedge => "inner-wedge",
            Family::DoubleTriangular => "double-triangular",
            Family::PowerFamily => "power-family",
            Family::Triangular => "triangular",
        }
    }

    pub fn sidedness(self) -> Sidedness {
        match self {
            Family::PowerFamily | Family::Triangular => Sidedness::OneSided,
            _ => Sidedness::TwoSided,
        }
    }

    /// Whether the family is indexed by the shape parameter omega.
    pub fn takes_omega(self) -> bool {
        matches!(self, Family::WangTsiatis | Family::InnerWedge | Family::PowerFamily)
    }

    /// Numerically calibrated (as opposed to closed-form) families.
    pub fn is_searched(self) -> bool {
        !matches!(self, Family::DoubleTriangular | Family::Triangular)
    }

    pub fn attained_tolerance(self) -> f64 {
        if self.is_searched() {
            SEARCHED_TOLERANCE
        } else {
            CLOSED_FORM_TOLERANCE
        }
    }

    pub fn design(self, params: &TrialParams) -> Result<Design> {
        match self {
            Family::HaybittlePeto => design_haybittle_peto(params),
            Family::WangTsiatis => design_wang_tsiatis(params),
            Family::InnerWedge => design_inner_wedge(params),
            Family::DoubleTriangular => design_double_triangular(params),
            Family::PowerFamily => design_power_family(params),
            Family::Triangular => design_triangular(params),
        }
    }

    /// Fixed-sample group size `(z_alpha + z_beta)^2 (sigma0^2 + sigma1^2/r) / delta^2`
    /// for this family's sidedness.
    pub fn fixed_sample_size(self, params: &TrialParams) -> f64 {
        let z = fixed_critical_value(self.sidedness(), params.alpha) + normal::quantile(1.0 - params.beta);
        z * z * params.variance_factor() / (params.delta * params.delta)
    }

    /// Rejects an omega given to a family without one and requires it for
    /// the families that use it.
    pub(crate) fn check_params(self, params: &TrialParams) -> Result<f64> {
        params.validate()?;
        match (self.takes_omega(), params.omega) {
            (true, Some(w)) => Ok(w),
            (true, None) => Err(Error::domain("omega", format!("required by {}", self.name()))),
            (false, Some(_)) => Err(Error::domain("omega", format!("not accepted by {}", self.name()))),
            (false, None) => Ok(0.0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::domain("family", format!("unknown design family `{s}`")))
    }
}

/// Critical value of the single-analysis test.
pub fn fixed_critical_value(sidedness: Sidedness, alpha: f64) -> f64 {
    match sidedness {
        Sidedness::TwoSided => normal::quantile(1.0 - alpha / 2.0),
        Sidedness::OneSided => normal::quantile(1.0 - alpha),
    }
}

/// Family-specific constants that generate the boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignConstants {
    HaybittlePeto { interim_efficacy: f64, final_efficacy: f64 },
    WangTsiatis { c_wt: f64 },
    InnerWedge { c_a: f64, c_r: f64 },
    PowerFamily { c_e: f64, c_f: f64 },
    Whitehead { delta_tilde: f64, final_information: f64 },
}

/// A solved design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub family: Family,
    pub params: TrialParams,
    pub bounds: BoundarySet,
    pub schedule: InformationSchedule,
    pub covariance: CovarianceMatrix,
    pub constants: DesignConstants,
    pub attained_alpha: f64,
    pub attained_power: f64,
}

impl Design {
    /// Assembles a design and computes its attained operating characteristics.
    pub(crate) fn assemble(
        family: Family,
        params: TrialParams,
        bounds: BoundarySet,
        schedule: InformationSchedule,
        constants: DesignConstants,
        integrator: &Integrator,
    ) -> Result<Self> {
        let attained_alpha = integrator.rejection_probability(&bounds, &schedule, 0.0)?;
        let attained_power = integrator.rejection_probability(&bounds, &schedule, params.delta)?;
        Ok(Design {
            family,
            covariance: covariance(&schedule),
            params,
            bounds,
            schedule,
            constants,
            attained_alpha,
            attained_power,
        })
    }

    pub fn group_size(&self) -> f64 {
        self.schedule.group_size
    }

    pub fn max_n(&self) -> f64 {
        self.schedule.max_sample_size()
    }

    pub fn stopping_probabilities(&self, tau: f64) -> Result<StoppingProbabilities> {
        integrate::stopping_probabilities(&self.bounds, &self.schedule, tau)
    }

    pub fn rejection_probability(&self, tau: f64) -> Result<f64> {
        integrate::rejection_probability(&self.bounds, &self.schedule, tau)
    }

    pub fn expected_sample_size(&self, tau: f64) -> Result<f64> {
        integrate::expected_sample_size(&self.bounds, &self.schedule, tau)
    }

    /// Integer per-stage recruitment `(ceil(n), ceil(r n))`.
    pub fn integer_group_sizes(&self) -> (u64, u64) {
        (
            ceil_count(self.schedule.group_size),
            ceil_count(self.schedule.arm1_group_size),
        )
    }

    /// Whether attained rates meet the family's tolerance.
    pub fn meets_targets(&self) -> bool {
        let tol = self.family.attained_tolerance();
        (self.attained_alpha - self.params.alpha).abs() <= tol
            && (self.attained_power - (1.0 - self.params.beta)).abs() <= tol
    }
}

/// Ceiling that absorbs floating-point noise just above an integer.
fn ceil_count(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 * x.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Numerical settings used by the calibration searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibrator {
    /// Used inside search loops.
    pub search: Integrator,
    /// Used for the reported operating characteristics.
    pub report: Integrator,
    pub root_tol: f64,
    pub simplex: NelderMead,
    /// Simplex restarts from the incumbent before giving up.
    pub restarts: usize,
}

impl Default for Calibrator {
    fn default() -> Self {
        Calibrator {
            search: Integrator::fast(),
            report: Integrator::default(),
            root_tol: 1e-12,
            simplex: NelderMead {
                f_tol: 1e-16,
                x_tol: 1e-9,
                max_iter: 1000,
            },
            restarts: 4,
        }
    }
}

/// `(l / L)^(omega - 1/2)` for l = 1..=L.
pub(crate) fn shape_weights(stages: usize, omega: f64) -> Vec<f64> {
    (1..=stages)
        .map(|l| (l as f64 / stages as f64).powf(omega - 0.5))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
            assert_eq!(serde_json::to_string(&f).unwrap(), format!("\"{}\"", f.name()));
        }
        assert!("pocock".parse::<Family>().is_err());
    }

    #[test]
    fn omega_contract() {
        let p = TrialParams::default();
        let err = Family::Triangular.check_params(&p.with_omega(0.3)).unwrap_err();
        assert_eq!(err.to_string(), "invalid omega: not accepted by triangular");
        assert!(Family::WangTsiatis.check_params(&p).is_err());
        assert_eq!(Family::WangTsiatis.check_params(&p.with_omega(0.25)).unwrap(), 0.25);
    }

    #[test]
    fn fixed_size_formula() {
        let p = TrialParams {
            stages: 1,
            sigma0: 2.0,
            sigma1: 2.0,
            ..TrialParams::default()
        };
        let n = Family::HaybittlePeto.fixed_sample_size(&p);
        assert!((n - 1569.8).abs() < 0.05, "{n}");
    }

    #[test]
    fn ceil_ignores_noise() {
        assert_eq!(ceil_count(875.0000000000001), 875);
        assert_eq!(ceil_count(875.01), 876);
        assert_eq!(ceil_count(0.2), 1);
    }
}
