//! Whitehead's closed-form triangular and double triangular tests.
//!
//! Both start from a modified effect size `delta_tilde` and a final
//! information level chosen so that the two boundary lines meet at stage L;
//! setting `upper_L == lower_L` and solving the resulting quadratic in
//! `sqrt(I_L)` gives
//! `I_L = [ (4 c^2 / L + 8 log(1/k))^(1/2) - 2 c / L^(1/2) ]^2 / delta_tilde^2`
//! with `c = 0.583` and `k = alpha` (two-sided) or `2 alpha` (one-sided).

use crate::canonical::{group_size_from_information, information_schedule, TrialParams};
use crate::error::Result;
use crate::integrate::{BoundarySet, Sidedness};
use crate::normal;

use super::{Calibrator, Design, DesignConstants, Family};

/// Correction for discrete monitoring of a continuous boundary.
pub const DISCRETE_MONITORING_CORRECTION: f64 = 0.583;

/// How `I_L` is scaled by `delta_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WhiteheadScaling {
    /// `1 / delta_tilde^2`: dimensionally consistent, and the one that makes
    /// the boundaries meet at stage L.
    Squared,
    /// `1 / delta_tilde`, as the formula is sometimes printed.
    #[cfg(test)]
    Linear,
}

/// Normal quantile paired with alpha in the one-sided `delta_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OneSidedQuantile {
    /// `z_{1-alpha}`, matching the one-sided error rate.
    OneSided,
    /// `z_{1-alpha/2}`, the two-sided quantile carried over unchanged.
    #[cfg(test)]
    TwoSided,
}

pub fn design_double_triangular(params: &TrialParams) -> Result<Design> {
    whitehead_variant(
        Family::DoubleTriangular,
        params,
        WhiteheadScaling::Squared,
        OneSidedQuantile::OneSided,
    )
}

pub fn design_triangular(params: &TrialParams) -> Result<Design> {
    whitehead_variant(
        Family::Triangular,
        params,
        WhiteheadScaling::Squared,
        OneSidedQuantile::OneSided,
    )
}

pub(crate) struct RawBoundaries {
    pub delta_tilde: f64,
    pub final_information: f64,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

pub(crate) fn raw_boundaries(
    family: Family,
    params: &TrialParams,
    scaling: WhiteheadScaling,
    quantile: OneSidedQuantile,
) -> RawBoundaries {
    let alpha = params.alpha;
    let (z_alpha, log_term) = match family.sidedness() {
        Sidedness::TwoSided => (normal::quantile(1.0 - alpha / 2.0), (1.0 / alpha).ln()),
        Sidedness::OneSided => {
            let z = match quantile {
                OneSidedQuantile::OneSided => normal::quantile(1.0 - alpha),
                #[cfg(test)]
                OneSidedQuantile::TwoSided => normal::quantile(1.0 - alpha / 2.0),
            };
            (z, (1.0 / (2.0 * alpha)).ln())
        }
    };
    let z_beta = normal::quantile(1.0 - params.beta);
    let delta_tilde = 2.0 * z_alpha * params.delta / (z_alpha + z_beta);

    let c = DISCRETE_MONITORING_CORRECTION;
    let stages = params.stages as f64;
    let root = ((4.0 * c * c / stages + 8.0 * log_term).sqrt() - 2.0 * c / stages.sqrt()).powi(2);
    let final_information = match scaling {
        WhiteheadScaling::Squared => root / (delta_tilde * delta_tilde),
        #[cfg(test)]
        WhiteheadScaling::Linear => root / delta_tilde,
    };

    let intercept = 2.0 / delta_tilde * log_term - c * (final_information / stages).sqrt();
    let (upper, lower) = (1..=params.stages)
        .map(|l| {
            let fraction = l as f64 / stages;
            let root_info = (fraction * final_information).sqrt();
            let upper = (intercept + delta_tilde / 4.0 * fraction * final_information) / root_info;
            let lower = (-intercept + 3.0 * delta_tilde / 4.0 * fraction * final_information) / root_info;
            (upper, lower)
        })
        .unzip();
    RawBoundaries {
        delta_tilde,
        final_information,
        upper,
        lower,
    }
}

pub(crate) fn whitehead_variant(
    family: Family,
    params: &TrialParams,
    scaling: WhiteheadScaling,
    quantile: OneSidedQuantile,
) -> Result<Design> {
    family.check_params(params)?;
    let raw = raw_boundaries(family, params, scaling, quantile);
    let n = group_size_from_information(params, raw.final_information, params.stages)?;
    let schedule = information_schedule(params, n)?;

    let stages = params.stages;
    let efficacy = raw.upper;
    let mut futility = raw.lower;
    if family.sidedness() == Sidedness::TwoSided {
        futility.iter_mut().for_each(|a| *a = a.max(0.0));
    }
    // equal up to rounding by construction of I_L
    futility[stages - 1] = efficacy[stages - 1];
    let bounds = BoundarySet::new(family.sidedness(), futility, efficacy)?;
    let constants = DesignConstants::Whitehead {
        delta_tilde: raw.delta_tilde,
        final_information: raw.final_information,
    };
    Design::assemble(family, *params, bounds, schedule, constants, &Calibrator::default().report)
}
