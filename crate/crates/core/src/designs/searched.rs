//! Families whose boundary constants and group size come from numerical
//! searches: Brent for the one-dimensional problems, Nelder–Mead for the
//! two-constant power families.

use crate::canonical::{group_size_from_information, information_schedule, InformationSchedule, TrialParams};
use crate::error::{Error, Result};
use crate::integrate::{BoundarySet, Sidedness};
use crate::normal;
use crate::search::{brent_root, SimplexResult};

use super::{fixed_critical_value, shape_weights, Calibrator, Design, DesignConstants, Family};

/// Interim efficacy boundary of the Haybittle–Peto design.
pub const HAYBITTLE_PETO_INTERIM: f64 = 3.0;

/// Outer limit for single-constant efficacy searches.
const MAX_CRITICAL_VALUE: f64 = 10.0;

pub fn design_haybittle_peto(params: &TrialParams) -> Result<Design> {
    Calibrator::default().haybittle_peto(params)
}

pub fn design_wang_tsiatis(params: &TrialParams) -> Result<Design> {
    Calibrator::default().wang_tsiatis(params)
}

pub fn design_inner_wedge(params: &TrialParams) -> Result<Design> {
    Calibrator::default().inner_wedge(params)
}

pub fn design_power_family(params: &TrialParams) -> Result<Design> {
    Calibrator::default().power_family(params)
}

fn no_futility_bounds(efficacy: &[f64]) -> Result<BoundarySet> {
    let stages = efficacy.len();
    let mut futility = vec![0.0; stages];
    futility[stages - 1] = efficacy[stages - 1];
    BoundarySet::two_sided(futility, efficacy.to_vec())
}

impl Calibrator {
    pub fn haybittle_peto(&self, params: &TrialParams) -> Result<Design> {
        let family = Family::HaybittlePeto;
        family.check_params(params)?;
        let stages = params.stages;
        let unit = information_schedule(params, 1.0)?;
        let bounds_for = |last: f64| {
            let mut efficacy = vec![HAYBITTLE_PETO_INTERIM; stages];
            efficacy[stages - 1] = last;
            no_futility_bounds(&efficacy)
        };
        let z = fixed_critical_value(Sidedness::TwoSided, params.alpha);
        let last = self.root_on(
            |c| Ok(self.search.rejection_probability(&bounds_for(c)?, &unit, 0.0)? - params.alpha),
            z - 1e-3,
            MAX_CRITICAL_VALUE,
        )?;
        if stages > 1 && last > HAYBITTLE_PETO_INTERIM {
            return Err(Error::Calibration(format!(
                "final boundary {last:.4} exceeds the interim boundary {HAYBITTLE_PETO_INTERIM}; alpha too small"
            )));
        }
        let bounds = bounds_for(last)?;
        let schedule = self.size_for_power(family, params, &bounds)?;
        let constants = DesignConstants::HaybittlePeto {
            interim_efficacy: HAYBITTLE_PETO_INTERIM,
            final_efficacy: last,
        };
        self.finish(family, *params, bounds, schedule, constants)
    }

    pub fn wang_tsiatis(&self, params: &TrialParams) -> Result<Design> {
        let family = Family::WangTsiatis;
        let omega = family.check_params(params)?;
        let stages = params.stages;
        let weights = shape_weights(stages, omega);
        let unit = information_schedule(params, 1.0)?;
        let bounds_for = |c: f64| {
            let efficacy: Vec<f64> = weights.iter().map(|w| c * w).collect();
            no_futility_bounds(&efficacy)
        };
        // Without early acceptance P(reject) >= P(|Z_L| >= C), and the union
        // bound caps it once every r_l >= z_{1 - alpha/(2L)}.
        let lo = fixed_critical_value(Sidedness::TwoSided, params.alpha);
        let bonferroni = normal::quantile(1.0 - params.alpha / (2.0 * stages as f64));
        let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = (bonferroni / min_weight).max(lo);
        // The margin keeps the bracket strict when both ends coincide (L = 1).
        let margin = 1e-3;
        let c_wt = self.root_on(
            |c| Ok(self.search.rejection_probability(&bounds_for(c)?, &unit, 0.0)? - params.alpha),
            lo - margin,
            hi + margin,
        )?;
        let bounds = bounds_for(c_wt)?;
        let schedule = self.size_for_power(family, params, &bounds)?;
        self.finish(family, *params, bounds, schedule, DesignConstants::WangTsiatis { c_wt })
    }

    pub fn inner_wedge(&self, params: &TrialParams) -> Result<Design> {
        let family = Family::InnerWedge;
        let omega = family.check_params(params)?;
        let weights = shape_weights(params.stages, omega);
        let start = [
            normal::quantile(1.0 - params.beta),
            fixed_critical_value(Sidedness::TwoSided, params.alpha),
        ];
        let build = |c: [f64; 2]| -> Result<(BoundarySet, InformationSchedule)> {
            let [c_a, c_r] = c;
            let schedule = self.wedge_schedule(params, c_a + c_r)?;
            let stages = params.stages;
            let mut futility: Vec<f64> = schedule
                .info
                .iter()
                .zip(&weights)
                .map(|(i, w)| (params.delta * i.sqrt() - c_a * w).max(0.0))
                .collect();
            let efficacy: Vec<f64> = weights.iter().map(|w| c_r * w).collect();
            futility[stages - 1] = efficacy[stages - 1];
            Ok((BoundarySet::two_sided(futility, efficacy)?, schedule))
        };
        let found = self.calibrate_pair(params, start, &build)?;
        let (bounds, schedule) = build(found.argmin)?;
        let [c_a, c_r] = found.argmin;
        self.finish(family, *params, bounds, schedule, DesignConstants::InnerWedge { c_a, c_r })
    }

    pub fn power_family(&self, params: &TrialParams) -> Result<Design> {
        let family = Family::PowerFamily;
        let omega = family.check_params(params)?;
        let weights = shape_weights(params.stages, omega);
        let start = [
            fixed_critical_value(Sidedness::OneSided, params.alpha),
            normal::quantile(1.0 - params.beta),
        ];
        let build = |c: [f64; 2]| -> Result<(BoundarySet, InformationSchedule)> {
            let [c_e, c_f] = c;
            let schedule = self.wedge_schedule(params, c_e + c_f)?;
            let stages = params.stages;
            let efficacy: Vec<f64> = weights.iter().map(|w| c_e * w).collect();
            let mut futility: Vec<f64> = schedule
                .info
                .iter()
                .zip(&weights)
                .map(|(i, w)| params.delta * i.sqrt() - c_f * w)
                .collect();
            futility[stages - 1] = efficacy[stages - 1];
            Ok((BoundarySet::one_sided(futility, efficacy)?, schedule))
        };
        let found = self.calibrate_pair(params, start, &build)?;
        let (bounds, schedule) = build(found.argmin)?;
        let [c_e, c_f] = found.argmin;
        self.finish(family, *params, bounds, schedule, DesignConstants::PowerFamily { c_e, c_f })
    }

    /// Schedule with `I_L = (sum of constants)^2 / delta^2`.
    fn wedge_schedule(&self, params: &TrialParams, constant_sum: f64) -> Result<InformationSchedule> {
        if constant_sum.is_nan() || constant_sum <= 0.0 {
            return Err(Error::domain("constants", format!("sum {constant_sum} must be positive")));
        }
        let final_info = (constant_sum / params.delta).powi(2);
        let n = group_size_from_information(params, final_info, params.stages)?;
        information_schedule(params, n)
    }

    /// Nelder–Mead on the squared error-rate residuals, with restarts from
    /// the incumbent until the residuals are negligible.
    fn calibrate_pair<B>(&self, params: &TrialParams, start: [f64; 2], build: &B) -> Result<SimplexResult>
    where
        B: Fn([f64; 2]) -> Result<(BoundarySet, InformationSchedule)>,
    {
        let objective = |c: [f64; 2]| -> f64 {
            let Ok((bounds, schedule)) = build(c) else {
                return INFEASIBLE;
            };
            let alpha = self.search.rejection_probability(&bounds, &schedule, 0.0);
            let power = self.search.rejection_probability(&bounds, &schedule, params.delta);
            match (alpha, power) {
                (Ok(a), Ok(p)) => (a - params.alpha).powi(2) + (1.0 - p - params.beta).powi(2),
                _ => INFEASIBLE,
            }
        };
        let mut best = self.simplex.minimize(&objective, start);
        for _ in 0..self.restarts {
            if best.value < RESIDUAL_TARGET {
                break;
            }
            let again = self.simplex.minimize(&objective, best.argmin);
            if again.value < best.value {
                best = again;
            } else {
                break;
            }
        }
        if best.value >= INFEASIBLE {
            return Err(Error::Calibration("no feasible boundary constants found".into()));
        }
        Ok(best)
    }

    /// Group size giving power 1 - beta at tau = delta for fixed boundaries.
    fn size_for_power(&self, family: Family, params: &TrialParams, bounds: &BoundarySet) -> Result<InformationSchedule> {
        let fixed = family.fixed_sample_size(params);
        let target = 1.0 - params.beta;
        let shortfall = |scale: f64| -> Result<f64> {
            let schedule = information_schedule(params, scale * fixed)?;
            Ok(self.search.rejection_probability(bounds, &schedule, params.delta)? - target)
        };
        // scale is n / n_fixed; the group size of an L-stage design sits
        // between n_fixed / L and a modest multiple of n_fixed
        let mut lo = 0.5 / params.stages as f64;
        let mut hi = 2.0;
        for _ in 0..60 {
            if shortfall(lo)? <= 0.0 {
                break;
            }
            lo *= 0.5;
        }
        for _ in 0..60 {
            if shortfall(hi)? >= 0.0 {
                break;
            }
            hi *= 2.0;
        }
        let scale = self.root_on(shortfall, lo, hi)?;
        information_schedule(params, scale * fixed)
    }

    fn root_on<F>(&self, f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let failure = std::cell::Cell::new(None);
        let probe = |x: f64| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        };
        let found = brent_root(probe, lo, hi, self.root_tol);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(found?.root)
    }

    fn finish(
        &self,
        family: Family,
        params: TrialParams,
        bounds: BoundarySet,
        schedule: InformationSchedule,
        constants: DesignConstants,
    ) -> Result<Design> {
        let design = Design::assemble(family, params, bounds, schedule, constants, &self.report)?;
        if !design.meets_targets() {
            return Err(Error::Calibration(format!(
                "{} reached alpha {:.8} and power {:.8} (targets {} and {})",
                family,
                design.attained_alpha,
                design.attained_power,
                params.alpha,
                1.0 - params.beta
            )));
        }
        Ok(design)
    }
}

const INFEASIBLE: f64 = 1e3;
const RESIDUAL_TARGET: f64 = 1e-14;
