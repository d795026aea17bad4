//! Trial data model and the canonical joint distribution of the stage-wise
//! Z statistics.
//!
//! Analysis `l` takes place after `l*n` patients on arm 0 and `l*r*n` on
//! arm 1, so information grows linearly in `l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User-facing design inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub stages: usize,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub ratio: f64,
    /// Boundary shape; only meaningful for the families that take one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<f64>,
}

impl Default for TrialParams {
    fn default() -> Self {
        TrialParams {
            stages: 3,
            delta: 0.2,
            alpha: 0.05,
            beta: 0.2,
            sigma0: 1.0,
            sigma1: 1.0,
            ratio: 1.0,
            omega: None,
        }
    }
}

impl TrialParams {
    pub fn validate(&self) -> Result<()> {
        if self.stages < 1 {
            return Err(Error::domain("stages", "must be at least 1"));
        }
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.alpha) {
            return Err(Error::domain("alpha", format!("{} not in (0, 1)", self.alpha)));
        }
        if !open_unit(self.beta) {
            return Err(Error::domain("beta", format!("{} not in (0, 1)", self.beta)));
        }
        for (field, v) in [
            ("delta", self.delta),
            ("sigma0", self.sigma0),
            ("sigma1", self.sigma1),
            ("ratio", self.ratio),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(field, format!("{v} must be positive and finite")));
            }
        }
        if let Some(w) = self.omega {
            if !w.is_finite() {
                return Err(Error::domain("omega", "must be finite"));
            }
        }
        Ok(())
    }

    /// `sigma0^2 + sigma1^2 / r`: information times arm-0 sample size.
    pub fn variance_factor(&self) -> f64 {
        self.sigma0 * self.sigma0 + self.sigma1 * self.sigma1 / self.ratio
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_stages(mut self, stages: usize) -> Self {
        self.stages = stages;
        self
    }
}

/// Per-stage information and cumulative enrolment for a given group size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformationSchedule {
    /// Patients added to arm 0 per stage.
    pub group_size: f64,
    /// Patients added to arm 1 per stage.
    pub arm1_group_size: f64,
    pub info: Vec<f64>,
    /// `l * (n0 + n1)` for each stage.
    pub cumulative_samples: Vec<f64>,
}

impl InformationSchedule {
    /// Schedule with explicit per-stage arm sizes, e.g. integer-rounded ones.
    pub fn from_arm_sizes(params: &TrialParams, arm0: f64, arm1: f64) -> Result<Self> {
        params.validate()?;
        if !(arm0 > 0.0 && arm0.is_finite()) {
            return Err(Error::domain("n", format!("group size {arm0} must be positive")));
        }
        if !(arm1 > 0.0 && arm1.is_finite()) {
            return Err(Error::domain("n", format!("arm-1 group size {arm1} must be positive")));
        }
        let s0 = params.sigma0 * params.sigma0;
        let s1 = params.sigma1 * params.sigma1;
        let (info, cumulative_samples) = (1..=params.stages)
            .map(|l| {
                let l = l as f64;
                (1.0 / (s0 / (l * arm0) + s1 / (l * arm1)), l * (arm0 + arm1))
            })
            .unzip();
        Ok(InformationSchedule {
            group_size: arm0,
            arm1_group_size: arm1,
            info,
            cumulative_samples,
        })
    }

    pub fn stages(&self) -> usize {
        self.info.len()
    }

    pub fn final_info(&self) -> f64 {
        *self.info.last().expect("schedule has at least one stage")
    }

    pub fn max_sample_size(&self) -> f64 {
        *self.cumulative_samples.last().expect("schedule has at least one stage")
    }
}

/// Information at each analysis for group size `n`.
pub fn information_schedule(params: &TrialParams, n: f64) -> Result<InformationSchedule> {
    InformationSchedule::from_arm_sizes(params, n, params.ratio * n)
}

/// Group size `n` at which stage `at_stage` reaches information `target`.
pub fn group_size_from_information(params: &TrialParams, target: f64, at_stage: usize) -> Result<f64> {
    params.validate()?;
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::domain("information", format!("{target} must be positive")));
    }
    if at_stage < 1 || at_stage > params.stages {
        return Err(Error::domain(
            "stage",
            format!("{at_stage} not in 1..={}", params.stages),
        ));
    }
    Ok(target * params.variance_factor() / at_stage as f64)
}

/// Covariance of (Z_1, ..., Z_L): entry (i, j) is sqrt(I_min / I_max).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CovarianceMatrix {
    rows: Vec<Vec<f64>>,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Lower-triangular Cholesky factor, or `None` if not positive definite.
    pub fn cholesky(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.dim();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = self.rows[i][i] - s;
                    if d <= 0.0 || !d.is_finite() {
                        return None;
                    }
                    l[i][j] = d.sqrt();
                } else {
                    l[i][j] = (self.rows[i][j] - s) / l[j][j];
                }
            }
        }
        Some(l)
    }
}

pub fn covariance(schedule: &InformationSchedule) -> CovarianceMatrix {
    let info = &schedule.info;
    let rows = info
        .iter()
        .map(|&a| {
            info.iter()
                .map(|&b| if a <= b { (a / b).sqrt() } else { (b / a).sqrt() })
                .collect()
        })
        .collect();
    CovarianceMatrix { rows }
}

/// E(Z_l) = tau * sqrt(I_l).
pub fn mean_vector(schedule: &InformationSchedule, tau: f64) -> Vec<f64> {
    schedule.info.iter().map(|i| tau * i.sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example1() -> TrialParams {
        TrialParams {
            stages: 2,
            sigma0: 2.0,
            sigma1: 2.0,
            ..TrialParams::default()
        }
    }

    #[test]
    fn example1_schedule() {
        let s = information_schedule(&example1(), 875.45).unwrap();
        assert!((s.info[0] - 109.43).abs() < 0.01);
        assert!((s.info[1] - 218.86).abs() < 0.01);
        assert!((s.cumulative_samples[0] - 1750.9).abs() < 1e-9);
        assert!((s.cumulative_samples[1] - 3501.8).abs() < 1e-9);
    }

    #[test]
    fn unit_information() {
        let p = TrialParams {
            stages: 1,
            ..TrialParams::default()
        };
        let s = information_schedule(&p, 2.0).unwrap();
        assert!((s.info[0] - 1.0).abs() < 1e-15);
        assert!((group_size_from_information(&p, 1.0, 1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn group_size_inverts_example1() {
        let n = group_size_from_information(&example1(), 218.86, 2).unwrap();
        assert!((n - 875.44).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = example1();
        assert!(matches!(
            group_size_from_information(&p, 0.0, 1),
            Err(Error::Domain { field: "information", .. })
        ));
        assert!(group_size_from_information(&p, 1.0, 3).is_err());
        assert!(information_schedule(&p, -1.0).is_err());
        let bad = TrialParams { alpha: 1.0, ..p };
        assert!(matches!(bad.validate(), Err(Error::Domain { field: "alpha", .. })));
        let bad = TrialParams { ratio: 0.0, ..p };
        assert!(matches!(bad.validate(), Err(Error::Domain { field: "ratio", .. })));
        let bad = TrialParams { stages: 0, ..p };
        assert!(matches!(bad.validate(), Err(Error::Domain { field: "stages", .. })));
    }

    #[test]
    fn covariance_examples() {
        let p = TrialParams::default();
        let c = covariance(&information_schedule(&p.with_stages(2), 10.0).unwrap());
        assert!((c.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.get(0, 0), 1.0);
        let c = covariance(&information_schedule(&p.with_stages(1), 10.0).unwrap());
        assert_eq!(c.rows(), &[vec![1.0]]);
        let c = covariance(&information_schedule(&p.with_stages(3), 10.0).unwrap());
        assert!((c.get(0, 1) - (0.5f64).sqrt()).abs() < 1e-15);
        assert!((c.get(0, 2) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c.get(1, 2) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(c.get(2, 1), c.get(1, 2));
    }

    #[test]
    fn means() {
        let s = information_schedule(&example1(), 875.45).unwrap();
        assert!(mean_vector(&s, 0.0).iter().all(|&m| m == 0.0));
        let m = mean_vector(&s, 0.2);
        assert!((m[0] - 2.0923).abs() < 2e-4);
        assert!((m[1] - 2.9589).abs() < 2e-4);
        let neg = mean_vector(&s, -0.2);
        assert!(m.iter().zip(&neg).all(|(a, b)| *a == -*b));
    }

    proptest! {
        #[test]
        fn schedule_properties(
            stages in 1usize..8,
            s0 in 0.1f64..5.0,
            s1 in 0.1f64..5.0,
            ratio in 0.2f64..4.0,
            n in 1.0f64..5000.0,
        ) {
            let p = TrialParams { stages, sigma0: s0, sigma1: s1, ratio, ..TrialParams::default() };
            let s = information_schedule(&p, n).unwrap();
            for (l, i) in s.info.iter().enumerate() {
                prop_assert!((i / s.info[0] - (l + 1) as f64).abs() < 1e-12);
            }
            prop_assert!(s.info.windows(2).all(|w| w[0] < w[1]));
            let back = group_size_from_information(&p, s.final_info(), stages).unwrap();
            prop_assert!((back / n - 1.0).abs() < 1e-12);
            let doubled = information_schedule(&p, 2.0 * n).unwrap();
            for (a, b) in s.info.iter().zip(&doubled.info) {
                prop_assert!((b / a - 2.0).abs() < 1e-12);
            }
            let c = covariance(&s);
            prop_assert!(c.cholesky().is_some());
            for i in 0..stages {
                prop_assert_eq!(c.get(i, i), 1.0);
                for j in 0..stages {
                    prop_assert_eq!(c.get(i, j), c.get(j, i));
                }
            }
        }
    }
}
