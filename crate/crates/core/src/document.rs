//! JSON interchange format for solved designs.

use serde::{Deserialize, Serialize};

use crate::canonical::{covariance, InformationSchedule, TrialParams};
use crate::designs::{Design, DesignConstants, Family};
use crate::error::{Error, Result};
use crate::integrate::{BoundarySet, Sidedness};
use crate::performance::{PerformanceCurve, PerformanceSummary};

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema for [`DesignDocument`].
pub const SCHEMA: &str = include_str!("../schema/design-document.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignDocument {
    pub schema_version: u32,
    pub family: Family,
    pub inputs: TrialParams,
    pub outputs: DesignOutputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOutputs {
    /// Real-valued arm-0 group size.
    pub n: f64,
    pub arm1_group_size: f64,
    pub stage_sizes: StageSizes,
    pub boundaries: Boundaries,
    #[serde(rename = "I")]
    pub information: Vec<f64>,
    pub cumulative_samples: Vec<f64>,
    #[serde(rename = "Lambda")]
    pub covariance: Vec<Vec<f64>>,
    pub constants: DesignConstants,
    pub attained_alpha: f64,
    pub attained_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub performance: Option<PerformanceSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<PerformanceCurve>,
}

/// Integer per-stage recruitment per arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSizes {
    pub arm0: u64,
    pub arm1: u64,
}

/// Boundaries keyed `a`/`r` (two-sided) or `f`/`e` (one-sided).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Boundaries {
    TwoSided { a: Vec<f64>, r: Vec<f64> },
    OneSided { f: Vec<f64>, e: Vec<f64> },
}

impl DesignDocument {
    pub fn new(
        design: &Design,
        performance: Option<PerformanceSummary>,
        curves: Option<PerformanceCurve>,
    ) -> Self {
        let futility = design.bounds.futility().to_vec();
        let efficacy = design.bounds.efficacy().to_vec();
        let boundaries = match design.bounds.sidedness() {
            Sidedness::TwoSided => Boundaries::TwoSided { a: futility, r: efficacy },
            Sidedness::OneSided => Boundaries::OneSided { f: futility, e: efficacy },
        };
        let (arm0, arm1) = design.integer_group_sizes();
        DesignDocument {
            schema_version: SCHEMA_VERSION,
            family: design.family,
            inputs: design.params,
            outputs: DesignOutputs {
                n: design.schedule.group_size,
                arm1_group_size: design.schedule.arm1_group_size,
                stage_sizes: StageSizes { arm0, arm1 },
                boundaries,
                information: design.schedule.info.clone(),
                cumulative_samples: design.schedule.cumulative_samples.clone(),
                covariance: design.covariance.rows().to_vec(),
                constants: design.constants,
                attained_alpha: design.attained_alpha,
                attained_power: design.attained_power,
                performance,
                curves,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("design documents contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DesignDocument =
            serde_json::from_str(text).map_err(|e| Error::domain("design", format!("unreadable document: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::domain(
                "design",
                format!("schema version {} is not {SCHEMA_VERSION}", doc.schema_version),
            ));
        }
        Ok(doc)
    }

    /// Rebuilds the design the document describes.
    pub fn to_design(&self) -> Result<Design> {
        let (sidedness, lower, upper) = match &self.outputs.boundaries {
            Boundaries::TwoSided { a, r } => (Sidedness::TwoSided, a.clone(), r.clone()),
            Boundaries::OneSided { f, e } => (Sidedness::OneSided, f.clone(), e.clone()),
        };
        if sidedness != self.family.sidedness() {
            return Err(Error::Structure(format!(
                "{} design with {:?} boundaries",
                self.family, sidedness
            )));
        }
        let bounds = BoundarySet::new(sidedness, lower, upper)?;
        let schedule = InformationSchedule::from_arm_sizes(&self.inputs, self.outputs.n, self.outputs.arm1_group_size)?;
        if bounds.stages() != schedule.stages() {
            return Err(Error::Structure(format!(
                "{} boundary stages for {} planned analyses",
                bounds.stages(),
                schedule.stages()
            )));
        }
        Ok(Design {
            family: self.family,
            params: self.inputs,
            covariance: covariance(&schedule),
            bounds,
            schedule,
            constants: self.outputs.constants,
            attained_alpha: self.outputs.attained_alpha,
            attained_power: self.outputs.attained_power,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{design_double_triangular, design_triangular};

    fn example1() -> TrialParams {
        TrialParams {
            stages: 2,
            sigma0: 2.0,
            sigma1: 2.0,
            ..TrialParams::default()
        }
    }

    #[test]
    fn json_is_byte_stable() {
        let d = design_double_triangular(&example1()).unwrap();
        let text = DesignDocument::new(&d, None, None).to_json();
        let again = DesignDocument::from_json(&text).unwrap().to_json();
        assert_eq!(text, again);
        assert!(text.contains("\"a\"") && text.contains("\"r\""));
    }

    #[test]
    fn one_sided_keys_and_rebuild() {
        let d = design_triangular(&TrialParams::default()).unwrap();
        let doc = DesignDocument::new(&d, None, None);
        let text = doc.to_json();
        assert!(text.contains("\"f\"") && text.contains("\"e\""));
        let back = DesignDocument::from_json(&text).unwrap().to_design().unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_wrong_version_and_garbage() {
        let d = design_triangular(&TrialParams::default()).unwrap();
        let mut doc = DesignDocument::new(&d, None, None);
        doc.schema_version = 9;
        assert!(DesignDocument::from_json(&doc.to_json()).is_err());
        assert!(DesignDocument::from_json("{}").is_err());
    }

    #[test]
    fn sidedness_must_match_family() {
        let d = design_triangular(&TrialParams::default()).unwrap();
        let mut doc = DesignDocument::new(&d, None, None);
        doc.family = Family::DoubleTriangular;
        assert!(matches!(doc.to_design(), Err(Error::Structure(_))));
    }
}
