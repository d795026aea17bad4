//! Group sequential designs for two-arm trials with normally distributed
//! outcomes of known variance.
//!
//! Six families are supported: Haybittle–Peto, Wang–Tsiatis, the power
//! family of inner wedge designs and the double triangular test for
//! two-sided hypotheses; the power family and the triangular test for
//! one-sided ones. For each the crate finds the stopping boundaries and the
//! exact (real-valued) group size, and reports operating characteristics
//! computed by recursive numerical integration over the canonical joint
//! distribution of the stage-wise Z statistics. A Monte Carlo simulator gives
//! an independent check.
//!
//! ```
//! use gsdesign::{designs::Family, TrialParams};
//!
//! let params = TrialParams { stages: 2, sigma0: 2.0, sigma1: 2.0, ..TrialParams::default() };
//! let design = Family::DoubleTriangular.design(&params).unwrap();
//! assert!((design.max_n() - 3501.9).abs() < 0.1);
//! ```

pub mod canonical;
pub mod chart;
pub mod cli;
pub mod designs;
pub mod document;
mod error;
pub mod integrate;
pub mod normal;
pub mod performance;
pub mod quadrature;
pub mod search;
pub mod simulate;

pub use canonical::{covariance, information_schedule, mean_vector, CovarianceMatrix, InformationSchedule, TrialParams};
pub use designs::{Design, DesignConstants, Family};
pub use error::{Error, Result};
pub use integrate::{BoundarySet, Integrator, Sidedness, StoppingProbabilities};
pub use performance::{PerformanceCurve, PerformanceSummary};
