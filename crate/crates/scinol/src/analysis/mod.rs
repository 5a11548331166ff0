//! Verification suite: potential functions, conjugate bounds, regret bound
//! calculators, and numeric checkers that replay recorded runs against the
//! inequalities the learners are built on.

mod bounds;
mod checks;
mod conjugate;
mod potentials;

pub use bounds::{
    scinol1_regret_bound, scinol1_regret_bound_from_stats, scinol2_regret_bound,
    scinol2_regret_bound_from_stats,
};
pub use checks::{
    check_core_ineq_1, check_core_ineq_2, check_delta_bound, check_per_trial, grid_points,
    linearized_regret, random_points, scalar_loss_grad, violation, DeltaBoundOutcome, DeltaCoord,
    PerTrialOutcome, RegretEstimate,
};
pub use conjugate::{
    fenchel_bound_1, fenchel_bound_2, golden_section_max, numeric_conjugate_1,
    numeric_conjugate_2,
};
pub use potentials::{h_fn, psi1, psi2};

use serde::{Deserialize, Serialize};

/// One verification check's outcome, emitted both as a text line and as
/// part of the JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub points: usize,
    pub max_violation: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: &str, points: usize, max_violation: f64, tolerance: f64) -> Self {
        CheckReport {
            check_name: name.to_string(),
            points,
            max_violation,
            pass: max_violation <= tolerance,
        }
    }

    /// Line-oriented form, one check per line.
    pub fn line(&self) -> String {
        format!(
            "{} {}: points={} max_violation={:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_name,
            self.points,
            self.max_violation
        )
    }
}

/// Renders a report set as the JSON document consumed by tooling.
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports are plain data")
}
