pub mod certify;
pub mod coding;
pub mod pants;
pub mod pressure;
pub mod sweep;
pub mod thurston;

use anosov_core::automaton::LabeledGraph;
use anosov_core::rep::{brute_force_exponent, BruteForce, RepError, Representation};
use anosov_core::weyl::Functional;
use serde::Serialize;

use crate::CliError;

/// Summary of a [`SeparationCertificate`](anosov_core::SeparationCertificate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub epsilon: f64,
    pub passed: bool,
    pub failure: Option<String>,
    pub min_distance: f64,
    pub certified_window: Option<(f64, f64)>,
}

impl From<&anosov_core::SeparationCertificate> for CertificateSummary {
    fn from(c: &anosov_core::SeparationCertificate) -> Self {
        Self {
            epsilon: c.epsilon,
            passed: c.passed,
            failure: c.failure.clone(),
            min_distance: c.min_distance,
            certified_window: c.certified_window,
        }
    }
}

const SHRINK: f64 = 0.85;
const SHRINK_STEPS: usize = 8;

/// Brute-force count at `t_max`, or at `0.9 log(budget) / h` shrunk until the
/// enumeration fits in the budget.
pub fn brute_force_auto(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    h: f64,
    t_max: Option<f64>,
    budget: usize,
) -> Result<BruteForce, CliError> {
    if let Some(t) = t_max {
        return Ok(brute_force_exponent(rho, phi, g, t, budget)?);
    }
    let mut t = 0.9 * (budget as f64).ln() / h;
    for _ in 0..SHRINK_STEPS {
        match brute_force_exponent(rho, phi, g, t, budget) {
            Err(RepError::Budget(_)) => t *= SHRINK,
            r => return Ok(r?),
        }
    }
    Err(CliError::numeric(format!(
        "brute-force count exceeds the budget of {budget} elements"
    )))
}
