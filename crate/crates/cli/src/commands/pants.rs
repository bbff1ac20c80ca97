use anosov_core::automaton::builtin_f2_abc;
use anosov_core::pants::{holonomy, is_admissible, sl3_scalar_residual, sl3_transfer_root, FGParams};
use anosov_core::rep::{busemann_depth_k_exponent, certify_separation, exponent_bounds};
use serde::Serialize;

use super::CertificateSummary;
use crate::output::{render, Format};
use crate::{CliError, Outcome, RunConfig};

/// Exponents, bounds and certificate of one pair-of-pants structure. The transfer
/// root and scalar residual are only reported for admissible parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PantsRecord {
    pub params: FGParams,
    pub phi: Vec<f64>,
    pub epsilon: f64,
    pub admissible: bool,
    pub min_slack: f64,
    pub relation_defect: f64,
    pub transfer_root: Option<f64>,
    pub scalar_residual: Option<f64>,
    pub h_kappa: f64,
    pub h_lambda: f64,
    pub depth: usize,
    pub depth_k: Option<f64>,
    pub lower: f64,
    pub upper: Option<f64>,
    pub upper_lambda: Option<f64>,
    pub certified: bool,
    pub bounds_valid: bool,
    pub certificate: CertificateSummary,
    pub warnings: Vec<String>,
}

pub fn compute(cfg: &RunConfig) -> Result<PantsRecord, CliError> {
    let p = cfg.pants_params()?;
    let phi = cfg.functional(3)?;
    let eps = cfg.epsilon();
    let g = builtin_f2_abc();
    let h = holonomy(&p)?;
    let adm = is_admissible(&p);
    let report = exponent_bounds(&h.rep, &phi, &g, eps)?;
    let cert = certify_separation(&h.rep, &g, eps)?;
    let mut warnings = Vec::new();
    let (transfer_root, scalar_residual) = if adm.admissible {
        let s = sl3_transfer_root(&p, &phi)?;
        (Some(s), Some(sl3_scalar_residual(s, &p, &phi)?))
    } else {
        (None, None)
    };
    let depth_k = match busemann_depth_k_exponent(&h.rep, &phi, &g, cfg.depth(), cfg.block_budget()) {
        Ok(x) => Some(x),
        Err(e) => {
            warnings.push(format!("depth-{} exponent: {e}", cfg.depth()));
            None
        }
    };
    let finite = [report.h_kappa, report.h_lambda]
        .into_iter()
        .chain(transfer_root)
        .chain(scalar_residual)
        .chain(depth_k)
        .chain(report.upper)
        .all(f64::is_finite);
    if !finite {
        return Err(CliError::numeric("non-finite exponent"));
    }
    Ok(PantsRecord {
        params: p,
        phi: phi.coeffs().to_vec(),
        epsilon: eps,
        admissible: adm.admissible,
        min_slack: adm.min_slack,
        relation_defect: h.relation_defect(),
        transfer_root,
        scalar_residual,
        h_kappa: report.h_kappa,
        h_lambda: report.h_lambda,
        depth: cfg.depth(),
        depth_k,
        lower: report.lower,
        upper: report.upper,
        upper_lambda: report.upper_lambda,
        certified: report.certified,
        bounds_valid: report.valid,
        certificate: CertificateSummary::from(&cert),
        warnings,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome::ok(render(&compute(cfg)?, cfg.format(Format::Json))?))
}
