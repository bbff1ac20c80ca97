use anosov_core::pressure::pressure_edge_weighted;
use serde::Serialize;

use crate::config::read_json;
use crate::output::{render, Format};
use crate::{CliError, Outcome, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureRecord {
    pub pressure: f64,
    pub perron_root: f64,
    pub residual: f64,
    pub iterations: usize,
    pub edges: usize,
    pub recurrent_edges: usize,
}

pub fn compute(cfg: &RunConfig) -> Result<PressureRecord, CliError> {
    let g = cfg.graph()?;
    let w: Vec<f64> = match &cfg.weights {
        Some(p) => read_json(p)?,
        None => vec![0.0; g.edges().len()],
    };
    if let Some(i) = w.iter().position(|x| !x.is_finite()) {
        return Err(CliError::input(format!("weight {i} is not finite")));
    }
    let r = pressure_edge_weighted(&g, &w)?;
    if !(r.pressure.is_finite() && r.perron_root.is_finite()) {
        return Err(CliError::numeric("pressure is not finite"));
    }
    Ok(PressureRecord {
        pressure: r.pressure,
        perron_root: r.perron_root,
        residual: r.residual,
        iterations: r.iterations,
        edges: g.edges().len(),
        recurrent_edges: g.recurrent_edges().len(),
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome::ok(render(&compute(cfg)?, cfg.format(Format::Json))?))
}
