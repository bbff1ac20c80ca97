use anosov_core::automaton::builtin_f2_abc;
use anosov_core::pants::{holonomy, is_admissible, shear_family, sl3_transfer_root, FGParams};
use anosov_core::rep::{
    approximating_exponents, busemann_depth_k_exponent, certify_separation, periodic_exponent, thurston_estimate,
};
use anosov_core::weyl::Functional;
use rayon::prelude::*;
use serde::Serialize;

use super::brute_force_auto;
use crate::config::{DEFAULT_MAX_LEN, DEFAULT_PERIODIC_N};
use crate::output::{fmt_f64, to_json, write_csv, Format};
use crate::{CliError, Outcome, RunConfig};

pub const COLUMNS: [&str; 10] = [
    "t",
    "h_kappa",
    "h_lambda",
    "transfer_root",
    "periodic_n",
    "depth_k",
    "brute_force",
    "cert_epsilon",
    "thurston_vs_base",
    "error",
];

/// One grid point. A row with a nonempty `error` has no numeric columns except `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub h_kappa: Option<f64>,
    pub h_lambda: Option<f64>,
    pub transfer_root: Option<f64>,
    pub periodic_n: Option<f64>,
    pub depth_k: Option<f64>,
    pub brute_force: Option<f64>,
    pub cert_epsilon: Option<f64>,
    pub thurston_vs_base: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn values(&self) -> [Option<f64>; 8] {
        [
            self.h_kappa,
            self.h_lambda,
            self.transfer_root,
            self.periodic_n,
            self.depth_k,
            self.brute_force,
            self.cert_epsilon,
            self.thurston_vs_base,
        ]
    }

    fn cells(&self) -> Vec<String> {
        let mut out = vec![fmt_f64(self.t)];
        out.extend(self.values().iter().map(|v| v.map(fmt_f64).unwrap_or_default()));
        out.push(self.error.clone().unwrap_or_default());
        out
    }

    fn failed(t: f64, msg: String) -> Self {
        Self {
            t,
            h_kappa: None,
            h_lambda: None,
            transfer_root: None,
            periodic_n: None,
            depth_k: None,
            brute_force: None,
            cert_epsilon: None,
            thurston_vs_base: None,
            error: Some(msg),
        }
    }
}

struct Settings {
    base: FGParams,
    compare_x: Option<[f64; 2]>,
    phi: Functional,
    epsilon: f64,
    periodic_n: usize,
    depth: usize,
    max_len: usize,
    block_budget: usize,
    budget: Option<usize>,
    t_max: Option<f64>,
}

fn row(s: &Settings, t: f64) -> Result<SweepRow, CliError> {
    let g = builtin_f2_abc();
    let p = shear_family(t, &s.base);
    let rho = holonomy(&p)?.rep;
    let (h_kappa, h_lambda) = approximating_exponents(&rho, &s.phi, &g)?;
    let transfer_root = if is_admissible(&p).admissible {
        Some(sl3_transfer_root(&p, &s.phi)?)
    } else {
        None
    };
    let periodic_n = periodic_exponent(&rho, &s.phi, &g, s.periodic_n)?;
    let depth_k = busemann_depth_k_exponent(&rho, &s.phi, &g, s.depth, s.block_budget)?;
    let brute_force = match s.budget {
        Some(b) => Some(brute_force_auto(&rho, &s.phi, &g, h_kappa, s.t_max, b)?.slope),
        None => None,
    };
    let cert = certify_separation(&rho, &g, s.epsilon)?;
    let thurston_vs_base = match s.compare_x {
        Some(x) => {
            let q = shear_family(t, &FGParams { x, ..s.base });
            let rho2 = holonomy(&q)?.rep;
            Some(thurston_estimate(&rho, &rho2, &s.phi, &g, s.max_len, s.depth, s.block_budget)?.value)
        }
        None => None,
    };
    let r = SweepRow {
        t,
        h_kappa: Some(h_kappa),
        h_lambda: Some(h_lambda),
        transfer_root,
        periodic_n: Some(periodic_n),
        depth_k: Some(depth_k),
        brute_force,
        cert_epsilon: cert.certified_window.map(|w| w.0),
        thurston_vs_base,
        error: None,
    };
    if let Some(i) = r.values().iter().position(|v| v.is_some_and(|x| !x.is_finite())) {
        return Err(CliError::numeric(format!(
            "non-finite value in column {}",
            COLUMNS[i + 1]
        )));
    }
    Ok(r)
}

pub fn compute(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let grid = cfg.grid.unwrap_or_default();
    let ts = grid.points();
    if ts.is_empty() {
        return Err(CliError::input("sweep grid is empty"));
    }
    let base = match &cfg.params {
        Some(f) => {
            f.params.validate()?;
            f.params
        }
        None => FGParams::unit(),
    };
    if let Some(x) = cfg.compare_x {
        FGParams { x, ..base }.validate()?;
    }
    let s = Settings {
        base,
        compare_x: cfg.compare_x,
        phi: cfg.functional(3)?,
        epsilon: cfg.epsilon(),
        periodic_n: cfg.periodic_n.unwrap_or(DEFAULT_PERIODIC_N),
        depth: cfg.depth(),
        max_len: cfg.max_len.unwrap_or(DEFAULT_MAX_LEN),
        block_budget: cfg.block_budget(),
        budget: cfg.budget,
        t_max: cfg.t_max,
    };
    Ok(ts
        .par_iter()
        .map(|&t| row(&s, t).unwrap_or_else(|e| SweepRow::failed(t, e.to_string())))
        .collect())
}

pub fn render_rows(rows: &[SweepRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let header: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
            let cells: Vec<Vec<String>> = rows.iter().map(SweepRow::cells).collect();
            write_csv(&header, &cells)
        }
    }
}

/// Exits 0 when at least one row succeeds, 3 otherwise.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = compute(cfg)?;
    let code = if rows.iter().any(|r| r.error.is_none()) { 0 } else { 3 };
    Ok(Outcome {
        text: render_rows(&rows, cfg.format(Format::Csv))?,
        code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;

    #[test]
    fn failed_rows_keep_only_t_and_error() {
        let r = SweepRow::failed(1.5, "boom, twice".into());
        let text = render_rows(&[r], Format::Csv).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "1.5000000000000000e0,,,,,,,,,\"boom, twice\"");
    }

    #[test]
    fn rows_follow_grid_order() {
        let cfg = RunConfig {
            grid: Some(Grid {
                t0: 5.0,
                t1: 3.0,
                steps: 3,
            }),
            ..RunConfig::default()
        };
        let rows = compute(&cfg).unwrap();
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        assert_eq!(ts, [5.0, 4.0, 3.0]);
        assert!(rows.iter().all(|r| r.error.is_none() && r.thurston_vs_base.is_none()));
        assert!(rows.windows(2).all(|w| w[0].h_kappa < w[1].h_kappa));
    }
}
