use anosov_core::automaton::builtin_f2_abc;
use anosov_core::pants::holonomy;
use anosov_core::rep::{thurston_estimate, ThurstonEstimate};

use crate::config::DEFAULT_MAX_LEN;
use crate::output::{render, Format};
use crate::{CliError, Outcome, RunConfig};

pub fn compute(cfg: &RunConfig) -> Result<ThurstonEstimate, CliError> {
    let p1 = cfg.pants_params()?;
    let p2 = cfg
        .compare
        .as_ref()
        .ok_or_else(|| CliError::input("no comparison parameters given"))?
        .resolve()?;
    let phi = cfg.functional(3)?;
    let est = thurston_estimate(
        &holonomy(&p1)?.rep,
        &holonomy(&p2)?.rep,
        &phi,
        &builtin_f2_abc(),
        cfg.max_len.unwrap_or(DEFAULT_MAX_LEN),
        cfg.depth(),
        cfg.block_budget(),
    )?;
    if !est.value.is_finite() {
        return Err(CliError::numeric("Thurston estimate is not finite"));
    }
    Ok(est)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome::ok(render(&compute(cfg)?, cfg.format(Format::Json))?))
}
