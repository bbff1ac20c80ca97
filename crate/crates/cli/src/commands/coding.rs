use anosov_core::automaton::validate_strong_markov;

use crate::config::DEFAULT_CODING_DEPTH;
use crate::output::{render, Format};
use crate::{CliError, Outcome, RunConfig};

/// Prints the validation report; exits 2 when the graph is not a strong Markov coding.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let g = cfg.graph()?;
    let report = validate_strong_markov(&g, cfg.depth.unwrap_or(DEFAULT_CODING_DEPTH));
    Ok(Outcome {
        text: render(&report, cfg.format(Format::Json))?,
        code: if report.passed { 0 } else { 2 },
    })
}
