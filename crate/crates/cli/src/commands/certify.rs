use anosov_core::prox::{proximal_data, singular_values, SquareMatrix, Vec3, GAP_TOL};
use anosov_core::rep::{certify_separation, GeneratorMargin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CertificateSummary;
use crate::config::DEFAULT_SAMPLES;
use crate::output::{render, Format};
use crate::{CliError, Outcome, RunConfig};

const REL_SLACK: f64 = 1e-12;
const MAX_REJECTIONS: usize = 10_000;

/// Sampled check of `sin^2(eps) ||M|| <= ||M v|| <= ||M||` for unit `v` at distance
/// at least `eps` from the repelling hyperplane of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub label: String,
    pub representation: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Smallest `||M v|| / ||M||` seen.
    pub min_ratio: f64,
    /// Largest `||M v|| / ||M||` seen.
    pub max_ratio: f64,
    pub sin2_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyRecord {
    pub certificate: CertificateSummary,
    pub generator_margins: Vec<GeneratorMargin>,
    pub seed: u64,
    pub audit: Vec<AuditEntry>,
    pub violations: usize,
}

fn norm(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec3 {
    loop {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(n) {
            *x = rng.gen_range(-1.0..1.0);
        }
        let r = norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return v.map(|x| x / r);
        }
    }
}

/// Audits `m` on `samples` directions outside the `eps`-neighborhood of its repelling hyperplane.
pub fn audit_matrix(
    m: &SquareMatrix,
    eps: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, f64, f64), CliError> {
    let m = m.scale(1.0 / m.max_abs());
    let pd = proximal_data(&m, GAP_TOL)?;
    let op = singular_values(&m)[0];
    let lower = eps.sin().powi(2);
    let (mut violations, mut lo, mut hi) = (0, f64::INFINITY, 0.0_f64);
    let mut accepted = 0;
    let mut tries = 0;
    while accepted < samples {
        tries += 1;
        if tries > samples * MAX_REJECTIONS {
            return Err(CliError::numeric("could not sample outside the repelling neighborhood"));
        }
        let v = unit_vector(rng, m.dim());
        let d = v.iter().zip(&pd.repelling_normal).map(|(a, b)| a * b).sum::<f64>();
        if d.abs().min(1.0).asin() < eps {
            continue;
        }
        accepted += 1;
        let r = norm(&m.apply(&v)) / op;
        lo = lo.min(r);
        hi = hi.max(r);
        if r < lower * (1.0 - REL_SLACK) || r > 1.0 + REL_SLACK {
            violations += 1;
        }
    }
    Ok((violations, lo, hi))
}

pub fn compute(cfg: &RunConfig) -> Result<CertifyRecord, CliError> {
    let rho = cfg.representation()?;
    let g = cfg.graph()?;
    let eps = cfg.epsilon();
    let seed = cfg.seed.unwrap_or(0);
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    let cert = certify_separation(&rho, &g, eps)?;
    let rho = rho.for_graph(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = Vec::new();
    for gm in &cert.generator_margins {
        let label = gm.label.parse().map_err(|e| CliError::input(format!("{e}")))?;
        let m = rho.letter(&anosov_core::Letter::inv(&label))?;
        for (name, window, mat) in [
            ("standard", gm.standard, m.to_matrix()),
            ("dual", gm.dual, m.dual().to_matrix()),
        ] {
            if !window.contains(eps) {
                continue;
            }
            let (violations, min_ratio, max_ratio) = audit_matrix(&mat, eps, samples, &mut rng)?;
            audit.push(AuditEntry {
                label: gm.label.clone(),
                representation: name,
                samples,
                violations,
                min_ratio,
                max_ratio,
                sin2_eps: eps.sin().powi(2),
            });
        }
    }
    Ok(CertifyRecord {
        certificate: CertificateSummary::from(&cert),
        generator_margins: cert.generator_margins.clone(),
        seed,
        violations: audit.iter().map(|a| a.violations).sum(),
        audit,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome::ok(render(&compute(cfg)?, cfg.format(Format::Json))?))
}
