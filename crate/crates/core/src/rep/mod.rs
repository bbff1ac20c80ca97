//! Representations of free groups into `SL(2)` / `SL(3)` given on generators, with
//! length functions, generator potentials and separation certificates.

mod exponents;

pub use exponents::{
    approximating_exponents, brute_force_exponent, busemann_depth_k_exponent, exponent_bounds, limit_cone_deviation,
    periodic_exponent, thurston_estimate, BruteForce, ExponentReport, ThurstonEstimate, BRUTE_FORCE_BUDGET,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{GraphError, GroupWord, LabeledGraph, Letter};
use crate::pressure::PressureError;
use crate::prox::{
    cartan_of, jordan_of, point_hyperplane_distance, proximal_data, theta_windows, GroupMatrix, ProxError,
    ProximalData, SeparationWindow, SquareMatrix, GAP_TOL,
};
use crate::weyl::{Functional, WeylError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("unknown generator `{0}`")]
    UnknownSymbol(String),
    #[error("representation has dimension {rep}, functional has dimension {phi}")]
    DimensionMismatch { rep: usize, phi: usize },
    #[error("generator `{0}` has the wrong size")]
    GeneratorShape(String),
    #[error("representation has no generators")]
    Empty,
    #[error("phi is not positive on generator `{label}`: weight {value}")]
    NonPositiveWeight { label: String, value: f64 },
    #[error("phi is not positive on `{word}`: length {value}")]
    NonPositiveLength { word: String, value: f64 },
    #[error("no closed paths of length {0}")]
    NoCycles(usize),
    #[error("graph has no start vertex")]
    NoStart,
    #[error("enumeration needs more than {0} elements")]
    Budget(usize),
    #[error("too few elements below the threshold to fit a slope")]
    TooFewElements,
    #[error("singular values of `{0}` are not separated")]
    DegenerateGap(String),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error(transparent)]
    Pressure(#[from] PressureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// `{"n": 3, "generators": {"a": [[...], ...], ...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub n: usize,
    pub generators: BTreeMap<String, Vec<Vec<f64>>>,
}

/// A homomorphism from a free group, fixed by matrices on generator symbols.
///
/// Generators are stored normalized to determinant one together with their inverses.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    n: usize,
    raw: BTreeMap<String, SquareMatrix>,
    gens: BTreeMap<String, GroupMatrix>,
}

impl Representation {
    pub fn new(n: usize, generators: BTreeMap<String, SquareMatrix>) -> Result<Self, RepError> {
        if !(2..=3).contains(&n) {
            return Err(ProxError::Dimension(n).into());
        }
        if generators.is_empty() {
            return Err(RepError::Empty);
        }
        let mut gens = BTreeMap::new();
        for (s, m) in &generators {
            if m.dim() != n {
                return Err(RepError::GeneratorShape(s.clone()));
            }
            gens.insert(s.clone(), GroupMatrix::from_matrix(m)?);
        }
        Ok(Self {
            n,
            raw: generators,
            gens,
        })
    }

    /// Generators given together with separately computed inverses.
    pub fn from_pairs(n: usize, generators: BTreeMap<String, (SquareMatrix, SquareMatrix)>) -> Result<Self, RepError> {
        let mut out = Self::new(n, generators.iter().map(|(s, (m, _))| (s.clone(), *m)).collect())?;
        for (s, (m, inv)) in &generators {
            out.gens.insert(s.clone(), GroupMatrix::from_pair(m, inv)?);
        }
        Ok(out)
    }

    pub fn from_json(j: &RepresentationJson) -> Result<Self, RepError> {
        let mut gens = BTreeMap::new();
        for (s, rows) in &j.generators {
            let m = SquareMatrix::from_rows(rows)?;
            if m.dim() != j.n {
                return Err(RepError::GeneratorShape(s.clone()));
            }
            gens.insert(s.clone(), m);
        }
        Self::new(j.n, gens)
    }

    pub fn to_json(&self) -> RepresentationJson {
        RepresentationJson {
            n: self.n,
            generators: self.raw.iter().map(|(s, m)| (s.clone(), m.rows())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.gens.keys().map(String::as_str)
    }

    /// The generator matrix as given (not normalized).
    pub fn generator(&self, symbol: &str) -> Option<&SquareMatrix> {
        self.raw.get(symbol)
    }

    /// Adds the graph's alias symbols and checks that every label of `g` is covered.
    pub fn for_graph(&self, g: &LabeledGraph) -> Result<Self, RepError> {
        let mut out = self.clone();
        for (name, word) in g.aliases() {
            if !out.gens.contains_key(name) {
                let m = self.evaluate_group(word)?;
                out.gens.insert(name.clone(), m);
                out.raw.insert(name.clone(), m.to_matrix());
            }
        }
        if let Some(s) = g.symbols().into_iter().find(|s| !out.gens.contains_key(s)) {
            return Err(RepError::UnknownSymbol(s));
        }
        Ok(out)
    }

    /// `h rho h^{-1}`.
    pub fn conjugate(&self, h: &SquareMatrix) -> Result<Self, RepError> {
        let hi = h.inverse()?;
        let gens = self.raw.iter().map(|(s, m)| (s.clone(), (h * m) * hi)).collect();
        Self::new(self.n, gens)
    }

    pub fn letter(&self, l: &Letter) -> Result<GroupMatrix, RepError> {
        let g = self
            .gens
            .get(&l.symbol)
            .ok_or_else(|| RepError::UnknownSymbol(l.symbol.clone()))?;
        Ok(if l.inverse { g.inverse() } else { *g })
    }

    /// `rho(l_1) rho(l_2) ... rho(l_k)` as a determinant-one element with its inverse.
    pub fn evaluate_group(&self, w: &GroupWord) -> Result<GroupMatrix, RepError> {
        w.letters()
            .iter()
            .try_fold(GroupMatrix::identity(self.n), |acc, l| Ok(acc.mul(&self.letter(l)?)))
    }

    pub fn evaluate(&self, w: &GroupWord) -> Result<SquareMatrix, RepError> {
        Ok(self.evaluate_group(w)?.to_matrix())
    }

    fn check_phi(&self, phi: &Functional) -> Result<(), RepError> {
        if phi.dim() != self.n {
            return Err(RepError::DimensionMismatch {
                rep: self.n,
                phi: phi.dim(),
            });
        }
        Ok(())
    }
}

/// `phi(lambda(rho(w)))`.
pub fn length_phi(rho: &Representation, phi: &Functional, w: &GroupWord) -> Result<f64, RepError> {
    rho.check_phi(phi)?;
    Ok(phi.eval(&jordan_of(&rho.evaluate_group(w)?)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Kappa,
    Lambda,
}

/// Edge weights `phi(kappa(rho(pi(e))^{-1}))` (or with `lambda`), indexed by edge id.
pub fn generator_weights(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    kind: WeightKind,
) -> Result<Vec<f64>, RepError> {
    rho.check_phi(phi)?;
    let rho = rho.for_graph(g)?;
    let mut cache: BTreeMap<&Letter, f64> = BTreeMap::new();
    let mut out = Vec::with_capacity(g.edges().len());
    for e in g.edges() {
        let w = match cache.get(&e.label) {
            Some(w) => *w,
            None => {
                let m = rho.letter(&e.label.inv())?;
                let v = match kind {
                    WeightKind::Kappa => cartan_of(&m)?,
                    WeightKind::Lambda => jordan_of(&m)?,
                };
                let w = phi.eval(&v);
                if !(w > 0.0) || !w.is_finite() {
                    return Err(RepError::NonPositiveWeight {
                        label: e.label.to_string(),
                        value: w,
                    });
                }
                cache.insert(&e.label, w);
                w
            }
        };
        out.push(w);
    }
    Ok(out)
}

/// Thresholds of one generator `rho(g^{-1})` in the standard and dual representations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorMargin {
    /// The edge label `g`; the matrix tested is `rho(g^{-1})`.
    pub label: String,
    /// Smallest `eps` accepted in both representations, `0.0` if none is.
    pub margin: f64,
    pub standard: SeparationWindow,
    pub dual: SeparationWindow,
}

/// Distance from the attractor of `rho(out^{-1})` to the repelling hyperplane of
/// `rho(inc^{-1})` for a transition `inc -> out` through `vertex`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairDistance {
    pub vertex: String,
    pub incoming: String,
    pub outgoing: String,
    pub standard: f64,
    pub dual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub epsilon: f64,
    pub passed: bool,
    pub failure: Option<String>,
    pub generator_margins: Vec<GeneratorMargin>,
    pub distances: Vec<PairDistance>,
    pub min_distance: f64,
    /// Interval `[lo, hi)` of `eps` values certified by the same data, if nonempty.
    pub certified_window: Option<(f64, f64)>,
}

impl SeparationCertificate {
    fn failed(epsilon: f64, reason: String) -> Self {
        Self {
            epsilon,
            passed: false,
            failure: Some(reason),
            generator_margins: Vec::new(),
            distances: Vec::new(),
            min_distance: 0.0,
            certified_window: None,
        }
    }
}

struct LabelData {
    windows: [SeparationWindow; 2],
    prox: [ProximalData; 2],
}

fn label_data(m: &GroupMatrix) -> Result<LabelData, ProxError> {
    let windows = theta_windows(m)?;
    let prox = [
        proximal_data(&m.fwd.mat, GAP_TOL)?,
        proximal_data(&m.dual().fwd.mat, GAP_TOL)?,
    ];
    Ok(LabelData { windows, prox })
}

/// Finite check of `eps`-strong separation along the coding `g`.
///
/// Passes iff every `rho(x^{-1})`, `x` an edge label, is `eps`-separated in both
/// fundamental representations, and for every transition `g -> g'` through a recurrent
/// vertex the attractor of `rho(g'^{-1})` lies at distance `>= 2 eps` from the repelling
/// hyperplane of `rho(g^{-1})`, again in both representations.
pub fn certify_separation(rho: &Representation, g: &LabeledGraph, eps: f64) -> Result<SeparationCertificate, RepError> {
    let rho = rho.for_graph(g)?;
    let labels: BTreeSet<&Letter> = g.edges().iter().map(|e| &e.label).collect();
    let mut data = BTreeMap::new();
    let mut margins = Vec::new();
    for l in labels {
        let m = rho.letter(&l.inv())?;
        let d = match label_data(&m) {
            Ok(d) => d,
            Err(e) => return Ok(SeparationCertificate::failed(eps, format!("generator {l}: {e}"))),
        };
        let [a, b] = d.windows;
        let lo = a.eps_min.max(b.eps_min);
        let hi = a.eps_max.min(b.eps_max);
        margins.push(GeneratorMargin {
            label: l.to_string(),
            margin: if lo < hi { lo } else { 0.0 },
            standard: a,
            dual: b,
        });
        data.insert(l, d);
    }

    let rec = g.recurrent_edges();
    let mut pairs = BTreeSet::new();
    for &i in &rec {
        for &o in &rec {
            let (ei, eo) = (g.edge(i), g.edge(o));
            if ei.target == eo.source {
                pairs.insert((ei.target, &ei.label, &eo.label));
            }
        }
    }
    let mut distances = Vec::with_capacity(pairs.len());
    let mut min_distance = f64::INFINITY;
    for (v, inc, out) in pairs {
        let (di, dout) = (&data[inc], &data[out]);
        let [s, d] = [0, 1].map(|k| point_hyperplane_distance(&dout.prox[k].attracting, &di.prox[k].repelling_normal));
        min_distance = min_distance.min(s).min(d);
        distances.push(PairDistance {
            vertex: g.vertices()[v].clone(),
            incoming: inc.to_string(),
            outgoing: out.to_string(),
            standard: s,
            dual: d,
        });
    }

    let lo = data
        .values()
        .flat_map(|d| d.windows)
        .fold(0.0_f64, |a, w| a.max(w.eps_min));
    let hi = data
        .values()
        .flat_map(|d| d.windows)
        .fold(min_distance / 2.0, |a, w| a.min(w.eps_max));
    let mut failure = None;
    for (m, d) in margins.iter().zip(data.values()) {
        if !d.windows.iter().all(|w| w.contains(eps)) {
            failure = Some(format!(
                "generator {} not {eps}-separated (windows [{}, {}) and [{}, {}))",
                m.label, m.standard.eps_min, m.standard.eps_max, m.dual.eps_min, m.dual.eps_max
            ));
            break;
        }
    }
    if failure.is_none() && min_distance < 2.0 * eps {
        let worst = distances
            .iter()
            .min_by(|a, b| a.standard.min(a.dual).total_cmp(&b.standard.min(b.dual)))
            .expect("nonempty");
        failure = Some(format!(
            "transition {} -> {} at {}: distance {} < 2 eps",
            worst.incoming,
            worst.outgoing,
            worst.vertex,
            worst.standard.min(worst.dual)
        ));
    }
    Ok(SeparationCertificate {
        epsilon: eps,
        passed: failure.is_none(),
        failure,
        generator_margins: margins,
        distances,
        min_distance,
        certified_window: (lo < hi).then_some((lo, hi)),
    })
}
