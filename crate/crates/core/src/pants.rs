//! Fock-Goncharov coordinates on the pair of pants: holonomy, admissibility, boundary
//! Jordan projections and the transfer-matrix exponent of shear-diverging families.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::ABC_MATRIX;
use crate::pressure::{bisect_decreasing, row_weighted_perron, PressureError, S_TOL};
use crate::prox::{cartan_of, jordan_of, jordan_projection, ProxError, SquareMatrix};
use crate::rep::{RepError, Representation};
use crate::weyl::{CartanVector, Functional};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PantsError {
    #[error("parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("phi is not positive on {name}: {value}")]
    NonPositiveWeight { name: String, value: f64 },
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Pressure(#[from] PressureError),
}

fn positive(name: &'static str, value: f64) -> Result<f64, PantsError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(PantsError::NonPositive { name, value })
    }
}

/// Triple ratios `X_1, X_2` and edge cross ratios `Z_i, W_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FGParams {
    #[serde(rename = "X")]
    pub x: [f64; 2],
    #[serde(rename = "Z")]
    pub z: [f64; 3],
    #[serde(rename = "W")]
    pub w: [f64; 3],
}

impl FGParams {
    pub fn new(x: [f64; 2], z: [f64; 3], w: [f64; 3]) -> Result<Self, PantsError> {
        let p = Self { x, z, w };
        p.validate()?;
        Ok(p)
    }

    /// All parameters equal to one.
    pub fn unit() -> Self {
        Self {
            x: [1.0; 2],
            z: [1.0; 3],
            w: [1.0; 3],
        }
    }

    pub fn validate(&self) -> Result<(), PantsError> {
        for (name, v) in ["X1", "X2"].into_iter().zip(self.x) {
            positive(name, v)?;
        }
        for (name, v) in ["Z1", "Z2", "Z3"].into_iter().zip(self.z) {
            positive(name, v)?;
        }
        for (name, v) in ["W1", "W2", "W3"].into_iter().zip(self.w) {
            positive(name, v)?;
        }
        Ok(())
    }
}

pub fn t_matrix(x: f64) -> Result<SquareMatrix, PantsError> {
    let x = positive("X", x)?;
    Ok(SquareMatrix::new3([
        [0.0, 0.0, 1.0],
        [0.0, -1.0, -1.0],
        [x, 1.0 + x, 1.0],
    ]))
}

pub fn e_matrix(z: f64, w: f64) -> Result<SquareMatrix, PantsError> {
    let z = positive("Z", z)?;
    let w = positive("W", w)?;
    Ok(SquareMatrix::new3([
        [0.0, 0.0, 1.0 / z],
        [0.0, -1.0, 0.0],
        [w, 0.0, 0.0],
    ]))
}

/// `E(Z, W) T(X)`, upper triangular.
pub fn et_closed_form(z: f64, w: f64, x: f64) -> Result<SquareMatrix, PantsError> {
    let (z, w, x) = (positive("Z", z)?, positive("W", w)?, positive("X", x)?);
    Ok(SquareMatrix::new3([
        [x / z, (1.0 + x) / z, 1.0 / z],
        [0.0, 1.0, 1.0],
        [0.0, 0.0, w],
    ]))
}

/// Holonomy on the cuffs `a, b, c` (with `abc = 1`), built from the matrices
/// `rho(a^{-1})`, `rho(b^{-1})`, `rho(c^{-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PantsHolonomy {
    pub params: FGParams,
    pub a_inv: SquareMatrix,
    pub b_inv: SquareMatrix,
    pub c_inv: SquareMatrix,
    pub rep: Representation,
}

impl PantsHolonomy {
    /// `max |P - sI| / |s|` for `P = rho(c^{-1}) rho(b^{-1}) rho(a^{-1})`, `s = tr P / 3`.
    pub fn relation_defect(&self) -> f64 {
        let p = (self.c_inv * self.b_inv) * self.a_inv;
        let s = p.trace() / 3.0;
        p.max_diff(&SquareMatrix::identity(3).scale(s)) / s.abs()
    }

    /// The two upper-triangular factors `E(W3,Z3) T(X2)` and `E(Z2,W2) T(X1)` of `rho(a^{-1})`.
    pub fn a_inv_blocks(&self) -> Result<[SquareMatrix; 2], PantsError> {
        let p = &self.params;
        Ok([
            et_closed_form(p.w[2], p.z[2], p.x[1])?,
            et_closed_form(p.z[1], p.w[1], p.x[0])?,
        ])
    }
}

pub fn holonomy(p: &FGParams) -> Result<PantsHolonomy, PantsError> {
    p.validate()?;
    let [x1, x2] = p.x;
    let [z1, z2, z3] = p.z;
    let [w1, w2, w3] = p.w;
    let t1 = t_matrix(x1)?;
    let t1i = t1.inverse()?;
    let t2 = t_matrix(x2)?;
    let word = |e1: SquareMatrix, e2: SquareMatrix| ((e1 * t2) * e2) * t1;
    let a_inv = word(e_matrix(w3, z3)?, e_matrix(z2, w2)?);
    let b_inv = (t1 * word(e_matrix(w1, z1)?, e_matrix(z3, w3)?)) * t1i;
    let c_inv = (t1i * word(e_matrix(w2, z2)?, e_matrix(z1, w1)?)) * t1;
    let mut gens = BTreeMap::new();
    for (s, m) in [("a", a_inv), ("b", b_inv), ("c", c_inv)] {
        gens.insert(s.to_string(), (m.inverse()?, m));
    }
    let rep = Representation::from_pairs(3, gens)?;
    Ok(PantsHolonomy {
        params: *p,
        a_inv,
        b_inv,
        c_inv,
        rep,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub min_slack: f64,
    /// `log W_i + log Z_{i-1} - log X_1 + log X_2` for i = 1, 2, 3.
    pub x_slacks: [f64; 3],
    /// `log Z_i + log W_{i-1}` for i = 1, 2, 3.
    pub zw_slacks: [f64; 3],
}

pub fn is_admissible(p: &FGParams) -> Admissibility {
    let lx = p.x[1].ln() - p.x[0].ln();
    let x_slacks = [0, 1, 2].map(|i| p.w[i].ln() + p.z[(i + 2) % 3].ln() + lx);
    let zw_slacks = [0, 1, 2].map(|i| p.z[i].ln() + p.w[(i + 2) % 3].ln());
    let min_slack = x_slacks.iter().chain(&zw_slacks).copied().fold(f64::INFINITY, f64::min);
    Admissibility {
        admissible: min_slack > 0.0,
        min_slack,
        x_slacks,
        zw_slacks,
    }
}

/// Closed-form and numeric `(alpha_1, alpha_2)` of the Jordan projection of
/// `E(Z_k,W_k) T(X_k) ... E(Z_1,W_1) T(X_1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryJordan {
    /// Whether `prod Z_i^{-1} X_i < 1` and `prod W_i > 1`; the closed form is only
    /// claimed when this holds.
    pub hypothesis: bool,
    pub alpha1: f64,
    pub alpha2: f64,
    pub numeric_alpha1: f64,
    pub numeric_alpha2: f64,
}

/// `blocks[i] = (Z_{i+1}, W_{i+1}, X_{i+1})`; the first block is the rightmost factor.
pub fn boundary_jordan_closed_form(blocks: &[(f64, f64, f64)]) -> Result<BoundaryJordan, PantsError> {
    let mut g = SquareMatrix::identity(3);
    let (mut lz, mut lw, mut lx) = (0.0, 0.0, 0.0);
    for &(z, w, x) in blocks {
        g = et_closed_form(z, w, x)? * g;
        lz += z.ln();
        lw += w.ln();
        lx += x.ln();
    }
    let l = jordan_projection(&g)?;
    Ok(BoundaryJordan {
        hypothesis: lx - lz < 0.0 && lw > 0.0,
        alpha1: lw,
        alpha2: lz - lx,
        numeric_alpha1: l.get(0) - l.get(1),
        numeric_alpha2: l.get(1) - l.get(2),
    })
}

/// `v_i = log(W_i Z_{i-1}) omega_1 + log(Z_i W_{i-1}) omega_2`, `w_i` with the
/// coefficients swapped, as trace-zero vectors.
pub fn vw_vectors(p: &FGParams) -> ([CartanVector; 3], [CartanVector; 3]) {
    let d1 = |i: usize| (p.w[i] * p.z[(i + 2) % 3]).ln();
    let d2 = |i: usize| (p.z[i] * p.w[(i + 2) % 3]).ln();
    let v = [0, 1, 2].map(|i| CartanVector::from_weight_coords(d1(i), d2(i)));
    let w = [0, 1, 2].map(|i| CartanVector::from_weight_coords(d2(i), d1(i)));
    (v, w)
}

/// Row weights `(phi(w_1), phi(w_2), phi(w_3), phi(v_1), phi(v_2), phi(v_3))` in the
/// vertex order `a, b, c, a', b', c'`.
pub fn transfer_weights(p: &FGParams, phi: &Functional) -> Result<[f64; 6], PantsError> {
    let (v, w) = vw_vectors(p);
    let names = ["w1", "w2", "w3", "v1", "v2", "v3"];
    let mut out = [0.0; 6];
    for (k, vec) in w.iter().chain(&v).enumerate() {
        let x = phi.eval(vec);
        if !(x > 0.0) || !x.is_finite() {
            return Err(PantsError::NonPositiveWeight {
                name: names[k].to_string(),
                value: x,
            });
        }
        out[k] = x;
    }
    Ok(out)
}

/// The `s` at which the row-weighted transfer matrix `L_s` has Perron root one.
pub fn transfer_root_from_weights(r: &[f64; 6]) -> Result<f64, PantsError> {
    if let Some(k) = r.iter().position(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(PantsError::NonPositiveWeight {
            name: format!("row {k}"),
            value: r[k],
        });
    }
    Ok(bisect_decreasing(
        |s| {
            let logs = r.map(|x| -s * x);
            row_weighted_perron(&ABC_MATRIX, &logs).map(|p| p.root.ln())
        },
        S_TOL,
        PressureError::Bracket,
    )?)
}

pub fn sl3_transfer_root(p: &FGParams, phi: &Functional) -> Result<f64, PantsError> {
    transfer_root_from_weights(&transfer_weights(p, phi)?)
}

/// `prod(1 - e^{-s phi(v_i)}) + prod(1 - e^{-s phi(w_i)}) + sum e^{-s phi(v_i + w_i)} - 1`.
pub fn scalar_residual_from_weights(s: f64, r: &[f64; 6]) -> f64 {
    let (w, v) = r.split_at(3);
    let pv: f64 = v.iter().map(|x| -(-s * x).exp_m1()).product();
    let pw: f64 = w.iter().map(|x| -(-s * x).exp_m1()).product();
    let mix: f64 = v.iter().zip(w).map(|(a, b)| (-s * (a + b)).exp()).sum();
    pv + pw + mix - 1.0
}

pub fn sl3_scalar_residual(s: f64, p: &FGParams, phi: &Functional) -> Result<f64, PantsError> {
    Ok(scalar_residual_from_weights(s, &transfer_weights(p, phi)?))
}

/// `Z_i e^t`, `W_i e^t`, `X` fixed.
pub fn shear_family(t: f64, base: &FGParams) -> FGParams {
    let e = t.exp();
    FGParams {
        x: base.x,
        z: base.z.map(|z| z * e),
        w: base.w.map(|w| w * e),
    }
}

/// Transfer-matrix weights compared with the generators of the holonomy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VwDiagnostic {
    /// Row weights in the order `a, b, c, a', b', c'`.
    pub transfer_weights: [f64; 6],
    /// `phi(kappa(rho(x)))` for `x` in `a, b, c, a', b', c'`.
    pub generator_kappa: [f64; 6],
    /// Largest relative difference between the two sorted weight lists.
    pub max_relative_gap: f64,
    /// For each generator, the nearest of `v1, v2, v3, w1, w2, w3` to `lambda(rho(x))`.
    pub best_match: [String; 6],
    /// Euclidean distance from `lambda(rho(x))` to its best match.
    pub match_distance: [f64; 6],
}

pub fn vw_diagnostic(p: &FGParams, phi: &Functional) -> Result<VwDiagnostic, PantsError> {
    let tw = transfer_weights(p, phi)?;
    let (v, w) = vw_vectors(p);
    let names = ["v1", "v2", "v3", "w1", "w2", "w3"];
    let h = holonomy(p)?;
    let mut kappa = [0.0; 6];
    let mut best_match: [String; 6] = Default::default();
    let mut match_distance = [0.0; 6];
    for (k, l) in crate::automaton::ABC_ORDER.iter().enumerate() {
        let m = h.rep.letter(&l.parse().expect("builtin label"))?;
        kappa[k] = phi.eval(&cartan_of(&m)?);
        let lam = jordan_of(&m)?;
        let (idx, d) = v
            .iter()
            .chain(&w)
            .map(|u| u.add(&lam.scale(-1.0)).norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("six candidates");
        best_match[k] = names[idx].to_string();
        match_distance[k] = d;
    }
    let mut a = tw;
    let mut b = kappa;
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let max_relative_gap = a
        .iter()
        .zip(&b)
        .map(|(x, y)| ((x - y) / y).abs())
        .fold(0.0_f64, f64::max);
    Ok(VwDiagnostic {
        transfer_weights: tw,
        generator_kappa: kappa,
        max_relative_gap,
        best_match,
        match_distance,
    })
}
