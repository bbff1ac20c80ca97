//! Singular values, Jordan projections, proximality and flag geometry for `SL(n)`,
//! `n` in {2, 3}.

mod eigen;
mod matrix;

pub use eigen::{
    eigenvalues, eigenvector, singular_values, svd, symmetric_eigen, top_left_singular_vector, Eigenvalue, Svd,
};
pub use matrix::{scaled_product, GroupMatrix, ScaledMatrix, SquareMatrix, Vec3};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weyl::CartanVector;
use matrix::{cross, dot, normalize};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProxError {
    #[error("matrix dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error("matrix rows have inconsistent lengths")]
    NotSquare,
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is singular")]
    Singular,
    #[error("determinant is negative for even dimension")]
    NegativeDeterminant,
    #[error("flag is not incident: |<p, n>| = {0:e}")]
    NonIncidentFlag(f64),
    #[error("not proximal: |lambda_1| / |lambda_2| = {ratio:.6} does not exceed 1 + {gap_tol:e}")]
    NotProximal { ratio: f64, gap_tol: f64 },
    #[error("top eigenvalue is not real")]
    ComplexTop,
    #[error("degenerate eigenvector computation")]
    Degenerate,
}

/// Default relative spectral gap required by [`proximal_data`].
pub const GAP_TOL: f64 = 1e-6;

/// Log singular values of `M / |det M|^(1/n)`, non-increasing.
pub fn cartan_projection(m: &SquareMatrix) -> Result<CartanVector, ProxError> {
    cartan_of(&GroupMatrix::from_matrix(m)?)
}

/// Log moduli of eigenvalues of `M / |det M|^(1/n)`, non-increasing.
pub fn jordan_projection(m: &SquareMatrix) -> Result<CartanVector, ProxError> {
    jordan_of(&GroupMatrix::from_matrix(m)?)
}

fn from_extremes(n: usize, top: f64, bottom: f64) -> CartanVector {
    let x = match n {
        2 => {
            let a = 0.5 * (top - bottom);
            [a, -a, 0.0]
        }
        _ => [top, -top - bottom, bottom],
    };
    CartanVector::from_raw(n, x)
}

/// Cartan projection of a determinant-one element carried with its inverse.
///
/// The top entry comes from `sigma_1(M)`, the bottom from `sigma_1(M^{-1})`; the
/// middle entry (n = 3) is fixed by the trace condition.
pub fn cartan_of(g: &GroupMatrix) -> Result<CartanVector, ProxError> {
    let top = singular_values(&g.fwd.mat)[0].ln() + g.fwd.log_scale;
    let bottom = -(singular_values(&g.inv.mat)[0].ln() + g.inv.log_scale);
    let v = from_extremes(g.dim(), top, bottom);
    if !v.is_finite() {
        return Err(ProxError::NonFinite);
    }
    Ok(sort_desc(v))
}

/// Jordan projection of a determinant-one element carried with its inverse.
pub fn jordan_of(g: &GroupMatrix) -> Result<CartanVector, ProxError> {
    let top = eigenvalues(&g.fwd.mat)?[0].modulus().ln() + g.fwd.log_scale;
    let bottom = -(eigenvalues(&g.inv.mat)?[0].modulus().ln() + g.inv.log_scale);
    let v = from_extremes(g.dim(), top, bottom);
    if !v.is_finite() {
        return Err(ProxError::NonFinite);
    }
    Ok(sort_desc(v))
}

fn sort_desc(v: CartanVector) -> CartanVector {
    let mut x = [0.0; 3];
    let n = v.dim();
    x[..n].copy_from_slice(v.entries());
    x[..n].sort_by(|a, b| b.total_cmp(a));
    CartanVector::from_raw(n, x)
}

/// Attracting point, repelling hyperplane and contraction data of a proximal matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProximalData {
    /// Top eigenvalue (real, simple).
    pub lambda1: f64,
    /// Unit eigenvector for `lambda1`.
    pub attracting: Vec3,
    /// Unit normal of the invariant complementary hyperplane.
    pub repelling_normal: Vec3,
    /// Operator norm of `M` restricted to the repelling hyperplane.
    pub restricted_norm: f64,
    /// `|lambda1| / |lambda2|`.
    pub gap: f64,
}

/// Proximal data of `m`, or [`ProxError::NotProximal`] when `|lambda_1| <= (1 + gap_tol) |lambda_2|`.
pub fn proximal_data(m: &SquareMatrix, gap_tol: f64) -> Result<ProximalData, ProxError> {
    let ev = eigenvalues(m)?;
    let ratio = ev[0].modulus() / ev[1].modulus();
    if !(ratio > 1.0 + gap_tol) {
        return Err(ProxError::NotProximal { ratio, gap_tol });
    }
    if !ev[0].is_real() {
        return Err(ProxError::ComplexTop);
    }
    let lambda1 = ev[0].re;
    let attracting = eigenvector(m, lambda1)?;
    let repelling_normal = eigenvector(&m.transpose(), lambda1)?;
    let restricted_norm = restricted_operator_norm(m, &repelling_normal);
    Ok(ProximalData {
        lambda1,
        attracting,
        repelling_normal,
        restricted_norm,
        gap: ratio,
    })
}

fn orthonormal_complement(n: usize, normal: &Vec3) -> Vec<Vec3> {
    match n {
        2 => vec![[-normal[1], normal[0], 0.0]],
        _ => {
            let pick = (0..3)
                .min_by(|&i, &j| normal[i].abs().total_cmp(&normal[j].abs()))
                .unwrap_or(0);
            let mut e = [0.0; 3];
            e[pick] = 1.0;
            let q1 = normalize(&cross(normal, &e)).unwrap_or([0.0; 3]);
            let q2 = cross(normal, &q1);
            vec![q1, q2]
        }
    }
}

/// `|| Q^T M Q ||_2` where `Q` spans the hyperplane orthogonal to `normal`.
fn restricted_operator_norm(m: &SquareMatrix, normal: &Vec3) -> f64 {
    let q = orthonormal_complement(m.dim(), normal);
    let mq: Vec<Vec3> = q.iter().map(|v| m.apply(v)).collect();
    match q.len() {
        1 => dot(&q[0], &mq[0]).abs(),
        _ => {
            let b = [
                [dot(&q[0], &mq[0]), dot(&q[0], &mq[1])],
                [dot(&q[1], &mq[0]), dot(&q[1], &mq[1])],
            ];
            svd(&SquareMatrix::new2(b)).sigma[0]
        }
    }
}

/// Fubini-Study distance `arccos |<p, q>|` between unit vectors in projective space.
pub fn proj_distance(p: &Vec3, q: &Vec3) -> f64 {
    matrix::norm(&cross(p, q)).atan2(dot(p, q).abs())
}

/// Distance `arcsin |<p, n>|` from a point to the hyperplane with unit normal `n`.
pub fn point_hyperplane_distance(p: &Vec3, normal: &Vec3) -> f64 {
    dot(p, normal).abs().min(1.0).asin()
}

/// Admissible window `[eps_min, eps_max)` for the contraction estimate: every `eps`
/// in the window satisfies `||M|g-|| / |lambda_1| <= sin^2 eps` and `d(g+, g-) > 2 eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWindow {
    pub eps_min: f64,
    pub eps_max: f64,
    pub ratio: f64,
    pub distance: f64,
}

impl SeparationWindow {
    pub fn is_empty(&self) -> bool {
        !(self.eps_min < self.eps_max)
    }

    pub fn contains(&self, eps: f64) -> bool {
        self.eps_min <= eps && eps < self.eps_max
    }
}

pub fn separation_window(d: &ProximalData) -> SeparationWindow {
    let ratio = d.restricted_norm / d.lambda1.abs();
    let eps_min = if ratio < 1.0 {
        ratio.sqrt().asin()
    } else {
        f64::INFINITY
    };
    let distance = point_hyperplane_distance(&d.attracting, &d.repelling_normal);
    SeparationWindow {
        eps_min,
        eps_max: distance / 2.0,
        ratio,
        distance,
    }
}

/// Smallest `eps` certified by the contraction estimate, or `0.0` if no `eps` is.
pub fn separation_margin(m: &SquareMatrix) -> Result<f64, ProxError> {
    let w = separation_window(&proximal_data(m, GAP_TOL)?);
    Ok(if w.is_empty() { 0.0 } else { w.eps_min })
}

/// `M -> M^{-T}`.
pub fn dual_rep(m: &SquareMatrix) -> Result<SquareMatrix, ProxError> {
    Ok(m.inverse()?.transpose())
}

/// Windows of `M` in the standard and dual representations.
pub fn theta_windows(g: &GroupMatrix) -> Result<[SeparationWindow; 2], ProxError> {
    let std = separation_window(&proximal_data(&g.fwd.mat, GAP_TOL)?);
    let dual = separation_window(&proximal_data(&g.dual().fwd.mat, GAP_TOL)?);
    Ok([std, dual])
}

/// Smallest `eps` certified in both the standard and dual representations, or `0.0`.
pub fn theta_loxodromic_margin_sl3(m: &SquareMatrix) -> Result<f64, ProxError> {
    let [a, b] = theta_windows(&GroupMatrix::from_matrix(m)?)?;
    let lo = a.eps_min.max(b.eps_min);
    let hi = a.eps_max.min(b.eps_max);
    Ok(if lo < hi { lo } else { 0.0 })
}

/// A flag in `R^n`: a line and a hyperplane containing it (trivial for n = 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub point: Vec3,
    pub plane_normal: Vec3,
}

/// Attracting flag of a loxodromic element: top eigenvector and the span of the top
/// two eigenvectors.
pub fn attracting_flag(g: &GroupMatrix) -> Result<Flag, ProxError> {
    let top = proximal_data(&g.fwd.mat, GAP_TOL)?;
    let n = g.dim();
    let plane_normal = if n == 2 {
        [-top.attracting[1], top.attracting[0], 0.0]
    } else {
        proximal_data(&g.dual().fwd.mat, GAP_TOL)?.attracting
    };
    Ok(Flag {
        point: top.attracting,
        plane_normal,
    })
}

/// Flag `(U_1, U_1 + U_2)` of left singular vectors of `g`.
pub fn top_singular_flag(g: &GroupMatrix) -> Flag {
    let point = top_left_singular_vector(&g.fwd.mat);
    let plane_normal = if g.dim() == 2 {
        [-point[1], point[0], 0.0]
    } else {
        top_left_singular_vector(&g.dual().fwd.mat)
    };
    Flag { point, plane_normal }
}

/// Iwasawa cocycle `sigma(g, F)`: `omega_1 = log |g p|`, `omega_1 + omega_2 = -log |g^{-T} n|`
/// up to the trace condition, for a determinant-one element.
pub fn iwasawa_of(g: &GroupMatrix, flag: &Flag) -> Result<CartanVector, ProxError> {
    let x = log_norm(&g.fwd, &flag.point);
    let v = match g.dim() {
        2 => [x, -x, 0.0],
        _ => {
            let dual = g.dual();
            let y = log_norm(&dual.fwd, &flag.plane_normal);
            [x, y - x, -y]
        }
    };
    let out = CartanVector::from_raw(g.dim(), v);
    if !out.is_finite() {
        return Err(ProxError::NonFinite);
    }
    Ok(out)
}

fn log_norm(s: &ScaledMatrix, v: &Vec3) -> f64 {
    matrix::norm(&s.mat.apply(v)).ln() + s.log_scale
}

/// Iwasawa cocycle of `M / det(M)^(1/3)` at a flag.
pub fn iwasawa_value_sl3(m: &SquareMatrix, flag: &Flag) -> Result<CartanVector, ProxError> {
    if m.dim() != 3 {
        return Err(ProxError::Dimension(m.dim()));
    }
    let defect = dot(&flag.point, &flag.plane_normal).abs();
    if defect > 1e-8 {
        return Err(ProxError::NonIncidentFlag(defect));
    }
    iwasawa_of(&GroupMatrix::from_matrix(m)?, flag)
}
