use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::ProxError;

/// Vector of length `n <= 3` stored inline.
pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize(a: &Vec3) -> Option<Vec3> {
    let s = norm(a);
    if s > 0.0 && s.is_finite() {
        Some([a[0] / s, a[1] / s, a[2] / s])
    } else {
        None
    }
}

/// Dense `n x n` real matrix with `n` in {2, 3}.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    n: usize,
    a: [[f64; 3]; 3],
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ProxError> {
        let n = rows.len();
        if !(2..=3).contains(&n) {
            return Err(ProxError::Dimension(n));
        }
        let mut a = [[0.0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ProxError::NotSquare);
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(ProxError::NonFinite);
            }
            a[i][..n].copy_from_slice(row);
        }
        Ok(Self { n, a })
    }

    pub fn new3(a: [[f64; 3]; 3]) -> Self {
        Self { n: 3, a }
    }

    pub fn new2(a: [[f64; 2]; 2]) -> Self {
        let mut m = [[0.0; 3]; 3];
        m[0][..2].copy_from_slice(&a[0]);
        m[1][..2].copy_from_slice(&a[1]);
        Self { n: 2, a: m }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }
        Self { n, a }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::identity(d.len());
        for (i, v) in d.iter().enumerate() {
            m.a[i][i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.a[i][..self.n].to_vec()).collect()
    }

    pub(crate) fn row(&self, i: usize) -> Vec3 {
        self.a[i]
    }

    pub fn transpose(&self) -> Self {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.a[j][i];
            }
        }
        Self { n: self.n, a }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut a = self.a;
        a.iter_mut().flatten().for_each(|v| *v *= s);
        Self { n: self.n, a }
    }

    pub fn sub_identity(&self, s: f64) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            m.a[i][i] -= s;
        }
        m
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = dot(&self.a[i], v);
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    pub fn det(&self) -> f64 {
        let a = &self.a;
        match self.n {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => dot(&a[0], &cross(&a[1], &a[2])),
        }
    }

    /// Classical adjugate, so that `M * adj(M) = det(M) I`.
    pub fn adjugate(&self) -> Self {
        let a = &self.a;
        match self.n {
            2 => Self::new2([[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]),
            _ => {
                let c0 = cross(&a[1], &a[2]);
                let c1 = cross(&a[2], &a[0]);
                let c2 = cross(&a[0], &a[1]);
                // columns of the adjugate are the cofactor cross products
                Self::new3([[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]])
            }
        }
    }

    pub fn inverse(&self) -> Result<Self, ProxError> {
        let d = self.det();
        let scale = self.max_abs().powi(self.n as i32);
        if d == 0.0 || !d.is_finite() || d.abs() <= 1e-300 * scale.max(1e-300) {
            return Err(ProxError::Singular);
        }
        Ok(self.adjugate().scale(1.0 / d))
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().flatten().all(|v| v.is_finite())
    }

    /// `M / |det M|^(1/n)`, the representative of determinant +-1.
    pub fn sl_normalized(&self) -> Result<Self, ProxError> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(ProxError::Singular);
        }
        Ok(self.scale(1.0 / d.abs().powf(1.0 / self.n as f64)))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.a
            .iter()
            .flatten()
            .zip(other.a.iter().flatten())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    pub(crate) fn raw(&self) -> &[[f64; 3]; 3] {
        &self.a
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    #[allow(clippy::op_ref)]
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.a[i][0] * rhs.a[0][j] + self.a[i][1] * rhs.a[1][j] + self.a[i][2] * rhs.a[2][j];
            }
        }
        SquareMatrix { n: self.n, a }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = ProxError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(&rows)
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        m.rows()
    }
}

/// The matrix `exp(log_scale) * mat`, used to multiply long words without overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledMatrix {
    pub mat: SquareMatrix,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(m: SquareMatrix) -> Self {
        let mut s = Self { mat: m, log_scale: 0.0 };
        s.renormalize();
        s
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: SquareMatrix::identity(n),
            log_scale: 0.0,
        }
    }

    fn renormalize(&mut self) {
        let m = self.mat.max_abs();
        if m > 0.0 && m.is_finite() {
            self.mat = self.mat.scale(1.0 / m);
            self.log_scale += m.ln();
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self {
            mat: self.mat * rhs.mat,
            log_scale: self.log_scale + rhs.log_scale,
        };
        out.renormalize();
        out
    }

    /// The product `exp(log_scale) * mat` as a plain matrix; may overflow.
    pub fn to_matrix(&self) -> SquareMatrix {
        self.mat.scale(self.log_scale.exp())
    }
}

/// Product `ms[0] * ms[1] * ... * ms[k-1]` of `n x n` matrices with a separate
/// log-scale factor. The empty product is the identity.
pub fn scaled_product(n: usize, ms: &[SquareMatrix]) -> Result<ScaledMatrix, ProxError> {
    let mut acc = ScaledMatrix::identity(n);
    for m in ms {
        if m.dim() != n {
            return Err(ProxError::Dimension(m.dim()));
        }
        acc = acc.mul(&ScaledMatrix::new(*m));
    }
    Ok(acc)
}

/// An element of `SL(n)` carried together with its inverse.
///
/// Keeping the inverse as its own product avoids reading small singular values or
/// small eigenvalues off an ill-conditioned forward product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupMatrix {
    pub fwd: ScaledMatrix,
    pub inv: ScaledMatrix,
}

impl GroupMatrix {
    /// Normalizes `m` to determinant one and inverts it.
    pub fn from_matrix(m: &SquareMatrix) -> Result<Self, ProxError> {
        let m = sl_positive(m)?;
        let inv = m.inverse()?;
        Ok(Self {
            fwd: ScaledMatrix::new(m),
            inv: ScaledMatrix::new(inv),
        })
    }

    /// Pairs `m` with a separately computed inverse; both are normalized to determinant one.
    pub fn from_pair(m: &SquareMatrix, inv: &SquareMatrix) -> Result<Self, ProxError> {
        Ok(Self {
            fwd: ScaledMatrix::new(sl_positive(m)?),
            inv: ScaledMatrix::new(sl_positive(inv)?),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            fwd: ScaledMatrix::identity(n),
            inv: ScaledMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.fwd.mat.dim()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            fwd: self.fwd.mul(&rhs.fwd),
            inv: rhs.inv.mul(&self.inv),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            fwd: self.inv,
            inv: self.fwd,
        }
    }

    /// `M -> M^{-T}`.
    pub fn dual(&self) -> Self {
        Self {
            fwd: ScaledMatrix {
                mat: self.inv.mat.transpose(),
                log_scale: self.inv.log_scale,
            },
            inv: ScaledMatrix {
                mat: self.fwd.mat.transpose(),
                log_scale: self.fwd.log_scale,
            },
        }
    }

    pub fn to_matrix(&self) -> SquareMatrix {
        self.fwd.to_matrix()
    }
}

/// Determinant-one representative. Negative determinants are accepted only for odd `n`.
fn sl_positive(m: &SquareMatrix) -> Result<SquareMatrix, ProxError> {
    let d = m.det();
    if d == 0.0 || !d.is_finite() {
        return Err(ProxError::Singular);
    }
    if d < 0.0 && m.dim().is_multiple_of(2) {
        return Err(ProxError::NegativeDeterminant);
    }
    Ok(m.scale(1.0 / d.signum() / d.abs().powf(1.0 / m.dim() as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SquareMatrix {
        SquareMatrix::new3([[2.0, 1.0, 0.5], [0.0, 1.5, -1.0], [1.0, 0.25, 3.0]])
    }

    #[test]
    fn adjugate_inverts() {
        let m = sample();
        let p = m * m.inverse().unwrap();
        assert!(p.max_diff(&SquareMatrix::identity(3)) < 1e-14);
        let m2 = SquareMatrix::new2([[3.0, 1.0], [2.0, 4.0]]);
        let p2 = m2.inverse().unwrap() * m2;
        assert!(p2.max_diff(&SquareMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = SquareMatrix::new3([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]);
        assert!(matches!(m.inverse(), Err(ProxError::Singular)));
        assert!(SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn scaled_product_survives_overflow() {
        let d = SquareMatrix::diag(&[1e100, 1.0, 1e-100]);
        let ms = vec![d; 10];
        let p = scaled_product(3, &ms).unwrap();
        assert!((p.log_scale - 1000.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(p.mat.get(0, 0), 1.0);
        let e = scaled_product(3, &[]).unwrap();
        assert_eq!(e, ScaledMatrix::identity(3));
        assert!(scaled_product(2, &ms).is_err());
    }

    #[test]
    fn sl_normalization() {
        let g = GroupMatrix::from_matrix(&sample().scale(7.0)).unwrap();
        assert!((g.to_matrix().det() - 1.0).abs() < 1e-12);
        let id = g.mul(&g.inverse());
        assert!(id.to_matrix().max_diff(&SquareMatrix::identity(3)) < 1e-13);
        let neg = SquareMatrix::new2([[0.0, 1.0], [1.0, 0.0]]);
        assert!(matches!(
            GroupMatrix::from_matrix(&neg),
            Err(ProxError::NegativeDeterminant)
        ));
    }

    #[test]
    fn serde_round_trip() {
        let m = sample();
        let s = serde_json::to_string(&m).unwrap();
        let back: SquareMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
