//! Closed-form and Jacobi kernels for `n <= 3`.

use super::matrix::{cross, dot, norm, normalize, SquareMatrix, Vec3};
use super::ProxError;

/// Eigenvalue of a real matrix, as a complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in non-increasing order and the matching unit eigenvectors.
pub fn symmetric_eigen(s: &SquareMatrix) -> (Vec<f64>, Vec<Vec3>) {
    let n = s.dim();
    let mut a = *s.raw();
    let mut v = *SquareMatrix::identity(n).raw();
    for _sweep in 0..64 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[i][i] * a[i][i];
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                for row in v.iter_mut().take(n) {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = idx
        .iter()
        .map(|&i| {
            let mut e = [0.0; 3];
            for (k, ek) in e.iter_mut().enumerate().take(n) {
                *ek = v[k][i];
            }
            e
        })
        .collect();
    (vals, vecs)
}

/// Singular value decomposition `M = U diag(sigma) V^T` by one-sided Jacobi on the
/// columns of `M`. Singular values are non-increasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Vec<Vec3>,
    pub v: Vec<Vec3>,
}

pub fn svd(m: &SquareMatrix) -> Svd {
    let n = m.dim();
    // columns of the working matrix
    let mut cols: Vec<Vec3> = (0..n)
        .map(|j| {
            let mut c = [0.0; 3];
            for (i, ci) in c.iter_mut().enumerate().take(n) {
                *ci = m.get(i, j);
            }
            c
        })
        .collect();
    let mut v: Vec<Vec3> = (0..n)
        .map(|j| {
            let mut c = [0.0; 3];
            c[j] = 1.0;
            c
        })
        .collect();
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..3 {
                    let xp = cols[p][k];
                    let xq = cols[q][k];
                    cols[p][k] = c * xp - s * xq;
                    cols[q][k] = s * xp + c * xq;
                    let vp = v[p][k];
                    let vq = v[q][k];
                    v[p][k] = c * vp - s * vq;
                    v[q][k] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(norm).collect();
    idx.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = idx.iter().map(|&i| norms[i]).collect();
    let mut u: Vec<Vec3> = idx.iter().map(|&i| normalize(&cols[i]).unwrap_or([0.0; 3])).collect();
    if n == 3 && sigma[2] == 0.0 {
        u[2] = normalize(&cross(&u[0], &u[1])).unwrap_or([0.0; 3]);
    }
    let v = idx.iter().map(|&i| v[i]).collect();
    Svd { sigma, u, v }
}

pub fn singular_values(m: &SquareMatrix) -> Vec<f64> {
    svd(m).sigma
}

/// Unit vector maximizing `|M^T x|`, the top left-singular vector.
pub fn top_left_singular_vector(m: &SquareMatrix) -> Vec3 {
    let (_, vecs) = symmetric_eigen(&(m * &m.transpose()));
    vecs[0]
}

fn char_poly(m: &SquareMatrix) -> [f64; 3] {
    let a = m.raw();
    match m.dim() {
        2 => [m.trace(), m.det(), 0.0],
        _ => {
            let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
                + a[1][1] * a[2][2]
                - a[1][2] * a[2][1];
            [m.trace(), minors, m.det()]
        }
    }
}

fn polish_cubic(c: &[f64; 3], mut x: f64) -> f64 {
    // p(x) = x^3 - c0 x^2 + c1 x - c2
    for _ in 0..4 {
        let p = ((x - c[0]) * x + c[1]) * x - c[2];
        let dp = (3.0 * x - 2.0 * c[0]) * x + c[1];
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        let pn = ((next - c[0]) * next + c[1]) * next - c[2];
        if pn.abs() > p.abs() {
            break;
        }
        x = next;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// All eigenvalues, sorted by non-increasing modulus.
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Eigenvalue>, ProxError> {
    if !m.is_finite() {
        return Err(ProxError::NonFinite);
    }
    let mut out = match m.dim() {
        2 => {
            let tr = m.trace();
            let det = m.det();
            let disc = tr * tr / 4.0 - det;
            if disc >= 0.0 {
                let r1 = tr / 2.0 + tr.signum() * disc.sqrt();
                let r1 = if tr == 0.0 { disc.sqrt() } else { r1 };
                let r2 = if r1 != 0.0 { det / r1 } else { -r1 };
                vec![Eigenvalue::real(r1), Eigenvalue::real(r2)]
            } else {
                let im = (-disc).sqrt();
                vec![Eigenvalue { re: tr / 2.0, im }, Eigenvalue { re: tr / 2.0, im: -im }]
            }
        }
        _ => cubic_roots(&char_poly(m)),
    };
    out.sort_by(|x, y| y.modulus().total_cmp(&x.modulus()));
    Ok(out)
}

fn cubic_roots(c: &[f64; 3]) -> Vec<Eigenvalue> {
    // x^3 + b x^2 + cc x + d
    let b = -c[0];
    let cc = c[1];
    let d = -c[2];
    let p = cc - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 - q.signum() * sq).cbrt();
        let u = if q == 0.0 { sq.cbrt() } else { u };
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let r = polish_cubic(c, u + v + shift);
        // deflate: x^2 - (c0 - r) x + c2 / r
        let s = c[0] - r;
        let prod = if r != 0.0 { c[2] / r } else { c[1] - r * s };
        let re = s / 2.0;
        let im2 = prod - re * re;
        if im2 > 0.0 {
            vec![
                Eigenvalue::real(r),
                Eigenvalue { re, im: im2.sqrt() },
                Eigenvalue { re, im: -im2.sqrt() },
            ]
        } else {
            let sq = (-im2).sqrt();
            vec![
                Eigenvalue::real(r),
                Eigenvalue::real(re + sq),
                Eigenvalue::real(re - sq),
            ]
        }
    } else {
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = if p == 0.0 {
            0.0
        } else {
            ((3.0 * q) / (p * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| {
                let y = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                Eigenvalue::real(polish_cubic(c, y + shift))
            })
            .collect()
    }
}

/// Unit vector spanning the kernel of `M - lambda I` for a simple real eigenvalue.
pub fn eigenvector(m: &SquareMatrix, lambda: f64) -> Result<Vec3, ProxError> {
    let s = m.sub_identity(lambda);
    match m.dim() {
        2 => {
            let r0 = [s.get(0, 0), s.get(0, 1)];
            let r1 = [s.get(1, 0), s.get(1, 1)];
            let r = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) {
                r0
            } else {
                r1
            };
            normalize(&[-r[1], r[0], 0.0]).ok_or(ProxError::Degenerate)
        }
        _ => {
            let rows = [s.row(0), s.row(1), s.row(2)];
            let candidates = [
                cross(&rows[0], &rows[1]),
                cross(&rows[1], &rows[2]),
                cross(&rows[2], &rows[0]),
            ];
            let best = candidates
                .iter()
                .max_by(|x, y| norm(x).total_cmp(&norm(y)))
                .copied()
                .unwrap_or([0.0; 3]);
            normalize(&best).ok_or(ProxError::Degenerate)
        }
    }
}
