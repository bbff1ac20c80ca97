//! Pressure of locally constant potentials through Perron roots of weighted
//! transition matrices, and the exponent equation `P(-s w) = 0`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::LabeledGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PressureError {
    #[error("matrix is reducible")]
    ReducibleMatrix,
    #[error("matrix is zero or empty")]
    ZeroMatrix,
    #[error("negative or non-finite entry at ({0}, {1})")]
    BadEntry(usize, usize),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("weight on edge {edge} (label `{label}`) is not positive: {value}")]
    NonPositiveWeight { edge: usize, label: String, value: f64 },
    #[error("no sign change found for the exponent equation after {0} doublings")]
    Bracket(usize),
    #[error("block graph needs {needed} nodes, budget is {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("weight map has {got} entries, graph has {expected} edges")]
    WeightLength { expected: usize, got: usize },
}

/// Default node budget of [`block_recoded_pressure`].
pub const BLOCK_BUDGET: usize = 200_000;

const MAX_ITER: usize = 200_000;
const ROOT_TOL: f64 = 1e-13;
pub const S_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 60;

/// Sparse non-negative square matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl WeightedMatrix {
    pub fn from_dense(a: &[Vec<f64>]) -> Result<Self, PressureError> {
        let n = a.len();
        let mut rows = vec![Vec::new(); n];
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() || j >= n {
                    return Err(PressureError::BadEntry(i, j));
                }
                if v > 0.0 {
                    rows[i].push((j, v));
                }
            }
        }
        Ok(Self { n, rows })
    }

    pub fn from_sparse(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self, PressureError> {
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                if !(v >= 0.0) || !v.is_finite() || j >= n {
                    return Err(PressureError::BadEntry(i, j));
                }
            }
        }
        Ok(Self { n, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn max_entry(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0_f64, |m, &(_, v)| m.max(v))
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, v)| v * u[j]).sum();
        }
    }

    fn reach(&self, adj: &[Vec<usize>]) -> bool {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    fn positive_pattern(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|e| e.1 > 0.0).map(|e| e.0).collect())
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let fwd = self.positive_pattern();
        let mut bwd = vec![Vec::new(); self.n];
        for (i, r) in fwd.iter().enumerate() {
            for &j in r {
                bwd[j].push(i);
            }
        }
        self.reach(&fwd) && self.reach(&bwd)
    }

    /// Period (gcd of cycle lengths) of an irreducible pattern.
    pub fn period(&self) -> usize {
        let adj = self.positive_pattern();
        let mut level = vec![usize::MAX; self.n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    let d = (level[v] + 1).abs_diff(level[w]);
                    g = gcd(g, d);
                }
            }
        }
        g.max(1)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Perron root with a positive eigenvector normalized to max entry 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronRoot {
    pub root: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Perron root of a non-negative irreducible matrix by power iteration from the
/// all-ones vector, stopped when the Collatz-Wielandt bounds
/// `min (Mu)_i / u_i <= rho <= max (Mu)_i / u_i` agree to `1e-13` relative.
/// Periodic matrices are iterated as `M + delta I` with `delta = 1e-3 * max entry`.
/// When the spectral gap is too small for plain iteration, small matrices switch to
/// Noda's shifted inverse iteration.
pub fn perron_root(m: &WeightedMatrix) -> Result<PerronRoot, PressureError> {
    let n = m.dim();
    let top = m.max_entry();
    if n == 0 || top == 0.0 {
        return Err(PressureError::ZeroMatrix);
    }
    if !m.is_irreducible() {
        return Err(PressureError::ReducibleMatrix);
    }
    let delta = if m.period() > 1 { 1e-3 * top } else { 0.0 };
    let mut it = Iteration {
        m,
        scale: 1.0 / top,
        delta_scaled: delta / top,
        w: vec![0.0; n],
    };
    let mut u = vec![1.0; n];
    let plain = if n <= DENSE_LIMIT { PLAIN_ITER } else { MAX_ITER };
    for k in 1..=plain {
        if let Some(root) = it.step(&mut u)? {
            return Ok(it.finish(root, u, k));
        }
    }
    if n > DENSE_LIMIT {
        return Err(PressureError::NoConvergence(MAX_ITER));
    }
    let a = it.dense();
    let mut x = u;
    for k in 1..=NODA_ITER {
        let (lo, hi) = cw_bounds(&a, &x);
        if hi - lo <= ROOT_TOL * hi {
            let root = (0.5 * (hi + lo) - it.delta_scaled) / it.scale;
            return Ok(it.finish(root, x, plain + k));
        }
        let sigma = hi * (1.0 + 4.0 * f64::EPSILON);
        let scaled: Vec<Vec<f64>> = a
            .iter()
            .zip(&x)
            .map(|(row, xi)| row.iter().zip(&x).map(|(v, xj)| v * xj / xi).collect())
            .collect();
        let Some(z) = solve_shifted(&scaled, sigma, &vec![1.0; x.len()]) else {
            break;
        };
        let mut y: Vec<f64> = z.iter().zip(&x).map(|(zi, xi)| zi * xi).collect();
        let ymax = y.iter().fold(0.0_f64, |m, &v| m.max(v));
        if !(ymax > 0.0) || !ymax.is_finite() {
            break;
        }
        y.iter_mut().for_each(|v| *v = (*v / ymax).max(f64::MIN_POSITIVE));
        x = y;
    }
    Err(PressureError::NoConvergence(plain + NODA_ITER))
}

fn cw_bounds(a: &[Vec<f64>], x: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for (row, xi) in a.iter().zip(x) {
        let r = row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() / xi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// Solves `(sigma I - a) y = b` by Gaussian elimination with partial pivoting.
fn solve_shifted(a: &[Vec<f64>], sigma: f64, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<f64> = row.iter().map(|v| -v).collect();
            r[i] += sigma;
            r.push(b[i]);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c] == 0.0 {
            return None;
        }
        m.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let mut y = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * y[k]).sum();
        y[r] = (m[r][n] - s) / m[r][r];
    }
    Some(y)
}

const DENSE_LIMIT: usize = 300;
const PLAIN_ITER: usize = 500;
const NODA_ITER: usize = 200;

struct Iteration<'a> {
    m: &'a WeightedMatrix,
    scale: f64,
    delta_scaled: f64,
    w: Vec<f64>,
}

impl Iteration<'_> {
    /// One multiplication by the rescaled, shifted matrix; returns the root estimate
    /// once the Collatz-Wielandt bounds agree.
    fn step(&mut self, u: &mut [f64]) -> Result<Option<f64>, PressureError> {
        self.m.apply(u, &mut self.w);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for (wi, ui) in self.w.iter_mut().zip(u.iter()) {
            *wi = *wi * self.scale + self.delta_scaled * ui;
            let r = *wi / ui;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let wmax = self.w.iter().fold(0.0_f64, |a, &b| a.max(b));
        if !(wmax > 0.0) || !wmax.is_finite() {
            return Err(PressureError::NoConvergence(0));
        }
        for (ui, wi) in u.iter_mut().zip(&self.w) {
            *ui = (wi / wmax).max(f64::MIN_POSITIVE);
        }
        Ok((hi - lo <= ROOT_TOL * hi).then(|| (0.5 * (hi + lo) - self.delta_scaled) / self.scale))
    }

    fn finish(&self, root: f64, u: Vec<f64>, iterations: usize) -> PerronRoot {
        let residual = residual(self.m, &u, root);
        PerronRoot {
            root,
            vector: u,
            iterations,
            residual,
        }
    }

    fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.m.dim();
        let mut d = vec![vec![0.0; n]; n];
        for (i, row) in self.m.rows.iter().enumerate() {
            for &(j, v) in row {
                d[i][j] += v * self.scale;
            }
            d[i][i] += self.delta_scaled;
        }
        d
    }
}

fn residual(m: &WeightedMatrix, u: &[f64], root: f64) -> f64 {
    let mut w = vec![0.0; u.len()];
    m.apply(u, &mut w);
    let num = w.iter().zip(u).fold(0.0_f64, |a, (x, y)| a.max((x - root * y).abs()));
    let den = u.iter().fold(0.0_f64, |a, &b| a.max(b));
    num / den / root.max(f64::MIN_POSITIVE)
}

/// `P`, the Perron root `e^P` and convergence data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureResult {
    pub pressure: f64,
    pub perron_root: f64,
    pub iterations: usize,
    /// `||A u - rho u||_inf / (rho ||u||_inf)`.
    pub residual: f64,
}

impl From<PerronRoot> for PressureResult {
    fn from(p: PerronRoot) -> Self {
        Self {
            pressure: p.root.ln(),
            perron_root: p.root,
            iterations: p.iterations,
            residual: p.residual,
        }
    }
}

/// Edge-shift matrix of the recurrent part with entry `e^{w(e) - shift}` at `(e, e')`
/// whenever `e'` follows `e`. Returns the matrix and the recurrent edge ids.
fn edge_shift(g: &LabeledGraph, w: &[f64], shift: f64) -> Result<(WeightedMatrix, Vec<usize>), PressureError> {
    if w.len() != g.edges().len() {
        return Err(PressureError::WeightLength {
            expected: g.edges().len(),
            got: w.len(),
        });
    }
    let rec = g.recurrent_edges();
    let mut pos = vec![usize::MAX; g.edges().len()];
    for (i, &e) in rec.iter().enumerate() {
        pos[e] = i;
    }
    let rows = rec
        .iter()
        .map(|&e| {
            let v = (w[e] - shift).exp();
            g.out_edges(g.edge(e).target)
                .iter()
                .filter(|&&f| pos[f] != usize::MAX)
                .map(|&f| (pos[f], v))
                .collect()
        })
        .collect();
    Ok((WeightedMatrix::from_sparse(rec.len(), rows)?, rec))
}

/// Pressure of the potential that takes value `w[e]` on edge `e`; `w` is indexed by
/// edge id and only its recurrent entries matter.
pub fn pressure_edge_weighted(g: &LabeledGraph, w: &[f64]) -> Result<PressureResult, PressureError> {
    // factor out the mean weight so exp() stays in range
    let rec = g.recurrent_edges();
    let shift = if rec.is_empty() {
        0.0
    } else {
        rec.iter().map(|&e| w.get(e).copied().unwrap_or(0.0)).sum::<f64>() / rec.len() as f64
    };
    let (m, _) = edge_shift(g, w, shift)?;
    let p = perron_root(&m)?;
    Ok(PressureResult {
        pressure: p.root.ln() + shift,
        perron_root: p.root * shift.exp(),
        iterations: p.iterations,
        residual: p.residual,
    })
}

/// Root `s >= 0` of a strictly decreasing function `f` with `f(0) >= 0`, by bisection
/// after doubling the upper end of the bracket until `f < 0`.
pub fn bisect_decreasing<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    tol: f64,
    on_bracket_failure: impl FnOnce(usize) -> E,
) -> Result<f64, E> {
    if f(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(on_bracket_failure(MAX_DOUBLINGS));
        }
    }
    while hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_positive(g: &LabeledGraph, w: &[f64]) -> Result<(), PressureError> {
    if w.len() != g.edges().len() {
        return Err(PressureError::WeightLength {
            expected: g.edges().len(),
            got: w.len(),
        });
    }
    for e in g.recurrent_edges() {
        if !(w[e] > 0.0) || !w[e].is_finite() {
            return Err(PressureError::NonPositiveWeight {
                edge: e,
                label: g.edge(e).label.to_string(),
                value: w[e],
            });
        }
    }
    Ok(())
}

/// The unique `s` with `P(-s w) = 0`.
pub fn solve_exponent(g: &LabeledGraph, w: &[f64]) -> Result<f64, PressureError> {
    check_positive(g, w)?;
    let neg: Vec<f64> = w.iter().map(|v| -v).collect();
    bisect_decreasing(
        |s| {
            let ws: Vec<f64> = neg.iter().map(|v| s * v).collect();
            pressure_edge_weighted(g, &ws).map(|p| p.pressure)
        },
        S_TOL,
        PressureError::Bracket,
    )
}

/// Admissible edge paths of length `k` in the recurrent part, and the one-step
/// overlap graph on them.
pub struct BlockGraph {
    pub blocks: Vec<Vec<usize>>,
    pub successors: Vec<Vec<usize>>,
}

pub fn block_graph(g: &LabeledGraph, k: usize, budget: usize) -> Result<BlockGraph, PressureError> {
    let rec = g.recurrent_edges();
    let mut is_rec = vec![false; g.edges().len()];
    for &e in &rec {
        is_rec[e] = true;
    }
    let next = |e: usize| g.out_edges(g.edge(e).target).iter().copied().filter(|&f| is_rec[f]);
    let mut blocks: Vec<Vec<usize>> = rec.iter().map(|&e| vec![e]).collect();
    for _ in 1..k.max(1) {
        let mut grown = Vec::new();
        for b in &blocks {
            for f in next(*b.last().expect("nonempty block")) {
                let mut c = b.clone();
                c.push(f);
                grown.push(c);
                if grown.len() > budget {
                    return Err(PressureError::Budget {
                        needed: grown.len(),
                        budget,
                    });
                }
            }
        }
        blocks = grown;
    }
    if blocks.len() > budget {
        return Err(PressureError::Budget {
            needed: blocks.len(),
            budget,
        });
    }
    let index: HashMap<&[usize], usize> = blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    let successors = blocks
        .iter()
        .map(|b| {
            let last = *b.last().expect("nonempty block");
            next(last)
                .filter_map(|f| {
                    let mut c = b[1..].to_vec();
                    c.push(f);
                    index.get(c.as_slice()).copied()
                })
                .collect()
        })
        .collect();
    Ok(BlockGraph { blocks, successors })
}

impl BlockGraph {
    /// Matrix with entry `e^{w_i - shift}` on every successor of block `i`.
    pub fn weighted(&self, w: &[f64], shift: f64) -> Result<WeightedMatrix, PressureError> {
        let rows = self
            .successors
            .iter()
            .zip(w)
            .map(|(succ, wi)| {
                let v = (wi - shift).exp();
                succ.iter().map(|&j| (j, v)).collect()
            })
            .collect();
        WeightedMatrix::from_sparse(self.blocks.len(), rows)
    }

    pub fn pressure(&self, w: &[f64]) -> Result<PressureResult, PressureError> {
        let shift = if w.is_empty() {
            0.0
        } else {
            w.iter().sum::<f64>() / w.len() as f64
        };
        let p = perron_root(&self.weighted(w, shift)?)?;
        Ok(PressureResult {
            pressure: p.root.ln() + shift,
            perron_root: p.root * shift.exp(),
            iterations: p.iterations,
            residual: p.residual,
        })
    }

    /// The unique `s` with `P(-s w) = 0` for a potential given per block.
    pub fn solve_exponent(&self, w: &[f64]) -> Result<f64, PressureError> {
        if let Some(i) = w.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(PressureError::NonPositiveWeight {
                edge: self.blocks[i][0],
                label: format!("block {i}"),
                value: w[i],
            });
        }
        bisect_decreasing(
            |s| {
                let ws: Vec<f64> = w.iter().map(|v| -s * v).collect();
                self.pressure(&ws).map(|p| p.pressure)
            },
            S_TOL,
            PressureError::Bracket,
        )
    }
}

/// Pressure of a potential constant on `k`-cylinders, `w` evaluated on each admissible
/// edge path of length `k`.
pub fn block_recoded_pressure(
    g: &LabeledGraph,
    k: usize,
    w: impl Fn(&[usize]) -> f64,
    budget: usize,
) -> Result<PressureResult, PressureError> {
    let bg = block_graph(g, k, budget)?;
    let weights: Vec<f64> = bg.blocks.iter().map(|b| w(b)).collect();
    bg.pressure(&weights)
}

/// Perron root of the 6x6 matrix `D A` with row weights `e^{-s r_i}` on the zero pattern
/// of `pattern`.
pub fn row_weighted_perron(pattern: &[[u8; 6]; 6], row_log_weights: &[f64; 6]) -> Result<PerronRoot, PressureError> {
    let dense: Vec<Vec<f64>> = pattern
        .iter()
        .zip(row_log_weights)
        .map(|(r, w)| r.iter().map(|&x| f64::from(x) * w.exp()).collect())
        .collect();
    perron_root(&WeightedMatrix::from_dense(&dense)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{builtin_f2_abc, builtin_f2_standard, Edge, ABC_MATRIX};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn abc_dense() -> Vec<Vec<f64>> {
        ABC_MATRIX
            .iter()
            .map(|r| r.iter().map(|&x| x as f64).collect())
            .collect()
    }

    fn full_shift(k: usize) -> LabeledGraph {
        let edges = (0..k)
            .map(|i| Edge {
                source: 0,
                target: 0,
                label: format!("g{i}").parse().unwrap(),
            })
            .collect();
        LabeledGraph::new(vec!["v".into()], Some(0), edges).unwrap()
    }

    #[test]
    fn perron_goldens() {
        let p = perron_root(&WeightedMatrix::from_dense(&abc_dense()).unwrap()).unwrap();
        assert_relative_eq!(p.root, 4.0, epsilon = 1e-12);
        assert!(p.residual < 1e-10);
        assert!(p.vector.iter().all(|&v| v > 0.0));
        let perm = WeightedMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(perm.period(), 2);
        assert_relative_eq!(perron_root(&perm).unwrap().root, 1.0, epsilon = 1e-12);
        let red = WeightedMatrix::from_dense(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(perron_root(&red), Err(PressureError::ReducibleMatrix));
        let zero = WeightedMatrix::from_dense(&[vec![0.0]]).unwrap();
        assert_eq!(perron_root(&zero), Err(PressureError::ZeroMatrix));
    }

    #[test]
    fn zero_potential_pressures() {
        let g = builtin_f2_abc();
        let p = pressure_edge_weighted(&g, &vec![0.0; g.edges().len()]).unwrap();
        assert_relative_eq!(p.pressure, 4f64.ln(), epsilon = 1e-12);
        let g = builtin_f2_standard();
        let p = pressure_edge_weighted(&g, &vec![0.0; g.edges().len()]).unwrap();
        assert_relative_eq!(p.pressure, 3f64.ln(), epsilon = 1e-12);
        let p = pressure_edge_weighted(&g, &vec![0.7; g.edges().len()]).unwrap();
        assert_relative_eq!(p.pressure, 3f64.ln() + 0.7, epsilon = 1e-12);
        let f = full_shift(5);
        assert_relative_eq!(
            pressure_edge_weighted(&f, &[0.0; 5]).unwrap().pressure,
            5f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn constant_weight_exponents() {
        for m in [0.5, 1.0, 10.0] {
            let g = builtin_f2_abc();
            let s = solve_exponent(&g, &vec![m; g.edges().len()]).unwrap();
            assert_relative_eq!(s, 2.0 * 2f64.ln() / m, max_relative = 1e-10);
            let g = builtin_f2_standard();
            let s = solve_exponent(&g, &vec![m; g.edges().len()]).unwrap();
            assert_relative_eq!(s, 3f64.ln() / m, max_relative = 1e-10);
        }
        let g = builtin_f2_abc();
        let mut w = vec![1.0; g.edges().len()];
        let last = w.len() - 1;
        w[last] = -1.0;
        assert!(matches!(
            solve_exponent(&g, &w),
            Err(PressureError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn full_shift_exponent_matches_scalar_equation() {
        // sum_i e^{-s m_i} = 1 on the full shift
        let m = [1.0, 2.0, 3.5];
        let s = solve_exponent(&full_shift(3), &m).unwrap();
        let total: f64 = m.iter().map(|x| (-s * x).exp()).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn block_recoding() {
        let g = builtin_f2_abc();
        let w: Vec<f64> = (0..g.edges().len()).map(|e| 0.1 * (e % 5) as f64).collect();
        let p1 = pressure_edge_weighted(&g, &w).unwrap().pressure;
        for k in 1..=3 {
            let pk = block_recoded_pressure(&g, k, |b| w[b[0]], BLOCK_BUDGET)
                .unwrap()
                .pressure;
            assert_relative_eq!(pk, p1, epsilon = 1e-10);
        }
        let (a, b) = (0.3, -0.8);
        let two = full_shift(2);
        let p = block_recoded_pressure(&two, 2, |c| if c[0] == c[1] { a } else { b }, BLOCK_BUDGET).unwrap();
        assert_relative_eq!(p.pressure, (a.exp() + b.exp()).ln(), epsilon = 1e-12);
        assert!(matches!(block_graph(&g, 6, 1000), Err(PressureError::Budget { .. })));
    }

    #[test]
    fn vertex_and_edge_conventions_agree() {
        // row weights on the printed matrix vs edge weights by source vertex
        let g = builtin_f2_abc();
        let r = [0.3, -0.2, 0.5, 1.1, 0.0, -0.7];
        let vertex = row_weighted_perron(&ABC_MATRIX, &r).unwrap().root;
        let w: Vec<f64> = g
            .edges()
            .iter()
            .map(|e| if e.source == 0 { 0.0 } else { r[e.source - 1] })
            .collect();
        let edge = pressure_edge_weighted(&g, &w).unwrap().perron_root;
        assert_relative_eq!(vertex, edge, max_relative = 1e-11);
        let w: Vec<f64> = g.edges().iter().map(|e| r[e.target - 1]).collect();
        let edge = pressure_edge_weighted(&g, &w).unwrap().perron_root;
        assert_relative_eq!(vertex, edge, max_relative = 1e-11);
    }

    proptest! {
        #[test]
        fn abc_sandwich(w in proptest::collection::vec(-3.0..3.0f64, 6)) {
            let r = [w[0], w[1], w[2], w[3], w[4], w[5]];
            let root = row_weighted_perron(&ABC_MATRIX, &r).unwrap().root;
            let lo = r.iter().cloned().fold(f64::INFINITY, f64::min).exp() * 4.0;
            let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp() * 4.0;
            prop_assert!(lo * (1.0 - 1e-12) <= root && root <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn monotone_in_weights(w in proptest::collection::vec(-2.0..2.0f64, 30), bump in 0.0..1.0f64) {
            let g = builtin_f2_abc();
            let w = &w[..g.edges().len()];
            let p = pressure_edge_weighted(&g, w).unwrap().pressure;
            let up: Vec<f64> = w.iter().enumerate().map(|(i, v)| if i % 3 == 0 { v + bump } else { *v }).collect();
            let q = pressure_edge_weighted(&g, &up).unwrap().pressure;
            prop_assert!(q >= p - 1e-12);
        }

        #[test]
        fn exponent_solves_equation(w in proptest::collection::vec(0.2..5.0f64, 30), c in 0.1..10.0f64) {
            let g = builtin_f2_abc();
            let w = &w[..g.edges().len()];
            let s = solve_exponent(&g, w).unwrap();
            let ws: Vec<f64> = w.iter().map(|v| -s * v).collect();
            prop_assert!(pressure_edge_weighted(&g, &ws).unwrap().pressure.abs() <= 1e-9);
            let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
            let sc = solve_exponent(&g, &scaled).unwrap();
            prop_assert!((sc * c - s).abs() <= 1e-8 * s.max(1.0));
        }

        #[test]
        fn perron_of_powers(e in proptest::collection::vec(0.0..2.0f64, 9)) {
            let a: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| e[3 * i + j] + 0.05).collect()).collect();
            let rho = perron_root(&WeightedMatrix::from_dense(&a).unwrap()).unwrap().root;
            let mut pk = a.clone();
            for k in 2..=4 {
                pk = (0..3).map(|i| (0..3).map(|j| (0..3).map(|l| pk[i][l] * a[l][j]).sum()).collect()).collect();
                let r = perron_root(&WeightedMatrix::from_dense(&pk).unwrap()).unwrap().root;
                prop_assert!((r - rho.powi(k)).abs() <= 1e-11 * r);
            }
        }
    }
}
