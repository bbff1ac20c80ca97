use serde::Serialize;

use super::{certify_separation, generator_weights, RepError, Representation, WeightKind};
use crate::automaton::{enumerate_cycles, evaluate_path, Cycle, LabeledGraph};
use crate::pressure::{bisect_decreasing, block_graph, solve_exponent, S_TOL};
use crate::prox::{cartan_of, iwasawa_of, jordan_of, top_singular_flag, GroupMatrix, GAP_TOL};
use crate::weyl::{r_epsilon, Functional};

/// Default element budget of [`brute_force_exponent`].
pub const BRUTE_FORCE_BUDGET: usize = 5_000_000;

const FIT_POINTS: usize = 40;

/// Zeros of the pressure of the generator Cartan and Jordan potentials.
pub fn approximating_exponents(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
) -> Result<(f64, f64), RepError> {
    let wk = generator_weights(rho, phi, g, WeightKind::Kappa)?;
    let wl = generator_weights(rho, phi, g, WeightKind::Lambda)?;
    Ok((solve_exponent(g, &wk)?, solve_exponent(g, &wl)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub epsilon: f64,
    pub h_kappa: f64,
    pub h_lambda: f64,
    pub lower: f64,
    /// `h_kappa / (1 - 2 phi(R_eps) / m_kappa)`, when `m_kappa > 2 phi(R_eps)`.
    pub upper: Option<f64>,
    /// `h_lambda / (1 - phi(R_eps) / m_lambda)`, when `m_lambda > phi(R_eps)`.
    pub upper_lambda: Option<f64>,
    pub m_kappa: f64,
    pub m_lambda: f64,
    pub phi_r_eps: f64,
    pub certified: bool,
    /// Certified and `m_kappa > 2 phi(R_eps)`.
    pub valid: bool,
    /// Certified and `m_lambda > phi(R_eps)`.
    pub valid_lambda: bool,
}

impl ExponentReport {
    pub fn relative_gap(&self) -> Option<f64> {
        self.upper.map(|u| (u - self.lower) / self.lower)
    }
}

/// Bounds on the critical exponent from the approximating exponents and an
/// `eps`-separation certificate.
pub fn exponent_bounds(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    eps: f64,
) -> Result<ExponentReport, RepError> {
    let wk = generator_weights(rho, phi, g, WeightKind::Kappa)?;
    let wl = generator_weights(rho, phi, g, WeightKind::Lambda)?;
    let h_kappa = solve_exponent(g, &wk)?;
    let h_lambda = solve_exponent(g, &wl)?;
    let m_kappa = wk.iter().copied().fold(f64::INFINITY, f64::min);
    let m_lambda = wl.iter().copied().fold(f64::INFINITY, f64::min);
    let phi_r_eps = phi.eval(&r_epsilon(eps, rho.dim())?);
    let certified = certify_separation(rho, g, eps)?.passed;
    let upper = (m_kappa > 2.0 * phi_r_eps).then(|| h_kappa / (1.0 - 2.0 * phi_r_eps / m_kappa));
    let upper_lambda = (m_lambda > phi_r_eps).then(|| h_lambda / (1.0 - phi_r_eps / m_lambda));
    Ok(ExponentReport {
        epsilon: eps,
        h_kappa,
        h_lambda,
        lower: h_kappa,
        upper,
        upper_lambda,
        m_kappa,
        m_lambda,
        phi_r_eps,
        certified,
        valid: certified && upper.is_some(),
        valid_lambda: certified && upper_lambda.is_some(),
    })
}

/// `rho(ev(c))^{-1} = rho(x_1)^{-1} ... rho(x_n)^{-1}` for the labels `x_i` along `c`.
fn cycle_element(rho: &Representation, g: &LabeledGraph, edges: &[usize]) -> Result<GroupMatrix, RepError> {
    edges.iter().try_fold(GroupMatrix::identity(rho.dim()), |acc, &e| {
        Ok(acc.mul(&rho.letter(&g.edge(e).label.inv())?))
    })
}

fn cycle_length(rho: &Representation, phi: &Functional, g: &LabeledGraph, c: &Cycle) -> Result<f64, RepError> {
    let l = phi.eval(&jordan_of(&cycle_element(rho, g, &c.edges)?)?);
    if !(l > 0.0) || !l.is_finite() {
        return Err(RepError::NonPositiveLength {
            word: evaluate_path(g, &c.edges)?.to_string(),
            value: l,
        });
    }
    Ok(l)
}

fn rotation_count(s: &[usize]) -> usize {
    let n = s.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| s[i] == s[i - p]))
        .unwrap_or(n)
}

/// Zero of `s -> (1/n) log sum exp(-s phi(lambda(rho(ev(c))^{-1})))` over the closed
/// paths `c` of length `n` (every rotation counted).
pub fn periodic_exponent(rho: &Representation, phi: &Functional, g: &LabeledGraph, n: usize) -> Result<f64, RepError> {
    rho.check_phi(phi)?;
    let rho = rho.for_graph(g)?;
    let cycles = enumerate_cycles(g, n);
    if cycles.is_empty() {
        return Err(RepError::NoCycles(n));
    }
    let mut terms = Vec::with_capacity(cycles.len());
    for c in &cycles {
        terms.push((rotation_count(&c.edges) as f64, cycle_length(&rho, phi, g, c)?));
    }
    let nf = n as f64;
    bisect_decreasing(
        |s| {
            let top = terms.iter().map(|(_, l)| -s * l).fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = terms.iter().map(|(k, l)| k * (-s * l - top).exp()).sum();
            Ok::<_, RepError>((top + sum.ln()) / nf)
        },
        S_TOL,
        |d| RepError::Pressure(crate::pressure::PressureError::Bracket(d)),
    )
}

/// Zero of the pressure of the depth-`k` Busemann potential
/// `B_k(x) = phi(sigma(rho(x_0)^{-1}, xi_k))`, `xi_k` the singular flag of
/// `rho(x_1)^{-1} ... rho(x_k)^{-1}`, on the `(k+1)`-block recoding.
pub fn busemann_depth_k_exponent(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    k: usize,
    budget: usize,
) -> Result<f64, RepError> {
    rho.check_phi(phi)?;
    let rho = rho.for_graph(g)?;
    let k = k.max(1);
    let bg = block_graph(g, k + 1, budget)?;
    let mut weights = Vec::with_capacity(bg.blocks.len());
    for b in &bg.blocks {
        let head = rho.letter(&g.edge(b[0]).label.inv())?;
        let tail = cycle_element(&rho, g, &b[1..])?;
        let kt = cartan_of(&tail)?;
        if kt.entries().windows(2).any(|p| !(p[0] - p[1] > GAP_TOL)) {
            return Err(RepError::DegenerateGap(evaluate_path(g, &b[1..])?.to_string()));
        }
        let w = phi.eval(&iwasawa_of(&head, &top_singular_flag(&tail))?);
        if !(w > 0.0) || !w.is_finite() {
            return Err(RepError::NonPositiveWeight {
                label: evaluate_path(g, b)?.to_string(),
                value: w,
            });
        }
        weights.push(w);
    }
    Ok(bg.solve_exponent(&weights)?)
}

/// Orbit-counting estimate of the critical exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForce {
    pub slope: f64,
    pub t_max: f64,
    /// Number of nontrivial elements with `phi(kappa) <= t_max`.
    pub elements: usize,
}

/// Enumerates the elements coded by paths from the start vertex while
/// `phi(kappa(rho(gamma))) <= t_max` and fits the slope of `log N(T)` against `T` on
/// `[t_max / 2, t_max]`.
pub fn brute_force_exponent(
    rho: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    t_max: f64,
    budget: usize,
) -> Result<BruteForce, RepError> {
    rho.check_phi(phi)?;
    let rho = rho.for_graph(g)?;
    let start = g.start().ok_or(RepError::NoStart)?;
    let gens: Vec<GroupMatrix> = g
        .edges()
        .iter()
        .map(|e| rho.letter(&e.label))
        .collect::<Result<_, _>>()?;
    let mut values = Vec::new();
    let mut stack = vec![(start, GroupMatrix::identity(rho.dim()))];
    while let Some((v, m)) = stack.pop() {
        for &e in g.out_edges(v) {
            let next = gens[e].mul(&m);
            let t = phi.eval(&cartan_of(&next)?);
            if !(t > 0.0) || !t.is_finite() {
                return Err(RepError::NonPositiveLength {
                    word: format!("path through edge {e}"),
                    value: t,
                });
            }
            if t <= t_max {
                values.push(t);
                if values.len() > budget {
                    return Err(RepError::Budget(budget));
                }
                stack.push((g.edge(e).target, next));
            }
        }
    }
    values.sort_by(f64::total_cmp);
    let mut xs = Vec::with_capacity(FIT_POINTS);
    let mut ys = Vec::with_capacity(FIT_POINTS);
    for j in 0..FIT_POINTS {
        let t = t_max * (0.5 + 0.5 * j as f64 / (FIT_POINTS - 1) as f64);
        let count = values.partition_point(|&x| x <= t);
        if count == 0 {
            return Err(RepError::TooFewElements);
        }
        xs.push(t);
        ys.push((count as f64).ln());
    }
    Ok(BruteForce {
        slope: ls_slope(&xs, &ys),
        t_max,
        elements: values.len(),
    })
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Largest angle, in the trace-zero plane, from the Jordan projection of a primitive
/// cycle of length `<= n` to the sector spanned by the generator Cartan projections.
pub fn limit_cone_deviation(rho: &Representation, g: &LabeledGraph, n: usize) -> Result<f64, RepError> {
    let rho = rho.for_graph(g)?;
    let angle = |v: &crate::weyl::CartanVector| {
        let [x, y] = v.plane_coords();
        y.atan2(x)
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in g.edges() {
        let a = angle(&cartan_of(&rho.letter(&e.label.inv())?)?);
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let mut worst = 0.0_f64;
    for len in 1..=n {
        for c in enumerate_cycles(g, len).iter().filter(|c| c.primitive) {
            let l = jordan_of(&cycle_element(&rho, g, &c.edges)?)?;
            if l.norm() == 0.0 {
                continue;
            }
            let a = angle(&l);
            worst = worst.max(lo - a).max(a - hi);
        }
    }
    Ok(worst)
}

/// Lower estimate of the Thurston asymmetric distance from the maximum length ratio over
/// primitive cycles, normalized by depth-`k` Busemann exponents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThurstonEstimate {
    pub value: f64,
    pub h1: f64,
    pub h2: f64,
    pub depth: usize,
    pub max_len: usize,
    /// Word `ev(c)` of the cycle attaining the maximum.
    pub cycle: String,
    /// Always true: a finite maximum bounds the supremum from below.
    pub lower_bound: bool,
}

pub fn thurston_estimate(
    rho1: &Representation,
    rho2: &Representation,
    phi: &Functional,
    g: &LabeledGraph,
    max_len: usize,
    depth: usize,
    budget: usize,
) -> Result<ThurstonEstimate, RepError> {
    let h1 = busemann_depth_k_exponent(rho1, phi, g, depth, budget)?;
    let h2 = busemann_depth_k_exponent(rho2, phi, g, depth, budget)?;
    let r1 = rho1.for_graph(g)?;
    let r2 = rho2.for_graph(g)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for len in 1..=max_len {
        for c in enumerate_cycles(g, len).into_iter().filter(|c| c.primitive) {
            let l1 = cycle_length(&r1, phi, g, &c)?;
            let l2 = cycle_length(&r2, phi, g, &c)?;
            let r = (h2 * l2) / (h1 * l1);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, c.edges));
            }
        }
    }
    let (ratio, edges) = best.ok_or(RepError::NoCycles(max_len))?;
    Ok(ThurstonEstimate {
        value: ratio.ln(),
        h1,
        h2,
        depth,
        max_len,
        cycle: evaluate_path(g, &edges)?.to_string(),
        lower_bound: true,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::super::tests::schottky2;
    use super::*;
    use crate::automaton::{builtin_f2_abc, builtin_f2_standard, Edge, Letter};
    use crate::prox::SquareMatrix;
    use approx::assert_relative_eq;

    fn rot3(a: f64, b: f64) -> SquareMatrix {
        let r1 = SquareMatrix::new3([[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]]);
        let r2 = SquareMatrix::new3([[1.0, 0.0, 0.0], [0.0, b.cos(), -b.sin()], [0.0, b.sin(), b.cos()]]);
        r1 * r2
    }

    fn sl3_rep() -> Representation {
        let d = SquareMatrix::diag(&[8f64.exp(), 1.0, (-8f64).exp()]);
        let r = rot3(0.7, 0.4);
        let s = rot3(-0.3, 1.1);
        let a = (r * d) * r.transpose();
        let b = (s * d) * s.transpose();
        Representation::new(3, BTreeMap::from([("a".into(), a), ("b".into(), b)])).unwrap()
    }

    fn phi3() -> Functional {
        Functional::from_roots(1.0, 1.0)
    }

    #[test]
    fn jordan_exponent_dominates_cartan_exponent() {
        let g = builtin_f2_abc();
        let (hk, hl) = approximating_exponents(&sl3_rep(), &phi3(), &g).unwrap();
        assert!(hl >= hk - 1e-12);
    }

    #[test]
    fn scaling_scales_exponents() {
        let g = builtin_f2_standard();
        let (h1, l1) = approximating_exponents(&schottky2(4.0), &Functional::alpha1(2).unwrap(), &g).unwrap();
        let (h2, l2) = approximating_exponents(&schottky2(8.0), &Functional::alpha1(2).unwrap(), &g).unwrap();
        assert_relative_eq!(h1, 2.0 * h2, max_relative = 1e-9);
        assert_relative_eq!(l1, 2.0 * l2, max_relative = 1e-9);
        assert_relative_eq!(h1, 3f64.ln() / 4.0, max_relative = 1e-9);
    }

    #[test]
    fn bounds_collapse_at_right_angle() {
        let g = builtin_f2_standard();
        let r = exponent_bounds(
            &schottky2(6.0),
            &Functional::alpha1(2).unwrap(),
            &g,
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        assert!(r.phi_r_eps.abs() < 1e-15);
        assert_relative_eq!(r.upper.unwrap(), r.lower, max_relative = 1e-15);
        let r = exponent_bounds(&schottky2(0.5), &Functional::alpha1(2).unwrap(), &g, 0.1).unwrap();
        assert!(r.upper.is_none() && !r.valid);
    }

    #[test]
    fn periodic_on_bouquet() {
        let k = 3;
        let edges: Vec<Edge> = ["a", "b", "c"]
            .iter()
            .map(|s| Edge {
                source: 0,
                target: 0,
                label: Letter::new(s, false),
            })
            .collect();
        let g = LabeledGraph::new(vec!["v".into()], None, edges).unwrap();
        let m: f64 = 2.5;
        let d = SquareMatrix::new2([[(m / 2.0).exp(), 0.0], [0.0, (-m / 2.0).exp()]]);
        let rho = Representation::new(2, ["a", "b", "c"].iter().map(|s| (s.to_string(), d)).collect()).unwrap();
        for n in 1..=4 {
            let s = periodic_exponent(&rho, &Functional::alpha1(2).unwrap(), &g, n).unwrap();
            assert_relative_eq!(s, (k as f64).ln() / m, max_relative = 1e-9);
        }
    }

    #[test]
    fn periodic_exponent_stabilizes_above_cartan_exponent() {
        let g = builtin_f2_standard();
        let rho = schottky2(10.0);
        let phi = Functional::alpha1(2).unwrap();
        let (hk, _) = approximating_exponents(&rho, &phi, &g).unwrap();
        let p: Vec<f64> = [4, 6, 8, 10]
            .iter()
            .map(|&n| periodic_exponent(&rho, &phi, &g, n).unwrap())
            .collect();
        assert!(p.iter().all(|&x| x >= hk && x < 1.1 * hk));
        assert!((p[3] - p[2]).abs() < (p[1] - p[0]).abs());
        assert!((p[3] - p[2]).abs() < 1e-3 * p[3]);
        assert!(matches!(
            periodic_exponent(&rho, &phi, &g, 0),
            Err(RepError::NoCycles(0))
        ));
    }

    #[test]
    fn busemann_for_diagonal_semigroup_equals_cartan_exponent() {
        let edges: Vec<Edge> = ["a", "b"]
            .iter()
            .map(|s| Edge {
                source: 0,
                target: 0,
                label: Letter::new(s, false),
            })
            .collect();
        let g = LabeledGraph::new(vec!["v".into()], None, edges).unwrap();
        let a = SquareMatrix::diag(&[3f64.exp(), 1.0, (-3f64).exp()]);
        let b = SquareMatrix::diag(&[5f64.exp(), 2f64.exp(), (-7f64).exp()]);
        let rho = Representation::new(3, BTreeMap::from([("a".into(), a), ("b".into(), b)])).unwrap();
        let phi = Functional::from_weights(1.0, 1.0);
        let wk = generator_weights(&rho, &phi, &g, WeightKind::Kappa).unwrap();
        let hk = solve_exponent(&g, &wk).unwrap();
        for k in 1..=3 {
            let bk = busemann_depth_k_exponent(&rho, &phi, &g, k, 10_000).unwrap();
            assert_relative_eq!(bk, hk, max_relative = 1e-9);
        }
    }

    #[test]
    fn busemann_is_conjugation_invariant() {
        let g = builtin_f2_abc();
        let rho = sl3_rep();
        let phi = phi3();
        let b = busemann_depth_k_exponent(&rho, &phi, &g, 2, 100_000).unwrap();
        let conj = rho.conjugate(&rot3(1.3, -0.8)).unwrap();
        let bc = busemann_depth_k_exponent(&conj, &phi, &g, 2, 100_000).unwrap();
        assert_relative_eq!(b, bc, max_relative = 1e-9);
        let (hk, hl) = approximating_exponents(&rho, &phi, &g).unwrap();
        assert!(hk <= b + 1e-9 && b <= 1.2 * hl, "{hk} {b} {hl}");
    }

    #[test]
    fn brute_force_on_schottky() {
        let g = builtin_f2_standard();
        let m = 30.0;
        let bf = brute_force_exponent(
            &schottky2(m),
            &Functional::alpha1(2).unwrap(),
            &g,
            10.0 * m,
            BRUTE_FORCE_BUDGET,
        )
        .unwrap();
        let h = 3f64.ln() / m;
        assert!((bf.slope - h).abs() < 0.03 * h, "{} vs {h}", bf.slope);
        assert!(matches!(
            brute_force_exponent(&schottky2(m), &Functional::alpha1(2).unwrap(), &g, 10.0 * m, 100),
            Err(RepError::Budget(100))
        ));
    }

    #[test]
    fn brute_force_rank_one_has_zero_slope() {
        let edges = vec![
            Edge {
                source: 0,
                target: 1,
                label: Letter::new("z", false),
            },
            Edge {
                source: 0,
                target: 2,
                label: Letter::new("z", true),
            },
            Edge {
                source: 1,
                target: 1,
                label: Letter::new("z", false),
            },
            Edge {
                source: 2,
                target: 2,
                label: Letter::new("z", true),
            },
        ];
        let g = LabeledGraph::new(vec!["s".into(), "p".into(), "n".into()], Some(0), edges).unwrap();
        let e = 1f64.exp();
        let rho = Representation::new(
            2,
            BTreeMap::from([("z".into(), SquareMatrix::new2([[e, 0.0], [0.0, 1.0 / e]]))]),
        )
        .unwrap();
        let bf = brute_force_exponent(&rho, &Functional::alpha1(2).unwrap(), &g, 400.0, 10_000).unwrap();
        assert_eq!(bf.elements, 400);
        assert!(bf.slope.abs() < 0.01);
    }

    #[test]
    fn cone_deviation_of_shared_direction_is_zero() {
        let g = builtin_f2_standard();
        let d = limit_cone_deviation(&schottky2(3.0), &g, 4).unwrap();
        assert_eq!(d, 0.0);
        let d3 = limit_cone_deviation(&sl3_rep(), &builtin_f2_abc(), 4).unwrap();
        assert!(d3.is_finite() && d3 >= 0.0);
    }

    #[test]
    fn thurston_of_equal_reps_is_zero() {
        let g = builtin_f2_abc();
        let rho = sl3_rep();
        let t = thurston_estimate(&rho, &rho, &phi3(), &g, 4, 1, 100_000).unwrap();
        assert!(t.value.abs() < 1e-12);
        let conj = rho.conjugate(&rot3(0.2, 0.9)).unwrap();
        let tc = thurston_estimate(&rho, &conj, &phi3(), &g, 4, 1, 100_000).unwrap();
        assert!(tc.value.abs() < 1e-8);
        assert!(t.lower_bound);
    }
}
