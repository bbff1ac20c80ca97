use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use anosov_core::automaton::{validate_strong_markov, vertex_adjacency, ABC_MATRIX};
use anosov_core::pants::{is_admissible, sl3_transfer_root, vw_diagnostic};
use anosov_core::pressure::{pressure_edge_weighted, solve_exponent};
use anosov_core::rep::{
    approximating_exponents, busemann_depth_k_exponent, exponent_bounds, limit_cone_deviation, periodic_exponent,
};
use anosov_core::{
    builtin_f2_abc, builtin_f2_standard, holonomy, shear_family, FGParams, Functional, GraphJson, GroupWord,
    LabeledGraph, Representation, RepresentationJson, SquareMatrix, BLOCK_BUDGET,
};

fn schottky(m: f64) -> Representation {
    let a = SquareMatrix::new2([[(m / 2.0).exp(), 0.0], [0.0, (-m / 2.0).exp()]]);
    let (c, s) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
    let r = SquareMatrix::new2([[c, -s], [s, c]]);
    let b = (r * a) * r.transpose();
    Representation::new(2, BTreeMap::from([("a".into(), a), ("b".into(), b)])).unwrap()
}

#[test]
fn graph_json_round_trip_preserves_pressure() {
    for g in [builtin_f2_standard(), builtin_f2_abc()] {
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = LabeledGraph::from_json(&serde_json::from_str::<GraphJson>(&text).unwrap()).unwrap();
        let w: Vec<f64> = (0..g.edges().len()).map(|i| -0.1 * (i % 5) as f64).collect();
        let p = pressure_edge_weighted(&g, &w).unwrap().pressure;
        let q = pressure_edge_weighted(&back, &w).unwrap().pressure;
        assert_eq!(p, q);
        assert!(validate_strong_markov(&back, 5).passed);
    }
}

#[test]
fn graph_json_accepts_integer_vertex_ids() {
    let text = r#"{"vertices": [0, 1], "start": 0,
        "edges": [{"from": 0, "to": 1, "label": "a"}, {"from": 1, "to": 1, "label": "a"}]}"#;
    let g = LabeledGraph::from_json(&serde_json::from_str(text).unwrap()).unwrap();
    assert_eq!(g.vertices(), ["0", "1"]);
    assert!((pressure_edge_weighted(&g, &[0.0, 0.0]).unwrap().pressure).abs() < 1e-12);
}

#[test]
fn abc_recurrent_adjacency_is_the_transfer_pattern() {
    let adj = vertex_adjacency(&builtin_f2_abc());
    let want: Vec<Vec<u32>> = ABC_MATRIX
        .iter()
        .map(|r| r.iter().map(|&x| x as u32).collect())
        .collect();
    assert_eq!(adj.vertices, ["a", "b", "c", "a'", "b'", "c'"]);
    assert_eq!(adj.matrix, want);
}

#[test]
fn representation_json_round_trip() {
    let rho = schottky(3.0);
    let text = serde_json::to_string(&rho.to_json()).unwrap();
    let back = Representation::from_json(&serde_json::from_str::<RepresentationJson>(&text).unwrap()).unwrap();
    let w = GroupWord::parse("ab'a'b").unwrap();
    let (x, y) = (rho.evaluate(&w).unwrap(), back.evaluate(&w).unwrap());
    assert!(x.max_diff(&y) < 1e-12 * x.max_abs());
}

#[test]
fn exponent_is_the_same_on_both_codings() {
    let phi = Functional::alpha1(2).unwrap();
    let rho = schottky(6.0);
    let (hs, _) = approximating_exponents(&rho, &phi, &builtin_f2_standard()).unwrap();
    let w = vec![6.0; builtin_f2_standard().edges().len()];
    assert!((hs - solve_exponent(&builtin_f2_standard(), &w).unwrap()).abs() < 1e-9);
    assert!((hs - 3f64.ln() / 6.0).abs() < 1e-9);
}

#[test]
fn schottky_estimates_are_ordered() {
    let phi = Functional::alpha1(2).unwrap();
    let g = builtin_f2_standard();
    let rho = schottky(12.0);
    let r = exponent_bounds(&rho, &phi, &g, 0.1).unwrap();
    let p = periodic_exponent(&rho, &phi, &g, 8).unwrap();
    let b = busemann_depth_k_exponent(&rho, &phi, &g, 3, BLOCK_BUDGET).unwrap();
    assert!(r.certified && r.valid);
    assert!(r.lower <= b && b <= r.upper.unwrap(), "{r:?} {b}");
    assert!((p - b).abs() / b < 0.01, "{p} {b}");
    assert!(limit_cone_deviation(&rho, &g, 6).unwrap() < 1e-12);
}

#[test]
fn pants_pipeline_at_unit_triple_ratios() {
    let phi = Functional::from_roots(1.0, 1.0);
    let base = FGParams::new([1.0, 1.0], [1.0, 2.0, 0.5], [3.0, 1.0, 1.7]).unwrap();
    let p = shear_family(3.0, &base);
    assert!(is_admissible(&p).admissible);
    let h = holonomy(&p).unwrap();
    assert!(h.relation_defect() < 1e-9);
    let (_, hl) = approximating_exponents(&h.rep, &phi, &builtin_f2_abc()).unwrap();
    let s = sl3_transfer_root(&p, &phi).unwrap();
    assert!((s - hl).abs() < 1e-9, "{s} {hl}");
    let d = vw_diagnostic(&p, &phi).unwrap();
    assert!(d.match_distance.iter().all(|&x| x < 1e-8), "{d:?}");
    assert_eq!(d.best_match, ["v3", "v1", "v2", "w3", "w1", "w2"]);
}

#[test]
fn kappa_exponent_approaches_transfer_root_along_shear() {
    let phi = Functional::from_roots(1.0, 1.0);
    let ratios: Vec<f64> = [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|&t| {
            let p = shear_family(t, &FGParams::unit());
            let (hk, _) = approximating_exponents(&holonomy(&p).unwrap().rep, &phi, &builtin_f2_abc()).unwrap();
            hk / sl3_transfer_root(&p, &phi).unwrap()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1] && w[1] < 1.0), "{ratios:?}");
}
