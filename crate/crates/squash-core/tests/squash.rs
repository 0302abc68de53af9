use std::sync::Arc;

use squash_core::geom::{p2, p3, Point};
use squash_core::restricted::core_delaunay;
use squash_core::squash::{
    alpha_complex_of, naive_squash, naive_vertical_simplification, non_crossing_squash, practical_squash,
    practical_vertical_simplification, Mode, SquashOptions,
};
use squash_core::vertical::{skins, DualGraph, FreeSide};
use squash_core::{
    delaunay, sample_manifold, AnalyticManifold, Error, Execution, ExpectedTopology, PointCloud, SampleSpec, Simplex,
    SimplicialComplex, Tolerances,
};

fn sphere_cloud(eps: f64, seed: u64) -> (AnalyticManifold, PointCloud) {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let cloud = sample_manifold(&SampleSpec { epsilon: eps, delta: 0.0, seed, manifold: m.clone() }).unwrap();
    (m, cloud)
}

fn noisy_sphere_cloud(eps: f64, delta: f64, seed: u64) -> (AnalyticManifold, PointCloud) {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let cloud = sample_manifold(&SampleSpec { epsilon: eps, delta, seed, manifold: m.clone() }).unwrap();
    (m, cloud)
}

fn opts<'a>() -> SquashOptions<'a> {
    SquashOptions::default()
}

#[test]
fn closed_surface_without_cells_is_left_alone() {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let pts = Arc::new(vec![
        p3(1.0, 0.0, 0.0),
        p3(-1.0, 0.0, 0.0),
        p3(0.0, 1.0, 0.0),
        p3(0.0, -1.0, 0.0),
        p3(0.0, 0.0, 1.0),
        p3(0.0, 0.0, -1.0),
    ]);
    let mut faces = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                faces.push(Simplex::new(&[a, b, c]));
            }
        }
    }
    let k = SimplicialComplex::new(3, pts, faces).unwrap();
    let (out, trace) = naive_vertical_simplification(k.clone(), &m, &mut opts()).unwrap();
    assert!(trace.steps.is_empty());
    assert!(out.same_simplices(&k));
    let (out, trace) = practical_vertical_simplification(k.clone(), None, &mut opts()).unwrap();
    assert!(trace.steps.is_empty() && out.same_simplices(&k));
}

#[test]
fn sphere_runs_in_every_mode() {
    let (m, cloud) = sphere_cloud(0.2, 1);
    let core = core_delaunay(&delaunay(&cloud).unwrap(), &m, &Tolerances::default(), Execution::default()).unwrap();
    for mode in [Mode::Naive, Mode::Practical, Mode::NonCrossing] {
        let mut o = opts();
        let (k, trace) = match mode {
            Mode::Naive => naive_squash(&cloud, 0.359, &m, &mut o),
            Mode::Practical => practical_squash(&cloud, 0.359, Some(&m), &mut o),
            Mode::NonCrossing => non_crossing_squash(&cloud, 0.359, &m, &mut o),
        }
        .unwrap();
        let c = k.certify_topology(Some(ExpectedTopology::Sphere));
        assert!(c.matches_expected, "{mode:?}: {c:?}");
        assert_eq!(k.count(3), 0);
        assert!(trace.euler_constant());
        assert!(trace.steps.len() <= trace.initial_top_simplices);
        assert_eq!(trace.remaining_top_simplices, 0);
        assert_eq!(trace.final_euler, 2);
        if mode == Mode::NonCrossing {
            assert!(k.same_simplices(&core.complex), "non-crossing output differs from the core complex");
            for s in &trace.steps {
                let a = s.circumcenter_alt.unwrap();
                assert!((s.side == FreeSide::FromAbove && a > 0.0) || (s.side == FreeSide::FromBelow && a < 0.0));
            }
        }
    }
}

#[test]
fn practical_run_in_the_practical_region() {
    let (m, cloud) = sphere_cloud(0.15, 3);
    let (k, trace) = practical_squash(&cloud, 0.207, None, &mut opts()).unwrap();
    assert!(k.certify_topology(Some(ExpectedTopology::Sphere)).matches_expected);
    assert!(trace.steps.iter().all(|s| s.naive_agrees.is_none()));
    let (k2, _) = practical_squash(&cloud, 0.207, Some(&m), &mut opts()).unwrap();
    assert!(k2.same_simplices(&k), "M must not influence practical decisions");
}

#[test]
fn verified_naive_run_keeps_its_invariants() {
    let (m, cloud) = noisy_sphere_cloud(0.25, 0.05, 4);
    let mut o = SquashOptions { check_every: Some(1), ..SquashOptions::default() };
    let initial = alpha_complex_of(&cloud, 0.359, Execution::default()).unwrap();
    let (k, trace) = naive_vertical_simplification(initial.clone(), &m, &mut o).unwrap();
    assert!(!trace.steps.is_empty());
    assert_eq!(trace.invariant_checks, trace.steps.len());
    assert!(trace.invariant_failures.is_empty(), "{:?}", trace.invariant_failures);
    assert!(trace.all_dual_extremal());
    assert!(trace.steps.iter().all(|s| s.dual_extremal == Some(true)));
    // terminal state: no cells left, skins coincide and K is its own boundary
    let g = DualGraph::build(&k, &m, &Tolerances::default(), Execution::default()).unwrap();
    assert!(g.is_empty());
    let sk = skins(&k, &m, &Tolerances::default()).unwrap();
    assert!(sk.upper.same_simplices(&sk.lower) && sk.upper.same_simplices(&k));
    assert!(k.boundary().same_simplices(&k));
    // the trace replays from the initial complex
    let taus: Vec<Simplex> = trace.steps.iter().map(|s| s.tau).collect();
    assert!(initial.replay(&taus).same_simplices(&k));
}

#[test]
fn runs_are_deterministic_across_execution_modes() {
    let (m, cloud) = noisy_sphere_cloud(0.25, 0.05, 9);
    let mut seq = SquashOptions { exec: Execution::Sequential, ..SquashOptions::default() };
    let mut par = SquashOptions { exec: Execution::Parallel, ..SquashOptions::default() };
    let (a, ta) = naive_squash(&cloud, 0.359, &m, &mut seq).unwrap();
    let (b, tb) = naive_squash(&cloud, 0.359, &m, &mut par).unwrap();
    assert!(!ta.steps.is_empty());
    assert_eq!(ta, tb);
    assert!(a.same_simplices(&b));
    let (_, tc) = naive_squash(&cloud, 0.359, &m, &mut opts()).unwrap();
    assert_eq!(ta, tc);
}

#[test]
fn circle_sample_gives_one_cycle() {
    let m = AnalyticManifold::parse("circle r=1").unwrap();
    let cloud = sample_manifold(&SampleSpec { epsilon: 0.2, delta: 0.0, seed: 2, manifold: m.clone() }).unwrap();
    for alpha in [0.3, 0.359] {
        let (k, trace) = naive_squash(&cloud, alpha, &m, &mut opts()).unwrap();
        let c = k.certify_topology(Some(ExpectedTopology::Circle));
        assert!(c.matches_expected, "{c:?}");
        assert_eq!(k.count(1), cloud.len());
        assert!(trace.euler_constant());
    }
}

#[test]
fn zero_alpha_leaves_bare_vertices() {
    let (m, cloud) = sphere_cloud(0.3, 5);
    let (k, trace) = naive_squash(&cloud, 0.0, &m, &mut opts()).unwrap();
    assert!(trace.steps.is_empty());
    assert_eq!(k.len(), cloud.len());
    let c = k.certify_topology(Some(ExpectedTopology::Sphere));
    assert!(!c.matches_expected);
    assert!(c.failures.iter().any(|f| f.contains("not pure")));
}

#[test]
fn voronoi_vertex_on_the_surface_is_not_generic() {
    // regular tetrahedron whose circumcenter sits on the unit sphere
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let c = p3(1.0, 0.0, 0.0);
    let r = 0.2 / 3f64.sqrt();
    let pts: Vec<Point> = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|v| c + p3(v[0], v[1], v[2]) * r)
        .collect();
    let cloud = PointCloud::external(3, pts).unwrap();
    assert!(matches!(non_crossing_squash(&cloud, 10.0, &m, &mut opts()), Err(Error::GenericityViolated(_))));
}

#[test]
fn practical_and_naive_can_disagree_on_a_steep_facet() {
    // the smallest facet 01 is steep, so its hyperplane is far from the x-axis
    let pts = Arc::new(vec![p2(0.0, 0.1), p2(0.15, 0.9), p2(1.0, 0.2)]);
    let k = SimplicialComplex::new(2, pts, [Simplex::new(&[0, 1, 2])]).unwrap();
    let m = AnalyticManifold::parse("plane n=0,1 p=0,0 half=2").unwrap();
    let (_, naive) = naive_vertical_simplification(k.clone(), &m, &mut opts()).unwrap();
    let (_, practical) = practical_vertical_simplification(k, Some(&m), &mut opts()).unwrap();
    assert_eq!(naive.steps.len(), 1);
    assert_eq!(practical.steps.len(), 1);
    assert_ne!(naive.steps[0].tau, practical.steps[0].tau);
    assert_eq!(practical.steps[0].naive_agrees, Some(false));
}

#[test]
fn trace_serializes_as_json_lines() {
    let (m, cloud) = noisy_sphere_cloud(0.25, 0.05, 6);
    let (_, trace) = naive_squash(&cloud, 0.359, &m, &mut opts()).unwrap();
    let mut buf = Vec::new();
    trace.write_jsonl(&mut buf).unwrap();
    let lines: Vec<serde_json::Value> =
        String::from_utf8(buf).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!trace.steps.is_empty());
    assert_eq!(lines.len(), trace.steps.len() + 1);
    assert_eq!(lines.last().unwrap()["summary"]["final_euler"], 2);
    let first: squash_core::squash::SquashStep = serde_json::from_value(lines[0].clone()).unwrap();
    assert_eq!(first, trace.steps[0]);
}

#[test]
fn snapshots_fire_on_schedule() {
    let (m, cloud) = noisy_sphere_cloud(0.25, 0.05, 6);
    let mut seen = Vec::new();
    let mut cb = |step: usize, k: &SimplicialComplex| seen.push((step, k.count(3)));
    let mut o = SquashOptions { snapshot_every: Some(5), snapshot: Some(&mut cb), ..SquashOptions::default() };
    let (_, trace) = naive_squash(&cloud, 0.359, &m, &mut o).unwrap();
    drop(o);
    assert!(trace.steps.len() >= 10);
    assert_eq!(seen.len(), trace.steps.len() / 5);
    assert!(seen.iter().all(|(s, _)| s % 5 == 0));
    assert!(seen.windows(2).all(|w| w[0].1 > w[1].1));
}
