use std::sync::Arc;

use squash_core::geom::{p2, p3, Point};
use squash_core::conditions::{check_reconstruction_conditions, SamplingParams};
use squash_core::restricted::{core_delaunay, restricted_delaunay, restricted_equivalence};
use squash_core::squash::{alpha_complex_of, non_crossing_squash, SquashOptions};
use squash_core::{
    delaunay, sample_manifold, AnalyticManifold, DelaunayComplex, Error, Execution, ExpectedTopology, PointCloud,
    SampleSpec, Simplex, Tolerances,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn regular_tetra(center: Point, circumradius: f64) -> Vec<Point> {
    let r = circumradius / 3f64.sqrt();
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|v| center + p3(v[0], v[1], v[2]) * r)
        .collect()
}

#[test]
fn regular_tetrahedron_on_its_circumsphere_gives_its_boundary() {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let cloud = PointCloud::external(3, regular_tetra(p3(0.0, 0.0, 0.0), 1.0)).unwrap();
    let d = delaunay(&cloud).unwrap();
    let core = core_delaunay(&d, &m, &tol(), Execution::default()).unwrap();
    assert_eq!(core.complex.count(2), 4);
    assert_eq!(core.complex.count(3), 0);
    assert_eq!(core.complex.euler_characteristic(), 2);
    assert!(core.witnesses.iter().all(|w| w.verified));
    assert_eq!(core.witnesses.len(), 4);
}

#[test]
fn points_on_a_circle_give_the_polygon() {
    let m = AnalyticManifold::parse("circle r=1").unwrap();
    let n = 9;
    let pts: Vec<Point> =
        (0..n).map(|i| 2.0 * std::f64::consts::PI * (i as f64 + 0.1 * (i % 3) as f64) / n as f64).map(|t| p2(t.cos(), t.sin())).collect();
    let cloud = PointCloud::external(2, pts).unwrap();
    let d = delaunay(&cloud).unwrap();
    let core = core_delaunay(&d, &m, &tol(), Execution::default()).unwrap();
    assert_eq!(core.complex.count(1), n);
    for v in core.complex.simplices(0) {
        assert_eq!(core.complex.immediate_cofaces(&v).unwrap().len(), 2);
    }
    assert!(core.complex.certify_topology(Some(ExpectedTopology::Circle)).matches_expected);
}

#[test]
fn tiny_sphere_inside_one_cell_meets_no_voronoi_edge() {
    let pts = regular_tetra(p3(0.0, 0.0, 0.0), 1.0);
    let v0 = pts[0];
    let m = AnalyticManifold::parse(&format!("sphere r=0.05 c={},{},{}", v0.x, v0.y, v0.z)).unwrap();
    let cloud = PointCloud::external(3, pts).unwrap();
    let d = delaunay(&cloud).unwrap();
    let core = core_delaunay(&d, &m, &tol(), Execution::default()).unwrap();
    assert_eq!(core.complex.count(2), 0);
    let full = restricted_delaunay(&d, &m, 0.005, &tol(), Execution::default()).unwrap();
    assert_eq!(full.complex.len(), 1);
    assert!(full.complex.contains(&Simplex::vertex(0)));
    assert!(!full.pure);
}

#[test]
fn single_point_is_an_impure_vertex() {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let d = DelaunayComplex::small(3, Arc::new(vec![p3(0.0, 0.0, 0.0)])).unwrap();
    let full = restricted_delaunay(&d, &m, 0.05, &tol(), Execution::default()).unwrap();
    assert_eq!(full.complex.len(), 1);
    assert!(!full.pure);
    assert_eq!(full.extras, vec![Simplex::vertex(0)]);
}

#[test]
fn circumcenter_on_the_surface_is_rejected() {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let cloud = PointCloud::external(3, regular_tetra(p3(1.0, 0.0, 0.0), 0.3)).unwrap();
    let d = delaunay(&cloud).unwrap();
    assert!(matches!(core_delaunay(&d, &m, &tol(), Execution::default()), Err(Error::GenericityViolated(_))));
    assert!(matches!(
        restricted_equivalence(&cloud, &m, 0.05, &tol(), Execution::default()),
        Err(Error::GenericityViolated(_))
    ));
}

/// Independent witness check: on M, equidistant from the facet, no sample closer.
fn witness_ok(m: &AnalyticManifold, pts: &[Point], f: &Simplex, w: &Point) -> bool {
    let ds: Vec<f64> = f.vertices().iter().map(|&v| (pts[v as usize] - w).norm()).collect();
    let r = ds[0];
    let nearest = pts.iter().map(|p| (p - w).norm()).fold(f64::INFINITY, f64::min);
    m.alt(w).unwrap().abs() <= 1e-9 && ds.iter().all(|d| (d - r).abs() <= 1e-9) && nearest >= r - 1e-9
}

fn check_equivalence(m: &AnalyticManifold, eps: f64, seed: u64, spacing: f64, chi: i64) {
    let cloud = sample_manifold(&SampleSpec { epsilon: eps, delta: 0.0, seed, manifold: m.clone() }).unwrap();
    let out = restricted_equivalence(&cloud, m, spacing, &tol(), Execution::default()).unwrap();
    assert!(out.equal, "extras: {:?}", out.restricted.extras);
    assert!(out.restricted.pure);
    assert!(out.certificate.matches_expected, "{:?}", out.certificate);
    assert_eq!(out.core.complex.euler_characteristic(), chi);
    assert!(out.sampling_ok, "{}", out.measured_eps_over_r);

    let pts = cloud.points.as_slice();
    assert_eq!(out.core.witnesses.len(), out.core.complex.count(2));
    for w in &out.core.witnesses {
        assert!(w.verified);
        assert!(witness_ok(m, pts, &w.facet, &p3(w.point[0], w.point[1], w.point[2])), "{w:?}");
    }
    let k = &out.restricted.complex;
    for v in k.simplices(0) {
        assert!(!k.immediate_cofaces(&v).unwrap().is_empty());
    }
    for e in k.simplices(1) {
        assert!(!k.immediate_cofaces(&e).unwrap().is_empty());
    }
}

#[test]
fn sphere_restricted_equals_core() {
    check_equivalence(&AnalyticManifold::parse("sphere r=1").unwrap(), 0.2, 1, 0.01, 2);
}

#[test]
fn torus_restricted_equals_core() {
    check_equivalence(&AnalyticManifold::parse("torus R=3 r=1").unwrap(), 0.2, 2, 0.02, 0);
}

#[test]
fn non_crossing_output_is_the_core_complex() {
    let m = AnalyticManifold::parse("torus R=3 r=1").unwrap();
    for seed in [1, 2] {
        let cloud = sample_manifold(&SampleSpec { epsilon: 0.2, delta: 0.0, seed, manifold: m.clone() }).unwrap();
        let a = alpha_complex_of(&cloud, 0.359, Execution::default()).unwrap();
        let p = SamplingParams::new(0.2, 0.0, 0.359, 1.0).unwrap();
        let rep = check_reconstruction_conditions(&a, &m, &p, 8, Execution::default()).unwrap();
        assert!(rep.gate.passes && rep.naive_ok(), "{rep:?}");

        let d = delaunay(&cloud).unwrap();
        let core = core_delaunay(&d, &m, &tol(), Execution::default()).unwrap();
        let (k, trace) = non_crossing_squash(&cloud, 0.359, &m, &mut SquashOptions::default()).unwrap();
        assert!(trace.steps.len() > 1000);
        assert!(k.same_simplices(&core.complex), "seed {seed}");
    }
}

#[test]
fn sparse_sample_reports_its_extras() {
    let m = AnalyticManifold::parse("sphere r=1").unwrap();
    let cloud = sample_manifold(&SampleSpec { epsilon: 0.7, delta: 0.0, seed: 5, manifold: m.clone() }).unwrap();
    let d = delaunay(&cloud).unwrap();
    let full = restricted_delaunay(&d, &m, 0.01, &tol(), Execution::default()).unwrap();
    assert_eq!(full.pure, full.extras.is_empty());
    for e in &full.extras {
        assert!(full.complex.contains(e));
    }
    let seq = restricted_delaunay(&d, &m, 0.01, &tol(), Execution::Sequential).unwrap();
    assert!(seq.complex.same_simplices(&full.complex));
    assert_eq!(seq.extras, full.extras);
}
