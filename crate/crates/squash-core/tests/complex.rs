use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squash_core::geom::{barycentric, outward_normal, p2, p3, Point};
use squash_core::manifold::torus_point;
use squash_core::{alpha_complex, alpha_values, delaunay, Error, Execution, ExpectedTopology, PointCloud, Simplex, SimplicialComplex};

fn s(v: &[u32]) -> Simplex {
    Simplex::new(v)
}

fn tetra_points() -> Arc<Vec<Point>> {
    Arc::new(vec![p3(0.0, 0.0, 0.0), p3(1.0, 0.0, 0.0), p3(0.0, 1.0, 0.0), p3(0.0, 0.0, 1.0)])
}

fn tetra() -> SimplicialComplex {
    SimplicialComplex::new(3, tetra_points(), [s(&[0, 1, 2, 3])]).unwrap()
}

fn set(v: impl IntoIterator<Item = Simplex>) -> BTreeSet<Simplex> {
    v.into_iter().collect()
}

#[test]
fn closure_counts() {
    let k = tetra();
    assert_eq!([k.count(0), k.count(1), k.count(2), k.count(3)], [4, 6, 4, 1]);
    assert_eq!(k.euler_characteristic(), 1);
}

#[test]
fn link_of_a_tetra_facet_is_the_opposite_vertex() {
    assert_eq!(tetra().link(&s(&[0, 1, 2])).unwrap(), vec![s(&[3])]);
}

#[test]
fn tetra_boundary_is_every_proper_face() {
    let k = tetra();
    let b = k.boundary();
    let want = set(k.iter().copied().filter(|x| x.dim() < 3));
    assert_eq!(b.all_simplices(), want);
    let c = b.certify_topology(Some(ExpectedTopology::Sphere));
    assert!(c.is_closed_surface && c.orientable && c.matches_expected);
    assert_eq!(c.euler_characteristic, 2);
}

#[test]
fn shared_edge_of_two_planar_triangles() {
    let pts = Arc::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 1.0), p2(0.5, -1.0)]);
    let k = SimplicialComplex::new(2, pts, [s(&[0, 1, 2]), s(&[0, 1, 3])]).unwrap();
    assert_eq!(k.link(&s(&[0, 1])).unwrap(), vec![s(&[2]), s(&[3])]);
    let b = k.boundary();
    assert!(!b.contains(&s(&[0, 1])));
    assert_eq!(b.count(1), 4);
    assert_eq!(b.count(0), 4);
}

#[test]
fn missing_simplex_is_reported() {
    let k = tetra();
    assert!(matches!(k.star(&s(&[0, 7])), Err(Error::SimplexNotFound(_))));
    assert!(matches!(k.is_free(&s(&[9])), Err(Error::SimplexNotFound(_))));
}

#[test]
fn free_faces() {
    let pts = Arc::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]);
    let tri = SimplicialComplex::new(2, pts, [s(&[0, 1, 2])]).unwrap();
    assert_eq!(tri.is_free(&s(&[0, 1])).unwrap(), Some(s(&[0, 1, 2])));
    assert_eq!(tri.is_free(&s(&[0, 1, 2])).unwrap(), None);

    let hollow = tetra().boundary();
    assert_eq!(hollow.is_free(&s(&[0, 1, 2])).unwrap(), None);

    let mut pts = (*tetra_points()).clone();
    pts.push(p3(1.0, 1.0, 1.0));
    let two = SimplicialComplex::new(3, Arc::new(pts), [s(&[0, 1, 2, 3]), s(&[1, 2, 3, 4])]).unwrap();
    assert_eq!(two.is_free(&s(&[1, 2, 3])).unwrap(), None);
    assert_eq!(two.is_free(&s(&[0, 1, 2])).unwrap(), Some(s(&[0, 1, 2, 3])));
}

#[test]
fn collapse_edge_of_a_triangle() {
    let pts = Arc::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0)]);
    let mut k = SimplicialComplex::new(2, pts, [s(&[0, 1, 2])]).unwrap();
    let removed = k.collapse(&s(&[0, 1])).unwrap();
    assert_eq!(set(removed), set([s(&[0, 1]), s(&[0, 1, 2])]));
    assert_eq!(k.all_simplices(), set([s(&[0]), s(&[1]), s(&[2]), s(&[0, 2]), s(&[1, 2])]));
    assert_eq!(k.euler_characteristic(), 1);
}

#[test]
fn collapse_facet_of_a_tetra() {
    let mut k = tetra();
    k.collapse(&s(&[0, 1, 2])).unwrap();
    assert_eq!(k.count(2), 3);
    assert_eq!(k.count(3), 0);
    assert_eq!(k.euler_characteristic(), 1);
    assert!(matches!(tetra().boundary().collapse(&s(&[0])), Err(Error::NotFree(_))));
}

#[test]
fn deletion_log_replays() {
    let original = tetra();
    let mut k = original.clone();
    k.collapse(&s(&[0, 1, 2])).unwrap();
    k.collapse(&s(&[0, 1])).unwrap();
    assert_eq!(k.deletion_log(), &[s(&[0, 1, 2]), s(&[0, 1])]);
    assert!(original.replay(k.deletion_log()).same_simplices(&k));
}

fn octahedron() -> SimplicialComplex {
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
                faces.push(s(&[a, b, c]));
            }
        }
    }
    SimplicialComplex::new(3, pts, faces).unwrap()
}

#[test]
fn octahedron_is_a_sphere() {
    let c = octahedron().certify_topology(Some(ExpectedTopology::Sphere));
    assert_eq!(c.euler_characteristic, 2);
    assert!(c.matches_expected && c.orientable && c.vertex_links_ok);
    assert_eq!(c.genus, Some(0));
    assert!(!octahedron().certify_topology(Some(ExpectedTopology::Torus)).matches_expected);
}

fn torus_mesh(n: usize, m: usize) -> SimplicialComplex {
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let u = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let v = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            pts.push(torus_point(3.0, 1.0, u, v));
        }
    }
    let id = |i: usize, j: usize| ((i % n) * m + (j % m)) as u32;
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..m {
            faces.push(s(&[id(i, j), id(i + 1, j), id(i + 1, j + 1)]));
            faces.push(s(&[id(i, j), id(i + 1, j + 1), id(i, j + 1)]));
        }
    }
    SimplicialComplex::new(3, Arc::new(pts), faces).unwrap()
}

#[test]
fn grid_torus_is_a_torus() {
    let c = torus_mesh(12, 8).certify_topology(Some(ExpectedTopology::Torus));
    assert!(c.matches_expected && c.orientable, "{c:?}");
    assert_eq!(c.genus, Some(1));
    assert_eq!(c.euler_characteristic, 0);
}

#[test]
fn mobius_band_is_not_a_closed_surface() {
    let n = 16;
    let mut pts = Vec::new();
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let radial = p3(t.cos(), t.sin(), 0.0);
        let w = radial * (t / 2.0).cos() + p3(0.0, 0.0, (t / 2.0).sin());
        pts.push(radial * 2.0 + w * 0.5);
        pts.push(radial * 2.0 - w * 0.5);
    }
    let a = |i: usize| (2 * i) as u32;
    let b = |i: usize| (2 * i + 1) as u32;
    let mut faces = Vec::new();
    for i in 0..n - 1 {
        faces.push(s(&[a(i), b(i), a(i + 1)]));
        faces.push(s(&[b(i), b(i + 1), a(i + 1)]));
    }
    // the twist glues a to b across the seam
    faces.push(s(&[a(n - 1), b(n - 1), b(0)]));
    faces.push(s(&[b(n - 1), a(0), b(0)]));
    let k = SimplicialComplex::new(3, Arc::new(pts), faces).unwrap();
    let c = k.certify_topology(None);
    assert!(!c.is_closed_surface);
    assert!(!c.orientable);
    assert_eq!(c.euler_characteristic, 0);
    // the band's rim is a single cycle through every vertex
    let rim = k.simplices(1).into_iter().filter(|e| k.immediate_cofaces(e).unwrap().len() == 1).count();
    assert_eq!(rim, 2 * n);
}

#[test]
fn circle_polygon() {
    let n = 9;
    let pts = (0..n).map(|i| {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        p2(t.cos(), t.sin())
    });
    let edges = (0..n as u32).map(|i| s(&[i, (i + 1) % n as u32]));
    let k = SimplicialComplex::new(2, Arc::new(pts.collect()), edges).unwrap();
    let c = k.certify_topology(Some(ExpectedTopology::Circle));
    assert!(c.matches_expected && c.is_closed_surface);
    assert_eq!(c.euler_characteristic, 0);
}

#[test]
fn impure_and_open_surfaces_fail_certification() {
    let k = tetra();
    let c = k.certify_topology(Some(ExpectedTopology::Sphere));
    assert!(!c.pure && !c.matches_expected && !c.failures.is_empty());
    let mut b = tetra().boundary();
    b.remove_star(&s(&[0, 1, 2]));
    let c = b.certify_topology(Some(ExpectedTopology::Sphere));
    assert!(!c.is_closed_surface && !c.matches_expected);
}

#[test]
fn crossing_triangles_are_not_embedded() {
    let pts = Arc::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 1.0), p2(0.5, 0.5)]);
    // 013 folds over 012 across their shared edge
    assert!(matches!(
        SimplicialComplex::new(2, pts.clone(), [s(&[0, 1, 2]), s(&[0, 1, 3])]),
        Err(Error::NotEmbedded(_))
    ));
    let flat = Arc::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(2.0, 0.0)]);
    assert!(matches!(SimplicialComplex::new(2, flat, [s(&[0, 1, 2])]), Err(Error::NotEmbedded(_))));
}

fn random_alpha_complex(seed: u64, n: usize, alpha: f64) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n).map(|_| p3(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let a = alpha_values(delaunay(&PointCloud::external(3, pts).unwrap()).unwrap(), Execution::Sequential);
    alpha_complex(&a, alpha)
}

fn is_inside(k: &SimplicialComplex, x: &Point) -> bool {
    k.simplices(3).iter().any(|t| {
        barycentric(3, &t.points(k.points()), x).is_some_and(|b| b.iter().all(|l| *l >= -1e-12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn collapses_preserve_euler_characteristic(seed in any::<u64>(), n in 10usize..40, alpha in 0.2f64..1.0, picks in prop::collection::vec(any::<prop::sample::Index>(), 30)) {
        let mut k = random_alpha_complex(seed, n, alpha);
        let chi = k.euler_characteristic();
        for pick in picks {
            let mut free: Vec<Simplex> = k.iter().copied().filter(|t| k.is_free(t).unwrap().is_some()).collect();
            if free.is_empty() {
                break;
            }
            free.sort_unstable();
            let tau = free[pick.index(free.len())];
            prop_assert!(k.boundary().contains(&tau));
            k.collapse(&tau).unwrap();
            prop_assert_eq!(k.euler_characteristic(), chi);
            prop_assert!(k.iter().all(|t| t.faces().iter().all(|f| k.contains(f))));
        }
    }

    #[test]
    fn boundary_triangles_separate_inside_from_outside(seed in any::<u64>(), alpha in 0.3f64..1.0) {
        let k = random_alpha_complex(seed, 30, alpha);
        for f in k.boundary().simplices(2) {
            let tops = k.top_cofaces(&f).unwrap();
            if tops.len() != 1 {
                continue;
            }
            let fp = f.points(k.points());
            let apex = tops[0].minus(&f).unwrap().vertices()[0];
            let n = outward_normal(3, &fp, &k.points()[apex as usize]).unwrap();
            let c = (fp[0] + fp[1] + fp[2]) / 3.0;
            prop_assert!(!is_inside(&k, &(c + n * 1e-7)));
            prop_assert!(is_inside(&k, &(c - n * 1e-7)));
        }
    }
}
