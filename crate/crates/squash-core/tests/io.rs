use std::sync::Arc;

use proptest::prelude::*;
use squash_core::geom::Point;
use squash_core::io::{
    maximal_simplices, read_edge_list, read_off, read_ply_cloud, read_ply_mesh, read_xyz, write_edge_list, write_off,
    write_ply_cloud, write_ply_mesh, write_xyz,
};
use squash_core::{sample_manifold, AnalyticManifold, Error, PointCloud, SampleSpec, Simplex, SimplicialComplex};

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1.0f64..1.0, Just(0.0), Just(1.0 / 3.0), Just(f64::MIN_POSITIVE)]
}

fn cloud(dim: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((coord(), coord(), coord()), 1..40).prop_filter_map("distinct points", move |v| {
        let pts = v.into_iter().map(|(x, y, z)| Point::new(x, y, if dim == 3 { z } else { 0.0 })).collect();
        PointCloud::external(dim, pts).ok()
    })
}

/// A random complex of dimension at most two over n points.
fn complex() -> impl Strategy<Value = SimplicialComplex> {
    (4usize..15).prop_flat_map(|n| {
        let face = prop::collection::btree_set(0..n as u32, 1..=3).prop_map(|s| Simplex::new(&s.into_iter().collect::<Vec<_>>()));
        (prop::collection::vec((coord(), coord(), coord()), n), prop::collection::vec(face, 0..12)).prop_map(|(pts, faces)| {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y, z)| Point::new(x, y, z + 1.0)).collect();
            SimplicialComplex::from_closure(3, Arc::new(pts), faces)
        })
    })
}

proptest! {
    #[test]
    fn xyz_round_trip(c in prop_oneof![cloud(2), cloud(3)]) {
        let mut buf = vec![];
        write_xyz(&mut buf, &c).unwrap();
        let back = read_xyz(buf.as_slice()).unwrap();
        prop_assert_eq!(back.dim, c.dim);
        prop_assert_eq!(back.points, c.points);
    }

    #[test]
    fn ply_cloud_round_trip(c in prop_oneof![cloud(2), cloud(3)]) {
        let mut buf = vec![];
        write_ply_cloud(&mut buf, &c).unwrap();
        let back = read_ply_cloud(buf.as_slice()).unwrap();
        prop_assert_eq!(back.dim, c.dim);
        prop_assert_eq!(back.points, c.points);
    }

    #[test]
    fn mesh_round_trips(k in complex()) {
        let mut off = vec![];
        write_off(&mut off, &k).unwrap();
        let back = read_off(off.as_slice()).unwrap();
        prop_assert!(back.same_simplices(&k));
        prop_assert_eq!(back.points().as_slice(), k.points().as_slice());

        let mut ply = vec![];
        write_ply_mesh(&mut ply, &k).unwrap();
        let back = read_ply_mesh(ply.as_slice()).unwrap();
        prop_assert!(back.same_simplices(&k));
        prop_assert_eq!(back.points().as_slice(), k.points().as_slice());
    }

    #[test]
    fn maximal_simplices_generate_the_complex(k in complex()) {
        let max = maximal_simplices(&k);
        let again = SimplicialComplex::from_closure(3, k.points().clone(), max.iter().copied());
        prop_assert!(again.same_simplices(&k));
        for (i, a) in max.iter().enumerate() {
            for b in &max[i + 1..] {
                prop_assert!(!a.is_face_of(b) && !b.is_face_of(a));
            }
        }
    }
}

#[test]
fn sampled_cloud_survives_every_format() {
    let m = AnalyticManifold::parse("torus R=3 r=1").unwrap();
    let c = sample_manifold(&SampleSpec { epsilon: 0.3, delta: 0.05, seed: 7, manifold: m }).unwrap();
    let mut xyz = vec![];
    write_xyz(&mut xyz, &c).unwrap();
    assert_eq!(read_xyz(xyz.as_slice()).unwrap().points, c.points);
    let mut ply = vec![];
    write_ply_cloud(&mut ply, &c).unwrap();
    assert_eq!(read_ply_cloud(ply.as_slice()).unwrap().points, c.points);
}

#[test]
fn planar_graph_round_trips_as_edge_list() {
    let pts = (0..6).map(|i| Point::new(i as f64 * 0.5, (i % 2) as f64, 0.0)).collect();
    let k = SimplicialComplex::from_closure(2, Arc::new(pts), [Simplex::new(&[0, 1]), Simplex::new(&[1, 2]), Simplex::new(&[4])]);
    let mut buf = vec![];
    write_edge_list(&mut buf, &k).unwrap();
    let back = read_edge_list(buf.as_slice()).unwrap();
    assert!(back.same_simplices(&k));
    assert_eq!(back.dim(), 2);
    // the planar mesh reads back as planar
    let mut off = vec![];
    write_off(&mut off, &k).unwrap();
    assert_eq!(read_off(off.as_slice()).unwrap().dim(), 2);
}

#[test]
fn malformed_files_are_rejected() {
    for bad in ["", "OFF\n", "OFF\n2 0 0\n0 0 0\n", "OFF\n1 1 0\n0 0 0\n2 0 0\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 2\n"] {
        assert!(matches!(read_off(bad.as_bytes()), Err(Error::Parse(_))), "{bad:?}");
    }
    for bad in ["", "plx\n", "ply\nformat binary_little_endian 1.0\nend_header\n", "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nend_header\n0\n"] {
        assert!(read_ply_cloud(bad.as_bytes()).is_err(), "{bad:?}");
    }
    assert!(read_xyz("1 2 3 4\n".as_bytes()).is_err());
    assert!(read_edge_list("v 0 0\ne 0 3\n".as_bytes()).is_err());
    assert!(matches!(read_edge_list("v 0 0\nv 1 0\ne 1 1\n".as_bytes()), Err(Error::Parse(_))));
    assert!(matches!(read_ply_mesh("ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0\n1 0\n2 1 1\n".as_bytes()), Err(Error::Parse(_))));
}
