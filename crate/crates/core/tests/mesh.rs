use approx::assert_abs_diff_eq;
use forman_core::io::generate;
use forman_core::mesh::{polygon_area, triangle_area, CellId, Mesh, MeshBuilder, Point};
use forman_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square() -> Mesh {
    let v = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
    ];
    let mut b = MeshBuilder::new(2, v);
    b.polygon(&[0, 1, 2, 3]);
    b.build().unwrap()
}

#[test]
fn unit_square_poset_sizes() {
    let m = unit_square();
    assert_eq!(m.counts(), vec![4, 4, 1]);
    assert_eq!(m.faces(CellId::new(2, 0), 0), &[0, 1, 2, 3]);
    assert_abs_diff_eq!(m.measure(CellId::new(2, 0)), 1.0, epsilon = 1e-15);
}

#[test]
fn two_triangles_accepted() {
    let m = generate::two_triangles().unwrap();
    assert_eq!(m.counts(), vec![4, 5, 2]);
    let shared = m.hypercofaces(CellId::new(1, 2));
    assert_eq!(shared, &[0, 1]);
}

#[test]
fn dangling_reference_is_missing_face() {
    let v = (0..4).map(|i| Point::new(i as f64, 0.0, 0.0)).collect();
    let err = Mesh::new(1, v, vec![vec![vec![0, 1], vec![1, 99]]]).unwrap_err();
    assert!(matches!(err, Error::MissingFace { face: 99, .. }), "{err}");
}

#[test]
fn diamond_violation_detected() {
    // a "square" whose boundary uses a vertex three times
    let v = (0..4).map(|i| Point::new(i as f64, (i % 2) as f64, 0.0)).collect();
    let edges = vec![vec![0, 1], vec![1, 2], vec![2, 0], vec![1, 3]];
    let err = Mesh::new(2, v, vec![edges, vec![vec![0, 1, 2, 3]]]).unwrap_err();
    assert!(matches!(err, Error::DiamondViolation { .. }), "{err}");
}

#[test]
fn cube_grid_is_manifold_with_cubical_corners() {
    let m = generate::unit_cube_grid(2).unwrap();
    let r = m.validate();
    assert!(r.is_manifold_like);
    assert!(r.has_cubical_corners);
    assert!(r.is_ok());
    assert_eq!(r.boundary_cell_ids.len(), 24);
}

#[test]
fn pyramid_lacks_cubical_corners() {
    let m = generate::square_pyramid().unwrap();
    let r = m.validate();
    assert!(r.is_manifold_like);
    assert!(!r.has_cubical_corners);
    assert!(r.failures.iter().any(|(rule, _)| rule.contains("cubical")));
}

#[test]
fn bow_tie_is_not_zero_regular() {
    let m = generate::bow_tie().unwrap();
    let r = m.validate();
    assert_eq!(r.p_regular, vec![false]);
    assert!(!r.is_manifold_like);
}

#[test]
fn boundary_of_single_cube() {
    let m = generate::unit_cube_grid(1).unwrap();
    let b = m.boundary_submesh().unwrap();
    assert_eq!(b.counts(), vec![8, 12, 6]);
    let bb = b.boundary_submesh().unwrap();
    assert_eq!(bb.count(0), 0);
    // closed: every edge of the surface has two faces
    for e in b.cells(1) {
        assert_eq!(b.hypercofaces(e).len(), 2);
    }
}

#[test]
fn torus_has_empty_boundary() {
    let m = generate::torus(6, 4, 2.0, 0.5).unwrap();
    assert!(m.validate().boundary_cell_ids.is_empty());
    assert_eq!(m.boundary_submesh().unwrap().count(0), 0);
}

#[test]
fn interval_boundary_is_two_nodes() {
    let m = generate::interval(2, 1.0).unwrap();
    let b = m.boundary_submesh().unwrap();
    assert_eq!(b.counts(), vec![2]);
    assert_eq!(b.vertices()[0].x, 0.0);
    assert_eq!(b.vertices()[1].x, 1.0);
}

#[test]
fn non_planar_quad_area_matches_triangle_oracle() {
    let eps = 1e-3;
    let p = [
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, eps),
        Point::new(0.0, 1.0, 0.0),
    ];
    // split along the diagonal from vertex 0
    let oracle = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm() + 0.5 * (p[2] - p[0]).cross(&(p[3] - p[0])).norm();
    assert_abs_diff_eq!(polygon_area(&p, Some(0)), oracle, epsilon = 1e-12);
    let other = triangle_area(&p[1], &p[2], &p[3]) + triangle_area(&p[1], &p[3], &p[0]);
    assert_abs_diff_eq!(polygon_area(&p, Some(1)), other, epsilon = 1e-12);
    // for small warping both diagonals agree closely
    let e2 = 1e-7;
    let q = [p[0], p[1], Point::new(1.0, 1.0, e2), p[3]];
    assert_abs_diff_eq!(polygon_area(&q, Some(0)), polygon_area(&q, Some(1)), epsilon = 1e-12);
}

#[test]
fn regular_tetrahedron_volume() {
    let m = generate::tetrahedron().unwrap();
    assert_abs_diff_eq!(m.measure(CellId::new(3, 0)), 1.0 / (6.0 * 2f64.sqrt()), epsilon = 1e-14);
}

#[test]
fn centroids() {
    let m = generate::unit_cube_grid(1).unwrap();
    let c = m.centroid(CellId::new(3, 0));
    assert_abs_diff_eq!((c - Point::repeat(0.5)).norm(), 0.0, epsilon = 1e-15);
    let v = vec![Point::new(0.0, 0.0, 0.0), Point::new(2.0, 0.0, 0.0), Point::new(0.0, 1.0, 0.0)];
    let mut b = MeshBuilder::new(2, v);
    b.polygon(&[0, 1, 2]);
    let t = b.build().unwrap();
    let e = t.cells(1).find(|&e| t.cell_vertices(e) == [0, 1]).unwrap();
    assert_eq!(t.centroid(e), Point::new(1.0, 0.0, 0.0));
    let g = t.centroid(CellId::new(2, 0));
    assert_abs_diff_eq!((g - Point::new(2.0 / 3.0, 1.0 / 3.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn angle_measures() {
    let sq = unit_square();
    assert_abs_diff_eq!(sq.angle_measure(CellId::new(2, 0), 0).unwrap(), 0.25, epsilon = 1e-15);
    let cube = generate::unit_cube_grid(1).unwrap();
    assert_abs_diff_eq!(cube.angle_measure(CellId::new(3, 0), 0).unwrap(), 0.125, epsilon = 1e-15);
    let iv = generate::interval(2, 1.0).unwrap();
    assert_eq!(iv.angle_measure(CellId::new(1, 0), 0).unwrap(), 0.5);
    assert!(matches!(
        sq.angle_measure(CellId::new(1, 0), 3),
        Err(Error::NotIncident { .. })
    ));
}

#[test]
fn pyramid_apex_solid_angle_against_monte_carlo() {
    let m = generate::square_pyramid().unwrap();
    let apex = 4;
    let theta = m.angle_measure(CellId::new(3, 0), apex).unwrap();
    // rays from the apex: inside the cone iff they hit the base square
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 200_000;
    let mut hits = 0;
    for _ in 0..n {
        let d = loop {
            let v = Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let r = v.norm();
            if r > 1e-3 && r <= 1.0 {
                break v / r;
            }
        };
        if d.z < 0.0 {
            let t = -1.0 / d.z;
            let (x, y) = (0.5 + t * d.x, 0.5 + t * d.y);
            if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
                hits += 1;
            }
        }
    }
    let mc = hits as f64 / n as f64;
    let sigma = (mc * (1.0 - mc) / n as f64).sqrt();
    assert!((theta - mc).abs() < 5.0 * sigma, "{theta} vs {mc}");
}

#[test]
fn curvature_on_cube_grid() {
    let m = generate::unit_cube_grid(3).unwrap();
    for v in 0..m.count(0) {
        let p = m.point(v);
        let on = [p.x, p.y, p.z].iter().filter(|&&x| x == 0.0 || x == 1.0).count();
        let expected = [1.0, 2.0, 4.0, 8.0][on];
        assert_abs_diff_eq!(m.node_curvature(v).unwrap(), expected, epsilon = 1e-9);
    }
    let iv = generate::interval(2, 1.0).unwrap();
    assert_abs_diff_eq!(iv.node_curvature(0).unwrap(), 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(iv.node_curvature(1).unwrap(), 1.0, epsilon = 1e-15);
}

#[test]
fn interior_angle_sums_are_one_on_distorted_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = jittered_grid(3, 0.15, &mut rng);
    let flags = m.boundary_flags();
    for v in 0..m.count(0) {
        if flags[0][v] {
            continue;
        }
        let s: f64 = m
            .cofaces(CellId::new(0, v), 3)
            .iter()
            .map(|&c| m.angle_measure(CellId::new(3, c), v).unwrap())
            .sum();
        // planar faces are not guaranteed, so this only holds approximately
        assert!((s - 1.0).abs() < 0.05, "{s}");
    }
}

fn jittered_grid(n: usize, amp: f64, rng: &mut ChaCha8Rng) -> Mesh {
    let g = generate::unit_cube_grid(n).unwrap();
    let h = 1.0 / n as f64;
    let verts: Vec<Point> = g
        .vertices()
        .iter()
        .map(|p| {
            let mut q = *p;
            for k in 0..3 {
                if q[k] > 0.0 && q[k] < 1.0 {
                    q[k] += amp * h * rng.random_range(-1.0..1.0);
                }
            }
            q
        })
        .collect();
    Mesh::new(3, verts, g.tables()).unwrap()
}

#[test]
fn grid_volumes_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = jittered_grid(4, 0.2, &mut rng);
    assert_abs_diff_eq!(m.total_measure(), 1.0, epsilon = 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_convex_polygon_area_independent_of_fan(n in 3usize..9, rot in 0.0f64..6.28, r in 0.1f64..5.0, apex in 0usize..9) {
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = rot + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point::new(r * t.cos(), r * t.sin(), 0.0)
            })
            .collect();
        let exact = 0.5 * n as f64 * r * r * (2.0 * std::f64::consts::PI / n as f64).sin();
        prop_assert!((polygon_area(&pts, None) - exact).abs() < 1e-10 * exact.max(1.0));
        prop_assert!((polygon_area(&pts, Some(apex % n)) - exact).abs() < 1e-10 * exact.max(1.0));
    }

    #[test]
    fn diamonds_hold_on_grids(n in 1usize..4) {
        let m = generate::unit_cube_grid(n).unwrap();
        for c in m.cells(3) {
            for &a in m.faces(c, 1) {
                let between = m
                    .faces(c, 2)
                    .iter()
                    .filter(|&&f| m.is_face(CellId::new(1, a), CellId::new(2, f)))
                    .count();
                prop_assert_eq!(between, 2);
            }
        }
        prop_assert_eq!(m.counts(), vec![(n + 1).pow(3), 3 * n * (n + 1).pow(2), 3 * n * n * (n + 1), n.pow(3)]);
    }

    #[test]
    fn jittered_volumes_tile_the_cube(seed in 0u64..1000, amp in 0.0f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = jittered_grid(2, amp, &mut rng);
        prop_assert!((m.total_measure() - 1.0).abs() < 1e-10);
    }
}
