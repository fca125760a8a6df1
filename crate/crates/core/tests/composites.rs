mod common;

use common::*;
use forman_core::composites::{assign_inclusions, evenly_spaced, path_order, percolation_sweep, InclusionKind, InclusionStudy};
use forman_core::diffusion::{alpha_eff_along_axis, DiffusionSystem, Solver, SolverOptions};
use forman_core::forman::EdgeClass;
use forman_core::io::generate;
use forman_core::mesh::CellId;
use forman_core::metric::{build_metric, CurvatureMode};
use forman_core::Error;

#[test]
fn one_face_of_a_cube() {
    let fc = subdivide(generate::unit_cube_grid(1).unwrap());
    let da = assign_inclusions(&fc, InclusionKind::Gnp, 1e-10, 1.0, &[CellId::new(2, 0)]).unwrap();
    let classes = fc.classify_edges();
    let raised = |c: EdgeClass| classes.iter().zip(&da.alpha).filter(|&(&k, &a)| k == c && a == 1.0).count();
    // the face's 4 K-edges to its edges, and both halves of its 4 edges
    assert_eq!(raised(EdgeClass::EdgeFace), 4);
    assert_eq!(raised(EdgeClass::NodeEdge), 8);
    assert_eq!(raised(EdgeClass::FaceVolume), 0);

    let da = assign_inclusions(&fc, InclusionKind::Cnt, 1e-10, 1.0, &[CellId::new(1, 3)]).unwrap();
    assert_eq!(da.alpha.iter().filter(|&&a| a == 1.0).count(), 2);
}

#[test]
fn exhaustive_and_empty_selections() {
    let fc = subdivide(generate::unit_cube_grid(2).unwrap());
    let da = assign_inclusions(&fc, InclusionKind::Gnp, 1e-10, 1.0, &[]).unwrap();
    assert!(da.alpha.iter().all(|&a| a == 1e-10));
    let all: Vec<CellId> = fc.m().mesh().cells(2).collect();
    let da = assign_inclusions(&fc, InclusionKind::Gnp, 1e-10, 1.0, &all).unwrap();
    for (c, a) in fc.classify_edges().iter().zip(&da.alpha) {
        let want = if *c == EdgeClass::FaceVolume { 1e-10 } else { 1.0 };
        assert_eq!(*a, want);
    }
    assert!(matches!(
        assign_inclusions(&fc, InclusionKind::Cnt, 1e-10, 1.0, &[CellId::new(2, 0)]),
        Err(Error::DimensionMismatch { expected: 1, got: 2 })
    ));
}

fn small_study(kind: InclusionKind) -> InclusionStudy {
    InclusionStudy {
        kind,
        fractions: evenly_spaced(6),
        paths: 3,
        seed: 42,
        ..InclusionStudy::default()
    }
}

#[test]
fn sweep_endpoints_and_monotonicity() {
    let fc = subdivide(generate::unit_cube_grid(3).unwrap());
    let mc = build_metric(&fc, CurvatureMode::Curvature).unwrap();
    let curve = percolation_sweep(&small_study(InclusionKind::Gnp), &mc).unwrap();
    assert!(curve.points[0].mean_alpha_eff <= 2e-10);
    assert_eq!(curve.points[0].cumulative_measure, 0.0);
    let total_area: f64 = fc.m().mesh().measures(2).iter().sum();
    assert!((curve.points[5].cumulative_measure - total_area).abs() < 1e-12);
    for path in &curve.samples {
        for w in path.windows(2) {
            let (a, b) = (w[0].unwrap(), w[1].unwrap());
            assert!(b >= a * (1.0 - 1e-9), "{a} -> {b}");
        }
    }
    assert!(curve.points.iter().all(|p| p.n_failed == 0));

    // full coverage against one deterministic solve
    let all: Vec<CellId> = fc.m().mesh().cells(2).collect();
    let da = assign_inclusions(&fc, InclusionKind::Gnp, 1e-10, 1.0, &all).unwrap();
    let sys = DiffusionSystem::new(&mc, da).unwrap();
    let want = alpha_eff_along_axis(&sys, 2, &mut Solver::new(SolverOptions::default())).unwrap().alpha_eff;
    let got = curve.points[5].mean_alpha_eff;
    assert!((got - want).abs() <= 0.1 * want);
}

#[test]
fn sweeps_are_reproducible() {
    let fc = subdivide(generate::unit_cube_grid(2).unwrap());
    let mc = build_metric(&fc, CurvatureMode::Curvature).unwrap();
    let study = small_study(InclusionKind::Cnt);
    let a = percolation_sweep(&study, &mc).unwrap();
    let b = percolation_sweep(&study, &mc).unwrap();
    assert_eq!(a, b);
    let other = InclusionStudy { seed: 43, ..study.clone() };
    assert_ne!(path_order(&study, 50, 0), path_order(&other, 50, 0));
    assert_ne!(path_order(&study, 50, 0), path_order(&study, 50, 1));
}

#[test]
fn invalid_studies_are_rejected() {
    let fc = subdivide(generate::unit_cube_grid(1).unwrap());
    let mc = build_metric(&fc, CurvatureMode::Curvature).unwrap();
    let bad = InclusionStudy { paths: 0, ..small_study(InclusionKind::Gnp) };
    assert!(matches!(percolation_sweep(&bad, &mc), Err(Error::Config(_))));
    let bad = InclusionStudy { fractions: vec![0.5, 0.2], ..small_study(InclusionKind::Gnp) };
    assert!(matches!(percolation_sweep(&bad, &mc), Err(Error::Config(_))));

    let fc = subdivide(generate::interval(3, 1.0).unwrap());
    let mc = build_metric(&fc, CurvatureMode::Curvature).unwrap();
    assert!(matches!(
        percolation_sweep(&small_study(InclusionKind::Gnp), &mc),
        Err(Error::DimensionMismatch { .. })
    ));
}
