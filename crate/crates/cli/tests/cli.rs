use std::path::Path;
use std::process::{Command, Output};

fn forman(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forman"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn alpha_eff_on_a_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["alpha-eff", "--mesh", "grid:2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1.5625000000"), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("alpha_eff.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("axis,alpha_eff"));
    let value: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.5625).abs() < 1e-10);
    let flux = std::fs::read_to_string(dir.path().join("flux.csv")).unwrap();
    assert!(flux.starts_with("surface,total,node_edge,edge_face,face_volume\n"));
    assert_eq!(flux.lines().count(), 3);
}

#[test]
fn betti_numbers_of_a_torus() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["betti", "--mesh", "torus:6,4"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1,2,1");
}

#[test]
fn validate_rejects_non_cubical_corners() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["validate", "--mesh", "pyramid"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("cubical corners: false"));
    let o = forman(&["validate", "--mesh", "grid:2"], dir.path());
    assert!(o.status.success());
    let o = forman(&["subdivide", "--mesh", "pyramid"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn subdivide_writes_the_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["subdivide", "--mesh", "grid:1", "--boundaries"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "27,54,36,8");
    for f in ["k.mesh", "k_pairs.csv", "boundary_1.csv", "boundary_2.csv", "boundary_3.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn solve_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        mesh = "grid:2"
        [[dirichlet]]
        name = "left"
        axis = 0
        coord = 0.0
        value = 1.0
        [[dirichlet]]
        name = "right"
        axis = 0
        coord = 1.0
        value = 3.0
        "#,
    )
    .unwrap();
    let o = forman(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    // flux is twice the unit-gradient flux
    assert!(text.contains("left: 3.1250000000") && text.contains("right: 3.1250000000"), "{text}");
    let sol = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert_eq!(sol.lines().count(), 1 + 125);
    let pcg = forman(&["solve", "--pcg", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(pcg.status.success());
}

#[test]
fn hodge_check_passes_on_an_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["hodge-check", "--mesh", "annulus"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let t = stdout(&o);
    assert!(t.contains("\n1,1,1,"), "{t}");
}

#[test]
fn percolation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["percolate", "--mesh", "grid:2", "--kind", "gnp", "--paths", "3", "--fractions", "5", "--seed", "11"];
    let a = forman(&args, dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let first = std::fs::read(dir.path().join("percolation_gnp.csv")).unwrap();
    let b = forman(&args, dir.path());
    assert!(b.status.success());
    assert_eq!(first, std::fs::read(dir.path().join("percolation_gnp.csv")).unwrap());
    assert!(String::from_utf8_lossy(&first).starts_with("fraction,cumulative_measure,mean_alpha_eff,std,n_failed\n"));
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = forman(&["betti", "--mesh", "/no/such/mesh"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = forman(&["betti"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = forman(&["frobnicate"], dir.path());
    assert!(!o.status.success());
}
