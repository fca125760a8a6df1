use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use forman_core::composites::{evenly_spaced, percolation_sweep, InclusionKind, InclusionStudy};
use forman_core::diffusion::{alpha_eff_along_axis, DiffusionSystem, Solver, SolverKind};
use forman_core::forman::FormanComplex;
use forman_core::io::config::{load_mesh, plane_conditions, PlaneCondition, RunConfig};
use forman_core::io::export::{node_records, write_boundary_coo, write_records, write_subdivision, FluxRecord};
use forman_core::metric::{build_metric, CurvatureMode};
use forman_core::orientation::orient_compatibly;
use forman_core::{Error, Mesh, Result};

#[derive(Parser, Debug)]
#[command(name = "forman", version, about = "Combinatorial differential forms and diffusion on polyhedral meshes")]
struct Cli {
    /// Mesh file (.tess or interchange format) or generator spec such as `grid:20`.
    #[arg(long, global = true)]
    mesh: Option<String>,
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and mesh files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `trivial` or `curvature`.
    #[arg(long, global = true)]
    curvature: Option<CurvatureMode>,
    /// Solver tolerance (relative residual).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the mesh is manifold-like, regular and has cubical corners.
    Validate,
    /// Build the Forman subdivision and write it with its pair table.
    Subdivide {
        /// Also write the boundary matrices of M as COO CSV files.
        #[arg(long)]
        boundaries: bool,
    },
    /// Print the Betti numbers of M.
    Betti,
    /// Hodge decomposition checks for every degree.
    HodgeCheck {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Steady diffusion with Dirichlet planes from the config.
    Solve {
        #[arg(long)]
        axis: Option<usize>,
        /// Use preconditioned conjugate gradients instead of Cholesky.
        #[arg(long)]
        pcg: bool,
    },
    /// Effective diffusivity between the two bounding-box faces normal to `axis`.
    AlphaEff {
        #[arg(long)]
        axis: Option<usize>,
    },
    /// Monte Carlo percolation sweep of conductive inclusions.
    Percolate {
        /// `gnp` or `cnt`; defaults to the config value.
        #[arg(long)]
        kind: Option<InclusionKind>,
        #[arg(long)]
        paths: Option<usize>,
        /// Number of evenly spaced fractions on [0, 1].
        #[arg(long)]
        fractions: Option<usize>,
    },
}

struct Run {
    cfg: RunConfig,
    out: PathBuf,
}

impl Run {
    fn mesh(&self) -> Result<Mesh> {
        let src = self.cfg.mesh.as_deref().ok_or_else(|| Error::Config("no mesh given (use --mesh)".into()))?;
        log::info!("loading mesh {src}");
        load_mesh(src)
    }

    fn complex(&self) -> Result<FormanComplex> {
        let fc = FormanComplex::new(orient_compatibly(self.mesh()?)?)?;
        log::info!("K counts {:?}", fc.k().mesh().counts());
        Ok(fc)
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    fn axis(&self, flag: Option<usize>, mesh: &Mesh) -> Result<usize> {
        let axis = flag.or(self.cfg.axis).unwrap_or(mesh.embedding_dim().min(3) - 1);
        if axis >= mesh.embedding_dim() {
            return Err(Error::Config(format!("axis {axis} out of range for a {}D embedding", mesh.embedding_dim())));
        }
        Ok(axis)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.mesh.is_some() {
        cfg.mesh = cli.mesh;
    }
    if let Some(c) = cli.curvature {
        cfg.curvature = c;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(t) = cli.tol {
        cfg.solver.tol = t;
    }
    let out = cli.out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let run = Run { cfg, out };

    match cli.command {
        Command::Validate => validate(&run),
        Command::Subdivide { boundaries } => subdivide(&run, boundaries),
        Command::Betti => {
            let oc = orient_compatibly(run.mesh()?)?;
            let b: Vec<String> = oc.betti_numbers().iter().map(|b| b.to_string()).collect();
            println!("{}", b.join(","));
            Ok(ExitCode::SUCCESS)
        }
        Command::HodgeCheck { samples } => hodge_check(&run, samples),
        Command::Solve { axis, pcg } => solve(&run, axis, pcg),
        Command::AlphaEff { axis } => alpha_eff(&run, axis),
        Command::Percolate { kind, paths, fractions } => percolate(&run, kind, paths, fractions),
    }
}

fn validate(run: &Run) -> Result<ExitCode> {
    let mesh = run.mesh()?;
    let rep = mesh.validate();
    println!("counts: {:?}", mesh.counts());
    println!("manifold-like: {}", rep.is_manifold_like);
    println!("p-regular: {:?}", rep.p_regular);
    println!("cubical corners: {}", rep.has_cubical_corners);
    println!("boundary cells: {}", rep.boundary_cell_ids.len());
    for (what, cells) in &rep.failures {
        let shown: Vec<String> = cells.iter().take(5).map(|c| c.to_string()).collect();
        println!("FAIL {what}: {} cells ({}{})", cells.len(), shown.join(", "), if cells.len() > 5 { ", ..." } else { "" });
    }
    Ok(if rep.is_ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn subdivide(run: &Run, boundaries: bool) -> Result<ExitCode> {
    let fc = run.complex()?;
    write_subdivision(&fc, &run.path("k.mesh")?, &run.path("k_pairs.csv")?)?;
    if boundaries {
        for p in 1..=fc.m().dim() {
            write_boundary_coo(fc.m(), p, &run.path(&format!("boundary_{p}.csv"))?)?;
        }
    }
    let counts: Vec<String> = fc.k().mesh().counts().iter().map(|c| c.to_string()).collect();
    println!("{}", counts.join(","));
    Ok(ExitCode::SUCCESS)
}

fn hodge_check(run: &Run, samples: Option<usize>) -> Result<ExitCode> {
    let fc = run.complex()?;
    let mc = build_metric(&fc, run.cfg.curvature)?;
    let samples = samples.or(run.cfg.hodge_samples).unwrap_or(8);
    let rep = mc.hodge_report(samples, run.cfg.seed.unwrap_or(0))?;
    let tol = 1e-9;
    let mut ok = true;
    println!("p,kernel_dim,betti,reconstruction,orthogonality,min_eigenvalue");
    for d in &rep.degrees {
        println!("{},{},{},{:.3e},{:.3e},{:.3e}", d.p, d.kernel_dim, d.betti, d.reconstruction, d.orthogonality, d.min_eigenvalue);
        ok &= d.kernel_dim == d.betti && d.min_eigenvalue >= -1e-10;
    }
    ok &= rep.max_residual() <= tol;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn solve(run: &Run, axis: Option<usize>, pcg: bool) -> Result<ExitCode> {
    let fc = run.complex()?;
    let mc = build_metric(&fc, run.cfg.curvature)?;
    let mut planes = run.cfg.dirichlet.clone();
    if planes.is_empty() {
        let mesh = fc.m().mesh();
        let axis = run.axis(axis, mesh)?;
        let (lo, hi) = mesh.bounding_box();
        for (name, coord, value) in [("lo", lo[axis], 0.0), ("hi", hi[axis], 1.0)] {
            planes.push(PlaneCondition { name: name.into(), axis, coord, value, tol: 1e-9 });
        }
    }
    let bc = plane_conditions(&fc, &planes)?;
    let sys = DiffusionSystem::new(&mc, run.cfg.alpha.assignment(&fc)?)?;
    let mut opts = run.cfg.solver;
    if pcg {
        opts.kind = SolverKind::Pcg;
    }
    let sol = sys.solve_steady(&bc, &mut Solver::new(opts))?;
    log::info!("relative residual {:.3e}", sol.residual);
    write_records(&run.path("solution.csv")?, node_records(&fc, &sol.u))?;
    let fluxes: Vec<FluxRecord> = sol.boundary_flux.iter().map(|(s, f)| FluxRecord::new(s, f)).collect();
    write_records(&run.path("flux.csv")?, &fluxes)?;
    for f in &fluxes {
        println!("{}: {:.10}", f.surface, f.total);
    }
    Ok(ExitCode::SUCCESS)
}

fn alpha_eff(run: &Run, axis: Option<usize>) -> Result<ExitCode> {
    let fc = run.complex()?;
    let mc = build_metric(&fc, run.cfg.curvature)?;
    let axis = run.axis(axis, fc.m().mesh())?;
    let sys = DiffusionSystem::new(&mc, run.cfg.alpha.assignment(&fc)?)?;
    let res = alpha_eff_along_axis(&sys, axis, &mut Solver::new(run.cfg.solver))?;
    let rows = [FluxRecord::new("lo", &res.inlet), FluxRecord::new("hi", &res.outlet)];
    write_records(&run.path("flux.csv")?, &rows)?;
    write_records(&run.path("alpha_eff.csv")?, [AlphaEffRow { axis, alpha_eff: res.alpha_eff }])?;
    println!("alpha_eff: {:.10}", res.alpha_eff);
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct AlphaEffRow {
    axis: usize,
    alpha_eff: f64,
}

fn percolate(run: &Run, kind: Option<InclusionKind>, paths: Option<usize>, fractions: Option<usize>) -> Result<ExitCode> {
    let mut study: InclusionStudy = run.cfg.percolation.as_ref().map(|p| p.study()).unwrap_or_default();
    study.solver = run.cfg.solver;
    if let Some(k) = kind {
        study.kind = k;
    }
    if let Some(p) = paths {
        study.paths = p;
    }
    if let Some(n) = fractions {
        study.fractions = evenly_spaced(n);
    }
    if let Some(s) = run.cfg.seed {
        study.seed = s;
    }
    let fc = run.complex()?;
    let mc = build_metric(&fc, run.cfg.curvature)?;
    study.axis = run.axis(run.cfg.axis, fc.m().mesh())?;
    let curve = percolation_sweep(&study, &mc)?;
    let name = format!("percolation_{}.csv", kind_name(study.kind));
    write_records(&run.path(&name)?, &curve.points)?;
    match (curve.threshold_fraction(), curve.threshold_measure()) {
        (Some(f), Some(m)) => println!("steepest rise at fraction {f:.4}, cumulative measure {m:.4}"),
        _ => println!("no rise found"),
    }
    let failed: usize = curve.points.iter().map(|p| p.n_failed).sum();
    if failed > 0 {
        log::warn!("{failed} solves failed");
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(k: InclusionKind) -> &'static str {
    match k {
        InclusionKind::Gnp => "gnp",
        InclusionKind::Cnt => "cnt",
    }
}
