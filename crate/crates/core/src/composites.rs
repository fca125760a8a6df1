//! Percolation of conductive inclusions through an insulating matrix.
//!
//! Graphene plates (GNP) sit on 2-cells of `M`, nanotubes (CNT) on 1-cells.
//! Inclusions are switched on in a random order and the effective
//! diffusivity is measured at each fraction of covered cells.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{alpha_eff_along_axis, DiffusionSystem, DiffusivityAssignment, Solver, SolverOptions};
use crate::error::{Error, Result};
use crate::forman::FormanComplex;
use crate::mesh::CellId;
use crate::metric::MetricContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InclusionKind {
    Gnp,
    Cnt,
}

impl InclusionKind {
    /// Dimension of the M-cells carrying the inclusions.
    pub fn cell_dim(self) -> usize {
        match self {
            InclusionKind::Gnp => 2,
            InclusionKind::Cnt => 1,
        }
    }
}

impl std::str::FromStr for InclusionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gnp" => Ok(InclusionKind::Gnp),
            "cnt" => Ok(InclusionKind::Cnt),
            _ => Err(Error::Config(format!("unknown inclusion kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InclusionStudy {
    pub kind: InclusionKind,
    pub matrix_alpha: f64,
    pub inclusion_alpha: f64,
    pub fractions: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    /// Axis of the applied gradient.
    pub axis: usize,
    pub solver: SolverOptions,
}

impl Default for InclusionStudy {
    fn default() -> Self {
        InclusionStudy {
            kind: InclusionKind::Gnp,
            matrix_alpha: 1e-10,
            inclusion_alpha: 1.0,
            fractions: evenly_spaced(51),
            paths: 200,
            seed: 0,
            axis: 2,
            solver: SolverOptions::default(),
        }
    }
}

impl InclusionStudy {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::Config("paths must be at least 1".into()));
        }
        if self.fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || self.fractions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("fractions must be sorted and lie in [0, 1]".into()));
        }
        if !(self.matrix_alpha > 0.0) || !(self.inclusion_alpha > 0.0) {
            return Err(Error::Config("diffusivities must be positive".into()));
        }
        Ok(())
    }
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn evenly_spaced(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Matrix diffusivity everywhere, raised to `inclusion_alpha` on the K-edges
/// of the selected cells: for a GNP face `f` the pairs `(b₁ ≺ f)` and
/// `(b₀ ≺ b₁)` for each edge `b₁` of `f`; for a CNT edge `e` the pairs `(b₀ ≺ e)`.
pub fn assign_inclusions(
    fc: &FormanComplex,
    kind: InclusionKind,
    matrix_alpha: f64,
    inclusion_alpha: f64,
    selected: &[CellId],
) -> Result<DiffusivityAssignment> {
    let mut alpha = vec![matrix_alpha; fc.k().count(1)];
    let mesh = fc.m().mesh();
    let raise = |c: CellId, b: CellId, alpha: &mut Vec<f64>| -> Result<()> {
        let e = fc.kcell_of_pair(c, b)?.index;
        alpha[e] = alpha[e].max(inclusion_alpha);
        Ok(())
    };
    for &c in selected {
        if c.dim != kind.cell_dim() {
            return Err(Error::DimensionMismatch { expected: kind.cell_dim(), got: c.dim });
        }
        for &e in mesh.faces(c, c.dim - 1) {
            let e = CellId::new(c.dim - 1, e);
            raise(c, e, &mut alpha)?;
            if kind == InclusionKind::Gnp {
                for &v in mesh.faces(e, 0) {
                    raise(e, CellId::new(0, v), &mut alpha)?;
                }
            }
        }
    }
    DiffusivityAssignment::from_values(fc, alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub fraction: f64,
    /// Inclusion area (GNP) or length (CNT), averaged over paths.
    pub cumulative_measure: f64,
    pub mean_alpha_eff: f64,
    pub std: f64,
    pub n_failed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PercolationCurve {
    pub kind: InclusionKind,
    pub points: Vec<CurvePoint>,
    /// `samples[path][i]`: `α_eff` at fraction `i`, `None` if the solve failed.
    pub samples: Vec<Vec<Option<f64>>>,
}

impl PercolationCurve {
    /// Interval `(i, i+1)` with the largest increase of `log10` mean `α_eff`.
    pub fn steepest_rise(&self) -> Option<usize> {
        let logs: Vec<f64> = self.points.iter().map(|p| p.mean_alpha_eff.log10()).collect();
        (0..logs.len().saturating_sub(1))
            .filter(|&i| logs[i].is_finite() && logs[i + 1].is_finite())
            .max_by(|&i, &j| (logs[i + 1] - logs[i]).total_cmp(&(logs[j + 1] - logs[j])))
    }

    /// Midpoint cumulative measure of the steepest rise.
    pub fn threshold_measure(&self) -> Option<f64> {
        self.steepest_rise()
            .map(|i| 0.5 * (self.points[i].cumulative_measure + self.points[i + 1].cumulative_measure))
    }

    /// Midpoint covered fraction of the steepest rise.
    pub fn threshold_fraction(&self) -> Option<f64> {
        self.steepest_rise()
            .map(|i| 0.5 * (self.points[i].fraction + self.points[i + 1].fraction))
    }
}

/// Random order of the candidate cells for one Monte Carlo path.
pub fn path_order(study: &InclusionStudy, n: usize, path: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(study.seed);
    rng.set_stream(path as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

/// Runs every path of `study`; paths are independent and run in parallel.
pub fn percolation_sweep(study: &InclusionStudy, mc: &MetricContext) -> Result<PercolationCurve> {
    study.validate()?;
    let fc = mc.complex();
    let mesh = fc.m().mesh();
    let dim = study.kind.cell_dim();
    if mesh.dim() < dim {
        return Err(Error::DimensionMismatch { expected: dim, got: mesh.dim() });
    }
    let n = mesh.count(dim);
    let measures = mesh.measures(dim);

    let run_path = |path: usize| -> (Vec<Option<f64>>, Vec<f64>) {
        let order = path_order(study, n, path);
        let mut solver = Solver::new(study.solver);
        let mut alphas = Vec::with_capacity(study.fractions.len());
        let mut covered = Vec::with_capacity(study.fractions.len());
        for &f in &study.fractions {
            let k = (f * n as f64).round() as usize;
            let selected: Vec<CellId> = order[..k].iter().map(|&i| CellId::new(dim, i)).collect();
            covered.push(order[..k].iter().map(|&i| measures[i]).sum());
            let sample = assign_inclusions(fc, study.kind, study.matrix_alpha, study.inclusion_alpha, &selected)
                .and_then(|da| DiffusionSystem::new(mc, da))
                .and_then(|sys| alpha_eff_along_axis(&sys, study.axis, &mut solver));
            match sample {
                Ok(run) => alphas.push(Some(run.alpha_eff)),
                Err(e) => {
                    log::warn!("path {path}, fraction {f}: {e}");
                    alphas.push(None);
                }
            }
        }
        log::debug!("path {path} done");
        (alphas, covered)
    };
    let results: Vec<(Vec<Option<f64>>, Vec<f64>)> = (0..study.paths).into_par_iter().map(run_path).collect();

    let points = study
        .fractions
        .iter()
        .enumerate()
        .map(|(i, &fraction)| {
            let ok: Vec<f64> = results.iter().filter_map(|(a, _)| a[i]).collect();
            let mean = ok.iter().sum::<f64>() / ok.len() as f64;
            let var = if ok.len() > 1 {
                ok.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (ok.len() - 1) as f64
            } else {
                0.0
            };
            CurvePoint {
                fraction,
                cumulative_measure: results.iter().map(|(_, c)| c[i]).sum::<f64>() / results.len() as f64,
                mean_alpha_eff: mean,
                std: var.sqrt(),
                n_failed: results.len() - ok.len(),
            }
        })
        .collect();
    Ok(PercolationCurve {
        kind: study.kind,
        points,
        samples: results.into_iter().map(|(a, _)| a).collect(),
    })
}
