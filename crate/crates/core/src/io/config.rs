//! Run configuration (TOML) and mesh sources.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::composites::{evenly_spaced, InclusionStudy};
use crate::diffusion::{plane_nodes, AxisPlane, BoundaryConditionSet, DiffusivityAssignment, SolverOptions};
use crate::error::{Error, Result};
use crate::forman::FormanComplex;
use crate::io::{format, generate, tess};
use crate::mesh::Mesh;
use crate::metric::CurvatureMode;

/// Everything a run can be configured with; command-line flags override it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mesh file or generator spec, see [`load_mesh`].
    pub mesh: Option<String>,
    pub curvature: CurvatureMode,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub alpha: AlphaSpec,
    /// Dirichlet planes for `solve`; empty means `u = 0` / `u = 1` on the
    /// low / high faces along `axis`.
    pub dirichlet: Vec<PlaneCondition>,
    pub axis: Option<usize>,
    pub solver: SolverOptions,
    pub percolation: Option<PercolationConfig>,
    /// Random samples per degree in `hodge-check`.
    pub hodge_samples: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Diffusivity per edge class; unset classes take `uniform` (default 1).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSpec {
    pub uniform: Option<f64>,
    pub node_edge: Option<f64>,
    pub edge_face: Option<f64>,
    pub face_volume: Option<f64>,
}

impl AlphaSpec {
    pub fn assignment(&self, fc: &FormanComplex) -> Result<DiffusivityAssignment> {
        let u = self.uniform.unwrap_or(1.0);
        DiffusivityAssignment::by_class(
            fc,
            [self.node_edge.unwrap_or(u), self.edge_face.unwrap_or(u), self.face_volume.unwrap_or(u)],
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneCondition {
    pub name: String,
    pub axis: usize,
    pub coord: f64,
    pub value: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-9
}

/// Dirichlet conditions on the given planes, each registered as a named surface.
pub fn plane_conditions(fc: &FormanComplex, planes: &[PlaneCondition]) -> Result<BoundaryConditionSet> {
    let mut bc = BoundaryConditionSet::new();
    for p in planes {
        if p.axis > 2 {
            return Err(Error::Config(format!("axis {} out of range", p.axis)));
        }
        let nodes = plane_nodes(fc, AxisPlane::new(p.axis, p.coord), p.tol);
        if nodes.is_empty() {
            return Err(Error::Config(format!("plane `{}` contains no mesh cells", p.name)));
        }
        bc.dirichlet_surface(&p.name, nodes, p.value);
    }
    bc.validate()?;
    Ok(bc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PercolationConfig {
    #[serde(flatten)]
    pub study: InclusionStudy,
    /// Replaces `fractions` by this many evenly spaced points on `[0, 1]`.
    pub fraction_count: Option<usize>,
}

impl Default for PercolationConfig {
    fn default() -> Self {
        PercolationConfig {
            study: InclusionStudy::default(),
            fraction_count: None,
        }
    }
}

impl PercolationConfig {
    pub fn study(&self) -> InclusionStudy {
        let mut s = self.study.clone();
        if let Some(n) = self.fraction_count {
            s.fractions = evenly_spaced(n);
        }
        s
    }
}

/// Loads a mesh from a file (`.tess` or the interchange format) or builds one
/// from a generator spec: `grid:N`, `grid:NXxNYxNZ`, `square:N`,
/// `interval:N`, `torus:NU,NV`, `annulus`, `tetrahedron`, `pyramid`.
pub fn load_mesh(source: &str) -> Result<Mesh> {
    let bad = || Error::Config(format!("invalid mesh spec `{source}`"));
    let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((kind, arg)) = source.split_once(':') {
        match kind {
            "grid" => {
                let dims: Vec<usize> = arg.split('x').map(int).collect::<Result<_>>()?;
                return match dims[..] {
                    [n] => generate::unit_cube_grid(n),
                    [a, b, c] => generate::box_grid([a, b, c], crate::Point::zeros(), crate::Point::new(1.0, 1.0, 1.0)),
                    _ => Err(bad()),
                };
            }
            "square" => {
                let n = int(arg)?;
                return generate::square_grid(n, n);
            }
            "interval" => return generate::interval(int(arg)?, 1.0),
            "torus" => {
                let (a, b) = arg.split_once(',').ok_or_else(bad)?;
                return generate::torus(int(a)?, int(b)?, 2.0, 0.7);
            }
            _ => {}
        }
    }
    match source {
        "annulus" => return generate::annulus(),
        "tetrahedron" => return generate::tetrahedron(),
        "pyramid" => return generate::square_pyramid(),
        _ => {}
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Error::Config(format!("mesh `{source}` is neither a file nor a generator spec")));
    }
    if path.extension().is_some_and(|e| e == "tess") {
        tess::read_tess(path)
    } else {
        format::read_mesh(path)
    }
}
