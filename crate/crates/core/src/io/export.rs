//! CSV and mesh-file outputs.

use std::path::Path;

use serde::Serialize;

use crate::diffusion::FluxSummary;
use crate::error::Result;
use crate::forman::FormanComplex;
use crate::io::format::write_mesh;
use crate::orientation::{Cochain, OrientedComplex};

/// Writes `rows` as CSV with a header row.
pub fn write_records<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the K-cell to M-pair sidecar table.
#[derive(Clone, Debug, Serialize)]
pub struct KCellRecord {
    pub k_dim: usize,
    pub k_index: usize,
    pub top_dim: usize,
    pub top_index: usize,
    pub bottom_dim: usize,
    pub bottom_index: usize,
}

/// Writes `K` in the interchange format and its M-pair table next to it.
pub fn write_subdivision(fc: &FormanComplex, mesh_path: &Path, sidecar: &Path) -> Result<()> {
    write_mesh(fc.k().mesh(), mesh_path)?;
    let rows = (0..=fc.dim()).flat_map(|k| {
        fc.pairs(k).iter().enumerate().map(move |(i, &(c, b))| KCellRecord {
            k_dim: k,
            k_index: i,
            top_dim: c.dim,
            top_index: c.index,
            bottom_dim: b.dim,
            bottom_index: b.index,
        })
    });
    write_records(sidecar, rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct CooRecord {
    pub row: usize,
    pub col: usize,
    pub value: i32,
}

/// `∂_p` as `(row, col, value)` triplets; rows are `(p-1)`-cells.
pub fn write_boundary_coo(oc: &OrientedComplex, p: usize, path: &Path) -> Result<()> {
    let rows = oc
        .boundary_matrix(p)
        .iter()
        .map(|(&value, (row, col))| CooRecord { row, col, value })
        .collect::<Vec<_>>();
    write_records(path, rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Dimension of the M-cell at whose centroid the K-node sits.
    pub origin_dim: usize,
    pub u: f64,
}

pub fn node_records(fc: &FormanComplex, u: &Cochain) -> Vec<NodeRecord> {
    let km = fc.k().mesh();
    fc.pairs(0)
        .iter()
        .enumerate()
        .map(|(i, &(c, _))| {
            let p = km.point(i);
            NodeRecord {
                id: i,
                x: p.x,
                y: p.y,
                z: p.z,
                origin_dim: c.dim,
                u: u.values[i],
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FluxRecord {
    pub surface: String,
    pub total: f64,
    pub node_edge: f64,
    pub edge_face: f64,
    pub face_volume: f64,
}

impl FluxRecord {
    pub fn new(surface: &str, f: &FluxSummary) -> Self {
        FluxRecord {
            surface: surface.to_string(),
            total: f.total,
            node_edge: f.by_class[0],
            edge_face: f.by_class[1],
            face_volume: f.by_class[2],
        }
    }
}
