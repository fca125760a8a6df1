//! Polytopal meshes stored as face posets.

mod csr;
mod geometry;
mod validate;

use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use csr::Csr;
pub use geometry::{polygon_area, solid_angle, triangle_area};
pub use validate::ValidationReport;

pub type Point = Vector3<f64>;

/// A cell addressed by its dimension and its index within that dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub dim: usize,
    pub index: usize,
}

impl CellId {
    pub fn new(dim: usize, index: usize) -> Self {
        CellId { dim, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-cell #{}", self.dim, self.index)
    }
}

/// Immutable polytopal cell complex.
///
/// `down[p][r]` lists the `r`-faces of every `p`-cell (sorted) and `up[r][p]`
/// its transpose, for every `r <= p`. The diagonal entries are identities so
/// that `faces(c, c.dim)` is just `[c.index]`.
#[derive(Clone, Debug)]
pub struct Mesh {
    embedding_dim: usize,
    dim: usize,
    vertices: Vec<Point>,
    down: Vec<Vec<Csr>>,
    up: Vec<Vec<Csr>>,
    loops: Vec<Vec<usize>>,
    apex: Option<Vec<usize>>,
    centroids: Vec<Vec<Point>>,
    measures: Vec<Vec<f64>>,
    scale: f64,
}

impl Mesh {
    /// Builds a mesh from vertex coordinates and hyperface tables.
    ///
    /// `tables[p - 1][i]` lists the `(p-1)`-cell indices bounding `p`-cell `i`.
    /// Coordinates beyond `embedding_dim` are ignored.
    pub fn new(embedding_dim: usize, vertices: Vec<Point>, tables: Vec<Vec<Vec<usize>>>) -> Result<Mesh> {
        Self::build(embedding_dim, vertices, tables, None)
    }

    /// Like [`Mesh::new`], but 2-cells are triangulated as a fan from the
    /// given vertex (one per 2-cell) instead of from their centroid.
    pub fn with_fan_apices(
        embedding_dim: usize,
        vertices: Vec<Point>,
        tables: Vec<Vec<Vec<usize>>>,
        apex: Vec<usize>,
    ) -> Result<Mesh> {
        Self::build(embedding_dim, vertices, tables, Some(apex))
    }

    fn build(
        embedding_dim: usize,
        mut vertices: Vec<Point>,
        mut tables: Vec<Vec<Vec<usize>>>,
        apex: Option<Vec<usize>>,
    ) -> Result<Mesh> {
        if !(1..=3).contains(&embedding_dim) {
            return Err(Error::InvalidGeometry(format!(
                "embedding dimension {embedding_dim} not in 1..=3"
            )));
        }
        for v in vertices.iter_mut() {
            for k in embedding_dim..3 {
                v[k] = 0.0;
            }
        }
        while tables.last().is_some_and(|t| t.is_empty()) {
            tables.pop();
        }
        let dim = tables.len();
        if dim > embedding_dim {
            return Err(Error::InvalidGeometry(format!(
                "{dim}-cells cannot live in {embedding_dim} dimensions"
            )));
        }

        let mut counts = vec![vertices.len()];
        counts.extend(tables.iter().map(|t| t.len()));

        let mut hyper: Vec<Csr> = vec![Csr::default()];
        for (k, table) in tables.iter().enumerate() {
            let p = k + 1;
            let mut csr = Csr::default();
            for (i, cell) in table.iter().enumerate() {
                let id = CellId::new(p, i);
                let mut row = cell.clone();
                for &f in &row {
                    if f >= counts[p - 1] {
                        return Err(Error::MissingFace { cell: id, dim: p - 1, face: f });
                    }
                }
                row.sort_unstable();
                let n = row.len();
                row.dedup();
                if row.len() != n {
                    return Err(Error::InvalidCell { cell: id, reason: "repeated hyperface".into() });
                }
                if p == 1 && row.len() != 2 {
                    return Err(Error::InvalidCell { cell: id, reason: "an edge needs two endpoints".into() });
                }
                if row.len() < p + 1 {
                    return Err(Error::InvalidCell {
                        cell: id,
                        reason: format!("only {} hyperfaces", row.len()),
                    });
                }
                csr.push_row(&row);
            }
            hyper.push(csr);
        }

        // down[p][r]: transitive closure of the hyperface relation
        let mut down: Vec<Vec<Csr>> = Vec::with_capacity(dim + 1);
        for p in 0..=dim {
            let mut row_tables = Vec::with_capacity(p + 1);
            for r in 0..=p {
                let t = if r == p {
                    Csr::identity(counts[p])
                } else if r + 1 == p {
                    hyper[p].clone()
                } else {
                    let mut t = Csr::default();
                    let mut buf = Vec::new();
                    for i in 0..counts[p] {
                        buf.clear();
                        for &h in hyper[p].row(i) {
                            buf.extend_from_slice(down[p - 1][r].row(h));
                        }
                        buf.sort_unstable();
                        buf.dedup();
                        t.push_row(&buf);
                    }
                    t
                };
                row_tables.push(t);
            }
            down.push(row_tables);
        }
        let mut up: Vec<Vec<Csr>> = (0..=dim).map(|_| Vec::new()).collect();
        for r in 0..=dim {
            for p in 0..=dim {
                if p < r {
                    up[r].push(Csr::default());
                } else {
                    up[r].push(down[p][r].transpose(counts[r]));
                }
            }
        }

        let mut mesh = Mesh {
            embedding_dim,
            dim,
            vertices,
            down,
            up,
            loops: Vec::new(),
            apex: None,
            centroids: Vec::new(),
            measures: Vec::new(),
            scale: 1.0,
        };
        mesh.check_diamonds()?;
        if dim >= 2 {
            mesh.loops = (0..mesh.count(2))
                .map(|f| mesh.walk_loop(f))
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(a) = apex {
            if a.len() != mesh.count(2) {
                return Err(Error::InvalidGeometry("one fan apex per 2-cell required".into()));
            }
            for (f, &v) in a.iter().enumerate() {
                if !mesh.loops[f].contains(&v) {
                    return Err(Error::NotIncident {
                        cell: CellId::new(2, f),
                        face: CellId::new(0, v),
                    });
                }
            }
            mesh.apex = Some(a);
        }
        mesh.compute_geometry()?;
        Ok(mesh)
    }

    fn check_diamonds(&self) -> Result<()> {
        for p in 2..=self.dim {
            for c in 0..self.count(p) {
                for &a in self.down[p][p - 2].row(c) {
                    let mids = self.down[p][p - 1].row(c);
                    let above = self.up[p - 2][p - 1].row(a);
                    let count = count_common(mids, above);
                    if count != 2 {
                        return Err(Error::DiamondViolation {
                            top: CellId::new(p, c),
                            bottom: CellId::new(p - 2, a),
                            count,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Orders the vertices of a 2-cell along its boundary, starting at the
    /// lowest vertex index and stepping to its lower-indexed neighbour.
    fn walk_loop(&self, f: usize) -> Result<Vec<usize>> {
        let id = CellId::new(2, f);
        let edges = self.down[2][1].row(f);
        let verts = self.down[2][0].row(f);
        let mut nbrs: Vec<[usize; 2]> = vec![[usize::MAX; 2]; verts.len()];
        let pos = |v: usize| verts.binary_search(&v).unwrap();
        for &e in edges {
            let ends = self.down[1][0].row(e);
            for (a, b) in [(ends[0], ends[1]), (ends[1], ends[0])] {
                let slot = &mut nbrs[pos(a)];
                if slot[0] == usize::MAX {
                    slot[0] = b;
                } else if slot[1] == usize::MAX {
                    slot[1] = b;
                } else {
                    return Err(Error::InvalidCell { cell: id, reason: "boundary is not a cycle".into() });
                }
            }
        }
        if nbrs.iter().any(|n| n[1] == usize::MAX) {
            return Err(Error::InvalidCell { cell: id, reason: "boundary is not a cycle".into() });
        }
        let start = verts[0];
        let [n0, n1] = nbrs[0];
        let mut out = vec![start];
        let mut prev = start;
        let mut cur = n0.min(n1);
        while cur != start {
            out.push(cur);
            let [x, y] = nbrs[pos(cur)];
            let next = if x == prev { y } else { x };
            prev = cur;
            cur = next;
            if out.len() > verts.len() {
                break;
            }
        }
        if out.len() != verts.len() {
            return Err(Error::InvalidCell { cell: id, reason: "boundary is not a single cycle".into() });
        }
        Ok(out)
    }

    fn compute_geometry(&mut self) -> Result<()> {
        let (lo, hi) = self.bounding_box();
        let diag = (hi - lo).norm();
        self.scale = if diag > 0.0 { diag } else { 1.0 };
        self.centroids = (0..=self.dim)
            .map(|p| {
                (0..self.count(p))
                    .map(|i| {
                        let vs = self.down[p][0].row(i);
                        vs.iter().map(|&v| self.vertices[v]).sum::<Point>() / vs.len() as f64
                    })
                    .collect()
            })
            .collect();
        let mut measures = vec![vec![1.0; self.count(0)]];
        for p in 1..=self.dim {
            let mut m = Vec::with_capacity(self.count(p));
            for i in 0..self.count(p) {
                let value = match p {
                    1 => {
                        let e = self.down[1][0].row(i);
                        (self.vertices[e[1]] - self.vertices[e[0]]).norm()
                    }
                    2 => geometry::polygon_area(&self.polygon_points(i), self.apex_position(i)),
                    _ => geometry::polyhedron_volume(self, i),
                };
                let tol = 1e-12 * self.scale.powi(p as i32);
                if !(value > tol) {
                    return Err(Error::DegenerateCell { cell: CellId::new(p, i), measure: value });
                }
                m.push(value);
            }
            measures.push(m);
        }
        self.measures = measures;
        Ok(())
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    /// Topological dimension: highest dimension with cells.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, p: usize) -> usize {
        if p > self.dim {
            0
        } else {
            self.down[p][p].len()
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|p| self.count(p)).collect()
    }

    pub fn cells(&self, p: usize) -> impl Iterator<Item = CellId> {
        (0..self.count(p)).map(move |i| CellId::new(p, i))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn point(&self, v: usize) -> Point {
        self.vertices[v]
    }

    /// The `r`-faces of `c` (sorted), for `r <= c.dim`.
    pub fn faces(&self, c: CellId, r: usize) -> &[usize] {
        self.down[c.dim][r].row(c.index)
    }

    /// The whole `p`-to-`r` face table.
    pub fn face_table(&self, p: usize, r: usize) -> &Csr {
        &self.down[p][r]
    }

    /// The `r`-cells having `c` as a face (sorted), for `r >= c.dim`.
    pub fn cofaces(&self, c: CellId, r: usize) -> &[usize] {
        self.up[c.dim][r].row(c.index)
    }

    pub fn hyperfaces(&self, c: CellId) -> &[usize] {
        if c.dim == 0 {
            &[]
        } else {
            self.faces(c, c.dim - 1)
        }
    }

    pub fn hypercofaces(&self, c: CellId) -> &[usize] {
        if c.dim >= self.dim {
            &[]
        } else {
            self.cofaces(c, c.dim + 1)
        }
    }

    /// Node indices of a cell.
    pub fn cell_vertices(&self, c: CellId) -> &[usize] {
        self.faces(c, 0)
    }

    /// `b ⪯ c` in the face order (reflexive).
    pub fn is_face(&self, b: CellId, c: CellId) -> bool {
        if b.dim > c.dim {
            return false;
        }
        self.faces(c, b.dim).binary_search(&b.index).is_ok()
    }

    /// Vertex loop of a 2-cell in boundary order.
    pub fn polygon(&self, f: usize) -> &[usize] {
        &self.loops[f]
    }

    fn polygon_points(&self, f: usize) -> Vec<Point> {
        self.loops[f].iter().map(|&v| self.vertices[v]).collect()
    }

    fn apex_position(&self, f: usize) -> Option<usize> {
        self.apex
            .as_ref()
            .map(|a| self.loops[f].iter().position(|&v| v == a[f]).unwrap())
    }

    /// Triangles `[a, b, c]` (as points) covering a 2-cell, ordered along
    /// the vertex loop. Shared by area and volume computations so adjacent
    /// cells see the same surface.
    pub fn polygon_triangles(&self, f: usize) -> Vec<[Point; 3]> {
        geometry::fan(&self.polygon_points(f), self.apex_position(f))
    }

    pub fn centroid(&self, c: CellId) -> Point {
        self.centroids[c.dim][c.index]
    }

    /// Geometric measure: 1 for nodes, then length, area, volume.
    pub fn measure(&self, c: CellId) -> f64 {
        self.measures[c.dim][c.index]
    }

    pub fn measures(&self, p: usize) -> &[f64] {
        &self.measures[p]
    }

    /// Total measure of the top-dimensional cells.
    pub fn total_measure(&self) -> f64 {
        self.measures[self.dim].iter().sum()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        if self.vertices.is_empty() {
            (Point::zeros(), Point::zeros())
        } else {
            (lo, hi)
        }
    }

    /// Diagonal of the bounding box, the length scale used for tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The raw hyperface tables, suitable for [`Mesh::new`].
    pub fn tables(&self) -> Vec<Vec<Vec<usize>>> {
        (1..=self.dim)
            .map(|p| self.down[p][p - 1].iter().map(|r| r.to_vec()).collect())
            .collect()
    }

    /// Cells of dimension `dim - 1` with exactly one top-dimensional coface.
    pub fn is_boundary_hyperface(&self, c: CellId) -> bool {
        c.dim + 1 == self.dim && self.hypercofaces(c).len() == 1
    }

    /// Per dimension, whether each cell lies on the boundary of the mesh.
    pub fn boundary_flags(&self) -> Vec<Vec<bool>> {
        let mut flags: Vec<Vec<bool>> = (0..=self.dim).map(|p| vec![false; self.count(p)]).collect();
        if self.dim == 0 {
            return flags;
        }
        let q = self.dim - 1;
        for b in self.cells(q) {
            if self.is_boundary_hyperface(b) {
                for r in 0..=q {
                    for &a in self.faces(b, r) {
                        flags[r][a] = true;
                    }
                }
            }
        }
        flags
    }

    /// Corner measure at node `a0` of cell `c`, as a fraction of the full sphere.
    pub fn angle_measure(&self, c: CellId, a0: usize) -> Result<f64> {
        geometry::angle_measure(self, c, a0)
    }

    /// Node curvature `1 / Σ θ(c, a0)` over top cells around `a0`.
    ///
    /// Interior nodes are flat by definition and get exactly 1.
    pub fn node_curvature(&self, a0: usize) -> Result<f64> {
        self.node_curvature_with(a0, &self.boundary_flags()[0])
    }

    pub(crate) fn node_curvature_with(&self, a0: usize, boundary_nodes: &[bool]) -> Result<f64> {
        if self.dim == 0 || !boundary_nodes[a0] {
            return Ok(1.0);
        }
        let mut total = 0.0;
        for &c in self.cofaces(CellId::new(0, a0), self.dim) {
            total += self.angle_measure(CellId::new(self.dim, c), a0)?;
        }
        Ok(1.0 / total)
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    /// The closed mesh made of boundary hyperfaces and all their faces.
    pub fn boundary_submesh(&self) -> Result<Mesh> {
        validate::boundary_submesh(self)
    }
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Builds meshes from vertex loops, deduplicating edges and faces.
#[derive(Debug, Default)]
pub struct MeshBuilder {
    embedding_dim: usize,
    vertices: Vec<Point>,
    edges: Vec<Vec<usize>>,
    edge_index: std::collections::HashMap<(usize, usize), usize>,
    faces: Vec<Vec<usize>>,
    face_index: std::collections::HashMap<Vec<usize>, usize>,
    volumes: Vec<Vec<usize>>,
}

impl MeshBuilder {
    pub fn new(embedding_dim: usize, vertices: Vec<Point>) -> Self {
        MeshBuilder {
            embedding_dim,
            vertices,
            ..Default::default()
        }
    }

    pub fn edge(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&e) = self.edge_index.get(&key) {
            return e;
        }
        self.edges.push(vec![key.0, key.1]);
        self.edge_index.insert(key, self.edges.len() - 1);
        self.edges.len() - 1
    }

    /// Adds a polygon given by its vertex loop; returns its 2-cell index.
    pub fn polygon(&mut self, lp: &[usize]) -> usize {
        let mut key = lp.to_vec();
        key.sort_unstable();
        if let Some(&f) = self.face_index.get(&key) {
            return f;
        }
        let n = lp.len();
        let row: Vec<usize> = (0..n).map(|i| self.edge(lp[i], lp[(i + 1) % n])).collect();
        self.faces.push(row);
        self.face_index.insert(key, self.faces.len() - 1);
        self.faces.len() - 1
    }

    /// Adds a polyhedron given by the vertex loops of its faces.
    pub fn polyhedron(&mut self, face_loops: &[Vec<usize>]) -> usize {
        let row: Vec<usize> = face_loops.iter().map(|l| self.polygon(l)).collect();
        self.volumes.push(row);
        self.volumes.len() - 1
    }

    pub fn build(self) -> Result<Mesh> {
        let mut tables = vec![self.edges, self.faces, self.volumes];
        while tables.last().is_some_and(|t| t.is_empty()) {
            tables.pop();
        }
        Mesh::new(self.embedding_dim, self.vertices, tables)
    }
}
