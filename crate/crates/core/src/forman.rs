//! Forman subdivision and discrete differential forms.
//!
//! Every pair `b ⪯ c` of cells of `M` is a cell of `K` of dimension
//! `dim c - dim b`. A `p`-form on `M` is a `p`-cochain on `K`; both are
//! stored as one coefficient per K-cell, so the isomorphism between them is a
//! relabelling.

use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::mesh::{CellId, Mesh, Point};
use crate::orientation::{check_len, Cochain, OrientedComplex};

/// A discrete differential form: one coefficient per pair `(c, b)` with
/// `dim c - dim b = degree`, indexed like the K-cells of that dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub degree: usize,
    pub values: Vec<f64>,
}

impl Form {
    pub fn zeros(fc: &FormanComplex, degree: usize) -> Self {
        Form {
            degree,
            values: vec![0.0; fc.k().count(degree)],
        }
    }

    /// The basis form `(c → b)`.
    pub fn basis(fc: &FormanComplex, c: CellId, b: CellId) -> Result<Self> {
        let k = fc.kcell_of_pair(c, b)?;
        let mut f = Form::zeros(fc, k.dim);
        f.values[k.index] = 1.0;
        Ok(f)
    }

    pub fn get(&self, fc: &FormanComplex, c: CellId, b: CellId) -> Result<f64> {
        let k = fc.kcell_of_pair(c, b)?;
        if k.dim != self.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: k.dim });
        }
        Ok(self.values[k.index])
    }

    /// The constant function `𝟙_M`: `(c → c) ↦ 1` for every cell.
    pub fn one(fc: &FormanComplex) -> Self {
        Form {
            degree: 0,
            values: vec![1.0; fc.k().count(0)],
        }
    }
}

/// Kind of a K-edge `(b_{r+1}, b_r)`, named after the M-cells it joins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    NodeEdge,
    EdgeFace,
    FaceVolume,
}

impl EdgeClass {
    pub fn from_bottom_dim(r: usize) -> Self {
        match r {
            0 => EdgeClass::NodeEdge,
            1 => EdgeClass::EdgeFace,
            _ => EdgeClass::FaceVolume,
        }
    }

    pub const ALL: [EdgeClass; 3] = [EdgeClass::NodeEdge, EdgeClass::EdgeFace, EdgeClass::FaceVolume];

    pub fn name(self) -> &'static str {
        match self {
            EdgeClass::NodeEdge => "node_edge",
            EdgeClass::EdgeFace => "edge_face",
            EdgeClass::FaceVolume => "face_volume",
        }
    }
}

/// The subdivision `K` of an oriented mesh `M`, with the pair index.
#[derive(Clone, Debug)]
pub struct FormanComplex {
    m: OrientedComplex,
    k: OrientedComplex,
    /// `pairs[k][i] = (top, bottom)` for K-cell `(k, i)`.
    pairs: Vec<Vec<(CellId, CellId)>>,
    /// `kindex[q][r]` runs parallel to `M.face_table(q, r)`.
    kindex: Vec<Vec<Vec<usize>>>,
}

impl FormanComplex {
    /// Builds `K` from a compatibly oriented mesh with cubical corners.
    pub fn new(m: OrientedComplex) -> Result<Self> {
        let mesh = m.mesh();
        let d = mesh.dim();
        let rep = mesh.validate();
        if !rep.has_cubical_corners {
            for c in mesh.cells(d) {
                let edges = mesh.faces(c, 1);
                for &v in mesh.faces(c, 0) {
                    let n = mesh
                        .cofaces(CellId::new(0, v), 1)
                        .iter()
                        .filter(|e| edges.binary_search(e).is_ok())
                        .count();
                    if n != d {
                        return Err(Error::NonCubicalCorners { cell: c, node: v, edges: n });
                    }
                }
            }
        }

        let mut pairs: Vec<Vec<(CellId, CellId)>> = vec![Vec::new(); d + 1];
        let mut kindex: Vec<Vec<Vec<usize>>> = (0..=d).map(|q| vec![Vec::new(); q + 1]).collect();
        for q in 0..=d {
            for r in 0..=q {
                kindex[q][r] = vec![usize::MAX; mesh.face_table(q, r).nnz()];
            }
        }
        // K-nodes first by M dimension, then higher K-cells by top dimension
        for k in 0..=d {
            for q in k..=d {
                let r = q - k;
                let table = mesh.face_table(q, r);
                for i in 0..mesh.count(q) {
                    let off = table.offset(i);
                    for (j, &b) in table.row(i).iter().enumerate() {
                        kindex[q][r][off + j] = pairs[k].len();
                        pairs[k].push((CellId::new(q, i), CellId::new(r, b)));
                    }
                }
            }
        }

        let mut fc = FormanComplex {
            k: m.clone(),
            m,
            pairs,
            kindex,
        };
        let mesh = fc.m.mesh();

        let vertices: Vec<Point> = fc.pairs[0].iter().map(|&(c, _)| mesh.centroid(c)).collect();
        let mut tables: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut boundary: Vec<CsMat<i32>> = vec![CsMat::zero((0, fc.pairs[0].len()))];
        for k in 1..=d {
            let mut table = Vec::with_capacity(fc.pairs[k].len());
            let mut tri = TriMat::new((fc.pairs[k - 1].len(), fc.pairs[k].len()));
            let parity = if k % 2 == 0 { 1 } else { -1 };
            for (x, &(c, b)) in fc.pairs[k].iter().enumerate() {
                let mut row = Vec::new();
                for (y, e) in fc.lower_faces(c, b)? {
                    row.push(y);
                    tri.add_triplet(y, x, e as i32);
                }
                for (y, e) in fc.upper_faces(c, b)? {
                    row.push(y);
                    tri.add_triplet(y, x, parity * e as i32);
                }
                table.push(row);
            }
            tables.push(table);
            boundary.push(tri.to_csc());
        }
        let kmesh = if d >= 2 {
            let apex = fc.pairs[2].iter().map(|&(c, _)| fc.knode(c)).collect();
            Mesh::with_fan_apices(mesh.embedding_dim(), vertices, tables, apex)?
        } else {
            Mesh::new(mesh.embedding_dim(), vertices, tables)?
        };
        let signs = fc.recover_signs(&boundary)?;
        fc.k = OrientedComplex::from_parts(kmesh, signs, boundary, fc.m.is_compatible());
        Ok(fc)
    }

    /// `(K-index of (c', b), ε(c, c'))` for hyperfaces `c'` of `c` above `b`.
    fn lower_faces(&self, c: CellId, b: CellId) -> Result<Vec<(usize, i8)>> {
        let mesh = self.m.mesh();
        let mut out = Vec::new();
        for &h in mesh.hyperfaces(c) {
            let cp = CellId::new(c.dim - 1, h);
            if mesh.is_face(b, cp) {
                let y = self.kcell_of_pair(cp, b)?;
                out.push((y.index, self.m.relative_orientation(c, cp)?));
            }
        }
        Ok(out)
    }

    /// `(K-index of (c, b'), ε(b', b))` for cofaces `b'` of `b` below `c`.
    fn upper_faces(&self, c: CellId, b: CellId) -> Result<Vec<(usize, i8)>> {
        let mesh = self.m.mesh();
        let mut out = Vec::new();
        for &h in mesh.hypercofaces(b) {
            let bp = CellId::new(b.dim + 1, h);
            if mesh.is_face(bp, c) {
                let y = self.kcell_of_pair(c, bp)?;
                out.push((y.index, self.m.relative_orientation(bp, b)?));
            }
        }
        Ok(out)
    }

    /// Cell signs for `K` making `boundary` its incidence matrices.
    ///
    /// Each K-cell `[b, c]` is a combinatorial cube whose axes are the cofaces
    /// of `b` inside `c`, ordered by index. Against that reference orientation
    /// the cube's own boundary signs are known; the sign of a cell is whatever
    /// turns those into the given coefficients. Propagation goes up one
    /// dimension at a time and every hyperface must agree.
    fn recover_signs(&self, boundary: &[CsMat<i32>]) -> Result<Vec<Vec<i8>>> {
        let d = self.m.dim();
        let mut signs: Vec<Vec<i8>> = vec![vec![1; self.pairs[0].len()]];
        for k in 1..=d {
            let mut s = vec![0i8; self.pairs[k].len()];
            let csc = &boundary[k];
            for (x, sx) in s.iter_mut().enumerate() {
                let col = csc.outer_view(x).unwrap();
                for (y, &coef) in col.iter() {
                    let model = self.cube_boundary_sign(CellId::new(k, x), CellId::new(k - 1, y));
                    let want = coef as i8 * signs[k - 1][y] * model;
                    if *sx == 0 {
                        *sx = want;
                    } else if *sx != want {
                        return Err(Error::NonOrientable { cell: CellId::new(k, x) });
                    }
                }
            }
            signs.push(s);
        }
        Ok(signs)
    }

    /// Boundary sign of face `y` in the reference cube orientation of `x`
    /// (both K-cells, `y` a hyperface of `x`).
    fn cube_boundary_sign(&self, x: CellId, y: CellId) -> i8 {
        let (_, bx) = self.pairs[x.dim][x.index];
        let (_, by) = self.pairs[y.dim][y.index];
        let upper = by != bx;
        let axes = self.atoms(x);
        let removed = if upper {
            axes.iter().position(|&a| a == by.index).unwrap()
        } else {
            let (cy, _) = self.pairs[y.dim][y.index];
            let mesh = self.m.mesh();
            axes.iter()
                .position(|&a| !mesh.is_face(CellId::new(bx.dim + 1, a), cy))
                .unwrap()
        };
        let mut perm = vec![removed];
        perm.extend(self.axes_in(x, y));
        let s = permutation_sign(&perm);
        if upper {
            s
        } else {
            -s
        }
    }

    /// Axes of K-cell `x = [b, c]`: the cofaces of `b` that are faces of `c`.
    pub(crate) fn atoms(&self, x: CellId) -> Vec<usize> {
        let (c, b) = self.pairs[x.dim][x.index];
        if x.dim == 0 {
            return Vec::new();
        }
        let mesh = self.m.mesh();
        let inside = mesh.faces(c, b.dim + 1);
        mesh.hypercofaces(b)
            .iter()
            .copied()
            .filter(|a| inside.binary_search(a).is_ok())
            .collect()
    }

    /// For a K-face `a` of K-cell `x`: positions in `x`'s axes of the axes of `a`.
    pub(crate) fn axes_in(&self, x: CellId, a: CellId) -> Vec<usize> {
        let mesh = self.m.mesh();
        let (_, bx) = self.pairs[x.dim][x.index];
        let (_, ba) = self.pairs[a.dim][a.index];
        let xa = self.atoms(x);
        self.atoms(a)
            .into_iter()
            .map(|y| {
                let yc = CellId::new(ba.dim + 1, y);
                xa.iter()
                    .position(|&t| {
                        let tc = CellId::new(bx.dim + 1, t);
                        mesh.is_face(tc, yc) && !mesh.is_face(tc, ba)
                    })
                    .expect("quasi-cube axis")
            })
            .collect()
    }

    pub fn m(&self) -> &OrientedComplex {
        &self.m
    }

    pub fn k(&self) -> &OrientedComplex {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `(top, bottom)` M-pair of a K-cell.
    pub fn pair_of_kcell(&self, k: CellId) -> (CellId, CellId) {
        self.pairs[k.dim][k.index]
    }

    pub fn pairs(&self, k: usize) -> &[(CellId, CellId)] {
        &self.pairs[k]
    }

    /// K-cell of the pair `b ⪯ c`.
    pub fn kcell_of_pair(&self, c: CellId, b: CellId) -> Result<CellId> {
        let mesh = self.m.mesh();
        if b.dim > c.dim || c.dim > mesh.dim() {
            return Err(Error::NotIncident { cell: c, face: b });
        }
        let row = mesh.faces(c, b.dim);
        match row.binary_search(&b.index) {
            Ok(j) => {
                let off = mesh.face_table(c.dim, b.dim).offset(c.index);
                Ok(CellId::new(c.dim - b.dim, self.kindex[c.dim][b.dim][off + j]))
            }
            Err(_) => Err(Error::NotIncident { cell: c, face: b }),
        }
    }

    /// K-node sitting at the centroid of M-cell `c`.
    pub fn knode(&self, c: CellId) -> usize {
        self.kindex[c.dim][c.dim][c.index]
    }

    /// Class of every K-edge.
    pub fn classify_edges(&self) -> Vec<EdgeClass> {
        self.pairs
            .get(1)
            .map(|p| p.iter().map(|&(_, b)| EdgeClass::from_bottom_dim(b.dim)).collect())
            .unwrap_or_default()
    }

    /// `F`: forms on `M` to cochains on `K`.
    pub fn forman_iso(&self, w: &Form) -> Result<Cochain> {
        check_len(self.k.count(w.degree), w.values.len())?;
        Ok(Cochain::new(w.degree, w.values.clone()))
    }

    /// `F⁻¹`.
    pub fn forman_iso_inv(&self, s: &Cochain) -> Result<Form> {
        check_len(self.k.count(s.degree), s.values.len())?;
        Ok(Form {
            degree: s.degree,
            values: s.values.clone(),
        })
    }

    /// `Dω = ω∘∂ − (−1)^p ∂∘ω`, expanded on basis forms `(c → b)`:
    /// `Σ_{a ≻ c} ε(a, c)(a → b) − (−1)^p Σ_{a ≺ b} ε(b, a)(c → a)`.
    pub fn exterior_derivative(&self, w: &Form) -> Result<Form> {
        let p = w.degree;
        let d = self.dim();
        if p >= d {
            return Err(Error::DegreeOverflow { degree: p + 1, dim: d });
        }
        check_len(self.k.count(p), w.values.len())?;
        let mesh = self.m.mesh();
        let sign = if p % 2 == 0 { -1.0 } else { 1.0 };
        let mut out = Form::zeros(self, p + 1);
        for (i, &(c, b)) in self.pairs[p].iter().enumerate() {
            let v = w.values[i];
            if v == 0.0 {
                continue;
            }
            for &a in mesh.hypercofaces(c) {
                let ac = CellId::new(c.dim + 1, a);
                let e = self.m.relative_orientation(ac, c)? as f64;
                out.values[self.kcell_of_pair(ac, b)?.index] += e * v;
            }
            for &a in mesh.hyperfaces(b) {
                let ab = CellId::new(b.dim - 1, a);
                let e = self.m.relative_orientation(b, ab)? as f64;
                out.values[self.kcell_of_pair(c, ab)?.index] += sign * e * v;
            }
        }
        Ok(out)
    }
}

/// Sign of the permutation taking `perm` to sorted order.
pub(crate) fn permutation_sign(perm: &[usize]) -> i8 {
    let mut s = 1i8;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}
