//! Orientations, signed incidence matrices and homology.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::mesh::{CellId, Mesh, Point};

/// Real coefficients over the basis `p`-cells of a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<f64>,
}

/// Chains share the representation of cochains; only the pairing differs.
pub type Chain = Cochain;

impl Cochain {
    pub fn new(degree: usize, values: Vec<f64>) -> Self {
        Cochain { degree, values }
    }

    pub fn zeros(degree: usize, n: usize) -> Self {
        Cochain::new(degree, vec![0.0; n])
    }

    pub fn basis(degree: usize, n: usize, i: usize) -> Self {
        let mut c = Cochain::zeros(degree, n);
        c.values[i] = 1.0;
        c
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A mesh together with cell orientations and signed boundary matrices.
#[derive(Clone, Debug)]
pub struct OrientedComplex {
    mesh: Mesh,
    signs: Vec<Vec<i8>>,
    /// `boundary[p]` maps `p`-chains to `(p-1)`-chains; `boundary[0]` is empty.
    boundary: Vec<CsMat<i32>>,
    compatible: bool,
}

impl OrientedComplex {
    /// Assembles a complex from externally computed orientation data.
    pub fn from_parts(mesh: Mesh, signs: Vec<Vec<i8>>, boundary: Vec<CsMat<i32>>, compatible: bool) -> Self {
        OrientedComplex {
            mesh,
            signs,
            boundary,
            compatible,
        }
    }

    /// Orients a mesh with the default frames (every sign `+1`) and no
    /// compatibility requirement.
    pub fn with_default_orientation(mesh: Mesh) -> Result<Self> {
        let signs: Vec<Vec<i8>> = (0..=mesh.dim()).map(|p| vec![1; mesh.count(p)]).collect();
        let boundary = geometric_boundaries(&mesh, &signs)?;
        Ok(OrientedComplex::from_parts(mesh, signs, boundary, false))
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn into_mesh(self) -> Mesh {
        self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn count(&self, p: usize) -> usize {
        self.mesh.count(p)
    }

    pub fn sign(&self, c: CellId) -> i8 {
        self.signs[c.dim][c.index]
    }

    pub fn signs(&self, p: usize) -> &[i8] {
        &self.signs[p]
    }

    pub fn is_compatible(&self) -> bool {
        self.compatible
    }

    /// Signed incidence `∂_p`, of shape `|M_{p-1}| × |M_p|`.
    pub fn boundary_matrix(&self, p: usize) -> &CsMat<i32> {
        &self.boundary[p]
    }

    /// Coboundary `δ^p = ∂_{p+1}ᵀ`.
    pub fn coboundary_matrix(&self, p: usize) -> CsMat<i32> {
        self.boundary[p + 1].transpose_view().to_csr()
    }

    /// `ε(c, b)` read from the boundary matrix.
    pub fn relative_orientation(&self, c: CellId, b: CellId) -> Result<i8> {
        if b.dim + 1 != c.dim || c.dim > self.dim() {
            return Err(Error::NotHyperface { cell: c, face: b });
        }
        match self.boundary[c.dim].get(b.index, c.index) {
            Some(&v) if v != 0 => Ok(v as i8),
            _ => Err(Error::NotHyperface { cell: c, face: b }),
        }
    }

    /// The all-ones top-dimensional chain.
    pub fn fundamental_class(&self) -> Result<Chain> {
        if !self.compatible {
            return Err(Error::NotManifold("fundamental class needs a compatible orientation".into()));
        }
        Ok(Chain::new(self.dim(), vec![1.0; self.count(self.dim())]))
    }

    /// Applies `∂_p` to a `p`-chain.
    pub fn boundary_of(&self, c: &Chain) -> Result<Chain> {
        let p = c.degree;
        if p == 0 || p > self.dim() {
            return Err(Error::DegreeOverflow { degree: p, dim: self.dim() });
        }
        check_len(self.count(p), c.len())?;
        Ok(Chain::new(p - 1, int_matvec(&self.boundary[p], &c.values)))
    }

    /// Applies `δ^p` to a `p`-cochain.
    pub fn coboundary_of(&self, c: &Cochain) -> Result<Cochain> {
        let p = c.degree;
        if p >= self.dim() {
            return Err(Error::DegreeOverflow { degree: p + 1, dim: self.dim() });
        }
        check_len(self.count(p), c.len())?;
        Ok(Cochain::new(p + 1, int_matvec_t(&self.boundary[p + 1], &c.values)))
    }

    /// Betti numbers over the reals from dense ranks of the boundary matrices.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let d = self.dim();
        let ranks: Vec<usize> = (0..=d + 1)
            .map(|p| if p == 0 || p > d { 0 } else { rank(&to_dense(&self.boundary[p]), 1e-9) })
            .collect();
        (0..=d).map(|p| self.count(p) - ranks[p] - ranks[p + 1]).collect()
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::LengthMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub(crate) fn int_matvec(m: &CsMat<i32>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.rows()];
    for (v, (i, j)) in m.iter() {
        y[i] += *v as f64 * x[j];
    }
    y
}

pub(crate) fn int_matvec_t(m: &CsMat<i32>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.cols()];
    for (v, (i, j)) in m.iter() {
        y[j] += *v as f64 * x[i];
    }
    y
}

pub(crate) fn to_dense(m: &CsMat<i32>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.rows(), m.cols());
    for (v, (i, j)) in m.iter() {
        d[(i, j)] = *v as f64;
    }
    d
}

/// Numerical rank with a tolerance relative to the largest singular value.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv: DVector<f64> = m.clone().singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Spanning frame of a cell: greedily independent vectors from its
/// lowest-index vertex to its other vertices.
pub fn frame(mesh: &Mesh, c: CellId) -> Vec<Point> {
    let verts = mesh.cell_vertices(c);
    let o = mesh.point(verts[0]);
    let mut picked: Vec<Point> = Vec::new();
    let mut ortho: Vec<Point> = Vec::new();
    for &v in &verts[1..] {
        if picked.len() == c.dim {
            break;
        }
        let x = mesh.point(v) - o;
        let mut r = x;
        for q in &ortho {
            r -= q * q.dot(&r);
        }
        if r.norm() > 1e-9 * x.norm().max(f64::MIN_POSITIVE) {
            ortho.push(r.normalize());
            picked.push(x);
        }
    }
    picked
}

/// `ε(c, b)` with unit cell signs, from the frame determinant
/// `det(F_cᵀ [n, F_b])` where `n` points from `c`'s centroid towards `b`'s.
fn raw_relative_orientation(mesh: &Mesh, c: CellId, b: CellId) -> Result<i8> {
    let fc = frame(mesh, c);
    let mut cols = vec![mesh.centroid(b) - mesh.centroid(c)];
    if b.dim > 0 {
        cols.extend(frame(mesh, b));
    }
    let p = c.dim;
    if fc.len() != p || cols.len() != p {
        return Err(Error::NumericallyDegenerate { cell: c, face: b });
    }
    let m = DMatrix::from_fn(p, p, |i, j| fc[i].dot(&cols[j]));
    let det = m.determinant();
    let norm: f64 = fc.iter().chain(cols.iter()).map(|v| v.norm()).product();
    if det.abs() < 1e-10 * norm {
        return Err(Error::NumericallyDegenerate { cell: c, face: b });
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// `ε(c, b)` for a hyperface `b` of `c` given cell signs.
pub fn geometric_relative_orientation(mesh: &Mesh, signs: &[Vec<i8>], c: CellId, b: CellId) -> Result<i8> {
    if b.dim + 1 != c.dim || !mesh.is_face(b, c) {
        return Err(Error::NotHyperface { cell: c, face: b });
    }
    Ok(raw_relative_orientation(mesh, c, b)? * signs[c.dim][c.index] * signs[b.dim][b.index])
}

fn geometric_boundaries(mesh: &Mesh, signs: &[Vec<i8>]) -> Result<Vec<CsMat<i32>>> {
    let mut out = vec![CsMat::zero((0, mesh.count(0)))];
    for p in 1..=mesh.dim() {
        let mut tri = TriMat::new((mesh.count(p - 1), mesh.count(p)));
        for c in mesh.cells(p) {
            for &b in mesh.hyperfaces(c) {
                let e = geometric_relative_orientation(mesh, signs, c, CellId::new(p - 1, b))?;
                tri.add_triplet(b, c.index, e as i32);
            }
        }
        out.push(tri.to_csc());
    }
    Ok(out)
}

/// Chooses a compatible orientation by breadth-first propagation over the
/// top cells; boundary hyperfaces are oriented so their coface induces +1.
pub fn orient_compatibly(mesh: Mesh) -> Result<OrientedComplex> {
    let rep = mesh.validate();
    if !rep.is_manifold_like {
        return Err(Error::NotManifold(format!("{:?}", rep.failures)));
    }
    let d = mesh.dim();
    let mut signs: Vec<Vec<i8>> = (0..=d).map(|p| vec![1; mesh.count(p)]).collect();
    if d == 0 {
        let boundary = vec![CsMat::zero((0, mesh.count(0)))];
        return Ok(OrientedComplex::from_parts(mesh, signs, boundary, true));
    }
    let mut top = vec![0i8; mesh.count(d)];
    // induced sign ε(c, b) with s_c = +1, cached per incidence
    let raw = |c: usize, b: usize| raw_relative_orientation(&mesh, CellId::new(d, c), CellId::new(d - 1, b));
    for root in 0..mesh.count(d) {
        if top[root] != 0 {
            continue;
        }
        top[root] = if d == mesh.embedding_dim() {
            handedness(&mesh, CellId::new(d, root))?
        } else {
            1
        };
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for &b in mesh.hyperfaces(CellId::new(d, c)) {
                let cof = mesh.hypercofaces(CellId::new(d - 1, b));
                if cof.len() != 2 {
                    continue;
                }
                let other = if cof[0] == c { cof[1] } else { cof[0] };
                let want = -top[c] * raw(c, b)? * raw(other, b)?;
                if top[other] == 0 {
                    top[other] = want;
                    queue.push_back(other);
                } else if top[other] != want {
                    return Err(Error::NonOrientable { cell: CellId::new(d, other) });
                }
            }
        }
    }
    signs[d] = top;
    // nodes always stay positive, so a 1-mesh keeps ∂[M] = last - first
    for b in mesh.cells(d - 1).filter(|b| b.dim > 0) {
        if mesh.is_boundary_hyperface(b) {
            let c = mesh.hypercofaces(b)[0];
            signs[d - 1][b.index] = signs[d][c] * raw(c, b.index)?;
        }
    }
    let boundary = geometric_boundaries(&mesh, &signs)?;
    Ok(OrientedComplex::from_parts(mesh, signs, boundary, true))
}

/// Sign of the frame determinant of a full-dimensional cell.
pub fn handedness(mesh: &Mesh, c: CellId) -> Result<i8> {
    let f = frame(mesh, c);
    let p = c.dim;
    if f.len() != p {
        return Err(Error::NumericallyDegenerate { cell: c, face: c });
    }
    let det = DMatrix::from_fn(p, p, |i, j| f[j][i]).determinant();
    Ok(if det > 0.0 { 1 } else { -1 })
}
