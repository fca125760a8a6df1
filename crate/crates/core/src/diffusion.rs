//! Diffusion with per-K-edge diffusivity: steady and transient solves, fluxes.
//!
//! Everything is assembled in the symmetric form `S = ∂₁ diag(α W₁) ∂₁ᵀ`,
//! so `Δ₀^α = W₀⁻¹ S`. Rows of `S u` are net outflows from each K-node.

use std::collections::BTreeMap;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, LdltRef, SymbolicCholesky, SymmetricOrdering};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Par, Side};
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::forman::{EdgeClass, FormanComplex};
use crate::mesh::CellId;
use crate::metric::MetricContext;
use crate::orientation::{check_len, Cochain};

/// Diffusivity of every K-edge, with the M-cell each edge lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusivityAssignment {
    pub alpha: Vec<f64>,
    pub provenance: Vec<CellId>,
}

impl DiffusivityAssignment {
    pub fn uniform(fc: &FormanComplex, value: f64) -> Result<Self> {
        Self::from_values(fc, vec![value; fc.k().count(1)])
    }

    /// One value per edge class, indexed like [`EdgeClass::ALL`].
    pub fn by_class(fc: &FormanComplex, values: [f64; 3]) -> Result<Self> {
        let alpha = fc.classify_edges().iter().map(|&c| values[c as usize]).collect();
        Self::from_values(fc, alpha)
    }

    pub fn from_values(fc: &FormanComplex, alpha: Vec<f64>) -> Result<Self> {
        check_len(fc.k().count(1), alpha.len())?;
        let provenance = fc.pairs(1).iter().map(|&(c, _)| c).collect();
        let da = DiffusivityAssignment { alpha, provenance };
        da.validate()?;
        Ok(da)
    }

    pub fn validate(&self) -> Result<()> {
        match self.alpha.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
            Some(e) => Err(Error::NonPositiveAlpha { edge: e, value: self.alpha[e] }),
            None => Ok(()),
        }
    }
}

/// Axis-aligned plane `x[axis] = coord`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisPlane {
    pub axis: usize,
    pub coord: f64,
}

impl AxisPlane {
    pub fn new(axis: usize, coord: f64) -> Self {
        AxisPlane { axis, coord }
    }
}

/// K-nodes whose originating M-cell lies in `plane` within `tol × scale`.
pub fn plane_nodes(fc: &FormanComplex, plane: AxisPlane, tol: f64) -> Vec<usize> {
    let mesh = fc.m().mesh();
    let eps = tol * mesh.scale();
    fc.pairs(0)
        .iter()
        .enumerate()
        .filter(|(_, &(c, _))| {
            mesh.cell_vertices(c)
                .iter()
                .all(|&v| (mesh.point(v)[plane.axis] - plane.coord).abs() <= eps)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Prescribed values and outward fluxes on K-nodes, plus named node sets
/// whose boundary flux is reported after a solve.
#[derive(Clone, Debug, Default)]
pub struct BoundaryConditionSet {
    pub dirichlet: BTreeMap<usize, f64>,
    /// Total flux leaving the domain through a node.
    pub neumann: BTreeMap<usize, f64>,
    pub surfaces: BTreeMap<String, Vec<usize>>,
}

impl BoundaryConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_dirichlet(&mut self, nodes: &[usize], value: f64) {
        for &n in nodes {
            self.dirichlet.insert(n, value);
        }
    }

    pub fn set_neumann(&mut self, nodes: &[usize], flux: f64) {
        for &n in nodes {
            self.neumann.insert(n, flux);
        }
    }

    /// Fixes `value` on a named surface and records it for flux reporting.
    pub fn dirichlet_surface(&mut self, name: &str, nodes: Vec<usize>, value: f64) {
        self.set_dirichlet(&nodes, value);
        self.surfaces.insert(name.to_string(), nodes);
    }

    pub fn validate(&self) -> Result<()> {
        match self.dirichlet.keys().find(|n| self.neumann.contains_key(n)) {
            Some(&node) => Err(Error::ConflictingBC { node }),
            None => Ok(()),
        }
    }
}

/// `Δ₀^α = W₀⁻¹ ∂₁ diag(α) W₁ ∂₁ᵀ`.
pub fn modified_laplacian(mc: &MetricContext, da: &DiffusivityAssignment) -> Result<CsMat<f64>> {
    let sys = DiffusionSystem::new(mc, da.clone())?;
    let w0 = mc.weights(0);
    let mut tri = TriMat::new((w0.len(), w0.len()));
    for (v, (i, j)) in sys.stiffness().iter() {
        tri.add_triplet(i, j, v / w0[i]);
    }
    Ok(tri.to_csr())
}

/// Assembled symmetric operator for one diffusivity assignment.
#[derive(Clone, Debug)]
pub struct DiffusionSystem<'m, 'a> {
    mc: &'m MetricContext<'a>,
    da: DiffusivityAssignment,
    /// `(tail, head)` of every K-edge, oriented so that `δu(e) = u[head] − u[tail]`.
    ends: Vec<(usize, usize)>,
    /// `α W₁` per K-edge.
    conductance: Vec<f64>,
}

impl<'m, 'a> DiffusionSystem<'m, 'a> {
    pub fn new(mc: &'m MetricContext<'a>, da: DiffusivityAssignment) -> Result<Self> {
        let fc = mc.complex();
        check_len(fc.k().count(1), da.alpha.len())?;
        da.validate()?;
        let b = fc.k().boundary_matrix(1).to_csc();
        let ends = b
            .outer_iterator()
            .map(|col| {
                let mut tail = usize::MAX;
                let mut head = usize::MAX;
                for (i, &v) in col.iter() {
                    if v > 0 {
                        head = i;
                    } else {
                        tail = i;
                    }
                }
                (tail, head)
            })
            .collect();
        let conductance = da.alpha.iter().zip(mc.weights(1)).map(|(a, w)| a * w).collect();
        Ok(DiffusionSystem { mc, da, ends, conductance })
    }

    pub fn metric(&self) -> &'m MetricContext<'a> {
        self.mc
    }

    pub fn assignment(&self) -> &DiffusivityAssignment {
        &self.da
    }

    pub fn node_count(&self) -> usize {
        self.mc.weights(0).len()
    }

    pub fn edge_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    /// `S = ∂₁ diag(α W₁) ∂₁ᵀ`.
    pub fn stiffness(&self) -> CsMat<f64> {
        let n = self.node_count();
        let mut tri = TriMat::with_capacity((n, n), 4 * self.ends.len());
        for (&(t, h), &g) in self.ends.iter().zip(&self.conductance) {
            tri.add_triplet(t, t, g);
            tri.add_triplet(h, h, g);
            tri.add_triplet(t, h, -g);
            tri.add_triplet(h, t, -g);
        }
        tri.to_csr()
    }

    /// `f(e) = −α W₁ δu(e)` on every K-edge, positive along the edge orientation.
    pub fn edge_fluxes(&self, u: &Cochain) -> Result<Vec<f64>> {
        check_len(self.node_count(), u.len())?;
        Ok(self
            .ends
            .iter()
            .zip(&self.conductance)
            .map(|(&(t, h), &g)| -g * (u.values[h] - u.values[t]))
            .collect())
    }

    pub fn edge_flux(&self, u: &Cochain, e: usize) -> Result<f64> {
        check_len(self.node_count(), u.len())?;
        let (t, h) = self.ends[e];
        Ok(-self.conductance[e] * (u.values[h] - u.values[t]))
    }

    /// `Σ |f|` over K-edges with exactly one end in `surface`, split by class.
    pub fn boundary_flux(&self, u: &Cochain, surface: &[usize]) -> Result<FluxSummary> {
        let f = self.edge_fluxes(u)?;
        let mut inside = vec![false; self.node_count()];
        for &n in surface {
            inside[n] = true;
        }
        let classes = self.mc.complex().classify_edges();
        let mut out = FluxSummary::default();
        for (e, &(t, h)) in self.ends.iter().enumerate() {
            if inside[t] != inside[h] {
                out.total += f[e].abs();
                out.by_class[classes[e] as usize] += f[e].abs();
            }
        }
        Ok(out)
    }

    /// Eliminates Dirichlet nodes; the result is symmetric positive definite
    /// whenever every connected component touches a Dirichlet node.
    pub fn reduce(&self, bc: &BoundaryConditionSet) -> Result<ReducedSystem> {
        bc.validate()?;
        let n = self.node_count();
        let mut slot = vec![usize::MAX; n];
        let mut free = Vec::new();
        let mut fixed = vec![0.0; n];
        for i in 0..n {
            match bc.dirichlet.get(&i) {
                Some(&v) => fixed[i] = v,
                None => {
                    slot[i] = free.len();
                    free.push(i);
                }
            }
        }
        let mut rhs = vec![0.0; free.len()];
        for (&node, &f) in &bc.neumann {
            if node >= n {
                return Err(Error::LengthMismatch { expected: n, got: node + 1 });
            }
            rhs[slot[node]] -= f;
        }
        let source = rhs.clone();
        let mut links = Vec::with_capacity(self.ends.len());
        let mut diag = vec![0.0; free.len()];
        let mut upper = Vec::with_capacity(self.ends.len());
        for (&(t, h), &g) in self.ends.iter().zip(&self.conductance) {
            let (st, sh) = (slot[t], slot[h]);
            if st != usize::MAX || sh != usize::MAX {
                links.push((t, h, g));
            }
            match (st != usize::MAX, sh != usize::MAX) {
                (true, true) => {
                    diag[st] += g;
                    diag[sh] += g;
                    upper.push((st.min(sh), st.max(sh), -g));
                }
                (true, false) => {
                    diag[st] += g;
                    rhs[st] += g * fixed[h];
                }
                (false, true) => {
                    diag[sh] += g;
                    rhs[sh] += g * fixed[t];
                }
                (false, false) => {}
            }
        }
        Ok(ReducedSystem {
            free,
            fixed,
            diag,
            upper,
            rhs,
            links,
            slot,
            source,
            shift: Vec::new(),
        })
    }

    /// Solves `S u = 0` away from Dirichlet nodes and reports named surface fluxes.
    pub fn solve_steady(&self, bc: &BoundaryConditionSet, solver: &mut Solver) -> Result<SteadySolution> {
        let red = self.reduce(bc)?;
        let x = solver.solve(&red, &red.rhs)?;
        let residual = red.relative_residual(&x, &red.rhs);
        let u = red.expand(&x);
        let mut boundary_flux = BTreeMap::new();
        for (name, nodes) in &bc.surfaces {
            boundary_flux.insert(name.clone(), self.boundary_flux(&u, nodes)?);
        }
        Ok(SteadySolution { u, residual, boundary_flux })
    }

    /// Backward Euler integrator for `W₀ du/dt = −S u` with step `dt`.
    pub fn transient(&self, bc: &BoundaryConditionSet, dt: f64) -> Result<TransientSolver> {
        if !(dt > 0.0) {
            return Err(Error::InvalidGeometry(format!("time step must be positive, got {dt}")));
        }
        let red = self.reduce(bc)?;
        let w0 = self.mc.weights(0);
        let mass: Vec<f64> = red.free.iter().map(|&i| w0[i]).collect();
        let shifted = red.shifted(&mass, dt);
        let mut solver = Solver::new(SolverOptions::default());
        solver.factor(&shifted)?;
        Ok(TransientSolver { red, shifted, mass, dt, solver })
    }
}

/// One step of [`DiffusionSystem::transient`] without keeping the factorization.
pub fn step_transient(sys: &DiffusionSystem, bc: &BoundaryConditionSet, u: &Cochain, dt: f64) -> Result<Cochain> {
    sys.transient(bc, dt)?.step(u)
}

/// Sum of `|f|` across a surface and its split over [`EdgeClass::ALL`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FluxSummary {
    pub total: f64,
    pub by_class: [f64; 3],
}

impl FluxSummary {
    pub fn class(&self, c: EdgeClass) -> f64 {
        self.by_class[c as usize]
    }
}

#[derive(Clone, Debug)]
pub struct SteadySolution {
    pub u: Cochain,
    pub residual: f64,
    pub boundary_flux: BTreeMap<String, FluxSummary>,
}

/// Unknowns are the non-Dirichlet K-nodes, in increasing order.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub free: Vec<usize>,
    /// Dirichlet values on the full node set (zero elsewhere).
    pub fixed: Vec<f64>,
    pub diag: Vec<f64>,
    /// Strictly upper off-diagonal entries `(row, col, value)`, duplicates summed.
    pub upper: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    /// Edges with a free end as `(tail, head, conductance)` on the full node
    /// set, for residuals in flux form.
    links: Vec<(usize, usize, f64)>,
    /// Full node index to unknown index, `usize::MAX` on Dirichlet nodes.
    slot: Vec<usize>,
    /// Neumann part of `rhs`.
    source: Vec<f64>,
    /// Extra diagonal (the mass term of a time step); empty means zero.
    shift: Vec<f64>,
}

impl ReducedSystem {
    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for &(i, j, v) in &self.upper {
            y[i] += v * x[j];
            y[j] += v * x[i];
        }
        y
    }

    /// `shift + scale · A`, with `rhs` and the flux-form data scaled alike.
    pub fn shifted(&self, shift: &[f64], scale: f64) -> ReducedSystem {
        let mut out = self.clone();
        for (d, m) in out.diag.iter_mut().zip(shift) {
            *d = m + scale * *d;
        }
        out.upper.iter_mut().for_each(|e| e.2 *= scale);
        out.links.iter_mut().for_each(|e| e.2 *= scale);
        out.rhs.iter_mut().for_each(|v| *v *= scale);
        out.source.iter_mut().for_each(|v| *v *= scale);
        out.shift = shift.to_vec();
        out
    }

    /// `b − A x`. The `A x` part is evaluated edge by edge from potential
    /// differences, which keeps it accurate when conductances span many
    /// orders of magnitude; in product form the small fluxes that pin weakly
    /// connected clusters drown in the rounding error of `A x`.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = b.iter().zip(&self.rhs).zip(&self.source).map(|((b, c), s)| (b - c) + s).collect();
        for (i, m) in self.shift.iter().enumerate() {
            r[i] -= m * x[i];
        }
        let u = |i: usize| match self.slot[i] {
            usize::MAX => self.fixed[i],
            k => x[k],
        };
        for &(t, h, g) in &self.links {
            let f = g * (u(t) - u(h));
            if self.slot[t] != usize::MAX {
                r[self.slot[t]] -= f;
            }
            if self.slot[h] != usize::MAX {
                r[self.slot[h]] += f;
            }
        }
        r
    }

    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let r = self.residual(x, b).iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nb == 0.0 {
            r
        } else {
            r / nb
        }
    }

    /// Full-length solution from reduced unknowns.
    pub fn expand(&self, x: &[f64]) -> Cochain {
        let mut u = self.fixed.clone();
        for (&i, &v) in self.free.iter().zip(x) {
            u[i] = v;
        }
        Cochain::new(0, u)
    }

    /// Reduced unknowns of a full-length field.
    pub fn restrict(&self, u: &Cochain) -> Vec<f64> {
        self.free.iter().map(|&i| u.values[i]).collect()
    }

    /// Upper triangle (diagonal included) in compressed-column form.
    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let n = self.len();
        let mut t: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(n + self.upper.len());
        t.extend(self.diag.iter().enumerate().map(|(i, &v)| Triplet::new(i, i, v)));
        t.extend(self.upper.iter().map(|&(i, j, v)| Triplet::new(i, j, v)));
        SparseColMat::try_new_from_triplets(n, n, &t).map_err(|e| Error::SolverDivergence(format!("{e:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Sparse `LDLᵀ` (Cholesky-type, no pivoting); the symbolic analysis is
    /// kept across solves.
    #[default]
    Cholesky,
    /// Conjugate gradients with Jacobi preconditioning.
    Pcg,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Required relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kind: SolverKind::Cholesky,
            tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

/// Linear solver for [`ReducedSystem`]s sharing one sparsity pattern.
///
/// The direct path is a sparse `LDLᵀ` factorization without pivoting plus
/// iterative refinement. `LLᵀ` breaks down on high-contrast systems
/// (diffusivity ratios around 1e10), where rounding can drive a pivot of the
/// SPD matrix negative.
pub struct Solver {
    pub options: SolverOptions,
    symbolic: Option<(Vec<usize>, Vec<usize>, SymbolicCholesky<usize>)>,
    factor_values: Vec<f64>,
    factored: bool,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("options", &self.options).finish_non_exhaustive()
    }
}

impl Solver {
    pub fn new(options: SolverOptions) -> Self {
        Solver {
            options,
            symbolic: None,
            factor_values: Vec::new(),
            factored: false,
        }
    }

    /// Factors `a`, reusing the symbolic analysis when the pattern is unchanged.
    pub fn factor(&mut self, a: &ReducedSystem) -> Result<()> {
        self.factored = false;
        let m = a.to_faer()?;
        let (cp, ri) = (m.col_ptr().to_vec(), m.row_idx().to_vec());
        let reuse = matches!(&self.symbolic, Some((c, r, _)) if *c == cp && *r == ri);
        if !reuse {
            let sym = factorize_symbolic_cholesky(m.symbolic(), Side::Upper, SymmetricOrdering::Amd, Default::default())
                .map_err(|e| Error::SolverDivergence(format!("{e:?}")))?;
            self.symbolic = Some((cp, ri, sym));
        }
        let sym = &self.symbolic.as_ref().unwrap().2;
        self.factor_values.resize(sym.len_val(), 0.0);
        let mut mem = MemBuffer::new(sym.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Default::default()));
        sym.factorize_numeric_ldlt(
            &mut self.factor_values,
            m.as_ref(),
            Side::Upper,
            LdltRegularization::default(),
            Par::Seq,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .map_err(|e| Error::SolverDivergence(format!("LDLT factorization failed: {e:?}")))?;
        self.factored = true;
        Ok(())
    }

    /// Solves `a x = b`, polishing with iterative refinement when needed.
    pub fn solve(&mut self, a: &ReducedSystem, b: &[f64]) -> Result<Vec<f64>> {
        check_len(a.len(), b.len())?;
        if a.is_empty() {
            return Ok(Vec::new());
        }
        match self.options.kind {
            SolverKind::Cholesky => {
                self.factor(a)?;
                self.solve_factored(a, b)
            }
            SolverKind::Pcg => pcg(a, b, None, self.options.tol, self.options.max_iter),
        }
    }

    /// Solves with the last factorization of a matrix equal to `a`.
    pub fn solve_factored(&self, a: &ReducedSystem, b: &[f64]) -> Result<Vec<f64>> {
        let sym = match (&self.symbolic, self.factored) {
            (Some((_, _, sym)), true) => sym,
            _ => return Err(Error::SolverDivergence("no factorization".into())),
        };
        let ldlt = LdltRef::new(sym, &self.factor_values);
        let mut mem = MemBuffer::new(sym.solve_in_place_scratch::<f64>(1, Par::Seq));
        let mut apply = |r: &[f64]| -> Vec<f64> {
            let mut x = Mat::from_fn(r.len(), 1, |i, _| r[i]);
            ldlt.solve_in_place_with_conj(Conj::No, x.as_mut(), Par::Seq, MemStack::new(&mut mem));
            (0..r.len()).map(|i| x[(i, 0)]).collect()
        };
        let mut x = apply(b);
        // refine until the corrections stop shrinking
        let mut last = f64::INFINITY;
        for _ in 0..20 {
            let dx = apply(&a.residual(&x, b));
            let size = dx.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            if !(size < 0.5 * last) {
                break;
            }
            x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
            last = size;
            if size <= f64::EPSILON * x.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
                break;
            }
        }
        let res = a.relative_residual(&x, b);
        if !(res <= self.options.tol) {
            return Err(Error::SolverDivergence(format!("relative residual {res:.3e} above {:.1e}", self.options.tol)));
        }
        Ok(x)
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn pcg(a: &ReducedSystem, b: &[f64], x0: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.len();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = x0.map(|x| x.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if nb == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let ax = a.matvec(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&a.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= tol * nb {
            return Ok(x);
        }
        let ap = a.matvec(&p);
        let alpha = rz / dot(&p, &ap);
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, q)| *r -= alpha * q);
        z.iter_mut().zip(r.iter().zip(&a.diag)).for_each(|(z, (r, d))| *z = r / d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    let res = a.relative_residual(&x, b);
    if res <= tol {
        Ok(x)
    } else {
        Err(Error::SolverDivergence(format!("PCG stopped after {max_iter} iterations at relative residual {res:.3e}")))
    }
}

/// Backward Euler stepper holding the factorization of `W₀ + dt S`.
#[derive(Debug)]
pub struct TransientSolver {
    red: ReducedSystem,
    shifted: ReducedSystem,
    mass: Vec<f64>,
    dt: f64,
    solver: Solver,
}

impl TransientSolver {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(W₀ + dt S) u' = W₀ u + dt b`, with Dirichlet values held fixed.
    pub fn step(&self, u: &Cochain) -> Result<Cochain> {
        check_len(self.red.fixed.len(), u.len())?;
        let x = self.red.restrict(u);
        let b: Vec<f64> = x
            .iter()
            .zip(&self.mass)
            .zip(&self.red.rhs)
            .map(|((x, m), r)| m * x + self.dt * r)
            .collect();
        let y = self.solver.solve_factored(&self.shifted, &b)?;
        Ok(self.red.expand(&y))
    }
}

/// `α_eff = F h / ((u₁ − u₀) A)`.
pub fn effective_diffusivity(flux: f64, h: f64, area: f64, u0: f64, u1: f64) -> Result<f64> {
    if !(h > 0.0) || !(area > 0.0) || !(u1 > u0) {
        return Err(Error::InvalidGeometry(format!(
            "need h > 0, A > 0 and u1 > u0 (h = {h}, A = {area}, u0 = {u0}, u1 = {u1})"
        )));
    }
    Ok(flux * h / ((u1 - u0) * area))
}

/// Result of a two-plate effective diffusivity run.
#[derive(Clone, Debug)]
pub struct AlphaEffRun {
    pub alpha_eff: f64,
    pub inlet: FluxSummary,
    pub outlet: FluxSummary,
    pub solution: SteadySolution,
}

/// Fixes `u = 0` on the `lo` face and `u = 1` on the `hi` face of the mesh's
/// bounding box along `axis`, leaves the rest zero-flux, and measures `α_eff`
/// from the flux through the `lo` face.
pub fn alpha_eff_along_axis(sys: &DiffusionSystem, axis: usize, solver: &mut Solver) -> Result<AlphaEffRun> {
    let fc = sys.metric().complex();
    let mesh = fc.m().mesh();
    let (lo, hi) = mesh.bounding_box();
    let h = hi[axis] - lo[axis];
    let area: f64 = (0..3)
        .filter(|&i| i != axis && i < mesh.embedding_dim())
        .map(|i| hi[i] - lo[i])
        .product();
    let mut bc = BoundaryConditionSet::new();
    bc.dirichlet_surface("lo", plane_nodes(fc, AxisPlane::new(axis, lo[axis]), 1e-9), 0.0);
    bc.dirichlet_surface("hi", plane_nodes(fc, AxisPlane::new(axis, hi[axis]), 1e-9), 1.0);
    let solution = sys.solve_steady(&bc, solver)?;
    let inlet = solution.boundary_flux["lo"];
    let outlet = solution.boundary_flux["hi"];
    let alpha_eff = effective_diffusivity(inlet.total, h, area, 0.0, 1.0)?;
    Ok(AlphaEffRun {
        alpha_eff,
        inlet,
        outlet,
        solution,
    })
}
