//! Diagonal metric on K and the operators built from it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::algebra::CupTable;
use crate::error::{Error, Result};
use crate::forman::FormanComplex;
use crate::orientation::{check_len, int_matvec, rank, Cochain};

/// How node curvature enters the metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMode {
    /// `κ ≡ 1`.
    Trivial,
    /// `κ = 1 / Σ θ` from corner angle measures.
    #[default]
    Curvature,
}

impl std::str::FromStr for CurvatureMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(CurvatureMode::Trivial),
            "curvature" => Ok(CurvatureMode::Curvature),
            _ => Err(Error::Config(format!("unknown curvature mode `{s}`"))),
        }
    }
}

/// Node curvature, volume cochain and per-degree inner-product weights.
#[derive(Clone, Debug)]
pub struct MetricContext<'a> {
    fc: &'a FormanComplex,
    pub kappa: Vec<f64>,
    pub vol: Cochain,
    weights: Vec<Vec<f64>>,
    cup: CupTable<'a>,
}

/// `W_p[c] = Σ_{b ⪯ c} κ(b) Σ_{a ⪰ b} μ(a) / (2^{p+d} μ(c)²)`, sums over
/// nodes `b` of `c` and top cells `a` of `K`.
pub fn build_metric(fc: &FormanComplex, mode: CurvatureMode) -> Result<MetricContext<'_>> {
    let km = fc.k().mesh();
    let d = km.dim();
    let n0 = km.count(0);
    let kappa = match mode {
        CurvatureMode::Trivial => vec![1.0; n0],
        CurvatureMode::Curvature if km.dim() < km.embedding_dim() => {
            log::warn!("mesh is not flat in its embedding space; using unit curvature");
            vec![1.0; n0]
        }
        CurvatureMode::Curvature => {
            let flags = km.boundary_flags();
            (0..n0)
                .map(|v| km.node_curvature_with(v, &flags[0]))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let top = km.measures(d);
    let mut node_mass = vec![0.0; n0];
    for (a, &mu) in top.iter().enumerate() {
        for &v in km.cell_vertices(crate::CellId::new(d, a)) {
            node_mass[v] += mu;
        }
    }
    let weights = (0..=d)
        .map(|p| {
            let denom = (1u64 << (p + d)) as f64;
            km.cells(p)
                .map(|c| {
                    let mu = km.measure(c);
                    let s: f64 = km.cell_vertices(c).iter().map(|&v| kappa[v] * node_mass[v]).sum();
                    s / (denom * mu * mu)
                })
                .collect()
        })
        .collect();
    Ok(MetricContext {
        fc,
        kappa,
        vol: Cochain::new(d, top.to_vec()),
        weights,
        cup: CupTable::new(fc),
    })
}

impl<'a> MetricContext<'a> {
    pub fn complex(&self) -> &'a FormanComplex {
        self.fc
    }

    pub fn cup_table(&self) -> &CupTable<'a> {
        &self.cup
    }

    pub fn dim(&self) -> usize {
        self.fc.dim()
    }

    /// `W_p[c] = ⟨c^p, c^p⟩`.
    pub fn weights(&self, p: usize) -> &[f64] {
        &self.weights[p]
    }

    pub fn inner_product(&self, s: &Cochain, t: &Cochain) -> Result<f64> {
        if s.degree != t.degree {
            return Err(Error::DegreeMismatch { left: s.degree, right: t.degree });
        }
        let w = &self.weights[s.degree];
        check_len(w.len(), s.len())?;
        check_len(w.len(), t.len())?;
        Ok(s.values.iter().zip(&t.values).zip(w).map(|((a, b), w)| a * b * w).sum())
    }

    /// `(f ⌣ vol)[K]`.
    pub fn riemann_integral(&self, f: &Cochain) -> Result<f64> {
        if f.degree != 0 {
            return Err(Error::DegreeMismatch { left: f.degree, right: 0 });
        }
        let fv = self.cup.cup(f, &self.vol)?;
        Ok(fv.values.iter().sum())
    }

    /// `δ^p σ`.
    pub fn coboundary(&self, s: &Cochain) -> Result<Cochain> {
        self.fc.k().coboundary_of(s)
    }

    /// `δ*τ = W_p⁻¹ (δ^p)ᵀ W_{p+1} τ` for a `(p+1)`-cochain `τ`.
    pub fn adjoint_coboundary(&self, t: &Cochain) -> Result<Cochain> {
        let q = t.degree;
        if q == 0 || q > self.dim() {
            return Err(Error::DegreeOverflow { degree: q, dim: self.dim() });
        }
        check_len(self.weights[q].len(), t.len())?;
        let wt: Vec<f64> = t.values.iter().zip(&self.weights[q]).map(|(a, w)| a * w).collect();
        let mut y = int_matvec(self.fc.k().boundary_matrix(q), &wt);
        for (v, w) in y.iter_mut().zip(&self.weights[q - 1]) {
            *v /= w;
        }
        Ok(Cochain::new(q - 1, y))
    }

    /// `Δ_p σ = δ δ* σ + δ* δ σ`.
    pub fn apply_laplacian(&self, s: &Cochain) -> Result<Cochain> {
        let p = s.degree;
        let d = self.dim();
        let mut out = vec![0.0; s.len()];
        if p > 0 {
            let down = self.coboundary(&self.adjoint_coboundary(s)?)?;
            out.iter_mut().zip(&down.values).for_each(|(o, v)| *o += v);
        }
        if p < d {
            let up = self.adjoint_coboundary(&self.coboundary(s)?)?;
            out.iter_mut().zip(&up.values).for_each(|(o, v)| *o += v);
        }
        Ok(Cochain::new(p, out))
    }

    /// `Δ_0 c = δ*₁ δ₀ c` on a single 0-cochain.
    pub fn laplacian_0(&self, c: &Cochain) -> Result<Cochain> {
        if c.degree != 0 {
            return Err(Error::DegreeMismatch { left: c.degree, right: 0 });
        }
        self.apply_laplacian(c)
    }

    /// `Δ_p` as a sparse matrix (not symmetric; `W_p Δ_p` is).
    pub fn laplacian(&self, p: usize) -> Result<CsMat<f64>> {
        let d = self.dim();
        if p > d {
            return Err(Error::DegreeOverflow { degree: p, dim: d });
        }
        let k = self.fc.k();
        let n = k.count(p);
        let mut tri = TriMat::new((n, n));
        let w = &self.weights;
        // δ*_{p+1} δ_p: entries Σ_e W_p[i]⁻¹ B[i,e] W_{p+1}[e] B[j,e]
        if p < d {
            let b = k.boundary_matrix(p + 1).to_csc();
            for (e, col) in b.outer_iterator().enumerate() {
                for (i, &bi) in col.iter() {
                    for (j, &bj) in col.iter() {
                        tri.add_triplet(i, j, bi as f64 * bj as f64 * w[p + 1][e] / w[p][i]);
                    }
                }
            }
        }
        // δ_{p-1} δ*_p: entries Σ_f B[f,i] W_{p-1}[f]⁻¹ B[f,j] W_p[j]
        if p > 0 {
            let b = k.boundary_matrix(p).to_csr();
            for (f, row) in b.outer_iterator().enumerate() {
                for (i, &bi) in row.iter() {
                    for (j, &bj) in row.iter() {
                        tri.add_triplet(i, j, bi as f64 * bj as f64 * w[p][j] / w[p - 1][f]);
                    }
                }
            }
        }
        Ok(tri.to_csr())
    }

    /// `⋆σ = Σ_a ((a ⌣ σ)[K] / ⟨a, a⟩) a` over basis `(d-p)`-cells `a`.
    pub fn hodge_star(&self, s: &Cochain) -> Result<Cochain> {
        let d = self.dim();
        let p = s.degree;
        if p > d {
            return Err(Error::DegreeOverflow { degree: p, dim: d });
        }
        check_len(self.weights[p].len(), s.len())?;
        let q = d - p;
        let mut out = vec![0.0; self.weights[q].len()];
        for e in self.cup.entries(q, p)? {
            out[e.a] += e.coef * s.values[e.b];
        }
        for (v, w) in out.iter_mut().zip(&self.weights[q]) {
            *v /= w;
        }
        Ok(Cochain::new(q, out))
    }

    /// Dense `W_p^{1/2} Δ_p W_p^{-1/2}`: symmetric, same spectrum as `Δ_p`.
    fn symmetric_laplacian(&self, p: usize) -> Result<DMatrix<f64>> {
        let l = self.laplacian(p)?;
        let w = &self.weights[p];
        let n = w.len();
        let mut m = DMatrix::zeros(n, n);
        for (v, (i, j)) in l.iter() {
            m[(i, j)] += v * (w[i] / w[j]).sqrt();
        }
        Ok(m)
    }

    /// Verifies the Hodge decomposition in every degree.
    ///
    /// Works in coordinates `x̃ = W^{1/2} x` where the metric is Euclidean:
    /// images of `δ` and `δ*` become column spaces of scaled incidence matrices.
    pub fn hodge_report(&self, samples: usize, seed: u64) -> Result<HodgeReport> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let k = self.fc.k();
        let betti = k.betti_numbers();
        let mut degrees = Vec::new();
        for p in 0..=d {
            let n = k.count(p);
            let wp: Vec<f64> = self.weights[p].iter().map(|w| w.sqrt()).collect();
            // Im δ^{p-1}: W_p^{1/2} ∂_pᵀ W_{p-1}^{-1/2}
            let exact = if p > 0 {
                let b = crate::orientation::to_dense(k.boundary_matrix(p));
                let wq: Vec<f64> = self.weights[p - 1].iter().map(|w| w.sqrt()).collect();
                DMatrix::from_fn(n, b.nrows(), |i, f| wp[i] * b[(f, i)] / wq[f])
            } else {
                DMatrix::zeros(n, 0)
            };
            // Im δ*_{p+1}: W_p^{-1/2} ∂_{p+1} W_{p+1}^{1/2}
            let coexact = if p < d {
                let b = crate::orientation::to_dense(k.boundary_matrix(p + 1));
                let wq: Vec<f64> = self.weights[p + 1].iter().map(|w| w.sqrt()).collect();
                DMatrix::from_fn(n, b.ncols(), |i, e| b[(i, e)] * wq[e] / wp[i])
            } else {
                DMatrix::zeros(n, 0)
            };
            let qe = orthonormal_basis(&exact);
            let qc = orthonormal_basis(&coexact);
            let cross = if qe.ncols() > 0 && qc.ncols() > 0 {
                (qe.transpose() * &qc).abs().max()
            } else {
                0.0
            };

            let lap = self.symmetric_laplacian(p)?;
            let asym = (&lap - lap.transpose()).abs().max();
            let eig = SymmetricEigen::new(lap.clone()).eigenvalues;
            let emax = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let kernel_dim = eig.iter().filter(|&&e| e.abs() <= 1e-9 * emax.max(1.0)).count();
            let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);

            let mut recon: f64 = 0.0;
            let mut orth: f64 = 0.0;
            let mut harm_res: f64 = 0.0;
            for _ in 0..samples {
                let x = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let xe = &qe * (qe.transpose() * &x);
                let xc = &qc * (qc.transpose() * &x);
                let xh = &x - &xe - &xc;
                let scale = x.norm().max(1e-300);
                recon = recon.max((&xe + &xc + &xh - &x).norm() / scale);
                orth = orth
                    .max(xe.dot(&xc).abs() / (scale * scale))
                    .max(xe.dot(&xh).abs() / (scale * scale))
                    .max(xc.dot(&xh).abs() / (scale * scale));
                harm_res = harm_res.max((&lap * &xh).norm() / (emax.max(1.0) * scale));
            }
            degrees.push(HodgeDegree {
                p,
                kernel_dim,
                betti: betti[p],
                harmonic_dim: n - qe.ncols() - qc.ncols(),
                exact_coexact_overlap: cross,
                orthogonality: orth,
                reconstruction: recon,
                harmonic_residual: harm_res,
                min_eigenvalue: min_eig,
                asymmetry: asym,
            });
        }
        Ok(HodgeReport { degrees })
    }
}

fn orthonormal_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let r = rank(a, 1e-9);
    let svd = a.clone().svd(true, false);
    let u = svd.u.unwrap();
    // singular values come unsorted from nalgebra; pick the largest r
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    DMatrix::from_fn(a.nrows(), r, |i, j| u[(i, idx[j])])
}

/// Per-degree Hodge checks.
#[derive(Clone, Debug)]
pub struct HodgeDegree {
    pub p: usize,
    /// `dim Ker Δ_p` from the spectrum.
    pub kernel_dim: usize,
    pub betti: usize,
    /// `dim C^p − rank δ − rank δ*`.
    pub harmonic_dim: usize,
    pub exact_coexact_overlap: f64,
    pub orthogonality: f64,
    pub reconstruction: f64,
    /// Relative size of `Δ_p h` for the harmonic parts.
    pub harmonic_residual: f64,
    /// Smallest eigenvalue of `W_p Δ_p` after symmetric scaling.
    pub min_eigenvalue: f64,
    pub asymmetry: f64,
}

#[derive(Clone, Debug)]
pub struct HodgeReport {
    pub degrees: Vec<HodgeDegree>,
}

impl HodgeReport {
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.kernel_dim).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.degrees
            .iter()
            .map(|d| d.reconstruction.max(d.orthogonality).max(d.exact_coexact_overlap).max(d.harmonic_residual))
            .fold(0.0, f64::max)
    }
}
