//! Quasi-cubical cup product on K and the induced wedge product on M.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::forman::{permutation_sign, Form, FormanComplex};
use crate::mesh::CellId;
use crate::orientation::{check_len, Chain, Cochain};

/// One nonzero basis product `a^p ⌣ b^q = coef · c^{p+q}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CupEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub coef: f64,
}

/// Basis products of `K`, generated per degree pair on first use.
#[derive(Debug)]
pub struct CupTable<'a> {
    fc: &'a FormanComplex,
    tables: Vec<OnceLock<Vec<CupEntry>>>,
}

impl Clone for CupTable<'_> {
    fn clone(&self) -> Self {
        CupTable::new(self.fc)
    }
}

impl<'a> CupTable<'a> {
    pub fn new(fc: &'a FormanComplex) -> Self {
        let n = fc.dim() + 1;
        CupTable {
            fc,
            tables: (0..n * n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn complex(&self) -> &'a FormanComplex {
        self.fc
    }

    /// All nonzero products of a `p`-cell with a `q`-cell.
    pub fn entries(&self, p: usize, q: usize) -> Result<&[CupEntry]> {
        let d = self.fc.dim();
        if p + q > d {
            return Err(Error::DegreeOverflow { degree: p + q, dim: d });
        }
        Ok(self.tables[p * (d + 1) + q].get_or_init(|| build_entries(self.fc, p, q)))
    }

    pub fn cup(&self, s: &Cochain, t: &Cochain) -> Result<Cochain> {
        let (p, q) = (s.degree, t.degree);
        let k = self.fc.k();
        let entries = self.entries(p, q)?;
        check_len(k.count(p), s.len())?;
        check_len(k.count(q), t.len())?;
        let mut out = Cochain::zeros(p + q, k.count(p + q));
        // entries come grouped by target cell; compensated sums keep the
        // unit law exact
        for group in entries.chunk_by(|x, y| x.c == y.c) {
            let (mut sum, mut comp) = (0.0f64, 0.0f64);
            for e in group {
                let v = e.coef * s.values[e.a] * t.values[e.b];
                let next = sum + v;
                comp += if sum.abs() >= v.abs() { (sum - next) + v } else { (v - next) + sum };
                sum = next;
            }
            out.values[group[0].c] = sum + comp;
        }
        Ok(out)
    }

    /// `ω ∧ η = F⁻¹(F ω ⌣ F η)`.
    pub fn wedge(&self, w: &Form, h: &Form) -> Result<Form> {
        let s = self.fc.forman_iso(w)?;
        let t = self.fc.forman_iso(h)?;
        self.fc.forman_iso_inv(&self.cup(&s, &t)?)
    }
}

/// Pairs a cochain with a chain of the same degree.
pub fn evaluate(s: &Cochain, r: &Chain) -> Result<f64> {
    if s.degree != r.degree {
        return Err(Error::DegreeMismatch { left: s.degree, right: r.degree });
    }
    check_len(s.len(), r.len())?;
    Ok(s.values.iter().zip(&r.values).map(|(a, b)| a * b).sum())
}

/// For every `(p+q)`-cell `C`, every corner `x` of `C` and every split of
/// the axes at `x` into `p` and `q` of them, the two faces spanned from `x`
/// meet only in `x` and multiply to `±C / 2^{p+q}`.
fn build_entries(fc: &FormanComplex, p: usize, q: usize) -> Vec<CupEntry> {
    let n = p + q;
    let mesh = fc.m().mesh();
    let k = fc.k();
    let scale = 1.0 / (1u64 << n) as f64;
    let mut out = Vec::new();
    for (ci, &(top, bottom)) in fc.pairs(n).iter().enumerate() {
        let cc = CellId::new(n, ci);
        let atoms = fc.atoms(cc);
        // M-cells of the interval [bottom, top] keyed by the atoms below them
        let mut elem = vec![usize::MAX; 1 << n];
        let mut elem_dim = vec![0usize; 1 << n];
        for r in bottom.dim..=top.dim {
            for &f in mesh.faces(top, r) {
                let fcell = CellId::new(r, f);
                if !mesh.is_face(bottom, fcell) {
                    continue;
                }
                let mut mask = 0usize;
                for (j, &a) in atoms.iter().enumerate() {
                    if mesh.is_face(CellId::new(bottom.dim + 1, a), fcell) {
                        mask |= 1 << j;
                    }
                }
                elem[mask] = f;
                elem_dim[mask] = r;
            }
        }
        let cell = |mask: usize| CellId::new(elem_dim[mask], elem[mask]);
        let full = (1usize << n) - 1;
        let s_c = k.sign(cc) as f64;
        for x in 0..=full {
            for s in 0..=full {
                if s.count_ones() as usize != p {
                    continue;
                }
                let sc = full & !s;
                let a = fc.kcell_of_pair(cell(x | s), cell(x & !s)).expect("face of quasi-cube");
                let b = fc.kcell_of_pair(cell(x | sc), cell(x & !sc)).expect("face of quasi-cube");
                let mut perm = fc.axes_in(cc, a);
                perm.extend(fc.axes_in(cc, b));
                let sign = s_c * k.sign(a) as f64 * k.sign(b) as f64 * permutation_sign(&perm) as f64;
                out.push(CupEntry {
                    a: a.index,
                    b: b.index,
                    c: ci,
                    coef: sign * scale,
                });
            }
        }
    }
    out
}
