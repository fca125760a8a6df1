use std::collections::{BTreeSet, VecDeque};

use super::{CellId, Mesh};
use crate::error::{Error, Result};

/// Outcome of the combinatorial mesh checks.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub is_manifold_like: bool,
    /// `p_regular[p]` for `p <= d - 2`.
    pub p_regular: Vec<bool>,
    pub has_cubical_corners: bool,
    /// `(d-1)`-cells with exactly one `d`-superface.
    pub boundary_cell_ids: BTreeSet<CellId>,
    pub failures: Vec<(String, Vec<CellId>)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) fn validate(m: &Mesh) -> ValidationReport {
    let d = m.dim();
    let mut rep = ValidationReport::default();

    let uncovered: Vec<CellId> = (0..d)
        .flat_map(|p| m.cells(p))
        .filter(|&c| m.cofaces(c, d).is_empty())
        .collect();
    if !uncovered.is_empty() {
        rep.failures.push(("cell without top-dimensional superface".into(), uncovered.clone()));
    }

    let mut branching = Vec::new();
    if d > 0 {
        for b in m.cells(d - 1) {
            match m.hypercofaces(b).len() {
                1 => {
                    rep.boundary_cell_ids.insert(b);
                }
                2 => {}
                _ => branching.push(b),
            }
        }
    }
    if !branching.is_empty() {
        rep.failures.push(("hyperface with more than two top cells".into(), branching.clone()));
    }

    let mut regular_ok = true;
    for p in 0..d.saturating_sub(1) {
        let bad: Vec<CellId> = m.cells(p).filter(|&a| !connected_around(m, a)).collect();
        rep.p_regular.push(bad.is_empty());
        if !bad.is_empty() {
            regular_ok = false;
            rep.failures.push((format!("not {p}-regular"), bad));
        }
    }

    let mut corners = Vec::new();
    for c in m.cells(d) {
        let edges = m.faces(c, 1);
        for &v in m.faces(c, 0) {
            let n = m
                .cofaces(CellId::new(0, v), 1)
                .iter()
                .filter(|e| edges.binary_search(e).is_ok())
                .count();
            if n != d {
                corners.push(c);
                break;
            }
        }
    }
    rep.has_cubical_corners = corners.is_empty();
    if !corners.is_empty() {
        rep.failures.push(("non-cubical corner".into(), corners));
    }

    rep.is_manifold_like = uncovered.is_empty() && branching.is_empty() && regular_ok;
    rep
}

/// Whether the `(p+2)`-superfaces of `a` are connected through `(p+1)`-superfaces.
fn connected_around(m: &Mesh, a: CellId) -> bool {
    let p = a.dim;
    let tops = m.cofaces(a, p + 2);
    if tops.len() <= 1 {
        return true;
    }
    let mids = m.cofaces(a, p + 1);
    let mut seen = vec![false; tops.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        let t = CellId::new(p + 2, tops[i]);
        for &h in m.hyperfaces(t) {
            if mids.binary_search(&h).is_err() {
                continue;
            }
            for &u in m.hypercofaces(CellId::new(p + 1, h)) {
                if let Ok(j) = tops.binary_search(&u) {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

pub(crate) fn boundary_submesh(m: &Mesh) -> Result<Mesh> {
    let rep = validate(m);
    if !rep.is_manifold_like {
        return Err(Error::NotManifold(format!("{:?}", rep.failures)));
    }
    let d = m.dim();
    if d == 0 || rep.boundary_cell_ids.is_empty() {
        return Mesh::new(m.embedding_dim(), Vec::new(), Vec::new());
    }
    let q = d - 1;
    let mut keep: Vec<Vec<usize>> = vec![Vec::new(); q + 1];
    for b in &rep.boundary_cell_ids {
        for (r, k) in keep.iter_mut().enumerate() {
            k.extend_from_slice(m.faces(*b, r));
        }
    }
    let mut remap: Vec<Vec<usize>> = Vec::with_capacity(q + 1);
    for (r, k) in keep.iter_mut().enumerate() {
        k.sort_unstable();
        k.dedup();
        let mut map = vec![usize::MAX; m.count(r)];
        for (new, &old) in k.iter().enumerate() {
            map[old] = new;
        }
        remap.push(map);
    }
    let vertices = keep[0].iter().map(|&v| m.point(v)).collect();
    let tables = (1..=q)
        .map(|r| {
            keep[r]
                .iter()
                .map(|&c| {
                    m.hyperfaces(CellId::new(r, c))
                        .iter()
                        .map(|&h| remap[r - 1][h])
                        .collect()
                })
                .collect()
        })
        .collect();
    Mesh::new(m.embedding_dim(), vertices, tables)
}
