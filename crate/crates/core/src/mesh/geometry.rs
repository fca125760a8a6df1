use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use super::{CellId, Mesh, Point};
use crate::error::{Error, Result};

pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Fan triangulation of a vertex loop, either from a loop vertex or from the
/// vertex mean. Triangles follow the loop direction.
pub(crate) fn fan(pts: &[Point], apex: Option<usize>) -> Vec<[Point; 3]> {
    let n = pts.len();
    match apex {
        Some(k) => (1..n - 1)
            .map(|i| [pts[k], pts[(k + i) % n], pts[(k + i + 1) % n]])
            .collect(),
        None => {
            let g = pts.iter().sum::<Point>() / n as f64;
            (0..n).map(|i| [g, pts[i], pts[(i + 1) % n]]).collect()
        }
    }
}

/// Area of a (possibly non-planar) polygon as the sum of its fan triangles.
pub fn polygon_area(pts: &[Point], apex: Option<usize>) -> f64 {
    fan(pts, apex).iter().map(|t| triangle_area(&t[0], &t[1], &t[2])).sum()
}

/// Volume from signed tetrahedra over the triangulated boundary. Face loops
/// are oriented consistently by walking across shared edges, which neighbours
/// traverse in opposite directions; the magnitude of the resulting signed
/// volume is the enclosed volume. A per-face outward test against the cell
/// centroid picks wrong signs on thin, warped cells.
pub(crate) fn polyhedron_volume(mesh: &Mesh, c: usize) -> f64 {
    let cell = CellId::new(3, c);
    let faces = mesh.faces(cell, 2);
    let o = mesh.centroid(cell);
    let directed = |k: usize| {
        let lp = mesh.polygon(faces[k]);
        (0..lp.len()).map(move |i| (lp[i], lp[(i + 1) % lp.len()]))
    };
    let mut on_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for k in 0..faces.len() {
        for (a, b) in directed(k) {
            on_edge.entry((a.min(b), a.max(b))).or_default().push(k);
        }
    }
    // sign[k] = +1 keeps the stored loop direction of face k
    let mut sign = vec![0i8; faces.len()];
    let mut queue = VecDeque::new();
    for root in 0..faces.len() {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        queue.push_back(root);
        while let Some(k) = queue.pop_front() {
            for (a, b) in directed(k) {
                for &j in &on_edge[&(a.min(b), a.max(b))] {
                    if sign[j] == 0 {
                        let same = directed(j).any(|e| e == (a, b));
                        sign[j] = if same { -sign[k] } else { sign[k] };
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    let mut vol = 0.0;
    for (k, &f) in faces.iter().enumerate() {
        for t in mesh.polygon_triangles(f) {
            vol += f64::from(sign[k]) * (t[0] - o).dot(&(t[1] - o).cross(&(t[2] - o))) / 6.0;
        }
    }
    vol.abs()
}

/// Signed solid angle of the trihedral cone spanned by `a`, `b`, `c`.
pub fn solid_angle(a: &Point, b: &Point, c: &Point) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

pub(crate) fn angle_measure(mesh: &Mesh, c: CellId, a0: usize) -> Result<f64> {
    let node = CellId::new(0, a0);
    if c.dim == 0 || !mesh.is_face(node, c) {
        return Err(Error::NotIncident { cell: c, face: node });
    }
    if c.dim == 1 {
        return Ok(0.5);
    }
    let x = mesh.point(a0);
    let corner_edges: Vec<usize> = intersect(mesh.faces(c, 1), mesh.cofaces(node, 1));
    let dir = |e: usize| {
        let ends = mesh.faces(CellId::new(1, e), 0);
        let other = if ends[0] == a0 { ends[1] } else { ends[0] };
        mesh.point(other) - x
    };
    if c.dim == 2 {
        let (u, v) = (dir(corner_edges[0]), dir(corner_edges[1]));
        return Ok(u.cross(&v).norm().atan2(u.dot(&v)) / (2.0 * PI));
    }
    // order the corner edges cyclically through the faces meeting at the corner
    let corner_faces = intersect(mesh.faces(c, 2), mesh.cofaces(node, 2));
    let m = corner_edges.len();
    let mut ring = vec![corner_edges[0]];
    let mut used = vec![false; corner_faces.len()];
    while ring.len() < m {
        let last = *ring.last().unwrap();
        let mut next = None;
        for (k, &f) in corner_faces.iter().enumerate() {
            if used[k] {
                continue;
            }
            let fe = mesh.faces(CellId::new(2, f), 1);
            if fe.binary_search(&last).is_ok() {
                used[k] = true;
                next = corner_edges
                    .iter()
                    .copied()
                    .find(|&e| e != last && fe.binary_search(&e).is_ok());
                break;
            }
        }
        match next {
            Some(e) => ring.push(e),
            None => {
                return Err(Error::InvalidGeometry(format!("corner {a0} of {c} is not a cone")));
            }
        }
    }
    let vecs: Vec<Point> = ring.iter().map(|&e| dir(e)).collect();
    let omega: f64 = (1..m - 1)
        .map(|i| solid_angle(&vecs[0], &vecs[i], &vecs[i + 1]))
        .sum();
    Ok(omega.abs() / (4.0 * PI))
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}
