//! Mesh generators: regular grids and the small shapes used as fixtures.

use std::f64::consts::PI;

use crate::error::Result;
use crate::mesh::{Mesh, MeshBuilder, Point};

/// `n³` axis-aligned cubes tiling the box `[lo, hi]`.
pub fn regular_grid(n: usize, lo: Point, hi: Point) -> Result<Mesh> {
    box_grid([n, n, n], lo, hi)
}

/// `nx × ny × nz` axis-aligned boxes tiling `[lo, hi]`.
pub fn box_grid(n: [usize; 3], lo: Point, hi: Point) -> Result<Mesh> {
    let [nx, ny, nz] = n;
    let idx = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut verts = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                verts.push(Point::new(
                    lerp(lo.x, hi.x, i, nx),
                    lerp(lo.y, hi.y, j, ny),
                    lerp(lo.z, hi.z, k, nz),
                ));
            }
        }
    }
    let mut b = MeshBuilder::new(3, verts);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let v = |a: usize, bb: usize, c: usize| idx(i + a, j + bb, k + c);
                let faces = vec![
                    vec![v(0, 0, 0), v(1, 0, 0), v(1, 1, 0), v(0, 1, 0)],
                    vec![v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1)],
                    vec![v(0, 0, 0), v(1, 0, 0), v(1, 0, 1), v(0, 0, 1)],
                    vec![v(0, 1, 0), v(1, 1, 0), v(1, 1, 1), v(0, 1, 1)],
                    vec![v(0, 0, 0), v(0, 1, 0), v(0, 1, 1), v(0, 0, 1)],
                    vec![v(1, 0, 0), v(1, 1, 0), v(1, 1, 1), v(1, 0, 1)],
                ];
                b.polyhedron(&faces);
            }
        }
    }
    b.build()
}

/// Unit cube split into `n³` cubes.
pub fn unit_cube_grid(n: usize) -> Result<Mesh> {
    regular_grid(n, Point::zeros(), Point::repeat(1.0))
}

/// `nx × ny` squares tiling `[0,1]²` in the plane.
pub fn square_grid(nx: usize, ny: usize) -> Result<Mesh> {
    let idx = |i: usize, j: usize| i + (nx + 1) * j;
    let mut verts = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            verts.push(Point::new(lerp(0.0, 1.0, i, nx), lerp(0.0, 1.0, j, ny), 0.0));
        }
    }
    let mut b = MeshBuilder::new(2, verts);
    for j in 0..ny {
        for i in 0..nx {
            b.polygon(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    b.build()
}

/// `[0, length]` split into `n` equal edges.
pub fn interval(n: usize, length: f64) -> Result<Mesh> {
    let verts = (0..=n).map(|i| Point::new(lerp(0.0, length, i, n), 0.0, 0.0)).collect();
    let edges = (0..n).map(|i| vec![i, i + 1]).collect();
    Mesh::new(1, verts, vec![edges])
}

/// Surface of revolution torus with `nu × nv` planar trapezoidal quads.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> Result<Mesh> {
    let idx = |i: usize, j: usize| (i % nu) + nu * (j % nv);
    let mut verts = Vec::new();
    for j in 0..nv {
        let v = 2.0 * PI * j as f64 / nv as f64;
        for i in 0..nu {
            let u = 2.0 * PI * i as f64 / nu as f64;
            let rr = major + minor * v.cos();
            verts.push(Point::new(rr * u.cos(), rr * u.sin(), minor * v.sin()));
        }
    }
    let mut b = MeshBuilder::new(3, verts);
    for j in 0..nv {
        for i in 0..nu {
            b.polygon(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    b.build()
}

/// 3×3 square grid on `[0,3]²` with the centre square removed.
pub fn annulus() -> Result<Mesh> {
    let idx = |i: usize, j: usize| i + 4 * j;
    let verts = (0..4)
        .flat_map(|j| (0..4).map(move |i| Point::new(i as f64, j as f64, 0.0)))
        .collect();
    let mut b = MeshBuilder::new(2, verts);
    for j in 0..3 {
        for i in 0..3 {
            if (i, j) != (1, 1) {
                b.polygon(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    b.build()
}

/// Möbius strip made of `n` quads.
pub fn moebius(n: usize) -> Result<Mesh> {
    let mut verts = Vec::new();
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        for s in [-0.3, 0.3] {
            let r = 1.0 + s * (t / 2.0).cos();
            verts.push(Point::new(r * t.cos(), r * t.sin(), s * (t / 2.0).sin()));
        }
    }
    let mut b = MeshBuilder::new(3, verts);
    for i in 0..n {
        let (a0, a1) = (2 * i, 2 * i + 1);
        let (b0, b1) = if i + 1 < n {
            (2 * i + 2, 2 * i + 3)
        } else {
            // the half twist glues the strip back with the sides swapped
            (1, 0)
        };
        b.polygon(&[a0, b0, b1, a1]);
    }
    b.build()
}

/// Unit square cut along a diagonal into two triangles.
///
/// Nodes 0..4 are (0,0), (1,0), (1,1), (0,1); the shared edge joins nodes 1 and 3.
pub fn two_triangles() -> Result<Mesh> {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
    ];
    // edges: 0:(0,3) 1:(0,1) 2:(1,3) 3:(2,3) 4:(1,2)
    let edges = vec![vec![0, 3], vec![0, 1], vec![1, 3], vec![2, 3], vec![1, 2]];
    let faces = vec![vec![0, 1, 2], vec![2, 3, 4]];
    Mesh::new(2, verts, vec![edges, faces])
}

/// Two triangles touching at a single node.
pub fn bow_tie() -> Result<Mesh> {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(-1.0, -1.0, 0.0),
        Point::new(-1.0, 1.0, 0.0),
        Point::new(1.0, -1.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
    ];
    let mut b = MeshBuilder::new(2, verts);
    b.polygon(&[0, 1, 2]);
    b.polygon(&[0, 3, 4]);
    b.build()
}

/// Square pyramid with apex above the unit square.
pub fn square_pyramid() -> Result<Mesh> {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
        Point::new(0.5, 0.5, 1.0),
    ];
    let mut b = MeshBuilder::new(3, verts);
    b.polyhedron(&[
        vec![0, 1, 2, 3],
        vec![0, 1, 4],
        vec![1, 2, 4],
        vec![2, 3, 4],
        vec![3, 0, 4],
    ]);
    b.build()
}

/// Regular tetrahedron with unit edges.
pub fn tetrahedron() -> Result<Mesh> {
    let h = (2.0f64 / 3.0).sqrt();
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        Point::new(0.5, 3f64.sqrt() / 6.0, h),
    ];
    let mut b = MeshBuilder::new(3, verts);
    b.polyhedron(&[vec![0, 1, 2], vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 3]]);
    b.build()
}

/// One hexahedron with cubical corners but warped, non-planar side faces.
pub fn warped_hexahedron() -> Result<Mesh> {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.1, 1.0, 0.0),
        Point::new(0.0, 0.9, 0.0),
        Point::new(0.0, 0.0, 1.0),
        Point::new(1.0, 0.1, 1.2),
        Point::new(1.0, 1.0, 1.0),
        Point::new(-0.1, 1.0, 0.9),
    ];
    let mut b = MeshBuilder::new(3, verts);
    b.polyhedron(&[
        vec![0, 1, 2, 3],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![3, 2, 6, 7],
        vec![0, 3, 7, 4],
        vec![1, 2, 6, 5],
    ]);
    b.build()
}

fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if i == n {
        b
    } else {
        a + (b - a) * i as f64 / n as f64
    }
}
