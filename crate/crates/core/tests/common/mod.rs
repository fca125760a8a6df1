#![allow(dead_code)]

use forman_core::forman::FormanComplex;
use forman_core::io::generate;
use forman_core::mesh::Mesh;
use forman_core::orientation::{orient_compatibly, Cochain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cochain(rng: &mut ChaCha8Rng, degree: usize, n: usize) -> Cochain {
    Cochain::new(degree, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

pub fn subdivide(m: Mesh) -> FormanComplex {
    FormanComplex::new(orient_compatibly(m).unwrap()).unwrap()
}

/// The fixtures the exactness suite runs on.
pub fn fixtures() -> Vec<(&'static str, FormanComplex)> {
    vec![
        ("two triangles", subdivide(generate::two_triangles().unwrap())),
        ("cube grid", subdivide(generate::unit_cube_grid(2).unwrap())),
        ("torus", subdivide(generate::torus(6, 4, 2.0, 0.7).unwrap())),
        ("warped hexahedron", subdivide(generate::warped_hexahedron().unwrap())),
        ("tetrahedron", subdivide(generate::tetrahedron().unwrap())),
        ("interval", subdivide(generate::interval(3, 1.0).unwrap())),
    ]
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
