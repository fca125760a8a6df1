mod common;

use common::*;
use forman_core::algebra::{evaluate, CupTable};
use forman_core::forman::Form;
use forman_core::io::generate;
use forman_core::mesh::CellId;
use forman_core::orientation::Cochain;
use forman_core::Error;

fn add(a: &Cochain, b: &Cochain, s: f64) -> Vec<f64> {
    a.values.iter().zip(&b.values).map(|(x, y)| x + s * y).collect()
}

#[test]
fn leibniz_rule_on_random_cochains() {
    for (name, fc) in fixtures() {
        let k = fc.k();
        let d = k.dim();
        let cup = CupTable::new(&fc);
        let mut r = rng(11);
        let mut worst: f64 = 0.0;
        for trial in 0..200 {
            let p = trial % d;
            let q = (trial / d) % (d - p);
            let s = random_cochain(&mut r, p, k.count(p));
            let t = random_cochain(&mut r, q, k.count(q));
            let lhs = k.coboundary_of(&cup.cup(&s, &t).unwrap()).unwrap();
            let a = cup.cup(&k.coboundary_of(&s).unwrap(), &t).unwrap();
            let b = cup.cup(&s, &k.coboundary_of(&t).unwrap()).unwrap();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = Cochain::new(p + q + 1, add(&a, &b, sign));
            worst = worst.max(max_abs(&sub(&lhs.values, &rhs.values)));
        }
        assert!(worst <= 1e-12, "{name}: residual {worst}");
    }
}

#[test]
fn wedge_satisfies_leibniz_with_exterior_derivative() {
    let fc = subdivide(generate::warped_hexahedron().unwrap());
    let cup = CupTable::new(&fc);
    let mut r = rng(5);
    for (p, q) in [(0, 0), (0, 1), (1, 1), (1, 0), (0, 2), (2, 0)] {
        let w = fc.forman_iso_inv(&random_cochain(&mut r, p, fc.k().count(p))).unwrap();
        let h = fc.forman_iso_inv(&random_cochain(&mut r, q, fc.k().count(q))).unwrap();
        let lhs = fc.exterior_derivative(&cup.wedge(&w, &h).unwrap()).unwrap();
        let a = cup.wedge(&fc.exterior_derivative(&w).unwrap(), &h).unwrap();
        let b = cup.wedge(&w, &fc.exterior_derivative(&h).unwrap()).unwrap();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x + sign * y).collect();
        assert!(max_abs(&sub(&lhs.values, &rhs)) <= 1e-12, "p={p} q={q}");
    }
}

#[test]
fn one_is_a_two_sided_unit() {
    for (name, fc) in fixtures() {
        let cup = CupTable::new(&fc);
        let one = Form::one(&fc);
        let mut r = rng(2);
        for p in 0..=fc.dim() {
            let w = fc.forman_iso_inv(&random_cochain(&mut r, p, fc.k().count(p))).unwrap();
            assert_eq!(cup.wedge(&one, &w).unwrap().values, w.values, "{name}: left p={p}");
            assert_eq!(cup.wedge(&w, &one).unwrap().values, w.values, "{name}: right p={p}");
        }
    }
}

#[test]
fn basis_products_in_two_triangles() {
    let fc = subdivide(generate::two_triangles().unwrap());
    let k = fc.k();
    let cup = CupTable::new(&fc);
    let node = fc.knode(CellId::new(0, 1));
    let n = Cochain::basis(0, k.count(0), node);
    assert_eq!(cup.cup(&n, &n).unwrap(), n);

    // node ⌣ incident K-edge is half the edge; ⌣ incident K-face is a quarter
    let e = fc.kcell_of_pair(CellId::new(1, 1), CellId::new(0, 1)).unwrap();
    let ev = Cochain::basis(1, k.count(1), e.index);
    let prod = cup.cup(&n, &ev).unwrap();
    assert_eq!(prod.values[e.index], 0.5);
    assert_eq!(prod.values.iter().filter(|&&v| v != 0.0).count(), 1);
    let f = fc.kcell_of_pair(CellId::new(2, 0), CellId::new(0, 1)).unwrap();
    let fv = Cochain::basis(2, k.count(2), f.index);
    let prod = cup.cup(&n, &fv).unwrap();
    assert_eq!(prod.values[f.index], 0.25);

    // two K-edges of that face meeting at a corner
    let e1 = fc.kcell_of_pair(CellId::new(2, 0), CellId::new(1, 1)).unwrap();
    let e1v = Cochain::basis(1, k.count(1), e1.index);
    let a = cup.cup(&ev, &e1v).unwrap();
    let b = cup.cup(&e1v, &ev).unwrap();
    assert_eq!(a.values[f.index].abs(), 0.25);
    assert_eq!(a.values, b.values.iter().map(|v| -v).collect::<Vec<_>>());
}

#[test]
fn graded_anticommutation_on_basis_pairs() {
    for (name, fc) in fixtures() {
        let cup = CupTable::new(&fc);
        let d = fc.dim();
        for p in 0..=d {
            for q in 0..=d - p {
                let pq = cup.entries(p, q).unwrap();
                let qp = cup.entries(q, p).unwrap();
                assert_eq!(pq.len(), qp.len());
                let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
                for e in pq {
                    let twin = qp.iter().find(|f| f.a == e.b && f.b == e.a && f.c == e.c).expect("twin entry");
                    assert_eq!(twin.coef, sign * e.coef, "{name}");
                }
            }
        }
    }
}

#[test]
fn products_live_on_common_cells() {
    let fc = subdivide(generate::unit_cube_grid(2).unwrap());
    let cup = CupTable::new(&fc);
    let kmesh = fc.k().mesh();
    for (p, q) in [(1, 1), (1, 2), (0, 3)] {
        for e in cup.entries(p, q).unwrap() {
            let c = CellId::new(p + q, e.c);
            assert!(kmesh.is_face(CellId::new(p, e.a), c));
            assert!(kmesh.is_face(CellId::new(q, e.b), c));
        }
    }
    // disjoint supports multiply to zero
    let n = fc.k().count(0);
    let a = Cochain::basis(0, n, fc.knode(CellId::new(0, 0)));
    let b = Cochain::basis(0, n, fc.knode(CellId::new(0, 1)));
    assert!(cup.cup(&a, &b).unwrap().values.iter().all(|&v| v == 0.0));
}

#[test]
fn degree_overflow_and_evaluation() {
    let fc = subdivide(generate::two_triangles().unwrap());
    let cup = CupTable::new(&fc);
    let k = fc.k();
    let s = Cochain::zeros(2, k.count(2));
    let t = Cochain::zeros(1, k.count(1));
    assert!(matches!(cup.cup(&s, &t), Err(Error::DegreeOverflow { degree: 3, dim: 2 })));

    let ones = Cochain::new(2, vec![1.0; k.count(2)]);
    let fund = k.fundamental_class().unwrap();
    assert_eq!(evaluate(&ones, &fund).unwrap(), k.count(2) as f64);
    let b = Cochain::basis(1, k.count(1), 3);
    assert_eq!(evaluate(&b, &Cochain::basis(1, k.count(1), 3)).unwrap(), 1.0);
    assert_eq!(evaluate(&b, &Cochain::basis(1, k.count(1), 4)).unwrap(), 0.0);
    assert!(matches!(evaluate(&b, &fund), Err(Error::DegreeMismatch { .. })));
}
