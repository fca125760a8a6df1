//! Plain-text mesh interchange format.
//!
//! ```text
//! format forman-mesh 1
//! embedding 3
//! vertices 8
//! 0 0 0
//! ...
//! cells 1 12
//! 0 1
//! ...
//! cells 2 6
//! 0 4 5 8
//! ...
//! end
//! ```
//!
//! Each cell line lists the 0-based indices of its hyperfaces (vertices for
//! edges). `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

pub const FORMAT_NAME: &str = "forman-mesh";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_mesh_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "format {FORMAT_NAME} {FORMAT_VERSION}").unwrap();
    writeln!(s, "embedding {}", mesh.embedding_dim()).unwrap();
    writeln!(s, "vertices {}", mesh.count(0)).unwrap();
    for p in mesh.vertices() {
        let coords: Vec<String> = (0..mesh.embedding_dim()).map(|i| format!("{:?}", p[i])).collect();
        writeln!(s, "{}", coords.join(" ")).unwrap();
    }
    for d in 1..=mesh.dim() {
        writeln!(s, "cells {d} {}", mesh.count(d)).unwrap();
        for c in mesh.cells(d) {
            let row: Vec<String> = mesh.hyperfaces(c).iter().map(|i| i.to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
    }
    s.push_str("end\n");
    s
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, write_mesh_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last = 0;
    let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
        match lines.next() {
            Some((n, l)) => {
                last = n;
                Ok((n, l.split_whitespace().collect()))
            }
            None => Err(Error::Parse { line: last + 1, msg: format!("unexpected end of file, expected {what}") }),
        }
    };

    let (n, head) = next("header")?;
    if head.len() != 3 || head[0] != "format" || head[1] != FORMAT_NAME {
        return Err(Error::Parse { line: n, msg: format!("expected `format {FORMAT_NAME} <version>`") });
    }
    let version: u32 = num(n, head[2])?;
    if version != FORMAT_VERSION {
        return Err(Error::Parse { line: n, msg: format!("unsupported version {version}") });
    }
    let (n, t) = next("embedding")?;
    let emb: usize = keyed(n, &t, "embedding")?;
    let (n, t) = next("vertices")?;
    let nv: usize = keyed(n, &t, "vertices")?;
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, t) = next("vertex coordinates")?;
        if t.len() != emb {
            return Err(Error::Parse { line: n, msg: format!("expected {emb} coordinates, found {}", t.len()) });
        }
        let mut p = Point::zeros();
        for (i, s) in t.iter().enumerate() {
            p[i] = num(n, s)?;
        }
        verts.push(p);
    }
    let mut tables: Vec<Vec<Vec<usize>>> = Vec::new();
    loop {
        let (n, t) = next("`cells` or `end`")?;
        match t.first().copied() {
            Some("end") => break,
            Some("cells") if t.len() == 3 => {
                let d: usize = num(n, t[1])?;
                if d != tables.len() + 1 {
                    return Err(Error::Parse { line: n, msg: format!("expected cells {}, found cells {d}", tables.len() + 1) });
                }
                let count: usize = num(n, t[2])?;
                let mut rows = Vec::with_capacity(count);
                for _ in 0..count {
                    let (n, t) = next("cell row")?;
                    rows.push(t.iter().map(|s| num(n, s)).collect::<Result<Vec<usize>>>()?);
                }
                tables.push(rows);
            }
            _ => return Err(Error::Parse { line: n, msg: "expected `cells <dim> <count>` or `end`".into() }),
        }
    }
    Mesh::new(emb, verts, tables)
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("invalid number `{s}`") })
}

fn keyed<T: std::str::FromStr>(line: usize, t: &[&str], key: &str) -> Result<T> {
    if t.len() != 2 || t[0] != key {
        return Err(Error::Parse { line, msg: format!("expected `{key} <value>`") });
    }
    num(line, t[1])
}
