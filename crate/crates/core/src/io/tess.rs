//! Reader for Neper `.tess` tessellations.
//!
//! Only the topology sections are used: `**vertex`, `**edge`, `**face` and
//! `**polyhedron`. `**format`, `**general`, `**cell` and `**domain` are
//! skipped; any other section is rejected.

use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

const SKIPPED: &[&str] = &["format", "general", "cell", "domain"];

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        Tokens { toks, pos: 0 }
    }

    fn eof_line(&self) -> usize {
        self.toks.last().map(|t| t.0).unwrap_or(0) + 1
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self.peek().ok_or_else(|| Error::Parse {
            line: self.eof_line(),
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn num<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (line, t) = self.next(what)?;
        if t.starts_with('*') {
            return Err(Error::Parse { line, msg: format!("expected {what}, found `{t}`") });
        }
        t.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{t}`") })
    }

    /// A signed 1-based id, returned 0-based.
    fn id(&mut self, what: &str, max: usize) -> Result<usize> {
        let (line, _) = self.peek().unwrap_or((self.eof_line(), ""));
        let v: i64 = self.num(what)?;
        let a = v.unsigned_abs() as usize;
        if a == 0 || a > max {
            return Err(Error::Parse { line, msg: format!("{what} {v} out of range 1..={max}") });
        }
        Ok(a - 1)
    }

    /// Record id, checked to be sequential.
    fn record(&mut self, what: &str, expected: usize) -> Result<()> {
        let (line, _) = self.peek().unwrap_or((self.eof_line(), ""));
        let id: usize = self.num(what)?;
        if id != expected {
            return Err(Error::Parse { line, msg: format!("expected {what} {expected}, found {id}") });
        }
        Ok(())
    }

    fn skip_section(&mut self) {
        while let Some((_, t)) = self.peek() {
            if t.starts_with("**") {
                break;
            }
            self.pos += 1;
        }
    }
}

pub fn read_tess(path: &Path) -> Result<Mesh> {
    parse_tess(&std::fs::read_to_string(path)?)
}

/// Section sizes as declared in a `.tess` file: vertices, edges, faces, polyhedra.
pub fn declared_counts(text: &str) -> Result<Vec<usize>> {
    Ok(parse_sections(text)?.counts())
}

pub fn parse_tess(text: &str) -> Result<Mesh> {
    let s = parse_sections(text)?;
    let dim = if s.polys.is_empty() { 2 } else { 3 };
    let mut tables = vec![s.edges, s.faces];
    if dim == 3 {
        tables.push(s.polys);
    }
    Mesh::new(s.dim.max(dim), s.vertices, tables)
}

struct Sections {
    dim: usize,
    vertices: Vec<Point>,
    edges: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    polys: Vec<Vec<usize>>,
}

impl Sections {
    fn counts(&self) -> Vec<usize> {
        let mut c = vec![self.vertices.len(), self.edges.len(), self.faces.len()];
        if !self.polys.is_empty() {
            c.push(self.polys.len());
        }
        c
    }
}

fn parse_sections(text: &str) -> Result<Sections> {
    let mut t = Tokens::new(text);
    let (line, head) = t.next("`***tess`")?;
    if head != "***tess" {
        return Err(Error::Parse { line, msg: format!("expected `***tess`, found `{head}`") });
    }
    let mut s = Sections {
        dim: 3,
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
        polys: Vec::new(),
    };
    loop {
        let (line, tok) = t.next("section header or `***end`")?;
        if tok == "***end" {
            break;
        }
        let Some(name) = tok.strip_prefix("**") else {
            return Err(Error::Parse { line, msg: format!("expected section header, found `{tok}`") });
        };
        match name {
            "general" => {
                s.dim = t.num("dimension")?;
                if !(2..=3).contains(&s.dim) {
                    return Err(Error::Parse { line, msg: format!("unsupported dimension {}", s.dim) });
                }
                t.skip_section();
            }
            "vertex" => {
                let n: usize = t.num("vertex count")?;
                for i in 0..n {
                    t.record("vertex id", i + 1)?;
                    let p = Point::new(t.num("x")?, t.num("y")?, t.num("z")?);
                    let _state: i64 = t.num("vertex state")?;
                    s.vertices.push(p);
                }
            }
            "edge" => {
                let n: usize = t.num("edge count")?;
                let nv = s.vertices.len();
                for i in 0..n {
                    t.record("edge id", i + 1)?;
                    let e = vec![t.id("vertex", nv)?, t.id("vertex", nv)?];
                    let _state: i64 = t.num("edge state")?;
                    s.edges.push(e);
                }
            }
            "face" => {
                let n: usize = t.num("face count")?;
                let (nv, ne) = (s.vertices.len(), s.edges.len());
                for i in 0..n {
                    t.record("face id", i + 1)?;
                    let k: usize = t.num("face vertex count")?;
                    for _ in 0..k {
                        t.id("vertex", nv)?;
                    }
                    let k: usize = t.num("face edge count")?;
                    let edges = (0..k).map(|_| t.id("edge", ne)).collect::<Result<Vec<_>>>()?;
                    // plane equation d a b c, then state, point and point coordinates
                    for _ in 0..4 {
                        let _: f64 = t.num("face equation")?;
                    }
                    let _state: i64 = t.num("face state")?;
                    let _point: i64 = t.num("face point")?;
                    for _ in 0..3 {
                        let _: f64 = t.num("face point coordinate")?;
                    }
                    s.faces.push(edges);
                }
            }
            "polyhedron" => {
                let n: usize = t.num("polyhedron count")?;
                let nf = s.faces.len();
                for i in 0..n {
                    t.record("polyhedron id", i + 1)?;
                    let k: usize = t.num("polyhedron face count")?;
                    s.polys.push((0..k).map(|_| t.id("face", nf)).collect::<Result<Vec<_>>>()?);
                }
            }
            _ if SKIPPED.contains(&name) => t.skip_section(),
            _ => return Err(Error::UnsupportedSection(format!("**{name} (line {line})"))),
        }
    }
    if s.vertices.is_empty() || s.edges.is_empty() || s.faces.is_empty() {
        return Err(Error::Parse { line: t.eof_line(), msg: "missing vertex, edge or face section".into() });
    }
    Ok(s)
}
