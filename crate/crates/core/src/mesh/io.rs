use std::fmt::Write as _;
use std::io::Read;

use super::TriMesh;
use crate::{Error, Result, Tolerances, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_extension(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

/// Reads an ASCII OFF or OBJ surface. Polygonal faces are fan-triangulated
/// from their first vertex; vertex order is preserved.
pub fn load_mesh(mut source: impl Read, format: MeshFormat, tol: &Tolerances) -> Result<TriMesh> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    let (vertices, faces) = match format {
        MeshFormat::Off => parse_off(&text)?,
        MeshFormat::Obj => parse_obj(&text)?,
    };
    TriMesh::from_polygons(vertices, faces, tol)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<Vec<usize>>)> {
    // (line number, tokens) with comments and blank lines stripped
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest_of_header = header.strip_prefix("OFF").ok_or_else(|| parse_err(ln, "missing OFF header"))?.trim();
    let (ln, counts) = if rest_of_header.is_empty() {
        lines.next().ok_or_else(|| parse_err(ln, "missing counts line"))?
    } else {
        (ln, rest_of_header)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad count {t:?}"))))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(ln, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "unexpected end of vertex list"))?;
        let xyz: Vec<f64> = l.split_whitespace().take(3).map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
        if xyz.len() != 3 {
            return Err(parse_err(ln, "vertex needs 3 coordinates"));
        }
        vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "unexpected end of face list"))?;
        let toks: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        let Some((&arity, idx)) = toks.split_first() else {
            return Err(parse_err(ln, "empty face line"));
        };
        if idx.len() < arity {
            return Err(parse_err(ln, format!("face declares {arity} vertices, found {}", idx.len())));
        }
        faces.push(idx[..arity].to_vec());
    }
    Ok((vertices, faces))
}

fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<Vec<usize>>)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let mut toks = line.split('#').next().unwrap_or("").split_whitespace();
        match toks.next() {
            Some("v") => {
                let xyz: Vec<f64> = toks.take(3).map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
                if xyz.len() != 3 {
                    return Err(parse_err(ln, "vertex needs 3 coordinates"));
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for t in toks {
                    let head = t.split('/').next().unwrap_or("");
                    let k: i64 = head.parse().map_err(|_| parse_err(ln, format!("bad index {t:?}")))?;
                    let idx = match k {
                        k if k > 0 => (k - 1) as usize,
                        k if k < 0 && (-k) as usize <= vertices.len() => vertices.len() - (-k) as usize,
                        _ => return Err(parse_err(ln, format!("invalid index {k}"))),
                    };
                    face.push(idx);
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// OFF text with coordinates at 17 significant digits.
pub fn write_off(mesh: &TriMesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.vertices().len(), mesh.triangles().len());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}
