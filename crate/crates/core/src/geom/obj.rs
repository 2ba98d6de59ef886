//! Minimal Wavefront OBJ support: `v` and `f` records only.

use std::fmt::Write as _;
use std::path::Path;

use super::mesh::SurfaceMesh;
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn load_surface_mesh<T: Real>(path: impl AsRef<Path>) -> Result<SurfaceMesh<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text)
}

/// Parses OBJ text. Polygons are fan-triangulated; texture/normal references,
/// comments and unknown records are skipped.
pub fn parse_obj<T: Real>(text: &str) -> Result<SurfaceMesh<T>> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tok = content.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [T::zero(); 3];
                for slot in &mut c {
                    let s = tok.next().ok_or_else(|| Error::Parse {
                        line,
                        message: "vertex needs three coordinates".into(),
                    })?;
                    let v: f64 = s.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("bad coordinate {s:?}"),
                    })?;
                    *slot = T::lit(v);
                }
                vertices.push(Vec3::from_array(c));
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(4);
                for s in tok {
                    let head = s.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("bad face index {s:?}"),
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = if i > 0 {
                        i - 1
                    } else if i < 0 {
                        n + i
                    } else {
                        return Err(Error::Parse {
                            line,
                            message: "face index 0 (OBJ indices are 1-based)".into(),
                        });
                    };
                    if resolved < 0 || resolved >= n {
                        return Err(Error::Parse {
                            line,
                            message: format!("face index {i} out of range (1..={n})"),
                        });
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() < 3 {
                    return Err(Error::Parse {
                        line,
                        message: format!("face with {} vertices cannot be triangulated", idx.len()),
                    });
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let mesh = SurfaceMesh::new(vertices, faces);
    mesh.validate()?;
    Ok(mesh)
}

/// Formats a float with 17 significant digits so it parses back to the same bits.
pub(crate) fn fmt_f64(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

fn push_vertices<T: Real>(out: &mut String, vertices: &[Vec3<T>]) {
    for v in vertices {
        out.push('v');
        for c in v.to_array() {
            out.push(' ');
            fmt_f64(out, c.to_f64_lossy());
        }
        out.push('\n');
    }
}

fn push_faces(out: &mut String, faces: &[[usize; 3]], offset: usize) {
    for f in faces {
        let _ = writeln!(
            out,
            "f {} {} {}",
            f[0] + offset + 1,
            f[1] + offset + 1,
            f[2] + offset + 1
        );
    }
}

pub fn obj_string<T: Real>(mesh: &SurfaceMesh<T>) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 72 + mesh.faces.len() * 24);
    push_vertices(&mut out, &mesh.vertices);
    push_faces(&mut out, &mesh.faces, 0);
    out
}

/// Several meshes in one file, each under its own `g` group.
pub fn obj_string_grouped<T: Real>(groups: &[(String, SurfaceMesh<T>)]) -> String {
    let mut out = String::new();
    let mut offset = 0;
    for (name, mesh) in groups {
        let _ = writeln!(out, "g {name}");
        push_vertices(&mut out, &mesh.vertices);
        push_faces(&mut out, &mesh.faces, offset);
        offset += mesh.vertices.len();
    }
    out
}

pub fn write_obj<T: Real>(mesh: &SurfaceMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, obj_string(mesh)).map_err(|e| Error::io(path, e))
}
