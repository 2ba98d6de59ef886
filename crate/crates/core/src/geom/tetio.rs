//! Readers for TetGen `.node`/`.ele` pairs and MEDIT `.mesh` files.

use std::path::Path;

use super::mesh::TetMesh;
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Loads a tet mesh. `path` may name a `.mesh` file, a `.node`/`.ele` file, or the
/// shared stem of a `.node`/`.ele` pair.
pub fn load_tet_mesh<T: Real>(path: impl AsRef<Path>) -> Result<TetMesh<T>> {
    let path = path.as_ref();
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    match path.extension().and_then(|e| e.to_str()) {
        Some("mesh") => parse_medit(&read(path)?),
        _ => {
            let node = path.with_extension("node");
            let ele = path.with_extension("ele");
            parse_node_ele(&read(&node)?, &read(&ele)?)
        }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let c = l.split('#').next().unwrap_or("").trim();
        (!c.is_empty()).then(|| (i + 1, c.split_whitespace().collect()))
    })
}

fn num<N: std::str::FromStr>(line: usize, s: Option<&&str>) -> Result<N> {
    let s = s.ok_or_else(|| Error::Parse {
        line,
        message: "missing field".into(),
    })?;
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad number {s:?}"),
    })
}

pub fn parse_node_ele<T: Real>(node: &str, ele: &str) -> Result<TetMesh<T>> {
    let mut nodes = data_lines(node);
    let (hl, header) = nodes.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty .node file".into(),
    })?;
    let count: usize = num(hl, header.first())?;
    let dim: usize = num(hl, header.get(1))?;
    if dim != 3 {
        return Err(Error::Parse {
            line: hl,
            message: format!("expected dimension 3, got {dim}"),
        });
    }
    let mut vertices = Vec::with_capacity(count);
    let mut base = None;
    for (line, f) in nodes.by_ref().take(count) {
        let idx: i64 = num(line, f.first())?;
        let b = *base.get_or_insert(idx);
        if idx - b != vertices.len() as i64 {
            return Err(Error::Parse {
                line,
                message: format!("node indices not consecutive at {idx}"),
            });
        }
        let x: f64 = num(line, f.get(1))?;
        let y: f64 = num(line, f.get(2))?;
        let z: f64 = num(line, f.get(3))?;
        vertices.push(Vec3::new(T::lit(x), T::lit(y), T::lit(z)));
    }
    if vertices.len() != count {
        return Err(Error::Parse {
            line: hl,
            message: format!("header promises {count} nodes, found {}", vertices.len()),
        });
    }
    let base = base.unwrap_or(0);

    let mut eles = data_lines(ele);
    let (el, eh) = eles.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty .ele file".into(),
    })?;
    let tcount: usize = num(el, eh.first())?;
    let per: usize = num(el, eh.get(1))?;
    if per != 4 {
        return Err(Error::Parse {
            line: el,
            message: format!("only linear tets supported, got {per} nodes per element"),
        });
    }
    let mut tets = Vec::with_capacity(tcount);
    for (line, f) in eles.take(tcount) {
        let mut t = [0usize; 4];
        for (k, slot) in t.iter_mut().enumerate() {
            let i: i64 = num(line, f.get(k + 1))?;
            let r = i - base;
            if r < 0 || r >= count as i64 {
                return Err(Error::Parse {
                    line,
                    message: format!("element references node {i} of {count}"),
                });
            }
            *slot = r as usize;
        }
        tets.push(t);
    }
    if tets.len() != tcount {
        return Err(Error::Parse {
            line: el,
            message: format!("header promises {tcount} elements, found {}", tets.len()),
        });
    }
    finish(vertices, tets)
}

pub fn parse_medit<T: Real>(text: &str) -> Result<TetMesh<T>> {
    let tokens: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| {
            l.split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .map(move |t| (i + 1, t))
        })
        .collect();
    let mut pos = 0;
    let mut vertices = Vec::new();
    let mut tets = Vec::new();
    let next_num = |pos: &mut usize| -> Result<(usize, f64)> {
        let (line, t) = *tokens.get(*pos).ok_or_else(|| Error::Parse {
            line: tokens.last().map_or(1, |t| t.0),
            message: "unexpected end of file".into(),
        })?;
        *pos += 1;
        t.parse::<f64>().map(|v| (line, v)).map_err(|_| Error::Parse {
            line,
            message: format!("bad number {t:?}"),
        })
    };
    while pos < tokens.len() {
        let (_, kw) = tokens[pos];
        pos += 1;
        match kw {
            "MeshVersionFormatted" | "Dimension" => {
                next_num(&mut pos)?;
            }
            "Vertices" => {
                let (_, c) = next_num(&mut pos)?;
                for _ in 0..c as usize {
                    let (_, x) = next_num(&mut pos)?;
                    let (_, y) = next_num(&mut pos)?;
                    let (_, z) = next_num(&mut pos)?;
                    next_num(&mut pos)?;
                    vertices.push(Vec3::new(T::lit(x), T::lit(y), T::lit(z)));
                }
            }
            "Tetrahedra" => {
                let (_, c) = next_num(&mut pos)?;
                for _ in 0..c as usize {
                    let mut t = [0usize; 4];
                    for slot in &mut t {
                        let (line, v) = next_num(&mut pos)?;
                        if v < 1.0 || v > vertices.len() as f64 {
                            return Err(Error::Parse {
                                line,
                                message: format!("tet references vertex {v} of {}", vertices.len()),
                            });
                        }
                        *slot = v as usize - 1;
                    }
                    next_num(&mut pos)?;
                    tets.push(t);
                }
            }
            "End" => break,
            // Record widths of other element blocks are not known here.
            other => {
                return Err(Error::Parse {
                    line: tokens[pos - 1].0,
                    message: format!("unsupported MEDIT keyword {other:?}"),
                })
            }
        }
    }
    finish(vertices, tets)
}

fn finish<T: Real>(vertices: Vec<Vec3<T>>, tets: Vec<[usize; 4]>) -> Result<TetMesh<T>> {
    let mut mesh = TetMesh::new(vertices, tets);
    mesh.fix_orientation();
    mesh.validate()?;
    Ok(mesh)
}
