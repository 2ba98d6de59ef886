use std::path::{Path, PathBuf};

use super::superseg::SuperSegmentation;
use super::varint::{put_i64, put_u64, Reader};
use crate::error::{Error, Result};
use crate::fracture::{FracturePattern, ImpactSample, Provenance};
use crate::geom::{extract_piece_surfaces_with, obj_string, FaceAdjacency, TetMesh, Vec3};
use crate::modes::FractureModes;
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"BBXA";
const VERSION: u16 = 1;
const FLAG_MODES: u16 = 1;
const HEADER_LEN: usize = 28;

/// Mode matrix as stored in an archive.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredModes {
    pub eps_fault: f64,
    pub objectives: Vec<f64>,
    /// One corner field (`12m` values) per mode.
    pub modes: Vec<Vec<f64>>,
}

impl StoredModes {
    pub fn from_modes<T: Real>(modes: &FractureModes<T>) -> Self {
        Self {
            eps_fault: modes.eps_fault.to_f64_lossy(),
            objectives: modes.objectives.iter().map(|o| o.to_f64_lossy()).collect(),
            modes: modes
                .modes
                .iter()
                .map(|u| u.iter().map(|x| x.to_f64_lossy()).collect())
                .collect(),
        }
    }
}

/// Decoded archive contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Archive<T> {
    pub mesh: TetMesh<T>,
    pub superseg: SuperSegmentation,
    pub modes: Option<StoredModes>,
    pub patterns: Vec<FracturePattern>,
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], payload: &[u8]) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, x: f64) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_deltas(out: &mut Vec<u8>, values: impl IntoIterator<Item = usize>) {
    let mut prev = 0i64;
    for v in values {
        put_i64(out, v as i64 - prev);
        prev = v as i64;
    }
}

fn count_u32(n: usize, what: &str) -> Result<[u8; 4]> {
    u32::try_from(n)
        .map(u32::to_le_bytes)
        .map_err(|_| Error::Archive(format!("too many {what}: {n}")))
}

/// Serializes an archive. Fails with [`Error::Refinement`] if a pattern splits an atomic piece.
pub fn encode_to_vec<T: Real>(
    mesh: &TetMesh<T>,
    superseg: &SuperSegmentation,
    modes: Option<&StoredModes>,
    patterns: &[FracturePattern],
) -> Result<Vec<u8>> {
    let m = mesh.m();
    if superseg.atomic_labels.len() != m {
        return Err(Error::Precondition(format!(
            "super-segmentation has {} labels for {m} tets",
            superseg.atomic_labels.len()
        )));
    }
    let mut mappings = Vec::with_capacity(patterns.len());
    for (i, p) in patterns.iter().enumerate() {
        if p.labels.len() != m {
            return Err(Error::Precondition(format!(
                "pattern {i} has {} labels for {m} tets",
                p.labels.len()
            )));
        }
        let mapping = superseg
            .mapping(&p.labels)
            .map_err(|atomic| Error::Refinement { pattern: i, atomic })?;
        mappings.push(mapping);
    }
    if let Some(sm) = modes {
        if sm.objectives.len() != sm.modes.len() || sm.modes.iter().any(|u| u.len() != 12 * m) {
            return Err(Error::Precondition("mode matrix does not match the mesh".into()));
        }
    }

    let mut out = Vec::with_capacity(64 + mesh.n() * 24 + m * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(if modes.is_some() { FLAG_MODES } else { 0 }).to_le_bytes());
    out.extend_from_slice(&count_u32(mesh.n(), "vertices")?);
    out.extend_from_slice(&count_u32(m, "tets")?);
    out.extend_from_slice(&count_u32(superseg.atomic_count, "atomic pieces")?);
    out.extend_from_slice(&count_u32(patterns.len(), "patterns")?);
    out.extend_from_slice(&count_u32(modes.map_or(0, |sm| sm.modes.len()), "modes")?);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());

    let mut buf = Vec::new();
    for v in &mesh.vertices {
        for c in 0..3 {
            put_f64(&mut buf, v[c].to_f64_lossy());
        }
    }
    put_deltas(&mut buf, mesh.tets.iter().flatten().copied());
    section(&mut out, b"MESH", &buf);

    buf.clear();
    put_deltas(&mut buf, superseg.atomic_labels.iter().copied());
    put_u64(&mut buf, superseg.broken_face_union.len() as u64);
    put_deltas(&mut buf, superseg.broken_face_union.iter().copied());
    section(&mut out, b"SSEG", &buf);

    if let Some(sm) = modes {
        buf.clear();
        put_f64(&mut buf, sm.eps_fault);
        for (u, &obj) in sm.modes.iter().zip(&sm.objectives) {
            put_f64(&mut buf, obj);
            for &x in u {
                put_f64(&mut buf, x);
            }
        }
        section(&mut out, b"MODE", &buf);
    }

    buf.clear();
    for (p, mapping) in patterns.iter().zip(&mappings) {
        match &p.provenance {
            Provenance::Field => buf.push(0),
            Provenance::Mode { mode } => {
                buf.push(1);
                put_u64(&mut buf, *mode as u64);
            }
            Provenance::Impact { impact, seed, attempts } => {
                buf.push(2);
                put_u64(&mut buf, impact.vertex as u64);
                for &x in impact.point.iter().chain(&impact.direction) {
                    put_f64(&mut buf, x);
                }
                put_f64(&mut buf, impact.magnitude);
                buf.extend_from_slice(&seed.to_le_bytes());
                put_u64(&mut buf, *attempts as u64);
            }
        }
        put_f64(&mut buf, p.tau);
        put_u64(&mut buf, p.piece_count as u64);
        for &piece in mapping {
            put_u64(&mut buf, piece as u64);
        }
    }
    section(&mut out, b"PATT", &buf);
    Ok(out)
}

/// Encodes to `path` and returns the number of bytes written.
pub fn encode<T: Real>(
    mesh: &TetMesh<T>,
    superseg: &SuperSegmentation,
    modes: Option<&StoredModes>,
    patterns: &[FracturePattern],
    path: impl AsRef<Path>,
) -> Result<u64> {
    let bytes = encode_to_vec(mesh, superseg, modes, patterns)?;
    let path = path.as_ref();
    std::fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes.len() as u64)
}

struct Sections<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Sections<'a> {
    fn next(&mut self, tag: &'static str) -> Result<Reader<'a>> {
        let rest = &self.data[self.pos..];
        if rest.len() < 12 {
            return Err(Error::Archive(format!("missing section {tag}")));
        }
        if &rest[..4] != tag.as_bytes() {
            return Err(Error::Archive(format!(
                "expected section {tag}, found {:?}",
                String::from_utf8_lossy(&rest[..4])
            )));
        }
        let len = u64::from_le_bytes(rest[4..12].try_into().unwrap());
        let len = usize::try_from(len)
            .ok()
            .filter(|&l| l <= rest.len() - 12 && rest.len() - 12 - l >= 4)
            .ok_or_else(|| Error::Archive(format!("section {tag} is truncated")))?;
        let payload = &rest[12..12 + len];
        let stored = u32::from_le_bytes(rest[12 + len..16 + len].try_into().unwrap());
        if crc32fast::hash(payload) != stored {
            return Err(Error::Checksum(tag.into()));
        }
        self.pos += 16 + len;
        Ok(Reader::new(payload, tag))
    }
}

fn finish(r: &Reader, tag: &str) -> Result<()> {
    if r.is_empty() {
        Ok(())
    } else {
        Err(Error::Archive(format!("trailing bytes in section {tag}")))
    }
}

fn read_deltas(r: &mut Reader, count: usize, bound: usize, what: &str) -> Result<Vec<usize>> {
    let mut prev = 0i64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        prev = prev.wrapping_add(r.i64()?);
        match usize::try_from(prev) {
            Ok(v) if v < bound => out.push(v),
            _ => return Err(Error::Archive(format!("{what} index {prev} out of range"))),
        }
    }
    Ok(out)
}

/// Parses and validates a whole archive; nothing is returned unless every section checks out.
pub fn decode_bytes<T: Real>(data: &[u8]) -> Result<Archive<T>> {
    if data.len() < HEADER_LEN + 4 || &data[..4] != MAGIC {
        return Err(Error::Archive("bad magic".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes(data[i..i + 2].try_into().unwrap());
    let u32_at = |i: usize| u32::from_le_bytes(data[i..i + 4].try_into().unwrap()) as usize;
    let version = u16_at(4);
    if version != VERSION {
        return Err(Error::Archive(format!("unsupported version {version}")));
    }
    if crc32fast::hash(&data[..HEADER_LEN]) != u32_at(HEADER_LEN) as u32 {
        return Err(Error::Checksum("header".into()));
    }
    let flags = u16_at(6);
    if flags & !FLAG_MODES != 0 {
        return Err(Error::Archive(format!("unknown flags {flags:#x}")));
    }
    let (n, m, atomic_count, pattern_count, mode_count) = (u32_at(8), u32_at(12), u32_at(16), u32_at(20), u32_at(24));
    let mut sections = Sections {
        data,
        pos: HEADER_LEN + 4,
    };

    let mut r = sections.next("MESH")?;
    let mut vertices = Vec::with_capacity(n.min(data.len() / 24));
    for _ in 0..n {
        vertices.push(Vec3::new(T::lit(r.f64()?), T::lit(r.f64()?), T::lit(r.f64()?)));
    }
    let flat = read_deltas(&mut r, 4 * m, n, "vertex")?;
    finish(&r, "MESH")?;
    let tets = flat.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
    let mesh = TetMesh::new(vertices, tets);

    let mut r = sections.next("SSEG")?;
    let atomic_labels = read_deltas(&mut r, m, atomic_count, "atomic piece")?;
    let broken = r.usize()?;
    if broken > 2 * m {
        return Err(Error::Archive("broken face count exceeds face count".into()));
    }
    let broken_face_union = read_deltas(&mut r, broken, 2 * m, "face")?;
    finish(&r, "SSEG")?;
    let superseg = SuperSegmentation {
        atomic_labels,
        atomic_count,
        broken_face_union,
    };

    let modes = if flags & FLAG_MODES != 0 {
        let mut r = sections.next("MODE")?;
        let eps_fault = r.f64()?;
        let mut objectives = Vec::with_capacity(mode_count);
        let mut fields = Vec::with_capacity(mode_count);
        for _ in 0..mode_count {
            objectives.push(r.f64()?);
            fields.push((0..12 * m).map(|_| r.f64()).collect::<Result<Vec<_>>>()?);
        }
        finish(&r, "MODE")?;
        Some(StoredModes {
            eps_fault,
            objectives,
            modes: fields,
        })
    } else {
        None
    };

    let mut r = sections.next("PATT")?;
    let mut patterns = Vec::with_capacity(pattern_count.min(data.len()));
    for _ in 0..pattern_count {
        let provenance = match r.u8()? {
            0 => Provenance::Field,
            1 => Provenance::Mode { mode: r.usize()? },
            2 => {
                let vertex = r.usize()?;
                let mut coords = [0.0; 6];
                for c in &mut coords {
                    *c = r.f64()?;
                }
                let magnitude = r.f64()?;
                let seed = r.fixed_u64()?;
                let attempts = r.usize()?;
                Provenance::Impact {
                    impact: ImpactSample {
                        vertex,
                        point: [coords[0], coords[1], coords[2]],
                        direction: [coords[3], coords[4], coords[5]],
                        magnitude,
                    },
                    seed,
                    attempts,
                }
            }
            k => return Err(Error::Archive(format!("unknown provenance kind {k}"))),
        };
        let tau = r.f64()?;
        let piece_count = r.usize()?;
        let mut mapping = Vec::with_capacity(atomic_count);
        for _ in 0..atomic_count {
            let piece = r.usize()?;
            if piece >= piece_count {
                return Err(Error::Archive(format!("piece id {piece} out of range")));
            }
            mapping.push(piece);
        }
        patterns.push(FracturePattern {
            labels: superseg.compose(&mapping),
            piece_count,
            tau,
            provenance,
        });
    }
    finish(&r, "PATT")?;
    if sections.pos != data.len() {
        return Err(Error::Archive("trailing data after last section".into()));
    }
    Ok(Archive {
        mesh,
        superseg,
        modes,
        patterns,
    })
}

pub fn decode<T: Real>(path: impl AsRef<Path>) -> Result<Archive<T>> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_bytes(&data)
}

/// Relative paths and contents of the per-piece OBJ files of pattern `index`:
/// `fracture_{index:03}/piece_{j:03}.obj`.
pub fn pattern_obj_files<T: Real>(
    mesh: &TetMesh<T>,
    adj: &FaceAdjacency<T>,
    pattern: &FracturePattern,
    index: usize,
) -> Result<Vec<(PathBuf, String)>> {
    let dir = PathBuf::from(format!("fracture_{index:03}"));
    Ok(extract_piece_surfaces_with(mesh, adj, &pattern.labels)?
        .iter()
        .enumerate()
        .map(|(j, s)| (dir.join(format!("piece_{j:03}.obj")), obj_string(s)))
        .collect())
}
