//! Super-segmentation and the `.bbx` archive format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! header   magic "BBXA" | version u16 | flags u16 | vertices u32 | tets u32
//!          | atomic u32 | patterns u32 | modes u32 | crc32 u32 (of the preceding 28 bytes)
//! section  tag [u8; 4] | payload length u64 | payload | crc32 u32 (of the payload)
//! ```
//!
//! Sections appear in the order `MESH`, `SSEG`, `MODE` (only with flag bit 0), `PATT`.
//! Variable-length integers are unsigned LEB128; signed deltas are zigzag encoded first.
//!
//! - `MESH`: vertex coordinates as `3n` f64, then `4m` tet indices as zigzag deltas
//!   from the previous index.
//! - `SSEG`: the `m` atomic labels as zigzag deltas, then the broken-face count and
//!   the sorted broken faces as deltas.
//! - `MODE`: `eps_fault` f64, then per mode its objective f64 and `12m` f64 values.
//! - `PATT`: per pattern a provenance record, `tau` f64, the piece count and one
//!   piece id per atomic piece.

pub mod codec;
pub mod superseg;
mod varint;

pub use codec::{decode, decode_bytes, encode, encode_to_vec, pattern_obj_files, Archive, StoredModes};
pub use superseg::{super_segmentation, SuperSegmentation};
