//! Text file format for sets.
//!
//! First line is a header, either `dense D=<D>` (optionally `dense D=<D>
//! bitmap`) or `sparse m=<m> r=<r>`. Every following non-empty line is data:
//!
//! - dense, element form: one lowercase hex integer per line, the element's
//!   value (coordinate i = bit i of the value);
//! - dense, bitmap form: the whole 2^D-bit membership array as one hex
//!   integer (bit v = membership of v), most significant digit first,
//!   wrapped at 64 characters per line;
//! - sparse: one fixed-width hex integer per line encoding the flat
//!   concatenation of blocks, most significant digit first.
//!
//! Round-trips are bit-exact in both directions.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gfset::dense::DenseSet;
use crate::gfset::sparse::{BlockGeometry, SparseSet};

#[derive(Clone, Debug)]
pub enum SetFile {
    Dense(DenseSet),
    Sparse(SparseSet),
}

fn hex_digit(n: u64) -> char {
    char::from_digit(n as u32, 16).unwrap()
}

fn nibble(words: &[u64], t: usize) -> u64 {
    // Bits [4t, 4t+4) of the flat vector; never crosses a word boundary.
    words[t / 16] >> (4 * (t % 16)) & 0xf
}

/// Fixed-width big-endian hex of the low `bits` bits of `words`.
fn words_to_hex(words: &[u64], bits: usize) -> String {
    let nibbles = bits.div_ceil(4).max(1);
    (0..nibbles)
        .rev()
        .map(|t| hex_digit(nibble(words, t)))
        .collect()
}

fn hex_to_words(hex: &str, bits: usize) -> Result<Vec<u64>> {
    let mut words = vec![0u64; bits.div_ceil(64)];
    let digits: Vec<u64> = hex
        .chars()
        .map(|c| {
            c.to_digit(16)
                .map(u64::from)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))
        })
        .collect::<Result<_>>()?;
    // Digit order is most significant first; digit index d holds nibble
    // (len-1-d) of the value.
    for (d, &val) in digits.iter().enumerate() {
        let t = digits.len() - 1 - d;
        let bit = 4 * t;
        if bit >= bits && val != 0 {
            return Err(Error::Parse(format!("value exceeds {bits} bits")));
        }
        if bit < bits {
            words[bit / 64] |= val << (bit % 64);
        }
    }
    let tail = bits % 64;
    if tail != 0 && words[bits / 64] >> tail != 0 {
        return Err(Error::Parse(format!("value exceeds {bits} bits")));
    }
    Ok(words)
}

pub fn dense_to_text(set: &DenseSet, bitmap: bool) -> String {
    let mut out = String::new();
    if bitmap {
        out.push_str(&format!("dense D={} bitmap\n", set.dim()));
        let hex = words_to_hex(set.words(), set.universe());
        for chunk in hex.as_bytes().chunks(64) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    } else {
        out.push_str(&format!("dense D={}\n", set.dim()));
        for v in set.iter() {
            out.push_str(&format!("{v:x}\n"));
        }
    }
    out
}

pub fn sparse_to_text(set: &SparseSet) -> String {
    let g = set.geometry();
    let mut out = format!("sparse m={} r={}\n", g.block_bits(), g.block_count());
    for e in set.iter() {
        out.push_str(&words_to_hex(e, g.total_bits()));
        out.push('\n');
    }
    out
}

fn parse_kv(token: &str, key: &str) -> Result<usize> {
    token
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected {key}=<int>, got {token:?}")))
}

pub fn parse_set_text(text: &str) -> Result<SetFile> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty set file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    match tokens.as_slice() {
        ["dense", d] => {
            let dim = parse_kv(d, "D")?;
            let mut set = DenseSet::new(dim)?;
            for line in lines {
                let v = usize::from_str_radix(line, 16)
                    .map_err(|e| Error::Parse(format!("bad element {line:?}: {e}")))?;
                set.insert(v)?;
            }
            Ok(SetFile::Dense(set))
        }
        ["dense", d, "bitmap"] => {
            let dim = parse_kv(d, "D")?;
            DenseSet::new(dim)?; // range check before concatenating data
            let hex: String = lines.collect();
            let words = hex_to_words(&hex, 1usize << dim)?;
            Ok(SetFile::Dense(DenseSet::from_words(dim, words)))
        }
        ["sparse", m, r] => {
            let geometry = BlockGeometry::new(parse_kv(m, "m")?, parse_kv(r, "r")?)?;
            let mut elems = Vec::new();
            for line in lines {
                elems.push(hex_to_words(line, geometry.total_bits())?);
            }
            SparseSet::from_elements(geometry, elems).map(SetFile::Sparse)
        }
        _ => Err(Error::Parse(format!("unrecognized header {header:?}"))),
    }
}

pub fn read_set_file(path: &Path) -> Result<SetFile> {
    parse_set_text(&std::fs::read_to_string(path)?)
}

pub fn write_set_file(path: &Path, set: &SetFile) -> Result<()> {
    let text = match set {
        SetFile::Dense(d) => dense_to_text(d, false),
        SetFile::Sparse(s) => sparse_to_text(s),
    };
    std::fs::write(path, text)?;
    Ok(())
}
