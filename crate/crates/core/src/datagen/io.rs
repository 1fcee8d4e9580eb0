use std::fs;
use std::io::Write;
use std::path::Path;

use crate::linalg::DenseMatrix;
use crate::IndexSet;

use super::DatagenError;

const MAGIC: &[u8; 4] = b"DMAT";
const VERSION: u32 = 1;
const HEADER: usize = 4 + 4 + 8 + 8;

/// Serialises `a` as DMAT: magic, `u32` version, `u64` rows, `u64` cols,
/// then the entries as little-endian `f64`, column-major.
pub fn encode_dmat(a: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 8 * a.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(a.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(a.cols() as u64).to_le_bytes());
    for v in a.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_dmat(bytes: &[u8]) -> Result<DenseMatrix, DatagenError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(DatagenError::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(DatagenError::Truncated { expected: HEADER, got: bytes.len() });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(DatagenError::UnsupportedVersion(version));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|k| k.checked_mul(8))
        .and_then(|k| k.checked_add(HEADER))
        .ok_or(DatagenError::Truncated { expected: usize::MAX, got: bytes.len() })?;
    if bytes.len() != expected {
        return Err(DatagenError::Truncated { expected, got: bytes.len() });
    }
    let data: Vec<f64> = bytes[HEADER..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Row-major CSV; a first line that does not parse as numbers is taken as
/// a header and skipped.
pub fn parse_csv(text: &str) -> Result<DenseMatrix, DatagenError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if k == 0 => continue,
            Err(e) => return Err(DatagenError::Csv { line: k + 1, message: e.to_string() }),
        }
    }
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    Ok(DenseMatrix::from_rows(&refs)?)
}

pub fn format_csv(a: &DenseMatrix) -> String {
    let mut s = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads DMAT, or CSV when the extension is `.csv`.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix, DatagenError> {
    let path = path.as_ref();
    if is_csv(path) {
        parse_csv(&fs::read_to_string(path)?)
    } else {
        decode_dmat(&fs::read(path)?)
    }
}

/// Writes DMAT, or CSV when the extension is `.csv`; atomically.
pub fn write_matrix(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<(), DatagenError> {
    let path = path.as_ref();
    if is_csv(path) {
        write_atomic(path, format_csv(a).as_bytes())
    } else {
        write_atomic(path, &encode_dmat(a))
    }
}

pub fn read_indices(path: impl AsRef<Path>) -> Result<IndexSet, DatagenError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_indices(path: impl AsRef<Path>, idx: &IndexSet) -> Result<(), DatagenError> {
    write_atomic(path.as_ref(), serde_json::to_string(idx)?.as_bytes())
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatagenError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| DatagenError::Io(e.error))?;
    Ok(())
}
