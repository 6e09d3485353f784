//! Point files: text with one `x,y` pair per line, or `.bin` files of
//! little-endian `f64` pairs.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geom::UnitPoint;

#[derive(Debug, Error)]
pub enum PointFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

pub fn write_points(path: &Path, points: &[UnitPoint]) -> Result<(), PointFileError> {
    let io_err = |source| PointFileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    for p in points {
        if is_binary(path) {
            out.write_all(&p.x.to_le_bytes()).map_err(io_err)?;
            out.write_all(&p.y.to_le_bytes()).map_err(io_err)?;
        } else {
            writeln!(out, "{},{}", p.x, p.y).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// Reads points, requiring every coordinate to lie in `[0, 1]`. Blank text
/// lines are skipped; errors name the offending line (or record for `.bin`).
pub fn read_points(path: &Path) -> Result<Vec<UnitPoint>, PointFileError> {
    let bytes = fs::read(path).map_err(|source| PointFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, msg: String| PointFileError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let check = |line: usize, p: UnitPoint| {
        if p.in_unit_square() {
            Ok(p)
        } else {
            Err(bad(line, format!("point ({}, {}) outside [0,1]^2", p.x, p.y)))
        }
    };
    if is_binary(path) {
        if bytes.len() % 16 != 0 {
            return Err(bad(
                bytes.len() / 16 + 1,
                format!("truncated record ({} bytes)", bytes.len() % 16),
            ));
        }
        return bytes
            .chunks_exact(16)
            .enumerate()
            .map(|(i, rec)| {
                let x = f64::from_le_bytes(rec[..8].try_into().unwrap());
                let y = f64::from_le_bytes(rec[8..].try_into().unwrap());
                check(i + 1, UnitPoint { x, y })
            })
            .collect();
    }
    let text = String::from_utf8(bytes).map_err(|e| bad(0, format!("not UTF-8: {e}")))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (xs, ys) = line
            .split_once(',')
            .ok_or_else(|| bad(line_no, format!("expected `x,y`, got `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(line_no, format!("bad number `{}`: {e}", s.trim())))
        };
        points.push(check(
            line_no,
            UnitPoint {
                x: parse(xs)?,
                y: parse(ys)?,
            },
        )?);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sample_points;

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let pts = sample_points(500, 4).unwrap();
        for name in ["p.csv", "p.bin"] {
            let path = dir.path().join(name);
            write_points(&path, &pts).unwrap();
            assert_eq!(read_points(&path).unwrap(), pts);
        }
    }

    #[test]
    fn reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "0.1,0.2\n\n0.3;0.4\n").unwrap();
        let err = read_points(&path).unwrap_err();
        assert!(matches!(err, PointFileError::Parse { line: 3, .. }), "{err}");
        fs::write(&path, "0.1,0.2\n0.3,abc\n").unwrap();
        assert!(matches!(read_points(&path), Err(PointFileError::Parse { line: 2, .. })));
        fs::write(&path, "0.1,1.5\n").unwrap();
        assert!(matches!(read_points(&path), Err(PointFileError::Parse { line: 1, .. })));
        let bin = dir.path().join("bad.bin");
        fs::write(&bin, [0u8; 20]).unwrap();
        assert!(matches!(read_points(&bin), Err(PointFileError::Parse { line: 2, .. })));
        assert!(matches!(
            read_points(&dir.path().join("missing.csv")),
            Err(PointFileError::Io { .. })
        ));
    }
}
