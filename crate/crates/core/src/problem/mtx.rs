use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Reads a MatrixMarket coordinate file (real or integer, general or symmetric).
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad header '{header}'"),
        });
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedField(tokens[2].clone()));
    }
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::UnsupportedField(other.to_string())),
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(bad("expected 'rows cols nnz'"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("bad size field"));
                size = Some((p(fields[0])?, p(fields[1])?, p(fields[2])?));
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(bad("expected 'row col value'"));
                }
                let i: usize = fields[0].parse().map_err(|_| bad("bad row index"))?;
                let j: usize = fields[1].parse().map_err(|_| bad("bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| bad("bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(bad("index out of range"));
                }
                if !v.is_finite() {
                    return Err(bad("non-finite value"));
                }
                trip.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or(Error::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;
    let stored = if symmetric {
        trip.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        trip.len()
    };
    if stored != nnz {
        return Err(Error::Parse {
            line: 2,
            msg: format!("size line declares {nnz} entries, found {stored}"),
        });
    }
    SparseMatrix::from_triplets(rows, cols, &trip)
}

/// Writes a general real coordinate file with round-trip exact values.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::advection::{gen_upwind_advection, ProblemSpec};

    #[test]
    fn identity_file() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n",
        )
        .unwrap();
        assert_eq!(m, SparseMatrix::identity(2));
    }

    #[test]
    fn symmetric_expanded() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2\n2 1 -1\n3 2 4.5\n",
        )
        .unwrap();
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(1, 2), 4.5);
        assert_eq!(m.nnz(), 5);
    }

    #[test]
    fn duplicates_summed() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.5\n1 1 2.5\n",
        )
        .unwrap();
        assert_eq!(m.get(0, 0), 4.0);
    }

    #[test]
    fn unsupported_and_malformed() {
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
            Err(Error::UnsupportedField(_))
        ));
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
            Err(Error::UnsupportedField(_))
        ));
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1.0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_matrix_market("hello\n").is_err());
    }

    #[test]
    fn round_trip_upwind() {
        let a = gen_upwind_advection(&ProblemSpec::upwind(4)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&path, &a).unwrap();
        let b = read_matrix_market(&path).unwrap();
        assert_eq!(a, b);
    }
}
