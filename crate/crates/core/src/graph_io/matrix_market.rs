use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};
use crate::operator::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Entry {
    row: usize,
    col: usize,
    value: f64,
    line: usize,
}

struct Coordinate {
    rows: usize,
    cols: usize,
    symmetry: Symmetry,
    entries: Vec<Entry>,
}

fn read_coordinate<R: BufRead>(reader: R) -> Result<Coordinate> {
    let mut lines = reader.lines().enumerate();

    let (field, symmetry) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::EmptyInput);
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(&line, idx + 1)?;
    };

    let (rows, cols, declared) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::Parse {
                line: 0,
                message: "missing size line".into(),
            });
        };
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let nums: Vec<&str> = t.split_whitespace().collect();
        if nums.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected `rows cols nnz`, found {t:?}"),
            });
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid size {s:?}"),
            })
        };
        break (parse(nums[0])?, parse(nums[1])?, parse(nums[2])?);
    };

    let mut entries = Vec::with_capacity(declared);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let bad = |what: &str| Error::Parse {
            line: line_no,
            message: format!("{what} in entry {t:?}"),
        };
        let i: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("invalid row index"))?;
        let j: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("invalid column index"))?;
        let value = match field {
            Field::Pattern => 1.0,
            Field::Real => it
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad("invalid value"))?,
        };
        if it.next().is_some() {
            return Err(bad("trailing data"));
        }
        for (idx, dim) in [(i, rows), (j, cols)] {
            if idx == 0 || idx > dim as u64 {
                return Err(Error::IndexOutOfBounds {
                    index: idx,
                    dim: dim as u64,
                    line: line_no,
                });
            }
        }
        entries.push(Entry {
            row: i as usize - 1,
            col: j as usize - 1,
            value,
            line: line_no,
        });
    }

    if entries.len() != declared {
        return Err(Error::Parse {
            line: 0,
            message: format!("declared {declared} entries, found {}", entries.len()),
        });
    }

    Ok(Coordinate {
        rows,
        cols,
        symmetry,
        entries,
    })
}

fn parse_header(line: &str, line_no: usize) -> Result<(Field, Symmetry)> {
    let lower = line.trim().to_ascii_lowercase();
    let tokens: Vec<&str> = lower.split_whitespace().collect();
    if tokens.first() != Some(&"%%matrixmarket") || tokens.len() != 5 {
        return Err(Error::Parse {
            line: line_no,
            message: "missing %%MatrixMarket header".into(),
        });
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!(
            "{} {} (only `matrix coordinate` is supported)",
            tokens[1], tokens[2]
        )));
    }
    let field = match tokens[3] {
        "pattern" => Field::Pattern,
        "real" | "double" | "integer" => Field::Real,
        other => return Err(Error::UnsupportedFormat(format!("field {other}"))),
    };
    let symmetry = match tokens[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::UnsupportedFormat(format!("symmetry {other}"))),
    };
    Ok((field, symmetry))
}

/// Parses a Matrix Market coordinate file as a link matrix: entry `(i, j)`
/// means node `j` links to node `i`. Values are binarized and explicit zeros
/// dropped. Original ids are the 1-based matrix indices.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<Graph> {
    let coo = read_coordinate(reader)?;
    if coo.rows != coo.cols {
        return Err(Error::UnsupportedFormat(format!(
            "non-square {}x{} matrix cannot be a link matrix",
            coo.rows, coo.cols
        )));
    }
    if coo.rows == 0 {
        return Err(Error::EmptyInput);
    }
    let mut edges = Vec::with_capacity(coo.entries.len());
    for e in &coo.entries {
        if e.value == 0.0 {
            continue;
        }
        edges.push((e.col as u32, e.row as u32));
        if coo.symmetry != Symmetry::General && e.row != e.col {
            edges.push((e.row as u32, e.col as u32));
        }
    }
    let ids = (1..=coo.rows as u64).collect();
    Graph::from_edges(coo.rows, edges, Some(ids)).map_err(|err| match err {
        Error::IndexOutOfBounds { index, dim, .. } => Error::IndexOutOfBounds {
            index,
            dim,
            line: coo.entries.first().map_or(0, |e| e.line),
        },
        other => other,
    })
}

pub fn parse_matrix_market_str(text: &str) -> Result<Graph> {
    parse_matrix_market(text.as_bytes())
}

/// Reads a Matrix Market file keeping the stored values, for spectral
/// experiments on the raw matrix.
pub fn read_matrix_market_operator<P: AsRef<Path>>(path: P) -> Result<CsrMatrix> {
    read_operator(BufReader::new(File::open(path)?))
}

pub fn read_matrix_market_operator_str(text: &str) -> Result<CsrMatrix> {
    read_operator(text.as_bytes())
}

fn read_operator<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let coo = read_coordinate(reader)?;
    let mut triplets = Vec::with_capacity(coo.entries.len());
    for e in &coo.entries {
        triplets.push((e.row, e.col, e.value));
        if e.row != e.col {
            match coo.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((e.col, e.row, e.value)),
                Symmetry::SkewSymmetric => triplets.push((e.col, e.row, -e.value)),
            }
        }
    }
    CsrMatrix::from_triplets(coo.rows, coo.cols, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::LinearOperator;

    #[test]
    fn pattern_entry() {
        let g = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n",
        )
        .unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.original_ids(), &[1, 2]);
    }

    #[test]
    fn real_entry_binarized() {
        let g = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n2 1 0.5\n",
        )
        .unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn explicit_zeros_dropped() {
        // Expected edge set from scipy.io.mmread + eliminate_zeros on this file.
        let text = "%%MatrixMarket matrix coordinate real general\n\
                    % 5x5 with an explicit zero\n\
                    5 5 7\n2 1 0.5\n3 1 1.0\n1 2 0.0\n4 3 -2.0\n5 5 3.0\n1 4 0.0\n4 5 1e-3\n";
        let g = parse_matrix_market_str(text).unwrap();
        let mut edges = g.edges().to_vec();
        edges.sort_unstable();
        assert_eq!(edges, vec![(0, 1), (0, 2), (2, 3), (4, 3), (4, 4)]);
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn symmetric_mirrored() {
        let g = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n",
        )
        .unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 0), (2, 2)]);
    }

    #[test]
    fn unsupported_formats() {
        let err =
            parse_matrix_market_str("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n")
                .unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
        let err = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
    }

    #[test]
    fn index_out_of_bounds() {
        let err = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n",
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::IndexOutOfBounds {
                    index: 3,
                    line: 3,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn count_mismatch() {
        let err = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn operator_keeps_values() {
        let a = read_matrix_market_operator_str(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 1.0\n",
        )
        .unwrap();
        let mut y = vec![0.0; 2];
        a.apply_into(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![2.0, 1.0]);
    }
}
