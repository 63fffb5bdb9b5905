//! Dense and sparse matrix types plus the fixture formats (dense CSV,
//! MatrixMarket coordinate).

use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("entry ({row},{col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({0},{1})")]
    DuplicateEntry(usize, usize),
    #[error("non-finite value at ({0},{1})")]
    NonFinite(usize, usize),
    #[error("matrix dimensions must be positive")]
    EmptyDimensions,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Row-major dense matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DenseMatrix, MatrixError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MatrixError::EmptyDimensions);
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixError::Parse {
                    line: i + 1,
                    message: format!("row has {} entries, expected {cols}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MatrixError::NonFinite(i, j));
                }
                data.push(v);
            }
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Max-norm of the elementwise difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Coordinate-list sparse matrix, entries sorted by (row, col), no
/// duplicates, no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Result<SparseMatrix, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyDimensions);
        }
        entries.retain(|&(_, _, v)| v != 0.0);
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(MatrixError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if !v.is_finite() {
                return Err(MatrixError::NonFinite(r, c));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for pair in entries.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(MatrixError::DuplicateEntry(pair[0].0, pair[0].1));
            }
        }
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_dense(m: &DenseMatrix) -> SparseMatrix {
        let mut entries = Vec::new();
        for i in 0..m.rows {
            for j in 0..m.cols {
                let v = m.get(i, j);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        SparseMatrix {
            rows: m.rows,
            cols: m.cols,
            entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m.set(r, c, v);
        }
        m
    }

    /// `A · X` for dense `X` (cols × k).
    pub fn mul_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, x.rows, "mul_dense dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, x.cols);
        for &(r, c, v) in &self.entries {
            for j in 0..x.cols {
                let acc = out.get(r, j) + v * x.get(c, j);
                out.set(r, j, acc);
            }
        }
        out
    }

    /// `Aᵀ · X` for dense `X` (rows × k).
    pub fn transpose_mul_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, x.rows, "transpose_mul_dense dimension mismatch");
        let mut out = DenseMatrix::zeros(self.cols, x.cols);
        for &(r, c, v) in &self.entries {
            for j in 0..x.cols {
                let acc = out.get(c, j) + v * x.get(r, j);
                out.set(c, j, acc);
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, _, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Parse a dense fixture: one CSV row per matrix row.
pub fn parse_dense_csv(text: &str) -> Result<DenseMatrix, MatrixError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| MatrixError::Parse {
            line: i + 1,
            message: format!("bad number: {e}"),
        })?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn read_dense_csv(path: &Path) -> Result<DenseMatrix, MatrixError> {
    parse_dense_csv(&std::fs::read_to_string(path)?)
}

/// Parse MatrixMarket coordinate format (`real general`, 1-based indices).
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix, MatrixError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(MatrixError::Parse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let header_fields: Vec<&str> = header.split_whitespace().collect();
    if header_fields.first() != Some(&"%%MatrixMarket")
        || header_fields.get(1) != Some(&"matrix")
        || header_fields.get(2) != Some(&"coordinate")
    {
        return Err(MatrixError::Parse {
            line: 1,
            message: "expected '%%MatrixMarket matrix coordinate' header".to_string(),
        });
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(MatrixError::Parse {
                        line: lineno,
                        message: "expected 'rows cols nnz' size line".to_string(),
                    });
                }
                let parse = |s: &str| -> Result<usize, MatrixError> {
                    s.parse().map_err(|e| MatrixError::Parse {
                        line: lineno,
                        message: format!("bad size field: {e}"),
                    })
                };
                size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(MatrixError::Parse {
                        line: lineno,
                        message: "expected 'row col value' entry".to_string(),
                    });
                }
                let r: usize = fields[0].parse().map_err(|e| MatrixError::Parse {
                    line: lineno,
                    message: format!("bad row index: {e}"),
                })?;
                let c: usize = fields[1].parse().map_err(|e| MatrixError::Parse {
                    line: lineno,
                    message: format!("bad col index: {e}"),
                })?;
                let v: f64 = fields[2].parse().map_err(|e| MatrixError::Parse {
                    line: lineno,
                    message: format!("bad value: {e}"),
                })?;
                if r == 0 || c == 0 {
                    return Err(MatrixError::Parse {
                        line: lineno,
                        message: "MatrixMarket indices are 1-based".to_string(),
                    });
                }
                entries.push((r - 1, c - 1, v));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or(MatrixError::Parse {
        line: 1,
        message: "missing size line".to_string(),
    })?;
    if entries.len() != nnz {
        return Err(MatrixError::Parse {
            line: 1,
            message: format!("declared {nnz} entries, found {}", entries.len()),
        });
    }
    SparseMatrix::from_triplets(rows, cols, entries)
}

pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix, MatrixError> {
    parse_matrix_market(&std::fs::read_to_string(path)?)
}
