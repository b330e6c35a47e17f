//! Sparse exact-rational matrices in compressed row form.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("vector of length {got} applied to a matrix with {expected} columns")]
    LengthMismatch { expected: usize, got: usize },
    #[error("scaled entries do not fit in 64 bits")]
    ScaleOverflow,
}

const MAX_DUMP_DIM: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<BigRational>,
    /// Cochain degree the matrix acts on, when it is a Laplacian.
    degree: Option<usize>,
}

/// `denominator * M` with 64-bit integer entries, same sparsity pattern.
#[derive(Debug, Clone)]
pub struct ScaledIntegerMatrix {
    pub denominator: BigInt,
    pub rows: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub vals: Vec<i64>,
}

impl SparseMatrix {
    /// Builds from per-row entry lists; zero entries are dropped and
    /// columns within a row are sorted.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(u32, BigRational)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                if !v.is_zero() {
                    col_idx.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            rows: n,
            cols,
            row_ptr,
            col_idx,
            vals,
            degree: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(
            n,
            (0..n)
                .map(|i| vec![(i as u32, BigRational::one())])
                .collect(),
        )
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &BigRational)> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .map(|&c| c as usize)
            .zip(&self.vals[span])
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn apply(&self, x: &[BigRational]) -> Result<Vec<BigRational>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::LengthMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .fold(BigRational::zero(), |acc, (c, v)| acc + v * &x[c])
            })
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<BigRational>> {
        let mut out = vec![vec![BigRational::zero(); self.cols]; self.rows];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v.clone();
            }
        }
        out
    }

    /// Every entry multiplied by `k`.
    pub fn scale(&self, k: &BigRational) -> SparseMatrix {
        let rows = (0..self.rows)
            .map(|r| self.row(r).map(|(c, v)| (c as u32, v * k)).collect())
            .collect();
        let mut out = SparseMatrix::from_rows(self.cols, rows);
        out.degree = self.degree;
        out
    }

    /// Scales by the lcm of all entry denominators.
    pub fn scaled_integer(&self) -> Result<ScaledIntegerMatrix, MatrixError> {
        let denominator = self
            .vals
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let vals = self
            .vals
            .iter()
            .map(|v| {
                (v.numer() * (&denominator / v.denom()))
                    .to_i64()
                    .ok_or(MatrixError::ScaleOverflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ScaledIntegerMatrix {
            denominator,
            rows: self.rows,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            vals,
        })
    }

    /// Text dump: a header `rows cols degree`, then `row col num/den` per
    /// nonzero in row-major order.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let degree = self.degree.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(out, "{} {} {}", self.rows, self.cols, degree);
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                let _ = writeln!(out, "{r} {c} {}/{}", v.numer(), v.denom());
            }
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self, MatrixError> {
        let err = |line: usize, message: &str| MatrixError::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(err(hl + 1, "header must be `rows cols degree`"));
        }
        let rows: usize = h[0].parse().map_err(|_| err(hl + 1, "invalid row count"))?;
        let cols: usize = h[1]
            .parse()
            .map_err(|_| err(hl + 1, "invalid column count"))?;
        if rows > MAX_DUMP_DIM || cols > MAX_DUMP_DIM {
            return Err(err(hl + 1, "matrix dimensions too large"));
        }
        let degree = match h[2] {
            "-" => None,
            d => Some(d.parse().map_err(|_| err(hl + 1, "invalid degree"))?),
        };
        let mut entries: Vec<(usize, u32, BigRational)> = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(ln + 1, "expected `row col value`"));
            }
            let r: usize = f[0].parse().map_err(|_| err(ln + 1, "invalid row"))?;
            let c: usize = f[1].parse().map_err(|_| err(ln + 1, "invalid column"))?;
            if r >= rows || c >= cols {
                return Err(MatrixError::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            let v = parse_rational(f[2]).ok_or_else(|| err(ln + 1, "invalid rational"))?;
            entries.push((r, c as u32, v));
        }
        let mut by_row: std::collections::BTreeMap<usize, Vec<(u32, BigRational)>> =
            std::collections::BTreeMap::new();
        for (r, c, v) in entries {
            let row = by_row.entry(r).or_default();
            if let Some(slot) = row.iter_mut().find(|e| e.0 == c) {
                slot.1 += v;
            } else {
                row.push((c, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        let mut next = 0;
        for (r, mut row) in by_row {
            while next < r {
                row_ptr.push(col_idx.len());
                next += 1;
            }
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if !v.is_zero() {
                    col_idx.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
            next += 1;
        }
        while next < rows {
            row_ptr.push(col_idx.len());
            next += 1;
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
            degree,
        })
    }
}

/// Parses `n`, `-n` or `n/d` with d nonzero.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl ScaledIntegerMatrix {
    /// Exact product with an integer vector.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    let xv = &x[self.col_idx[k] as usize];
                    if !xv.is_zero() {
                        acc += xv * self.vals[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// Largest absolute row sum.
    pub fn row_sum_norm(&self) -> u128 {
        (0..self.rows)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.unsigned_abs() as u128)
                    .sum::<u128>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Entries reduced modulo `p` (p < 2^58).
    pub fn residues(&self, p: u64) -> Vec<u64> {
        self.vals
            .iter()
            .map(|&v| v.rem_euclid(p as i64) as u64)
            .collect()
    }

    /// Product modulo `p` using entries from [`Self::residues`]. With
    /// p < 2^58 the accumulator is reduced every 4096 terms.
    pub fn apply_mod(&self, residues: &[u64], x: &[u64], p: u64, out: &mut [u64]) {
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc: u128 = 0;
            for (n, k) in (self.row_ptr[r]..self.row_ptr[r + 1]).enumerate() {
                acc += residues[k] as u128 * x[self.col_idx[k] as usize] as u128;
                if n & 4095 == 4095 {
                    acc %= p as u128;
                }
            }
            *slot = (acc % p as u128) as u64;
        }
    }
}
