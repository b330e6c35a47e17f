//! Cochains, the weighted pairing, the coboundary d, its adjoint delta, the
//! Laplacian delta d, and the localization operators used to compare a
//! complex with its vertex links.
//!
//! Cochains store one exact rational per canonical simplex. The value on an
//! oriented simplex is the stored value times the orientation sign, so every
//! cochain is alternating by construction.

pub mod matrix;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::building::TypedBuilding;
use crate::complex::{Complex, Link, VertexId};
pub use matrix::{MatrixError, ScaledIntegerMatrix, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaplaceError {
    #[error("cochain degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {degree} is out of range for this operator on a {dim}-dimensional complex")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("cochain has {got} values but the complex has {expected} simplices of that degree")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {0} is not in the complex")]
    UnknownVertex(VertexId),
    #[error("type {0} does not exist in this building")]
    UnknownType(u8),
    #[error("localization needs the link of a single vertex")]
    NotAVertexLink,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    values: Vec<BigRational>,
}

impl Cochain {
    pub fn new(degree: usize, values: Vec<BigRational>) -> Self {
        Cochain { degree, values }
    }

    pub fn zeros(degree: usize, len: usize) -> Self {
        Cochain {
            degree,
            values: vec![BigRational::zero(); len],
        }
    }

    pub fn from_integers(degree: usize, values: &[i64]) -> Self {
        Cochain {
            degree,
            values: values
                .iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        }
    }

    /// Indicator of the simplex with index `idx`.
    pub fn basis(degree: usize, len: usize, idx: usize) -> Self {
        let mut c = Self::zeros(degree, len);
        c.values[idx] = BigRational::one();
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigRational> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigRational) -> Cochain {
        Cochain {
            degree: self.degree,
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, LaplaceError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, LaplaceError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Cochain,
        op: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Result<Cochain, LaplaceError> {
        if self.degree != other.degree {
            return Err(LaplaceError::DegreeMismatch(self.degree, other.degree));
        }
        if self.values.len() != other.values.len() {
            return Err(LaplaceError::LengthMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(Cochain {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check(c: &Complex, f: &Cochain) -> Result<(), LaplaceError> {
    if f.degree > c.dim() {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: f.degree,
            dim: c.dim(),
        });
    }
    let expected = c.count(f.degree);
    if f.values.len() != expected {
        return Err(LaplaceError::LengthMismatch {
            expected,
            got: f.values.len(),
        });
    }
    Ok(())
}

/// (f, g) = sum over i-simplices of w(s) f(s) g(s).
pub fn inner_product(c: &Complex, f: &Cochain, g: &Cochain) -> Result<BigRational, LaplaceError> {
    if f.degree != g.degree {
        return Err(LaplaceError::DegreeMismatch(f.degree, g.degree));
    }
    check(c, f)?;
    check(c, g)?;
    let w = c.weights(f.degree);
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(w)
        .filter(|((a, b), _)| !a.is_zero() && !b.is_zero())
        .fold(BigRational::zero(), |acc, ((a, b), &w)| {
            acc + a * b * BigRational::from_integer(w.into())
        }))
}

/// (df)([v0..v_{i+1}]) = sum_j (-1)^j f(face omitting v_j).
pub fn coboundary(c: &Complex, f: &Cochain) -> Result<Cochain, LaplaceError> {
    check(c, f)?;
    let i = f.degree;
    if i >= c.dim() {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: i,
            dim: c.dim(),
        });
    }
    let values = (0..c.count(i + 1))
        .map(|t| {
            c.faces(i + 1, t)
                .iter()
                .enumerate()
                .fold(BigRational::zero(), |acc, (j, &face)| {
                    let v = &f.values[face as usize];
                    if j % 2 == 0 {
                        acc + v
                    } else {
                        acc - v
                    }
                })
        })
        .collect();
    Ok(Cochain::new(i + 1, values))
}

/// Sign of the oriented simplex [v, s] relative to the canonical ordering of
/// {v} u s: v moves past every vertex of s smaller than it.
fn prepend_sign(v: VertexId, s: &[VertexId]) -> bool {
    s.iter().filter(|&&x| x < v).count() % 2 == 0
}

/// (delta g)(s) = sum over v with [v,s] a simplex of w([v,s])/w(s) g([v,s]).
pub fn adjoint_delta(c: &Complex, g: &Cochain) -> Result<Cochain, LaplaceError> {
    check(c, g)?;
    let i = g.degree;
    if i == 0 {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: 0,
            dim: c.dim(),
        });
    }
    let values = (0..c.count(i - 1))
        .map(|s_idx| {
            let s = c.simplex(i - 1, s_idx);
            let ws = c.weight(i - 1, s_idx);
            c.cofaces(i - 1, s_idx)
                .iter()
                .fold(BigRational::zero(), |acc, &t| {
                    let t = t as usize;
                    let val = &g.values[t];
                    if val.is_zero() {
                        return acc;
                    }
                    let v = *c
                        .simplex(i, t)
                        .iter()
                        .find(|x| !s.contains(x))
                        .expect("a coface has exactly one extra vertex");
                    let term = val * ratio(c.weight(i, t), ws);
                    if prepend_sign(v, s) {
                        acc + term
                    } else {
                        acc - term
                    }
                })
        })
        .collect();
    Ok(Cochain::new(i - 1, values))
}

/// Delta = delta d on C^i, 0 <= i <= n - 1.
pub fn laplacian_apply(c: &Complex, f: &Cochain) -> Result<Cochain, LaplaceError> {
    check(c, f)?;
    if f.degree >= c.dim() {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: f.degree,
            dim: c.dim(),
        });
    }
    adjoint_delta(c, &coboundary(c, f)?)
}

/// Restriction to the simplices containing `v`.
pub fn rho_v(c: &Complex, f: &Cochain, v: VertexId) -> Result<Cochain, LaplaceError> {
    check(c, f)?;
    if c.vertex_index(v).is_none() {
        return Err(LaplaceError::UnknownVertex(v));
    }
    let values = c
        .simplices(f.degree)
        .zip(&f.values)
        .map(|(s, x)| {
            if s.contains(&v) {
                x.clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Ok(Cochain::new(f.degree, values))
}

/// Sum of rho_v over the vertices of type `alpha`.
pub fn rho_alpha(b: &TypedBuilding, f: &Cochain, alpha: u8) -> Result<Cochain, LaplaceError> {
    check(&b.complex, f)?;
    if alpha as usize > b.ell {
        return Err(LaplaceError::UnknownType(alpha));
    }
    let values = b
        .complex
        .simplices(f.degree)
        .zip(&f.values)
        .map(|(s, x)| {
            let hits = s.iter().filter(|&&v| b.vertex_type(v) == alpha).count() as i64;
            x * BigRational::from_integer(hits.into())
        })
        .collect();
    Ok(Cochain::new(f.degree, values))
}

/// (tau_v f)(s) = f([v, s]) for (i-1)-simplices s of the vertex link.
pub fn tau_v(c: &Complex, link: &Link, f: &Cochain) -> Result<Cochain, LaplaceError> {
    check(c, f)?;
    let i = f.degree;
    if i == 0 {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: 0,
            dim: c.dim(),
        });
    }
    let [v] = link.center.vertices() else {
        return Err(LaplaceError::NotAVertexLink);
    };
    let lk = &link.complex;
    if i - 1 > lk.dim() {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: i - 1,
            dim: lk.dim(),
        });
    }
    let mut joined = Vec::with_capacity(i + 1);
    let values = lk
        .simplices(i - 1)
        .map(|local| {
            joined.clear();
            joined.extend(local.iter().map(|&x| link.to_global[x as usize]));
            let positive = prepend_sign(*v, &joined);
            joined.push(*v);
            joined.sort_unstable();
            let idx = c
                .index_of(&joined)
                .expect("a link simplex joined with its center lies in the complex");
            let x = f.values[idx].clone();
            if positive {
                x
            } else {
                -x
            }
        })
        .collect();
    Ok(Cochain::new(i - 1, values))
}

/// The Laplacian on C^i as a sparse matrix in canonical simplex order:
/// entry (s, u) = sum over cofaces t of s containing u of
/// [s:t][u:t] w(t)/w(s).
pub fn assemble_matrix(c: &Complex, i: usize) -> Result<SparseMatrix, LaplaceError> {
    if i >= c.dim() {
        return Err(LaplaceError::DegreeOutOfRange {
            degree: i,
            dim: c.dim(),
        });
    }
    let rows = (0..c.count(i))
        .map(|s| {
            let ws = c.weight(i, s);
            let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
            for &t in c.cofaces(i, s) {
                let t = t as usize;
                let wt = c.weight(i + 1, t) as i64;
                let faces = c.faces(i + 1, t);
                let js = faces.iter().position(|&f| f as usize == s).unwrap();
                for (j, &u) in faces.iter().enumerate() {
                    let sign = if (js + j) % 2 == 0 { 1 } else { -1 };
                    *acc.entry(u).or_insert(0) += sign * wt;
                }
            }
            acc.into_iter()
                .map(|(u, num)| (u, BigRational::new(num.into(), BigInt::from(ws))))
                .collect()
        })
        .collect();
    Ok(SparseMatrix::from_rows(c.count(i), rows).with_degree(i))
}

/// The Laplacian on C^i, applied matrix-free unless materialized.
#[derive(Debug, Clone)]
pub struct LaplacianOperator<'a> {
    complex: &'a Complex,
    degree: usize,
    matrix: Option<SparseMatrix>,
}

impl<'a> LaplacianOperator<'a> {
    pub fn new(complex: &'a Complex, degree: usize) -> Result<Self, LaplaceError> {
        if degree >= complex.dim() {
            return Err(LaplaceError::DegreeOutOfRange {
                degree,
                dim: complex.dim(),
            });
        }
        Ok(LaplacianOperator {
            complex,
            degree,
            matrix: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.complex.count(self.degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn apply(&self, f: &Cochain) -> Result<Cochain, LaplaceError> {
        match &self.matrix {
            Some(m) => {
                check(self.complex, f)?;
                if f.degree != self.degree {
                    return Err(LaplaceError::DegreeMismatch(self.degree, f.degree));
                }
                let values = m.apply(&f.values).expect("lengths checked above");
                Ok(Cochain::new(self.degree, values))
            }
            None => laplacian_apply(self.complex, f),
        }
    }

    pub fn materialize(&mut self) -> &SparseMatrix {
        let (c, d) = (self.complex, self.degree);
        self.matrix
            .get_or_insert_with(|| assemble_matrix(c, d).expect("degree validated at construction"))
    }

    pub fn matrix(&self) -> Option<&SparseMatrix> {
        self.matrix.as_ref()
    }
}

/// Basis of the kernel of (M - c I) over the rationals, by Gauss-Jordan
/// elimination on the dense matrix.
pub fn eigenspace_basis(m: &SparseMatrix, c: &BigRational) -> Vec<Vec<BigRational>> {
    let n = m.rows();
    let mut a = m.to_dense();
    for (k, row) in a.iter_mut().enumerate() {
        row[k] -= c;
    }
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..n).find(|&k| !a[k][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                    if !pv.is_zero() {
                        *x -= &f * pv;
                    }
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == n {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|j| !pivot_cols.contains(j)).collect();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![BigRational::zero(); n];
            v[fcol] = BigRational::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[row][fcol].clone();
            }
            v
        })
        .collect()
}

/// Whether a rational is nonnegative; used by the Rayleigh-type checks.
pub fn is_nonnegative(x: &BigRational) -> bool {
    !x.is_negative()
}
