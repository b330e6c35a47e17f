//! Exact minimal polynomials, certified real roots, and cohomology ranks.

pub mod cohomology;
pub mod minpoly;
pub mod poly;
pub mod roots;

use num_rational::BigRational;
use thiserror::Error;

pub use cohomology::{rational_rank, reduced_cohomology_ranks, reduced_cohomology_vanishes};
pub use minpoly::{minimal_polynomial, minimal_polynomial_with, MinpolyConfig, MinpolyStats};
pub use poly::{ParsePolyError, RatPoly};
pub use roots::{
    extract_extremes, fmt_rational, is_eigenvalue, isolate_real_roots, squarefree_certify,
    IsolatedRoot, RootIsolation, RootValue, SturmSequence,
};

use crate::laplace::matrix::{MatrixError, SparseMatrix};

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("operator is {rows}x{cols}, expected square of size {dim}")]
    NotSquare {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("certification failed at basis vector {0}")]
    CertificationFailed(usize),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("operator has no nonzero eigenvalue")]
    NoNonzeroRoot,
    #[error("negative root of a positive semidefinite operator")]
    NegativeRoot,
    #[error("minimal polynomial has non-real roots")]
    NonRealRoots,
    #[error("certification work {work} exceeds budget {budget}")]
    BudgetExceeded { work: u128, budget: u128 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Default isolating-interval width, 10^-6.
pub fn default_width() -> BigRational {
    BigRational::new(1.into(), 1_000_000.into())
}

/// Exact spectral summary of one Laplacian.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// `B(l,q)` for buildings, otherwise the content hash of the complex.
    pub identity: String,
    pub degree: usize,
    pub dim: usize,
    pub minpoly: RatPoly,
    pub isolation: RootIsolation,
    /// Smallest nonzero eigenvalue.
    pub m: RootValue,
    /// Largest eigenvalue.
    pub big_m: RootValue,
    /// Exact membership of selected integers among the eigenvalues.
    pub integer_roots: Vec<(i64, bool)>,
    pub stats: MinpolyStats,
}

/// Computes the certified spectrum of `matrix` and tests the integers in
/// `probe` (inclusive) for membership.
pub fn spectral_report(
    identity: String,
    matrix: &SparseMatrix,
    degree: usize,
    cfg: &MinpolyConfig,
    width: &BigRational,
    probe: Option<(i64, i64)>,
) -> Result<SpectralReport, SpectraError> {
    let (minpoly, stats) = minimal_polynomial_with(matrix, matrix.rows(), cfg)?;
    summarize(
        identity,
        degree,
        matrix.rows(),
        minpoly,
        stats,
        width,
        probe,
    )
}

/// Root isolation and extremes for an already certified minimal polynomial.
pub fn summarize(
    identity: String,
    degree: usize,
    dim: usize,
    minpoly: RatPoly,
    stats: MinpolyStats,
    width: &BigRational,
    probe: Option<(i64, i64)>,
) -> Result<SpectralReport, SpectraError> {
    let mut isolation = isolate_real_roots(&minpoly, width)?;
    if !isolation.all_real() {
        return Err(SpectraError::NonRealRoots);
    }
    let (m, big_m) = extract_extremes(&mut isolation)?;
    let integer_roots = probe
        .map(|(lo, hi)| {
            (lo..=hi)
                .map(|k| {
                    (
                        k,
                        is_eigenvalue(&minpoly, &BigRational::from_integer(k.into())),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(SpectralReport {
        identity,
        degree,
        dim,
        minpoly,
        isolation,
        m,
        big_m,
        integer_roots,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::flag_complex;
    use crate::complex::Complex;
    use crate::gf::make_field;
    use crate::laplace::assemble_matrix;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn simplex_minpoly() {
        for n in 1..=5u32 {
            let c = Complex::from_maximal_simplices(&[(0..=n).collect::<Vec<_>>()]).unwrap();
            let m = assemble_matrix(&c, 0).unwrap();
            let p = minimal_polynomial(&m, c.count(0), 0).unwrap();
            assert_eq!(p, RatPoly::from_roots(&[r(0, 1), r(n as i64 + 1, 1)]));
        }
    }

    #[test]
    fn rank_one_building_minpoly() {
        let b = flag_complex(1, &make_field(2, 1).unwrap()).unwrap();
        let m = assemble_matrix(&b.complex, 0).unwrap();
        let rep = spectral_report(
            "B(1,2)".into(),
            &m,
            0,
            &MinpolyConfig::default(),
            &default_width(),
            Some((0, 2)),
        )
        .unwrap();
        let expect =
            &RatPoly::from_roots(&[r(0, 1), r(2, 1)]) * &RatPoly::quadratic(r(-2, 1), r(7, 9));
        assert_eq!(rep.minpoly, expect);
        assert_eq!(rep.big_m, RootValue::Exact(r(2, 1)));
        assert!((rep.m.to_f64() - (1.0 - 2f64.sqrt() / 3.0)).abs() < 1e-6);
        assert_eq!(rep.integer_roots, vec![(0, true), (1, false), (2, true)]);
    }
}
