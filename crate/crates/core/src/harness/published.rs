//! Published minimal polynomials, kept in factored form and expanded on
//! demand.

use num_rational::BigRational;
use num_traits::Zero;

use super::HarnessError;
use crate::spectra::RatPoly;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: i64) -> BigRational {
    r(n, 1)
}

fn lin(root: BigRational) -> RatPoly {
    RatPoly::linear(&root)
}

/// Monic polynomial from coefficients listed high-to-low after the leading 1.
fn monic_desc(rest: &[BigRational]) -> RatPoly {
    let mut coeffs: Vec<BigRational> = rest.iter().rev().cloned().collect();
    coeffs.push(int(1));
    RatPoly::new(coeffs)
}

fn product(factors: Vec<RatPoly>) -> RatPoly {
    factors.iter().fold(RatPoly::one(), |acc, f| &acc * f)
}

/// Factors of the published minimal polynomial of the Laplacian on
/// C^i(B(l,q)), or `None` if no formula is known for the instance.
pub fn published_factors(ell: usize, q: u64, i: usize) -> Option<Vec<RatPoly>> {
    let qq = q as i64;
    let q2 = qq * qq;
    let f = match (ell, q, i) {
        (1, _, 0) => vec![
            lin(int(0)),
            lin(int(2)),
            RatPoly::quadratic(int(-2), r(q2 + qq + 1, q2 + 2 * qq + 1)),
        ],
        (2, _, 0) => {
            let d = q2 + qq + 1;
            vec![
                lin(int(0)),
                lin(int(2)),
                lin(int(3)),
                lin(r(2 * q2 + 3 * qq + 2, d)),
                RatPoly::quadratic(-r(4 * q2 + 3 * qq + 4, d), r(4 * q2 + 4, d)),
            ]
        }
        (2, _, 1) => {
            let d = q2 + 2 * qq + 1;
            vec![
                lin(int(0)),
                lin(int(1)),
                lin(int(2)),
                lin(int(3)),
                RatPoly::quadratic(int(-2), r(q2 + 1, d)),
                RatPoly::quadratic(int(-3), r(2 * q2 + 2 * qq + 2, d)),
                RatPoly::quadratic(int(-4), r(4 * q2 + 6 * qq + 4, d)),
            ]
        }
        (3, 2, 0) => vec![
            lin(int(0)),
            lin(int(4)),
            lin(r(23, 7)),
            lin(r(19, 7)),
            monic_desc(&[
                int(-12),
                r(581528, 11025),
                r(-220232, 2205),
                r(6734719, 99225),
            ]),
        ],
        (3, 3, 0) => vec![
            lin(int(0)),
            lin(int(4)),
            lin(r(42, 13)),
            lin(r(36, 13)),
            monic_desc(&[
                int(-12),
                r(14350977, 270400),
                r(-2760633, 27040),
                r(309843369, 4326400),
            ]),
        ],
        (4, 2, 0) => vec![
            lin(int(0)),
            lin(int(4)),
            lin(int(5)),
            lin(r(144, 35)),
            monic_desc(&[r(-1322, 155), r(2798, 155)]),
            monic_desc(&[r(-276, 35), r(536, 35)]),
            monic_desc(&[r(-1778, 155), r(1306, 31), r(-7512, 155)]),
        ],
        _ => return None,
    };
    Some(f)
}

/// Expanded published polynomial.
pub fn published_polynomial(ell: usize, q: u64, i: usize) -> Result<RatPoly, HarnessError> {
    published_factors(ell, q, i)
        .map(product)
        .ok_or(HarnessError::UnknownPublishedInstance { ell, q, i })
}

/// Published minimal polynomial of (q+1)Δ on C^0(B(1,q)).
pub fn scaled_rank_one_polynomial(q: u64) -> RatPoly {
    let s = 2 * q as i64 + 2;
    product(vec![
        lin(int(0)),
        lin(int(s)),
        RatPoly::quadratic(int(-s), int((q * q + q + 1) as i64)),
    ])
}

/// Outcome of comparing a computed polynomial with the published one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublishedComparison {
    pub published: RatPoly,
    pub computed: RatPoly,
    /// Lowest coefficient index where the two differ.
    pub first_difference: Option<usize>,
}

impl PublishedComparison {
    pub fn new(published: RatPoly, computed: RatPoly) -> Self {
        let n = published.coeffs().len().max(computed.coeffs().len());
        let first_difference = (0..n).find(|&k| published.coeff(k) != computed.coeff(k));
        PublishedComparison {
            published,
            computed,
            first_difference,
        }
    }

    pub fn matches(&self) -> bool {
        self.first_difference.is_none()
    }

    pub fn describe_difference(&self) -> Option<String> {
        self.first_difference.map(|k| {
            let fmt = |c: BigRational| {
                if c.is_zero() {
                    "0".to_string()
                } else {
                    c.to_string()
                }
            };
            format!(
                "coefficient of x^{k}: published {} vs computed {}",
                fmt(self.published.coeff(k)),
                fmt(self.computed.coeff(k))
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::squarefree_certify;

    #[test]
    fn rank_one_formula_at_five() {
        let p = published_polynomial(1, 5, 0).unwrap();
        let expect =
            &RatPoly::from_roots(&[int(0), int(2)]) * &RatPoly::quadratic(int(-2), r(31, 36));
        assert_eq!(p, expect);
    }

    #[test]
    fn scaled_form_is_consistent() {
        for q in [2, 3, 4, 5, 7] {
            let p = published_polynomial(1, q, 0).unwrap();
            let scaled = p.rescale_roots(&r(1, q as i64 + 1));
            assert_eq!(scaled, scaled_rank_one_polynomial(q));
        }
    }

    #[test]
    fn published_forms_are_squarefree_and_monic() {
        for (ell, q, i) in [
            (1, 2, 0),
            (2, 2, 0),
            (2, 3, 1),
            (3, 2, 0),
            (3, 3, 0),
            (4, 2, 0),
        ] {
            let p = published_polynomial(ell, q, i).unwrap();
            assert!(squarefree_certify(&p));
            assert_eq!(p.lead(), Some(&int(1)));
        }
        assert!(published_polynomial(5, 2, 0).is_err());
    }

    #[test]
    fn comparison_reports_first_difference() {
        let a = RatPoly::from_roots(&[int(0), int(2)]);
        let b = RatPoly::from_roots(&[int(0), int(3)]);
        let c = PublishedComparison::new(a.clone(), b);
        assert_eq!(c.first_difference, Some(1));
        assert!(c.describe_difference().unwrap().contains("x^1"));
        assert!(PublishedComparison::new(a.clone(), a).matches());
    }
}
