//! Sturm-sequence real-root isolation with exact rational endpoints.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::RatPoly;
use super::SpectraError;

/// Canonical Sturm chain p, p', -rem(...), ... with each member scaled to
/// leading coefficient of absolute value one (signs are unaffected).
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<RatPoly>,
}

fn normalize_abs(p: RatPoly) -> RatPoly {
    match p.lead() {
        Some(l) => {
            let s = l.abs().recip();
            p.scale(&s)
        }
        None => p,
    }
}

fn sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

impl SturmSequence {
    pub fn new(p: &RatPoly) -> Self {
        let mut chain = vec![normalize_abs(p.clone())];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(normalize_abs(d));
            loop {
                let n = chain.len();
                let r = chain[n - 2].rem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(normalize_abs(-&r));
            }
        }
        SturmSequence { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn variations(&self, x: &BigRational) -> usize {
        count_changes(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    /// Number of distinct real roots in (lo, hi], lo < hi.
    pub fn count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations(lo) - self.variations(hi)
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_changes(self.chain.iter().map(|p| {
            let s = p.lead().map_or(0, sign);
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if !positive && odd {
                -s
            } else {
                s
            }
        }))
    }

    /// Total number of distinct real roots.
    pub fn total(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Distinct real roots strictly greater than `x`.
    pub fn count_above(&self, x: &BigRational) -> usize {
        self.variations(x) - self.variations_at_infinity(true)
    }
}

/// One isolating interval (lo, hi) with exactly one root, plus the exact
/// value when the root is rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub lo: BigRational,
    pub hi: BigRational,
    pub exact: Option<BigRational>,
}

impl IsolatedRoot {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        match &self.exact {
            Some(r) => r.clone(),
            None => (&self.lo + &self.hi) / BigRational::from_integer(2.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn value(&self) -> RootValue {
        match &self.exact {
            Some(r) => RootValue::Exact(r.clone()),
            None => RootValue::Interval {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
            },
        }
    }
}

/// A certified real number: exact, or known to lie in an open interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootValue {
    Exact(BigRational),
    Interval { lo: BigRational, hi: BigRational },
}

impl RootValue {
    pub fn lower(&self) -> &BigRational {
        match self {
            RootValue::Exact(r) => r,
            RootValue::Interval { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &BigRational {
        match self {
            RootValue::Exact(r) => r,
            RootValue::Interval { hi, .. } => hi,
        }
    }

    pub fn midpoint(&self) -> BigRational {
        (self.lower() + self.upper()) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            RootValue::Exact(r) => Some(r),
            RootValue::Interval { .. } => None,
        }
    }

    /// Certified comparison with `c`; `None` when `c` lies inside the interval.
    pub fn compare(&self, c: &BigRational) -> Option<Ordering> {
        match self {
            RootValue::Exact(r) => Some(r.cmp(c)),
            RootValue::Interval { lo, hi } => {
                if hi <= c {
                    Some(Ordering::Less)
                } else if lo >= c {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    /// Affine image a*x + b for a > 0.
    pub fn affine(&self, a: &BigRational, b: &BigRational) -> RootValue {
        debug_assert!(a.is_positive());
        match self {
            RootValue::Exact(r) => RootValue::Exact(a * r + b),
            RootValue::Interval { lo, hi } => RootValue::Interval {
                lo: a * lo + b,
                hi: a * hi + b,
            },
        }
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootValue::Exact(r) => write!(f, "{}", fmt_rational(r)),
            RootValue::Interval { lo, hi } => {
                write!(f, "({}, {})", fmt_rational(lo), fmt_rational(hi))
            }
        }
    }
}

/// `num/den` with an explicit denominator.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rational with the smallest denominator in the closed interval [lo, hi].
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Disjoint sorted isolating intervals for the distinct real roots of a
/// squarefree polynomial.
#[derive(Debug, Clone)]
pub struct RootIsolation {
    poly: RatPoly,
    roots: Vec<IsolatedRoot>,
}

impl RootIsolation {
    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    pub fn roots(&self) -> &[IsolatedRoot] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Whether every root is real.
    pub fn all_real(&self) -> bool {
        self.poly.degree() == Some(self.roots.len())
    }

    /// Narrows root `idx` until its width is at most `width`.
    pub fn refine(&mut self, idx: usize, width: &BigRational) {
        let p = &self.poly;
        refine_root(p, &mut self.roots[idx], width);
    }

    /// Halves root `idx` once; returns false when it is exact.
    pub fn bisect(&mut self, idx: usize) -> bool {
        let root = &mut self.roots[idx];
        if root.exact.is_some() {
            return false;
        }
        let w = root.width() / BigRational::from_integer(2.into());
        refine_root(&self.poly, root, &w);
        true
    }

    /// Certified comparison of root `idx` with `c`, refining down to `floor`.
    pub fn compare_root(
        &mut self,
        idx: usize,
        c: &BigRational,
        floor: &BigRational,
    ) -> Option<Ordering> {
        loop {
            let root = &self.roots[idx];
            if let Some(o) = root.value().compare(c) {
                return Some(o);
            }
            if root.width() <= *floor || !self.bisect(idx) {
                return None;
            }
        }
    }
}

fn refine_root(p: &RatPoly, root: &mut IsolatedRoot, width: &BigRational) {
    if let Some(r) = &root.exact {
        let half = width / BigRational::from_integer(2.into());
        let lo = r - &half;
        let hi = r + &half;
        if lo > root.lo {
            root.lo = lo;
        }
        if hi < root.hi {
            root.hi = hi;
        }
        return;
    }
    let two = BigRational::from_integer(2.into());
    let mut s_lo = sign(&p.eval(&root.lo));
    while root.width() > *width {
        let mid = (&root.lo + &root.hi) / &two;
        let s = sign(&p.eval(&mid));
        if s == 0 {
            root.exact = Some(mid);
            return refine_root(p, root, width);
        }
        if s == s_lo {
            root.lo = mid;
            s_lo = s;
        } else {
            root.hi = mid;
        }
    }
}

/// Detects a rational root inside an isolating interval. Every rational
/// root a/b has b dividing the leading coefficient L of the primitive
/// integer form; two such rationals differ by at least 1/L^2, so once the
/// interval is narrower than that the only candidate is the simplest
/// rational it contains.
fn detect_rational(p: &RatPoly, lead: &BigInt, root: &mut IsolatedRoot) {
    let l = BigRational::from_integer(lead.clone());
    let narrow = (&l * &l).recip() / BigRational::from_integer(2.into());
    refine_root(p, root, &narrow);
    if root.exact.is_some() {
        return;
    }
    let s = simplest_between(&root.lo, &root.hi);
    if s.denom() <= lead && p.eval(&s).is_zero() {
        root.exact = Some(s);
    }
}

/// Isolates all distinct real roots of a squarefree `p` into intervals of
/// width at most `width`, marking rational roots exactly.
pub fn isolate_real_roots(p: &RatPoly, width: &BigRational) -> Result<RootIsolation, SpectraError> {
    if !p.is_squarefree() {
        return Err(SpectraError::NotSquarefree);
    }
    let sturm = SturmSequence::new(p);
    let mut roots = Vec::new();
    if p.degree().unwrap_or(0) > 0 {
        let lead = p.lead().unwrap();
        let bound = BigRational::one()
            + p.coeffs()
                .iter()
                .map(|c| (c / lead).abs())
                .max()
                .unwrap_or_else(BigRational::zero);
        let mut stack = vec![(
            -bound.clone(),
            bound.clone(),
            sturm.variations(&-bound.clone()),
            sturm.variations(&bound),
        )];
        while let Some((lo, hi, vlo, vhi)) = stack.pop() {
            let n = vlo - vhi;
            if n == 0 {
                continue;
            }
            if n == 1 {
                roots.push(IsolatedRoot {
                    lo,
                    hi,
                    exact: None,
                });
                continue;
            }
            let mid = split_point(p, &lo, &hi);
            let vm = sturm.variations(&mid);
            stack.push((mid.clone(), hi, vm, vhi));
            stack.push((lo, mid, vlo, vm));
        }
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    let ints = p.primitive_integer();
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    for r in roots.iter_mut() {
        detect_rational(p, &lead, r);
        refine_root(p, r, width);
    }
    Ok(RootIsolation {
        poly: p.clone(),
        roots,
    })
}

/// A point strictly inside (lo, hi) that is not a root of p.
fn split_point(p: &RatPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let w = hi - lo;
    let mut k: i64 = 2;
    loop {
        for j in 1..k {
            let t = lo + &w * BigRational::new(j.into(), k.into());
            if !p.eval(&t).is_zero() {
                return t;
            }
        }
        k += 1;
    }
}

/// Exact test p(c) = 0.
pub fn is_eigenvalue(p: &RatPoly, c: &BigRational) -> bool {
    p.eval(c).is_zero()
}

/// gcd(p, p') = 1.
pub fn squarefree_certify(p: &RatPoly) -> bool {
    p.is_squarefree()
}

/// Leftmost root certified positive and rightmost root of a minimal
/// polynomial of a positive semidefinite operator.
pub fn extract_extremes(iso: &mut RootIsolation) -> Result<(RootValue, RootValue), SpectraError> {
    let first = iso
        .roots
        .iter()
        .position(|r| !r.is_zero())
        .ok_or(SpectraError::NoNonzeroRoot)?;
    loop {
        let r = &iso.roots[first];
        if r.exact.is_some() || !r.lo.is_negative() {
            break;
        }
        if !r.hi.is_positive() {
            return Err(SpectraError::NegativeRoot);
        }
        iso.bisect(first);
    }
    let r = &iso.roots[first];
    if r.exact.as_ref().is_some_and(|x| x.is_negative()) {
        return Err(SpectraError::NegativeRoot);
    }
    let m = r.value();
    let big = iso.roots.last().unwrap().value();
    Ok((m, big))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn width() -> BigRational {
        r(1, 1_000_000)
    }

    #[test]
    fn sturm_counts() {
        let p = RatPoly::from_roots(&[r(0, 1), r(1, 2), r(3, 1)]);
        let s = SturmSequence::new(&p);
        assert_eq!(s.total(), 3);
        assert_eq!(s.count(&r(-1, 1), &r(1, 1)), 2);
        assert_eq!(s.count_above(&r(1, 1)), 1);
        // x^2 + 1 has no real roots.
        assert_eq!(
            SturmSequence::new(&RatPoly::from_integers(&[1, 0, 1])).total(),
            0
        );
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&r(3, 10), &r(4, 10)), r(1, 3));
        assert_eq!(simplest_between(&r(-3, 10), &r(1, 10)), r(0, 1));
        assert_eq!(simplest_between(&r(-4, 10), &r(-3, 10)), r(-1, 3));
        assert_eq!(simplest_between(&r(5, 2), &r(5, 2)), r(5, 2));
    }

    #[test]
    fn rank_one_building_polynomial() {
        // x(x-2)(x^2-2x+7/9)
        let p = &RatPoly::from_roots(&[r(0, 1), r(2, 1)]) * &RatPoly::quadratic(r(-2, 1), r(7, 9));
        let mut iso = isolate_real_roots(&p, &width()).unwrap();
        assert!(iso.all_real());
        let roots = iso.roots().to_vec();
        assert_eq!(roots.len(), 4);
        assert!(roots[0].is_zero());
        assert_eq!(roots[3].exact, Some(r(2, 1)));
        assert!(roots[1].exact.is_none() && roots[2].exact.is_none());
        let lower = 1.0 - 2f64.sqrt() / 3.0;
        let upper = 1.0 + 2f64.sqrt() / 3.0;
        for (root, expect) in [(&roots[1], lower), (&roots[2], upper)] {
            assert!(root.width() <= width());
            assert!(rational_to_f64(&root.lo) < expect && expect < rational_to_f64(&root.hi));
        }
        let (m, big) = extract_extremes(&mut iso).unwrap();
        assert!((m.to_f64() - 0.5286).abs() < 1e-4);
        assert_eq!(big, RootValue::Exact(r(2, 1)));
    }

    #[test]
    fn simplex_roots_exact() {
        for n in 1..=6i64 {
            let p = RatPoly::from_roots(&[r(0, 1), r(n + 1, 1)]);
            let mut iso = isolate_real_roots(&p, &width()).unwrap();
            let (m, big) = extract_extremes(&mut iso).unwrap();
            assert_eq!(m, RootValue::Exact(r(n + 1, 1)));
            assert_eq!(big, m);
        }
    }

    #[test]
    fn rational_roots_found() {
        let p = RatPoly::from_roots(&[r(0, 1), r(1, 3), r(23, 7), r(19, 7), r(-5, 11)]);
        let iso = isolate_real_roots(&p, &width()).unwrap();
        let exact: Vec<_> = iso
            .roots()
            .iter()
            .map(|x| x.exact.clone().unwrap())
            .collect();
        assert_eq!(exact, vec![r(-5, 11), r(0, 1), r(1, 3), r(19, 7), r(23, 7)]);
    }

    #[test]
    fn errors_and_predicates() {
        let sq = RatPoly::from_integers(&[0, 0, 1]);
        assert!(matches!(
            isolate_real_roots(&sq, &width()),
            Err(SpectraError::NotSquarefree)
        ));
        assert!(!squarefree_certify(&sq));
        assert!(squarefree_certify(&RatPoly::from_roots(&[
            r(0, 1),
            r(2, 1)
        ])));
        let mut only_zero = isolate_real_roots(&RatPoly::x(), &width()).unwrap();
        assert!(matches!(
            extract_extremes(&mut only_zero),
            Err(SpectraError::NoNonzeroRoot)
        ));
        // x(x-2)(x^2-2x+(q^2+q+1)/(q+1)^2) at c = 1 is nonzero for q >= 2.
        for q in 2..10i64 {
            let p = &RatPoly::from_roots(&[r(0, 1), r(2, 1)])
                * &RatPoly::quadratic(r(-2, 1), r(q * q + q + 1, (q + 1) * (q + 1)));
            assert!(!is_eigenvalue(&p, &r(1, 1)));
            assert!(is_eigenvalue(&p, &r(2, 1)));
        }
    }

    #[test]
    fn comparison_refines() {
        // Roots 1 +- sqrt(2)/3; the smaller is about 0.5286.
        let p = RatPoly::quadratic(r(-2, 1), r(7, 9));
        let mut iso = isolate_real_roots(&p, &r(1, 1)).unwrap();
        let floor = r(1, 1_000_000_000_000);
        assert_eq!(
            iso.compare_root(0, &r(1, 2), &floor),
            Some(Ordering::Greater)
        );
        assert_eq!(
            iso.compare_root(0, &r(53, 100), &floor),
            Some(Ordering::Less)
        );
    }
}
