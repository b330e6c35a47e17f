//! Exact minimal polynomials by Krylov sequences, certified by modular
//! annihilation of every basis vector.
//!
//! Work happens on the integer matrix A = D·M where D clears all
//! denominators of M; the result is mapped back by scaling the roots by 1/D.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::poly::RatPoly;
use super::SpectraError;
use crate::laplace::matrix::{ScaledIntegerMatrix, SparseMatrix};

/// Seed vectors are drawn from ChaCha8 seeded with the user seed; entries
/// are uniform in -3..=3.
pub fn seed_vectors(seed: u64, dim: usize) -> impl Iterator<Item = Vec<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || {
        (0..dim)
            .map(|_| BigInt::from(rng.gen_range(-3i64..=3)))
            .collect()
    })
}

/// Search limits and bookkeeping for [`minimal_polynomial_with`].
#[derive(Debug, Clone)]
pub struct MinpolyConfig {
    pub seed: u64,
    /// Random seed vectors tried before certification.
    pub max_seeds: usize,
    /// Upper bound on certification work (see [`certification_work`]).
    pub work_budget: Option<u128>,
    /// Basis columns to certify instead of all of them. Only sound when
    /// every column is carried to one of these by a signed permutation
    /// commuting with the matrix, e.g. orbit representatives under
    /// automorphisms of the complex.
    pub certify_columns: Option<Vec<usize>>,
}

impl Default for MinpolyConfig {
    fn default() -> Self {
        MinpolyConfig {
            seed: 0,
            max_seeds: 6,
            work_budget: None,
            certify_columns: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MinpolyStats {
    pub seeds_used: usize,
    pub witnesses: usize,
    pub primes: usize,
}

fn content_reduce(vs: &mut [&mut Vec<BigInt>]) {
    let mut g = BigInt::zero();
    for v in vs.iter() {
        for x in v.iter() {
            if !x.is_zero() {
                g = g.gcd(x);
                if g.is_one() {
                    return;
                }
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in vs.iter_mut() {
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
    }
}

/// Minimal polynomial of A restricted to the Krylov space of `v`, found by
/// fraction-free elimination of v, Av, A^2 v, ...
pub fn krylov_divisor(a: &ScaledIntegerMatrix, v: Vec<BigInt>) -> RatPoly {
    struct Row {
        pivot: usize,
        vec: Vec<BigInt>,
        comb: Vec<BigInt>,
    }
    let mut basis: Vec<Row> = Vec::new();
    let mut u = v;
    for k in 0..=a.rows {
        let mut r = u.clone();
        let mut comb = vec![BigInt::zero(); k + 1];
        comb[k] = BigInt::one();
        for b in &basis {
            let rp = &r[b.pivot];
            if rp.is_zero() {
                continue;
            }
            let g = rp.gcd(&b.vec[b.pivot]);
            let fr = &b.vec[b.pivot] / &g;
            let fb = rp / &g;
            for (x, y) in r.iter_mut().zip(&b.vec) {
                if !y.is_zero() {
                    *x = &*x * &fr - y * &fb;
                } else if !x.is_zero() {
                    *x *= &fr;
                }
            }
            for (j, x) in comb.iter_mut().enumerate() {
                let y = b.comb.get(j);
                *x = &*x * &fr - y.map_or_else(BigInt::zero, |y| y * &fb);
            }
            content_reduce(&mut [&mut r, &mut comb]);
        }
        match r.iter().position(|x| !x.is_zero()) {
            None => {
                let lead = comb[k].clone();
                return RatPoly::new(
                    comb.into_iter()
                        .map(|c| BigRational::new(c, lead.clone()))
                        .collect(),
                );
            }
            Some(pivot) => {
                basis.push(Row {
                    pivot,
                    vec: r,
                    comb,
                });
                u = a.apply(&u);
            }
        }
    }
    unreachable!("Krylov space dimension exceeds matrix size")
}

/// Deterministic list of primes below 2^58, largest first.
pub fn certification_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c: u64 = (1 << 58) - 1;
    while out.len() < count {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Checks P(A) e_j = 0 for every j, where P is the primitive integer form
/// of `p`. Every entry of P(A) e_j is bounded by sum |c_k| ||A||^k, so
/// vanishing modulo primes whose product exceeds twice that bound proves
/// exact vanishing. Returns the first failing column of `columns` (all
/// columns when `None`).
pub fn certify_annihilation(
    a: &ScaledIntegerMatrix,
    p: &RatPoly,
    columns: Option<&[usize]>,
    stats: &mut MinpolyStats,
) -> Result<(), usize> {
    let coeffs = p.primitive_integer();
    let norm = BigInt::from(a.row_sum_norm());
    let mut bound = BigInt::zero();
    let mut pow = BigInt::one();
    for c in &coeffs {
        bound += c.abs() * &pow;
        pow *= &norm;
    }
    let target = bound * 2;
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    let mut c: u64 = (1 << 58) - 1;
    while product <= target {
        if is_prime_u64(c) {
            product *= c;
            primes.push(c);
        }
        c -= 2;
    }
    stats.primes = stats.primes.max(primes.len());
    let n = a.rows;
    let all: Vec<usize>;
    let columns = match columns {
        Some(c) => c,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    for &q in &primes {
        let res = a.residues(q);
        let cs: Vec<u64> = coeffs.iter().map(|c| residue(c, q)).collect();
        let fail = columns.par_iter().copied().find_first(|&j| {
            let mut y = vec![0u64; n];
            let mut t = vec![0u64; n];
            y[j] = *cs.last().unwrap();
            for c in cs.iter().rev().skip(1) {
                a.apply_mod(&res, &y, q, &mut t);
                t[j] = (t[j] + c) % q;
                std::mem::swap(&mut y, &mut t);
            }
            y.iter().any(|&x| x != 0)
        });
        if let Some(j) = fail {
            return Err(j);
        }
    }
    Ok(())
}

/// Estimated certification work per prime: columns times matvec cost
/// times degree.
pub fn certification_work(m: &SparseMatrix, columns: usize, degree: usize) -> u128 {
    columns as u128 * (m.nnz() as u128 + m.rows() as u128) * degree.max(1) as u128
}

/// Exact monic minimal polynomial of a square matrix.
pub fn minimal_polynomial(
    m: &SparseMatrix,
    dim: usize,
    seed: u64,
) -> Result<RatPoly, SpectraError> {
    let cfg = MinpolyConfig {
        seed,
        ..MinpolyConfig::default()
    };
    minimal_polynomial_with(m, dim, &cfg).map(|(p, _)| p)
}

pub fn minimal_polynomial_with(
    m: &SparseMatrix,
    dim: usize,
    cfg: &MinpolyConfig,
) -> Result<(RatPoly, MinpolyStats), SpectraError> {
    if m.rows() != dim || m.cols() != dim {
        return Err(SpectraError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
            dim,
        });
    }
    let mut stats = MinpolyStats::default();
    if dim == 0 {
        return Ok((RatPoly::one(), stats));
    }
    let a = m.scaled_integer()?;
    let mut p = RatPoly::one();
    for (k, v) in seed_vectors(cfg.seed, dim)
        .take(cfg.max_seeds.max(1))
        .enumerate()
    {
        let next = p.lcm(&krylov_divisor(&a, v));
        stats.seeds_used = k + 1;
        if next == p && k > 0 {
            break;
        }
        p = next;
    }
    if let Some(budget) = cfg.work_budget {
        let cols = cfg.certify_columns.as_ref().map_or(dim, Vec::len);
        let work = certification_work(m, cols, p.degree().unwrap_or(0));
        if work > budget {
            return Err(SpectraError::BudgetExceeded { work, budget });
        }
    }
    // Each failed column strictly raises the degree, so this terminates.
    loop {
        match certify_annihilation(&a, &p, cfg.certify_columns.as_deref(), &mut stats) {
            Ok(()) => break,
            Err(j) => {
                stats.witnesses += 1;
                let mut e = vec![BigInt::zero(); dim];
                e[j] = BigInt::one();
                let next = p.lcm(&krylov_divisor(&a, e));
                if next == p {
                    return Err(SpectraError::CertificationFailed(j));
                }
                p = next;
            }
        }
    }
    let d = BigRational::from_integer(a.denominator.clone());
    Ok((p.rescale_roots(&d), stats))
}

/// Evaluates q(M) v for an exact rational polynomial q by Horner's rule.
pub fn poly_apply(
    m: &SparseMatrix,
    q: &RatPoly,
    v: &[BigRational],
) -> Result<Vec<BigRational>, SpectraError> {
    let mut y = vec![BigRational::zero(); v.len()];
    for c in q.coeffs().iter().rev() {
        y = m.apply(&y)?;
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += c * vi;
        }
    }
    Ok(y)
}

/// Spot check of minimality: for each rational root r of p, the quotient
/// p / (x - r) must fail to annihilate some seed vector.
pub fn spot_check_minimality(
    m: &SparseMatrix,
    p: &RatPoly,
    rational_roots: &[BigRational],
    seed: u64,
) -> Result<bool, SpectraError> {
    let dim = m.rows();
    let seeds: Vec<Vec<BigRational>> = seed_vectors(seed, dim)
        .take(2)
        .map(|v| v.into_iter().map(BigRational::from_integer).collect())
        .collect();
    for r in rational_roots {
        let (quot, rem) = p.div_rem(&RatPoly::linear(r));
        if !rem.is_zero() {
            return Ok(false);
        }
        let mut witnessed = false;
        for s in &seeds {
            if poly_apply(m, &quot, s)?.iter().any(|x| !x.is_zero()) {
                witnessed = true;
                break;
            }
        }
        if !witnessed {
            // Fall back to basis vectors, which are conclusive.
            witnessed = (0..dim).any(|j| {
                let mut e = vec![BigRational::zero(); dim];
                e[j] = BigRational::one();
                poly_apply(m, &quot, &e).is_ok_and(|y| y.iter().any(|x| !x.is_zero()))
            });
        }
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(true)
}
