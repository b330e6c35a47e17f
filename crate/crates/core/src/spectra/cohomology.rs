//! Reduced rational cohomology ranks from exact coboundary ranks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::minpoly::certification_primes;
use crate::complex::Complex;

/// Rows of the coboundary C^i -> C^{i+1}: one row per (i+1)-simplex with
/// entries (-1)^j at its j-th face.
fn coboundary_rows(c: &Complex, i: usize) -> Vec<Vec<(usize, i64)>> {
    (0..c.count(i + 1))
        .map(|t| {
            c.faces(i + 1, t)
                .iter()
                .enumerate()
                .map(|(j, &f)| (f as usize, if j % 2 == 0 { 1 } else { -1 }))
                .collect()
        })
        .collect()
}

fn rank_mod(rows: &[Vec<(usize, i64)>], p: u64) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    let inv = |a: u64| -> u64 {
        let (mut r, mut b, mut e) = (1u128, a as u128, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u128;
            }
            b = b * b % p as u128;
            e >>= 1;
        }
        r as u64
    };
    for row in rows {
        let mut r: BTreeMap<usize, u64> = row
            .iter()
            .map(|&(c, v)| (c, v.rem_euclid(p as i64) as u64))
            .filter(|&(_, v)| v != 0)
            .collect();
        while let Some((&col, &val)) = r.iter().next() {
            match pivots.get(&col) {
                Some(prow) => {
                    for (&c, &pv) in prow {
                        let e = r.entry(c).or_insert(0);
                        *e = ((*e as u128 + (p - val) as u128 * pv as u128) % p as u128) as u64;
                        if *e == 0 {
                            r.remove(&c);
                        }
                    }
                }
                None => {
                    let s = inv(val);
                    for v in r.values_mut() {
                        *v = (*v as u128 * s as u128 % p as u128) as u64;
                    }
                    pivots.insert(col, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn rank_exact(rows: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for row in rows {
        let mut r: BTreeMap<usize, BigRational> = row
            .iter()
            .filter(|&&(_, v)| v != 0)
            .map(|&(c, v)| (c, BigRational::from_integer(v.into())))
            .collect();
        while let Some((&col, val)) = r.iter().next() {
            let val = val.clone();
            match pivots.get(&col) {
                Some(prow) => {
                    for (&c, pv) in prow {
                        let e = r.entry(c).or_insert_with(BigRational::zero);
                        *e -= &val * pv;
                        if e.is_zero() {
                            r.remove(&c);
                        }
                    }
                }
                None => {
                    let s = val.recip();
                    for v in r.values_mut() {
                        *v *= &s;
                    }
                    pivots.insert(col, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Rank over the rationals of a sparse integer matrix. A full modular rank
/// is already exact; otherwise rational elimination decides.
pub fn rational_rank(rows: &[Vec<(usize, i64)>], cols: usize) -> usize {
    let r = rank_mod(rows, certification_primes(1)[0]);
    if r == rows.len().min(cols) {
        r
    } else {
        rank_exact(rows)
    }
}

/// Ranks of reduced cohomology H~^i(c; Q) for i = 0..=dim, using the
/// augmentation Q -> C^0 in degree -1.
pub fn reduced_cohomology_ranks(c: &Complex) -> Vec<usize> {
    let n = c.dim();
    let ranks: Vec<usize> = (0..n)
        .map(|i| rational_rank(&coboundary_rows(c, i), c.count(i)))
        .collect();
    (0..=n)
        .map(|i| {
            let into = if i == 0 {
                usize::from(c.count(0) > 0)
            } else {
                ranks[i - 1]
            };
            let out = if i < n { ranks[i] } else { 0 };
            c.count(i) - out - into
        })
        .collect()
}

/// Whether H~^i vanishes; degrees above the dimension always do.
pub fn reduced_cohomology_vanishes(c: &Complex, i: usize) -> bool {
    reduced_cohomology_ranks(c).get(i).is_none_or(|&r| r == 0)
}
