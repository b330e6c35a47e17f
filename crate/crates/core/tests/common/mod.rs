//! Exact cochain identities shared by the acceptance and property tests.

#![allow(dead_code)]

use garland::building::TypedBuilding;
use garland::complex::{Complex, Simplex};
use garland::laplace::{
    adjoint_delta, assemble_matrix, coboundary, eigenspace_basis, inner_product, laplacian_apply,
    rho_alpha, rho_v, tau_v, Cochain,
};
use garland::spectra::{isolate_real_roots, minimal_polynomial, RatPoly};
use garland::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    q(n, 1)
}

/// Random cochain with small rational entries, some of them zero.
pub fn random_cochain<R: Rng>(rng: &mut R, degree: usize, len: usize) -> Cochain {
    let values = (0..len)
        .map(|_| q(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
        .collect();
    Cochain::new(degree, values)
}

/// Pure complex of dimension `n` on at most `max_vertices` vertices with up
/// to `max_faces` top simplices.
pub fn random_pure_complex<R: Rng>(
    rng: &mut R,
    n: usize,
    max_vertices: u32,
    max_faces: usize,
) -> Complex {
    let vertices = rng.gen_range(n as u32 + 1..=max_vertices);
    let faces = rng.gen_range(1..=max_faces);
    let mut tops: Vec<Vec<u32>> = (0..faces)
        .map(|_| {
            let mut f: Vec<u32> = rand::seq::index::sample(rng, vertices as usize, n + 1)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            f.sort_unstable();
            f
        })
        .collect();
    tops.sort();
    tops.dedup();
    Complex::from_maximal_simplices(&tops).expect("random faces are simplices")
}

fn fail(what: &str, c: &Complex, i: usize) -> String {
    format!(
        "{what} fails in degree {i} on complex with counts {:?}",
        c.counts()
    )
}

/// d∘d = 0, adjointness, the weight identity, the localization sum, the
/// link pairing and link Laplacian identities, and the local-global
/// identity, each on random cochains of every admissible degree.
pub fn check_complex_identities<R: Rng>(c: &Complex, rng: &mut R) -> Result<(), String> {
    let n = c.dim();
    if !c.check_weight_identity() {
        return Err(fail("coface weight sum", c, 0));
    }
    for i in 0..=n {
        let f = random_cochain(rng, i, c.count(i));
        let g = random_cochain(rng, i, c.count(i));

        if i + 2 <= n {
            let ddf = coboundary(c, &coboundary(c, &f).unwrap()).unwrap();
            if !ddf.is_zero() {
                return Err(fail("d∘d = 0", c, i));
            }
        }
        if i < n {
            let h = random_cochain(rng, i + 1, c.count(i + 1));
            let lhs = inner_product(c, &coboundary(c, &f).unwrap(), &h).unwrap();
            let rhs = inner_product(c, &f, &adjoint_delta(c, &h).unwrap()).unwrap();
            if lhs != rhs {
                return Err(fail("adjointness", c, i));
            }
        }

        let mut sum = Cochain::zeros(i, c.count(i));
        for &v in c.vertex_ids() {
            sum = sum.add(&rho_v(c, &f, v).unwrap()).unwrap();
        }
        if sum != f.scale(&int(i as i64 + 1)) {
            return Err(fail("sum of localizations", c, i));
        }

        if i < n {
            let lap = laplacian_apply(c, &f).unwrap();
            let mut local = BigRational::zero();
            for &v in c.vertex_ids() {
                let rf = rho_v(c, &f, v).unwrap();
                local += inner_product(c, &laplacian_apply(c, &rf).unwrap(), &rf).unwrap();
            }
            let global = int(i as i64) * inner_product(c, &lap, &f).unwrap()
                + int((n - i) as i64) * inner_product(c, &f, &f).unwrap();
            if local != global {
                return Err(fail("local-global identity", c, i));
            }
        }

        if i >= 1 {
            for &v in c.vertex_ids() {
                let link = c.link(&Simplex::new(vec![v]).unwrap()).unwrap();
                let lk = &link.complex;
                let (tf, tg) = (tau_v(c, &link, &f).unwrap(), tau_v(c, &link, &g).unwrap());
                let (rf, rg) = (rho_v(c, &f, v).unwrap(), rho_v(c, &g, v).unwrap());
                if inner_product(lk, &tf, &tg).unwrap() != inner_product(c, &rf, &rg).unwrap() {
                    return Err(fail("link pairing", c, i));
                }
                if i < n {
                    let global = inner_product(c, &laplacian_apply(c, &rf).unwrap(), &rf).unwrap();
                    let local = inner_product(lk, &laplacian_apply(lk, &tf).unwrap(), &tf).unwrap();
                    if global != local {
                        return Err(fail("link Laplacian", c, i));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `f` with its values on vertices of type `alpha` multiplied by `r`.
pub fn type_scaled(b: &TypedBuilding, f: &Cochain, alpha: u8, r: &BigRational) -> Cochain {
    let values = b
        .complex
        .simplices(0)
        .zip(f.values())
        .map(|(s, x)| {
            if b.vertex_type(s[0]) == alpha {
                x * r
            } else {
                x.clone()
            }
        })
        .collect();
    Cochain::new(0, values)
}

/// Certified rational roots, each confirmed by exact evaluation.
pub fn rational_roots(p: &RatPoly) -> Vec<BigRational> {
    let iso = isolate_real_roots(p, &q(1, 1_000_000)).unwrap();
    let roots: Vec<BigRational> = iso.roots().iter().filter_map(|r| r.exact.clone()).collect();
    assert!(roots.iter().all(|x| p.eval(x).is_zero()));
    roots
}

/// Type-averaging identity for every rational eigenvalue `c` of the
/// Laplacian on vertices and each `R` in {-1, 0, 1, 2, (l-c)/l}:
/// sum over types of (Δ f_α, f_α) = [(l-c)(R-1)^2 + c(R^2+l)] (f, f).
/// Returns the number of (eigencochain, R) pairs checked.
pub fn check_type_averaging(b: &TypedBuilding, max_vectors: usize) -> Result<usize, String> {
    let c = &b.complex;
    let ell = int(b.ell as i64);
    let m = assemble_matrix(c, 0).unwrap();
    let p = minimal_polynomial(&m, c.count(0), 0).unwrap();
    let mut checked = 0;
    for ev in rational_roots(&p) {
        let basis = eigenspace_basis(&m, &ev);
        if basis.is_empty() {
            return Err(format!("no eigencochain for root {ev}"));
        }
        for vec in basis.into_iter().take(max_vectors) {
            let f = Cochain::new(0, vec);
            if laplacian_apply(c, &f).unwrap() != f.scale(&ev) {
                return Err(format!("recovered vector is not an eigencochain for {ev}"));
            }
            let ff = inner_product(c, &f, &f).unwrap();
            for r in [int(-1), int(0), int(1), int(2), (&ell - &ev) / &ell] {
                let mut lhs = BigRational::zero();
                for alpha in 0..=b.ell as u8 {
                    let fa = type_scaled(b, &f, alpha, &r);
                    lhs += inner_product(c, &laplacian_apply(c, &fa).unwrap(), &fa).unwrap();
                }
                let one = BigRational::one();
                let rhs = ((&ell - &ev) * (&r - &one) * (&r - &one) + &ev * (&r * &r + &ell)) * &ff;
                if lhs != rhs {
                    return Err(format!("type averaging fails for c = {ev}, R = {r}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// For f in C^0 and every type α:
/// (ρ_α d f_α, d f_α) = (d f_α, d f_α) - ((1-ρ_α) d f, d f) and, when the
/// building has rank at least 2,
/// (Δ ρ_α d f_α, ρ_α d f_α) = ((1-ρ_α) d f, d f).
pub fn check_type_localization<R: Rng>(
    b: &TypedBuilding,
    rng: &mut R,
    r: &BigRational,
) -> Result<(), String> {
    let c = &b.complex;
    let f = random_cochain(rng, 0, c.count(0));
    let df = coboundary(c, &f).unwrap();
    for alpha in 0..=b.ell as u8 {
        let dfa = coboundary(c, &type_scaled(b, &f, alpha, r)).unwrap();
        let ra = rho_alpha(b, &dfa, alpha).unwrap();
        let off = df.sub(&rho_alpha(b, &df, alpha).unwrap()).unwrap();
        let off_norm = inner_product(c, &off, &df).unwrap();
        if inner_product(c, &ra, &dfa).unwrap() != inner_product(c, &dfa, &dfa).unwrap() - &off_norm
        {
            return Err(format!(
                "first type-localization identity fails for type {alpha}"
            ));
        }
        if b.ell >= 2
            && inner_product(c, &laplacian_apply(c, &ra).unwrap(), &ra).unwrap() != off_norm
        {
            return Err(format!(
                "second type-localization identity fails for type {alpha}"
            ));
        }
    }
    Ok(())
}

/// (Δ ρ_v f, ρ_v f) <= bound · (ρ_v f, f) for every vertex.
pub fn check_localized_rayleigh<R: Rng>(
    c: &Complex,
    rng: &mut R,
    i: usize,
    bound: &BigRational,
) -> Result<(), String> {
    let f = random_cochain(rng, i, c.count(i));
    for &v in c.vertex_ids() {
        let rf = rho_v(c, &f, v).unwrap();
        let lhs = inner_product(c, &laplacian_apply(c, &rf).unwrap(), &rf).unwrap();
        let rhs = bound * inner_product(c, &rf, &f).unwrap();
        if lhs > rhs {
            return Err(format!("localized Rayleigh bound fails at vertex {v}"));
        }
    }
    Ok(())
}
