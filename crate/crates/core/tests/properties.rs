mod common;

use garland::building::flag_complex;
use garland::complex::{Complex, Simplex};
use garland::gf::field_of_order;
use garland::laplace::assemble_matrix;
use garland::spectra::{extract_extremes, isolate_real_roots, minimal_polynomial, RootValue};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{int, q};

fn pure_complex() -> impl Strategy<Value = Complex> {
    (1usize..=3, 4u32..=12).prop_flat_map(|(n, v)| {
        let verts: Vec<u32> = (0..v).collect();
        prop::collection::btree_set(prop::sample::subsequence(verts, n + 1), 1..=8).prop_map(
            |faces| {
                let faces: Vec<Vec<u32>> = faces.into_iter().collect();
                Complex::from_maximal_simplices(&faces).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn identities_on_random_pure_complexes(c in pure_complex(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(common::check_complex_identities(&c, &mut rng), Ok(()));
    }

    #[test]
    fn laplacian_is_positive_semidefinite(c in pure_complex(), seed in any::<u64>()) {
        use garland::laplace::{coboundary, inner_product, laplacian_apply};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..c.dim() {
            let f = common::random_cochain(&mut rng, i, c.count(i));
            let g = common::random_cochain(&mut rng, i, c.count(i));
            let df = coboundary(&c, &f).unwrap();
            let lf = laplacian_apply(&c, &f).unwrap();
            let lg = laplacian_apply(&c, &g).unwrap();
            prop_assert_eq!(inner_product(&c, &lf, &f).unwrap(), inner_product(&c, &df, &df).unwrap());
            prop_assert_eq!(inner_product(&c, &lf, &g).unwrap(), inner_product(&c, &f, &lg).unwrap());
            prop_assert!(inner_product(&c, &df, &df).unwrap() >= int(0));
        }
    }
}

#[test]
fn rank_one_buildings() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for qq in [2u64, 3, 4, 5, 7] {
        let b = flag_complex(1, &field_of_order(qq).unwrap()).unwrap();
        for _ in 0..3 {
            common::check_complex_identities(&b.complex, &mut rng).unwrap();
        }
        assert!(common::check_type_averaging(&b, 4).unwrap() > 0);
        for r in [int(-1), int(0), int(1), int(2), q(1, 3)] {
            common::check_type_localization(&b, &mut rng, &r).unwrap();
        }
    }
}

#[test]
fn rank_two_building() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let b = flag_complex(2, &field_of_order(2).unwrap()).unwrap();
    common::check_complex_identities(&b.complex, &mut rng).unwrap();
    assert!(common::check_type_averaging(&b, 4).unwrap() > 0);
    for r in [int(-1), int(0), int(1), int(2), q(-5, 7)] {
        common::check_type_localization(&b, &mut rng, &r).unwrap();
    }
}

#[test]
fn localized_rayleigh_bound_on_rank_two_building() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let b = flag_complex(2, &field_of_order(2).unwrap()).unwrap();
    let c = &b.complex;
    let mut lmax = int(0);
    for &v in c.vertex_ids() {
        let link = c.link(&Simplex::new(vec![v]).unwrap()).unwrap();
        let m = assemble_matrix(&link.complex, 0).unwrap();
        let p = minimal_polynomial(&m, m.rows(), 0).unwrap();
        let mut iso = isolate_real_roots(&p, &q(1, 1000)).unwrap();
        let (_, big) = extract_extremes(&mut iso).unwrap();
        let RootValue::Exact(big) = big else {
            panic!("link of {v} has irrational top eigenvalue")
        };
        lmax = lmax.max(big);
    }
    assert_eq!(lmax, int(2));
    for _ in 0..4 {
        common::check_localized_rayleigh(c, &mut rng, 1, &lmax).unwrap();
    }
}
