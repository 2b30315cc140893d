//! Property tests for invariants that span modules.

use proptest::prelude::*;
use tribeta::ensembles::{read_matrix_csv, write_matrix_csv, EnsembleKind, MatrixHeader};
use tribeta::exact_n2::N2Density;
use tribeta::lowtemp::chi_from_normal;
use tribeta::pseudospectrum::{smin_at, smin_grid, GridBox};
use tribeta::randsrc::{par_realizations, RngStream};
use tribeta::spectralmap::{decompose, reconstruct_general, relative_distance};
use tribeta::{eigensolve, C64};

const KINDS: [EnsembleKind; 5] =
    [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde, EnsembleKind::LowTempD, EnsembleKind::LowTempG];

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn streams_do_not_depend_on_thread_count(seed in any::<u64>(), m in 1usize..40) {
        let draw = |s: RngStream| { let mut s = s; (s.normal01().to_bits(), s.chi(3.5).unwrap().to_bits()) };
        let a = pool(1).install(|| par_realizations(seed, m, draw));
        let b = pool(8).install(|| par_realizations(seed, m, draw));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn chi_variates_positive(seed in any::<u64>(), k in 0.01f64..500.0) {
        let mut s = RngStream::new(seed, 0);
        for _ in 0..50 {
            prop_assert!(s.chi(k).unwrap() > 0.0);
        }
    }

    #[test]
    fn samplers_regenerate_bit_exactly(seed in any::<u64>(), stream in any::<u64>(), n in 2usize..30, beta in 0.5f64..200.0, k in 0usize..5) {
        let kind = KINDS[k];
        let a = kind.sample(n, beta, &mut RngStream::new(seed, stream)).unwrap();
        let b = kind.sample(n, beta, &mut RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(&a, &b);
        if kind == EnsembleKind::SymmetricS {
            prop_assert_eq!(&a.transpose(), &a);
        }
        if kind == EnsembleKind::LowTempG {
            prop_assert!(a.sup.iter().all(|c| *c == C64::new(1.0 / beta.sqrt(), 0.0)));
        }
        let once = a.balance_to_btilde().unwrap();
        prop_assert_eq!(&once.balance_to_btilde().unwrap(), &once);
    }

    #[test]
    fn matrix_csv_round_trips(seed in any::<u64>(), n in 2usize..20, beta in 0.5f64..50.0) {
        let kind = EnsembleKind::GeneralT;
        let m = kind.sample(n, beta, &mut RngStream::new(seed, 3)).unwrap();
        let h = MatrixHeader { n, kind, beta, seed, stream: 3 };
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &h, &m).unwrap();
        let (h2, m2) = read_matrix_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(h2, h);
        prop_assert_eq!(m2, m);
    }

    #[test]
    fn spectral_round_trip(seed in any::<u64>(), n in 2usize..=16) {
        let m = EnsembleKind::GeneralT.sample_scaled(n, 2.0, &mut RngStream::new(seed, 0)).unwrap();
        let d = decompose(&m).unwrap();
        prop_assume!(!d.near_degenerate());
        prop_assert!(relative_distance(&m, &reconstruct_general(&d).unwrap()) < 1e-8);
    }

    #[test]
    fn chi_coupling_is_monotone(k in 10.0f64..1e6, a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(chi_from_normal(k, lo) <= chi_from_normal(k, hi));
        prop_assert!(chi_from_normal(k, lo) >= 0.0);
    }

    #[test]
    fn n2_densities_rotation_invariant_and_nonnegative(r in 0.0f64..15.0, phi in 0.0f64..6.3, beta in 10.0f64..300.0, k in 0usize..3) {
        let d = N2Density::new(KINDS[k], beta).unwrap();
        let z = C64::from_polar(r, phi);
        let v = d.density(z.norm()).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite());
        prop_assert_eq!(tribeta::exact_n2::density_n2(KINDS[k], z, beta).unwrap(), tribeta::exact_n2::density_n2(KINDS[k], C64::new(z.norm(), 0.0), beta).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn smin_grid_lipschitz_and_nested(seed in any::<u64>(), k in 0usize..3) {
        let m = KINDS[k].sample_scaled(20, 2.0, &mut RngStream::new(seed, 0)).unwrap();
        let g = smin_grid(&m, GridBox::square(1.2), 40, 40).unwrap();
        for iy in 0..40 {
            for ix in 0..39 {
                let dz = (g.point(ix + 1, iy) - g.point(ix, iy)).norm();
                prop_assert!((g.value(ix + 1, iy) - g.value(ix, iy)).abs() <= dz + 2e-3);
                let dz = (g.point(iy, ix + 1) - g.point(iy, ix)).norm();
                prop_assert!((g.value(iy, ix + 1) - g.value(iy, ix)).abs() <= dz + 2e-3);
            }
        }
        let (a, b) = (g.sublevel(0.05), g.sublevel(0.1));
        prop_assert!(a.iter().zip(&b).all(|(x, y)| !x || *y));
    }

    #[test]
    fn eigenvalues_lie_in_every_pseudospectrum(seed in any::<u64>(), n in 2usize..40, k in 0usize..3) {
        let m = KINDS[k].sample_scaled(n, 2.0, &mut RngStream::new(seed, 1)).unwrap();
        for z in eigensolve::eigenvalues_qr(&m).unwrap().eigenvalues {
            prop_assert!(smin_at(&m, z) < 1e-8 * (1.0 + m.frobenius()));
        }
    }
}
