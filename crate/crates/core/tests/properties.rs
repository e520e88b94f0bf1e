use eigenscape::affinity::{affinity_matrix, alpha, heat_apply, AffinityOptions, TimeMode, TimeScale};
use eigenscape::graphs::{erdos_renyi, laplacian, LaplacianKind};
use eigenscape::io::{matrix_to_csv, parse_matrix_csv, parse_point_cloud};
use eigenscape::spectra::{eigh, laplacian_basis, EigenBasis};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn graph_basis(n: usize, seed: u64, kind: LaplacianKind) -> Option<EigenBasis> {
    let k = erdos_renyi(n, 0.5, seed).ok()?;
    let l = laplacian(&k, kind).ok()?;
    laplacian_basis(&l, 1e-14).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_stays_in_unit_interval(seed in 0u64..1000, n in 5usize..25, unnorm in any::<bool>()) {
        let kind = if unnorm { LaplacianKind::Unnormalized } else { LaplacianKind::Normalized };
        if let Some(b) = graph_basis(n, seed, kind) {
            let a = affinity_matrix(&b, &(0..n).collect::<Vec<_>>(), AffinityOptions::default()).unwrap();
            prop_assert!(a.min_raw() >= -1e-9 && a.max_raw() <= 1.0 + 1e-9);
            prop_assert_eq!(a.asymmetry(), 0.0);
        }
    }

    #[test]
    fn matrix_agrees_with_pairwise_alpha(seed in 0u64..1000, t0 in prop::option::of(0.01f64..5.0)) {
        if let Some(b) = graph_basis(12, seed, LaplacianKind::Normalized) {
            let mode = t0.map_or(TimeMode::Adaptive, TimeMode::Fixed);
            let subset = [0, 3, 5, 11];
            let opts = AffinityOptions { mode, ..AffinityOptions::default() };
            let a = affinity_matrix(&b, &subset, opts).unwrap();
            for (r, &i) in subset.iter().enumerate() {
                for (c, &j) in subset.iter().enumerate() {
                    let v = alpha(&b, i, j, mode).unwrap().value;
                    prop_assert!((a.entries()[(r, c)] - v).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn heat_semigroup(seed in 0u64..1000, t in 0.0f64..3.0, s in 0.0f64..3.0) {
        if let Some(b) = graph_basis(15, seed, LaplacianKind::Unnormalized) {
            let f = DVector::from_fn(15, |i, _| ((i * 7 + seed as usize) % 11) as f64 - 5.0);
            let ts = TimeScale::new(t).unwrap();
            let ss = TimeScale::new(s).unwrap();
            let two = heat_apply(&b, &heat_apply(&b, &f, ts).unwrap(), ss).unwrap();
            let one = heat_apply(&b, &f, TimeScale::new(t + s).unwrap()).unwrap();
            prop_assert!((two - one).amax() < 1e-8);
            let id = heat_apply(&b, &f, TimeScale::new(0.0).unwrap()).unwrap();
            prop_assert!((id - &f).amax() < 1e-9);
        }
    }

    #[test]
    fn eigh_permutation_invariant(seed in 0u64..1000, n in 2usize..20) {
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j) as u64, i.max(j) as u64);
            ((a * 31 + b * 17 + seed) % 23) as f64 - 11.0
        });
        let perm: Vec<usize> = (0..n).map(|i| (i * 5 + seed as usize) % n).collect();
        let mut seen = perm.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assume!(seen.len() == n);
        let p = DMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
        let a = eigh(&m, 1e-14).unwrap();
        let b = eigh(&p, 1e-14).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        prop_assert!(a.reconstruction_error(&m) <= 1e-8 * m.amax().max(1.0));
    }

    #[test]
    fn matrix_csv_is_lossless(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let m = DMatrix::from_fn(rows, cols, |i, j| {
            let bits = seed.rotate_left((i * 7 + j) as u32) ^ 0x5555_5555;
            f64::from_bits(bits >> 2) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 }
        });
        prop_assume!(m.iter().all(|v| v.is_finite()));
        prop_assert_eq!(parse_matrix_csv(&matrix_to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn point_cloud_parser_never_panics(text in "[0-9eE.,;+\\- \n\t#a-z]{0,120}") {
        let _ = parse_point_cloud(&text, ',');
        let _ = parse_point_cloud(&text, ';');
    }
}
