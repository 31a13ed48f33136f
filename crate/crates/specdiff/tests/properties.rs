//! Randomized invariants. Case counts are kept modest; every failure seed
//! is persisted by proptest under proptest-regressions/.

use proptest::prelude::*;
use specdiff::spectral::{grid_transform, grid_transform_reference};
use specdiff::*;

fn series_values(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, min_len..=max_len)
        .prop_filter("non-constant", |v| v.iter().any(|x| *x != v[0]))
}

fn series_pair() -> impl Strategy<Value = (TimeSeries, TimeSeries)> {
    (series_values(8, 60), series_values(8, 60)).prop_map(|(a, b)| {
        (
            TimeSeries::new("a", a).unwrap(),
            TimeSeries::new("b", b).unwrap(),
        )
    })
}

/// Random matrix size plus off-diagonal entries, made pairwise distinct so
/// merge order is unambiguous and label-independent.
fn sized_entries(max_m: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=max_m).prop_flat_map(|m| {
        let pairs = m * (m - 1) / 2;
        (
            Just(m),
            prop::collection::vec(0.01f64..0.9, pairs).prop_map(|mut v| {
                v.sort_by(f64::total_cmp);
                for (i, x) in v.iter_mut().enumerate() {
                    *x += i as f64 * 1e-6;
                }
                v
            }),
        )
    })
}

fn matrix_from(m: usize, entries: &[f64], perm: &[usize]) -> DistanceMatrix {
    let labels: Vec<String> = (0..m).map(|i| format!("s{}", perm[i])).collect();
    let mut d = vec![vec![0.0; m]; m];
    let mut it = entries.iter();
    for i in 0..m {
        for j in i + 1..m {
            let v = *it.next().unwrap();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    DistanceMatrix::new(labels, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_bounded_and_argument_symmetric(
        a in series_values(8, 40),
        b in series_values(41, 70),
    ) {
        let a = TimeSeries::new("a", a).unwrap();
        let b = TimeSeries::new("b", b).unwrap();
        let d_ab = spectral_distance(&a, &b).unwrap();
        let d_ba = spectral_distance(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&d_ab));
        // unequal lengths: the comparison re-orders internally, so the
        // value is bitwise identical
        prop_assert_eq!(d_ab, d_ba);
    }

    #[test]
    fn statistic_is_invariant_under_common_rescaling(
        (a, b) in series_pair(),
        c in prop::sample::select(vec![1e-3f64, 0.1, 3.0, 1e4]),
    ) {
        let scale = |s: &TimeSeries, l: &str| {
            TimeSeries::new(l, s.values().iter().map(|v| c * v).collect()).unwrap()
        };
        let t0 = equality_test(&prepare_comparison(&a, &b, false), 0.05).unwrap();
        let t1 = equality_test(
            &prepare_comparison(&scale(&a, "ac"), &scale(&b, "bc"), false),
            0.05,
        )
        .unwrap();
        prop_assert!((t0.statistic - t1.statistic).abs() <= 1e-9 * t0.statistic.abs().max(1.0));
        prop_assert!((t0.p_value - t1.p_value).abs() <= 1e-9);
    }

    #[test]
    fn cross_periodogram_is_hermitian((a, b) in series_pair(), k in 1usize..20) {
        let lambda = 2.0 * std::f64::consts::PI * k as f64 / 41.0;
        let ab = cross_periodogram(&a, &b, lambda);
        let ba = cross_periodogram(&b, &a, lambda);
        prop_assert!((ab - ba.conj()).norm() <= 1e-12 * ab.norm().max(1e-30));
    }

    #[test]
    fn full_grid_periodogram_satisfies_parseval(v in series_values(8, 80)) {
        let x = TimeSeries::new("x", v).unwrap();
        let total: f64 = periodogram_full_grid(&x).iter().sum();
        let energy: f64 =
            x.values().iter().map(|v| v * v).sum::<f64>() / (2.0 * std::f64::consts::PI);
        prop_assert!((total - energy).abs() <= 1e-10 * energy);
    }

    #[test]
    fn fast_grid_matches_direct_summation(v in series_values(8, 80), n1 in 8usize..60) {
        let n1 = n1.min(v.len());
        let fast = grid_transform(&v, n1);
        let slow = grid_transform_reference(&v, n1);
        for (f, s) in fast.iter().zip(&slow) {
            prop_assert!((f - s).norm() <= 1e-10 * s.norm().max(1e-9));
        }
    }

    #[test]
    fn centering_kills_the_mean((a, b) in series_pair()) {
        let input = prepare_comparison(&a, &b, true);
        for s in [input.short(), input.long()] {
            let mean = s.values().iter().sum::<f64>() / s.n() as f64;
            let scale = s.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(mean.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn confidence_intervals_nest((a, b) in series_pair()) {
        let input = prepare_comparison(&a, &b, false);
        match (
            confidence_interval_d2(&input, 0.01),
            confidence_interval_d2(&input, 0.10),
        ) {
            (Ok(wide), Ok(narrow)) => {
                prop_assert!(wide.0 <= narrow.0 + 1e-15);
                prop_assert!(narrow.1 <= wide.1 + 1e-15);
                prop_assert!(wide.0 >= 0.0);
            }
            // a zero variance estimate is refused at every level, never
            // at just one
            (Err(Error::DegenerateVariance(_)), Err(Error::DegenerateVariance(_))) => {}
            (w, n) => prop_assert!(false, "inconsistent refusal: {w:?} vs {n:?}"),
        }
    }

    #[test]
    fn rejection_agrees_with_p_value((a, b) in series_pair(), alpha in 0.001f64..0.5) {
        let input = prepare_comparison(&a, &b, false);
        let t = equality_test(&input, alpha).unwrap();
        prop_assert_eq!(t.reject, t.p_value < alpha);
        let p = precise_test(&input, 0.05, alpha).unwrap();
        prop_assert_eq!(p.reject, p.p_value < alpha);
    }

    #[test]
    fn swapping_unequal_series_is_bitwise_neutral(
        a in series_values(8, 40),
        b in series_values(41, 70),
    ) {
        let a = TimeSeries::new("a", a).unwrap();
        let b = TimeSeries::new("b", b).unwrap();
        let t_ab = equality_test(&prepare_comparison(&a, &b, false), 0.05).unwrap();
        let t_ba = equality_test(&prepare_comparison(&b, &a, false), 0.05).unwrap();
        prop_assert_eq!(t_ab.statistic.to_bits(), t_ba.statistic.to_bits());
        prop_assert_eq!(t_ab.p_value.to_bits(), t_ba.p_value.to_bits());
        prop_assert_ne!(t_ab.swapped, t_ba.swapped);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dendrogram_heights_are_nondecreasing(
        (m, entries) in sized_entries(7),
        linkage in prop::sample::select(vec![Linkage::Average, Linkage::Complete, Linkage::Single]),
    ) {
        let perm: Vec<usize> = (0..m).collect();
        let matrix = matrix_from(m, &entries, &perm);
        let tree = agglomerate(&matrix, linkage);
        let heights = tree.heights();
        prop_assert_eq!(heights.len(), m - 1);
        prop_assert!(heights.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        for k in 1..=m {
            let groups = tree.cut(k).unwrap();
            prop_assert_eq!(groups.len(), k);
            let total: usize = groups.iter().map(|g| g.len()).sum();
            prop_assert_eq!(total, m);
        }
    }

    #[test]
    fn agglomeration_is_permutation_isomorphic(
        (m, entries) in sized_entries(6),
        swap in (0usize..6, 1usize..6),
    ) {
        let identity: Vec<usize> = (0..m).collect();
        let mut permuted = identity.clone();
        let (i, j) = (swap.0 % m, (swap.0 + swap.1) % m);
        permuted.swap(i, j);
        // same metric space, relabeled: s{perm[i]} keeps the distances of
        // row i, so permuting rows and labels together is isomorphic
        let base = matrix_from(m, &entries, &identity);
        let relabeled = {
            let labels: Vec<String> = (0..m).map(|i| format!("s{}", permuted[i])).collect();
            let mut d = vec![vec![0.0; m]; m];
            let inv: Vec<usize> = {
                let mut inv = vec![0; m];
                for (pos, &orig) in permuted.iter().enumerate() {
                    inv[orig] = pos;
                }
                inv
            };
            for a in 0..m {
                for b in 0..m {
                    d[inv[a]][inv[b]] = base.value(a, b);
                }
            }
            DistanceMatrix::new(labels, d).unwrap()
        };
        for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let t1 = agglomerate(&base, linkage);
            let t2 = agglomerate(&relabeled, linkage);
            let (h1, h2) = (t1.heights(), t2.heights());
            for (a, b) in h1.iter().zip(&h2) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            for k in 1..=m {
                prop_assert_eq!(t1.cut(k).unwrap(), t2.cut(k).unwrap());
            }
        }
    }
}

proptest! {
    #[test]
    fn deduped_labels_are_unique_and_stable(labels in prop::collection::vec("[a-z_][a-z0-9_]{0,6}", 1..12)) {
        let out = dedupe_labels(&labels);
        prop_assert_eq!(out.len(), labels.len());
        let unique: std::collections::BTreeSet<_> = out.iter().collect();
        prop_assert_eq!(unique.len(), out.len());
        for (orig, got) in labels.iter().zip(&out) {
            prop_assert!(got.starts_with(orig.as_str()));
        }
        // already-unique inputs pass through untouched
        let again = dedupe_labels(&out);
        prop_assert_eq!(again, out);
    }

    #[test]
    fn tree_json_label_round_trips(label in "\\PC{0,20}") {
        let tree = Dendrogram {
            root: Node::Internal {
                left: Box::new(Node::Leaf {
                    label: label.clone(),
                }),
                right: Box::new(Node::Leaf {
                    label: format!("{label}_peer"),
                }),
                height: 0.25,
            },
        };
        let text = export_dendrogram(&tree, TreeFormat::Json);
        let back = parse_dendrogram_json(&text).unwrap();
        prop_assert_eq!(back.leaf_labels(), tree.leaf_labels());
    }

    #[test]
    fn kolmogorov_sf_is_a_survival_function(x in 0.0f64..3.0, dx in 0.001f64..1.0) {
        let a = kolmogorov_sf(x);
        let b = kolmogorov_sf(x + dx);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-12);
    }
}
