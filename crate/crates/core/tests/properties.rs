//! Property-based invariants across modules.

use cocite::factor::{pca_from_correlation, varimax_traced, FactorCount};
use cocite::ingest::{
    parse_cooccurrence_csv, parse_occurrence_csv, parse_records, serialize_cooccurrence_csv, serialize_occurrence_csv,
    serialize_records,
};
use cocite::layout::{export_pajek, import_pajek, kamada_kawai, Edge, KamadaKawaiConfig, WeightedGraph};
use cocite::linalg::eigen_symmetric;
use cocite::mds::{mds, monotone_regression, pava, procrustes_align, MdsConfig};
use cocite::proximity::{cosine_columns, euclidean_columns, jaccard_columns, pearson_columns, shift_pearson};
use cocite::{cooccurrence, DiagonalPolicy, MeasurementLevel, OccurrenceMatrix, ProximityKind, ProximityMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn occurrence(max_docs: usize, max_attrs: usize, max_count: u64) -> impl Strategy<Value = OccurrenceMatrix> {
    (1..=max_docs, 2..=max_attrs).prop_flat_map(move |(d, a)| {
        prop::collection::vec(0..=max_count, d * a).prop_map(move |v| {
            OccurrenceMatrix::new(names("d", d), names("a", a), DMatrix::from_row_slice(d, a, &v)).unwrap()
        })
    })
}

/// Occurrence matrices where no column is constant, so correlations exist.
fn varied_occurrence() -> impl Strategy<Value = OccurrenceMatrix> {
    occurrence(10, 6, 3).prop_filter("constant column", |a| {
        (0..a.n_attrs()).all(|c| (1..a.n_docs()).any(|r| a.get(r, c) != a.get(0, c)))
    })
}

fn points(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (4..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0..10.0f64, n * 2).prop_map(move |v| DMatrix::from_row_slice(n, 2, &v))
    })
}

fn distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, n, |i, j| (x.row(i) - x.row(j)).norm())
}

fn connected_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..10).prop_flat_map(|n| {
        let tree = prop::collection::vec((0.0..1.0f64, 1u32..50), n - 1);
        let extra = prop::collection::vec((0..n, 0..n, 1u32..50), 0..n);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<Edge> = tree
                .iter()
                .enumerate()
                .map(|(k, &(u, w))| {
                    let j = k + 1;
                    Edge { i: ((u * j as f64) as usize).min(j - 1), j, weight: f64::from(w) }
                })
                .collect();
            for (a, b, w) in extra {
                let (i, j) = (a.min(b), a.max(b));
                if i != j && !edges.iter().any(|e| e.i == i && e.j == j) {
                    edges.push(Edge { i, j, weight: f64::from(w) / 4.0 });
                }
            }
            WeightedGraph::new(names("v", n), edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cooccurrence_is_symmetric_with_support_diagonal(a in occurrence(12, 8, 3)) {
        let c = cooccurrence(&a, DiagonalPolicy::Raw);
        for i in 0..a.n_attrs() {
            let support = (0..a.n_docs()).filter(|&d| a.get(d, i) > 0).count() as u64;
            prop_assert_eq!(c.get(i, i), support);
            for j in 0..a.n_attrs() {
                prop_assert_eq!(c.get(i, j), c.get(j, i));
                prop_assert!(c.get(i, j) <= c.get(i, i));
            }
        }
        let z = cooccurrence(&a, DiagonalPolicy::Zeroed);
        prop_assert!((0..a.n_attrs()).all(|i| z.get(i, i) == 0));
    }

    #[test]
    fn pearson_is_bounded_symmetric_unit_diagonal(a in varied_occurrence()) {
        let r = pearson_columns(&a).unwrap();
        let p = a.n_attrs();
        for i in 0..p {
            prop_assert_eq!(r.get(i, i), 1.0);
            for j in 0..p {
                prop_assert!(r.get(i, j).abs() <= 1.0 + 1e-12);
                prop_assert_eq!(r.get(i, j), r.get(j, i));
            }
        }
    }

    #[test]
    fn shift_preserves_order(a in varied_occurrence()) {
        let r = pearson_columns(&a).unwrap();
        let s = shift_pearson(&r).unwrap();
        let p = a.n_attrs();
        let cells: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..p).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        for &(i, j) in &cells {
            prop_assert!((0.0..=1.0).contains(&s.get(i, j)));
            for &(k, l) in &cells {
                // strict beyond rounding: r + 1 can merge values one ulp apart
                if r.get(i, j) < r.get(k, l) {
                    prop_assert!(s.get(i, j) <= s.get(k, l));
                }
                if r.get(i, j) + 1e-12 < r.get(k, l) {
                    prop_assert!(s.get(i, j) < s.get(k, l));
                }
            }
        }
    }

    #[test]
    fn cosine_and_jaccard_in_unit_interval(a in occurrence(10, 6, 4)) {
        let j = jaccard_columns(&a);
        prop_assert!(j.values().iter().all(|v| (0.0..=1.0).contains(v)));
        if let Ok(c) = cosine_columns(&a) {
            prop_assert!(c.values().iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
        }
    }

    #[test]
    fn euclidean_triangle_inequality(a in occurrence(10, 7, 5)) {
        let e = euclidean_columns(&a);
        let p = a.n_attrs();
        for i in 0..p {
            for j in 0..p {
                for k in 0..p {
                    prop_assert!(e.get(i, k) <= e.get(i, j) + e.get(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn pava_is_monotone_and_mean_preserving(
        v in prop::collection::vec((-100.0..100.0f64, 0.1..5.0f64), 1..40)
    ) {
        let (y, w): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let fit = pava(&y, &w);
        prop_assert!(fit.windows(2).all(|p| p[0] <= p[1] + 1e-12));
        let before: f64 = y.iter().zip(&w).map(|(a, b)| a * b).sum();
        let after: f64 = fit.iter().zip(&w).map(|(a, b)| a * b).sum();
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before.abs()));
    }

    #[test]
    fn monotone_regression_follows_key_order(
        v in prop::collection::vec((0.0..10.0f64, 0u8..6), 2..30)
    ) {
        let targets: Vec<f64> = v.iter().map(|p| p.0).collect();
        let keys: Vec<f64> = v.iter().map(|p| f64::from(p.1)).collect();
        let fit = monotone_regression(&targets, &keys, &vec![1.0; v.len()]);
        for i in 0..v.len() {
            for j in 0..v.len() {
                if keys[i] < keys[j] {
                    prop_assert!(fit[i] <= fit[j] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigen_reconstructs_symmetric_matrices(
        v in (2usize..12).prop_flat_map(|n| prop::collection::vec(-5.0..5.0f64, n * n).prop_map(move |v| (n, v)))
    ) {
        let (n, v) = v;
        let a = DMatrix::from_row_slice(n, n, &v);
        let s = &a + a.transpose();
        let e = eigen_symmetric(&s).unwrap();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&e.values));
        let back = &e.vectors * lam * e.vectors.transpose();
        prop_assert!((&s - back).amax() < 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let qtq = e.vectors.transpose() * &e.vectors;
        prop_assert!((qtq - DMatrix::identity(n, n)).amax() < 1e-9);
    }

    #[test]
    fn varimax_keeps_communalities(a in varied_occurrence().prop_filter("three columns", |a| a.n_attrs() >= 3)) {
        let r = pearson_columns(&a).unwrap();
        let l = pca_from_correlation(a.col_labels(), r.values(), FactorCount::Fixed(2)).unwrap();
        let (rot, trace) = varimax_traced(&l, true, 1e-6).unwrap();
        for (x, y) in l.communalities().iter().zip(rot.communalities()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!(trace.criterion_history.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        let t = &trace.rotation;
        prop_assert!((t.transpose() * t - DMatrix::identity(2, 2)).amax() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planar_points_are_recovered(x in points(10)) {
        let d = distances(&x);
        prop_assume!(d.iter().filter(|v| **v > 0.0).fold(f64::INFINITY, |m, v| m.min(*v)) > 0.5);
        let p = ProximityMatrix::new(names("p", x.nrows()), d, ProximityKind::Dissimilarity, MeasurementLevel::Ratio).unwrap();
        let c = mds(&p, &MdsConfig::default()).unwrap();
        prop_assert!(c.stress < 1e-6, "stress {}", c.stress);
        prop_assert!(procrustes_align(&x, &c.coords).unwrap().congruence > 0.999);
    }

    #[test]
    fn stress_never_increases(x in points(9), level in 0usize..3) {
        let n = x.nrows();
        let mut d = distances(&x);
        for i in 0..n {
            for j in (i + 1)..n {
                let bumped = d[(i, j)] * (1.0 + 0.3 * ((i * 7 + j * 3) % 5) as f64);
                d[(i, j)] = bumped;
                d[(j, i)] = bumped;
            }
        }
        prop_assume!(d.amax() > 0.0);
        let level = [MeasurementLevel::Ratio, MeasurementLevel::Interval, MeasurementLevel::Ordinal][level];
        let p = ProximityMatrix::new(names("p", n), d, ProximityKind::Dissimilarity, level).unwrap();
        let c = mds(&p, &MdsConfig::default()).unwrap();
        prop_assert!(c.stress_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!((0.0..=1.0).contains(&c.stress));
    }

    #[test]
    fn layout_energy_does_not_rise(g in connected_graph()) {
        let r = kamada_kawai(&g, &KamadaKawaiConfig::default()).unwrap();
        prop_assert!(r.final_energy <= r.initial_energy);
        prop_assert!(r.positions.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
    }

    #[test]
    fn pajek_round_trip(g in connected_graph()) {
        let (back, _) = import_pajek(&export_pajek(&g, None)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn matrix_csv_round_trips(a in occurrence(8, 6, 9)) {
        prop_assert_eq!(parse_occurrence_csv(&serialize_occurrence_csv(&a).unwrap()).unwrap(), a.clone());
        let c = cooccurrence(&a, DiagonalPolicy::Raw);
        prop_assert_eq!(parse_cooccurrence_csv(&serialize_cooccurrence_csv(&c).unwrap(), DiagonalPolicy::Raw).unwrap(), c);
    }

    #[test]
    fn records_round_trip(a in occurrence(8, 6, 4)) {
        prop_assume!((0..a.n_attrs()).all(|c| (0..a.n_docs()).any(|r| a.get(r, c) > 0)));
        prop_assert_eq!(parse_records(&serialize_records(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn record_parser_is_total(s in "\\PC*", bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_records(&s);
        let _ = parse_records(&String::from_utf8_lossy(&bytes));
        let _ = parse_records(&s.replace('x', "\t").replace('y', ";").replace('z', ":"));
    }
}
