use fbox_core::{
    find_simplicial_md_witness, md_threshold_exists, median_set, UnivariateDepth, UnivariateSample,
};

/// Simplicial depth `1 - P(X < u)^2 - P(X > u)^2` of a discrete law.
fn simplicial(points: &[f64], weights: &[f64], u: f64) -> f64 {
    let lt: f64 = points
        .iter()
        .zip(weights)
        .filter(|(&x, _)| x < u)
        .map(|(_, w)| w)
        .sum();
    let gt: f64 = points
        .iter()
        .zip(weights)
        .filter(|(&x, _)| x > u)
        .map(|(_, w)| w)
        .sum();
    1.0 - lt * lt - gt * gt
}

#[test]
fn coarse_lattice_has_no_witness() {
    assert_eq!(find_simplicial_md_witness(3, 0.25).unwrap(), None);
    assert_eq!(find_simplicial_md_witness(2, 0.1).unwrap(), None);
}

#[test]
fn three_point_witness_is_frozen() {
    let w = find_simplicial_md_witness(3, 0.1)
        .unwrap()
        .expect("witness");
    assert_eq!(w.points, vec![0.0, 1.0, 2.0]);
    let expected = [0.3, 0.2, 0.5];
    for (a, b) in w.weights.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{:?}", w.weights);
    }
}

#[test]
fn witness_breaks_md_by_hand() {
    let (p, w) = ([0.0, 1.0, 2.0], [0.3, 0.2, 0.5]);
    // P(X <= 1) = P(X >= 2) = 1/2, so every u in [1, 2] is a median
    let inside = simplicial(&p, &w, 1.5);
    let outside = simplicial(&p, &w, 0.0);
    assert!((inside - 0.5).abs() < 1e-12);
    assert!((outside - 0.51).abs() < 1e-12);
    assert!(outside > inside);

    let q = UnivariateSample::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 2.0]).unwrap();
    let ms = median_set(&q);
    assert_eq!((ms.lo, ms.hi), (1.0, 2.0));
    assert!(!md_threshold_exists(UnivariateDepth::Simplicial, &q));
    assert!(md_threshold_exists(UnivariateDepth::Halfspace, &q));
}
