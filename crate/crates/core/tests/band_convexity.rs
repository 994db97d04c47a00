mod common;

use common::gp_sample;
use fbox_core::{
    check_band_convexity, generate_motivating_example, BoxplotOptions, FunctionalDepth,
    OutlierLabel, Refinement, UnivariateDepth, MOTIVATING_EXAMPLE_SEED,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bc_variants() -> Vec<(&'static str, BoxplotOptions)> {
    let inf_h = FunctionalDepth::Infimal(UnivariateDepth::Halfspace);
    vec![
        ("infimal-halfspace", BoxplotOptions::new(inf_h, None)),
        (
            "infimal-simplicial",
            BoxplotOptions::new(FunctionalDepth::Infimal(UnivariateDepth::Simplicial), None),
        ),
        ("erl", BoxplotOptions::new(inf_h, Some(Refinement::Erl))),
        ("area", BoxplotOptions::new(inf_h, Some(Refinement::Area))),
    ]
}

#[test]
fn infimal_depths_and_refinements_are_band_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let variants = bc_variants();
    for case in 0..200u64 {
        let n = rng.gen_range(10..=60);
        let log_h = [-4.0, -2.0, 0.0, 2.0][rng.gen_range(0..4)];
        let s = gp_sample(n, log_h, 51, case);
        for (name, opts) in &variants {
            for tau in [0.5, 0.25, 0.8] {
                let opts = BoxplotOptions { tau, ..*opts };
                let v = check_band_convexity(&s, &opts).unwrap();
                assert!(
                    v.is_empty(),
                    "{name}, case {case}, n {n}, log h {log_h}, tau {tau}: {v:?}"
                );
            }
        }
    }
}

#[test]
fn mbd_violates_band_convexity_on_motivating_example() {
    let ex = generate_motivating_example(MOTIVATING_EXAMPLE_SEED).unwrap();
    let v =
        check_band_convexity(&ex.sample, &BoxplotOptions::new(FunctionalDepth::MBD, None)).unwrap();
    assert!(!v.is_empty());
    assert!(
        v.iter().all(|&i| ex.labels[i] == OutlierLabel::Global),
        "{v:?}"
    );
    for (_, opts) in bc_variants() {
        assert!(check_band_convexity(&ex.sample, &opts).unwrap().is_empty());
    }
}
