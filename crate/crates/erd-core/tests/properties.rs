mod common;

use erd_core::field::{integrate_path, psi_with_tol};
use erd_core::skeleton::{blow_down, blow_up, canonical_form, equivalent, topology_key};
use erd_core::tree::{from_chart, parse_tree, to_chart, validate, write_tree, TreeShape};
use erd_core::words::{apply_redex, parse_word, ph_index_doubled, reduce, redexes};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn blow_up_then_down_is_equivalent(seed in any::<u64>()) {
        let t = common::random_tree(&mut common::rng(seed));
        let back = blow_down(&blow_up(&t)).unwrap();
        prop_assert!(validate(&back).is_valid());
        prop_assert!(equivalent(&t, &back));
        prop_assert_eq!(canonical_form(&t).unwrap(), canonical_form(&back).unwrap());
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let t = common::random_tree(&mut common::rng(seed));
        let text = write_tree(&t);
        let u = parse_tree(&text).unwrap();
        prop_assert!(equivalent(&t, &u));
        prop_assert_eq!(write_tree(&u), text);
    }

    #[test]
    fn chart_round_trips(seed in any::<u64>()) {
        let t = common::random_tree(&mut common::rng(seed));
        let z0 = Complex64::new(0.25, -0.5);
        let u = from_chart(&to_chart(&t, z0), &TreeShape::of(&t)).unwrap();
        prop_assert!(equivalent(&t, &u));
    }

    #[test]
    fn translation_keeps_class(seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let t = common::random_tree(&mut common::rng(seed));
        let u = t.translate(Complex64::new(re, im));
        prop_assert!(equivalent(&t, &u));
        prop_assert_eq!(topology_key(&t).unwrap(), topology_key(&u).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_confluent(seed in any::<u64>()) {
        let w = common::random_word(&mut common::rng(seed), 40);
        let normal = reduce(&w);
        prop_assert_eq!(reduce(&normal).letters, normal.letters.clone());
        prop_assert_eq!(ph_index_doubled(&normal), ph_index_doubled(&w));
        for i in redexes(&w) {
            prop_assert_eq!(reduce(&apply_redex(&w, i)).letters, normal.letters.clone());
        }
        let printed = parse_word(&w.to_string()).unwrap();
        prop_assert!(printed.cyclic_eq(&w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_path_independent(seed in any::<u64>(), x in -1.5..1.5f64, y in -1.5..1.5f64, bx in -1.5..1.5f64, by in -1.5..1.5f64) {
        let f = common::random_field(&mut common::rng(seed));
        let z = Complex64::new(x, y);
        let detour = Complex64::new(bx, by);
        let direct = psi_with_tol(&f, z, 1e-12).unwrap();
        let bent = integrate_path(&f, &[f.z0, detour, z], 1e-12).unwrap();
        let loop_ = integrate_path(&f, &[f.z0, detour, z, f.z0], 1e-12).unwrap();
        let size = 1.0 + direct.norm();
        prop_assert!((direct - bent).norm() <= 1e-9 * size, "{} vs {}", direct, bent);
        prop_assert!(loop_.norm() <= 1e-9 * size);
    }
}
