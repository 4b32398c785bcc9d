mod common;

use erd_core::field::{build_config_tree, diagonal_witnesses, integrate_path, BuildOptions};
use erd_core::skeleton::{blow_up, equivalent};
use erd_core::words::{ph_index, ph_index_doubled, reduce, word_at_infinity};
use num_complex::Complex64;

#[test]
fn counting_identities_on_random_fields() {
    let s = common::sweep(7, 100);
    for (f, t) in &s.accepted {
        let (r, d) = (f.r() as i64, f.d() as i64);
        let w = reduce(&word_at_infinity(&blow_up(t)).unwrap());
        let (h, e, ent) = w.counts();
        assert_eq!(ent as i64, 2 * d, "{w}");
        assert_eq!(h as i64 - e as i64, 2 * (d - r - 1), "{w}");
        assert_eq!(ph_index_doubled(&w), 2 * (2 + r), "{w}");
        assert_eq!(ph_index(&w), 2.0 + r as f64);
    }
    assert!(s.rejected < 25, "{} degenerate draws", s.rejected);
}

#[test]
fn affine_pullback_gives_equivalent_tree() {
    let s = common::sweep(11, 20);
    let a = Complex64::from_polar(1.2, 0.3);
    let b = Complex64::new(0.1, 0.2);
    for (f, t) in &s.accepted {
        let g = f.pullback_affine(a, b).unwrap();
        let u = build_config_tree(&g, &BuildOptions::default()).unwrap();
        assert!(equivalent(t, &u), "{:?} / {:?}", f.p.coeffs(), f.e.coeffs());
    }
}

#[test]
fn semi_residues_on_discovered_diagonals() {
    let s = common::sweep(13, 25);
    let mut checked = 0;
    for (f, t) in &s.accepted {
        let scale = t.value_scale();
        for w in diagonal_witnesses(f, &BuildOptions::default()).unwrap() {
            let got = integrate_path(f, &w.path_z, 1e-12).unwrap();
            let want = w.t_to - w.t_from;
            assert!((got - want).norm() <= 1e-6 * scale, "{got} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}
