use std::f64::consts::PI;

use katokit::calculus::{calderon_apply, invert, ContourSpec, HoloFn};
use katokit::grid::{load_field, make_bump, save_field, BoxRegion};
use katokit::kato::{kato_norm, AmalgamNormSpec, Exponent};
use katokit::psido::{families, operator_grid, quantize, schatten_norm, Tau};
use katokit::sobolev::h_norm;
use katokit::{ensemble, Complex64, Field, GridSpec, MultiOrder};
use proptest::prelude::*;

#[test]
fn field_file_roundtrip_preserves_norms() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::isotropic(2, 32, 2.0 * PI).unwrap();
    let u = ensemble::band_limited(&g, &mut ensemble::rng(3), 6, 1.0, false).unwrap();
    let path = dir.path().join("u.fld");
    save_field(&u, &path).unwrap();
    let v = load_field(&path).unwrap();
    assert_eq!(u.samples(), v.samples());
    let order = MultiOrder::uniform(1.0, g.blocks());
    assert_eq!(h_norm(&u, &order).unwrap(), h_norm(&v, &order).unwrap());
}

#[test]
fn h_norm_of_trigonometric_sum_matches_parseval() {
    // u = 2 + 3 cos(2x) on [0, 2 pi): coefficients 2 at k=0, 3/2 at k=+-2
    let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
    let u = Field::from_real_fn(&g, |x| 2.0 + 3.0 * (2.0 * x[0]).cos());
    let s = 1.5;
    let want = (2.0 * PI * (4.0 + 2.0 * 2.25 * 5f64.powf(s))).sqrt();
    let got = h_norm(&u, &MultiOrder::uniform(s, &[1])).unwrap();
    assert!((got - want).abs() < 1e-11 * want, "{got} vs {want}");
}

#[test]
fn inversion_and_calculus_agree_with_pointwise_values() {
    let g = GridSpec::isotropic(1, 128, 2.0 * PI).unwrap();
    let u = Field::from_real_fn(&g, |x| 2.0 + x[0].cos());
    let inv = invert(&u, &ContourSpec::default()).unwrap();
    let direct = Field::from_fn(&g, |x| Complex64::new(1.0 / (2.0 + x[0].cos()), 0.0));
    assert!(inv.value.max_diff(&direct) < 1e-8);
    let e = calderon_apply(std::slice::from_ref(&u), &HoloFn::exp(), &ContourSpec::default()).unwrap();
    let direct = Field::from_fn(&g, |x| Complex64::new((2.0 + x[0].cos()).exp(), 0.0));
    assert!(e.value.max_diff(&direct) < 1e-8 * direct.sup_norm());
}

#[test]
fn schatten_norms_are_ordered_in_p() {
    let xs = operator_grid(1, 16).unwrap();
    let a = families::wave_packets(&xs, MultiOrder::uniform(2.0, &[1, 1]), &mut ensemble::rng(5), 3).unwrap();
    let op = quantize(&a, &Tau::scalar(1, 0.5).unwrap()).unwrap();
    let norms: Vec<f64> = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity]
        .into_iter()
        .map(|p| schatten_norm(&op, p).unwrap())
        .collect();
    assert!(norms.windows(2).all(|w| w[0] >= w[1] * (1.0 - 1e-12)), "{norms:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // the continuous scheme sums over every grid translate, so a grid shift
    // of u only permutes the terms
    #[test]
    fn kato_norm_is_shift_invariant(seed in 0u64..1000, shift in 0i64..64, p in prop::sample::select(vec![1.0, 2.0, 3.5])) {
        let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
        let u = ensemble::band_limited(&g, &mut ensemble::rng(seed), 8, 1.0, false).unwrap();
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 3.0), None).unwrap().field;
        let spec = AmalgamNormSpec::continuous(MultiOrder::uniform(1.0, &[1]), Exponent::Finite(p), chi).unwrap();
        let a = kato_norm(&u, &spec).unwrap();
        let b = kato_norm(&u.cyclic_shift(&[shift]), &spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn kato_norm_is_homogeneous(seed in 0u64..1000, c in 0.1f64..10.0) {
        let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
        let u = ensemble::band_limited(&g, &mut ensemble::rng(seed), 8, 1.0, false).unwrap();
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 3.0), None).unwrap().field;
        let spec = AmalgamNormSpec::continuous(MultiOrder::uniform(0.5, &[1]), Exponent::Infinity, chi).unwrap();
        let cu = Field::from_fn(&g, |_| Complex64::new(c, 0.0)).mul(&u).unwrap();
        let a = kato_norm(&u, &spec).unwrap();
        prop_assert!((kato_norm(&cu, &spec).unwrap() - c * a).abs() <= 1e-10 * c * a);
    }
}
