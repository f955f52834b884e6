mod common;

use common::{corpus_1d, modes, projected_hg, rel_l2, resonant};
use homsob::field::{quadrature_lp_norm, Field, GridSpec};
use homsob::multiplier::{
    apply_multiplier, derivative, frac_laplacian, gradient, riesz_potential, riesz_transform, MultiplierSpec,
};
use proptest::prelude::*;

fn library_symbol(code: u8, x: f64) -> MultiplierSpec {
    match code % 4 {
        0 => MultiplierSpec::power(x),
        1 => MultiplierSpec::riesz(0),
        2 => MultiplierSpec::derivative(&[1, 0]),
        _ => MultiplierSpec::riesz(1),
    }
}

fn max_rel(a: &Field, b: &Field) -> f64 {
    a.max_diff(b).unwrap() / b.max_abs().max(1e-300)
}

#[test]
fn inverse_identity_on_corpus() {
    for f in corpus_1d() {
        for s in [0.3, 0.5, 0.9] {
            let back = riesz_potential(&frac_laplacian(&f, s).unwrap(), s).unwrap();
            assert!(rel_l2(&back, &f) <= 1e-10, "s = {s}");
        }
    }
}

#[test]
fn potential_then_laplacian_of_higher_order() {
    let g = GridSpec::desk(1).unwrap();
    let f = projected_hg(&g, 6, 0.5);
    let (s, t) = (0.4, 1.7);
    let lhs = riesz_potential(&frac_laplacian(&f, t).unwrap(), s).unwrap();
    let rhs = frac_laplacian(&f, t - s).unwrap();
    assert!(rel_l2(&lhs, &rhs) <= 1e-10);
}

#[test]
fn riesz_identity_in_the_plane() {
    let g = GridSpec::desk(2).unwrap();
    let phi = projected_hg(&g, 4, 0.8);
    for s in [1.2, 2.5] {
        let lifted = frac_laplacian(&phi, s - 1.0).unwrap();
        let grad = gradient(&lifted).unwrap();
        let top = frac_laplacian(&phi, s).unwrap();
        let lhs: Vec<f64> = (0..g.len())
            .map(|i| grad.iter().map(|gj| gj.value_at(i).norm_sqr()).sum())
            .collect();
        let rhs: Vec<f64> = {
            let r: Vec<Field> = (1..=2).map(|j| riesz_transform(&top, j).unwrap()).collect();
            (0..g.len())
                .map(|i| r.iter().map(|rj| rj.value_at(i).norm_sqr()).sum())
                .collect()
        };
        let dev: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).sum();
        let total: f64 = rhs.iter().sum();
        assert!(dev / total <= 1e-10, "s = {s}: {}", dev / total);
    }
}

#[test]
fn riesz_squares_are_minus_identity() {
    let g = GridSpec::desk(2).unwrap();
    let f = projected_hg(&g, 3, 0.8);
    let mut sum = Field::zeros(g);
    for j in 1..=2 {
        let r2 = riesz_transform(&riesz_transform(&f, j).unwrap(), j).unwrap();
        sum = sum.add(&r2).unwrap();
    }
    assert!(sum.max_diff(&f.scale(-1.0)).unwrap() <= 1e-12 * f.max_abs());
    assert!(riesz_transform(&f, 3).is_err());
}

#[test]
fn adding_a_constant_is_invisible() {
    let g = GridSpec::desk(1).unwrap();
    let f = common::quantize(&projected_hg(&g, 4, 0.5));
    for s in [0.5, 1.0, 2.5] {
        let a = frac_laplacian(&f, s).unwrap();
        let b = frac_laplacian(&f.add_constant(3.0), s).unwrap();
        assert_eq!(a, b, "s = {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_commutes_and_associates(
        c1 in 0u8..4, c2 in 0u8..4, c3 in 0u8..4,
        x1 in 0.1f64..2.5, x2 in 0.1f64..2.5, x3 in 0.1f64..2.5,
        m in modes(2, 6),
    ) {
        let g = GridSpec::new(2, 10.0, 32).unwrap();
        let f = resonant(&g, &m);
        let (a, b, c) = (library_symbol(c1, x1), library_symbol(c2, x2), library_symbol(c3, x3));
        let ab = apply_multiplier(&apply_multiplier(&f, &a).unwrap(), &b).unwrap();
        let ba = apply_multiplier(&apply_multiplier(&f, &b).unwrap(), &a).unwrap();
        let fused = apply_multiplier(&f, &a.compose(&b)).unwrap();
        let scale = fused.max_abs().max(1e-12 * f.max_abs());
        prop_assert!(ab.max_diff(&ba).unwrap() <= 1e-12 * scale);
        prop_assert!(ab.max_diff(&fused).unwrap() <= 1e-12 * scale);
        let left = apply_multiplier(&f, &a.compose(&b).compose(&c)).unwrap();
        let right = apply_multiplier(&f, &a.compose(&b.compose(&c))).unwrap();
        prop_assert!(left.max_diff(&right).unwrap() <= 1e-12 * left.max_abs().max(1e-12 * f.max_abs()));
    }

    #[test]
    fn semigroup(s1 in 0.0f64..2.0, s2 in 0.0f64..2.0) {
        let g = GridSpec::desk(1).unwrap();
        let f = projected_hg(&g, 5, 0.5);
        let lhs = frac_laplacian(&frac_laplacian(&f, s1).unwrap(), s2).unwrap();
        let rhs = frac_laplacian(&f, s1 + s2).unwrap();
        prop_assert!(rel_l2(&lhs, &rhs) <= 1e-11);
    }

    #[test]
    fn hermitian_symbols_keep_real_fields_real(code in 0u8..4, x in 0.1f64..3.0, m in modes(2, 6)) {
        let g = GridSpec::new(2, 10.0, 32).unwrap();
        let out = apply_multiplier(&resonant(&g, &m), &library_symbol(code, x)).unwrap();
        prop_assert!(out.is_real());
    }

    #[test]
    fn dilation_covariance(s in 0.1f64..3.0, k in 1i32..3) {
        let g = GridSpec::desk(1).unwrap();
        let f = projected_hg(&g, 4, 0.5);
        let lam = 2f64.powi(k);
        let lhs = frac_laplacian(&f.dilated(k), s).unwrap();
        let rhs = frac_laplacian(&f, s).unwrap().scale(lam.powf(s));
        prop_assert!(lhs.values().iter().zip(rhs.values()).all(|(a, b)| (a - b).norm() <= 1e-10 * rhs.max_abs()));
    }

    #[test]
    fn derivative_of_resonant_sine(k in 1i64..40) {
        let g = GridSpec::desk(1).unwrap();
        let w = k as f64 * g.frequency_step();
        let f = Field::from_fn(g, |x| (w * x[0]).sin());
        let df = derivative(&f, &[1]).unwrap();
        let exact = Field::from_fn(g, |x| w * (w * x[0]).cos());
        prop_assert!(max_rel(&df, &exact) <= 1e-12);
        prop_assert!(quadrature_lp_norm(&df, 2.0).unwrap() > 0.0);
    }
}
