mod common;

use common::{modes, projected_hg, quantize, resonant};
use homsob::direct_norms::{bmo_norm, lipschitz_norm, BallSamplingPlan, DiffSamplingPlan};
use homsob::field::{forward_transform, norm, quadrature_lp_norm, Field, GridSpec};
use homsob::littlewood_paley::{
    build_partition, cubic_step, lp_block, lp_blocks, lp_bmo_norm, lp_lipschitz_norm, lp_sobolev_norm,
    lp_square_function, smooth_step, DyadicPartition,
};
use homsob::multiplier::frac_laplacian;
use homsob::oracles::corpus::{make_test_function, TestFunction};
use proptest::prelude::*;

#[test]
fn mother_bump_support_and_plateau() {
    for profile in [smooth_step(), cubic_step()] {
        let p = build_partition(-6, 6, profile).unwrap();
        assert_eq!(p.bump(1.2), 1.0);
        assert_eq!(p.bump(3.0), 0.0);
        assert_eq!(p.bump(0.49), 0.0);
        for i in 0..=100 {
            let r = 1.0 + 0.5 * i as f64 / 100.0;
            assert_eq!(p.bump(r), 1.0);
        }
    }
}

#[test]
fn telescoping_on_sampled_radii() {
    let p = build_partition(-6, 6, smooth_step()).unwrap();
    for i in 0..=2000 {
        let r = 2f64.powf(-5.0 + 10.0 * i as f64 / 2000.0);
        assert!((p.coverage(r) - 1.0).abs() <= 1e-12, "r = {r}");
    }
}

#[test]
fn default_partitions_cover_every_grid_frequency() {
    for d in 1..=3 {
        let g = GridSpec::desk(d).unwrap();
        let p = DyadicPartition::for_grid(&g);
        for i in 1..g.len() {
            let r = norm(&g.frequency(i), d);
            assert!((p.coverage(r) - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn blocks_are_band_limited_and_almost_orthogonal() {
    let g = GridSpec::desk(1).unwrap();
    let f = projected_hg(&g, 5, 0.5);
    let p = DyadicPartition::for_grid(&g);
    let set = lp_blocks(&f, &p);
    for (j, b) in set.blocks() {
        let spec = forward_transform(b);
        let (lo, hi) = (2f64.powi(j - 1), 2f64.powi(j + 1));
        for i in 0..g.len() {
            let r = norm(&g.frequency(i), 1);
            if r < lo || r > hi {
                assert!(spec.coeffs()[i].norm() <= 1e-14, "j = {j}");
            }
        }
        for k in p.range() {
            if (k - j).abs() > 1 {
                let mkmj = lp_block(b, k, &p).unwrap();
                assert!(mkmj.max_abs() <= 1e-14, "M_{k} M_{j}");
            }
        }
    }
    assert!(set.resum().max_diff(&f).unwrap() <= 1e-11 * f.max_abs());
}

#[test]
fn blocks_of_constants_vanish_exactly() {
    let g = GridSpec::desk(2).unwrap();
    let p = DyadicPartition::for_grid(&g);
    for j in p.range() {
        assert_eq!(lp_block(&Field::constant(g, 2.5), j, &p).unwrap().max_abs(), 0.0);
    }
    assert!(lp_block(&Field::constant(g, 1.0), p.jmax() + 1, &p).is_err());
}

#[test]
fn reproducing_sandwich_and_commutation() {
    let g = GridSpec::desk(1).unwrap();
    let f = projected_hg(&g, 6, 0.5);
    let p = DyadicPartition::for_grid(&g);
    let scale = f.max_abs();
    for j in p.jmin() + 1..p.jmax() {
        let mj = lp_block(&f, j, &p).unwrap();
        let mut sandwich = Field::zeros(g);
        for k in j - 1..=j + 1 {
            sandwich = sandwich.add(&lp_block(&mj, k, &p).unwrap()).unwrap();
        }
        assert!(mj.max_diff(&sandwich).unwrap() <= 1e-12 * scale, "j = {j}");
        let s = 1.5;
        let a = lp_block(&frac_laplacian(&f, s).unwrap(), j, &p).unwrap();
        let b = frac_laplacian(&mj, s).unwrap();
        assert!(a.max_diff(&b).unwrap() <= 1e-12 * frac_laplacian(&f, s).unwrap().max_abs());
    }
}

#[test]
fn single_block_square_function_and_lipschitz() {
    let g = GridSpec::desk(1).unwrap();
    let p = DyadicPartition::for_grid(&g);
    // w = 32 * 2pi/40 ~ 5.03 sits on the plateau of block 2 only.
    let f = resonant(&g, &[([32, 0, 0], 1.0, 0.4)]);
    let sq = lp_square_function(&f, 0.0, &p).unwrap();
    let abs = f.map(|z| num_complex::Complex64::new(z.norm(), 0.0));
    assert!(sq.max_diff(&abs).unwrap() <= 1e-12);
    let gamma = 0.7;
    let lip = lp_lipschitz_norm(&f, gamma, &p).unwrap();
    let base = 2f64.powf(2.0 * gamma) * f.max_abs();
    assert!(lip >= base * (1.0 - 1e-12) && lip <= 3.0 * base);
}

#[test]
fn square_function_grows_with_s_above_frequency_two() {
    let g = GridSpec::desk(1).unwrap();
    let p = DyadicPartition::for_grid(&g);
    let f = resonant(
        &g,
        &[([24, 0, 0], 1.0, 0.0), ([50, 0, 0], 0.5, 1.0), ([90, 0, 0], 0.3, 2.0)],
    );
    let mut prev = lp_square_function(&f, 0.0, &p).unwrap();
    for s in [0.5, 1.0, 2.0] {
        let next = lp_square_function(&f, s, &p).unwrap();
        assert!(next.re().iter().zip(prev.re()).all(|(a, b)| *a >= b * (1.0 - 1e-14)));
        prev = next;
    }
}

#[test]
fn zero_field_norms() {
    let g = GridSpec::desk(2).unwrap();
    let p = DyadicPartition::for_grid(&g);
    let z = Field::zeros(g);
    assert_eq!(lp_square_function(&z, 1.0, &p).unwrap().max_abs(), 0.0);
    assert_eq!(lp_sobolev_norm(&z, 1.0, 2.0, &p).unwrap(), 0.0);
    assert_eq!(lp_lipschitz_norm(&z, 0.5, &p).unwrap(), 0.0);
    assert_eq!(lp_bmo_norm(&z, &p).unwrap(), 0.0);
}

#[test]
fn uncovered_spectrum_is_rejected() {
    let g = GridSpec::desk(1).unwrap();
    let narrow = build_partition(-1, 1, smooth_step()).unwrap();
    let f = projected_hg(&g, 4, 0.5);
    let err = lp_sobolev_norm(&f, 1.0, 2.0, &narrow).unwrap_err();
    assert!(err.to_string().contains("outside the covered annuli"));
}

fn dilation_family(f: &Field) -> Vec<Field> {
    (-2..=2).map(|k| f.dilated(k)).collect()
}

#[test]
fn sobolev_ratio_bracket_and_scaling() {
    let g = GridSpec::desk(1).unwrap();
    let f = projected_hg(&g, 5, 0.5);
    let (s, pexp) = (0.8, 2.0);
    let mut ratios = Vec::new();
    let mut norms = Vec::new();
    for fk in dilation_family(&f) {
        let part = DyadicPartition::for_grid(fk.grid());
        let lp = lp_sobolev_norm(&fk, s, pexp, &part).unwrap();
        let direct = quadrature_lp_norm(&frac_laplacian(&fk, s).unwrap(), pexp).unwrap();
        ratios.push(lp / direct);
        norms.push(lp);
    }
    for r in &ratios {
        assert!((0.25..=4.0).contains(r), "{r}");
    }
    let expected = 2f64.powf(s - 1.0 / pexp);
    for w in norms.windows(2) {
        assert!((w[1] / w[0] - expected).abs() <= 1e-3 * expected);
    }
}

#[test]
fn lipschitz_estimators_agree_up_to_a_constant() {
    let g = GridSpec::desk(1).unwrap();
    let f = projected_hg(&g, 4, 0.5);
    let gamma = 0.5;
    for fk in dilation_family(&f) {
        let part = DyadicPartition::for_grid(fk.grid());
        let lp = lp_lipschitz_norm(&fk, gamma, &part).unwrap();
        let direct = lipschitz_norm(&fk, gamma, &DiffSamplingPlan::standard(1, 6)).unwrap();
        let r = lp / direct;
        assert!((0.1..=10.0).contains(&r), "{r}");
    }
}

#[test]
fn bmo_estimators_agree_on_windowed_log() {
    let g = GridSpec::desk(1).unwrap();
    let f = make_test_function(&TestFunction::WindowedLogAbs, &g).unwrap();
    let lp = lp_bmo_norm(&f, &DyadicPartition::for_grid(&g)).unwrap();
    let direct = bmo_norm(&f, &BallSamplingPlan::default_for(&g).unwrap()).unwrap();
    let r = lp / direct;
    assert!((0.1..=10.0).contains(&r), "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_norms_ignore_constants(m in modes(1, 60), c in -8i32..8) {
        let g = GridSpec::desk(1).unwrap();
        let p = DyadicPartition::for_grid(&g);
        let f = quantize(&resonant(&g, &m));
        let fc = f.add_constant(c as f64 * 0.5);
        prop_assert_eq!(lp_sobolev_norm(&f, 1.0, 2.0, &p).unwrap(), lp_sobolev_norm(&fc, 1.0, 2.0, &p).unwrap());
        prop_assert_eq!(lp_lipschitz_norm(&f, 0.5, &p).unwrap(), lp_lipschitz_norm(&fc, 0.5, &p).unwrap());
        prop_assert_eq!(lp_bmo_norm(&f, &p).unwrap(), lp_bmo_norm(&fc, &p).unwrap());
    }

    #[test]
    fn resum_reproduces_band_covered_fields(m in modes(2, 20)) {
        let g = GridSpec::desk(2).unwrap();
        let p = DyadicPartition::for_grid(&g);
        let f = resonant(&g, &m);
        let back = lp_blocks(&f, &p).resum();
        prop_assert!(back.max_diff(&f).unwrap() <= 1e-11 * f.max_abs());
    }
}
