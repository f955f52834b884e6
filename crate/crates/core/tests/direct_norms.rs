mod common;

use common::{modes, quantize, resonant};
use homsob::direct_norms::{
    bmo_norm, finite_difference, finite_difference_recursive, lipschitz_norm, sobolev_bmo_norm, BallPlanConfig,
    BallSamplingPlan, DiffSamplingPlan, Offset,
};
use homsob::field::{norm, Field, GridSpec};
use homsob::multiplier::derivative;
use homsob::oracles::corpus::{make_test_function, window, TestFunction};
use proptest::prelude::*;

fn windowed(grid: &GridSpec, alpha: [u32; 3]) -> Field {
    make_test_function(&TestFunction::WindowedPolynomial { alpha }, grid).unwrap()
}

/// Largest `|D_h^k f|` over base points whose stencil stays in `|x| <= L/8`.
fn inner_max(grid: &GridSpec, diff: &Field, h: &Offset, k: u32) -> f64 {
    let d = grid.dim();
    let limit = grid.period() / 8.0;
    let step = grid.spacing();
    (0..grid.len())
        .filter(|&i| {
            let x = grid.position(i);
            (0..=k as i64).all(|j| {
                let mut y = x;
                for a in 0..d {
                    y[a] += (j * h[a]) as f64 * step;
                }
                norm(&y, d) <= limit
            })
        })
        .map(|i| diff.value_at(i).norm())
        .fold(0.0, f64::max)
}

#[test]
fn differences_of_low_monomials() {
    let g = GridSpec::desk(1).unwrap();
    let step = g.spacing();
    let x = windowed(&g, [1, 0, 0]);
    let x2 = windowed(&g, [2, 0, 0]);
    for m in [1i64, 2, 5] {
        let h = [m, 0, 0];
        let d1 = finite_difference(&x, &h, 1).unwrap().field;
        let d2 = finite_difference(&x2, &h, 2).unwrap().field;
        let len = m as f64 * step;
        for i in 0..g.len() {
            let p = g.position(i)[0];
            if p.abs() + 2.0 * len <= g.period() / 8.0 {
                assert!((d1.value_at(i).re - len).abs() <= 1e-13);
                assert!((d2.value_at(i).re - 2.0 * len * len).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn differences_annihilate_polynomials_of_lower_degree() {
    for d in 1..=2 {
        let g = if d == 1 {
            GridSpec::desk(1).unwrap()
        } else {
            GridSpec::new(2, 20.0, 512).unwrap()
        };
        for k in 1..=4u32 {
            for deg in 0..k {
                let alpha = [deg, if d == 2 { k - 1 - deg } else { 0 }, 0];
                let f = windowed(&g, alpha);
                let scale = f.max_abs().max(1.0);
                for h in [[1, 0, 0], [2, (d == 2) as i64, 0]] {
                    let diff = finite_difference(&f, &h, k).unwrap().field;
                    assert!(
                        inner_max(&g, &diff, &h, k) <= 1e-10 * scale,
                        "d {d} k {k} alpha {alpha:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn windowed_root_has_unit_holder_quotient() {
    let g = GridSpec::desk(1).unwrap();
    let f = Field::from_fn(g, |x| x[0].abs().sqrt() * window(&g, x[0].abs()));
    let plan = DiffSamplingPlan::standard(1, 5).with_region(g.period() / 8.0);
    let est = lipschitz_norm(&f, 0.5, &plan).unwrap();
    assert!((est - 1.0).abs() <= 2e-2, "{est}");
}

#[test]
fn lipschitz_refinement_is_monotone() {
    let g = GridSpec::desk(2).unwrap();
    let f = common::projected_hg(&g, 3, 0.8);
    let mut prev = 0.0;
    for levels in 0..5 {
        let est = lipschitz_norm(&f, 1.3, &DiffSamplingPlan::standard(2, levels)).unwrap();
        assert!(est >= prev);
        prev = est;
    }
    let axes = DiffSamplingPlan {
        directions: vec![[1, 0, 0], [0, 1, 0]],
        magnitudes: vec![1, 2, 4],
        region: None,
    };
    let full = DiffSamplingPlan::standard(2, 2);
    assert!(lipschitz_norm(&f, 1.3, &full).unwrap() >= lipschitz_norm(&f, 1.3, &axes).unwrap());
}

#[test]
fn bmo_on_constants_and_two_resolutions() {
    let coarse = GridSpec::desk(1).unwrap();
    let fine = GridSpec::new(1, 40.0, 1024).unwrap();
    assert_eq!(
        bmo_norm(
            &Field::constant(coarse, 4.0),
            &BallSamplingPlan::default_for(&coarse).unwrap()
        )
        .unwrap(),
        0.0
    );
    let est: Vec<f64> = [coarse, fine]
        .iter()
        .map(|g| {
            let f = make_test_function(&TestFunction::WindowedLogAbs, g).unwrap();
            bmo_norm(&f, &BallSamplingPlan::default_for(g).unwrap()).unwrap()
        })
        .collect();
    assert!((est[0] / est[1] - 1.0).abs() <= 0.05, "{est:?}");
}

#[test]
fn small_balls_are_rejected() {
    let g = GridSpec::desk(2).unwrap();
    let h = g.spacing();
    let cfg = BallPlanConfig {
        center_spacing: 4.0 * h,
        r0: 1.0 * h,
        rho: 1.5,
        count: 3,
        region: None,
    };
    assert!(BallSamplingPlan::new(&g, &cfg).is_err());
    let cfg = BallPlanConfig {
        r0: 2.0 * h,
        rho: 2.5,
        ..cfg
    };
    assert!(BallSamplingPlan::new(&g, &cfg).is_err());
    let cfg = BallPlanConfig {
        rho: 2.0,
        count: 8,
        ..cfg
    };
    assert!(BallSamplingPlan::new(&g, &cfg).is_err());
}

#[test]
fn sobolev_bmo_of_windowed_polynomials_on_the_interior() {
    let g = GridSpec::new(2, 20.0, 512).unwrap();
    let h = g.spacing();
    let cfg = BallPlanConfig {
        center_spacing: 4.0 * h,
        r0: 2.0 * h,
        rho: 2.0,
        count: 3,
        region: Some(g.period() / 8.0),
    };
    let plan = BallSamplingPlan::new(&g, &cfg).unwrap();
    for (alpha, m) in [([1, 0, 0], 1), ([1, 1, 0], 2), ([0, 2, 0], 2)] {
        let f = windowed(&g, alpha);
        let v = sobolev_bmo_norm(&f, m, &plan).unwrap();
        assert!(v <= 1e-6 * f.max_abs(), "{alpha:?}: {v}");
    }
    let f = common::projected_hg(&g, 3, 0.8);
    let plan = BallSamplingPlan::default_for(&g).unwrap();
    let direct = bmo_norm(&derivative(&f, &[1, 0]).unwrap(), &plan).unwrap()
        + bmo_norm(&derivative(&f, &[0, 1]).unwrap(), &plan).unwrap();
    assert_eq!(sobolev_bmo_norm(&f, 1, &plan).unwrap(), direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn recursion_matches_closed_form(m in modes(2, 6), k in 1u32..5, hx in -3i64..4, hy in -3i64..4) {
        prop_assume!(hx != 0 || hy != 0);
        let g = GridSpec::new(2, 10.0, 32).unwrap();
        let f = resonant(&g, &m);
        let h = [hx, hy, 0];
        let a = finite_difference(&f, &h, k).unwrap();
        let b = finite_difference_recursive(&f, &h, k).unwrap();
        let scale = f.max_abs() * 2f64.powi(k as i32);
        prop_assert!(a.field.max_diff(&b.field).unwrap() <= 1e-13 * scale);
        prop_assert_eq!(a.wrapped, b.wrapped);
    }

    #[test]
    fn seminorm_axioms(ma in modes(1, 20), mb in modes(1, 20), c in -5.0f64..5.0) {
        let g = GridSpec::desk(1).unwrap();
        let (f, q) = (resonant(&g, &ma), resonant(&g, &mb));
        let plan = DiffSamplingPlan::standard(1, 4);
        let balls = BallSamplingPlan::default_for(&g).unwrap();
        let sum = f.add(&q).unwrap();
        for gamma in [0.4, 1.5] {
            let (lf, lq, ls) = (
                lipschitz_norm(&f, gamma, &plan).unwrap(),
                lipschitz_norm(&q, gamma, &plan).unwrap(),
                lipschitz_norm(&sum, gamma, &plan).unwrap(),
            );
            prop_assert!(ls <= lf + lq + 1e-10);
            let lc = lipschitz_norm(&f.scale(c), gamma, &plan).unwrap();
            prop_assert!((lc - c.abs() * lf).abs() <= 1e-12 * (c.abs() * lf).max(1e-300));
        }
        let (bf, bq, bs) = (
            bmo_norm(&f, &balls).unwrap(),
            bmo_norm(&q, &balls).unwrap(),
            bmo_norm(&sum, &balls).unwrap(),
        );
        prop_assert!(bs <= bf + bq + 1e-10);
        let (sf, sq, ss) = (
            sobolev_bmo_norm(&f, 1, &balls).unwrap(),
            sobolev_bmo_norm(&q, 1, &balls).unwrap(),
            sobolev_bmo_norm(&sum, 1, &balls).unwrap(),
        );
        prop_assert!(ss <= sf + sq + 1e-10);
    }

    #[test]
    fn bmo_ignores_constants(m in modes(1, 20), c in -16i32..16) {
        let g = GridSpec::desk(1).unwrap();
        let f = quantize(&resonant(&g, &m));
        let balls = BallSamplingPlan::default_for(&g).unwrap();
        prop_assert_eq!(bmo_norm(&f, &balls).unwrap(), bmo_norm(&f.add_constant(c as f64 * 0.25), &balls).unwrap());
    }
}
