#![allow(dead_code)]

use homsob::field::{quadrature_lp_norm, Field, GridSpec};
use homsob::oracles::corpus::{default_projection_radius, make_test_function, s_infty_project, TestFunction};
use proptest::prelude::*;

/// Real field `sum a cos(w.x + phase)` over grid-resonant wavenumbers.
pub fn resonant(grid: &GridSpec, modes: &[([i64; 3], f64, f64)]) -> Field {
    let dw = grid.frequency_step();
    let d = grid.dim();
    Field::from_fn(*grid, |x| {
        modes
            .iter()
            .map(|(k, a, ph)| {
                let arg: f64 = (0..d).map(|i| k[i] as f64 * dw * x[i]).sum();
                a * (arg + ph).cos()
            })
            .sum()
    })
}

/// Up to four modes with wavenumbers in `1..=kmax` per axis (signs mixed).
pub fn modes(d: usize, kmax: i64) -> impl Strategy<Value = Vec<([i64; 3], f64, f64)>> {
    prop::collection::vec(
        (
            prop::array::uniform3(-kmax..=kmax),
            -2.0f64..2.0,
            0.0f64..std::f64::consts::TAU,
        ),
        1..5,
    )
    .prop_map(move |v| {
        v.into_iter()
            .map(|(mut k, a, ph)| {
                for c in k.iter_mut().skip(d) {
                    *c = 0;
                }
                if k[..d].iter().all(|&c| c == 0) {
                    k[0] = 1;
                }
                (k, a, ph)
            })
            .collect()
    })
}

pub fn projected(grid: &GridSpec, kind: TestFunction) -> Field {
    let f = make_test_function(&kind, grid).unwrap();
    s_infty_project(&f, default_projection_radius(grid)).unwrap()
}

pub fn projected_hg(grid: &GridSpec, order: u32, sigma: f64) -> Field {
    projected(grid, TestFunction::HermiteGaussian { order, sigma })
}

/// The moment-free d = 1 corpus used across suites.
pub fn corpus_1d() -> Vec<Field> {
    let g = GridSpec::desk(1).unwrap();
    [4, 5, 6, 8].iter().map(|&n| projected_hg(&g, n, 0.5)).collect()
}

pub fn l2(f: &Field) -> f64 {
    quadrature_lp_norm(f, 2.0).unwrap()
}

pub fn rel_l2(a: &Field, b: &Field) -> f64 {
    l2(&a.sub(b).unwrap()) / l2(b)
}

/// Rounds samples to multiples of `2^-10` so constant shifts are exact.
pub fn quantize(f: &Field) -> Field {
    Field::from_real(
        *f.grid(),
        f.re().iter().map(|v| (v * 1024.0).round() / 1024.0).collect(),
    )
    .unwrap()
}
