mod common;

use common::{modes, resonant};
use homsob::field::{
    forward_transform, inverse_transform, quadrature_lp_norm, read_fld, write_fld, Field, FieldKind, GridSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(d: usize) -> GridSpec {
    match d {
        1 => GridSpec::new(1, 8.0, 64).unwrap(),
        2 => GridSpec::new(2, 8.0, 32).unwrap(),
        _ => GridSpec::new(3, 8.0, 16).unwrap(),
    }
}

#[test]
fn gaussian_spectrum_and_norm() {
    let g = GridSpec::desk(1).unwrap();
    let f = Field::from_fn(g, |x| (-x[0] * x[0] / 2.0).exp());
    let spec = forward_transform(&f);
    let root = (2.0 * std::f64::consts::PI).sqrt();
    for k in -64i64..64 {
        let w = k as f64 * g.frequency_step();
        if w.abs() <= 10.0 {
            let exact = root * (-w * w / 2.0).exp();
            let got = spec.at(&[k]);
            assert!(
                (got.re - exact).abs() <= 1e-10 * root && got.im.abs() <= 1e-10 * root,
                "k = {k}"
            );
        }
    }
    let n2 = quadrature_lp_norm(&f, 2.0).unwrap();
    assert!((n2 - std::f64::consts::PI.powf(0.25)).abs() < 1e-10);
}

#[test]
fn constant_and_sup_norms() {
    let g = GridSpec::desk(1).unwrap();
    let c = Field::constant(g, -3.0);
    for p in [1.0, 2.0, 3.5] {
        let n = quadrature_lp_norm(&c, p).unwrap();
        assert!((n - 3.0 * 40f64.powf(1.0 / p)).abs() < 1e-12 * n);
    }
    let cosine = Field::from_fn(g, |x| (2.0 * std::f64::consts::PI * x[0] / 40.0).cos());
    assert_eq!(quadrature_lp_norm(&cosine, f64::INFINITY).unwrap(), 1.0);
    assert!(quadrature_lp_norm(&c, 0.0).is_err());
}

#[test]
fn structural_mismatch() {
    let g = GridSpec::desk(1).unwrap();
    assert!(Field::new(g, vec![Complex64::new(0.0, 0.0); 10], FieldKind::Complex).is_err());
    let a = Field::zeros(g);
    let b = Field::zeros(GridSpec::desk(2).unwrap());
    assert!(a.add(&b).is_err());
}

#[test]
fn fld_roundtrip_and_magic() {
    let g = GridSpec::new(2, 6.0, 16).unwrap();
    let f = resonant(&g, &[([1, 2, 0], 0.7, 0.3)]);
    let mut buf = Vec::new();
    write_fld(&f, &mut buf).unwrap();
    assert_eq!(&buf[..8], b"HOMSOBF1");
    assert_eq!(buf.len(), 8 + 4 + 4 + 8 + 1 + 16 * 16 * 16);
    let back = read_fld(&buf[..]).unwrap();
    assert_eq!(back, f);
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(read_fld(&bad[..]).is_err());
    assert!(read_fld(&buf[..buf.len() - 3]).is_err());
}

#[test]
fn refinement_of_bandlimited_norm() {
    // Same function on N and 2N: trapezoid sums of trigonometric polynomials are exact.
    let a = GridSpec::new(1, 10.0, 64).unwrap();
    let b = GridSpec::new(1, 10.0, 128).unwrap();
    let m = [([3, 0, 0], 1.0, 0.2), ([5, 0, 0], 0.5, 1.0)];
    let na = quadrature_lp_norm(&resonant(&a, &m), 2.0).unwrap();
    let nb = quadrature_lp_norm(&resonant(&b, &m), 2.0).unwrap();
    assert!((na - nb).abs() < 1e-13 * na);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn roundtrip(d in 1usize..=3, m in modes(3, 5)) {
        let g = grid(d);
        let f = resonant(&g, &m);
        let back = inverse_transform(&forward_transform(&f));
        let scale = f.max_abs().max(1e-300);
        prop_assert!(back.max_diff(&f).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn plancherel(d in 1usize..=3, m in modes(3, 5)) {
        let g = grid(d);
        let f = resonant(&g, &m);
        let spec = forward_transform(&f);
        let lhs = g.cell_volume() * f.values().iter().map(|z| z.norm_sqr()).sum::<f64>();
        let rhs = spec.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.period().powi(d as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn inverse_is_linear(ma in modes(1, 8), mb in modes(1, 8), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid(1);
        let fa = forward_transform(&resonant(&g, &ma));
        let fb = forward_transform(&resonant(&g, &mb));
        let combo = homsob::field::SpectrumField::new(
            g,
            fa.coeffs().iter().zip(fb.coeffs()).map(|(x, y)| x * a + y * b).collect(),
            FieldKind::Real,
        ).unwrap();
        let lhs = inverse_transform(&combo);
        let rhs = inverse_transform(&fa).scale(a).add(&inverse_transform(&fb).scale(b)).unwrap();
        let scale = rhs.max_abs().max(1.0);
        prop_assert!(lhs.max_diff(&rhs).unwrap() <= 1e-13 * scale);
    }

    #[test]
    fn norm_is_homogeneous(m in modes(2, 6), c in -10.0f64..10.0, p in 1.0f64..6.0) {
        let g = grid(2);
        let f = resonant(&g, &m);
        let n = quadrature_lp_norm(&f, p).unwrap();
        let nc = quadrature_lp_norm(&f.scale(c), p).unwrap();
        prop_assert!((nc - c.abs() * n).abs() <= 1e-13 * (c.abs() * n).max(1e-300));
    }
}
