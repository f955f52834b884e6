//! Riesz kernel constants and the direct-space Riesz potential.
//!
//! The direct potential is a punctured lattice sum of `c |x - y|^{s-d} f(y)`
//! over the box (no periodic images) plus a local correction
//! `c (w0 f(x) + w2 L_h f(x))`, where `L_h` is the undivided discrete
//! Laplacian. The weights are fitted so that the corrected sum is exact for
//! two Gaussians centered on a lattice point; for smooth `f` this removes the
//! `h^s f(x)` and `h^{s+2} Delta f(x)` terms of the punctured-sum error.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{norm, Field, MAX_DIM};

/// Normalization of the Fourier transform a kernel constant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelConvention {
    /// `Gamma((d-s)/2) / (2^s pi^{s/2} Gamma(s/2))` as quoted for the `2 pi` transform.
    TwoPi,
    /// Kernel of the multiplier `|w|^{-s}` with `F(w) = int f e^{-i x.w} dx`:
    /// `Gamma((d-s)/2) / (2^s pi^{d/2} Gamma(s/2))`.
    Angular,
}

/// Magnitude beyond which a constant is reported as a pole.
pub const POLE_GUARD: f64 = 1e12;

pub fn riesz_kernel_constant(s: f64, d: usize, convention: KernelConvention) -> Result<f64> {
    ensure!((1..=MAX_DIM).contains(&d), Domain, "dimension d = {d} must be in 1..=3");
    ensure!(s > 0.0 && s.is_finite(), Domain, "order s = {s} must be positive");
    let df = d as f64;
    ensure!(
        s < df,
        Pole,
        "order s = {s} reaches the pole of Gamma((d-s)/2) at s = d = {d}"
    );
    let pi_power = match convention {
        KernelConvention::TwoPi => s / 2.0,
        KernelConvention::Angular => df / 2.0,
    };
    let log = ln_gamma((df - s) / 2.0) - s * 2f64.ln() - pi_power * PI.ln() - ln_gamma(s / 2.0);
    let value = log.exp();
    ensure!(
        value.is_finite() && value <= POLE_GUARD,
        Pole,
        "kernel constant {value:e} for s = {s}, d = {d} exceeds {POLE_GUARD:e}: too close to the pole at s = d"
    );
    Ok(value)
}

/// Surface area of the unit sphere in `R^d`.
fn sphere_area(d: usize) -> f64 {
    let df = d as f64;
    2.0 * PI.powf(df / 2.0) / ln_gamma(df / 2.0).exp()
}

/// `int |y|^{s-d} exp(-|y|^2 / (2 sigma^2)) dy`.
fn gaussian_moment(s: f64, d: usize, sigma: f64) -> f64 {
    0.5 * sphere_area(d) * (2.0 * sigma * sigma).powf(s / 2.0) * ln_gamma(s / 2.0).exp()
}

/// Punctured lattice sum `h^d sum_{n != 0} |n h|^{s-d} exp(-|n h|^2 / (2 sigma^2))`.
fn gaussian_lattice_sum(s: f64, d: usize, h: f64, sigma: f64) -> f64 {
    let radius = (9.0 * sigma / h).ceil() as i64;
    let side = 2 * radius + 1;
    let rows: Vec<f64> = exec::map_range(side as usize, |first| {
        let n0 = first as i64 - radius;
        let mut acc = 0.0;
        let inner = side.pow(d as u32 - 1);
        for code in 0..inner {
            let mut r2 = (n0 * n0) as f64;
            let mut c = code;
            for _ in 1..d {
                let n = c % side - radius;
                c /= side;
                r2 += (n * n) as f64;
            }
            if r2 == 0.0 {
                continue;
            }
            let r = r2.sqrt() * h;
            acc += r.powf(s - d as f64) * (-r * r / (2.0 * sigma * sigma)).exp();
        }
        acc
    });
    h.powi(d as i32) * exec::pairwise_sum(&rows)
}

/// Local correction weights `(w0, w2)` for order `s` and spacing `h`.
pub fn singular_weights(s: f64, d: usize, h: f64) -> (f64, f64) {
    let sigmas = [8.0 * h, 16.0 * h];
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for (row, &sigma) in sigmas.iter().enumerate() {
        let miss = gaussian_moment(s, d, sigma) - gaussian_lattice_sum(s, d, h, sigma);
        a[row] = [1.0, 2.0 * d as f64 * ((-h * h / (2.0 * sigma * sigma)).exp() - 1.0)];
        b[row] = miss;
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let w0 = (b[0] * a[1][1] - a[0][1] * b[1]) / det;
    let w2 = (a[0][0] * b[1] - b[0] * a[1][0]) / det;
    (w0, w2)
}

/// Fraction of `||f||_2^2` carried by samples with `|x| > L/4`.
pub fn outer_energy_fraction(f: &Field) -> f64 {
    let g = f.grid();
    let d = g.dim();
    let quarter = g.period() / 4.0;
    let (mut outer, mut total) = (0.0, 0.0);
    for i in 0..g.len() {
        let e = f.value_at(i).norm_sqr();
        total += e;
        if norm(&g.position(i), d) > quarter {
            outer += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// Largest outer energy fraction accepted by [`riesz_potential_direct`].
pub const SUPPORT_TOLERANCE: f64 = 1e-10;

/// `int |x - y|^{s-d} f(y) dy` by corrected lattice summation, without the kernel constant.
pub fn riesz_convolution_direct(f: &Field, s: f64) -> Result<Field> {
    let grid = *f.grid();
    let d = grid.dim();
    ensure!(
        s > 0.0 && s < d as f64,
        Domain,
        "order s = {s} must lie in (0, d) = (0, {d})"
    );
    let outer = outer_energy_fraction(f);
    ensure!(
        outer <= SUPPORT_TOLERANCE,
        Precondition,
        "field is not supported in |x| <= L/4: outer energy fraction {outer:e} exceeds {SUPPORT_TOLERANCE:e}"
    );
    let n = grid.n() as i64;
    let h = grid.spacing();
    let span = 2 * n - 1;
    // Kernel table over offsets in (-(N-1)..N)^d.
    let kernel: Vec<f64> = exec::map_range(span.pow(d as u32) as usize, |code| {
        let mut c = code as i64;
        let mut r2 = 0.0;
        for _ in 0..d {
            let o = c % span - (n - 1);
            c /= span;
            r2 += (o * o) as f64;
        }
        if r2 == 0.0 {
            0.0
        } else {
            (r2.sqrt() * h).powf(s - d as f64)
        }
    });
    let (w0, w2) = singular_weights(s, d, h);
    let hd = grid.cell_volume();
    let values = exec::map_range(grid.len(), |i| {
        let xi = grid.multi_index(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, fj) in f.values().iter().enumerate() {
            if fj.re == 0.0 && fj.im == 0.0 {
                continue;
            }
            let yj = grid.multi_index(j);
            let mut code = 0i64;
            for a in (0..d).rev() {
                code = code * span + (xi[a] as i64 - yj[a] as i64 + n - 1);
            }
            acc += fj * kernel[code as usize];
        }
        let mut lap = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for step in [-1i64, 1] {
                let mut idx = xi;
                let k = idx[a] as i64 + step;
                if (0..n).contains(&k) {
                    idx[a] = k as usize;
                    lap += f.value_at(grid.flat_index(&idx));
                }
            }
            lap -= 2.0 * f.value_at(i);
        }
        acc * hd + f.value_at(i) * w0 + lap * w2
    });
    Field::new(grid, values, f.kind())
}

/// `I_s f = c_{s,d} int |x - y|^{s-d} f(y) dy` with the angular-convention constant.
pub fn riesz_potential_direct(f: &Field, s: f64) -> Result<Field> {
    let c = riesz_kernel_constant(s, f.grid().dim(), KernelConvention::Angular)?;
    Ok(riesz_convolution_direct(f, s)?.scale(c))
}

/// Least-squares scalar `c` minimizing `||reference - c * unit||_2`.
pub fn fit_scalar(unit: &Field, reference: &Field) -> Result<f64> {
    unit.grid().check_same(reference.grid())?;
    let num: Vec<f64> = unit
        .values()
        .iter()
        .zip(reference.values())
        .map(|(u, r)| (u.conj() * r).re)
        .collect();
    let den: Vec<f64> = unit.values().iter().map(|u| u.norm_sqr()).collect();
    Ok(exec::pairwise_sum(&num) / exec::pairwise_sum(&den))
}
