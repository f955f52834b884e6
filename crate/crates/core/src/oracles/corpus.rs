//! Named analytic test functions and the projection onto moment-free fields.

use statrs::function::erf::erfc;

use crate::error::{ensure, Result};
use crate::field::{forward_transform, inverse_transform, norm, Field, GridSpec, Point, MAX_DIM};
use crate::littlewood_paley::DyadicPartition;

/// Closed-form test functions sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `exp(-|x|^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// `He_n(x_1 / sigma) exp(-|x|^2 / (2 sigma^2))` with the probabilists' Hermite polynomial.
    HermiteGaussian { order: u32, sigma: f64 },
    /// `x^alpha W(|x|)` with the radial window of [`window`].
    WindowedPolynomial { alpha: [u32; MAX_DIM] },
    /// `log|x| W(|x|)`; at `x = 0` the sample is the cell mean `log(h/2) - 1`.
    WindowedLogAbs,
}

/// Smallest resolvable feature width in grid steps.
pub const MIN_FEATURE_STEPS: f64 = 4.0;

/// Number of erfc widths between the window's flat part and its cutoff.
const WINDOW_WIDTHS: f64 = 11.8;

/// Radial window `W(r) = erfc((r - c) / delta) / 2`: one to machine precision
/// on `r <= L/8`, below `1e-16` beyond `L/4`.
pub fn window(grid: &GridSpec, r: f64) -> f64 {
    let (c, delta) = window_shape(grid);
    0.5 * erfc((r - c) / delta)
}

fn window_shape(grid: &GridSpec) -> (f64, f64) {
    let l = grid.period();
    let delta = (l / 4.0 - l / 8.0) / WINDOW_WIDTHS;
    (3.0 * l / 16.0, delta)
}

/// Probabilists' Hermite polynomial `He_n(t)`.
pub fn hermite(n: u32, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, t);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let next = t * b - k as f64 * a;
        a = b;
        b = next;
    }
    b
}

fn monomial(alpha: &[u32; MAX_DIM], x: &Point) -> f64 {
    (0..MAX_DIM).map(|a| x[a].powi(alpha[a] as i32)).product()
}

pub fn make_test_function(kind: &TestFunction, grid: &GridSpec) -> Result<Field> {
    let h = grid.spacing();
    let d = grid.dim();
    let l = grid.period();
    match *kind {
        TestFunction::Gaussian { sigma } | TestFunction::HermiteGaussian { sigma, .. } => {
            ensure!(
                sigma >= MIN_FEATURE_STEPS * h,
                Domain,
                "width sigma = {sigma} is below {MIN_FEATURE_STEPS}h = {}",
                MIN_FEATURE_STEPS * h
            );
            ensure!(
                sigma <= l / 4.0,
                Domain,
                "width sigma = {sigma} exceeds L/4 = {}",
                l / 4.0
            );
        }
        TestFunction::WindowedPolynomial { .. } | TestFunction::WindowedLogAbs => {
            let (_, delta) = window_shape(grid);
            ensure!(
                delta >= MIN_FEATURE_STEPS * h,
                Domain,
                "window transition width {delta} is below {MIN_FEATURE_STEPS}h = {}; refine the grid",
                MIN_FEATURE_STEPS * h
            );
        }
    }
    if let TestFunction::WindowedPolynomial { alpha } = kind {
        ensure!(
            alpha[d..].iter().all(|&k| k == 0),
            Domain,
            "multi-index {alpha:?} exceeds dimension {d}"
        );
    }
    let field = match *kind {
        TestFunction::Gaussian { sigma } => {
            Field::from_fn(*grid, |x| (-norm(x, d).powi(2) / (2.0 * sigma * sigma)).exp())
        }
        TestFunction::HermiteGaussian { order, sigma } => Field::from_fn(*grid, |x| {
            hermite(order, x[0] / sigma) * (-norm(x, d).powi(2) / (2.0 * sigma * sigma)).exp()
        }),
        TestFunction::WindowedPolynomial { alpha } => {
            Field::from_fn(*grid, |x| monomial(&alpha, x) * window(grid, norm(x, d)))
        }
        TestFunction::WindowedLogAbs => Field::from_fn(*grid, |x| {
            let r = norm(x, d);
            if r == 0.0 {
                (0.5 * h).ln() - 1.0
            } else {
                r.ln() * window(grid, r)
            }
        }),
    };
    Ok(field)
}

/// Removes every frequency below `rho` with the smooth radial factor
/// `1 - psi(2|w| / rho)`, `psi` the Littlewood–Paley cutoff. The factor is zero
/// on `|w| <= 3 rho / 4` and one on `|w| >= rho`.
pub fn s_infty_project(f: &Field, rho: f64) -> Result<Field> {
    let grid = f.grid();
    let min = 2.0 * grid.frequency_step();
    ensure!(
        rho >= min * (1.0 - 1e-12),
        Domain,
        "cutoff rho = {rho} is below 2 * 2pi/L = {min}; at least one annulus must be removed"
    );
    let psi = DyadicPartition::for_grid(grid);
    let d = grid.dim();
    let spec = forward_transform(f);
    let out = spec.multiply(
        |w, _| num_complex::Complex64::new(1.0 - psi.cutoff(2.0 * norm(w, d) / rho), 0.0),
        f.kind(),
    );
    Ok(inverse_transform(&out))
}

/// Default projection radius `2 * 2pi / L`.
pub fn default_projection_radius(grid: &GridSpec) -> f64 {
    2.0 * grid.frequency_step()
}

/// Grid moment `h^d sum x^gamma f(x)`.
pub fn grid_moment(f: &Field, gamma: &[u32; MAX_DIM]) -> f64 {
    let g = f.grid();
    let vals: Vec<f64> = (0..g.len())
        .map(|i| monomial(gamma, &g.position(i)) * f.value_at(i).re)
        .collect();
    g.cell_volume() * crate::exec::pairwise_sum(&vals)
}
