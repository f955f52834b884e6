//! Scaling studies: the `L^{p'}` norm of kernel differences and the decay of
//! fractional Laplacians of dilated windowed monomials.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::quadrature::{tanh_sinh, tanh_sinh_split, Quadrature};
use super::{fit_slope, StudyTable};
use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{norm, quadrature_lp_norm, Field, GridSpec, MAX_DIM};
use crate::littlewood_paley::Profile;
use crate::multiplier::frac_laplacian;

/// Truncation radius of the kernel-difference integrals in units of `|a|`.
pub const TRUNCATION_FACTOR: f64 = 1e4;

/// Output of [`ga_norm_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaStudy {
    pub table: StudyTable,
    pub magnitudes: Vec<f64>,
    /// `||g_a||_{L^{p'}}` per magnitude.
    pub norms: Vec<f64>,
    /// Quadrature error estimate of each `int |g_a|^{p'}`, relative.
    pub errors: Vec<f64>,
    pub slope: f64,
    pub reference_slope: f64,
}

/// `k(r) = r^{nu-d}`, or `log r` when `nu = d` (where the power kernel degenerates to a constant).
#[derive(Clone, Copy)]
struct Kernel {
    exponent: f64,
    log: bool,
}

impl Kernel {
    fn new(nu: f64, d: usize) -> Self {
        let exponent = nu - d as f64;
        Self {
            exponent,
            log: exponent == 0.0,
        }
    }

    /// `|k(x) - k(y)|^q y^w`, evaluated in scaled form so that
    /// arguments near zero do not overflow.
    fn difference_power(&self, x: f64, y: f64, q: f64, w: f64) -> f64 {
        if self.log {
            (x / y).ln().abs().powf(q) * y.powf(w)
        } else {
            let e = self.exponent;
            // Factor out the larger of k(x), k(y) so the remaining ratio is at most one.
            let (lead, other) = if (e > 0.0) == (x > y) { (x, y) } else { (y, x) };
            let log_scale = e * q * lead.ln() + w * y.ln();
            log_scale.exp() * (1.0 - (other / lead).powf(e)).abs().powf(q)
        }
    }

    /// Coefficient of `r^{nu-d-1} (a . x/|x|)` in the far field of `g_a`.
    fn far_coefficient(&self) -> f64 {
        if self.log {
            1.0
        } else {
            self.exponent.abs()
        }
    }
}

/// `int_{S^{d-1}} |cos theta|^q`.
fn sphere_cos_moment(d: usize, q: f64) -> f64 {
    match d {
        1 => 2.0,
        _ => 2.0 * PI.sqrt() * (ln_gamma((q + 1.0) / 2.0) - ln_gamma(q / 2.0 + 1.0)).exp(),
    }
}

/// Geometric breakpoints `a, 2a, 4a, ...` capped at `r`.
fn geometric_breaks(a: f64, r: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut x = a;
    while x < r {
        x = (2.0 * x).min(r);
        out.push(x);
    }
    out
}

/// `int_{|x| > R} |g_a|^{p'}` from the leading far-field term.
fn analytic_tail(kernel: Kernel, a: f64, pp: f64, d: usize, r: f64) -> f64 {
    let q = (kernel.exponent - 1.0) * pp + d as f64;
    (kernel.far_coefficient() * a).powf(pp) * sphere_cos_moment(d, pp) * r.powf(q) / -q
}

fn integrate_1d(kernel: Kernel, a: f64, pp: f64, tol: f64) -> Quadrature {
    let r = TRUNCATION_FACTOR * a;
    // [0, a]: |x| = dl, |a - x| = dr.
    let inner = tanh_sinh(
        |_, dl, dr| kernel.difference_power(dr.max(dl), dr.min(dl), pp, 0.0),
        0.0,
        a,
        tol,
    );
    let right = geometric_breaks(a, r);
    let mut total = inner;
    for w in right.windows(2) {
        let lo = w[0];
        // x in [lo, hi] beyond a: |x - a| = (lo - a) + dl.
        let q = tanh_sinh(
            |x, dl, _| {
                let da = if lo == a { dl } else { x - a };
                kernel.difference_power(da, x, pp, 0.0)
            },
            lo,
            w[1],
            tol,
        );
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    }
    // Negative side: x = -y with y in [0, R]; |x| = y, |a - x| = a + y.
    let mut left = vec![0.0];
    left.extend(geometric_breaks(a, r));
    let q = tanh_sinh_split(|y, _, _| kernel.difference_power(a + y, y, pp, 0.0), &left, tol);
    total.value += q.value;
    total.error += q.error;
    total.evaluations += q.evaluations;
    total
}

// |g_a| is symmetric under x -> a - x, so the plane folds onto x_1 < a/2,
// covered by rays from the origin; each ray only meets the singularity at 0.
fn integrate_2d(kernel: Kernel, a: f64, pp: f64, tol: f64) -> Quadrature {
    let r_max = TRUNCATION_FACTOR * a;
    let ray = |phi: f64| -> Quadrature {
        let c = phi.cos();
        let end = if c > 0.0 { (0.5 * a / c).min(r_max) } else { r_max };
        let mut breaks = vec![0.0];
        breaks.extend(geometric_breaks(0.5 * a, end));
        breaks.dedup();
        tanh_sinh_split(
            |r, _, _| {
                let da = (r * r + a * a - 2.0 * a * r * c).max(0.0).sqrt();
                kernel.difference_power(da, r, pp, 1.0)
            },
            &breaks,
            tol,
        )
    };
    let evals = std::cell::Cell::new(0usize);
    let inner_err = std::cell::Cell::new(0.0f64);
    let kink = (0.5 / TRUNCATION_FACTOR).acos();
    let outer = tanh_sinh_split(
        |phi, _, _| {
            let q = ray(phi);
            evals.set(evals.get() + q.evaluations);
            inner_err.set(inner_err.get().max(q.error / q.value.abs().max(f64::MIN_POSITIVE)));
            q.value
        },
        &[0.0, kink, PI],
        tol,
    );
    Quadrature {
        value: 4.0 * outer.value,
        error: 4.0 * outer.error + 4.0 * outer.value.abs() * inner_err.get(),
        evaluations: outer.evaluations + evals.get(),
    }
}

/// `||g_a||_{L^{p'}}` with `g_a(x) = |a - x|^{nu-d} - |x|^{nu-d}`, for each `|a|`,
/// and the log-log slope against `nu - d/p`.
pub fn ga_norm_study(nu: f64, p: f64, d: usize, magnitudes: &[f64], tol: f64) -> Result<GaStudy> {
    ensure!(
        d == 1 || d == 2,
        Domain,
        "kernel-difference study supports d = 1, 2, got d = {d}"
    );
    ensure!(p > 1.0 && p.is_finite(), Domain, "p = {p} must lie in (1, inf)");
    let dp = d as f64 / p;
    ensure!(
        nu > dp,
        Domain,
        "||g_a||_{{L^p'}} is finite if and only if nu > d/p; got nu = {nu}, d/p = {dp}"
    );
    ensure!(
        nu - dp < 1.0,
        Domain,
        "||g_a||_{{L^p'}} is finite if and only if nu - d/p < 1; got nu - d/p = {}",
        nu - dp
    );
    ensure!(magnitudes.len() >= 2, Domain, "need at least two magnitudes |a|");
    ensure!(
        magnitudes.iter().all(|&a| a > 0.0 && a.is_finite()),
        Domain,
        "magnitudes must be positive and finite"
    );
    ensure!(tol > 0.0, Domain, "quadrature tolerance must be positive");
    let pp = p / (p - 1.0);
    let kernel = Kernel::new(nu, d);
    let results: Vec<Quadrature> = exec::map_slice(magnitudes, |&a| {
        let mut q = if d == 1 {
            integrate_1d(kernel, a, pp, tol)
        } else {
            integrate_2d(kernel, a, pp, tol)
        };
        q.value += analytic_tail(kernel, a, pp, d, TRUNCATION_FACTOR * a);
        q
    });
    let norms: Vec<f64> = results.iter().map(|q| q.value.powf(1.0 / pp)).collect();
    let errors: Vec<f64> = results.iter().map(|q| q.error / q.value).collect();
    let reference_slope = nu - dp;
    let logs_a: Vec<f64> = magnitudes.iter().map(|a| a.ln()).collect();
    let logs_n: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let slope = fit_slope(&logs_a, &logs_n);

    let mut table = StudyTable::new(&["quantity", "nu", "p", "d", "a"]);
    let base = |q: &str, a: String| vec![q.to_string(), nu.to_string(), p.to_string(), d.to_string(), a];
    let c0 = norms[0] / magnitudes[0].powf(reference_slope);
    for (a, n) in magnitudes.iter().zip(&norms) {
        table.push(base("norm", a.to_string()), *n, c0 * a.powf(reference_slope));
    }
    for i in 1..magnitudes.len() {
        table.push(
            base("ratio", format!("{}/{}", magnitudes[i], magnitudes[i - 1])),
            norms[i] / norms[i - 1],
            (magnitudes[i] / magnitudes[i - 1]).powf(reference_slope),
        );
    }
    table.push(base("slope", String::new()), slope, reference_slope);
    Ok(GaStudy {
        table,
        magnitudes: magnitudes.to_vec(),
        norms,
        errors,
        slope,
        reference_slope,
    })
}

/// Output of [`polynomial_annihilation_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilationStudy {
    pub table: StudyTable,
    pub scales: Vec<f64>,
    /// `||Delta^{s/2}(x^alpha psi(x/n))||_2^2` per scale `n`.
    pub squared_norms: Vec<f64>,
    pub slope: f64,
    pub reference_slope: f64,
    /// Largest relative deviation of the dilation identity over power-of-two scales.
    pub scaling_deviation: f64,
}

/// Compact bump: one on `|x| <= 1`, zero on `|x| >= 2`, `1 - theta(|x| - 1)` between.
pub fn bump(profile: &Profile, r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        1.0 - profile(r - 1.0)
    }
}

/// Grid suited to scales up to `n_max`: `L = 16 n_max` and spacing `1/64`, `1/8`, `1/4` for `d = 1, 2, 3`.
pub fn annihilation_grid(d: usize, n_max: f64) -> Result<GridSpec> {
    let per_unit = match d {
        1 => 64.0,
        2 => 8.0,
        _ => 4.0,
    };
    let l = 16.0 * n_max.max(1.0).log2().ceil().exp2();
    GridSpec::new(d, l, (l * per_unit) as usize)
}

fn windowed_monomial(grid: GridSpec, alpha: &[u32; MAX_DIM], profile: &Profile, n: f64) -> Field {
    let d = grid.dim();
    Field::from_fn(grid, |x| {
        let mono: f64 = (0..d).map(|a| x[a].powi(alpha[a] as i32)).product();
        mono * bump(profile, norm(x, d) / n)
    })
}

/// `||Delta^{s/2}(x^alpha psi(x/n))||_2^2` for each `n`, with the log-log slope
/// against `d + 2(|alpha| - s)` and the exact dilation self-check.
pub fn polynomial_annihilation_study(
    grid: &GridSpec,
    alpha: &[u32; MAX_DIM],
    s: f64,
    profile: &Profile,
    scales: &[f64],
) -> Result<AnnihilationStudy> {
    let d = grid.dim();
    ensure!(s > 0.0 && s.is_finite(), Domain, "order s = {s} must be positive");
    ensure!(scales.len() >= 2, Domain, "need at least two scales n");
    ensure!(
        alpha[d..].iter().all(|&k| k == 0),
        Domain,
        "multi-index {alpha:?} exceeds dimension {d}"
    );
    let n_max = scales.iter().cloned().fold(0.0, f64::max);
    let n_min = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(n_min > 0.0, Domain, "scales must be positive");
    ensure!(
        2.0 * n_max < 0.5 * grid.period(),
        Precondition,
        "support radius 2n = {} does not fit in the half period {}",
        2.0 * n_max,
        0.5 * grid.period()
    );
    ensure!(
        n_min >= super::corpus::MIN_FEATURE_STEPS * grid.spacing(),
        Precondition,
        "bump transition width n = {n_min} is below {} grid steps",
        super::corpus::MIN_FEATURE_STEPS
    );
    let k: u32 = alpha.iter().sum();
    let reference_slope = d as f64 + 2.0 * (k as f64 - s);
    let sq = |f: &Field| -> Result<f64> { Ok(quadrature_lp_norm(&frac_laplacian(f, s)?, 2.0)?.powi(2)) };

    let squared_norms = scales
        .iter()
        .map(|&n| sq(&windowed_monomial(*grid, alpha, profile, n)))
        .collect::<Result<Vec<f64>>>()?;
    let mut table = StudyTable::new(&["quantity", "d", "k", "s", "n"]);
    let base = |q: &str, n: String| vec![q.to_string(), d.to_string(), k.to_string(), s.to_string(), n];
    let c0 = squared_norms[0] / scales[0].powf(reference_slope);
    for (n, v) in scales.iter().zip(&squared_norms) {
        table.push(base("sqnorm", n.to_string()), *v, c0 * n.powf(reference_slope));
    }
    let mut scaling_deviation: f64 = 0.0;
    for (n, v) in scales.iter().zip(&squared_norms) {
        let lg = n.log2();
        if lg.fract() != 0.0 {
            continue;
        }
        let dilated = grid.dilated(lg as i32);
        let unit = sq(&windowed_monomial(dilated, alpha, profile, 1.0))?;
        let reference = n.powf(reference_slope) * unit;
        let row = super::relative_deviation(*v, reference);
        scaling_deviation = scaling_deviation.max(row);
        table.push(base("scaling", n.to_string()), *v, reference);
    }
    let logs_n: Vec<f64> = scales.iter().map(|n| n.ln()).collect();
    let logs_v: Vec<f64> = squared_norms.iter().map(|v| v.ln()).collect();
    let slope = fit_slope(&logs_n, &logs_v);
    table.push(base("slope", String::new()), slope, reference_slope);
    Ok(AnnihilationStudy {
        table,
        scales: scales.to_vec(),
        squared_norms,
        slope,
        reference_slope,
        scaling_deviation,
    })
}
