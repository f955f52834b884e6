//! Periodic grids, sampled fields, their spectra and grid quadrature.
//!
//! A [`GridSpec`] samples `[-L/2, L/2)^d` at `N` points per axis, so the
//! origin is always a sample point (index `N/2` on every axis). Values are
//! stored row-major with axis 0 slowest.
//!
//! Spectra use the angular-frequency convention
//! `F(w) = \int f(x) e^{-i x.w} dx`, approximated by the DFT scaled by `h^d`
//! together with the phase shift that accounts for the grid starting at
//! `-L/2`. Bin `k` sits at `w = 2 pi k / L`, `k` in `-N/2 .. N/2-1`.

mod io;

pub use io::{read_fld, read_fld_file, write_fld, write_fld_file, FLD_MAGIC};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure, Error, Result};
use crate::exec;

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// A point or frequency vector; only the first `d` entries are meaningful.
pub type Point = [f64; MAX_DIM];

/// Uniform periodic grid over `[-L/2, L/2)^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    period: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, period: f64, n: usize) -> Result<Self> {
        ensure!(
            (1..=MAX_DIM).contains(&dim),
            Domain,
            "dimension d = {dim} must be in 1..=3"
        );
        ensure!(
            period.is_finite() && period > 0.0,
            Domain,
            "period L = {period} must be positive and finite"
        );
        ensure!(
            n >= 8 && n.is_power_of_two(),
            Domain,
            "samples per axis N = {n} must be a power of two >= 8"
        );
        Ok(Self { dim, period, n })
    }

    /// Desk-scale defaults: d=1 L=40 N=512, d=2 L=20 N=128, d=3 L=10 N=32.
    pub fn desk(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 40.0, 512),
            2 => Self::new(2, 20.0, 128),
            3 => Self::new(3, 10.0, 32),
            _ => Err(Error::Domain(format!("dimension d = {dim} must be in 1..=3"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of samples `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fundamental angular frequency `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    /// Largest per-axis angular frequency magnitude, `pi N / L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.period
    }

    /// Coordinate of sample `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.period + i as f64 * self.spacing()
    }

    /// Signed wavenumber of FFT-ordered bin `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT-ordered bin for a signed wavenumber.
    pub fn bin(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rem % self.n;
            rem /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical position of a sample.
    pub fn position(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    /// Angular frequency of an FFT-ordered bin.
    pub fn frequency(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let dw = self.frequency_step();
        let mut w = [0.0; MAX_DIM];
        for a in 0..self.dim {
            w[a] = dw * self.wavenumber(idx[a]) as f64;
        }
        w
    }

    /// Flat index of the sample at the origin.
    pub fn origin(&self) -> usize {
        self.flat_index(&[self.n / 2; MAX_DIM])
    }

    /// Flat index of the sample nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut idx = [0; MAX_DIM];
        for a in 0..self.dim {
            let i = ((x[a] + 0.5 * self.period) / self.spacing()).round();
            idx[a] = i.clamp(0.0, (self.n - 1) as f64) as usize;
        }
        self.flat_index(&idx)
    }

    /// Grid on which the same samples represent `x -> f(2^k x)`.
    pub fn dilated(&self, k: i32) -> GridSpec {
        GridSpec {
            period: self.period * 2f64.powi(-k),
            ..*self
        }
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        ensure!(self == other, Structure, "grid mismatch: {self:?} vs {other:?}");
        Ok(())
    }
}

/// Euclidean norm of the first `d` components.
pub fn norm(v: &Point, d: usize) -> f64 {
    v[..d].iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

/// Samples of a function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
    kind: FieldKind,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, kind: FieldKind) -> Result<Self> {
        ensure!(
            values.len() == grid.len(),
            Structure,
            "expected {} values for the grid, got {}",
            grid.len(),
            values.len()
        );
        let field = Self { grid, values, kind };
        if kind == FieldKind::Real {
            let max = field.max_abs();
            let max_im = exec::max_of(field.values.iter().map(|z| z.im.abs()));
            ensure!(
                max_im <= 1e-10 * max,
                Structure,
                "real field carries imaginary part {max_im:e} (max magnitude {max:e})"
            );
        }
        Ok(field)
    }

    pub fn from_real(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let values = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Self::new(grid, values, FieldKind::Real)
    }

    /// Samples a real function of position.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&Point) -> f64 + Sync + Send) -> Self {
        let values = exec::map_range(grid.len(), |i| Complex64::new(f(&grid.position(i)), 0.0));
        Self {
            grid,
            values,
            kind: FieldKind::Real,
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            kind: FieldKind::Real,
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(c, 0.0); grid.len()],
            kind: FieldKind::Real,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.kind == FieldKind::Real
    }

    /// Real parts of the samples.
    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn value_at(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }

    pub fn max_abs(&self) -> f64 {
        exec::max_of(self.values.iter().map(|z| z.norm()))
    }

    /// Same samples, reinterpreted on another grid of equal shape.
    pub fn with_grid(&self, grid: GridSpec) -> Result<Self> {
        ensure!(
            grid.dim == self.grid.dim && grid.n == self.grid.n,
            Structure,
            "cannot move samples from {:?} to {grid:?}",
            self.grid
        );
        Ok(Self { grid, ..self.clone() })
    }

    /// The same samples read as `x -> f(2^k x)`.
    pub fn dilated(&self, k: i32) -> Self {
        Self {
            grid: self.grid.dilated(k),
            ..self.clone()
        }
    }

    /// Drops imaginary parts and marks the field real.
    pub fn into_real(mut self) -> Self {
        for z in &mut self.values {
            z.im = 0.0;
        }
        self.kind = FieldKind::Real;
        self
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
            kind: FieldKind::Complex,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|&z| z * c).collect(),
            ..self.clone()
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|&z| z + c).collect(),
            ..self.clone()
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let kind = if self.is_real() && other.is_real() {
            FieldKind::Real
        } else {
            FieldKind::Complex
        };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| x + y * a)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            kind,
        })
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// `max |self - other|`.
    pub fn max_diff(&self, other: &Field) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(exec::max_of(
            self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()),
        ))
    }

    /// Grid L^1 norm `h^d sum |f|`.
    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_volume() * exec::pairwise_sum_by(&self.values, |z| z.norm())
    }

    /// Grid integral `h^d sum f` of the real part.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * exec::pairwise_sum_by(&self.values, |z| z.re)
    }
}

/// Discrete Fourier coefficients of a [`Field`], stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    kind: FieldKind,
}

impl SpectrumField {
    /// `kind` records whether the inverse transform should be read as real.
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>, kind: FieldKind) -> Result<Self> {
        ensure!(
            coeffs.len() == grid.len(),
            Structure,
            "expected {} coefficients, got {}",
            grid.len(),
            coeffs.len()
        );
        Ok(Self { grid, coeffs, kind })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Coefficient at signed wavenumber vector `k`.
    pub fn at(&self, k: &[i64]) -> Complex64 {
        let mut idx = [0; MAX_DIM];
        for a in 0..self.grid.dim {
            idx[a] = self.grid.bin(k[a]);
        }
        self.coeffs[self.grid.flat_index(&idx)]
    }

    /// Coefficient of the zero frequency.
    pub fn dc(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        exec::max_of(self.coeffs.iter().map(|z| z.norm()))
    }

    /// Multiplies every bin by `m(w, flat)`.
    pub fn multiply(&self, m: impl Fn(&Point, usize) -> Complex64 + Sync + Send, kind: FieldKind) -> Self {
        let grid = self.grid;
        let coeffs = exec::map_range(grid.len(), |i| self.coeffs[i] * m(&grid.frequency(i), i));
        Self { grid, coeffs, kind }
    }

    /// Evaluates the inverse transform at a single sample, `L^-d sum F e^{i w.x}`.
    pub fn eval_at(&self, flat: usize) -> Complex64 {
        let g = &self.grid;
        let x = g.position(flat);
        let terms: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let w = g.frequency(i);
                let phase: f64 = (0..g.dim).map(|a| w[a] * x[a]).sum();
                self.coeffs[i] * Complex64::from_polar(1.0, phase)
            })
            .collect();
        let re = exec::pairwise_sum_by(&terms, |z| z.re);
        let im = exec::pairwise_sum_by(&terms, |z| z.im);
        Complex64::new(re, im) / g.period.powi(g.dim as i32)
    }
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    type Cache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>;
    static PLANS: OnceLock<Cache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((n, forward))
        .or_insert_with(|| {
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Unnormalized FFT along every axis of a row-major `N^d` array.
fn fft_nd(grid: &GridSpec, data: &mut [Complex64], forward: bool) {
    let n = grid.n;
    let d = grid.dim;
    let fft = plan(n, forward);
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            exec::for_each_chunk_mut(data, n, |_, line| fft.process(line));
            continue;
        }
        // Lines along `axis`: outer blocks of size n*stride, `stride` lines each.
        let block = n * stride;
        exec::for_each_chunk_mut(data, block, |_, chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for offset in 0..stride {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = chunk[offset + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    chunk[offset + i * stride] = *v;
                }
            }
        });
    }
}

/// Sign `(-1)^{sum_a i_a}`, the phase from placing the first sample at `-L/2`.
fn half_period_sign(grid: &GridSpec, flat: usize) -> f64 {
    let idx = grid.multi_index(flat);
    if idx[..grid.dim].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Approximates `F(w_k) = \int f(x) e^{-i x.w_k} dx` on every grid frequency.
pub fn forward_transform(f: &Field) -> SpectrumField {
    let grid = f.grid;
    let mut data = f.values.clone();
    fft_nd(&grid, &mut data, true);
    let hd = grid.cell_volume();
    exec::for_each_chunk_mut(&mut data, grid.n, |c, chunk| {
        let base = c * grid.n;
        for (j, z) in chunk.iter_mut().enumerate() {
            *z *= hd * half_period_sign(&grid, base + j);
        }
    });
    SpectrumField {
        grid,
        coeffs: data,
        kind: f.kind,
    }
}

/// Exact inverse of [`forward_transform`] up to roundoff.
pub fn inverse_transform(spec: &SpectrumField) -> Field {
    let grid = spec.grid;
    let mut data = spec.coeffs.clone();
    let scale = 1.0 / (grid.cell_volume() * grid.len() as f64);
    exec::for_each_chunk_mut(&mut data, grid.n, |c, chunk| {
        let base = c * grid.n;
        for (j, z) in chunk.iter_mut().enumerate() {
            *z *= scale * half_period_sign(&grid, base + j);
        }
    });
    fft_nd(&grid, &mut data, false);
    let field = Field {
        grid,
        values: data,
        kind: FieldKind::Complex,
    };
    match spec.kind {
        FieldKind::Real => field.into_real(),
        FieldKind::Complex => field,
    }
}

/// Exponent of an L^p norm; `f64::INFINITY` selects the sup norm.
pub fn quadrature_lp_norm(f: &Field, p: f64) -> Result<f64> {
    ensure!(p > 0.0, Domain, "exponent p = {p} must be positive");
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let s = exec::pairwise_sum_by(&f.values, |z| z.norm().powf(p));
    Ok((f.grid.cell_volume() * s).powf(1.0 / p))
}
