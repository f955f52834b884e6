//! Direct-space estimators: finite differences, the homogeneous Lipschitz
//! seminorm, BMO and Sobolev-BMO.
//!
//! Suprema are taken over explicit finite plans, so every estimate is a lower
//! bound of the continuum value and grows when the plan is enlarged.

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{Field, GridSpec, MAX_DIM};
use crate::multiplier::{derivative, multi_indices};

/// Integer offset in grid steps.
pub type Offset = [i64; MAX_DIM];

/// A finite difference together with a per-sample wrap-around flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Differenced {
    pub field: Field,
    /// `true` where some stencil point left the fundamental period.
    pub wrapped: Vec<bool>,
}

impl Differenced {
    /// Largest magnitude over samples whose stencil did not wrap.
    pub fn interior_max_abs(&self) -> f64 {
        exec::max_of(
            self.field
                .values()
                .iter()
                .zip(&self.wrapped)
                .filter(|(_, w)| !**w)
                .map(|(v, _)| v.norm()),
        )
    }
}

fn binomial(k: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64).round()
}

/// Flat index of `flat + steps * h` with periodic indexing, and whether it wrapped.
fn shift(grid: &GridSpec, flat: usize, h: &Offset, steps: i64) -> (usize, bool) {
    let n = grid.n() as i64;
    let idx = grid.multi_index(flat);
    let mut out = [0usize; MAX_DIM];
    let mut wrapped = false;
    for a in 0..grid.dim() {
        let i = idx[a] as i64 + steps * h[a];
        wrapped |= !(0..n).contains(&i);
        out[a] = i.rem_euclid(n) as usize;
    }
    (grid.flat_index(&out), wrapped)
}

fn check_offset(grid: &GridSpec, h: &Offset) -> Result<()> {
    ensure!(
        h[..grid.dim()].iter().any(|&c| c != 0),
        Domain,
        "finite difference increment must be nonzero"
    );
    ensure!(
        h[grid.dim()..].iter().all(|&c| c == 0),
        Domain,
        "increment {h:?} has components beyond dimension {}",
        grid.dim()
    );
    Ok(())
}

/// `D_h^k f(x) = sum_{j=0}^k (-1)^{k-j} C(k,j) f(x + j h)` with periodic indexing.
pub fn finite_difference(f: &Field, h: &Offset, k: u32) -> Result<Differenced> {
    ensure!(k >= 1, Domain, "finite difference order k = {k} must be at least 1");
    let grid = *f.grid();
    check_offset(&grid, h)?;
    let weights: Vec<f64> = (0..=k)
        .map(|j| if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(k, j))
        .collect();
    let out = exec::map_range(grid.len(), |i| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut wrapped = false;
        for (j, w) in weights.iter().enumerate() {
            let (t, wr) = shift(&grid, i, h, j as i64);
            acc += f.value_at(t) * *w;
            wrapped |= wr;
        }
        (acc, wrapped)
    });
    let (values, wrapped): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok(Differenced {
        field: Field::new(grid, values, f.kind())?,
        wrapped,
    })
}

/// `D_h^k` through the recursion `D_h^k = D_h (D_h^{k-1})`.
pub fn finite_difference_recursive(f: &Field, h: &Offset, k: u32) -> Result<Differenced> {
    ensure!(k >= 1, Domain, "finite difference order k = {k} must be at least 1");
    let grid = *f.grid();
    check_offset(&grid, h)?;
    let mut cur = f.clone();
    for _ in 0..k {
        let values = exec::map_range(grid.len(), |i| cur.value_at(shift(&grid, i, h, 1).0) - cur.value_at(i));
        cur = Field::new(grid, values, f.kind())?;
    }
    let wrapped = exec::map_range(grid.len(), |i| {
        shift(&grid, i, h, k as i64).1 || shift(&grid, i, h, 0).1
    });
    Ok(Differenced { field: cur, wrapped })
}

/// Nonzero vectors in `{-1,0,1}^d` whose first nonzero entry is positive:
/// the axes plus all diagonals, one per line.
pub fn standard_directions(d: usize) -> Vec<Offset> {
    let mut out = Vec::new();
    let total = 3usize.pow(d as u32);
    for code in 0..total {
        let mut v = [0i64; MAX_DIM];
        let mut c = code;
        for a in (0..d).rev() {
            v[a] = (c % 3) as i64 - 1;
            c /= 3;
        }
        if v[..d].iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v);
        }
    }
    out
}

/// Increments `m * e` for directions `e` and integer magnitudes `m`, evaluated at
/// every base point whose whole stencil stays inside the period (and inside
/// `|x| <= region` when a region is set).
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSamplingPlan {
    pub directions: Vec<Offset>,
    pub magnitudes: Vec<i64>,
    pub region: Option<f64>,
}

impl DiffSamplingPlan {
    /// Axes plus diagonals with dyadic magnitudes `1, 2, ..., 2^levels`.
    pub fn standard(d: usize, levels: u32) -> Self {
        Self {
            directions: standard_directions(d),
            magnitudes: (0..=levels).map(|a| 1i64 << a).collect(),
            region: None,
        }
    }

    pub fn with_region(mut self, radius: f64) -> Self {
        self.region = Some(radius);
        self
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        ensure!(!self.directions.is_empty(), Plan, "difference plan has no directions");
        ensure!(!self.magnitudes.is_empty(), Plan, "difference plan has no magnitudes");
        ensure!(
            self.magnitudes.iter().all(|&m| m > 0),
            Plan,
            "difference magnitudes must be positive, got {:?}",
            self.magnitudes
        );
        for dir in &self.directions {
            check_offset(grid, dir).map_err(|e| crate::Error::Plan(e.to_string()))?;
        }
        Ok(())
    }
}

fn inside_region(grid: &GridSpec, flat: usize, region: Option<f64>) -> bool {
    match region {
        None => true,
        Some(r) => crate::field::norm(&grid.position(flat), grid.dim()) <= r,
    }
}

/// `max |D_h^{floor(gamma)+1} f(x)| / |h|^gamma` over the plan, interior stencils only.
pub fn lipschitz_norm(f: &Field, gamma: f64, plan: &DiffSamplingPlan) -> Result<f64> {
    ensure!(
        gamma > 0.0 && gamma.is_finite(),
        Domain,
        "Lipschitz order gamma = {gamma} must be positive"
    );
    ensure!(f.is_real(), Domain, "Lipschitz estimator needs a real field");
    let grid = *f.grid();
    plan.validate(&grid)?;
    let k = gamma.floor() as u32 + 1;
    let weights: Vec<f64> = (0..=k)
        .map(|j| if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(k, j))
        .collect();
    let mut increments = Vec::new();
    for dir in &plan.directions {
        for &m in &plan.magnitudes {
            let mut h = [0i64; MAX_DIM];
            for a in 0..grid.dim() {
                h[a] = m * dir[a];
            }
            increments.push(h);
        }
    }
    let per_increment: Vec<Option<f64>> = exec::map_slice(&increments, |h| {
        let len = h[..grid.dim()]
            .iter()
            .map(|&c| (c as f64 * grid.spacing()).powi(2))
            .sum::<f64>()
            .sqrt();
        let denom = len.powf(gamma);
        let mut best: Option<f64> = None;
        'base: for i in 0..grid.len() {
            let mut acc = 0.0;
            for (j, w) in weights.iter().enumerate() {
                let (t, wrapped) = shift(&grid, i, h, j as i64);
                if wrapped || !inside_region(&grid, t, plan.region) {
                    continue 'base;
                }
                acc += w * f.value_at(t).re;
            }
            let q = acc.abs() / denom;
            best = Some(best.map_or(q, |b| b.max(q)));
        }
        best
    });
    let admissible: Vec<f64> = per_increment.into_iter().flatten().collect();
    ensure!(
        !admissible.is_empty(),
        Plan,
        "no admissible stencil: every increment leaves the period or the region"
    );
    Ok(exec::max_of(admissible))
}

/// Parameters of a ball plan in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPlanConfig {
    /// Spacing of ball centers; rounded to a whole number of grid steps.
    pub center_spacing: f64,
    pub r0: f64,
    pub rho: f64,
    pub count: usize,
    /// Keep only balls contained in `|y| <= region`.
    pub region: Option<f64>,
}

impl BallPlanConfig {
    /// Centers every `L/64`, radii `L/64 * sqrt(2)^i` up to `L/4`.
    pub fn default_for(grid: &GridSpec) -> Self {
        let l = grid.period();
        Self {
            center_spacing: l / 64.0,
            r0: l / 64.0,
            rho: std::f64::consts::SQRT_2,
            count: 9,
            region: None,
        }
    }
}

/// Balls `(center, radius)` used by the BMO estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSamplingPlan {
    grid: GridSpec,
    radii: Vec<f64>,
    /// `(center flat index, radius index)`.
    balls: Vec<(usize, usize)>,
    /// Offsets (grid steps) inside each radius.
    stencils: Vec<Vec<Offset>>,
}

fn ball_offsets(grid: &GridSpec, r: f64) -> Vec<Offset> {
    let d = grid.dim();
    let h = grid.spacing();
    let m = (r / h).floor() as i64;
    let side = (2 * m + 1) as usize;
    let mut out = Vec::new();
    for code in 0..side.pow(d as u32) {
        let mut o = [0i64; MAX_DIM];
        let mut c = code;
        for a in (0..d).rev() {
            o[a] = (c % side) as i64 - m;
            c /= side;
        }
        let dist2: f64 = o[..d].iter().map(|&v| (v as f64 * h).powi(2)).sum();
        if dist2 <= r * r * (1.0 + 1e-12) {
            out.push(o);
        }
    }
    out
}

impl BallSamplingPlan {
    pub fn new(grid: &GridSpec, cfg: &BallPlanConfig) -> Result<Self> {
        let h = grid.spacing();
        let l = grid.period();
        ensure!(cfg.count >= 1, Plan, "ball plan needs at least one radius");
        ensure!(
            cfg.r0 >= 2.0 * h * (1.0 - 1e-12),
            Plan,
            "smallest radius r0 = {} is below 2h = {}",
            cfg.r0,
            2.0 * h
        );
        ensure!(
            cfg.rho > 1.0 && cfg.rho <= 2.0,
            Plan,
            "radius ratio rho = {} must lie in (1, 2]",
            cfg.rho
        );
        ensure!(cfg.center_spacing > 0.0, Plan, "center spacing must be positive");
        let radii: Vec<f64> = (0..cfg.count).map(|i| cfg.r0 * cfg.rho.powi(i as i32)).collect();
        let rmax = *radii.last().unwrap();
        ensure!(
            rmax <= l / 4.0 * (1.0 + 1e-12),
            Plan,
            "largest radius {rmax} exceeds L/4 = {}",
            l / 4.0
        );
        let stencils: Vec<Vec<Offset>> = radii.iter().map(|&r| ball_offsets(grid, r)).collect();
        for (r, s) in radii.iter().zip(&stencils) {
            ensure!(
                s.len() >= 8,
                Plan,
                "ball of radius {r} holds only {} grid points (need 8)",
                s.len()
            );
        }
        let stride = ((cfg.center_spacing / h).round() as usize).max(1);
        let half = grid.n() / 2;
        let d = grid.dim();
        let mut balls = Vec::new();
        for flat in 0..grid.len() {
            let idx = grid.multi_index(flat);
            if idx[..d]
                .iter()
                .any(|&i| (i as i64 - half as i64).rem_euclid(stride as i64) != 0)
            {
                continue;
            }
            let x = grid.position(flat);
            for (ri, &r) in radii.iter().enumerate() {
                let fits = x[..d].iter().all(|&c| c - r >= -0.5 * l && c + r < 0.5 * l);
                let in_region = cfg
                    .region
                    .is_none_or(|reg| crate::field::norm(&x, d) + r <= reg * (1.0 + 1e-12));
                if fits && in_region {
                    balls.push((flat, ri));
                }
            }
        }
        ensure!(
            !balls.is_empty(),
            Plan,
            "ball plan is empty after the containment checks"
        );
        Ok(Self {
            grid: *grid,
            radii,
            balls,
            stencils,
        })
    }

    pub fn default_for(grid: &GridSpec) -> Result<Self> {
        Self::new(grid, &BallPlanConfig::default_for(grid))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Grid samples of ball `b`.
    fn members(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        let (c, ri) = self.balls[b];
        self.stencils[ri].iter().map(move |o| shift(&self.grid, c, o, 1).0)
    }
}

/// Mean oscillation of real samples: `(1/n) sum |f_i - mean|`, written as
/// `sum |n f_i - S| / n^2` so that exact shifts of the data cancel exactly.
fn mean_oscillation(vals: &[f64]) -> f64 {
    let n = vals.len() as f64;
    let mut s = 0.0;
    for v in vals {
        s += v;
    }
    let dev: f64 = vals.iter().map(|v| (n * v - s).abs()).sum();
    dev / (n * n)
}

/// `max` over plan balls of the mean oscillation of `f`.
pub fn bmo_norm(f: &Field, plan: &BallSamplingPlan) -> Result<f64> {
    ensure!(f.is_real(), Domain, "BMO estimator needs a real field");
    f.grid().check_same(&plan.grid)?;
    let idx: Vec<usize> = (0..plan.len()).collect();
    let osc = exec::map_slice(&idx, |&b| {
        let vals: Vec<f64> = plan.members(b).map(|i| f.value_at(i).re).collect();
        mean_oscillation(&vals)
    });
    Ok(exec::max_of(osc))
}

/// `sum_{|alpha| = m} bmo_norm(d^alpha f)` with spectral derivatives.
pub fn sobolev_bmo_norm(f: &Field, m: u32, plan: &BallSamplingPlan) -> Result<f64> {
    ensure!(m >= 1, Domain, "Sobolev-BMO order m = {m} must be at least 1");
    let mut total = 0.0;
    for alpha in multi_indices(f.grid().dim(), m) {
        total += bmo_norm(&derivative(f, &alpha)?, plan)?;
    }
    Ok(total)
}
