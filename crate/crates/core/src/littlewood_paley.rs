//! Littlewood–Paley blocks on grid fields.
//!
//! The partition is built from a radial cutoff `psi` (1 on `|w| <= 3/2`,
//! 0 on `|w| >= 2`) as `eta(w) = psi(w) - psi(2w)`, and block `j` is the
//! multiplier `eta(2^-j w)`. Neighbouring blocks telescope, so on the covered
//! range the weights sum to one up to a few ulps.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{
    forward_transform, inverse_transform, norm, quadrature_lp_norm, Field, FieldKind, GridSpec, SpectrumField,
};

/// Relative spectral energy allowed outside the covered annuli.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Monotone transition `theta: [0,1] -> [0,1]` with `theta(0)=0`, `theta(1)=1`.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`, a C-infinity step.
pub fn smooth_step() -> Profile {
    Arc::new(|t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    })
}

/// `3t^2 - 2t^3`; only C^1, but admissible.
pub fn cubic_step() -> Profile {
    Arc::new(|t: f64| {
        let t = t.clamp(0.0, 1.0);
        t * t * (3.0 - 2.0 * t)
    })
}

/// The family `eta(2^-j .)` for `j` in `jmin..=jmax`.
#[derive(Clone)]
pub struct DyadicPartition {
    jmin: i32,
    jmax: i32,
    profile: Profile,
}

impl fmt::Debug for DyadicPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DyadicPartition")
            .field("jmin", &self.jmin)
            .field("jmax", &self.jmax)
            .finish()
    }
}

/// Validates the profile and builds the partition.
pub fn build_partition(jmin: i32, jmax: i32, profile: Profile) -> Result<DyadicPartition> {
    ensure!(
        jmin < jmax,
        Domain,
        "partition range needs jmin < jmax, got {jmin}..={jmax}"
    );
    ensure!(
        profile(0.0) == 0.0,
        Domain,
        "profile must satisfy theta(0) = 0, got {}",
        profile(0.0)
    );
    ensure!(
        profile(1.0) == 1.0,
        Domain,
        "profile must satisfy theta(1) = 1, got {}",
        profile(1.0)
    );
    const SAMPLES: usize = 1024;
    let mut prev = 0.0;
    for i in 1..=SAMPLES {
        let v = profile(i as f64 / SAMPLES as f64);
        ensure!(
            v >= prev && v.is_finite(),
            Domain,
            "profile is not monotone on [0,1] near t = {}",
            i as f64 / SAMPLES as f64
        );
        prev = v;
    }
    Ok(DyadicPartition { jmin, jmax, profile })
}

impl DyadicPartition {
    /// Range covering every nonzero frequency of `grid`: `jmin` is the
    /// coarsest annulus below the fundamental frequency, `jmax` the first
    /// whose flat top reaches the corner frequency `sqrt(d) pi N / L`.
    pub fn for_grid(grid: &GridSpec) -> Self {
        let (jmin, jmax) = default_range(grid);
        build_partition(jmin, jmax, smooth_step()).expect("default partition is admissible")
    }

    pub fn jmin(&self) -> i32 {
        self.jmin
    }

    pub fn jmax(&self) -> i32 {
        self.jmax
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i32> {
        self.jmin..=self.jmax
    }

    pub fn covers(&self, j: i32) -> bool {
        self.range().contains(&j)
    }

    /// Radial cutoff `psi(r)`.
    pub fn cutoff(&self, r: f64) -> f64 {
        if r <= 1.5 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            1.0 - (self.profile)((r - 1.5) / 0.5)
        }
    }

    /// Mother bump `eta(r) = psi(r) - psi(2r)`.
    pub fn bump(&self, r: f64) -> f64 {
        self.cutoff(r) - self.cutoff(2.0 * r)
    }

    /// Block weight `eta(2^-j r)`; defined for every `j`, not only covered ones.
    pub fn weight(&self, j: i32, r: f64) -> f64 {
        let scale = 2f64.powi(-j);
        self.cutoff(r * scale) - self.cutoff(2.0 * r * scale)
    }

    /// `sum_j eta(2^-j r)` over the covered range.
    pub fn coverage(&self, r: f64) -> f64 {
        self.range().map(|j| self.weight(j, r)).sum()
    }

    /// Radii on which the coverage telescopes to exactly one.
    pub fn exact_band(&self) -> (f64, f64) {
        (2f64.powi(self.jmin), 1.5 * 2f64.powi(self.jmax))
    }
}

/// Default `(jmin, jmax)` for a grid.
pub fn default_range(grid: &GridSpec) -> (i32, i32) {
    let jmin = grid.frequency_step().log2().ceil() as i32 - 1;
    let corner = (grid.dim() as f64).sqrt() * grid.nyquist();
    let mut jmax = (corner / 1.5).log2().ceil() as i32;
    while 1.5 * 2f64.powi(jmax) < corner {
        jmax += 1;
    }
    (jmin, jmax.max(jmin + 1))
}

/// Blocks `M_j f` for every covered `j`.
#[derive(Debug, Clone)]
pub struct LPBlockSet {
    grid: GridSpec,
    partition: DyadicPartition,
    blocks: Vec<(i32, Field)>,
}

impl LPBlockSet {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    /// `(j, M_j f)` in increasing `j`.
    pub fn blocks(&self) -> &[(i32, Field)] {
        &self.blocks
    }

    pub fn get(&self, j: i32) -> Option<&Field> {
        self.blocks.iter().find(|(k, _)| *k == j).map(|(_, b)| b)
    }

    /// `sum_j M_j f`, summed in increasing `j`.
    pub fn resum(&self) -> Field {
        let mut acc = Field::zeros(self.grid);
        for (_, b) in &self.blocks {
            acc = acc.add(b).expect("blocks share the grid");
        }
        acc
    }
}

fn block_from_spectrum(spec: &SpectrumField, j: i32, part: &DyadicPartition) -> Field {
    let kind = spec.kind();
    let d = spec.grid().dim();
    let out = spec.multiply(
        |w, i| {
            if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(part.weight(j, norm(w, d)), 0.0)
            }
        },
        kind,
    );
    inverse_transform(&out)
}

/// `M_j f = F^{-1}(eta(2^-j .) F f)`.
pub fn lp_block(f: &Field, j: i32, part: &DyadicPartition) -> Result<Field> {
    ensure!(
        part.covers(j),
        Domain,
        "block index j = {j} outside the partition range {}..={}",
        part.jmin,
        part.jmax
    );
    Ok(block_from_spectrum(&forward_transform(f), j, part))
}

/// All covered blocks from a single forward transform, evaluated in parallel over `j`.
pub fn lp_blocks(f: &Field, part: &DyadicPartition) -> LPBlockSet {
    let spec = forward_transform(f);
    blocks_of_spectrum(&spec, part)
}

pub(crate) fn blocks_of_spectrum(spec: &SpectrumField, part: &DyadicPartition) -> LPBlockSet {
    let js: Vec<i32> = part.range().collect();
    let blocks = exec::map_slice(&js, |&j| (j, block_from_spectrum(spec, j, part)));
    LPBlockSet {
        grid: *spec.grid(),
        partition: part.clone(),
        blocks,
    }
}

/// Relative spectral energy (zero bin excluded) not reproduced by the partition.
pub fn tail_energy(spec: &SpectrumField, part: &DyadicPartition) -> f64 {
    let g = spec.grid();
    let d = g.dim();
    let terms: Vec<(f64, f64)> = exec::map_range(g.len(), |i| {
        if i == 0 {
            return (0.0, 0.0);
        }
        let e = spec.coeffs()[i].norm_sqr();
        let miss = 1.0 - part.coverage(norm(&g.frequency(i), d));
        (e, e * miss * miss)
    });
    let total = exec::pairwise_sum_by(&terms, |t| t.0);
    let tail = exec::pairwise_sum_by(&terms, |t| t.1);
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

fn checked_blocks(f: &Field, part: &DyadicPartition) -> Result<LPBlockSet> {
    let spec = forward_transform(f);
    let tail = tail_energy(&spec, part);
    ensure!(
        tail <= TAIL_TOLERANCE,
        Precondition,
        "spectral energy outside the covered annuli is {tail:e} of the total (limit {TAIL_TOLERANCE:e})"
    );
    Ok(blocks_of_spectrum(&spec, part))
}

fn square_function_of(blocks: &LPBlockSet, s: f64) -> Field {
    let g = blocks.grid;
    let weights: Vec<f64> = blocks.blocks.iter().map(|(j, _)| 2f64.powf(*j as f64 * s)).collect();
    let values = exec::map_range(g.len(), |i| {
        let mut acc = 0.0;
        for ((_, b), w) in blocks.blocks.iter().zip(&weights) {
            acc += (w * b.value_at(i).norm()).powi(2);
        }
        Complex64::new(acc.sqrt(), 0.0)
    });
    Field::new(g, values, FieldKind::Real).expect("square function is real")
}

/// Pointwise `(sum_j (2^{js} |M_j f|)^2)^{1/2}`.
pub fn lp_square_function(f: &Field, s: f64, part: &DyadicPartition) -> Result<Field> {
    Ok(square_function_of(&checked_blocks(f, part)?, s))
}

/// L^p norm of the weighted square function.
pub fn lp_sobolev_norm(f: &Field, s: f64, p: f64, part: &DyadicPartition) -> Result<f64> {
    quadrature_lp_norm(&lp_square_function(f, s, part)?, p)
}

/// `max_j 2^{j gamma} ||M_j f||_inf`.
pub fn lp_lipschitz_norm(f: &Field, gamma: f64, part: &DyadicPartition) -> Result<f64> {
    ensure!(gamma > 0.0, Domain, "Lipschitz order gamma = {gamma} must be positive");
    let blocks = checked_blocks(f, part)?;
    Ok(exec::max_of(
        blocks
            .blocks
            .iter()
            .map(|(j, b)| 2f64.powf(*j as f64 * gamma) * b.max_abs()),
    ))
}

/// `sup_x (sum_j |M_j f(x)|^2)^{1/2}`.
pub fn lp_bmo_norm(f: &Field, part: &DyadicPartition) -> Result<f64> {
    Ok(square_function_of(&checked_blocks(f, part)?, 0.0).max_abs())
}
