//! Canonical representatives of classes modulo polynomials.
//!
//! A class `[u]` is represented by a band-covered periodic field `u`; its
//! realization is the sum of the Littlewood–Paley blocks of `u` corrected by
//! polynomials chosen per regime so that the normalization of the target
//! space holds at the origin or on a fixed ball `B`. Because polynomials are
//! not periodic, the output is a [`Representative`]: a periodic field plus an
//! explicit [`Polynomial`]. Fractional Laplacians of order `s` annihilate the
//! polynomial part, which has degree at most `m = floor(s - d/p)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::direct_norms::Offset;
use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{
    forward_transform, inverse_transform, norm, quadrature_lp_norm, Field, GridSpec, Point, SpectrumField, MAX_DIM,
};
use crate::littlewood_paley::{blocks_of_spectrum, tail_energy, DyadicPartition, TAIL_TOLERANCE};
use crate::multiplier::{apply_to_spectrum, frac_laplacian, multi_indices, MultiplierSpec};

/// Tolerance for detecting integral `s - d/p`.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;
/// Relative residual allowed by [`verify_canonical_constraints`].
pub const CONSTRAINT_TOLERANCE: f64 = 1e-7;
/// Relative spectral tail allowed by [`taylor_polynomial`].
pub const SMOOTHNESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `s < d/p`.
    Subcritical,
    /// `s - d/p` a nonnegative integer.
    Critical,
    /// `s > d/p` and `s - d/p` not an integer.
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub s: f64,
    pub p: f64,
    pub d: usize,
    /// `floor(s - d/p)`; negative exactly in the subcritical regime.
    pub m: i64,
    /// Sobolev exponent `1/p* = 1/p - s/d`, subcritical only.
    pub pstar: Option<f64>,
    pub regime: Regime,
}

impl RegimeParams {
    /// Degree of the polynomials the class is taken modulo, if any.
    pub fn degree(&self) -> Option<u32> {
        (self.m >= 0).then_some(self.m as u32)
    }

    /// `s - d/p`.
    pub fn excess(&self) -> f64 {
        self.s - self.d as f64 / self.p
    }
}

pub fn classify_regime(s: f64, p: f64, d: usize) -> Result<RegimeParams> {
    ensure!(s > 0.0 && s.is_finite(), Domain, "smoothness s = {s} must be positive");
    ensure!(
        p > 1.0 && p.is_finite(),
        Domain,
        "integrability p = {p} must lie in (1, inf)"
    );
    ensure!((1..=MAX_DIM).contains(&d), Domain, "dimension d = {d} must be in 1..=3");
    let excess = s - d as f64 / p;
    let nearest = excess.round();
    let (regime, m) = if (excess - nearest).abs() < CRITICAL_TOLERANCE && nearest >= 0.0 {
        (Regime::Critical, nearest as i64)
    } else if excess < 0.0 {
        (Regime::Subcritical, excess.floor() as i64)
    } else {
        (Regime::Supercritical, excess.floor() as i64)
    };
    let pstar = (regime == Regime::Subcritical).then(|| 1.0 / (1.0 / p - s / d as f64));
    Ok(RegimeParams {
        s,
        p,
        d,
        m,
        pstar,
        regime,
    })
}

/// Multi-index with unused trailing slots zero.
pub type MultiIndex = [u32; MAX_DIM];

fn to_multi(alpha: &[u32]) -> MultiIndex {
    let mut a = [0; MAX_DIM];
    a[..alpha.len()].copy_from_slice(alpha);
    a
}

fn factorial(alpha: &MultiIndex) -> f64 {
    alpha
        .iter()
        .map(|&k| (1..=k).map(|i| i as f64).product::<f64>())
        .product()
}

/// Formats a multi-index over `d` variables as `a_b_c`.
pub fn format_multi(alpha: &MultiIndex, d: usize) -> String {
    alpha[..d].iter().map(|k| k.to_string()).collect::<Vec<_>>().join("_")
}

/// `sum_alpha c_alpha (x - x0)^alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    center: Point,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize, center: Point) -> Self {
        Self {
            dim,
            center,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    /// Adds `c (x - x0)^alpha`.
    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        *self.coeffs.entry(alpha).or_insert(0.0) += c;
    }

    /// Nonzero-or-stored terms in multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.coeffs.iter()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(a, _)| a.iter().sum())
            .max()
    }

    pub fn max_coeff(&self) -> f64 {
        exec::max_of(self.coeffs.values().map(|c| c.abs()))
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        ensure!(
            self.dim == other.dim && self.center == other.center,
            Structure,
            "polynomials differ in dimension or center"
        );
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(*a, *c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c *= k);
        out
    }

    /// `d^alpha P`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Polynomial {
        let mut out = Polynomial::zero(self.dim, self.center);
        for (beta, c) in &self.coeffs {
            if (0..MAX_DIM).any(|a| beta[a] < alpha[a]) {
                continue;
            }
            let mut gamma = *beta;
            let mut factor = *c;
            for a in 0..MAX_DIM {
                for i in 0..alpha[a] {
                    factor *= (beta[a] - i) as f64;
                }
                gamma[a] -= alpha[a];
            }
            out.add_term(gamma, factor);
        }
        out
    }

    /// Nested Horner evaluation, one variable at a time.
    pub fn eval(&self, x: &Point) -> f64 {
        let mut y = [0.0; MAX_DIM];
        for a in 0..self.dim {
            y[a] = x[a] - self.center[a];
        }
        let terms: Vec<(MultiIndex, f64)> = self.coeffs.iter().map(|(a, c)| (*a, *c)).collect();
        horner(&terms, &y, 0, self.dim)
    }

    /// Values at every grid sample.
    pub fn sample(&self, grid: &GridSpec) -> Vec<f64> {
        exec::map_range(grid.len(), |i| self.eval(&grid.position(i)))
    }
}

fn horner(terms: &[(MultiIndex, f64)], y: &Point, var: usize, dim: usize) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    if var == dim {
        return terms.iter().map(|(_, c)| c).sum();
    }
    let top = terms.iter().map(|(a, _)| a[var]).max().unwrap_or(0);
    let mut acc = 0.0;
    for k in (0..=top).rev() {
        let inner: Vec<(MultiIndex, f64)> = terms.iter().filter(|(a, _)| a[var] == k).copied().collect();
        acc = acc * y[var] + horner(&inner, y, var + 1, dim);
    }
    acc
}

/// `d^alpha f` at one sample through the spectrum, real part for real fields.
fn spectral_derivative_at(spec: &SpectrumField, alpha: &MultiIndex, flat: usize) -> Result<f64> {
    let d = spec.grid().dim();
    let dspec = apply_to_spectrum(spec, &MultiplierSpec::derivative(&alpha[..d]), 0.0)?;
    Ok(dspec.eval_at(flat).re)
}

fn taylor_from_spectrum(spec: &SpectrumField, m: u32, at: usize) -> Result<Polynomial> {
    let g = spec.grid();
    let mut poly = Polynomial::zero(g.dim(), g.position(at));
    for order in 0..=m {
        for alpha in multi_indices(g.dim(), order) {
            let alpha = to_multi(&alpha);
            let v = spectral_derivative_at(spec, &alpha, at)?;
            poly.add_term(alpha, v / factorial(&alpha));
        }
    }
    Ok(poly)
}

/// Largest coefficient in the outer quarter of the band relative to the largest overall.
pub fn spectral_tail(spec: &SpectrumField) -> f64 {
    let g = spec.grid();
    let edge = (3 * g.n() / 8) as i64;
    let outer = exec::max_of((0..g.len()).filter_map(|i| {
        let idx = g.multi_index(i);
        (0..g.dim())
            .any(|a| g.wavenumber(idx[a]).abs() >= edge)
            .then(|| spec.coeffs()[i].norm())
    }));
    let max = spec.max_abs();
    if max == 0.0 {
        0.0
    } else {
        outer / max
    }
}

/// `P_{f;m;x0}` with spectral derivatives, `x0` a grid sample.
pub fn taylor_polynomial(f: &Field, m: u32, x0: usize) -> Result<Polynomial> {
    ensure!(f.is_real(), Domain, "Taylor data is only defined here for real fields");
    ensure!(x0 < f.grid().len(), Domain, "sample index {x0} outside the grid");
    let spec = forward_transform(f);
    let tail = spectral_tail(&spec);
    ensure!(
        tail <= SMOOTHNESS_TOLERANCE,
        Precondition,
        "field is not resolved: outer-band spectral tail {tail:e} exceeds {SMOOTHNESS_TOLERANCE:e}"
    );
    taylor_from_spectrum(&spec, m, x0)
}

/// Closed ball used for the ball normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// Center 0, radius `L/8`.
    pub fn default_for(grid: &GridSpec) -> Self {
        Self {
            center: [0.0; MAX_DIM],
            radius: grid.period() / 8.0,
        }
    }

    /// Grid samples inside the ball; at least eight, all inside the period.
    pub fn members(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        let d = grid.dim();
        let half = 0.5 * grid.period();
        ensure!(self.radius > 0.0, Plan, "ball radius {} must be positive", self.radius);
        ensure!(
            (0..d).all(|a| self.center[a] - self.radius >= -half && self.center[a] + self.radius < half),
            Plan,
            "ball (center {:?}, radius {}) leaves the fundamental period",
            &self.center[..d],
            self.radius
        );
        let c = grid.nearest(&self.center);
        let m = (self.radius / grid.spacing()).ceil() as i64 + 1;
        let side = (2 * m + 1) as usize;
        let mut out = Vec::new();
        for code in 0..side.pow(d as u32) {
            let mut o: Offset = [0; MAX_DIM];
            let mut k = code;
            for a in (0..d).rev() {
                o[a] = (k % side) as i64 - m;
                k /= side;
            }
            let idx = grid.multi_index(c);
            let mut t = [0usize; MAX_DIM];
            let mut inside = true;
            for a in 0..d {
                let i = idx[a] as i64 + o[a];
                inside &= (0..grid.n() as i64).contains(&i);
                t[a] = i.max(0) as usize;
            }
            if !inside {
                continue;
            }
            let flat = grid.flat_index(&t);
            let x = grid.position(flat);
            let mut diff = [0.0; MAX_DIM];
            for a in 0..d {
                diff[a] = x[a] - self.center[a];
            }
            if norm(&diff, d) <= self.radius * (1.0 + 1e-12) {
                out.push(flat);
            }
        }
        out.sort_unstable();
        ensure!(
            out.len() >= 8,
            Plan,
            "ball holds {} grid samples, need at least 8",
            out.len()
        );
        Ok(out)
    }
}

/// A periodic field plus an explicit polynomial, `f(x) = periodic(x) + poly(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representative {
    pub periodic: Field,
    pub poly: Polynomial,
}

impl Representative {
    pub fn from_field(f: Field) -> Self {
        let d = f.grid().dim();
        Self {
            periodic: f,
            poly: Polynomial::zero(d, [0.0; MAX_DIM]),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.periodic.grid()
    }

    /// `f` at grid sample `flat`.
    pub fn value_at(&self, flat: usize) -> f64 {
        self.periodic.value_at(flat).re + self.poly.eval(&self.grid().position(flat))
    }

    /// Pointwise samples on the fundamental period.
    pub fn samples(&self) -> Field {
        let g = *self.grid();
        let vals = exec::map_range(g.len(), |i| self.value_at(i));
        Field::from_real(g, vals).expect("grid-sized")
    }

    pub fn add_field(&self, other: &Field) -> Result<Self> {
        Ok(Self {
            periodic: self.periodic.add(other)?,
            poly: self.poly.clone(),
        })
    }

    pub fn add_polynomial(&self, p: &Polynomial) -> Result<Self> {
        Ok(Self {
            periodic: self.periodic.clone(),
            poly: self.poly.add(p)?,
        })
    }

    /// Taylor polynomial at the origin: spectral part plus exact polynomial calculus.
    pub fn taylor_at_origin(&self, m: u32) -> Result<Polynomial> {
        let spec = forward_transform(&self.periodic);
        let mut out = taylor_from_spectrum(&spec, m, self.grid().origin())?;
        let zero = [0.0; MAX_DIM];
        for order in 0..=m {
            for alpha in multi_indices(self.grid().dim(), order) {
                let alpha = to_multi(&alpha);
                out.add_term(alpha, self.poly.derivative(&alpha).eval(&zero) / factorial(&alpha));
            }
        }
        Ok(out)
    }

    /// Mean of `d^alpha f` over the grid samples of `ball`.
    pub fn ball_average(&self, alpha: &MultiIndex, ball: &Ball) -> Result<f64> {
        let g = *self.grid();
        let members = ball.members(&g)?;
        let spec = forward_transform(&self.periodic);
        let dspec = apply_to_spectrum(&spec, &MultiplierSpec::derivative(&alpha[..g.dim()]), 0.0)?;
        let dper = inverse_transform(&dspec);
        let dpoly = self.poly.derivative(alpha);
        let vals: Vec<f64> = members
            .iter()
            .map(|&i| dper.value_at(i).re + dpoly.eval(&g.position(i)))
            .collect();
        Ok(exec::pairwise_sum(&vals) / vals.len() as f64)
    }

    /// `||Delta^{s/2} f||_{L^p}`; the polynomial part is annihilated.
    pub fn energy_norm(&self, s: f64, p: f64) -> Result<f64> {
        quadrature_lp_norm(&frac_laplacian(&self.periodic, s)?, p)
    }

    /// Writes the polynomial part as CSV `alpha,coeff`.
    pub fn write_polynomial_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["alpha", "coeff"])?;
        for (a, c) in self.poly.terms() {
            out.write_record([format_multi(a, self.poly.dim), format!("{c:e}")])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a polynomial written by [`Representative::write_polynomial_csv`].
    pub fn read_polynomial_csv(dim: usize, r: impl std::io::Read) -> Result<Polynomial> {
        let mut rd = csv::Reader::from_reader(r);
        let mut poly = Polynomial::zero(dim, [0.0; MAX_DIM]);
        for rec in rd.records() {
            let rec = rec?;
            let parse_err = || crate::Error::Format(format!("malformed polynomial row {rec:?}"));
            let alpha: Vec<u32> = rec
                .get(0)
                .ok_or_else(parse_err)?
                .split('_')
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err())?;
            ensure!(
                alpha.len() == dim,
                Format,
                "multi-index {alpha:?} does not match dimension {dim}"
            );
            let c: f64 = rec.get(1).ok_or_else(parse_err)?.parse().map_err(|_| parse_err())?;
            poly.add_term(to_multi(&alpha), c);
        }
        Ok(poly)
    }
}

/// Per-block record of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagnostic {
    pub j: i32,
    /// `max |M_j u|`.
    pub block_sup: f64,
    /// `||M_j u||_{L^p}`.
    pub block_lp: f64,
    /// Polynomial subtracted from this block (empty when none).
    pub removed: Polynomial,
    /// Sup over the ball `B` of the corrected term.
    pub contribution: f64,
}

/// One residual of a canonical constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub regime: Regime,
    pub residuals: Vec<Residual>,
    /// `||Delta^{s/2} f||_{L^p}`.
    pub energy_norm: f64,
    /// Field scale the residuals are compared against.
    pub scale: f64,
    pub passed: bool,
}

impl ConstraintReport {
    pub fn max_residual(&self) -> f64 {
        exec::max_of(self.residuals.iter().map(|r| r.value.abs()))
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["constraint", "value", "threshold"])?;
        let thr = CONSTRAINT_TOLERANCE * self.scale;
        for r in &self.residuals {
            out.write_record([r.name.clone(), format!("{:e}", r.value), format!("{thr:e}")])?;
        }
        out.write_record([
            "energy_norm".to_string(),
            format!("{:e}", self.energy_norm),
            String::new(),
        ])?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationResult {
    pub representative: Representative,
    pub params: RegimeParams,
    pub ball: Ball,
    pub blocks: Vec<BlockDiagnostic>,
    /// Ball averages removed in the final normalization, by multi-index.
    pub ball_removed: Vec<(MultiIndex, f64)>,
    /// Constraint residuals of the series before the final normalization.
    pub series_residuals: Vec<Residual>,
    pub constraints: ConstraintReport,
}

impl RealizationResult {
    /// Per-block CSV: `j, block_sup, block_lp, contribution, taylor_<alpha>...`.
    pub fn write_diagnostics_csv(&self, w: impl Write) -> Result<()> {
        let d = self.params.d;
        let alphas: Vec<MultiIndex> = match self.params.degree() {
            Some(m) => (0..=m)
                .flat_map(|k| multi_indices(d, k))
                .map(|a| to_multi(&a))
                .collect(),
            None => Vec::new(),
        };
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![
            "j".to_string(),
            "block_sup".into(),
            "block_lp".into(),
            "contribution".into(),
        ];
        header.extend(alphas.iter().map(|a| format!("taylor_{}", format_multi(a, d))));
        out.write_record(&header)?;
        for b in &self.blocks {
            let mut row = vec![
                b.j.to_string(),
                format!("{:e}", b.block_sup),
                format!("{:e}", b.block_lp),
                format!("{:e}", b.contribution),
            ];
            row.extend(alphas.iter().map(|a| format!("{:e}", b.removed.coeff(a))));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `T_j / T_{j-1}` for the outer tail sums `T_j = sum_{|i| >= j} contribution_i`, `j >= 1`.
    pub fn tail_ratios(&self) -> Vec<(i32, f64)> {
        let tail = |j: i32| -> f64 {
            self.blocks
                .iter()
                .filter(|b| b.j.abs() >= j)
                .map(|b| b.contribution)
                .sum()
        };
        let top = self.blocks.iter().map(|b| b.j.abs()).max().unwrap_or(0);
        (1..=top)
            .map(|j| {
                let (prev, cur) = (tail(j - 1), tail(j));
                (j, if prev == 0.0 { 0.0 } else { cur / prev })
            })
            .collect()
    }
}

fn scale_of(rep: &Representative) -> f64 {
    let s = rep.periodic.max_abs();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn taylor_residuals(rep: &Representative, max_order: u32, residuals: &mut Vec<Residual>) -> Result<()> {
    let d = rep.grid().dim();
    let t = rep.taylor_at_origin(max_order)?;
    for order in 0..=max_order {
        for alpha in multi_indices(d, order) {
            let alpha = to_multi(&alpha);
            residuals.push(Residual {
                name: format!("taylor[{}]", format_multi(&alpha, d)),
                value: t.coeff(&alpha),
            });
        }
    }
    Ok(())
}

fn ball_residuals(rep: &Representative, order: u32, ball: &Ball, residuals: &mut Vec<Residual>) -> Result<()> {
    let d = rep.grid().dim();
    for alpha in multi_indices(d, order) {
        let alpha = to_multi(&alpha);
        residuals.push(Residual {
            name: format!("ball_avg[{}]", format_multi(&alpha, d)),
            value: rep.ball_average(&alpha, ball)?,
        });
    }
    Ok(())
}

/// Residuals of the normalization defining the canonical space for `rp`.
fn constraint_residuals(rep: &Representative, rp: &RegimeParams, ball: &Ball) -> Result<Vec<Residual>> {
    let mut residuals = Vec::new();
    match (rp.regime, rp.degree()) {
        (Regime::Subcritical, _) | (_, None) => {}
        (Regime::Critical, Some(0)) => ball_residuals(rep, 0, ball, &mut residuals)?,
        (Regime::Critical, Some(m)) => {
            taylor_residuals(rep, m - 1, &mut residuals)?;
            ball_residuals(rep, m, ball, &mut residuals)?;
        }
        (Regime::Supercritical, Some(m)) => taylor_residuals(rep, m, &mut residuals)?,
    }
    Ok(residuals)
}

/// Measures the canonical normalization of `rep`: Taylor data at 0 and/or ball
/// averages per regime, plus `||Delta^{s/2} f||_{L^p}`.
pub fn verify_canonical_constraints(rep: &Representative, rp: &RegimeParams, ball: &Ball) -> Result<ConstraintReport> {
    ensure!(
        rep.grid().dim() == rp.d,
        Structure,
        "regime dimension {} does not match the grid dimension {}",
        rp.d,
        rep.grid().dim()
    );
    let residuals = constraint_residuals(rep, rp, ball)?;
    let scale = scale_of(rep);
    let energy_norm = rep.energy_norm(rp.s, rp.p)?;
    let passed = residuals.iter().all(|r| r.value.abs() <= CONSTRAINT_TOLERANCE * scale) && energy_norm.is_finite();
    Ok(ConstraintReport {
        regime: rp.regime,
        residuals,
        energy_norm,
        scale,
        passed,
    })
}

fn ball_sup(field: &Field, poly: &Polynomial, members: &[usize]) -> f64 {
    let g = field.grid();
    exec::max_of(
        members
            .iter()
            .map(|&i| (field.value_at(i).re - poly.eval(&g.position(i))).abs()),
    )
}

/// Realizes the class of `u` in the canonical space for `rp`.
pub fn realize(u: &Field, rp: &RegimeParams, part: &DyadicPartition, ball: &Ball) -> Result<RealizationResult> {
    let grid = *u.grid();
    ensure!(u.is_real(), Domain, "realization expects a real field");
    ensure!(
        grid.dim() == rp.d,
        Structure,
        "regime dimension {} does not match the grid dimension {}",
        rp.d,
        grid.dim()
    );
    let members = ball.members(&grid)?;
    let spec = forward_transform(u);
    let tail = tail_energy(&spec, part);
    ensure!(
        tail <= TAIL_TOLERANCE,
        Precondition,
        "spectral energy outside the covered annuli is {tail:e} of the total (limit {TAIL_TOLERANCE:e})"
    );
    let set = blocks_of_spectrum(&spec, part);
    let origin = grid.origin();
    let zero_point = [0.0; MAX_DIM];

    // Which blocks lose their Taylor polynomial, and of which degree.
    let removal = |j: i32| -> Option<u32> {
        match (rp.regime, rp.degree()) {
            (Regime::Subcritical, _) | (_, None) => None,
            (Regime::Critical, Some(m)) => (j <= 0).then_some(m),
            (Regime::Supercritical, Some(m)) => Some(m),
        }
    };

    let per_block: Vec<Result<BlockDiagnostic>> = exec::map_slice(set.blocks(), |(j, b)| {
        let removed = match removal(*j) {
            Some(m) => taylor_from_spectrum(&forward_transform(b), m, origin)?,
            None => Polynomial::zero(grid.dim(), zero_point),
        };
        Ok(BlockDiagnostic {
            j: *j,
            block_sup: b.max_abs(),
            block_lp: quadrature_lp_norm(b, rp.p)?,
            contribution: ball_sup(b, &removed, &members),
            removed,
        })
    });
    let blocks: Vec<BlockDiagnostic> = per_block.into_iter().collect::<Result<_>>()?;

    let mut periodic = Field::zeros(grid);
    for (_, b) in set.blocks() {
        periodic = periodic.add(b)?;
    }
    let mut poly = Polynomial::zero(grid.dim(), zero_point);
    for b in &blocks {
        poly = poly.add(&b.removed.scale(-1.0))?;
    }
    let series = Representative { periodic, poly };

    let mut ball_removed = Vec::new();
    let mut series_residuals = Vec::new();
    let representative = match (rp.regime, rp.degree()) {
        (Regime::Critical, Some(0)) => {
            let avg = series.ball_average(&[0; MAX_DIM], ball)?;
            series_residuals.push(Residual {
                name: "ball_avg[0]".into(),
                value: avg,
            });
            ball_removed.push(([0; MAX_DIM], avg));
            let mut c = Polynomial::zero(grid.dim(), zero_point);
            c.add_term([0; MAX_DIM], -avg);
            series.add_polynomial(&c)?
        }
        (Regime::Critical, Some(m)) => {
            series_residuals = constraint_residuals(&series, rp, ball)?;
            let low = series.taylor_at_origin(m - 1)?;
            let mut fix = Polynomial::zero(grid.dim(), zero_point);
            for (a, c) in low.terms() {
                fix.add_term(*a, -c);
            }
            for alpha in multi_indices(grid.dim(), m) {
                let alpha = to_multi(&alpha);
                let avg = series.ball_average(&alpha, ball)?;
                ball_removed.push((alpha, avg));
                fix.add_term(alpha, -avg / factorial(&alpha));
            }
            series.add_polynomial(&fix)?
        }
        _ => series,
    };

    let constraints = verify_canonical_constraints(&representative, rp, ball)?;
    Ok(RealizationResult {
        representative,
        params: *rp,
        ball: *ball,
        blocks,
        ball_removed,
        series_residuals,
        constraints,
    })
}

/// Samples `f` restricted to `|x| <= radius`, for interior comparisons.
pub fn interior_max_diff(a: &Representative, b: &Representative, radius: f64) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let g = *a.grid();
    Ok(exec::max_of(
        (0..g.len())
            .filter(|&i| norm(&g.position(i), g.dim()) <= radius)
            .map(|i| (a.value_at(i) - b.value_at(i)).abs()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        let r = classify_regime(0.5, 2.0, 2).unwrap();
        assert_eq!(r.regime, Regime::Subcritical);
        assert!((r.pstar.unwrap() - 4.0).abs() < 1e-12);
        assert!(r.m < 0);
        let r = classify_regime(1.0, 2.0, 2).unwrap();
        assert_eq!((r.regime, r.m), (Regime::Critical, 0));
        let r = classify_regime(2.5, 2.0, 2).unwrap();
        assert_eq!((r.regime, r.m), (Regime::Supercritical, 1));
        let r = classify_regime(2.5, 2.0, 1).unwrap();
        assert_eq!((r.regime, r.m), (Regime::Critical, 2));
        assert!(classify_regime(0.0, 2.0, 1).is_err());
        assert!(classify_regime(1.0, 1.0, 1).is_err());
        assert!(classify_regime(1.0, f64::INFINITY, 1).is_err());
    }

    #[test]
    fn polynomial_calculus() {
        let mut p = Polynomial::zero(2, [0.0; 3]);
        p.add_term([2, 1, 0], 3.0);
        p.add_term([0, 0, 0], -1.0);
        p.add_term([1, 0, 0], 0.5);
        let x = [1.5, -2.0, 0.0];
        let direct = 3.0 * 1.5f64.powi(2) * -2.0 - 1.0 + 0.75;
        assert!((p.eval(&x) - direct).abs() < 1e-14);
        let dp = p.derivative(&[1, 1, 0]);
        assert!((dp.eval(&x) - 6.0 * 1.5).abs() < 1e-14);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.derivative(&[0, 2, 0]).degree(), None);
    }

    #[test]
    fn polynomial_csv_roundtrip() {
        let g = GridSpec::new(2, 4.0, 8).unwrap();
        let mut rep = Representative::from_field(Field::zeros(g));
        rep.poly.add_term([1, 0, 0], 0.25);
        rep.poly.add_term([0, 2, 0], -3.5);
        let mut buf = Vec::new();
        rep.write_polynomial_csv(&mut buf).unwrap();
        let back = Representative::read_polynomial_csv(2, buf.as_slice()).unwrap();
        assert_eq!(back, rep.poly);
    }

    #[test]
    fn gaussian_taylor_data() {
        let g = GridSpec::desk(1).unwrap();
        let f = Field::from_fn(g, |x| (-0.5 * x[0] * x[0]).exp());
        let p = taylor_polynomial(&f, 2, g.origin()).unwrap();
        assert!((p.coeff(&[0, 0, 0]) - 1.0).abs() < 1e-12);
        assert!(p.coeff(&[1, 0, 0]).abs() < 1e-12);
        assert!((p.coeff(&[2, 0, 0]) + 0.5).abs() < 1e-10);
    }

    #[test]
    fn rough_field_rejected_by_taylor() {
        let g = GridSpec::new(1, 8.0, 64).unwrap();
        let f = Field::from_fn(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 });
        assert!(matches!(
            taylor_polynomial(&f, 1, g.origin()),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn ball_members() {
        let g = GridSpec::new(1, 8.0, 64).unwrap();
        let b = Ball::default_for(&g);
        assert_eq!(b.members(&g).unwrap().len(), 17);
        assert!(Ball {
            center: [0.0; 3],
            radius: 0.2
        }
        .members(&g)
        .is_err());
        assert!(Ball {
            center: [3.5, 0.0, 0.0],
            radius: 1.0
        }
        .members(&g)
        .is_err());
    }
}
