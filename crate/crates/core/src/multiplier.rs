//! Fourier multipliers on grid fields.
//!
//! Every operator here is `f -> F^{-1}(m(w) F f)` for a symbol `m` evaluated
//! at the grid frequencies. The zero frequency is governed separately by a
//! [`ZeroModeRule`] because most symbols of interest are singular or vanish
//! there, and the zero bin carries the grid constants.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::field::{forward_transform, inverse_transform, norm, Field, FieldKind, Point, SpectrumField};

/// Relative DC tolerance for negative-order multipliers, measured against the
/// largest spectral coefficient.
pub const DC_MASS_TOLERANCE: f64 = 1e-8;

/// What to do with the `w = 0` bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroModeRule {
    SetZero,
    /// Evaluate the symbol at zero like any other bin.
    Keep,
    /// Zero the bin, but fail if `|F(0)| > tol * ||f||_{L^1}`.
    RejectIfMassive(f64),
}

type Symbol = dyn Fn(&Point) -> Complex64 + Send + Sync;

/// A symbol together with its zero-mode policy.
#[derive(Clone)]
pub struct MultiplierSpec {
    symbol: Arc<Symbol>,
    zero_mode: ZeroModeRule,
    hermitian: bool,
    label: String,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("label", &self.label)
            .field("zero_mode", &self.zero_mode)
            .field("hermitian", &self.hermitian)
            .finish()
    }
}

impl MultiplierSpec {
    /// `hermitian` declares `m(-w) = conj(m(w))`, so real inputs give real outputs.
    pub fn new(
        label: impl Into<String>,
        symbol: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
        zero_mode: ZeroModeRule,
        hermitian: bool,
    ) -> Self {
        Self {
            symbol: Arc::new(symbol),
            zero_mode,
            hermitian,
            label: label.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new("1", |_| Complex64::new(1.0, 0.0), ZeroModeRule::Keep, true)
    }

    /// `|w|^s`; the zero bin is dropped for `s > 0`. The dimension is taken
    /// from the grid at application time, so the symbol uses all three slots
    /// (unused slots are zero).
    pub fn power(s: f64) -> Self {
        let zero = if s == 0.0 {
            ZeroModeRule::Keep
        } else {
            ZeroModeRule::SetZero
        };
        Self::new(
            format!("|w|^{s}"),
            move |w| Complex64::new(norm(w, 3).powf(s), 0.0),
            zero,
            true,
        )
    }

    /// `-i w_j / |w|` with `j` zero-based.
    pub fn riesz(axis: usize) -> Self {
        Self::new(
            format!("R_{}", axis + 1),
            move |w| Complex64::new(0.0, -w[axis] / norm(w, 3)),
            ZeroModeRule::SetZero,
            true,
        )
    }

    /// `(i w)^alpha`.
    pub fn derivative(alpha: &[u32]) -> Self {
        let alpha: Vec<u32> = alpha.to_vec();
        let order: u32 = alpha.iter().sum();
        let label = format!("d^{alpha:?}");
        Self::new(
            label,
            move |w| {
                let mut z = Complex64::new(1.0, 0.0);
                for (a, &k) in alpha.iter().enumerate() {
                    z *= Complex64::new(0.0, w[a]).powu(k);
                }
                z
            },
            if order == 0 {
                ZeroModeRule::Keep
            } else {
                ZeroModeRule::SetZero
            },
            true,
        )
    }

    /// Pointwise product of two symbols. The zero bin is dropped if either
    /// factor drops it.
    pub fn compose(&self, other: &MultiplierSpec) -> Self {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        let zero_mode = match (self.zero_mode, other.zero_mode) {
            (ZeroModeRule::Keep, ZeroModeRule::Keep) => ZeroModeRule::Keep,
            (ZeroModeRule::RejectIfMassive(t), _) | (_, ZeroModeRule::RejectIfMassive(t)) => {
                ZeroModeRule::RejectIfMassive(t)
            }
            _ => ZeroModeRule::SetZero,
        };
        Self {
            symbol: Arc::new(move |w| a(w) * b(w)),
            zero_mode,
            hermitian: self.hermitian && other.hermitian,
            label: format!("{}*{}", self.label, other.label),
        }
    }

    pub fn eval(&self, w: &Point) -> Complex64 {
        (self.symbol)(w)
    }

    pub fn zero_mode(&self) -> ZeroModeRule {
        self.zero_mode
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Applies `m` to an already transformed field. `l1_norm` is only consulted
/// for [`ZeroModeRule::RejectIfMassive`].
pub fn apply_to_spectrum(spec: &SpectrumField, m: &MultiplierSpec, l1_norm: f64) -> Result<SpectrumField> {
    let zero_bin = match m.zero_mode {
        ZeroModeRule::Keep => m.eval(&[0.0; 3]),
        ZeroModeRule::SetZero => Complex64::new(0.0, 0.0),
        ZeroModeRule::RejectIfMassive(tol) => {
            let dc = spec.dc().norm();
            ensure!(
                dc <= tol * l1_norm,
                Precondition,
                "DC coefficient magnitude {dc:e} exceeds {tol:e} x L1 norm {l1_norm:e}"
            );
            Complex64::new(0.0, 0.0)
        }
    };
    let kind = if spec.kind() == FieldKind::Real && m.hermitian {
        FieldKind::Real
    } else {
        FieldKind::Complex
    };
    Ok(spec.multiply(|w, i| if i == 0 { zero_bin } else { m.eval(w) }, kind))
}

/// `F^{-1}(m F f)` with the zero bin handled per `m`'s rule.
pub fn apply_multiplier(f: &Field, m: &MultiplierSpec) -> Result<Field> {
    let l1 = match m.zero_mode {
        ZeroModeRule::RejectIfMassive(_) => f.l1_norm(),
        _ => 0.0,
    };
    let spec = apply_to_spectrum(&forward_transform(f), m, l1)?;
    Ok(inverse_transform(&spec))
}

fn check_dc_mass(spec: &SpectrumField) -> Result<()> {
    let dc = spec.dc().norm();
    let max = spec.max_abs();
    ensure!(
        dc <= DC_MASS_TOLERANCE * max,
        Precondition,
        "DC coefficient magnitude {dc:e} exceeds {DC_MASS_TOLERANCE:e} x max coefficient {max:e}; \
         the field must be numerically mean-zero"
    );
    Ok(())
}

/// `Delta^{s/2} f = F^{-1}(|w|^s F f)`.
pub fn frac_laplacian(f: &Field, s: f64) -> Result<Field> {
    ensure!(
        s >= 0.0,
        Domain,
        "order s = {s} must be >= 0 (negative orders: riesz_potential)"
    );
    apply_multiplier(f, &MultiplierSpec::power(s))
}

/// `I_s f = F^{-1}(|w|^{-s} F f)` for `0 < s < d` on mean-zero data.
pub fn riesz_potential(f: &Field, s: f64) -> Result<Field> {
    let d = f.grid().dim() as f64;
    ensure!(s > 0.0 && s < d, Domain, "order s = {s} must lie in (0, {d})");
    let spec = forward_transform(f);
    check_dc_mass(&spec)?;
    Ok(inverse_transform(&apply_to_spectrum(
        &spec,
        &MultiplierSpec::power(-s),
        0.0,
    )?))
}

/// `R_j f = F^{-1}(-i w_j/|w| F f)`, with `axis` one-based as in `R_1 .. R_d`.
pub fn riesz_transform(f: &Field, axis: usize) -> Result<Field> {
    let d = f.grid().dim();
    ensure!(
        (1..=d).contains(&axis),
        Domain,
        "Riesz transform index j = {axis} must lie in 1..={d}"
    );
    let spec = forward_transform(f);
    check_dc_mass(&spec)?;
    Ok(inverse_transform(&apply_to_spectrum(
        &spec,
        &MultiplierSpec::riesz(axis - 1),
        0.0,
    )?))
}

/// Spectral partial derivative `d^alpha f`, symbol `(i w)^alpha`.
pub fn derivative(f: &Field, alpha: &[u32]) -> Result<Field> {
    ensure!(
        alpha.len() == f.grid().dim(),
        Structure,
        "multi-index {alpha:?} does not match dimension {}",
        f.grid().dim()
    );
    apply_multiplier(f, &MultiplierSpec::derivative(alpha))
}

/// Spectral gradient, one field per axis.
pub fn gradient(f: &Field) -> Result<Vec<Field>> {
    let d = f.grid().dim();
    (0..d)
        .map(|a| {
            let mut alpha = vec![0; d];
            alpha[a] = 1;
            derivative(f, &alpha)
        })
        .collect()
}

/// All multi-indices of dimension `d` with `|alpha| = order`, in lexicographic order.
pub fn multi_indices(d: usize, order: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == d - 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(d, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, order, &mut Vec::new(), &mut out);
    out
}
