//! Ratio checks of the homogeneous Sobolev embeddings.
//!
//! For each corpus member `f` the left side is the target norm of the
//! regime (`L^{p*}`, the ball-sampled Sobolev–BMO estimator of order `m`, or
//! the difference-sampled Lipschitz estimator of order `s - d/p`) and the
//! right side is `||Delta^{s/2} f||_{L^p}`. Both sides are evaluated on exact
//! dyadic dilations of `f` (same samples, period scaled by `2^{-k}`) with
//! sampling plans scaled alongside, so the ratio of a correct pair of
//! estimators is dilation invariant.

use std::io::Write;

use crate::direct_norms::{
    bmo_norm, lipschitz_norm, sobolev_bmo_norm, BallPlanConfig, BallSamplingPlan, DiffSamplingPlan,
};
use crate::error::{ensure, Result};
use crate::exec;
use crate::field::{forward_transform, quadrature_lp_norm, Field, GridSpec};
use crate::multiplier::{frac_laplacian, DC_MASS_TOLERANCE};
use crate::oracles::corpus::{default_projection_radius, make_test_function, s_infty_project, TestFunction};
use crate::realization::{classify_regime, Regime, RegimeParams};

/// Smallest number of members with a defined ratio in a family.
pub const MIN_FAMILY_MEMBERS: usize = 5;
/// Smallest number of distinct dyadic scales in a family.
pub const MIN_FAMILY_SCALES: usize = 3;

/// Sampling parameters of the left-hand estimators, given for the undilated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    /// Dyadic exponents `k`: each member is evaluated as `x -> f(2^k x)`.
    pub dilations: Vec<i32>,
    /// Difference magnitudes `1, 2, ..., 2^levels` grid steps.
    pub diff_levels: u32,
    /// Ball plan on the undilated grid; `None` uses [`BallPlanConfig::default_for`].
    pub ball: Option<BallPlanConfig>,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dilations: vec![-1, 0, 1],
            diff_levels: 4,
            ball: None,
        }
    }
}

impl EmbeddingConfig {
    fn ball_for(&self, base: &GridSpec, k: i32) -> BallPlanConfig {
        let cfg = self.ball.clone().unwrap_or_else(|| BallPlanConfig::default_for(base));
        let f = 2f64.powi(-k);
        BallPlanConfig {
            center_spacing: cfg.center_spacing * f,
            r0: cfg.r0 * f,
            region: cfg.region.map(|r| r * f),
            ..cfg
        }
    }
}

/// One member at one dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub member: usize,
    pub dilation: i32,
    pub numerator: f64,
    pub denominator: f64,
    /// `None` for the `0/0` sentinel.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub regime: Regime,
    pub params: RegimeParams,
    pub family: String,
    pub left: String,
    pub rows: Vec<EmbeddingRow>,
    pub max_ratio: f64,
    /// `max / min - 1` of the ratio over dilations, maximized over members.
    pub spread: f64,
    /// Members excluded from the statistics, with the reason.
    pub excluded: Vec<(usize, String)>,
}

impl EmbeddingReport {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "regime",
            "family",
            "left",
            "member",
            "dilation",
            "numerator",
            "denominator",
            "ratio",
        ])?;
        for r in &self.rows {
            out.write_record([
                self.regime.to_string(),
                self.family.clone(),
                self.left.clone(),
                r.member.to_string(),
                r.dilation.to_string(),
                format!("{:e}", r.numerator),
                format!("{:e}", r.denominator),
                r.ratio.map_or_else(|| "0/0".to_string(), |v| format!("{v:e}")),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn left_label(rp: &RegimeParams) -> String {
    match rp.regime {
        Regime::Subcritical => format!("L^{}", rp.pstar.unwrap_or(f64::NAN)),
        Regime::Critical if rp.m == 0 => "BMO".to_string(),
        Regime::Critical => format!("S_{}(BMO)", rp.m),
        Regime::Supercritical => format!("Lip^{}", rp.excess()),
    }
}

fn left_norm(f: &Field, rp: &RegimeParams, cfg: &EmbeddingConfig, base: &GridSpec, k: i32) -> Result<f64> {
    match rp.regime {
        Regime::Subcritical => quadrature_lp_norm(f, rp.pstar.expect("subcritical has p*")),
        Regime::Critical => {
            let plan = BallSamplingPlan::new(f.grid(), &cfg.ball_for(base, k))?;
            if rp.m == 0 {
                bmo_norm(f, &plan)
            } else {
                sobolev_bmo_norm(f, rp.m as u32, &plan)
            }
        }
        Regime::Supercritical => lipschitz_norm(f, rp.excess(), &DiffSamplingPlan::standard(rp.d, cfg.diff_levels)),
    }
}

/// Left and right norms of every member at every dilation, and the dilation spread of their ratio.
pub fn embedding_ratio_study(
    rp: &RegimeParams,
    corpus: &[Field],
    family: &str,
    cfg: &EmbeddingConfig,
) -> Result<EmbeddingReport> {
    ensure!(!corpus.is_empty(), Domain, "embedding corpus is empty");
    let mut scales = cfg.dilations.clone();
    scales.sort_unstable();
    scales.dedup();
    ensure!(
        scales.len() == cfg.dilations.len(),
        Domain,
        "dilation exponents {:?} contain duplicates",
        cfg.dilations
    );
    ensure!(
        scales.len() >= MIN_FAMILY_SCALES,
        Domain,
        "a family needs at least {MIN_FAMILY_SCALES} dyadic scales, got {}",
        scales.len()
    );
    let base = *corpus[0].grid();
    for (i, f) in corpus.iter().enumerate() {
        ensure!(
            f.grid().dim() == rp.d,
            Structure,
            "member {i} lives in dimension {} but the regime has d = {}",
            f.grid().dim(),
            rp.d
        );
        f.grid().check_same(&base)?;
        ensure!(f.is_real(), Domain, "member {i} is not a real field");
        let spec = forward_transform(f);
        let (dc, max) = (spec.dc().norm(), spec.max_abs());
        ensure!(
            dc <= DC_MASS_TOLERANCE * max,
            Precondition,
            "member {i} is not numerically moment-free: DC coefficient {dc:e} exceeds {DC_MASS_TOLERANCE:e} x {max:e}"
        );
    }
    let jobs: Vec<(usize, i32)> = (0..corpus.len())
        .flat_map(|i| cfg.dilations.iter().map(move |&k| (i, k)))
        .collect();
    let evaluated: Vec<Result<(f64, f64)>> = exec::map_slice(&jobs, |&(i, k)| {
        let f = corpus[i].dilated(k);
        let right = quadrature_lp_norm(&frac_laplacian(&f, rp.s)?, rp.p)?;
        let left = left_norm(&f, rp, cfg, &base, k)?;
        Ok((left, right))
    });
    let mut rows = Vec::with_capacity(jobs.len());
    for (&(member, dilation), r) in jobs.iter().zip(evaluated) {
        let (numerator, denominator) = r?;
        let ratio = (denominator > 0.0).then(|| numerator / denominator);
        rows.push(EmbeddingRow {
            member,
            dilation,
            numerator,
            denominator,
            ratio,
        });
    }
    let mut excluded = Vec::new();
    let mut spread: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut counted = 0;
    for member in 0..corpus.len() {
        let ratios: Vec<Option<f64>> = rows.iter().filter(|r| r.member == member).map(|r| r.ratio).collect();
        if ratios.iter().any(Option::is_none) {
            excluded.push((member, "zero right-hand side: ratio is 0/0".to_string()));
            continue;
        }
        let vals: Vec<f64> = ratios.into_iter().flatten().collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(0.0, f64::max);
        spread = spread.max(hi / lo - 1.0);
        max_ratio = max_ratio.max(hi);
        counted += 1;
    }
    ensure!(
        counted >= MIN_FAMILY_MEMBERS,
        Domain,
        "family has {counted} members with defined ratios; at least {MIN_FAMILY_MEMBERS} are required"
    );
    Ok(EmbeddingReport {
        regime: rp.regime,
        params: *rp,
        family: family.to_string(),
        left: left_label(rp),
        rows,
        max_ratio,
        spread,
        excluded,
    })
}

/// A fixed regime and corpus with its acceptance thresholds.
#[derive(Debug, Clone)]
pub struct Family {
    pub label: &'static str,
    pub params: RegimeParams,
    pub members: Vec<Field>,
    /// Largest admissible dilation spread.
    pub spread_tolerance: f64,
    /// Regression ceiling on the largest ratio.
    pub ceiling: f64,
}

/// Spread allowed for exact norms (`L^{p*}` against `L^p`).
pub const EXACT_SPREAD: f64 = 0.05;
/// Spread allowed for the sampled-sup estimators (BMO, Lipschitz).
pub const SAMPLED_SPREAD: f64 = 0.10;

fn projected_hermite(grid: &GridSpec, members: &[(u32, f64)]) -> Result<Vec<Field>> {
    let rho = default_projection_radius(grid);
    members
        .iter()
        .map(|&(order, sigma)| {
            s_infty_project(
                &make_test_function(&TestFunction::HermiteGaussian { order, sigma }, grid)?,
                rho,
            )
        })
        .collect()
}

/// The frozen corpus: moment-free Hermite-Gaussians on the desk grids, one family per regime case.
pub fn frozen_families() -> Result<Vec<Family>> {
    let g1 = GridSpec::desk(1)?;
    let g2 = GridSpec::desk(2)?;
    let line = projected_hermite(&g1, &[(3, 0.5), (4, 0.5), (5, 0.5), (6, 0.5), (4, 0.7)])?;
    let plane = projected_hermite(&g2, &[(2, 0.8), (3, 0.8), (4, 0.8), (5, 0.8), (3, 1.2)])?;
    let cases: [(&'static str, f64, f64, usize, f64); 7] = [
        ("subcritical-1d", 0.25, 2.0, 1, 0.86),
        ("subcritical-2d", 0.5, 2.0, 2, 0.62),
        ("critical-bmo-1d", 0.5, 2.0, 1, 0.51),
        ("critical-bmo-2d", 1.0, 2.0, 2, 0.22),
        ("critical-s1bmo-1d", 1.5, 2.0, 1, 0.49),
        ("supercritical-1d", 2.0, 2.0, 1, 0.70),
        ("supercritical-2d", 2.5, 2.0, 2, 0.33),
    ];
    cases
        .iter()
        .map(|&(label, s, p, d, ceiling)| {
            let params = classify_regime(s, p, d)?;
            Ok(Family {
                label,
                params,
                members: if d == 1 { line.clone() } else { plane.clone() },
                spread_tolerance: if params.regime == Regime::Subcritical {
                    EXACT_SPREAD
                } else {
                    SAMPLED_SPREAD
                },
                ceiling,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(grid: &GridSpec, orders: &[u32]) -> Vec<Field> {
        let rho = default_projection_radius(grid);
        orders
            .iter()
            .map(|&n| {
                let f = make_test_function(&TestFunction::HermiteGaussian { order: n, sigma: 0.5 }, grid).unwrap();
                s_infty_project(&f, rho).unwrap()
            })
            .collect()
    }

    #[test]
    fn subcritical_ratio_is_dilation_invariant() {
        let g = GridSpec::desk(1).unwrap();
        let rp = classify_regime(0.25, 1.5, 1).unwrap();
        let rep = embedding_ratio_study(&rp, &family(&g, &[3, 4, 5, 6, 8]), "hg", &EmbeddingConfig::default()).unwrap();
        assert_eq!(rep.rows.len(), 15);
        assert!(rep.spread < 1e-12, "{}", rep.spread);
        assert!(rep.max_ratio.is_finite() && rep.max_ratio > 0.0);
    }

    #[test]
    fn zero_member_is_a_sentinel() {
        let g = GridSpec::desk(1).unwrap();
        let rp = classify_regime(2.0, 2.0, 1).unwrap();
        let mut corpus = family(&g, &[3, 4, 5, 6, 8]);
        corpus.push(Field::zeros(g));
        let rep = embedding_ratio_study(&rp, &corpus, "hg", &EmbeddingConfig::default()).unwrap();
        assert_eq!(rep.excluded.len(), 1);
        assert_eq!(rep.excluded[0].0, 5);
        corpus.remove(0);
        assert!(embedding_ratio_study(&rp, &corpus, "hg", &EmbeddingConfig::default()).is_err());
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains(",0/0\n"));
    }

    #[test]
    fn mismatches_are_errors() {
        let g = GridSpec::desk(1).unwrap();
        let rp2 = classify_regime(0.5, 2.0, 2).unwrap();
        assert!(embedding_ratio_study(&rp2, &family(&g, &[3, 4, 5, 6, 8]), "hg", &EmbeddingConfig::default()).is_err());
        let rp = classify_regime(0.25, 2.0, 1).unwrap();
        let gauss = make_test_function(&TestFunction::Gaussian { sigma: 1.0 }, &g).unwrap();
        assert!(embedding_ratio_study(&rp, &[gauss], "g", &EmbeddingConfig::default()).is_err());
        let cfg = EmbeddingConfig {
            dilations: vec![0, 1],
            ..EmbeddingConfig::default()
        };
        assert!(embedding_ratio_study(&rp, &family(&g, &[3, 4, 5, 6, 8]), "hg", &cfg).is_err());
    }
}
