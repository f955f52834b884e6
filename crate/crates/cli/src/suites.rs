//! Verification suites. Each suite returns its checks; ids are stable.

use std::f64::consts::PI;

use homsob::direct_norms::{
    bmo_norm, finite_difference, finite_difference_recursive, lipschitz_norm, BallSamplingPlan, DiffSamplingPlan,
    Offset,
};
use homsob::embedding::{embedding_ratio_study, frozen_families, EmbeddingConfig};
use homsob::field::{norm, quadrature_lp_norm, Field, GridSpec};
use homsob::littlewood_paley::{lp_block, lp_blocks, lp_sobolev_norm, smooth_step, DyadicPartition};
use homsob::multiplier::{frac_laplacian, gradient, multi_indices, riesz_potential, riesz_transform};
use homsob::oracles::convolution::{fit_scalar, riesz_convolution_direct};
use homsob::oracles::corpus::{default_projection_radius, window};
use homsob::oracles::studies::annihilation_grid;
use homsob::oracles::{
    ga_norm_study, make_test_function, polynomial_annihilation_study, riesz_kernel_constant, riesz_potential_direct,
    s_infty_project, KernelConvention, TestFunction,
};
use homsob::realization::{classify_regime, interior_max_diff, realize, Ball, RegimeParams, Representative};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Suite};
use crate::report::Check;

type Res<T> = homsob::Result<T>;

fn guarded(id: &str, suite: Suite, desc: &str, make: impl FnOnce() -> Res<Check>) -> Check {
    make().unwrap_or_else(|e| Check::errored(id, suite, desc, e))
}

fn rel_l2(a: &Field, b: &Field) -> Res<f64> {
    Ok(quadrature_lp_norm(&a.sub(b)?, 2.0)? / quadrature_lp_norm(b, 2.0)?)
}

fn quantize(f: &Field) -> Res<Field> {
    Field::from_real(
        *f.grid(),
        f.re().iter().map(|v| (v * 1024.0).round() / 1024.0).collect(),
    )
}

/// Moment-free Hermite-Gaussians of orders 4, 5, 6, 8 at width `max(0.5, 5h)`.
pub fn corpus_for(grid: &GridSpec) -> Res<Vec<Field>> {
    let sigma = (5.0 * grid.spacing()).max(0.5);
    let rho = default_projection_radius(grid);
    [4, 5, 6, 8]
        .iter()
        .map(|&order| {
            s_infty_project(
                &make_test_function(&TestFunction::HermiteGaussian { order, sigma }, grid)?,
                rho,
            )
        })
        .collect()
}

/// Four grid-resonant cosines with random wavenumbers up to `N/4` per axis.
fn resonant(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Field {
    let d = grid.dim();
    let kmax = (grid.n() / 4) as i64;
    let modes: Vec<([i64; 3], f64, f64)> = (0..4)
        .map(|_| {
            let mut k = [0i64; 3];
            for c in k.iter_mut().take(d) {
                *c = rng.random_range(-kmax..=kmax);
            }
            if k[..d].iter().all(|&c| c == 0) {
                k[0] = 1;
            }
            (k, rng.random_range(-2.0..2.0), rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let dw = grid.frequency_step();
    Field::from_fn(*grid, |x| {
        modes
            .iter()
            .map(|(k, a, ph)| a * ((0..d).map(|i| k[i] as f64 * dw * x[i]).sum::<f64>() + ph).cos())
            .sum()
    })
}

fn gaussian_at(grid: &GridSpec, center: f64, sigma: f64) -> Field {
    let d = grid.dim();
    Field::from_fn(*grid, |x| {
        let r2: f64 = (0..d).map(|a| (x[a] - center).powi(2)).sum();
        (-0.5 * r2 / (sigma * sigma)).exp()
    })
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<Check> {
    match suite {
        Suite::Multipliers => multipliers(cfg),
        Suite::LittlewoodPaley => littlewood_paley(cfg),
        Suite::Norms => norms(cfg),
        Suite::Realization => realization(cfg),
        Suite::Oracles => oracles(cfg),
        Suite::Embeddings => embeddings(cfg),
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, cfg)).collect(),
    }
}

fn multipliers(cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Multipliers;
    let mut out = Vec::new();
    let g = cfg.grid;
    let corpus = match corpus_for(&g) {
        Ok(c) => c,
        Err(e) => {
            return vec![Check::errored(
                "MUL-00",
                S,
                "projected corpus on the configured grid",
                e,
            )]
        }
    };
    let d = g.dim() as f64;
    for (i, s) in [0.3, 0.5, 0.9 * d].into_iter().enumerate() {
        let id = format!("MUL-0{}", i + 1);
        let desc = format!("inverse identity I_s(Delta^(s/2) f) = f, s = {s}, relative L2");
        out.push(guarded(&id, S, &desc, || {
            let mut worst: f64 = 0.0;
            for f in &corpus {
                worst = worst.max(rel_l2(&riesz_potential(&frac_laplacian(f, s)?, s)?, f)?);
            }
            Ok(Check::at_most(&id, S, &desc, worst, 1e-10))
        }));
    }
    let desc = "semigroup Delta^(a/2) Delta^(b/2) = Delta^((a+b)/2), 10 seeded pairs, relative L2";
    out.push(guarded("MUL-04", S, desc, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let (a, b) = (rng.random_range(0.1..1.5), rng.random_range(0.1..1.5));
            for f in &corpus {
                let lhs = frac_laplacian(&frac_laplacian(f, b)?, a)?;
                worst = worst.max(rel_l2(&lhs, &frac_laplacian(f, a + b)?)?);
            }
        }
        Ok(Check::at_most("MUL-04", S, desc, worst, 1e-11))
    }));
    let plane = GridSpec::desk(2).expect("desk grid");
    for (i, s) in [1.2, 2.5].into_iter().enumerate() {
        let id = format!("MUL-0{}", i + 5);
        let desc =
            format!("|grad Delta^((s-1)/2) f|^2 = sum_j |R_j Delta^(s/2) f|^2 pointwise, d = 2, s = {s}, relative L1");
        out.push(guarded(&id, S, &desc, || {
            let phi = s_infty_project(
                &make_test_function(&TestFunction::HermiteGaussian { order: 4, sigma: 0.8 }, &plane)?,
                default_projection_radius(&plane),
            )?;
            let grad = gradient(&frac_laplacian(&phi, s - 1.0)?)?;
            let top = frac_laplacian(&phi, s)?;
            let r: Vec<Field> = (1..=2).map(|j| riesz_transform(&top, j)).collect::<Res<_>>()?;
            let (mut dev, mut total) = (0.0, 0.0);
            for i in 0..plane.len() {
                let lhs: f64 = grad.iter().map(|gj| gj.value_at(i).norm_sqr()).sum();
                let rhs: f64 = r.iter().map(|rj| rj.value_at(i).norm_sqr()).sum();
                dev += (lhs - rhs).abs();
                total += rhs;
            }
            Ok(Check::at_most(&id, S, &desc, dev / total, 1e-10))
        }));
    }
    let squares = (|| -> Res<(f64, f64)> {
        let f = s_infty_project(
            &make_test_function(&TestFunction::HermiteGaussian { order: 3, sigma: 0.8 }, &plane)?,
            default_projection_radius(&plane),
        )?;
        let mut sum = Field::zeros(plane);
        for j in 1..=2 {
            sum = sum.add(&riesz_transform(&riesz_transform(&f, j)?, j)?)?;
        }
        let scale = f.max_abs();
        Ok((sum.max_diff(&f.scale(-1.0))? / scale, sum.max_diff(&f)? / scale))
    })();
    match squares {
        Ok((minus, plus)) => {
            out.push(Check::at_most(
                "MUL-07",
                S,
                "sum_j R_j^2 = -I, d = 2, max relative",
                minus,
                1e-12,
            ));
            out.push(Check::note(
                "MUL-08",
                S,
                "sign discrepancy: deviation from sum_j R_j^2 = +I (recorded, not asserted)",
                plus,
                0.0,
            ));
        }
        Err(e) => out.push(Check::errored("MUL-07", S, "sum_j R_j^2 = -I", e)),
    }
    let desc = "constants are invisible: Delta^(s/2)(f + 3) = Delta^(s/2) f bit for bit, dyadic data";
    out.push(guarded("MUL-09", S, desc, || {
        let f = quantize(&corpus[0])?;
        let mut worst: f64 = 0.0;
        for s in [0.5, 1.0, 2.5] {
            worst = worst.max(frac_laplacian(&f, s)?.max_diff(&frac_laplacian(&f.add_constant(3.0), s)?)?);
        }
        Ok(Check::at_most("MUL-09", S, desc, worst, 0.0))
    }));
    out
}

fn littlewood_paley(cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::LittlewoodPaley;
    let g = cfg.grid;
    let part = match cfg.partition() {
        Ok(p) => p,
        Err(e) => return vec![Check::errored("LP-00", S, "partition", e)],
    };
    let mut out = Vec::new();
    let d = g.dim();
    let coverage = (1..g.len())
        .map(|i| (part.coverage(norm(&g.frequency(i), d)) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(Check::at_most(
        "LP-01",
        S,
        "partition of unity: max |sum_j eta_j - 1| over nonzero grid frequencies",
        coverage,
        1e-12,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = resonant(&g, &mut rng);
    let desc = "almost orthogonality: max |M_k M_j f| / max |f| for |k - j| > 1";
    out.push(guarded("LP-02", S, desc, || {
        let set = lp_blocks(&f, &part);
        let mut worst: f64 = 0.0;
        for (k, bk) in set.blocks() {
            for j in part.range() {
                if (k - j).abs() > 1 {
                    worst = worst.max(lp_block(bk, j, &part)?.max_abs());
                }
            }
        }
        Ok(Check::at_most("LP-02", S, desc, worst / f.max_abs(), 1e-14))
    }));
    let desc = "resummation: max |sum_j M_j f - f| / max |f|, seeded resonant field";
    out.push(guarded("LP-03", S, desc, || {
        let back = lp_blocks(&f, &part).resum();
        Ok(Check::at_most(
            "LP-03",
            S,
            desc,
            back.max_diff(&f)? / f.max_abs(),
            1e-11,
        ))
    }));
    let desc = "blocks of a constant vanish exactly";
    out.push(guarded("LP-04", S, desc, || {
        let c = Field::constant(g, 2.5);
        let worst = part
            .range()
            .map(|j| lp_block(&c, j, &part).map(|b| b.max_abs()))
            .collect::<Res<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Check::at_most("LP-04", S, desc, worst, 0.0))
    }));
    out
}

/// Largest `|D_h^k f|` over base points whose stencil stays in `|x| <= L/8`.
fn inner_max(diff: &Field, h: &Offset, k: u32) -> f64 {
    let g = diff.grid();
    let d = g.dim();
    let limit = g.period() / 8.0;
    let step = g.spacing();
    (0..g.len())
        .filter(|&i| {
            let x = g.position(i);
            (0..=k as i64).all(|j| {
                let mut y = x;
                for a in 0..d {
                    y[a] += (j * h[a]) as f64 * step;
                }
                norm(&y, d) <= limit
            })
        })
        .map(|i| diff.value_at(i).norm())
        .fold(0.0, f64::max)
}

fn norms(cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Norms;
    let mut out = Vec::new();
    let g = cfg.grid;
    let d = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6e6f726d);
    let f = resonant(&g, &mut rng);
    let desc = "finite differences: recursion against binomial closed form, k = 1..4, relative to 2^k max |f|";
    out.push(guarded("NRM-01", S, desc, || {
        let mut worst: f64 = 0.0;
        for k in 1..=4u32 {
            for _ in 0..3 {
                let mut h: Offset = [0; 3];
                for c in h.iter_mut().take(d) {
                    *c = rng.random_range(-3..=3);
                }
                if h[..d].iter().all(|&c| c == 0) {
                    h[0] = 1;
                }
                let a = finite_difference(&f, &h, k)?;
                let b = finite_difference_recursive(&f, &h, k)?;
                worst = worst.max(a.field.max_diff(&b.field)? / (f.max_abs() * 2f64.powi(k as i32)));
            }
        }
        Ok(Check::at_most("NRM-01", S, desc, worst, 1e-13))
    }));
    let line = GridSpec::desk(1).expect("desk grid");
    for k in 1..=4u32 {
        let id = format!("NRM-0{}", k + 1);
        let desc = format!("D_h^{k} annihilates windowed polynomials of degree < {k} on |x| <= L/8, relative");
        out.push(guarded(&id, S, &desc, || {
            let mut worst: f64 = 0.0;
            for deg in 0..k {
                let p = make_test_function(&TestFunction::WindowedPolynomial { alpha: [deg, 0, 0] }, &line)?;
                let scale = p.max_abs().max(1.0);
                for m in [1i64, 2, 3] {
                    let h = [m, 0, 0];
                    worst = worst.max(inner_max(&finite_difference(&p, &h, k)?.field, &h, k) / scale);
                }
            }
            Ok(Check::at_most(&id, S, &desc, worst, 1e-10))
        }));
    }
    let desc = format!(
        "Lipschitz estimator of windowed |x|^(1/2), gamma = 1/2, {} levels: |estimate - 1|",
        cfg.lipschitz_levels
    );
    out.push(guarded("NRM-06", S, &desc, || {
        let f = Field::from_fn(line, |x| x[0].abs().sqrt() * window(&line, x[0].abs()));
        let plan = DiffSamplingPlan::standard(1, cfg.lipschitz_levels).with_region(line.period() / 8.0);
        Ok(Check::at_most(
            "NRM-06",
            S,
            &desc,
            (lipschitz_norm(&f, 0.5, &plan)? - 1.0).abs(),
            2e-2,
        ))
    }));
    let desc = "BMO estimator ignores constants bit for bit, dyadic data";
    out.push(guarded("NRM-07", S, desc, || {
        let plan = match &cfg.bmo {
            Some(b) => BallSamplingPlan::new(&g, b)?,
            None => BallSamplingPlan::default_for(&g)?,
        };
        let q = quantize(&f)?;
        let diff = (bmo_norm(&q, &plan)? - bmo_norm(&q.add_constant(3.0), &plan)?).abs();
        Ok(Check::at_most("NRM-07", S, desc, diff, 0.0))
    }));
    let desc = "BMO estimator of windowed log|x| at N = 512 and N = 1024: relative change";
    out.push(guarded("NRM-08", S, desc, || {
        let mut est = Vec::new();
        for n in [512, 1024] {
            let grid = GridSpec::new(1, 40.0, n)?;
            let f = make_test_function(&TestFunction::WindowedLogAbs, &grid)?;
            est.push(bmo_norm(&f, &BallSamplingPlan::default_for(&grid)?)?);
        }
        Ok(Check::at_most("NRM-08", S, desc, (est[0] / est[1] - 1.0).abs(), 0.05))
    }));
    out
}

/// Regime cases: `(s, p, d)` on the desk line, and the plane at N = 512 for windowed members.
fn realization_cases(cfg: &RunConfig) -> Vec<(RegimeParams, GridSpec)> {
    let g1 = GridSpec::desk(1).expect("desk grid");
    let g2 = GridSpec::new(2, 20.0, 512).expect("grid");
    let mut cases: Vec<(RegimeParams, GridSpec)> = [
        ((0.25, 2.0, 1), g1),
        ((0.5, 2.0, 1), g1),
        ((1.5, 2.0, 1), g1),
        ((2.5, 2.0, 1), g1),
        ((2.0, 2.0, 1), g1),
        ((0.5, 2.0, 2), g2),
        ((1.0, 2.0, 2), g2),
        ((2.5, 2.0, 2), g2),
    ]
    .into_iter()
    .map(|((s, p, d), g)| (classify_regime(s, p, d).expect("valid regime"), g))
    .collect();
    if let Some(rp) = cfg.regime_params() {
        cases.push((rp, cfg.grid));
    }
    cases
}

fn realization_case(n: usize, rp: &RegimeParams, g: &GridSpec, cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Realization;
    let custom = g == &cfg.grid && Some(*rp) == cfg.regime_params();
    let (part, ball) = if custom {
        match cfg.partition() {
            Ok(p) => (p, cfg.ball()),
            Err(e) => return vec![Check::errored(&format!("REA-{n:02}a"), S, "partition", e)],
        }
    } else {
        (DyadicPartition::for_grid(g), Ball::default_for(g))
    };
    let tag = format!("{} s = {} p = {} d = {}", rp.regime, rp.s, rp.p, rp.d);
    let sigma = (5.0 * g.spacing()).max(1.0);
    let u = quantize(&gaussian_at(g, 0.3, sigma)).expect("real field");
    let run = |v: &Field| realize(v, rp, &part, &ball);
    let base = match run(&u) {
        Ok(r) => r,
        Err(e) => {
            return vec![Check::errored(
                &format!("REA-{n:02}a"),
                S,
                &format!("realize, {tag}"),
                e,
            )]
        }
    };
    let rep = &base.representative;
    let scale = rep.periodic.max_abs();
    let mut out = vec![Check::at_most(
        &format!("REA-{n:02}a"),
        S,
        format!("canonical constraints, {tag}: max residual / scale"),
        base.constraints.max_residual() / base.constraints.scale,
        1e-7,
    )];
    let id = format!("REA-{n:02}b");
    let desc = format!("constant shift u + 3 leaves the realization unchanged bit for bit, {tag}");
    out.push(guarded(&id, S, &desc, || {
        let shifted = run(&u.add_constant(3.0))?.representative;
        let diff = interior_max_diff(&shifted, rep, f64::INFINITY)?;
        Ok(Check::at_most(&id, S, &desc, diff, 0.0))
    }));
    if let Some(m) = rp.degree() {
        let id = format!("REA-{n:02}c");
        let desc = format!("windowed polynomials of degree <= {m} are invisible on |x| <= L/8, {tag}: relative");
        out.push(guarded(&id, S, &desc, || {
            let mut worst: f64 = 0.0;
            for q in 0..=m {
                for alpha in multi_indices(g.dim(), q) {
                    let mut a = [0; 3];
                    a[..alpha.len()].copy_from_slice(&alpha);
                    let w = make_test_function(&TestFunction::WindowedPolynomial { alpha: a }, g)?;
                    let moved = run(&u.add(&w)?)?.representative;
                    worst = worst.max(interior_max_diff(&moved, rep, g.period() / 8.0)? / scale);
                }
            }
            Ok(Check::at_most(&id, S, &desc, worst, 1e-4))
        }));
    }
    let id = format!("REA-{n:02}d");
    let desc = format!("idempotence: realize(realize(u)) = realize(u), {tag}: relative");
    out.push(guarded(&id, S, &desc, || {
        let again = run(&rep.periodic)?.representative;
        let diff = interior_max_diff(&again, rep, f64::INFINITY)? / rep.samples().max_abs();
        Ok(Check::at_most(&id, S, &desc, diff, 1e-9))
    }));
    out
}

fn realization(cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Realization;
    let mut out = Vec::new();
    for (n, (rp, g)) in realization_cases(cfg).iter().enumerate() {
        out.extend(realization_case(n + 1, rp, g, cfg));
    }
    let line = GridSpec::desk(1).expect("desk grid");
    let corpus = match corpus_for(&line) {
        Ok(mut c) => {
            c.push(gaussian_at(&line, 0.0, 1.0));
            c
        }
        Err(e) => return vec![Check::errored("REA-90", S, "corpus", e)],
    };
    let mut all = Vec::new();
    for (i, (s, p)) in [(0.25, 2.0), (0.5, 2.0), (2.0, 2.0), (1.0, 1.5)]
        .into_iter()
        .enumerate()
    {
        let id = format!("REA-9{i}");
        let rp = classify_regime(s, p, 1).expect("valid regime");
        let desc = format!(
            "norm round trip ||Delta^(s/2) realize(u)||_p / LP norm, {} s = {s} p = {p}: spread over dilations -1, 0, 1",
            rp.regime
        );
        out.push(guarded(&id, S, &desc, || {
            let mut worst: f64 = 0.0;
            for u in &corpus {
                let mut ratios = Vec::new();
                for k in [-1, 0, 1] {
                    let v = u.dilated(k);
                    let part = DyadicPartition::for_grid(v.grid());
                    let rep: Representative = realize(&v, &rp, &part, &Ball::default_for(v.grid()))?.representative;
                    ratios.push(rep.energy_norm(s, p)? / lp_sobolev_norm(&v, s, p, &part)?);
                }
                let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().copied().fold(0.0, f64::max);
                worst = worst.max(hi / lo - 1.0);
                all.extend(ratios);
            }
            Ok(Check::at_most(&id, S, &desc, worst, 0.05))
        }));
    }
    let c = all.iter().map(|&r| r.max(1.0 / r)).fold(1.0, f64::max);
    out.push(Check::note(
        "REA-94",
        S,
        "bracket constant C with every ratio in [1/C, C]",
        c,
        1.0,
    ));
    out
}

fn oracles(_cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Oracles;
    let mut out = Vec::new();
    let desc = "quoted kernel constant at d = 1, s = 1/2 against 0.53113";
    out.push(guarded("ORC-01", S, desc, || {
        let v = riesz_kernel_constant(0.5, 1, KernelConvention::TwoPi)?;
        Ok(Check::at_most("ORC-01", S, desc, (v - 0.53113).abs(), 1e-5))
    }));
    let line = GridSpec::desk(1).expect("desk grid");
    let corpus = match corpus_for(&line) {
        Ok(c) => c,
        Err(e) => return vec![Check::errored("ORC-02", S, "corpus", e)],
    };
    let desc = "calibrated angular kernel constant against the closed form, s = 0.5: relative";
    out.push(guarded("ORC-02", S, desc, || {
        let f = &corpus[2];
        let c = fit_scalar(&riesz_convolution_direct(f, 0.5)?, &riesz_potential(f, 0.5)?)?;
        let closed = riesz_kernel_constant(0.5, 1, KernelConvention::Angular)?;
        Ok(Check::at_most("ORC-02", S, desc, (c / closed - 1.0).abs(), 1e-4))
    }));
    let desc = "direct against spectral Riesz potential on the d = 1 corpus, s in {0.3, 0.5, 0.7}: relative L2";
    out.push(guarded("ORC-03", S, desc, || {
        let mut worst: f64 = 0.0;
        for f in &corpus {
            for s in [0.3, 0.5, 0.7] {
                worst = worst.max(rel_l2(&riesz_potential_direct(f, s)?, &riesz_potential(f, s)?)?);
            }
        }
        Ok(Check::at_most("ORC-03", S, desc, worst, 1e-4))
    }));
    for (i, (nu, p, d)) in [(1.0, 2.0, 1usize), (1.4, 1.5, 1), (1.7, 2.0, 2)]
        .into_iter()
        .enumerate()
    {
        let id = format!("ORC-0{}", i + 4);
        let desc = format!(
            "kernel difference norm slope, nu = {nu} p = {p} d = {d}, |a| in {{1, 2, 4}}: |slope - (nu - d/p)|"
        );
        out.push(guarded(&id, S, &desc, || {
            let st = ga_norm_study(nu, p, d, &[1.0, 2.0, 4.0], 1e-10)?;
            Ok(Check::at_most(
                &id,
                S,
                &desc,
                (st.slope - st.reference_slope).abs(),
                1e-3,
            ))
        }));
    }
    let profile = smooth_step();
    let mut scaling: f64 = 0.0;
    for (i, (d, k, s)) in [(1usize, 0u32, 1.0), (1, 1, 2.0), (2, 0, 1.5)].into_iter().enumerate() {
        let id = format!("ORC-0{}", i + 7);
        let desc = format!("windowed monomial squared norm slope, d = {d} k = {k} s = {s}: |slope - (d + 2(k - s))|");
        out.push(guarded(&id, S, &desc, || {
            let grid = annihilation_grid(d, 8.0)?;
            let st = polynomial_annihilation_study(&grid, &[k, 0, 0], s, &profile, &[1.0, 2.0, 4.0, 8.0])?;
            scaling = scaling.max(st.scaling_deviation);
            Ok(Check::at_most(
                &id,
                S,
                &desc,
                (st.slope - st.reference_slope).abs(),
                5e-2,
            ))
        }));
    }
    let desc = "sign of the squared norm slope matches d + 2(k - s) on the 12-point (k, s) matrix";
    out.push(guarded("ORC-10", S, desc, || {
        let grid = annihilation_grid(1, 8.0)?;
        let mut hits = 0;
        for k in 0..3u32 {
            for s in [0.3, 0.8, 1.3, 2.2] {
                let st = polynomial_annihilation_study(&grid, &[k, 0, 0], s, &profile, &[1.0, 2.0, 4.0, 8.0])?;
                if st.slope.signum() == st.reference_slope.signum() {
                    hits += 1;
                }
            }
        }
        Ok(Check::at_least("ORC-10", S, desc, hits as f64, 12.0))
    }));
    out.push(Check::at_most(
        "ORC-11",
        S,
        "exact dilation identity of the windowed monomial norms: max relative deviation",
        scaling,
        1e-6,
    ));
    out
}

fn embeddings(_cfg: &RunConfig) -> Vec<Check> {
    const S: Suite = Suite::Embeddings;
    let families = match frozen_families() {
        Ok(f) => f,
        Err(e) => return vec![Check::errored("EMB-00", S, "frozen corpus", e)],
    };
    let mut out = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        let (ida, idb) = (format!("EMB-{:02}a", i + 1), format!("EMB-{:02}b", i + 1));
        match embedding_ratio_study(&fam.params, &fam.members, fam.label, &EmbeddingConfig::default()) {
            Ok(rep) => {
                out.push(Check::at_most(
                    &ida,
                    S,
                    format!("{}: {} / ||Delta^(s/2) f||_p dilation spread", fam.label, rep.left),
                    rep.spread,
                    fam.spread_tolerance,
                ));
                out.push(Check::at_most(
                    &idb,
                    S,
                    format!("{}: largest ratio against the frozen ceiling", fam.label),
                    rep.max_ratio,
                    fam.ceiling,
                ));
            }
            Err(e) => out.push(Check::errored(&ida, S, fam.label, e)),
        }
    }
    out
}
