//! Experiment commands: each writes its artifacts into the output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use homsob::embedding::{embedding_ratio_study, frozen_families, EmbeddingConfig};
use homsob::field::{read_fld_file, write_fld_file, GridSpec};
use homsob::littlewood_paley::smooth_step;
use homsob::oracles::corpus::default_projection_radius;
use homsob::oracles::studies::annihilation_grid;
use homsob::oracles::{
    ga_norm_study, make_test_function, polynomial_annihilation_study, s_infty_project, TestFunction,
};
use homsob::realization::{classify_regime, realize};

use crate::config::{ConfigError, RunConfig};

/// Experiment outcome: `Usage` maps to exit 2, `Failed` to exit 1.
#[derive(Debug)]
pub enum Outcome {
    Failed(String),
    Usage(String),
}

impl From<homsob::Error> for Outcome {
    fn from(e: homsob::Error) -> Self {
        Outcome::Failed(e.to_string())
    }
}

impl From<ConfigError> for Outcome {
    fn from(e: ConfigError) -> Self {
        Outcome::Usage(e.0)
    }
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        Outcome::Usage(e.to_string())
    }
}

pub type Exp = Result<String, Outcome>;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Outcome> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn ga_norm(nu: f64, p: f64, d: usize, a: &[f64], tol: f64, out: &Path) -> Exp {
    let st = ga_norm_study(nu, p, d, a, tol)?;
    st.table.write_csv(create(out, "ga_norm.csv")?)?;
    Ok(format!(
        "slope {:e} (reference {:e}), written to {}",
        st.slope,
        st.reference_slope,
        out.join("ga_norm.csv").display()
    ))
}

pub fn poly_annihilation(k: u32, s: f64, d: usize, n: &[f64], out: &Path) -> Exp {
    let n_max = n.iter().copied().fold(0.0, f64::max);
    let grid = annihilation_grid(d, n_max)?;
    let mut alpha = [0; 3];
    alpha[0] = k;
    let st = polynomial_annihilation_study(&grid, &alpha, s, &smooth_step(), n)?;
    st.table.write_csv(create(out, "poly_annihilation.csv")?)?;
    Ok(format!(
        "slope {:e} (reference {:e}), written to {}",
        st.slope,
        st.reference_slope,
        out.join("poly_annihilation.csv").display()
    ))
}

pub fn embeddings(out: &Path) -> Exp {
    let mut lines = Vec::new();
    for fam in frozen_families()? {
        let rep = embedding_ratio_study(&fam.params, &fam.members, fam.label, &EmbeddingConfig::default())?;
        let name = format!("embeddings_{}.csv", fam.label);
        rep.write_csv(create(out, &name)?)?;
        lines.push(format!(
            "{}: max ratio {:e} (ceiling {:e}), spread {:e} (tolerance {:e})",
            fam.label, rep.max_ratio, fam.ceiling, rep.spread, fam.spread_tolerance
        ));
    }
    Ok(lines.join("\n"))
}

pub fn realize_field(input: &Path, s: f64, p: f64, cfg: &RunConfig, out: &Path) -> Exp {
    if !input.exists() {
        return Err(Outcome::Usage(format!(
            "input field {} does not exist",
            input.display()
        )));
    }
    let u = read_fld_file(input)?;
    let rp = classify_regime(s, p, u.grid().dim())?;
    let mut cfg = cfg.clone();
    cfg.grid = *u.grid();
    cfg.validate()?;
    let res = realize(&u, &rp, &cfg.partition()?, &cfg.ball())?;
    std::fs::create_dir_all(out)?;
    write_fld_file(&res.representative.periodic, out.join("out.fld"))?;
    res.representative
        .write_polynomial_csv(create(out, "polynomial.csv")?)?;
    res.write_diagnostics_csv(create(out, "diagnostics.csv")?)?;
    res.constraints.write_csv(create(out, "constraints.csv")?)?;
    let msg = format!(
        "{} regime, m = {}, max residual {:e} (scale {:e}), energy norm {:e}",
        rp.regime,
        rp.m,
        res.constraints.max_residual(),
        res.constraints.scale,
        res.constraints.energy_norm
    );
    if res.constraints.passed {
        Ok(msg)
    } else {
        Err(Outcome::Failed(format!("canonical constraints violated: {msg}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldKind {
    Gaussian,
    Hermite,
    WindowedPoly,
    WindowedLog,
}

pub struct FieldSpec {
    pub kind: FieldKind,
    pub grid: GridSpec,
    pub sigma: f64,
    pub order: u32,
    pub alpha: Vec<u32>,
    pub project: bool,
}

pub fn make_field(spec: &FieldSpec, path: &PathBuf) -> Exp {
    let kind = match spec.kind {
        FieldKind::Gaussian => TestFunction::Gaussian { sigma: spec.sigma },
        FieldKind::Hermite => TestFunction::HermiteGaussian {
            order: spec.order,
            sigma: spec.sigma,
        },
        FieldKind::WindowedPoly => {
            if spec.alpha.len() > 3 {
                return Err(Outcome::Usage(format!(
                    "multi-index {:?} has more than 3 entries",
                    spec.alpha
                )));
            }
            let mut alpha = [0; 3];
            alpha[..spec.alpha.len()].copy_from_slice(&spec.alpha);
            TestFunction::WindowedPolynomial { alpha }
        }
        FieldKind::WindowedLog => TestFunction::WindowedLogAbs,
    };
    let mut f = make_test_function(&kind, &spec.grid)?;
    if spec.project {
        f = s_infty_project(&f, default_projection_radius(&spec.grid))?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_fld_file(&f, path)?;
    Ok(format!("wrote {}", path.display()))
}
