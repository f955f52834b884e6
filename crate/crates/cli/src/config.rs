//! Run configuration: a flat `key = value` file with `[section]` headers.
//!
//! ```text
//! [grid]       d, L, N
//! [regime]     s, p
//! [partition]  jmin, jmax
//! [ball]       center (comma separated), radius
//! [bmo]        center_spacing, r0, rho, count
//! [lipschitz]  levels
//! [run]        suite, seed, out
//! ```
//!
//! Every key is optional; unknown sections and keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use homsob::direct_norms::BallPlanConfig;
use homsob::field::{GridSpec, MAX_DIM};
use homsob::littlewood_paley::{build_partition, smooth_step, DyadicPartition};
use homsob::realization::{classify_regime, Ball, RegimeParams};
use ini::Ini;

/// Configuration failure; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

macro_rules! bail {
    ($($fmt:tt)+) => {
        return Err(ConfigError(format!($($fmt)+)))
    };
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["d", "L", "N"]),
    ("regime", &["s", "p"]),
    ("partition", &["jmin", "jmax"]),
    ("ball", &["center", "radius"]),
    ("bmo", &["center_spacing", "r0", "rho", "count"]),
    ("lipschitz", &["levels"]),
    ("run", &["suite", "seed", "out"]),
];

/// Verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Multipliers,
    LittlewoodPaley,
    Norms,
    Realization,
    Oracles,
    Embeddings,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Multipliers,
        Suite::LittlewoodPaley,
        Suite::Norms,
        Suite::Realization,
        Suite::Oracles,
        Suite::Embeddings,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Multipliers => "multipliers",
            Suite::LittlewoodPaley => "littlewood-paley",
            Suite::Norms => "norms",
            Suite::Realization => "realization",
            Suite::Oracles => "oracles",
            Suite::Embeddings => "embeddings",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| ConfigError(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// `(s, p)` when given; suites then add a case for it.
    pub regime: Option<(f64, f64)>,
    pub partition: Option<(i32, i32)>,
    pub ball: Option<Ball>,
    pub bmo: Option<BallPlanConfig>,
    pub lipschitz_levels: u32,
    pub suite: Suite,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::desk(1).expect("desk grid"),
            regime: None,
            partition: None,
            ball: None,
            bmo: None,
            lipschitz_levels: 5,
            suite: Suite::All,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(section: &str, key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.trim()
        .parse()
        .map_err(|_| ConfigError(format!("[{section}] {key} = '{raw}' is not a valid value")))
}

fn parse_list(section: &str, key: &str, raw: &str) -> Result<Vec<f64>, ConfigError> {
    raw.split(',').map(|v| parse(section, key, v)).collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str_checked(&text)
    }

    pub fn from_str_checked(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError(format!("malformed config: {e}")))?;
        let mut raw: Vec<(String, String, String)> = Vec::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    bail!("key '{k}' appears before any [section]");
                }
                continue;
            };
            let Some((_, allowed)) = KEYS.iter().find(|(s, _)| *s == section) else {
                bail!("unknown section [{section}]");
            };
            for (k, v) in props.iter() {
                if !allowed.contains(&k) {
                    bail!(
                        "unknown key '{k}' in [{section}]; expected one of {}",
                        allowed.join(", ")
                    );
                }
                raw.push((section.to_string(), k.to_string(), v.to_string()));
            }
        }
        let get = |s: &str, k: &str| {
            raw.iter()
                .find(|(a, b, _)| a == s && b == k)
                .map(|(_, _, v)| v.as_str())
        };
        let mut cfg = RunConfig::default();

        let d: Option<usize> = get("grid", "d").map(|v| parse("grid", "d", v)).transpose()?;
        let l: Option<f64> = get("grid", "L").map(|v| parse("grid", "L", v)).transpose()?;
        let n: Option<usize> = get("grid", "N").map(|v| parse("grid", "N", v)).transpose()?;
        if d.is_some() || l.is_some() || n.is_some() {
            let d = d.unwrap_or(1);
            let desk = GridSpec::desk(d).map_err(|e| ConfigError(format!("[grid] {e}")))?;
            let grid = GridSpec::new(d, l.unwrap_or(desk.period()), n.unwrap_or(desk.n()))
                .map_err(|e| ConfigError(format!("[grid] {e}")))?;
            cfg.grid = grid;
        }

        match (get("regime", "s"), get("regime", "p")) {
            (None, None) => {}
            (Some(s), Some(p)) => cfg.regime = Some((parse("regime", "s", s)?, parse("regime", "p", p)?)),
            _ => bail!("[regime] needs both s and p"),
        }
        match (get("partition", "jmin"), get("partition", "jmax")) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                cfg.partition = Some((parse("partition", "jmin", a)?, parse("partition", "jmax", b)?))
            }
            _ => bail!("[partition] needs both jmin and jmax"),
        }
        if get("ball", "center").is_some() || get("ball", "radius").is_some() {
            let mut ball = Ball::default_for(&cfg.grid);
            if let Some(c) = get("ball", "center") {
                let c = parse_list("ball", "center", c)?;
                if c.len() != cfg.grid.dim() {
                    bail!(
                        "[ball] center has {} coordinates but the grid has d = {}",
                        c.len(),
                        cfg.grid.dim()
                    );
                }
                ball.center = [0.0; MAX_DIM];
                ball.center[..c.len()].copy_from_slice(&c);
            }
            if let Some(r) = get("ball", "radius") {
                ball.radius = parse("ball", "radius", r)?;
            }
            cfg.ball = Some(ball);
        }
        if ["center_spacing", "r0", "rho", "count"]
            .iter()
            .any(|k| get("bmo", k).is_some())
        {
            let mut b = BallPlanConfig::default_for(&cfg.grid);
            if let Some(v) = get("bmo", "center_spacing") {
                b.center_spacing = parse("bmo", "center_spacing", v)?;
            }
            if let Some(v) = get("bmo", "r0") {
                b.r0 = parse("bmo", "r0", v)?;
            }
            if let Some(v) = get("bmo", "rho") {
                b.rho = parse("bmo", "rho", v)?;
            }
            if let Some(v) = get("bmo", "count") {
                b.count = parse("bmo", "count", v)?;
            }
            cfg.bmo = Some(b);
        }
        if let Some(v) = get("lipschitz", "levels") {
            cfg.lipschitz_levels = parse("lipschitz", "levels", v)?;
        }
        if let Some(v) = get("run", "suite") {
            cfg.suite = v.trim().parse()?;
        }
        if let Some(v) = get("run", "seed") {
            cfg.seed = parse("run", "seed", v)?;
        }
        if let Some(v) = get("run", "out") {
            cfg.out = PathBuf::from(v.trim());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every value before any computation runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some((s, p)) = self.regime {
            classify_regime(s, p, self.grid.dim()).map_err(|e| ConfigError(format!("[regime] {e}")))?;
        }
        if self.partition.is_some() {
            self.partition()?;
        }
        if let Some(b) = &self.ball {
            if !(b.radius > 0.0 && b.radius.is_finite()) {
                bail!("[ball] radius = {} must be positive", b.radius);
            }
            b.members(&self.grid).map_err(|e| ConfigError(format!("[ball] {e}")))?;
        }
        if let Some(b) = &self.bmo {
            homsob::direct_norms::BallSamplingPlan::new(&self.grid, b)
                .map_err(|e| ConfigError(format!("[bmo] {e}")))?;
        }
        if !(1..=10).contains(&self.lipschitz_levels) {
            bail!("[lipschitz] levels = {} must lie in 1..=10", self.lipschitz_levels);
        }
        Ok(())
    }

    pub fn partition(&self) -> Result<DyadicPartition, ConfigError> {
        match self.partition {
            None => Ok(DyadicPartition::for_grid(&self.grid)),
            Some((a, b)) => build_partition(a, b, smooth_step()).map_err(|e| ConfigError(format!("[partition] {e}"))),
        }
    }

    pub fn ball(&self) -> Ball {
        self.ball.unwrap_or_else(|| Ball::default_for(&self.grid))
    }

    pub fn regime_params(&self) -> Option<RegimeParams> {
        self.regime
            .map(|(s, p)| classify_regime(s, p, self.grid.dim()).expect("validated"))
    }
}
