//! Check rows and the CSV / text report.

use std::io::Write;
use std::path::Path;

use crate::config::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Recorded for reference, not asserted.
    Note,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Note => "note",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub suite: Suite,
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    pub status: Status,
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl Check {
    /// Passes when `measured <= threshold` (NaN fails).
    pub fn at_most(id: &str, suite: Suite, description: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            id: id.to_string(),
            suite,
            description: description.into(),
            measured,
            threshold,
            status: status_of(measured <= threshold),
        }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(id: &str, suite: Suite, description: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            status: status_of(measured >= threshold),
            ..Self::at_most(id, suite, description, measured, threshold)
        }
    }

    pub fn note(id: &str, suite: Suite, description: impl Into<String>, measured: f64, reference: f64) -> Self {
        Self {
            status: Status::Note,
            ..Self::at_most(id, suite, description, measured, reference)
        }
    }

    /// A failed check for a computation that returned an error.
    pub fn errored(id: &str, suite: Suite, description: &str, err: impl std::fmt::Display) -> Self {
        Self {
            id: id.to_string(),
            suite,
            description: format!("{description}: {err}"),
            measured: f64::NAN,
            threshold: f64::NAN,
            status: Status::Fail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn extend(&mut self, checks: Vec<Check>) {
        self.checks.extend(checks);
    }

    /// Orders rows by id so the file does not depend on execution order.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["id", "suite", "description", "measured", "threshold", "status"])?;
        for c in &self.checks {
            out.write_record([
                c.id.as_str(),
                c.suite.name(),
                c.description.as_str(),
                &format!("{:e}", c.measured),
                &format!("{:e}", c.threshold),
                c.status.name(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{:<4} {:<8} {} (measured {:e}, threshold {:e})\n",
                c.status.name(),
                c.id,
                c.description,
                c.measured,
                c.threshold
            ));
        }
        let fails = self.failures();
        let notes = self.checks.iter().filter(|c| c.status == Status::Note).count();
        s.push_str(&format!(
            "{} checks, {} failed, {} recorded notes\n",
            self.checks.len(),
            fails.len(),
            notes
        ));
        if !fails.is_empty() {
            let ids: Vec<&str> = fails.iter().map(|c| c.id.as_str()).collect();
            s.push_str(&format!("failing: {}\n", ids.join(", ")));
        }
        s
    }

    /// Writes `report.csv` and `summary.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join("report.csv"))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(std::io::Error::other)?;
        std::fs::write(dir.join("summary.txt"), self.summary())
    }
}
