//! Independent reference computations: kernel constants, direct convolution,
//! quadrature and scaling studies, and the test-function corpus.

pub mod convolution;
pub mod corpus;
pub mod quadrature;
pub mod studies;

use std::io::Write;

use crate::error::Result;

pub use convolution::{riesz_kernel_constant, riesz_potential_direct, KernelConvention};
pub use corpus::{make_test_function, s_infty_project, TestFunction};
pub use studies::{ga_norm_study, polynomial_annihilation_study, AnnihilationStudy, GaStudy};

/// One measured quantity against its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub params: Vec<String>,
    pub measured: f64,
    pub reference: f64,
    pub rel_dev: f64,
}

/// Rows of `(params..., measured, reference, rel_dev)` in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub param_names: Vec<String>,
    pub rows: Vec<StudyRow>,
}

/// `|measured - reference| / |reference|`, or the absolute deviation when the reference is zero.
pub fn relative_deviation(measured: f64, reference: f64) -> f64 {
    let diff = (measured - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

impl StudyTable {
    pub fn new(param_names: &[&str]) -> Self {
        Self {
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<String>, measured: f64, reference: f64) {
        assert_eq!(params.len(), self.param_names.len(), "parameter count mismatch");
        self.rows.push(StudyRow {
            params,
            measured,
            reference,
            rel_dev: relative_deviation(measured, reference),
        });
    }

    /// Rows whose first parameter equals `quantity`.
    pub fn rows_of<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a StudyRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.params.first().map(String::as_str) == Some(quantity))
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = self.param_names.clone();
        header.extend(["measured", "reference", "rel_dev"].map(String::from));
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = r.params.clone();
            rec.push(format!("{:e}", r.measured));
            rec.push(format!("{:e}", r.reference));
            rec.push(format!("{:e}", r.rel_dev));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_csv_layout() {
        let mut t = StudyTable::new(&["quantity", "a"]);
        t.push(vec!["norm".into(), "1".into()], 2.0, 2.0);
        t.push(vec!["slope".into(), "".into()], 0.5005, 0.5);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("quantity,a,measured,reference,rel_dev\n"));
        assert_eq!(text.lines().count(), 3);
        assert!((t.rows[1].rel_dev - 1e-3).abs() < 1e-12);
        assert_eq!(t.rows_of("slope").count(), 1);
    }

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 0.25 * v).collect();
        assert!((fit_slope(&x, &y) + 0.25).abs() < 1e-15);
    }
}
