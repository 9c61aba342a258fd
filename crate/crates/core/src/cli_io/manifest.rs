//! Reference tables and their tolerances, loaded from `manifest.toml`.

use crate::cli_io::report::ReportTable;
use crate::error::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    Evaluate,
    MaxEta,
    MinNoise,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefRow {
    /// Slugified row label of the computed table.
    pub key: String,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    /// One entry per column; `nan` where there is no reference value.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefTable {
    pub which: u8,
    pub title: String,
    pub mode: TableMode,
    #[serde(default)]
    pub kappa_ext_rule: Option<String>,
    pub columns: Vec<String>,
    pub headers: Vec<String>,
    #[serde(default, rename = "row")]
    pub rows: Vec<RefRow>,
    #[serde(default, rename = "waiver")]
    pub waivers: Vec<Waiver>,
}

/// A reference cell known to be defective, reported but not enforced.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waiver {
    pub column: String,
    pub key: String,
    pub reason: String,
}

/// Outcome of comparing computed tables with a reference table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub checked: usize,
    pub breaches: Vec<Breach>,
    /// Out-of-tolerance cells covered by a waiver, with its reason.
    pub waived: Vec<(Breach, String)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "table")]
    pub tables: Vec<RefTable>,
}

/// One reference cell outside its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Breach {
    pub column: String,
    pub key: String,
    pub computed: Option<f64>,
    pub reference: f64,
    pub tolerance: String,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::Validation(format!("manifest: {e}")))?;
        for t in &m.tables {
            for w in &t.waivers {
                if !t.headers.contains(&w.column) || !t.rows.iter().any(|r| r.key == w.key) {
                    return Err(Error::Validation(format!(
                        "manifest table {}: waiver for unknown cell {} / {}",
                        t.which, w.column, w.key
                    )));
                }
            }
            if t.headers.len() != t.columns.len() {
                return Err(Error::Validation(format!("manifest table {}: header count", t.which)));
            }
            for r in &t.rows {
                if r.values.len() != t.columns.len() {
                    return Err(Error::Validation(format!(
                        "manifest table {} row `{}`: {} values for {} columns",
                        t.which,
                        r.key,
                        r.values.len(),
                        t.columns.len()
                    )));
                }
                if r.rel_tol.is_some() == r.abs_tol.is_some() {
                    return Err(Error::Validation(format!(
                        "manifest table {} row `{}`: exactly one of rel_tol, abs_tol",
                        t.which, r.key
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn table(&self, which: u8) -> Result<&RefTable> {
        self.tables
            .iter()
            .find(|t| t.which == which)
            .ok_or_else(|| Error::Validation(format!("manifest has no table {which}")))
    }
}

impl RefRow {
    pub fn within(&self, computed: f64, reference: f64) -> bool {
        let err = (computed - reference).abs();
        match (self.rel_tol, self.abs_tol) {
            (Some(r), _) => err <= r * reference.abs(),
            (_, Some(a)) => err <= a,
            _ => false,
        }
    }

    fn tolerance(&self) -> String {
        match (self.rel_tol, self.abs_tol) {
            (Some(r), _) => format!("rel {r}"),
            (_, Some(a)) => format!("abs {a}"),
            _ => "none".into(),
        }
    }
}

impl RefTable {
    /// Every reference cell of this table that `computed` misses.
    pub fn check(&self, computed: &[ReportTable]) -> CheckReport {
        let mut report = CheckReport::default();
        for row in &self.rows {
            for (j, &reference) in row.values.iter().enumerate() {
                if reference.is_nan() {
                    continue;
                }
                report.checked += 1;
                let got = computed.get(j).and_then(|t| t.num(&row.key));
                if !got.is_some_and(|c| row.within(c, reference)) {
                    let b = Breach {
                        column: self.headers[j].clone(),
                        key: row.key.clone(),
                        computed: got,
                        reference,
                        tolerance: row.tolerance(),
                    };
                    match self.waivers.iter().find(|w| w.column == b.column && w.key == b.key) {
                        Some(w) => report.waived.push((b, w.reason.clone())),
                        None => report.breaches.push(b),
                    }
                }
            }
        }
        report
    }
}
