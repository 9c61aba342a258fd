//! Scenario files, reports and the `xducer` command line.

pub mod manifest;
pub mod report;
pub mod scenario;

use crate::designer::{design, evaluate, DesignMode, DesignRequest, DesignResult};
use crate::error::{Error, Result};
use crate::figures::Direction;
use clap::{Parser, Subcommand, ValueEnum};
use manifest::{Manifest, TableMode};
use report::{fom_table, render, spectrum_csv, ReportTable, HUMAN_SIG_FIGS};
use scenario::{parse_rule, ScenarioSpec};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCENARIO_DIR_ENV: &str = "XDUCER_SCENARIO_DIR";
pub const MANIFEST_FILE: &str = "manifest.toml";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BREACH: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xducer", version, about = "Piezo-optomechanical transducer analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    MaxEta,
    MinNoise,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Optimize,
    ClosedForm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Figures of merit of a scenario as written.
    Analyze {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long)]
        json: bool,
    },
    /// Design a matching network and report the matched figures of merit.
    Match {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "max-eta")]
        mode: ModeArg,
        #[arg(long, value_enum)]
        kappa_ext_rule: Option<RuleArg>,
        /// Write the designed scenario here.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Efficiency, noise and impedance over a frequency grid, as CSV.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        from_hz: f64,
        #[arg(long)]
        to_hz: f64,
        /// Number of samples, endpoints included.
        #[arg(long)]
        points: usize,
        /// Output file, or `-` for standard output.
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Reproduce a reference table from the bundled scenarios.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Compare against the reference values and tolerances.
        #[arg(long)]
        check: bool,
    },
}

/// Directory holding the bundled scenarios and manifest.
pub fn scenario_dir() -> PathBuf {
    std::env::var_os(SCENARIO_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios"))
}

/// `path` as given, else relative to the scenario directory.
pub fn resolve(path: &Path) -> Result<PathBuf> {
    if path.is_file() {
        return Ok(path.to_path_buf());
    }
    let bundled = scenario_dir().join(path);
    if path.is_relative() && bundled.is_file() {
        return Ok(bundled);
    }
    Err(Error::Validation(format!("file not found: {}", path.display())))
}

pub fn load_spec(path: &Path) -> Result<ScenarioSpec> {
    let p = resolve(path)?;
    let text = std::fs::read_to_string(&p).map_err(|e| Error::Validation(format!("{}: {e}", p.display())))?;
    ScenarioSpec::parse(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{message} ({})", p.display()),
        },
        other => other,
    })
}

pub fn load_manifest() -> Result<Manifest> {
    let p = scenario_dir().join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&p).map_err(|_| Error::Validation(format!("file not found: {}", p.display())))?;
    Manifest::parse(&text)
}

/// Runs the designer on a spec.
pub fn design_spec(spec: &ScenarioSpec, mode: DesignMode) -> Result<DesignResult> {
    let s = spec.to_scenario()?;
    design(&DesignRequest::from_scenario(&s, mode).with_rule(spec.kappa_ext_rule))
}

/// Table for a design, with the feasibility notes appended.
pub fn design_table(r: &DesignResult) -> ReportTable {
    let mut t = fom_table(&r.scenario, &r.fom);
    if !r.feasibility_notes.is_empty() {
        t.push_text("Notes", &r.feasibility_notes.join("; "));
    }
    t
}

/// Computed tables for each column of a reference table.
pub fn compute_reference_table(which: u8) -> Result<(manifest::RefTable, Vec<ReportTable>)> {
    let m = load_manifest()?;
    let t = m.table(which)?.clone();
    let rule = match &t.kappa_ext_rule {
        Some(r) => Some(parse_rule(r).ok_or_else(|| Error::Validation(format!("manifest: unknown rule `{r}`")))?),
        None => None,
    };
    let mut cols = Vec::new();
    for c in &t.columns {
        let mut spec = load_spec(Path::new(c))?;
        if let Some(r) = rule {
            spec.kappa_ext_rule = r;
        }
        let table = match t.mode {
            TableMode::Evaluate => {
                let s = spec.to_scenario()?;
                fom_table(&s, &evaluate(&s))
            }
            TableMode::MaxEta => design_table(&design_spec(&spec, DesignMode::MaximizeEta)?),
            TableMode::MinNoise => design_table(&design_spec(&spec, DesignMode::MinimizeNoise)?),
        };
        cols.push(table);
    }
    Ok((t, cols))
}

fn side_by_side(headers: &[String], cols: &[ReportTable]) -> String {
    let Some(first) = cols.first() else {
        return String::new();
    };
    let label_w = first.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let cell = |t: &ReportTable, key: &str| t.get(key).map(|v| render(v, HUMAN_SIG_FIGS)).unwrap_or_else(|| "-".into());
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for (j, t) in cols.iter().enumerate() {
        for r in &first.rows {
            widths[j] = widths[j].max(cell(t, &r.key).len());
        }
    }
    let mut out = format!("{:<label_w$}", "");
    for (h, w) in headers.iter().zip(&widths) {
        out.push_str(&format!("  {h:>w$}"));
    }
    out.push('\n');
    for r in &first.rows {
        let mut line = format!("{:<label_w$}", r.label);
        for (t, w) in cols.iter().zip(&widths) {
            line.push_str(&format!("  {:>w$}", cell(t, &r.key)));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// `points` evenly spaced angular frequencies from `from_hz` to `to_hz`.
pub fn sweep_grid(from_hz: f64, to_hz: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Grid("points must be at least 2".into()));
    }
    if !(from_hz < to_hz) {
        return Err(Error::Grid("sweep needs from < to".into()));
    }
    let tp = 2.0 * std::f64::consts::PI;
    let n = (points - 1) as f64;
    Ok((0..points).map(|i| tp * (from_hz + (to_hz - from_hz) * i as f64 / n)).collect())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Validation(e.to_string());
    match cmd {
        Command::Analyze { scenario, direction, json } => {
            let mut s = load_spec(&scenario)?.to_scenario()?;
            if let Some(d) = direction {
                s = s.with_direction(match d {
                    DirectionArg::Forward => Direction::ElectricalToOptical,
                    DirectionArg::Reverse => Direction::OpticalToElectrical,
                });
            }
            let f = evaluate(&s);
            let t = fom_table(&s, &f);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&t.to_json()).expect("json")).map_err(io)?;
            } else {
                write!(out, "{}", t.to_human()).map_err(io)?;
                for w in &f.warnings {
                    writeln!(out, "warning: {w}").map_err(io)?;
                }
            }
        }
        Command::Match { scenario, mode, kappa_ext_rule, emit, json } => {
            let mut spec = load_spec(&scenario)?;
            if let Some(r) = kappa_ext_rule {
                spec.kappa_ext_rule = match r {
                    RuleArg::Optimize => crate::optomech::KappaExtRule::Optimize,
                    RuleArg::ClosedForm => crate::optomech::KappaExtRule::ClosedForm,
                };
            }
            let mode = match mode {
                ModeArg::MaxEta => DesignMode::MaximizeEta,
                ModeArg::MinNoise => DesignMode::MinimizeNoise,
            };
            let r = design_spec(&spec, mode)?;
            let t = design_table(&r);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&t.to_json()).expect("json")).map_err(io)?;
            } else {
                write!(out, "{}", fom_table(&r.scenario, &r.fom).to_human()).map_err(io)?;
                for n in &r.feasibility_notes {
                    writeln!(out, "note: {n}").map_err(io)?;
                }
            }
            if let Some(path) = emit {
                let designed = spec.with_design(r.network.topology, r.kappa_ext, r.n_phot);
                write_file(&path, &designed.emit())?;
            }
        }
        Command::Sweep { scenario, from_hz, to_hz, points, out: dest } => {
            let grid = sweep_grid(from_hz, to_hz, points)?;
            let s = load_spec(&scenario)?.to_scenario()?;
            let csv = spectrum_csv(&s.operating_point().spectrum(&grid)?);
            if dest.as_os_str() == "-" {
                write!(out, "{csv}").map_err(io)?;
            } else {
                write_file(&dest, &csv)?;
            }
        }
        Command::Tables { which, check } => {
            let (t, cols) = compute_reference_table(which)?;
            writeln!(out, "Table {}: {}", t.which, t.title).map_err(io)?;
            write!(out, "{}", side_by_side(&t.headers, &cols)).map_err(io)?;
            if check {
                let report = t.check(&cols);
                let fmt = |b: &manifest::Breach| {
                    let got = b.computed.map(|c| report::fmt_sig(c, HUMAN_SIG_FIGS)).unwrap_or_else(|| "missing".into());
                    format!(
                        "{} {}: computed {}, reference {} ({})",
                        b.column,
                        b.key,
                        got,
                        report::fmt_sig(b.reference, HUMAN_SIG_FIGS),
                        b.tolerance
                    )
                };
                for (b, reason) in &report.waived {
                    writeln!(out, "WAIVED {} [{reason}]", fmt(b)).map_err(io)?;
                }
                for b in &report.breaches {
                    writeln!(out, "FAIL {}", fmt(b)).map_err(io)?;
                }
                let n = report.checked;
                if report.breaches.is_empty() {
                    writeln!(out, "check passed: {} of {n} cells within tolerance, {} waived", n - report.waived.len(), report.waived.len()).map_err(io)?;
                } else {
                    writeln!(out, "check failed: {} of {n} cells out of tolerance", report.breaches.len()).map_err(io)?;
                    return Ok(EXIT_BREACH);
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return e.exit_code();
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
