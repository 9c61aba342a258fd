//! Labelled result tables and their text, CSV and JSON renderings.

use crate::circuit_model::{DecayKind, Topology};
use crate::figures::{Bandwidth, FiguresOfMerit, Spectrum, TransducerScenario};
use std::f64::consts::PI;
use std::fmt::Write as _;

const TWO_PI: f64 = 2.0 * PI;
pub const HUMAN_SIG_FIGS: usize = 4;
pub const CSV_SIG_FIGS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub key: String,
    pub value: Value,
    pub unit: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    pub rows: Vec<Row>,
}

/// Lowercase identifier with runs of non-alphanumerics collapsed to `_`.
pub fn slugify(label: &str) -> String {
    let mut out = String::new();
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    out.trim_end_matches('_').to_string()
}

/// `x` rounded to `sig` significant digits, fixed or scientific by magnitude.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let exp: i32 = sci.split_once('e').map(|(_, e)| e.parse().unwrap_or(0)).unwrap_or(0);
    if (-3..4).contains(&exp) {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        sci
    }
}

impl ReportTable {
    pub fn push(&mut self, label: &str, value: f64, unit: &'static str) {
        self.rows.push(Row {
            label: label.into(),
            key: slugify(label),
            value: Value::Num(value),
            unit,
        });
    }

    pub fn push_text(&mut self, label: &str, text: &str) {
        self.rows.push(Row {
            label: label.into(),
            key: slugify(label),
            value: Value::Text(text.into()),
            unit: "",
        });
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.rows.iter().find(|r| r.key == key).map(|r| &r.value)
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Value::Num(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn to_human(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        let mut s = String::new();
        for r in &self.rows {
            let v = render(&r.value, HUMAN_SIG_FIGS);
            let _ = writeln!(s, "{:<width$}  {} {}", r.label, v, r.unit);
        }
        s.lines().map(|l| l.trim_end().to_string() + "\n").collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for r in &self.rows {
            let v = match &r.value {
                Value::Num(x) if x.is_finite() => serde_json::json!(x),
                Value::Num(_) => serde_json::Value::Null,
                Value::Text(t) => serde_json::json!(t),
            };
            m.insert(r.key.clone(), v);
        }
        serde_json::Value::Object(m)
    }
}

pub fn render(v: &Value, sig: usize) -> String {
    match v {
        Value::Num(x) => fmt_sig(*x, sig),
        Value::Text(t) => t.clone(),
    }
}

/// Network elements and every figure of merit for `scenario`.
pub fn fom_table(scenario: &TransducerScenario, f: &FiguresOfMerit) -> ReportTable {
    let mut t = ReportTable::default();
    t.push("Mechanical frequency", f.omega_m / TWO_PI, "Hz");
    t.push("Thermal phonon number", f.n_m, "");
    t.push_text("Network", scenario.network.topology.name());
    match scenario.network.topology {
        Topology::Bare => {}
        Topology::Rc { c_t } => t.push("Tuning capacitance", c_t, "F"),
        Topology::Rl { l } => t.push("Matching inductance", l, "H"),
        Topology::Rlc { l, c_t } => {
            t.push("Tuning capacitance", c_t, "F");
            t.push("Matching inductance", l, "H");
        }
    }
    if let Some(g) = f.g_em {
        t.push("Piezoelectric coupling rate", g / TWO_PI, "Hz");
    }
    match f.decay_kind {
        DecayKind::Tank => t.push("Electrical coupling rate", f.kappa_el / TWO_PI, "Hz"),
        DecayKind::Transmission => t.push("Electrical decay rate", f.kappa_el / TWO_PI, "Hz"),
    }
    t.push("Electrical coupling efficiency", f.eta_e, "");
    t.push("Optical coupling rate", f.kappa_ext / TWO_PI, "Hz");
    t.push("Optical decay rate", f.kappa_o / TWO_PI, "Hz");
    t.push("Optical quality factor (loaded)", f.q_o, "");
    t.push("Optical coupling efficiency", f.eta_o, "");
    t.push("Intra-cavity photon number", f.n_phot, "");
    t.push("Enhanced optomech. coupling rate", f.g_om / TWO_PI, "Hz");
    t.push("Electromechanical cooperativity", f.c_em, "");
    t.push("Optomechanical cooperativity", f.c_om, "");
    t.push("Upper sideband amplitude", f.lp2, "");
    t.push("Lower sideband amplitude", f.lm2, "");
    t.push("Impedance (real part)", f.z_at_wm.re, "ohm");
    t.push("Impedance (imaginary part)", f.z_at_wm.im, "ohm");
    t.push("Reflection", f.s11_at_wm, "");
    t.push("Peak transfer efficiency", f.eta_peak, "");
    match f.bandwidth {
        Bandwidth::ModeSplitting => t.push_text("Transduction bandwidth", "mode splitting"),
        b => t.push("Transduction bandwidth", b.value().unwrap_or(f64::NAN) / TWO_PI, "Hz"),
    }
    t.push_text("Bandwidth regime", bandwidth_regime(&f.bandwidth));
    t.push("Added total noise", f.n_total, "photons");
    t.push("Added optical noise", f.n_o, "photons");
    t.push("Added mechanical noise", f.n_mech, "photons");
    if let Some(r) = f.reverse {
        t.push("Reverse added total noise", r.n_total, "photons");
        t.push("Reverse added optical noise", r.n_o, "photons");
        t.push("Reverse added mechanical noise", r.n_mech, "photons");
    }
    t
}

fn bandwidth_regime(b: &Bandwidth) -> &'static str {
    match b {
        Bandwidth::Adiabatic(_) => "adiabatic",
        Bandwidth::NonAdiabatic(_) => "non-adiabatic",
        Bandwidth::ModeSplitting => "mode splitting",
    }
}

/// Sweep CSV with a header row and `\n` line endings.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("omega_hz,eta,N,re_z_ohm,im_z_ohm,s11\n");
    let f = |x: f64| format!("{:.*e}", CSV_SIG_FIGS - 1, x);
    for i in 0..s.omega.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            f(s.omega[i] / TWO_PI),
            f(s.eta[i]),
            f(s.n[i]),
            f(s.z[i].re),
            f(s.z[i].im),
            f(s.s11[i])
        );
    }
    out
}
