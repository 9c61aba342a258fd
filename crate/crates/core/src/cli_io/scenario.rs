//! The `.scn` scenario format: sectioned `key = value` text with unit
//! suffixes on every dimensional key.
//!
//! ```text
//! [mechanical]
//! f_s_hz = 2.328e9
//! gamma_hz = 240e3
//!
//! [piezo]
//! c_0_f = 0.6e-15
//! k2_pct = 0.022
//!
//! [optics]
//! q_i = 77000
//! kappa_ext_hz = 2.8e9
//! g0_hz = 300e3
//! n_phot = 280
//!
//! [environment]
//! t_k = 0.1
//!
//! [run]
//! direction = forward
//! ```

use crate::circuit_model::{
    bvd_from_motional, bvd_from_physical, Environment, MatchingNetwork, MechanicalMode, Topology,
};
use crate::error::{Error, Result};
use crate::figures::{Direction, TransducerScenario};
use crate::optomech::{default_omega_o, KappaExtRule, OpticalSubsystem};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

const TWO_PI: f64 = 2.0 * PI;

/// Loss of the mechanical mode: a rate or a quality factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechLoss {
    GammaHz(f64),
    Q(f64),
}

/// Piezoelectric strength: coupling coefficient or motional capacitance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    K2Pct(f64),
    CmF(f64),
}

/// Intrinsic optical loss: quality factor or rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalLoss {
    Q(f64),
    KappaHz(f64),
}

/// Scenario exactly as written in a file, in file units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub f_s_hz: f64,
    pub loss: MechLoss,
    pub m_eff_kg: Option<f64>,
    pub c_0_f: f64,
    pub coupling: Coupling,
    pub topology: Topology,
    pub r_l_ohm: f64,
    pub z_tx_ohm: f64,
    pub optical_loss: OpticalLoss,
    pub f_o_hz: Option<f64>,
    pub kappa_ext_hz: Option<f64>,
    pub delta_hz: Option<f64>,
    pub g0_hz: f64,
    pub n_phot: f64,
    pub n_phot_cap: Option<f64>,
    pub t_k: f64,
    pub direction: Direction,
    pub label: Option<String>,
    pub kappa_ext_rule: KappaExtRule,
}

const SECTIONS: [&str; 6] = ["mechanical", "piezo", "network", "optics", "environment", "run"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "mechanical" => &["f_s_hz", "gamma_hz", "q_m", "m_eff_kg"],
        "piezo" => &["c_0_f", "k2_pct", "c_m_f"],
        "network" => &["kind", "c_t_f", "l_h", "r_l_ohm", "z_tx_ohm"],
        "optics" => &[
            "q_i",
            "kappa_i_hz",
            "f_o_hz",
            "kappa_ext_hz",
            "delta_hz",
            "g0_hz",
            "n_phot",
            "n_phot_cap",
        ],
        "environment" => &["t_k"],
        "run" => &["direction", "label", "kappa_ext_rule"],
        _ => &[],
    }
}

struct Entry {
    value: String,
    line: usize,
}

struct Document {
    sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| perr(format!("malformed section header `{line}`")))?
                    .trim()
                    .to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(perr(format!("unknown section [{name}]")));
                }
                if sections.contains_key(&name) {
                    return Err(perr(format!("duplicate section [{name}]")));
                }
                sections.insert(name.clone(), (line_no, BTreeMap::new()));
                current = Some(name);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim().to_string();
            let value = value.trim().trim_matches('"').to_string();
            let section = current
                .clone()
                .ok_or_else(|| perr(format!("key `{key}` outside any section")))?;
            if !allowed_keys(&section).contains(&key.as_str()) {
                return Err(perr(format!("unknown key `{key}` in [{section}]")));
            }
            let entries = &mut sections.get_mut(&section).expect("section exists").1;
            if entries.contains_key(&key) {
                return Err(perr(format!("duplicate key `{key}`")));
            }
            entries.insert(key, Entry { value, line: line_no });
        }
        for s in SECTIONS {
            if s != "network" && !sections.contains_key(s) {
                return Err(Error::Validation(format!("missing section [{s}]")));
            }
        }
        Ok(Document { sections })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|(_, m)| m.get(key))
    }

    fn num(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line: e.line,
                message: format!("`{key}` is not a number: `{}`", e.value),
            }),
        }
    }

    fn required(&self, section: &str, key: &str) -> Result<f64> {
        self.num(section, key)?
            .ok_or_else(|| Error::Validation(format!("missing key `{key}` in [{section}]")))
    }

    fn text(&self, section: &str, key: &str) -> Option<&Entry> {
        self.get(section, key)
    }

    /// Exactly one of two alternative keys.
    fn one_of(&self, section: &str, a: &str, b: &str) -> Result<(Option<f64>, Option<f64>)> {
        let (va, vb) = (self.num(section, a)?, self.num(section, b)?);
        match (va, vb) {
            (Some(_), Some(_)) => {
                let line = self.get(section, b).map(|e| e.line).unwrap_or(0);
                Err(Error::Parse {
                    line,
                    message: format!("mutually exclusive keys `{a}` and `{b}`"),
                })
            }
            (None, None) => Err(Error::Validation(format!(
                "one of `{a}` or `{b}` is required in [{section}]"
            ))),
            _ => Ok((va, vb)),
        }
    }
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let loss = match doc.one_of("mechanical", "gamma_hz", "q_m")? {
            (Some(g), _) => MechLoss::GammaHz(g),
            (_, Some(q)) => MechLoss::Q(q),
            _ => unreachable!(),
        };
        let coupling = match doc.one_of("piezo", "k2_pct", "c_m_f")? {
            (Some(k), _) => Coupling::K2Pct(k),
            (_, Some(c)) => Coupling::CmF(c),
            _ => unreachable!(),
        };
        let optical_loss = match doc.one_of("optics", "q_i", "kappa_i_hz")? {
            (Some(q), _) => OpticalLoss::Q(q),
            (_, Some(k)) => OpticalLoss::KappaHz(k),
            _ => unreachable!(),
        };
        let kind = doc.text("network", "kind");
        let c_t = doc.num("network", "c_t_f")?;
        let l = doc.num("network", "l_h")?;
        let topology = match kind.map(|e| (e.value.as_str(), e.line)).unwrap_or(("bare", 0)) {
            ("bare", line) => {
                reject_elements(c_t, l, true, true, line)?;
                Topology::Bare
            }
            ("rc", line) => {
                reject_elements(c_t, l, false, true, line)?;
                Topology::Rc {
                    c_t: need(c_t, "c_t_f")?,
                }
            }
            ("rl", line) => {
                reject_elements(c_t, l, true, false, line)?;
                Topology::Rl { l: need(l, "l_h")? }
            }
            ("rlc", _) => Topology::Rlc {
                l: need(l, "l_h")?,
                c_t: need(c_t, "c_t_f")?,
            },
            (other, line) => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown network kind `{other}` (bare, rc, rl, rlc)"),
                })
            }
        };
        let direction = match doc.text("run", "direction") {
            None => Direction::ElectricalToOptical,
            Some(e) => match e.value.as_str() {
                "forward" => Direction::ElectricalToOptical,
                "reverse" => Direction::OpticalToElectrical,
                other => {
                    return Err(Error::Parse {
                        line: e.line,
                        message: format!("unknown direction `{other}` (forward, reverse)"),
                    })
                }
            },
        };
        let kappa_ext_rule = match doc.text("run", "kappa_ext_rule") {
            None => KappaExtRule::Optimize,
            Some(e) => parse_rule(&e.value).ok_or_else(|| Error::Parse {
                line: e.line,
                message: format!("unknown kappa_ext_rule `{}` (optimize, closed_form)", e.value),
            })?,
        };
        let spec = ScenarioSpec {
            f_s_hz: doc.required("mechanical", "f_s_hz")?,
            loss,
            m_eff_kg: doc.num("mechanical", "m_eff_kg")?,
            c_0_f: doc.required("piezo", "c_0_f")?,
            coupling,
            topology,
            r_l_ohm: doc.num("network", "r_l_ohm")?.unwrap_or(0.0),
            z_tx_ohm: doc.num("network", "z_tx_ohm")?.unwrap_or(50.0),
            optical_loss,
            f_o_hz: doc.num("optics", "f_o_hz")?,
            kappa_ext_hz: doc.num("optics", "kappa_ext_hz")?,
            delta_hz: doc.num("optics", "delta_hz")?,
            g0_hz: doc.required("optics", "g0_hz")?,
            n_phot: doc.required("optics", "n_phot")?,
            n_phot_cap: doc.num("optics", "n_phot_cap")?,
            t_k: doc.required("environment", "t_k")?,
            direction,
            label: doc.text("run", "label").map(|e| e.value.clone()),
            kappa_ext_rule,
        };
        spec.to_scenario()?;
        Ok(spec)
    }

    /// Validated scenario in SI units.
    pub fn to_scenario(&self) -> Result<TransducerScenario> {
        let invalid = |m: String| Err(Error::Validation(m));
        let omega_s = TWO_PI * self.f_s_hz;
        let gamma_m = match self.loss {
            MechLoss::GammaHz(g) => TWO_PI * g,
            MechLoss::Q(q) => omega_s / q,
        };
        let mechanical = MechanicalMode::new(omega_s, gamma_m, self.m_eff_kg).map_err(validation)?;
        let bvd = match self.coupling {
            Coupling::K2Pct(p) => {
                let k2 = p / 100.0;
                if !(k2 > 0.0 && k2 < 1.0) {
                    return invalid(format!("k2 out of (0,1): k2_pct = {p}"));
                }
                bvd_from_physical(omega_s, gamma_m, self.c_0_f, k2)
            }
            Coupling::CmF(c) => bvd_from_motional(omega_s, gamma_m, self.c_0_f, c),
        }
        .map_err(validation)?;
        let network = MatchingNetwork::new(self.topology, self.r_l_ohm, self.z_tx_ohm).map_err(validation)?;
        let omega_o = self.f_o_hz.map(|f| TWO_PI * f).unwrap_or_else(default_omega_o);
        let kappa_i = match self.optical_loss {
            OpticalLoss::Q(q) => omega_o / q,
            OpticalLoss::KappaHz(k) => TWO_PI * k,
        };
        let optics = OpticalSubsystem {
            omega_o,
            kappa_i,
            kappa_ext: self.kappa_ext_hz.map(|k| TWO_PI * k).unwrap_or(kappa_i),
            delta: self.delta_hz.map(|d| TWO_PI * d),
            g0: TWO_PI * self.g0_hz,
            n_phot: self.n_phot,
            n_phot_cap: self.n_phot_cap.unwrap_or(self.n_phot),
        };
        let env = Environment::new(self.t_k).map_err(validation)?;
        TransducerScenario::new(mechanical, bvd, network, optics, env, self.direction).map_err(validation)
    }

    /// Text form that parses back to an identical spec.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let num = |s: &mut String, k: &str, v: f64| {
            let _ = writeln!(s, "{k} = {v:e}");
        };
        s.push_str("[mechanical]\n");
        num(&mut s, "f_s_hz", self.f_s_hz);
        match self.loss {
            MechLoss::GammaHz(g) => num(&mut s, "gamma_hz", g),
            MechLoss::Q(q) => num(&mut s, "q_m", q),
        }
        if let Some(m) = self.m_eff_kg {
            num(&mut s, "m_eff_kg", m);
        }
        s.push_str("\n[piezo]\n");
        num(&mut s, "c_0_f", self.c_0_f);
        match self.coupling {
            Coupling::K2Pct(k) => num(&mut s, "k2_pct", k),
            Coupling::CmF(c) => num(&mut s, "c_m_f", c),
        }
        s.push_str("\n[network]\n");
        let _ = writeln!(s, "kind = {}", self.topology.name());
        match self.topology {
            Topology::Bare => {}
            Topology::Rc { c_t } => num(&mut s, "c_t_f", c_t),
            Topology::Rl { l } => num(&mut s, "l_h", l),
            Topology::Rlc { l, c_t } => {
                num(&mut s, "c_t_f", c_t);
                num(&mut s, "l_h", l);
            }
        }
        num(&mut s, "r_l_ohm", self.r_l_ohm);
        num(&mut s, "z_tx_ohm", self.z_tx_ohm);
        s.push_str("\n[optics]\n");
        match self.optical_loss {
            OpticalLoss::Q(q) => num(&mut s, "q_i", q),
            OpticalLoss::KappaHz(k) => num(&mut s, "kappa_i_hz", k),
        }
        if let Some(f) = self.f_o_hz {
            num(&mut s, "f_o_hz", f);
        }
        if let Some(k) = self.kappa_ext_hz {
            num(&mut s, "kappa_ext_hz", k);
        }
        if let Some(d) = self.delta_hz {
            num(&mut s, "delta_hz", d);
        }
        num(&mut s, "g0_hz", self.g0_hz);
        num(&mut s, "n_phot", self.n_phot);
        if let Some(c) = self.n_phot_cap {
            num(&mut s, "n_phot_cap", c);
        }
        s.push_str("\n[environment]\n");
        num(&mut s, "t_k", self.t_k);
        s.push_str("\n[run]\n");
        let _ = writeln!(s, "direction = {}", self.direction.name());
        if let Some(l) = &self.label {
            let _ = writeln!(s, "label = \"{l}\"");
        }
        let _ = writeln!(s, "kappa_ext_rule = {}", self.kappa_ext_rule.name());
        s
    }

    /// Spec for a designed network, keeping the device and cavity of `self`.
    pub fn with_design(&self, topology: Topology, kappa_ext: f64, n_phot: f64) -> ScenarioSpec {
        ScenarioSpec {
            topology,
            kappa_ext_hz: Some(kappa_ext / TWO_PI),
            n_phot,
            n_phot_cap: Some(self.n_phot_cap.unwrap_or(self.n_phot)),
            ..self.clone()
        }
    }
}

pub fn parse_rule(s: &str) -> Option<KappaExtRule> {
    match s {
        "optimize" => Some(KappaExtRule::Optimize),
        "closed_form" | "closed-form" => Some(KappaExtRule::ClosedForm),
        _ => None,
    }
}

fn validation(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Validation(m),
        other => other,
    }
}

fn need(v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Validation(format!("network kind requires `{key}`")))
}

fn reject_elements(c_t: Option<f64>, l: Option<f64>, no_c: bool, no_l: bool, line: usize) -> Result<()> {
    if (no_c && c_t.is_some()) || (no_l && l.is_some()) {
        return Err(Error::Parse {
            line,
            message: "element not part of this network kind".into(),
        });
    }
    Ok(())
}

/// Parses a scenario from text straight into SI form.
pub fn parse_scenario_str(text: &str) -> Result<TransducerScenario> {
    ScenarioSpec::parse(text)?.to_scenario()
}
