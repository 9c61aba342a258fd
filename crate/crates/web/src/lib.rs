//! Browser bindings: scenario text in, JSON or CSV text out.

use wasm_bindgen::prelude::*;
use xducer::cli_io::report::{fom_table, spectrum_csv};
use xducer::cli_io::scenario::ScenarioSpec;
use xducer::cli_io::{design_spec, design_table, sweep_grid};
use xducer::DesignMode;

const PRESETS: [(&str, &str); 4] = [
    ("gaas_2el", include_str!("../../core/scenarios/gaas_2el.scn")),
    ("gaas_pot", include_str!("../../core/scenarios/gaas_pot.scn")),
    ("linbo3", include_str!("../../core/scenarios/linbo3.scn")),
    ("aln_si", include_str!("../../core/scenarios/aln_si.scn")),
];

/// Names of the bundled example scenarios.
#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    PRESETS.iter().map(|(n, _)| n.to_string()).collect()
}

/// Text of a bundled example scenario.
#[wasm_bindgen]
pub fn preset(name: &str) -> Result<String, String> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| format!("no preset `{name}`"))
}

/// Figures of merit of the scenario as written, as a JSON object.
#[wasm_bindgen]
pub fn analyze(scenario: &str) -> Result<String, String> {
    let s = ScenarioSpec::parse(scenario).and_then(|s| s.to_scenario()).map_err(|e| e.to_string())?;
    Ok(fom_table(&s, &xducer::evaluate(&s)).to_json().to_string())
}

/// Efficiency, noise and impedance at `points` frequencies from `from_hz`
/// to `to_hz`, as CSV.
#[wasm_bindgen]
pub fn sweep(scenario: &str, from_hz: f64, to_hz: f64, points: usize) -> Result<String, String> {
    let grid = sweep_grid(from_hz, to_hz, points).map_err(|e| e.to_string())?;
    let s = ScenarioSpec::parse(scenario).and_then(|s| s.to_scenario()).map_err(|e| e.to_string())?;
    s.operating_point().spectrum(&grid).map(|sp| spectrum_csv(&sp)).map_err(|e| e.to_string())
}

/// Matched design as JSON; `mode` is `max-eta` or `min-noise`.
#[wasm_bindgen]
pub fn design(scenario: &str, mode: &str) -> Result<String, String> {
    let mode = match mode {
        "max-eta" => DesignMode::MaximizeEta,
        "min-noise" => DesignMode::MinimizeNoise,
        other => return Err(format!("unknown mode `{other}`")),
    };
    let spec = ScenarioSpec::parse(scenario).map_err(|e| e.to_string())?;
    let r = design_spec(&spec, mode).map_err(|e| e.to_string())?;
    Ok(design_table(&r).to_json().to_string())
}
