//! Parameter-file plumbing. Every physical default lives in
//! `config/defaults.json` (embedded at compile time); `--params` and
//! `--gains` files override individual fields.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use tetrafractal_core::dynamics::{ParamsPatch, TetracopterParams};
use tetrafractal_core::sim::PidGains;

pub use tetrafractal_core::dynamics::InertiaSpec;

pub const EMBEDDED_DEFAULTS: &str = include_str!("../../../config/defaults.json");

/// Parsed `config/defaults.json`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsFile {
    pub params: ParamsFile,
    pub geometry: GeometryDefaults,
    pub truss: TrussDefaults,
    pub faults: FaultDefaults,
    pub sim: SimDefaults,
    pub seed: u64,
    /// Free-form per-field annotations (units, provenance of the value).
    pub notes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDefaults {
    pub edge_length: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrussDefaults {
    pub module_mass: f64,
    pub edge_length: f64,
    pub elastic_modulus: f64,
    pub area: f64,
    pub moment_of_inertia: f64,
    pub buckling_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultDefaults {
    pub total_mass: f64,
    pub cell_edge: f64,
    pub k_lift: f64,
    pub k_drag: f64,
    pub thrust_margin: f64,
    pub measured_thrust_margin: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimDefaults {
    pub dt: f64,
    pub duration: f64,
    pub gains: PidGains,
}

/// Loads the embedded defaults. Panics only if the compiled-in file is
/// invalid, which the test suite rules out.
pub fn defaults() -> DefaultsFile {
    let d: DefaultsFile =
        serde_json::from_str(EMBEDDED_DEFAULTS).expect("embedded config/defaults.json is valid");
    for key in d.notes.keys() {
        let known = key == "seed"
            || ["params.", "geometry.", "truss.", "faults.", "sim."]
                .iter()
                .any(|p| key.starts_with(p));
        assert!(known, "config/defaults.json note {key:?} matches no field");
    }
    d
}

/// Vehicle-parameter overrides; omitted fields keep their defaults.
/// Field names and units are documented in `schemas/params.schema.json`.
pub type ParamsFile = ParamsPatch;

/// Reads and parses a JSON file, keeping serde's line/column diagnostics.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {what} file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{what} file {}: {e}", path.display()))
}

/// Vehicle parameters: embedded defaults, then the optional override file.
pub fn load_params(path: Option<&Path>) -> Result<TetracopterParams, String> {
    let mut params = TetracopterParams::default();
    defaults().params.apply(&mut params);
    if let Some(path) = path {
        let overrides: ParamsFile = read_json(path, "params")?;
        overrides.apply(&mut params);
    }
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

/// Rate-loop gains: embedded defaults or a complete `--gains` file.
pub fn load_gains(path: Option<&Path>) -> Result<PidGains, String> {
    let gains = match path {
        Some(path) => read_json::<PidGains>(path, "gains")?,
        None => defaults().sim.gains,
    };
    gains.validate().map_err(|e| e.to_string())?;
    Ok(gains)
}
