//! JSON parameter files.
//!
//! Top-level keys mirror the identified parameter symbols in lowercase:
//! `jm jl bm bl ks nm tmc vp` (SI units), `load_case` (`"dynamic"` or
//! `"static"`), `kp kd`, plus optional `grid` and `sim` blocks. Unknown keys
//! are rejected by name; missing optional blocks fall back to the documented
//! defaults.

use std::fs;
use std::path::Path;

use sea_mtt_core::sim::{DEFAULT_DERATE_BAND, DEFAULT_DT};
use sea_mtt_core::{ControllerParams, FrequencyGrid, LoadCase, SeaParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    jm: f64,
    jl: f64,
    bm: f64,
    bl: f64,
    ks: f64,
    nm: f64,
    tmc: f64,
    vp: f64,
    load_case: RawLoadCase,
    kp: f64,
    kd: f64,
    #[serde(default)]
    grid: Option<RawGrid>,
    #[serde(default)]
    sim: Option<RawSim>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawLoadCase {
    Dynamic,
    Static,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "default_omega_min")]
    omega_min: f64,
    #[serde(default = "default_omega_max")]
    omega_max: f64,
    #[serde(default = "default_points")]
    points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default)]
    duration: Option<f64>,
    #[serde(default = "default_derate_band")]
    derate_band: f64,
}

fn default_omega_min() -> f64 {
    1e-2
}
fn default_omega_max() -> f64 {
    1e3
}
fn default_points() -> usize {
    2000
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_derate_band() -> f64 {
    DEFAULT_DERATE_BAND
}

/// Validated configuration ready for the analysis and simulation layers.
#[derive(Debug, Clone)]
pub struct Config {
    pub params: SeaParams,
    pub controller: ControllerParams,
    pub grid: FrequencyGrid,
    pub dt: f64,
    /// Default simulation duration, seconds; `None` means derive from the
    /// reference frequency.
    pub sim_duration: Option<f64>,
    pub derate_band: f64,
}

impl Config {
    /// The identified bench parameter set with the default gear ratio and PD
    /// gains of the design studies. Used when no config file is given.
    pub fn builtin_default() -> Self {
        Self {
            params: SeaParams {
                j_m: 0.000075,
                j_l: 0.005,
                b_m: 0.0006,
                b_l: 0.08,
                k_s: 1.1,
                n_m: 8.0,
                t_mc: 0.0315,
                v_p: 10.472,
                load_case: LoadCase::Dynamic,
            },
            controller: ControllerParams {
                k_p: 0.8,
                k_d: 0.05,
            },
            grid: FrequencyGrid::default(),
            dt: DEFAULT_DT,
            sim_duration: None,
            derate_band: DEFAULT_DERATE_BAND,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let params = SeaParams {
            j_m: raw.jm,
            j_l: raw.jl,
            b_m: raw.bm,
            b_l: raw.bl,
            k_s: raw.ks,
            n_m: raw.nm,
            t_mc: raw.tmc,
            v_p: raw.vp,
            load_case: match raw.load_case {
                RawLoadCase::Dynamic => LoadCase::Dynamic,
                RawLoadCase::Static => LoadCase::Static,
            },
        };
        params.validate().map_err(|e| e.to_string())?;
        let controller = ControllerParams {
            k_p: raw.kp,
            k_d: raw.kd,
        };
        controller.validate().map_err(|e| e.to_string())?;

        let grid = match raw.grid {
            Some(g) => FrequencyGrid::log(g.omega_min, g.omega_max, g.points),
            None => FrequencyGrid::default(),
        };
        grid.validate().map_err(|e| e.to_string())?;

        let (dt, sim_duration, derate_band) = match raw.sim {
            Some(s) => (s.dt, s.duration, s.derate_band),
            None => (DEFAULT_DT, None, DEFAULT_DERATE_BAND),
        };
        if !dt.is_finite() || dt <= 0.0 {
            return Err(format!(
                "invalid parameter `dt` = {dt}: must be finite and > 0"
            ));
        }
        if !derate_band.is_finite() || derate_band <= 0.0 {
            return Err(format!(
                "invalid parameter `derate_band` = {derate_band}: must be finite and > 0"
            ));
        }

        Ok(Self {
            params,
            controller,
            grid,
            dt,
            sim_duration,
            derate_band,
        })
    }

    /// Loads `path` when given, otherwise the built-in bench defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::builtin_default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "jm": 0.000075, "jl": 0.005, "bm": 0.0006, "bl": 0.08,
        "ks": 1.1, "nm": 8.0, "tmc": 0.0315, "vp": 10.472,
        "load_case": "dynamic", "kp": 0.8, "kd": 0.05
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = Config::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.grid.points, 2000);
        assert_eq!(cfg.dt, DEFAULT_DT);
        assert_eq!(cfg.derate_band, DEFAULT_DERATE_BAND);
        assert_eq!(cfg.sim_duration, None);
        assert_eq!(cfg.params.load_case, LoadCase::Dynamic);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("\"kd\": 0.05", "\"kd\": 0.05, \"kx\": 1");
        let err = Config::from_json(&text).unwrap_err();
        assert!(err.contains("kx"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("\"ks\": 1.1,", "");
        let err = Config::from_json(&text).unwrap_err();
        assert!(err.contains("ks"), "{err}");
    }

    #[test]
    fn invalid_value_is_named() {
        let text = MINIMAL.replace("\"ks\": 1.1", "\"ks\": -1");
        let err = Config::from_json(&text).unwrap_err();
        assert!(err.contains("ks"), "{err}");
    }

    #[test]
    fn bad_load_case_is_rejected() {
        let text = MINIMAL.replace("dynamic", "sideways");
        let err = Config::from_json(&text).unwrap_err();
        assert!(err.contains("sideways"), "{err}");
    }

    #[test]
    fn grid_and_sim_blocks_parse() {
        let text = MINIMAL.replace(
            "\"kd\": 0.05",
            "\"kd\": 0.05, \"grid\": {\"omega_min\": 0.1, \"omega_max\": 100.0, \"points\": 50}, \
             \"sim\": {\"dt\": 1e-5, \"duration\": 4.0, \"derate_band\": 0.1}",
        );
        let cfg = Config::from_json(&text).unwrap();
        assert_eq!(cfg.grid.points, 50);
        assert_eq!(cfg.dt, 1e-5);
        assert_eq!(cfg.sim_duration, Some(4.0));
        assert_eq!(cfg.derate_band, 0.1);
    }
}
