//! Default tolerances, overridable through `ERGSERIES_*` environment
//! variables. Every value and where it came from goes into the manifest.

use std::collections::BTreeMap;

use ergseries_core::gibbs::GibbsConfig;
use ergseries_core::riesz::RieszConfig;
use ergseries_core::series::ProbeConfig;
use serde::Serialize;

use crate::error::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub value: f64,
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub values: BTreeMap<&'static str, Tolerance>,
}

/// `(name, environment variable, default)`.
fn table() -> [(&'static str, &'static str, f64); 8] {
    let probe = ProbeConfig::default();
    let gibbs = GibbsConfig::default();
    let riesz = RieszConfig::default();
    [
        ("probe_eps", "ERGSERIES_PROBE_EPS", probe.eps),
        ("probe_window", "ERGSERIES_PROBE_WINDOW", probe.window as f64),
        ("envelope_c", "ERGSERIES_ENVELOPE_C", probe.envelope_c),
        ("tail_kappa", "ERGSERIES_TAIL_KAPPA", probe.tail_kappa),
        ("birkhoff_cap", "ERGSERIES_BIRKHOFF_CAP", probe.birkhoff_cap),
        ("gibbs_tolerance", "ERGSERIES_GIBBS_TOL", gibbs.tolerance),
        ("riesz_threshold", "ERGSERIES_RIESZ_THRESHOLD", riesz.threshold),
        ("f_abs_tol", "ERGSERIES_F_ABS_TOL", 1e-12),
    ]
}

impl Tolerances {
    pub fn from_env() -> Result<Self, AppError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, AppError> {
        let mut values = BTreeMap::new();
        for (name, var, default) in table() {
            let t = match lookup(var) {
                Some(raw) => {
                    let value: f64 = raw
                        .trim()
                        .parse()
                        .map_err(|_| AppError::schema(format!("{var} = `{raw}` is not a number")))?;
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(AppError::schema(format!("{var} must be positive and finite")));
                    }
                    Tolerance { value, source: "env" }
                }
                None => Tolerance { value: default, source: "default" },
            };
            values.insert(name, t);
        }
        Ok(Tolerances { values })
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values[name].value
    }

    pub fn probe(&self) -> ProbeConfig {
        ProbeConfig {
            eps: self.get("probe_eps"),
            window: self.get("probe_window").round().max(2.0) as usize,
            envelope_c: self.get("envelope_c"),
            tail_kappa: self.get("tail_kappa"),
            birkhoff_cap: self.get("birkhoff_cap"),
            theorem_applies: None,
        }
    }

    pub fn gibbs(&self, grid_size: usize, depth: usize) -> GibbsConfig {
        GibbsConfig { grid_size, depth, tolerance: self.get("gibbs_tolerance"), ..GibbsConfig::default() }
    }

    pub fn riesz(&self) -> RieszConfig {
        RieszConfig { threshold: self.get("riesz_threshold"), ..RieszConfig::default() }
    }
}
