//! Versioned grids and tolerances shared by `verify` and the acceptance tests.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};

const GRIDS_TOML: &str = include_str!("../config/grids.toml");

/// Schema version this build understands.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
pub struct Tolerances {
    pub closed_form: f64,
    pub bound_slack: f64,
    pub grover: f64,
    pub pi3: f64,
    pub nesting: f64,
    pub statevector: f64,
    pub engine_fidelity: f64,
    pub ancilla_leak: f64,
    pub pulse_fidelity: f64,
    pub gen_cheb: f64,
    pub avoid: f64,
    pub unitarity: f64,
    pub scaling_low: f64,
    pub scaling_high: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Profile {
    pub l_max: usize,
    pub delta_sq: Vec<f64>,
    pub lambda_points: usize,
    pub lambda_log10_min: f64,
    pub width_l_max: usize,
    pub width_delta_sq: Vec<f64>,
    pub grover_l_max: usize,
    pub pi3_k_max: u32,
    pub nest_ls: Vec<usize>,
    pub nest_delta_sq: Vec<f64>,
    pub qsim_n: usize,
    pub qsim_marked: Vec<usize>,
    pub qsim_l: Vec<usize>,
    pub qsim_delta_sq: f64,
    pub pulse_l_max: usize,
    pub cheb_l_max: usize,
    pub cheb_gammas: Vec<f64>,
    pub cheb_x_points: usize,
    pub avoid_l_max: usize,
    pub scaling_delta_sq: f64,
    pub scaling_log10_min: f64,
    pub scaling_log10_max: f64,
    pub scaling_points: usize,
}

impl Profile {
    /// `lambda_points` log-spaced overlaps in `(10^min, 1]`; the lower end is excluded.
    pub fn lambda_grid(&self) -> Vec<f64> {
        let n = self.lambda_points;
        let lo = self.lambda_log10_min;
        (1..=n).map(|i| 10f64.powf(lo - lo * i as f64 / n as f64)).collect()
    }

    /// Log-spaced `λ_0` values for the query-scaling fit, endpoints included.
    pub fn scaling_grid(&self) -> Vec<f64> {
        let n = self.scaling_points;
        let (a, b) = (self.scaling_log10_min, self.scaling_log10_max);
        (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
    }

    /// `cheb_x_points` evenly spaced points on `[0, 1]`.
    pub fn cheb_x_grid(&self) -> Vec<f64> {
        let n = self.cheb_x_points;
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct GridConfig {
    pub schema: u32,
    pub tolerances: Tolerances,
    pub profiles: BTreeMap<String, Profile>,
}

impl GridConfig {
    /// The configuration compiled into this build.
    pub fn builtin() -> Self {
        Self::parse(GRIDS_TOML).expect("embedded grids.toml is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: GridConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(Error::Config(format!("unsupported grid schema {}, expected {SCHEMA}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn profile(&self, name: &str) -> Result<&Profile> {
        self.profiles.get(name).ok_or_else(|| Error::Config(format!("no grid profile named {name:?}")))
    }
}
