//! Flat JSON experiment configuration. Every key is optional; missing keys
//! take per-scenario defaults in [`ExperimentConfig::resolve`], and the
//! resolved [`RunConfig`] is echoed into the run summary.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError};
use crate::scenarios::{Scenario, SCENARIOS};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Option<String>,
    pub length: Option<f64>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub diffusivity: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma: Option<String>,
    pub sigma_a: Option<f64>,
    pub u0: Option<String>,
    pub u0_half_width: Option<f64>,
    pub u0_band: Option<[f64; 2]>,
    pub noise: Option<String>,
    pub kernel: Option<String>,
    pub kernel_c: Option<f64>,
    pub kernel_base: Option<f64>,
    pub kernel_amplitude: Option<f64>,
    pub kernel_corr_len: Option<f64>,
    pub sampler: Option<String>,
    pub drift_fraction: Option<f64>,
    pub volterra_steps: Option<usize>,
    pub window: Option<usize>,
    pub seed: Option<u64>,
}

/// Fully resolved configuration; field names match [`ExperimentConfig`] so
/// an echoed summary config can be fed back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: String,
    pub length: f64,
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub diffusivity: f64,
    pub lambda_grid: Vec<f64>,
    pub samples: usize,
    pub p: f64,
    pub alpha: f64,
    pub sigma: String,
    pub sigma_a: f64,
    pub u0: String,
    pub u0_half_width: f64,
    pub u0_band: [f64; 2],
    pub noise: String,
    pub kernel: String,
    pub kernel_c: f64,
    pub kernel_base: f64,
    pub kernel_amplitude: f64,
    pub kernel_corr_len: f64,
    pub sampler: String,
    pub drift_fraction: f64,
    pub volterra_steps: usize,
    pub window: usize,
    pub seed: u64,
}

pub const SIGMAS: [&str; 2] = ["linear", "scaled_sin_plus_linear"];
pub const INITIAL_DATA: [&str; 4] = ["eigenfunction", "indicator", "delta", "constant_band"];
pub const NOISES: [&str; 3] = ["single_bm", "q_wiener", "space_time_white"];
pub const KERNELS: [&str; 2] = ["constant", "shifted_exponential"];
pub const SAMPLERS: [&str; 2] = ["exact", "scheme"];

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        // accept a bare config or a run summary with an echoed `config`
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let value = match value.get("config") {
            Some(inner) if value.get("scenario").is_some() && inner.is_object() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| config_err(e.to_string()))
    }

    /// Keys set in `other` replace those in `self`.
    pub fn merge(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            scenario, length, n, t, dt, diffusivity, lambda_grid, samples, p, alpha, sigma, sigma_a, u0,
            u0_half_width, u0_band, noise, kernel, kernel_c, kernel_base, kernel_amplitude, kernel_corr_len,
            sampler, drift_fraction, volterra_steps, window, seed
        );
        self
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let name = self.scenario.as_deref().ok_or_else(|| config_err("no scenario given"))?;
        let scenario = Scenario::from_name(name).ok_or_else(|| {
            let names: Vec<&str> = SCENARIOS.iter().map(|s| s.name).collect();
            config_err(format!("unknown scenario '{name}'; valid names: {}", names.join(", ")))
        })?;
        let d = scenario.defaults();
        let noise = self.noise.clone().unwrap_or(d.noise.to_string());
        let sigma = self.sigma.clone().unwrap_or("linear".into());
        let kernel = self.kernel.clone().unwrap_or(d.kernel.to_string());
        let sampler = match &self.sampler {
            Some(s) => s.clone(),
            None => {
                let exact_ok = sigma == "linear"
                    && (noise == "single_bm" || (noise == "q_wiener" && kernel == "constant"));
                if d.prefer_exact && exact_ok { "exact" } else { "scheme" }.to_string()
            }
        };
        let length = self.length.unwrap_or(d.length);
        let cfg = RunConfig {
            scenario: scenario.info().name.to_string(),
            length,
            n: self.n.unwrap_or(d.n),
            t: self.t.unwrap_or(d.t),
            dt: self.dt.unwrap_or(d.dt),
            diffusivity: self.diffusivity.unwrap_or(d.diffusivity),
            lambda_grid: self.lambda_grid.clone().unwrap_or(d.lambdas.to_vec()),
            samples: self.samples.unwrap_or(d.samples),
            p: self.p.unwrap_or(d.p),
            alpha: self.alpha.unwrap_or(1.5),
            sigma,
            sigma_a: self.sigma_a.unwrap_or(0.5),
            u0: self.u0.clone().unwrap_or(d.u0.to_string()),
            u0_half_width: self.u0_half_width.unwrap_or(if scenario == Scenario::FractionalRenewal {
                1.0
            } else {
                0.25 * length
            }),
            u0_band: self.u0_band.unwrap_or([1.0, 1.0]),
            noise,
            kernel,
            kernel_c: self.kernel_c.unwrap_or(1.0),
            kernel_base: self.kernel_base.unwrap_or(0.5),
            kernel_amplitude: self.kernel_amplitude.unwrap_or(0.5),
            kernel_corr_len: self.kernel_corr_len.unwrap_or(0.2),
            sampler,
            drift_fraction: self.drift_fraction.unwrap_or(d.drift_fraction),
            volterra_steps: self.volterra_steps.unwrap_or(20_000),
            window: self.window.unwrap_or(exlab_core::excitation::DEFAULT_WINDOW),
            seed: self.seed.unwrap_or(1),
        };
        cfg.validate(scenario)?;
        Ok(cfg)
    }
}

fn one_of(key: &str, value: &str, allowed: &[&str]) -> Result<(), CliError> {
    if allowed.contains(&value) {
        Ok(())
    } else {
        Err(config_err(format!("{key} must be one of {}, got '{value}'", allowed.join(", "))))
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{key} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn scenario(&self) -> Scenario {
        Scenario::from_name(&self.scenario).expect("validated on resolve")
    }

    fn validate(&self, scenario: Scenario) -> Result<(), CliError> {
        one_of("sigma", &self.sigma, &SIGMAS)?;
        one_of("u0", &self.u0, &INITIAL_DATA)?;
        one_of("noise", &self.noise, &NOISES)?;
        one_of("kernel", &self.kernel, &KERNELS)?;
        one_of("sampler", &self.sampler, &SAMPLERS)?;
        positive("length", self.length)?;
        positive("t", self.t)?;
        positive("dt", self.dt)?;
        positive("p", self.p)?;
        positive("u0_half_width", self.u0_half_width)?;
        if self.n == 0 {
            return Err(config_err("n must be at least 1"));
        }
        if self.samples < 2 {
            return Err(config_err("samples must be at least 2"));
        }
        if self.window == 0 {
            return Err(config_err("window must be at least 1"));
        }
        if self.lambda_grid.is_empty() {
            return Err(config_err("lambda_grid is empty"));
        }
        if self.lambda_grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(config_err("lambda_grid entries must be positive"));
        }
        if self.lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("lambda_grid must be strictly ascending"));
        }
        if !(self.diffusivity >= 0.0 && self.diffusivity.is_finite()) {
            return Err(config_err("diffusivity must be >= 0"));
        }
        if !(self.drift_fraction >= 0.0 && self.drift_fraction.is_finite()) {
            return Err(config_err("drift_fraction must be >= 0"));
        }
        if !(self.u0_band[0] > 0.0 && self.u0_band[1] >= self.u0_band[0]) {
            return Err(config_err("u0_band needs 0 < c1 <= c2"));
        }
        if scenario == Scenario::FractionalRenewal {
            if !(self.alpha > 1.0 && self.alpha <= 2.0) {
                return Err(config_err(format!("alpha must lie in (1, 2], got {}", self.alpha)));
            }
            if self.u0 != "delta" && self.u0 != "indicator" {
                return Err(config_err("fractional-renewal accepts u0 = delta or indicator"));
            }
            if self.volterra_steps < 2 {
                return Err(config_err("volterra_steps must be at least 2"));
            }
        } else if self.u0 == "delta" {
            return Err(config_err("u0 = delta is only available for fractional-renewal"));
        }
        Ok(())
    }
}
