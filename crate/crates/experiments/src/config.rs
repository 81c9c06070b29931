use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Dicke,
    Tw,
    Multimode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseSchedule {
    None,
    Fixed(f64),
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub n_points: usize,
    pub half_width: f64,
}

/// One run. Times are in oscillator units; for the single-mode engines the
/// twist angle at time `τ` is `χτ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_atoms: usize,
    /// Target chemical potential used to calibrate `g0`.
    pub mu: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub grid: Option<GridParams>,
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_final: f64,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default = "default_pulse")]
    pub pulse: PulseSchedule,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default)]
    pub seed: u64,
    /// Twisting rate for the single-mode engines; taken from the ground
    /// state at `mu` when absent.
    #[serde(default)]
    pub chi: Option<f64>,
    #[serde(default = "default_trajectories")]
    pub tw_trajectories: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    200
}

fn default_pulse() -> PulseSchedule {
    PulseSchedule::None
}

fn default_engine() -> Engine {
    Engine::Multimode
}

fn default_trajectories() -> usize {
    10_000
}

impl RunConfig {
    pub fn new(engine: Engine, n_atoms: usize, mu: f64, t_final: f64) -> Self {
        Self {
            n_atoms,
            mu,
            lambda: 1.0,
            kappa: 0.0,
            grid: None,
            dt: None,
            t_final,
            sample_count: default_samples(),
            pulse: PulseSchedule::None,
            engine,
            seed: 0,
            chi: None,
            tw_trajectories: default_trajectories(),
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.n_atoms < 2 {
            return bad(format!("n_atoms must be >= 2, got {}", self.n_atoms));
        }
        if !(self.mu.is_finite() && self.mu >= 0.5) {
            return bad(format!("mu must be >= 1/2, got {}", self.mu));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad(format!("kappa must be non-negative, got {}", self.kappa));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.sample_count < 2 {
            return bad("sample_count must be >= 2".into());
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if let Some(chi) = self.chi {
            if !chi.is_finite() {
                return bad("chi must be finite".into());
            }
        }
        if let Some(g) = self.grid {
            if g.n_points < 4 || !g.n_points.is_power_of_two() || !(g.half_width > 0.0) {
                return bad("grid needs a power-of-two n_points >= 4 and a positive half_width".into());
            }
        }
        if self.engine == Engine::Tw && self.tw_trajectories == 0 {
            return bad("tw_trajectories must be positive".into());
        }
        match self.pulse {
            PulseSchedule::Fixed(t) if !(t.is_finite() && t >= 0.0 && t <= self.t_final) => {
                bad(format!("pulse time {t} outside [0, t_final]"))
            }
            PulseSchedule::Fixed(_) | PulseSchedule::Optimize if self.engine != Engine::Multimode => {
                bad("pulses are only supported by the multimode engine".into())
            }
            _ => Ok(()),
        }
    }

    /// `1e-3` up to `μ = 40`, `2.5e-4` above, unless set explicitly.
    pub fn effective_dt(&self) -> f64 {
        self.dt.unwrap_or(if self.mu <= 40.0 { 1e-3 } else { 2.5e-4 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = RunConfig::from_json(r#"{"n_atoms": 100, "mu": 32.08, "t_final": 8}"#).unwrap();
        assert_eq!(cfg.engine, Engine::Multimode);
        assert_eq!(cfg.pulse, PulseSchedule::None);
        assert_eq!(cfg.lambda, 1.0);
        assert_eq!(cfg.sample_count, 200);
        assert_eq!(cfg.effective_dt(), 1e-3);
    }

    #[test]
    fn pulse_variants_parse() {
        let fixed = RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 8, "pulse": {"fixed": 4.0}}"#).unwrap();
        assert_eq!(fixed.pulse, PulseSchedule::Fixed(4.0));
        let opt = RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 8, "pulse": "optimize"}"#).unwrap();
        assert_eq!(opt.pulse, PulseSchedule::Optimize);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "lamda": 0.5}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 1, "mu": 5, "t_final": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 0.4, "t_final": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "lambda": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "kappa": -0.1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "pulse": {"fixed": 2}}"#).is_err());
        assert!(
            RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "engine": "dicke", "pulse": "optimize"}"#)
                .is_err()
        );
        assert!(RunConfig::from_json(r#"{"n_atoms": 10, "mu": 5, "t_final": 1, "grid": {"n_points": 100, "half_width": 8}}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = RunConfig::new(Engine::Tw, 20, 3.0, 2.0);
        cfg.chi = Some(1.0);
        cfg.grid = Some(GridParams {
            n_points: 128,
            half_width: 8.0,
        });
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}
