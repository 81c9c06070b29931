use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spincat_core::field1d::tf_tcat;

use crate::config::{Engine, RunConfig};
use crate::record::RunRecord;
use crate::run::{gamma2_period, prepare, run};
use crate::{ExpError, Result};

/// Worker-count environment variable for sweeps.
pub const WORKERS_ENV: &str = "SPINCAT_WORKERS";
/// Time window over which the `|γ^{aa}_2|` period is extracted.
pub const PERIOD_WINDOW: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Mu,
    Lambda,
    Kappa,
    N,
}

impl FromStr for SweepParam {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(Self::Mu),
            "lambda" => Ok(Self::Lambda),
            "kappa" => Ok(Self::Kappa),
            "n" | "n_atoms" => Ok(Self::N),
            other => Err(ExpError::Config(format!("cannot vary '{other}' (mu, lambda, kappa, n)"))),
        }
    }
}

impl SweepParam {
    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut cfg = base.clone();
        match self {
            Self::Mu => cfg.mu = value,
            Self::Lambda => cfg.lambda = value,
            Self::Kappa => cfg.kappa = value,
            Self::N => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(ExpError::Config(format!("n must be a whole number, got {value}")));
                }
                cfg.n_atoms = value as usize;
            }
        }
        cfg.output = None;
        Ok(cfg)
    }
}

/// Workers from `SPINCAT_WORKERS`, else the available parallelism.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub n_atoms: usize,
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub mu_over_n: f64,
    pub f_peak: Option<f64>,
    pub f_peak_over_n2: Option<f64>,
    pub tau_peak: Option<f64>,
    pub peak_at_boundary: Option<bool>,
    /// Thomas-Fermi cat time, when defined.
    pub tau_cat_tf: Option<f64>,
    /// Peak-to-peak period of `|γ^{aa}_2|` of the central component.
    pub gamma2_period: Option<f64>,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn row_for(value: f64, cfg: &RunConfig, record: &RunRecord) -> SweepRow {
    let n = cfg.n_atoms as f64;
    let tau_cat_tf = tf_tcat(cfg.mu, cfg.n_atoms, cfg.lambda, cfg.kappa).ok();
    let period = if cfg.engine == Engine::Multimode && record.error.is_none() {
        prepare(cfg)
            .and_then(|prep| gamma2_period(&prep, cfg.n_atoms, cfg.effective_dt(), PERIOD_WINDOW))
            .ok()
            .flatten()
    } else {
        None
    };
    SweepRow {
        value,
        n_atoms: cfg.n_atoms,
        mu: cfg.mu,
        lambda: cfg.lambda,
        kappa: cfg.kappa,
        mu_over_n: cfg.mu / n,
        f_peak: record.f_peak(),
        f_peak_over_n2: record.f_peak().map(|f| f / (n * n)),
        tau_peak: record.tau_peak(),
        peak_at_boundary: record.peak.map(|p| p.at_boundary),
        tau_cat_tf,
        gamma2_period: period,
        ok: record.is_ok(),
        error: record.error.clone(),
    }
}

/// Runs `base` with `param` set to each of `values` on a pool of `workers`
/// threads; results keep the order of `values`. Failed runs become rows with
/// `ok = false`.
pub fn sweep(base: &RunConfig, param: SweepParam, values: &[f64], workers: usize) -> Result<SweepOutcome> {
    if values.is_empty() {
        return Err(ExpError::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| param.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExpError::Input(e.to_string()))?;
    let results: Vec<(RunRecord, SweepRow)> = pool.install(|| {
        configs
            .par_iter()
            .zip(values.par_iter())
            .map(|(cfg, &v)| {
                let record = run(cfg);
                let row = row_for(v, cfg, &record);
                (record, row)
            })
            .collect()
    });
    let (records, rows) = results.into_iter().unzip();
    Ok(SweepOutcome { records, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        let mut cfg = RunConfig::new(Engine::Multimode, 8, 5.0, 0.6);
        cfg.sample_count = 12;
        cfg.dt = Some(2e-3);
        cfg
    }

    #[test]
    fn parameter_names_parse() {
        assert_eq!("mu".parse::<SweepParam>().unwrap(), SweepParam::Mu);
        assert_eq!("n".parse::<SweepParam>().unwrap(), SweepParam::N);
        assert!("gamma".parse::<SweepParam>().is_err());
        assert!(SweepParam::N.apply(&base(), 2.5).is_err());
    }

    #[test]
    fn summary_independent_of_worker_count() {
        let values = [3.0, 5.0, 7.0];
        let one = sweep(&base(), SweepParam::Mu, &values, 1).unwrap();
        let three = sweep(&base(), SweepParam::Mu, &values, 3).unwrap();
        assert_eq!(one.rows, three.rows);
        for (a, b) in one.records.iter().zip(&three.records) {
            assert_eq!(a.fingerprint(), b.fingerprint());
        }
        assert_eq!(one.rows.iter().map(|r| r.mu).collect::<Vec<_>>(), values);
        for row in &one.rows {
            let f = row.f_peak_over_n2.unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(row.ok);
        }
    }

    #[test]
    fn failing_point_does_not_abort() {
        let values = [5.0, 0.1];
        let out = sweep(&base(), SweepParam::Mu, &values, 2).unwrap();
        assert!(out.rows[0].ok);
        assert!(!out.rows[1].ok && out.rows[1].error.is_some());
        assert!(!out.all_ok());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        out.write_summary(&path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.lines().next().unwrap().starts_with("value,n_atoms,mu,"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn empty_sweep_rejected() {
        assert!(sweep(&base(), SweepParam::Mu, &[], 1).is_err());
    }
}
