use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::peak::Peak;
use crate::Result;

/// Sampled observables on a shared time axis. The overlap traces refer to
/// the central number component (`m = 0` for even `N`) and are empty for
/// the single-mode engines.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub tau: Vec<f64>,
    pub qfi: Vec<f64>,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub chi: Vec<f64>,
    /// `|γ^{ab}_0|`.
    pub gamma_ab0: Vec<f64>,
    /// `|γ^{aa}_2|`.
    pub gamma_aa2: Vec<f64>,
    /// `|γ^{bb}_{1}|^{n_b}`, `|γ^{bb}_{2}|^{n_b}`, `|γ^{bb}_{3}|^{n_b}`.
    pub gamma_bb_pow: [Vec<f64>; 3],
}

impl Series {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Column headers with units (oscillator units) and the matching data;
    /// empty traces are omitted.
    pub fn columns(&self) -> Vec<(&'static str, Vec<f64>)> {
        let f_sum = (0..self.f0.len().min(self.f1.len()).min(self.f2.len()))
            .map(|i| self.f0[i] + self.f1[i] + self.f2[i])
            .collect();
        let cols = vec![
            ("tau [1/omega]", self.tau.clone()),
            ("qfi [1]", self.qfi.clone()),
            ("f0 [1]", self.f0.clone()),
            ("f1 [1]", self.f1.clone()),
            ("f2 [1]", self.f2.clone()),
            ("f_sum [1]", f_sum),
            ("chi [hbar omega]", self.chi.clone()),
            ("gamma_ab0 [1]", self.gamma_ab0.clone()),
            ("gamma_aa2 [1]", self.gamma_aa2.clone()),
            ("gamma_bb1_pow [1]", self.gamma_bb_pow[0].clone()),
            ("gamma_bb2_pow [1]", self.gamma_bb_pow[1].clone()),
            ("gamma_bb3_pow [1]", self.gamma_bb_pow[2].clone()),
        ];
        cols.into_iter().filter(|(_, data)| !data.is_empty()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_columns(path, &self.columns())
    }
}

/// CSV with one header row; all columns must have equal length.
pub fn write_columns(path: &Path, cols: &[(&str, Vec<f64>)]) -> Result<()> {
    let rows = cols.first().map_or(0, |c| c.1.len());
    if cols.iter().any(|c| c.1.len() != rows) {
        return Err(crate::ExpError::Input("columns differ in length".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(cols.iter().map(|(name, _)| *name))?;
    for i in 0..rows {
        w.write_record(cols.iter().map(|(_, data)| data[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub wall_clock_s: f64,
    pub dt: f64,
    pub steps: usize,
    pub grid_points: usize,
    pub half_width: f64,
    pub g0: f64,
    /// Chemical potential of the solved ground state.
    pub mu_solved: f64,
    pub ground_residual: f64,
    /// Twisting rate of the initial state.
    pub chi0: f64,
    /// Largest per-field norm error, scaled to 1000 steps.
    pub norm_drift_per_1000: f64,
    /// Largest relative drift of a component's pair energy between pulses.
    pub energy_drift: f64,
    pub max_stiffness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSearch {
    /// `(τ_p, F_peak)` for every completed evaluation, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
    pub converged: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub series: Series,
    pub peak: Option<Peak>,
    pub diagnostics: Diagnostics,
    pub pulse_time: Option<f64>,
    pub pulse_search: Option<PulseSearch>,
    pub integrity_failures: Vec<String>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    peak: &'a Option<Peak>,
    diagnostics: &'a Diagnostics,
    pulse_time: Option<f64>,
    pulse_search: &'a Option<PulseSearch>,
    samples: usize,
    integrity_failures: &'a [String],
    warnings: &'a [String],
    error: &'a Option<String>,
}

impl RunRecord {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            series: Series::default(),
            peak: None,
            diagnostics: Diagnostics::default(),
            pulse_time: None,
            pulse_search: None,
            integrity_failures: Vec::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn failed(config: RunConfig, error: String) -> Self {
        let mut r = Self::new(config);
        r.error = Some(error);
        r
    }

    /// No engine error and no integrity failure.
    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.integrity_failures.is_empty()
    }

    pub fn f_peak(&self) -> Option<f64> {
        self.peak.map(|p| p.value)
    }

    pub fn tau_peak(&self) -> Option<f64> {
        self.peak.map(|p| p.tau)
    }

    /// JSON of everything except the wall-clock time, for bitwise
    /// reproducibility comparisons.
    pub fn fingerprint(&self) -> String {
        let mut copy = self.clone();
        copy.diagnostics.wall_clock_s = 0.0;
        serde_json::to_string(&copy).expect("record serialises")
    }

    pub fn summary_json(&self) -> String {
        let s = Summary {
            config: &self.config,
            peak: &self.peak,
            diagnostics: &self.diagnostics,
            pulse_time: self.pulse_time,
            pulse_search: &self.pulse_search,
            samples: self.series.len(),
            integrity_failures: &self.integrity_failures,
            warnings: &self.warnings,
            error: &self.error,
        };
        serde_json::to_string_pretty(&s).expect("summary serialises")
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir` and returns both paths.
    pub fn persist(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        self.series.write_csv(&csv_path)?;
        std::fs::write(&json_path, self.summary_json())?;
        Ok((csv_path, json_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Engine;

    fn sample_record() -> RunRecord {
        let mut r = RunRecord::new(RunConfig::new(Engine::Dicke, 4, 1.0, 1.0));
        r.series.tau = vec![0.0, 0.5, 1.0];
        r.series.qfi = vec![4.0, 8.0, 6.0];
        r.series.f0 = vec![1.0, 2.0, 3.0];
        r.series.f1 = vec![-1.0, -0.5, 0.0];
        r.series.f2 = vec![4.0, 6.5, 3.0];
        r.series.chi = vec![1.0; 3];
        r
    }

    #[test]
    fn csv_has_unit_headers_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample_record();
        let (csv_path, json_path) = r.persist(dir.path(), "run").unwrap();
        let text = std::fs::read_to_string(csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tau [1/omega],qfi [1],f0 [1],f1 [1],f2 [1],f_sum [1],chi [hbar omega]"
        );
        assert_eq!(lines.next().unwrap(), "0,4,1,-1,4,4,1");
        assert_eq!(text.lines().count(), 4);
        let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
        assert_eq!(summary["samples"], 3);
    }

    #[test]
    fn fingerprint_ignores_wall_clock() {
        let a = sample_record();
        let mut b = a.clone();
        b.diagnostics.wall_clock_s = 12.0;
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.series.qfi[1] = 8.000000000000002;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
