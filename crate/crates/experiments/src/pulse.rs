use std::time::Instant;

use spincat_core::field1d::tf_tcat;

use crate::config::{Engine, RunConfig};
use crate::record::{PulseSearch, RunRecord};
use crate::run::{prepare, MultimodeRun};
use crate::{ExpError, Result};

/// Maximum number of completed runs in one search.
pub const DEFAULT_BUDGET: usize = 40;
/// Search window as fractions of the Thomas-Fermi cat time.
pub const WINDOW: (f64, f64) = (0.3, 0.7);
/// Convergence when the bracket is narrower than this fraction of the
/// Thomas-Fermi cat time.
pub const RESOLUTION: f64 = 0.01;

pub fn optimize_pulse_time(config: &RunConfig) -> Result<(f64, RunRecord)> {
    optimize_pulse_time_with(config, DEFAULT_BUDGET)
}

/// Golden-section search for the pulse time maximising the peak QFI.
/// Evaluations resume from the latest stored pre-pulse checkpoint, so only
/// the post-pulse part of each run is recomputed.
pub fn optimize_pulse_time_with(config: &RunConfig, budget: usize) -> Result<(f64, RunRecord)> {
    if config.engine != Engine::Multimode {
        return Err(ExpError::Config("pulse optimisation needs the multimode engine".into()));
    }
    if budget < 2 {
        return Err(ExpError::Config("pulse search budget must be at least 2".into()));
    }
    let start = Instant::now();
    let tau_tf = tf_tcat(config.mu, config.n_atoms, config.lambda, config.kappa)?;
    let mut base_cfg = config.clone();
    base_cfg.pulse = crate::config::PulseSchedule::None;
    let prep = prepare(&base_cfg)?;
    let base = MultimodeRun::new(config, &prep)?;

    let (mut a, mut b) = (WINDOW.0 * tau_tf, (WINDOW.1 * tau_tf).min(config.t_final));
    if !(a < b) {
        return Err(ExpError::Config(format!(
            "t_final {} ends before the pulse window starts at {a}",
            config.t_final
        )));
    }
    let mut search = Search {
        base,
        checkpoints: Vec::new(),
        evaluated: Vec::new(),
        budget,
    };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = search.eval(c)?;
    let mut fd = search.eval(d)?;
    let mut converged = false;
    let mut exhausted = false;
    loop {
        if b - a < RESOLUTION * tau_tf {
            converged = true;
            break;
        }
        if search.evaluated.len() >= budget {
            exhausted = true;
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = search.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = search.eval(d)?;
        }
    }

    let (best_tau, mut best) = search
        .evaluated
        .iter()
        .max_by(|x, y| objective(&x.1).total_cmp(&objective(&y.1)))
        .map(|(t, rec)| (*t, rec.clone()))
        .expect("at least two evaluations");
    best.pulse_search = Some(PulseSearch {
        evaluations: search.evaluated.iter().map(|(t, rec)| (*t, objective(rec))).collect(),
        converged,
        budget_exhausted: exhausted,
    });
    if exhausted {
        best.warnings.push(format!("pulse search stopped after {budget} runs"));
    }
    if config.lambda == 1.0 {
        best.warnings
            .push("pulse optimisation with lambda = 1: the pulse commutes with the dynamics".into());
    }
    for (t, rec) in search.evaluated.iter().filter(|(t, _)| *t != best_tau) {
        for f in &rec.integrity_failures {
            best.integrity_failures.push(format!("pulse at {t}: {f}"));
        }
    }
    best.diagnostics.wall_clock_s = start.elapsed().as_secs_f64();
    Ok((best_tau, best))
}

fn objective(r: &RunRecord) -> f64 {
    r.f_peak().unwrap_or(f64::NEG_INFINITY)
}

struct Search {
    base: MultimodeRun,
    /// Pre-pulse runs, sorted by step.
    checkpoints: Vec<MultimodeRun>,
    evaluated: Vec<(f64, RunRecord)>,
    budget: usize,
}

impl Search {
    fn eval(&mut self, tau: f64) -> Result<f64> {
        let step = self.base.step_of(tau);
        let tau_q = step as f64 * self.base.dt();
        if let Some((_, rec)) = self.evaluated.iter().find(|(t, _)| *t == tau_q) {
            return Ok(objective(rec));
        }
        if self.evaluated.len() >= self.budget {
            return Ok(f64::NEG_INFINITY);
        }
        let mut run = self
            .checkpoints
            .iter()
            .rev()
            .find(|c| c.step() <= step)
            .unwrap_or(&self.base)
            .clone();
        run.advance_to(step)?;
        let pos = self.checkpoints.partition_point(|c| c.step() <= step);
        self.checkpoints.insert(pos, run.clone());
        let mut record = run.finish(Some(step))?;
        record.pulse_time = Some(tau_q);
        let f = objective(&record);
        self.evaluated.push((tau_q, record));
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PulseSchedule;
    use crate::run::run;

    fn small(lambda: f64) -> RunConfig {
        let mut cfg = RunConfig::new(Engine::Multimode, 10, 6.0, 1.0);
        cfg.lambda = lambda;
        cfg.sample_count = 40;
        cfg.dt = Some(2e-3);
        let tau_tf = tf_tcat(6.0, 10, lambda, 0.0).unwrap();
        cfg.t_final = 1.2 * tau_tf;
        cfg
    }

    #[test]
    fn symmetric_objective_is_flat() {
        let cfg = small(1.0);
        let (_, best) = optimize_pulse_time_with(&cfg, 6).unwrap();
        let evals = &best.pulse_search.as_ref().unwrap().evaluations;
        assert!(evals.len() >= 4);
        let f0 = evals[0].1;
        for (t, f) in evals {
            assert!(((f - f0) / f0).abs() < 1e-6, "pulse at {t}: {f} vs {f0}");
        }
    }

    #[test]
    fn checkpointed_evaluation_matches_direct_run() {
        let mut cfg = small(0.5);
        let (tau_p, best) = optimize_pulse_time_with(&cfg, 5).unwrap();
        assert!(best.pulse_search.as_ref().unwrap().budget_exhausted);
        assert!(best.is_ok(), "{:?}", best.integrity_failures);
        cfg.pulse = PulseSchedule::Fixed(tau_p);
        let direct = run(&cfg);
        // resuming from a checkpoint regroups the split-step calls, which
        // changes rounding only
        for (a, b) in direct.series.qfi.iter().zip(&best.series.qfi) {
            assert!((a - b).abs() < 1e-10 * a.abs(), "{a} vs {b}");
        }
        assert_eq!(direct.series.len(), best.series.len());
    }

    #[test]
    fn search_converges_within_window() {
        let cfg = small(0.5);
        let tau_tf = tf_tcat(6.0, 10, 0.5, 0.0).unwrap();
        let (tau_p, best) = optimize_pulse_time(&cfg).unwrap();
        let search = best.pulse_search.as_ref().unwrap();
        assert!(search.converged && !search.budget_exhausted);
        assert!(tau_p >= WINDOW.0 * tau_tf - 1e-9 && tau_p <= WINDOW.1 * tau_tf + 1e-9);
        let fmax = search.evaluations.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best.f_peak(), Some(fmax));
    }

    #[test]
    fn wrong_engine_rejected() {
        let mut cfg = small(0.5);
        cfg.engine = Engine::Dicke;
        assert!(optimize_pulse_time(&cfg).is_err());
    }
}
