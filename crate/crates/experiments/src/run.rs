use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use spincat_core::dicke::{evolve_oat, make_css, qfi, spin_moments};
use spincat_core::field1d::{
    calibrate_ground_state, chi_instantaneous, pair_energy, ComplexField, Grid1D, GroundState, SplitStepper,
};
use spincat_core::fisher::{qfi_from_moments, SpinMoments};
use spincat_core::multimode::{
    apply_pi_pulse, assemble_moments, decompose, init_state, overlap_order, overlaps, qfi_multimode, step_all,
    write_snapshot, InteractionParams, MultimodeState, Species,
};
use spincat_core::tw::{evolve_tw, sample_css_wigner, tw_moments};
use spincat_core::Complex64;

use crate::config::{Engine, PulseSchedule, RunConfig};
use crate::peak::find_peak;
use crate::period::peak_spacing;
use crate::record::{Diagnostics, RunRecord, Series};
use crate::{ExpError, Result};

/// Relative tolerance on `μ` when calibrating `g0`.
pub const CALIBRATION_TOL: f64 = 1e-9;
/// Per-field norm error allowed per 1000 steps.
pub const NORM_DRIFT_BOUND: f64 = 1e-8;
const MAX_LOGGED_FAILURES: usize = 20;

#[derive(Debug, Clone)]
pub struct Prepared {
    pub grid: Grid1D,
    pub ground: Option<Arc<GroundState>>,
    pub params: InteractionParams,
    /// Twisting rate of the initial state (or the configured `chi`).
    pub chi0: f64,
}

type GroundKey = (u64, usize, usize, u64);

fn ground_cache() -> &'static Mutex<HashMap<GroundKey, Arc<GroundState>>> {
    static CACHE: OnceLock<Mutex<HashMap<GroundKey, Arc<GroundState>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Calibrated ground state, memoised per `(μ, N, grid)` for the process.
pub fn ground_state(mu: f64, n_atoms: usize, grid: &Grid1D) -> Result<Arc<GroundState>> {
    let key = (mu.to_bits(), n_atoms, grid.n_points(), grid.half_width().to_bits());
    if let Some(gs) = ground_cache().lock().unwrap().get(&key) {
        return Ok(gs.clone());
    }
    let gs = Arc::new(calibrate_ground_state(mu, n_atoms, grid, CALIBRATION_TOL)?);
    ground_cache().lock().unwrap().insert(key, gs.clone());
    Ok(gs)
}

pub fn grid_for(config: &RunConfig) -> Result<Grid1D> {
    Ok(match config.grid {
        Some(g) => Grid1D::new(g.n_points, g.half_width)?,
        None => Grid1D::for_mu(config.mu)?,
    })
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    config.validate()?;
    let grid = grid_for(config)?;
    let needs_ground = config.engine == Engine::Multimode || config.chi.is_none();
    let ground = if needs_ground {
        Some(ground_state(config.mu, config.n_atoms, &grid)?)
    } else {
        None
    };
    let g0 = ground.as_ref().map_or(0.0, |g| g.g0);
    let params = InteractionParams {
        g0,
        lambda: config.lambda,
        kappa: config.kappa,
    };
    let chi0 = match (config.chi, &ground) {
        (Some(chi), _) => chi,
        (None, Some(gs)) => chi_instantaneous(&grid, &gs.phi0, &gs.phi0, g0, config.lambda, config.kappa),
        (None, None) => unreachable!(),
    };
    Ok(Prepared {
        grid,
        ground,
        params,
        chi0,
    })
}

/// Executes one run; engine failures are captured in the record.
pub fn run(config: &RunConfig) -> RunRecord {
    if let Err(e) = config.validate() {
        return RunRecord::failed(config.clone(), e.to_string());
    }
    if config.pulse == PulseSchedule::Optimize {
        return match crate::pulse::optimize_pulse_time(config) {
            Ok((_, record)) => record,
            Err(e) => RunRecord::failed(config.clone(), e.to_string()),
        };
    }
    let start = Instant::now();
    let result = prepare(config).and_then(|prep| match config.engine {
        Engine::Dicke => run_dicke(config, &prep),
        Engine::Tw => run_tw(config, &prep),
        Engine::Multimode => {
            let pulse = match config.pulse {
                PulseSchedule::Fixed(t) => Some(t),
                _ => None,
            };
            let mut sim = MultimodeRun::new(config, &prep)?;
            let pulse_step = pulse.map(|t| sim.step_of(t));
            sim.finish(pulse_step)
        }
    });
    let mut record = result.unwrap_or_else(|e| RunRecord::failed(config.clone(), e.to_string()));
    record.diagnostics.wall_clock_s = start.elapsed().as_secs_f64();
    record
}

/// As [`run`] for a multimode configuration with no pulse or a fixed pulse,
/// also writing the final state as a snapshot to `path`.
pub fn run_with_snapshot(config: &RunConfig, path: &std::path::Path) -> Result<RunRecord> {
    if config.engine != Engine::Multimode {
        return Err(ExpError::Config("snapshots need the multimode engine".into()));
    }
    let pulse = match config.pulse {
        PulseSchedule::None => None,
        PulseSchedule::Fixed(t) => Some(t),
        PulseSchedule::Optimize => {
            return Err(ExpError::Config("snapshots need a fixed pulse schedule".into()));
        }
    };
    let start = Instant::now();
    let prep = prepare(config)?;
    let mut sim = MultimodeRun::new(config, &prep)?;
    let pulse_step = pulse.map(|t| sim.step_of(t));
    let mut record = sim.finish(pulse_step)?;
    let file = std::fs::File::create(path)?;
    write_snapshot(sim.state(), std::io::BufWriter::new(file))?;
    record.diagnostics.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Sample times `round(j·total/count)·dt` for `j = 0..=count`.
fn sample_steps(total: usize, count: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=count)
        .map(|j| ((j as f64 * total as f64 / count as f64).round() as usize).min(total))
        .collect();
    out.dedup();
    out
}

fn decomposition_from(sm: &SpinMoments) -> (f64, f64, f64) {
    let (sxx, syy) = (sm.second_sym[0][0], sm.second_sym[1][1]);
    let jy = sm.first[1];
    (2.0 * (sxx + syy), -4.0 * jy * jy, -2.0 * (sxx - syy))
}

struct Checks {
    n2: f64,
    failures: Vec<String>,
    suppressed: usize,
}

impl Checks {
    fn new(n_atoms: usize) -> Self {
        Self {
            n2: (n_atoms * n_atoms) as f64,
            failures: Vec::new(),
            suppressed: 0,
        }
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < MAX_LOGGED_FAILURES {
            self.failures.push(msg);
        } else {
            self.suppressed += 1;
        }
    }

    fn bounds(&mut self, tau: f64, qfi: f64, f1: f64, f2: f64) {
        let tol = 1e-8 * self.n2;
        let n2 = self.n2;
        if !(qfi >= -tol && qfi <= n2 + tol) {
            self.fail(format!("tau={tau}: qfi {qfi} outside [0, N^2]"));
        }
        if !(f1 >= -n2 - tol && f1 <= tol) {
            self.fail(format!("tau={tau}: F1 {f1} outside [-N^2, 0]"));
        }
        if !(f2.abs() <= 0.5 * n2 + tol) {
            self.fail(format!("tau={tau}: F2 {f2} outside [-N^2/2, N^2/2]"));
        }
    }

    fn into_failures(mut self) -> Vec<String> {
        if self.suppressed > 0 {
            self.failures.push(format!("{} further failures suppressed", self.suppressed));
        }
        self.failures
    }
}

fn finish_record(mut record: RunRecord) -> RunRecord {
    match find_peak(&record.series.tau, &record.series.qfi) {
        Ok(p) => {
            if p.at_boundary {
                record.warnings.push(format!("QFI maximum at the series boundary (tau={})", p.tau));
            }
            record.peak = Some(p);
        }
        Err(e) => record.warnings.push(format!("no peak: {e}")),
    }
    record
}

fn ground_diagnostics(d: &mut Diagnostics, prep: &Prepared) {
    d.grid_points = prep.grid.n_points();
    d.half_width = prep.grid.half_width();
    d.chi0 = prep.chi0;
    if let Some(gs) = &prep.ground {
        d.g0 = gs.g0;
        d.mu_solved = gs.mu;
        d.ground_residual = gs.residual;
    }
}

fn run_dicke(config: &RunConfig, prep: &Prepared) -> Result<RunRecord> {
    let n = config.n_atoms;
    let css = make_css(n, FRAC_PI_2, FRAC_PI_2)?;
    let mut record = RunRecord::new(config.clone());
    ground_diagnostics(&mut record.diagnostics, prep);
    let mut checks = Checks::new(n);
    for j in 0..=config.sample_count {
        let tau = config.t_final * j as f64 / config.sample_count as f64;
        let state = evolve_oat(&css, prep.chi0 * tau)?;
        let q = qfi(&state)?;
        let (f0, f1, f2) = decomposition_from(&spin_moments(&state));
        checks.bounds(tau, q, f1, f2);
        push_sample(&mut record.series, tau, q, (f0, f1, f2), prep.chi0);
    }
    record.integrity_failures = checks.into_failures();
    Ok(finish_record(record))
}

fn run_tw(config: &RunConfig, prep: &Prepared) -> Result<RunRecord> {
    let n = config.n_atoms;
    let c_a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let c_b = Complex64::new(0.0, FRAC_1_SQRT_2);
    let ensemble = sample_css_wigner(n, c_a, c_b, config.tw_trajectories, config.seed)?;
    let mut record = RunRecord::new(config.clone());
    ground_diagnostics(&mut record.diagnostics, prep);
    let mut checks = Checks::new(n);
    for j in 0..=config.sample_count {
        let tau = config.t_final * j as f64 / config.sample_count as f64;
        let m = tw_moments(&evolve_tw(&ensemble, prep.chi0, tau)?)?;
        let q = qfi_from_moments(&m.moments)?.qfi;
        let (f0, f1, f2) = decomposition_from(&m.moments);
        if !(q >= 0.0 && q <= checks.n2 * (1.0 + 1e-8)) {
            checks.fail(format!("tau={tau}: qfi {q} outside [0, N^2]"));
        }
        push_sample(&mut record.series, tau, q, (f0, f1, f2), prep.chi0);
    }
    record.integrity_failures = checks.into_failures();
    Ok(finish_record(record))
}

fn push_sample(s: &mut Series, tau: f64, q: f64, (f0, f1, f2): (f64, f64, f64), chi: f64) {
    s.tau.push(tau);
    s.qfi.push(q);
    s.f0.push(f0);
    s.f1.push(f1);
    s.f2.push(f2);
    s.chi.push(chi);
}

/// Index of the central number component, `n_a = ⌊N/2⌋`.
pub fn central_index(n_atoms: usize) -> usize {
    n_atoms / 2
}

/// An in-progress multimode run: the state, the sampling schedule and the
/// accumulated series. Cloning it checkpoints the run.
#[derive(Clone)]
pub(crate) struct MultimodeRun {
    config: RunConfig,
    prep: Prepared,
    stepper: Arc<SplitStepper>,
    state: MultimodeState,
    step: usize,
    total: usize,
    schedule: Vec<usize>,
    next_sample: usize,
    series: Series,
    jz0: (f64, f64),
    energy_ref: Vec<f64>,
    energy_drift: f64,
    norm_drift: f64,
    max_stiffness: f64,
    checks_failures: Vec<String>,
    pulse_time: Option<f64>,
}

impl MultimodeRun {
    pub(crate) fn new(config: &RunConfig, prep: &Prepared) -> Result<Self> {
        let gs = prep
            .ground
            .as_ref()
            .ok_or_else(|| ExpError::Input("multimode run needs a ground state".into()))?;
        let dt = config.effective_dt();
        let total = (config.t_final / dt).round().max(1.0) as usize;
        let stepper = Arc::new(SplitStepper::new(&prep.grid, dt)?);
        let state = init_state(config.n_atoms, gs, &prep.grid)?;
        let jz0 = state.jz_moments();
        let mut run = Self {
            config: config.clone(),
            prep: prep.clone(),
            stepper,
            state,
            step: 0,
            total,
            schedule: sample_steps(total, config.sample_count),
            next_sample: 0,
            series: Series::default(),
            jz0,
            energy_ref: Vec::new(),
            energy_drift: 0.0,
            norm_drift: 0.0,
            max_stiffness: 0.0,
            checks_failures: Vec::new(),
            pulse_time: None,
        };
        run.energy_ref = run.energies();
        Ok(run)
    }

    pub(crate) fn step_of(&self, tau: f64) -> usize {
        ((tau / self.stepper.dt()).round().max(0.0) as usize).min(self.total)
    }

    pub(crate) fn step(&self) -> usize {
        self.step
    }

    pub(crate) fn dt(&self) -> f64 {
        self.stepper.dt()
    }

    pub(crate) fn state(&self) -> &MultimodeState {
        &self.state
    }

    fn energies(&self) -> Vec<f64> {
        self.state
            .components()
            .iter()
            .map(|c| {
                let couplings = self.prep.params.couplings(c.n_a, c.n_b);
                pair_energy(
                    &self.prep.grid,
                    &c.phi_a,
                    &c.phi_b,
                    &couplings,
                    (c.n_a as f64, c.n_b as f64),
                )
            })
            .collect()
    }

    fn fail(&mut self, msg: String) {
        if self.checks_failures.len() < MAX_LOGGED_FAILURES {
            self.checks_failures.push(msg);
        }
    }

    fn sample(&mut self) -> Result<()> {
        let n = self.config.n_atoms;
        let tau = self.state.time();
        let table = overlaps(&self.state);
        let moments = assemble_moments(&self.state, &table)?;
        let q = qfi_multimode(&moments)?.qfi;
        let (f0, f1, f2) = match decompose(&moments) {
            Ok(d) => (d.f0, d.f1, d.f2),
            Err(e) => {
                self.fail(format!("tau={tau}: {e}"));
                (f64::NAN, f64::NAN, f64::NAN)
            }
        };
        let mut checks = Checks::new(n);
        checks.bounds(tau, q, f1, f2);
        let n2 = checks.n2;
        if (moments.jz - self.jz0.0).abs() > 1e-10 * n2 || (moments.jz2 - self.jz0.1).abs() > 1e-10 * n2 {
            checks.fail(format!(
                "tau={tau}: <Jz>, <Jz^2> = ({}, {}) moved from ({}, {})",
                moments.jz, moments.jz2, self.jz0.0, self.jz0.1
            ));
        }
        let norm_err = self.state.max_norm_error();
        let per_1000 = norm_err / (self.step as f64 / 1000.0).max(1.0);
        self.norm_drift = self.norm_drift.max(per_1000);
        if per_1000 > NORM_DRIFT_BOUND {
            checks.fail(format!("tau={tau}: field norm error {norm_err} after {} steps", self.step));
        }
        for msg in checks.into_failures() {
            self.fail(msg);
        }
        let drift = self
            .energies()
            .iter()
            .zip(&self.energy_ref)
            .map(|(e, e0)| ((e - e0) / e0).abs())
            .fold(0.0, f64::max);
        self.energy_drift = self.energy_drift.max(drift);

        let k0 = central_index(n);
        let c = &self.state.components()[k0];
        let p = self.prep.params;
        let chi = chi_instantaneous(&self.prep.grid, &c.phi_a, &c.phi_b, p.g0, p.lambda, p.kappa);
        push_sample(&mut self.series, tau, q, (f0, f1, f2), chi);
        let abs = |z: Option<Complex64>| z.map_or(f64::NAN, |z| z.norm());
        let nb = c.n_b as i32;
        self.series.gamma_ab0.push(abs(table.gamma(Species::A, Species::B, 0, k0)));
        self.series.gamma_aa2.push(abs(table.gamma(Species::A, Species::A, 2, k0)));
        self.series.gamma_bb_pow[0].push(abs(table.gamma(Species::B, Species::B, 1, k0)).powi(nb));
        self.series.gamma_bb_pow[1].push(abs(table.gamma(Species::B, Species::B, 2, k0)).powi(nb));
        self.series.gamma_bb_pow[2].push(abs(overlap_order(&self.state, Species::B, Species::B, 3, k0)).powi(nb));
        Ok(())
    }

    /// Steps to `target`, sampling on schedule. A sample due exactly at
    /// `target` is taken.
    pub(crate) fn advance_to(&mut self, target: usize) -> Result<()> {
        let target = target.min(self.total);
        loop {
            while self.next_sample < self.schedule.len() && self.schedule[self.next_sample] == self.step {
                self.sample()?;
                self.next_sample += 1;
            }
            if self.step >= target {
                return Ok(());
            }
            let next = self
                .schedule
                .get(self.next_sample)
                .copied()
                .unwrap_or(self.total)
                .min(target);
            let summary = step_all(&mut self.state, &self.stepper, &self.prep.params, next - self.step)?;
            self.max_stiffness = self.max_stiffness.max(summary.max_stiffness);
            self.step = next;
        }
    }

    pub(crate) fn pulse(&mut self) {
        self.state = apply_pi_pulse(&self.state);
        self.pulse_time = Some(self.state.time());
        self.energy_ref = self.energies();
    }

    /// Runs to the end, with a π-pulse at step `pulse` if given.
    pub(crate) fn finish(&mut self, pulse: Option<usize>) -> Result<RunRecord> {
        if let Some(p) = pulse {
            if p < self.step {
                return Err(ExpError::Input(format!("pulse step {p} already passed ({})", self.step)));
            }
            self.advance_to(p)?;
            self.pulse();
        }
        self.advance_to(self.total)?;
        Ok(self.record())
    }

    fn record(&self) -> RunRecord {
        let mut record = RunRecord::new(self.config.clone());
        record.series = self.series.clone();
        record.pulse_time = self.pulse_time;
        record.integrity_failures = self.checks_failures.clone();
        let d = &mut record.diagnostics;
        ground_diagnostics(d, &self.prep);
        d.dt = self.stepper.dt();
        d.steps = self.step;
        d.norm_drift_per_1000 = self.norm_drift;
        d.energy_drift = self.energy_drift;
        d.max_stiffness = self.max_stiffness;
        if self.max_stiffness > 0.1 {
            record
                .warnings
                .push(format!("dt times the nonlinear energy reached {:.3}", self.max_stiffness));
        }
        finish_record(record)
    }
}

/// `χ(τ)` and `|γ^{aa}_2|` of the central component, obtained by propagating
/// only the two components involved.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralTraces {
    pub tau: Vec<f64>,
    pub chi: Vec<f64>,
    pub gamma_aa2: Vec<f64>,
}

pub fn central_traces(prep: &Prepared, n_atoms: usize, dt: f64, t_final: f64, samples: usize) -> Result<CentralTraces> {
    let gs = prep
        .ground
        .as_ref()
        .ok_or_else(|| ExpError::Input("central traces need a ground state".into()))?;
    if n_atoms < 2 || samples < 2 {
        return Err(ExpError::Input("central traces need N >= 2 and at least 2 samples".into()));
    }
    let grid = &prep.grid;
    let stepper = SplitStepper::new(grid, dt)?;
    let k0 = central_index(n_atoms);
    let ks = [k0, k0 - 2.min(k0)];
    let mut fields: Vec<(ComplexField, ComplexField)> = ks.iter().map(|_| (gs.phi0.clone(), gs.phi0.clone())).collect();
    let total = (t_final / dt).round().max(1.0) as usize;
    let schedule = sample_steps(total, samples);
    let mut out = CentralTraces {
        tau: Vec::with_capacity(schedule.len()),
        chi: Vec::with_capacity(schedule.len()),
        gamma_aa2: Vec::with_capacity(schedule.len()),
    };
    let p = prep.params;
    let mut step = 0;
    for &target in &schedule {
        if target > step {
            for (&k, (a, b)) in ks.iter().zip(fields.iter_mut()) {
                stepper.propagate(a, b, &p.couplings(k, n_atoms - k), target - step)?;
            }
            step = target;
        }
        out.tau.push(step as f64 * dt);
        out.chi.push(chi_instantaneous(grid, &fields[0].0, &fields[0].1, p.g0, p.lambda, p.kappa));
        out.gamma_aa2.push(grid.inner(&fields[1].0, &fields[0].0).norm());
    }
    Ok(out)
}

/// Peak-to-peak period of the smoothed `|γ^{aa}_2|` trace of the central
/// component over `[0, window]`.
pub fn gamma2_period(prep: &Prepared, n_atoms: usize, dt: f64, window: f64) -> Result<Option<f64>> {
    let samples = (window / 0.01).round().max(100.0) as usize;
    let tr = central_traces(prep, n_atoms, dt, window, samples)?;
    Ok(peak_spacing(&tr.tau, &tr.gamma_aa2, 0.1))
}

/// Peak-to-peak period of the central component's `χ(τ)` over `[0, window]`.
pub fn breathing_period(prep: &Prepared, n_atoms: usize, dt: f64, window: f64) -> Result<Option<f64>> {
    let samples = (window / 0.01).round().max(100.0) as usize;
    let tr = central_traces(prep, n_atoms, dt, window, samples)?;
    Ok(peak_spacing(&tr.tau, &tr.chi, 0.1))
}
