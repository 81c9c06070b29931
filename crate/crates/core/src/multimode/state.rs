use num_complex::Complex64;
use rayon::prelude::*;

use crate::field1d::{ComplexField, Couplings, GroundState, Grid1D, SplitStepper};
use crate::logspace::{ln_binomial, LogComplex};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NumberComponent {
    pub n_a: usize,
    pub n_b: usize,
    pub phi_a: ComplexField,
    pub phi_b: ComplexField,
    pub action: f64,
}

impl NumberComponent {
    pub fn m(&self) -> f64 {
        0.5 * (self.n_a as f64 - self.n_b as f64)
    }
}

#[derive(Debug, Clone)]
pub struct MultimodeState {
    n_atoms: usize,
    grid: Grid1D,
    coeffs: Vec<LogComplex>,
    components: Vec<NumberComponent>,
    time: f64,
}

/// Dimensionless couplings `g_aa = g0`, `g_bb = λ g0`, `g_ab = κ g0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    pub g0: f64,
    pub lambda: f64,
    pub kappa: f64,
}

impl InteractionParams {
    /// Per-field coefficients for the partition `(n_a, n_b)`.
    pub fn couplings(&self, n_a: usize, n_b: usize) -> Couplings {
        let g_aa = self.g0;
        let g_bb = self.lambda * self.g0;
        let g_ab = self.kappa * self.g0;
        Couplings {
            g_self_a: g_aa * n_a.saturating_sub(1) as f64,
            g_self_b: g_bb * n_b.saturating_sub(1) as f64,
            g_cross_a: g_ab * n_b as f64,
            g_cross_b: g_ab * n_a as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepSummary {
    pub max_stiffness: f64,
    pub steps: usize,
}

impl MultimodeState {
    /// Builds a state from explicit parts; coefficients must be normalised
    /// to 1e-10 and every field to 1e-8.
    pub fn from_parts(
        n_atoms: usize,
        grid: &Grid1D,
        coeffs: Vec<Complex64>,
        components: Vec<NumberComponent>,
        time: f64,
    ) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::invalid("n_atoms must be positive"));
        }
        if coeffs.len() != n_atoms + 1 || components.len() != n_atoms + 1 {
            return Err(Error::invalid("need N + 1 coefficients and components"));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("coefficients not normalised: {norm}")));
        }
        for (k, c) in components.iter().enumerate() {
            if c.n_a != k || c.n_b != n_atoms - k {
                return Err(Error::invalid(format!("component {k} has wrong occupations")));
            }
            for f in [&c.phi_a, &c.phi_b] {
                if f.len() != grid.n_points() {
                    return Err(Error::invalid("field length does not match grid"));
                }
                if (grid.norm_sqr(f) - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid(format!("component {k} field not normalised")));
                }
            }
        }
        Ok(Self {
            n_atoms,
            grid: grid.clone(),
            coeffs: coeffs.into_iter().map(LogComplex::from_complex).collect(),
            components,
            time,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[LogComplex] {
        &self.coeffs
    }

    pub fn components(&self) -> &[NumberComponent] {
        &self.components
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Index `k = n_a` of the component with spin label `m`.
    pub fn index_of_m(&self, m: f64) -> Option<usize> {
        let k = m + 0.5 * self.n_atoms as f64;
        if (k - k.round()).abs() > 1e-9 || k < -0.5 || k > self.n_atoms as f64 + 0.5 {
            return None;
        }
        Some(k.round() as usize)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `(<J_z>, <J_z²>)` from the populations `|d_k|²`.
    pub fn jz_moments(&self) -> (f64, f64) {
        let half = 0.5 * self.n_atoms as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(s1, s2), (k, c)| {
            let p = c.norm_sqr();
            let m = k as f64 - half;
            (s1 + p * m, s2 + p * m * m)
        })
    }

    /// Largest deviation of any field norm from one.
    pub fn max_norm_error(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| [&c.phi_a, &c.phi_b])
            .map(|f| (self.grid.norm_sqr(f) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_raw(
        n_atoms: usize,
        grid: Grid1D,
        coeffs: Vec<LogComplex>,
        components: Vec<NumberComponent>,
        time: f64,
    ) -> Self {
        Self {
            n_atoms,
            grid,
            coeffs,
            components,
            time,
        }
    }
}

/// Coherent equal superposition with `c_a = 1/√2`, `c_b = i/√2`; every
/// component starts from the ground-state mode function.
pub fn init_state(n_atoms: usize, ground: &GroundState, grid: &Grid1D) -> Result<MultimodeState> {
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be positive"));
    }
    if ground.phi0.len() != grid.n_points() {
        return Err(Error::invalid("ground state does not match grid"));
    }
    let n = n_atoms as u64;
    let half_ln2 = 0.5 * std::f64::consts::LN_2;
    let coeffs = (0..=n)
        .map(|k| {
            let ln_mag = 0.5 * ln_binomial(n, k) - n as f64 * half_ln2;
            let phase = (n - k) as f64 * std::f64::consts::FRAC_PI_2;
            LogComplex::new(ln_mag, phase)
        })
        .collect();
    let components = (0..=n_atoms)
        .map(|k| NumberComponent {
            n_a: k,
            n_b: n_atoms - k,
            phi_a: ground.phi0.clone(),
            phi_b: ground.phi0.clone(),
            action: 0.0,
        })
        .collect();
    Ok(MultimodeState::from_raw(n_atoms, grid.clone(), coeffs, components, 0.0))
}

/// Advances every component by `n_steps` of the split-step integrator and
/// accumulates `A_k` from the quartic integrals sampled at each step's
/// midpoint. Coefficients `d_k` are unchanged.
pub fn step_all(
    state: &mut MultimodeState,
    stepper: &SplitStepper,
    params: &InteractionParams,
    n_steps: usize,
) -> Result<StepSummary> {
    if stepper.grid().n_points() != state.grid.n_points() || stepper.grid().half_width() != state.grid.half_width() {
        return Err(Error::invalid("stepper grid does not match state grid"));
    }
    let half = 0.5 * state.n_atoms as f64;
    let g_aa = params.g0;
    let g_bb = params.lambda * params.g0;
    let g_ab = params.kappa * params.g0;
    let stiffness = state
        .components
        .par_iter_mut()
        .map(|c| {
            let couplings = params.couplings(c.n_a, c.n_b);
            let report = stepper
                .propagate(&mut c.phi_a, &mut c.phi_b, &couplings, n_steps)
                .map_err(|e| match e {
                    Error::NonFinite { step, .. } => Error::NonFinite {
                        step,
                        component: Some(c.n_a as f64 - half),
                    },
                    other => other,
                })?;
            let (na, nb) = (c.n_a as f64, c.n_b as f64);
            let i = report.integrals;
            c.action -= 0.5 * g_aa * na * (na - 1.0) * i.aa + 0.5 * g_bb * nb * (nb - 1.0) * i.bb + g_ab * na * nb * i.ab;
            Ok(report.stiffness)
        })
        .collect::<Result<Vec<f64>>>()?;
    state.time += stepper.dt() * n_steps as f64;
    Ok(StepSummary {
        max_stiffness: stiffness.into_iter().fold(0.0, f64::max),
        steps: n_steps,
    })
}

/// Instantaneous `exp(-i π J_x)`: component `k` moves to `N - k` with its
/// fields exchanged, and every coefficient gains `(-i)^N`.
pub fn apply_pi_pulse(state: &MultimodeState) -> MultimodeState {
    let n = state.n_atoms;
    let shift = -(n as f64) * std::f64::consts::FRAC_PI_2;
    let coeffs = (0..=n)
        .map(|k| {
            let c = state.coeffs[n - k];
            if c.is_zero() {
                c
            } else {
                LogComplex::new(c.ln_mag, wrap(c.phase + shift))
            }
        })
        .collect();
    let components = (0..=n)
        .map(|k| {
            let old = &state.components[n - k];
            NumberComponent {
                n_a: k,
                n_b: n - k,
                phi_a: old.phi_b.clone(),
                phi_b: old.phi_a.clone(),
                action: old.action,
            }
        })
        .collect();
    MultimodeState::from_raw(n, state.grid.clone(), coeffs, components, state.time)
}

fn wrap(phase: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    phase - two_pi * (phase / two_pi).round()
}
