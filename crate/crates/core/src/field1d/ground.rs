use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::grid::{ComplexField, Grid1D};
use super::thomas_fermi::tf_g0;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GroundState {
    pub phi0: ComplexField,
    pub mu: f64,
    pub g0: f64,
    pub n_atoms: usize,
    /// `‖(H0 + N g0 |φ0|² - μ) φ0‖ / ‖φ0‖`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct GroundStateOptions {
    /// Relative energy change per imaginary-time step at which the
    /// propagation stops.
    pub tol: f64,
    pub max_iterations: usize,
    pub imag_dt: f64,
    pub max_newton: usize,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 1_000_000,
            imag_dt: 1e-2,
            max_newton: 30,
        }
    }
}

const RESIDUAL_BOUND: f64 = 1e-8;

/// Ground state of `H0 + N g_eff |φ|²` with default options.
pub fn solve_ground_state(g_eff: f64, n_atoms: usize, grid: &Grid1D, tol: f64) -> Result<GroundState> {
    let opts = GroundStateOptions {
        tol,
        ..GroundStateOptions::default()
    };
    solve_ground_state_from(g_eff, n_atoms, grid, &opts, None)
}

/// Imaginary-time propagation from `guess` (or the oscillator ground state),
/// followed by Newton iterations on the discretised stationary equation.
pub fn solve_ground_state_from(
    g_eff: f64,
    n_atoms: usize,
    grid: &Grid1D,
    opts: &GroundStateOptions,
    guess: Option<&ComplexField>,
) -> Result<GroundState> {
    if !(g_eff.is_finite() && g_eff >= 0.0) {
        return Err(Error::invalid(format!("g_eff must be finite and >= 0, got {g_eff}")));
    }
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be positive"));
    }
    if !(opts.tol > 0.0 && opts.imag_dt > 0.0) {
        return Err(Error::invalid("tol and imag_dt must be positive"));
    }
    let ng = g_eff * n_atoms as f64;
    let mut phi: Vec<f64> = match guess {
        Some(g) if g.len() == grid.n_points() => g.values().iter().map(|v| v.norm()).collect(),
        Some(_) => return Err(Error::invalid("guess length does not match grid")),
        None => initial_guess(grid, ng),
    };
    normalize(grid, &mut phi);

    let iterations = imaginary_time(grid, ng, opts, &mut phi)?;
    let residual = newton_polish(grid, ng, opts.max_newton, &mut phi)?;
    if residual > RESIDUAL_BOUND {
        return Err(Error::NoConvergence {
            what: "ground-state residual".into(),
            iterations: opts.max_newton,
        });
    }
    let mu = chemical_potential(grid, ng, &phi);
    let tf_radius = (2.0 * mu).sqrt();
    if tf_radius > 0.8 * grid.half_width() {
        return Err(Error::GridTooSmall {
            tf_radius,
            half_width: grid.half_width(),
        });
    }
    Ok(GroundState {
        phi0: ComplexField::new(phi.iter().map(|&v| Complex64::new(v, 0.0)).collect()),
        mu,
        g0: g_eff,
        n_atoms,
        residual,
        iterations,
    })
}

/// Chemical potential of the Thomas-Fermi profile with interaction `ng`.
fn tf_mu(ng: f64) -> f64 {
    (3.0 * ng / (4.0 * 2f64.sqrt())).powf(2.0 / 3.0)
}

/// Oscillator ground state at weak coupling, a rounded Thomas-Fermi
/// profile once the interaction dominates.
fn initial_guess(grid: &Grid1D, ng: f64) -> Vec<f64> {
    let mu = tf_mu(ng);
    if mu < 2.0 {
        return grid.x().iter().map(|x| (-x * x / 2.0).exp()).collect();
    }
    grid.x()
        .iter()
        .map(|x| (mu - 0.5 * x * x).max(0.0).sqrt() + 1e-3 * (-x * x / (4.0 * mu)).exp())
        .collect()
}

fn normalize(grid: &Grid1D, phi: &mut [f64]) {
    let n = (phi.iter().map(|v| v * v).sum::<f64>() * grid.dx()).sqrt();
    phi.iter_mut().for_each(|v| *v /= n);
}

fn apply_h0(grid: &Grid1D, phi: &[f64]) -> Vec<f64> {
    let f = ComplexField::new(phi.iter().map(|&v| Complex64::new(v, 0.0)).collect());
    grid.apply_h0(&f).values().iter().map(|v| v.re).collect()
}

fn chemical_potential(grid: &Grid1D, ng: f64, phi: &[f64]) -> f64 {
    let h = apply_h0(grid, phi);
    let dx = grid.dx();
    phi.iter().zip(&h).map(|(p, hp)| p * hp + ng * p.powi(4)).sum::<f64>() * dx
}

fn energy(grid: &Grid1D, ng: f64, phi: &[f64]) -> f64 {
    let h = apply_h0(grid, phi);
    let dx = grid.dx();
    phi.iter().zip(&h).map(|(p, hp)| p * hp + 0.5 * ng * p.powi(4)).sum::<f64>() * dx
}

fn residual_norm(grid: &Grid1D, ng: f64, phi: &[f64], mu: f64) -> f64 {
    let h = apply_h0(grid, phi);
    let dx = grid.dx();
    let r: f64 = phi
        .iter()
        .zip(&h)
        .map(|(p, hp)| (hp + ng * p.powi(3) - mu * p).powi(2))
        .sum::<f64>()
        * dx;
    let n: f64 = phi.iter().map(|p| p * p).sum::<f64>() * dx;
    (r / n).sqrt()
}

fn imaginary_time(grid: &Grid1D, ng: f64, opts: &GroundStateOptions, phi: &mut [f64]) -> Result<usize> {
    let n = grid.n_points();
    // the nonlinear factor is explicit in the density; keep dt·ng·ρ small
    let peak = phi.iter().map(|p| ng * p * p).fold(0.0, f64::max);
    let dt = opts.imag_dt.min(0.5 / peak.max(tf_mu(ng)).max(1.0));
    let mut quiet = 0;
    let scale = 1.0 / n as f64;
    let kin: Vec<f64> = grid.k().iter().map(|k| scale * (-0.25 * k * k * dt).exp()).collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    let mut e_prev = energy(grid, ng, phi);
    for it in 1..=opts.max_iterations {
        for (b, &p) in buf.iter_mut().zip(phi.iter()) {
            *b = Complex64::new(p, 0.0);
        }
        half_kinetic(grid, &mut buf, &kin, &mut scratch);
        for (b, x) in buf.iter_mut().zip(grid.x()) {
            *b *= (-dt * (0.5 * x * x + ng * b.norm_sqr())).exp();
        }
        half_kinetic(grid, &mut buf, &kin, &mut scratch);
        for (p, b) in phi.iter_mut().zip(&buf) {
            *p = b.re;
        }
        normalize(grid, phi);
        if !phi.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step: it, component: None });
        }
        let e = energy(grid, ng, phi);
        if ((e - e_prev) / e).abs() < opts.tol {
            quiet += 1;
            if quiet >= 5 {
                return Ok(it);
            }
        } else {
            quiet = 0;
        }
        e_prev = e;
    }
    Err(Error::NoConvergence {
        what: "imaginary-time propagation".into(),
        iterations: opts.max_iterations,
    })
}

fn half_kinetic(grid: &Grid1D, buf: &mut [Complex64], kin: &[f64], scratch: &mut [Complex64]) {
    grid.raw_fft(buf, scratch);
    buf.iter_mut().zip(kin).for_each(|(v, k)| *v *= k);
    grid.raw_ifft(buf, scratch);
}

/// Dense real matrix of the spectral kinetic operator.
fn kinetic_matrix(grid: &Grid1D) -> DMatrix<f64> {
    let n = grid.n_points();
    let mut t = DMatrix::zeros(n, n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); grid.scratch_len()];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        col[j] = Complex64::new(1.0, 0.0);
        grid.fft(&mut col, &mut scratch);
        col.iter_mut().zip(grid.k()).for_each(|(v, k)| *v *= 0.5 * k * k);
        grid.ifft(&mut col, &mut scratch);
        for i in 0..n {
            t[(i, j)] = col[i].re;
        }
    }
    t
}

/// Newton iterations on `(T + V + ng φ² - μ) φ = 0`, `dx Σφ² = 1`.
fn newton_polish(grid: &Grid1D, ng: f64, max_newton: usize, phi: &mut [f64]) -> Result<f64> {
    let n = grid.n_points();
    let dx = grid.dx();
    let mut mu = chemical_potential(grid, ng, phi);
    let mut res = residual_norm(grid, ng, phi, mu);
    if res < 1e-12 || max_newton == 0 {
        return Ok(res);
    }
    let t = kinetic_matrix(grid);
    for _ in 0..max_newton {
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        jac.view_mut((0, 0), (n, n)).copy_from(&t);
        let h = apply_h0(grid, phi);
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            let x = grid.x()[i];
            jac[(i, i)] += 0.5 * x * x + 3.0 * ng * phi[i] * phi[i] - mu;
            jac[(i, n)] = -phi[i];
            jac[(n, i)] = 2.0 * dx * phi[i];
            rhs[i] = -(h[i] + ng * phi[i].powi(3) - mu * phi[i]);
        }
        rhs[n] = -(phi.iter().map(|p| p * p).sum::<f64>() * dx - 1.0);
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Integrity("singular Newton system in ground-state polish".into()))?;
        for i in 0..n {
            phi[i] += delta[i];
        }
        normalize(grid, phi);
        mu = chemical_potential(grid, ng, phi);
        let new_res = residual_norm(grid, ng, phi, mu);
        let stalled = new_res > 0.5 * res;
        res = new_res;
        if res < 1e-12 || stalled {
            break;
        }
    }
    Ok(res)
}

/// Finds `g0` such that the ground state of `N g0 |φ|²` has chemical
/// potential `mu_target` within `tol·max(1, μ)`.
pub fn calibrate_g0(mu_target: f64, n_atoms: usize, grid: &Grid1D, tol: f64) -> Result<f64> {
    calibrate_ground_state(mu_target, n_atoms, grid, tol).map(|gs| gs.g0)
}

/// As [`calibrate_g0`], returning the solved ground state at the root.
/// The bracket `[0, g_TF]` is widened by doubling if needed and refined by
/// Illinois false position, which keeps the root bracketed at every step.
pub fn calibrate_ground_state(mu_target: f64, n_atoms: usize, grid: &Grid1D, tol: f64) -> Result<GroundState> {
    if !(mu_target.is_finite() && mu_target >= 0.5) {
        return Err(Error::invalid(format!("mu_target must be >= 1/2, got {mu_target}")));
    }
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let target_tol = tol * mu_target.max(1.0);
    let opts = GroundStateOptions::default();
    let lo_state = solve_ground_state_from(0.0, n_atoms, grid, &opts, None)?;
    if (lo_state.mu - mu_target).abs() <= target_tol {
        return Ok(lo_state);
    }

    let (mut lo, mut f_lo) = (0.0, lo_state.mu - mu_target);
    let mut hi = tf_g0(mu_target, n_atoms);
    let mut hi_state = solve_ground_state_from(hi, n_atoms, grid, &opts, Some(&lo_state.phi0))?;
    let mut f_hi = hi_state.mu - mu_target;
    let mut widen = 0;
    while f_hi < 0.0 {
        widen += 1;
        if widen > 60 {
            return Err(Error::NoConvergence {
                what: "g0 bracket".into(),
                iterations: widen,
            });
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        hi_state = solve_ground_state_from(hi, n_atoms, grid, &opts, Some(&hi_state.phi0))?;
        f_hi = hi_state.mu - mu_target;
    }
    if f_hi.abs() <= target_tol {
        return Ok(hi_state);
    }

    let mut warm = hi_state.phi0.clone();
    let mut side = 0i8;
    for _ in 0..200 {
        let g = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let g = if g > lo && g < hi { g } else { 0.5 * (lo + hi) };
        let state = solve_ground_state_from(g, n_atoms, grid, &opts, Some(&warm))?;
        let f = state.mu - mu_target;
        if f.abs() <= target_tol {
            return Ok(state);
        }
        warm = state.phi0.clone();
        if f < 0.0 {
            lo = g;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = g;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence {
        what: "g0 calibration".into(),
        iterations: 200,
    })
}
