//! Exact single-mode engine in the `J_z` eigenbasis `|m>`, `m = -J..J`,
//! `J = N/2`.
//!
//! Coherent spin states follow
//! `c_m = C(2J, J+m)^{1/2} cos(θ/2)^{J-m} sin(θ/2)^{J+m} e^{-i(J+m)φ}`,
//! which puts all weight on `m = -J` at `θ = 0` and on `m = +J` at
//! `θ = π`. With this formula the Bloch vector of `|α(θ, φ)>` is
//! `(sinθ cosφ, sinθ sinφ, -cosθ)`, so `|α(π/2, π/2)>` has `<J_y> = +N/2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::fisher::LadderMoments;
pub use crate::fisher::{qfi_from_moments, FisherResult, SpinMoments};
use crate::logspace::ln_binomial;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    n_atoms: usize,
    amplitudes: Vec<Complex64>,
}

impl DickeState {
    /// Wraps an amplitude vector ordered from `m = -J` to `m = +J`.
    pub fn from_amplitudes(n_atoms: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::invalid("n_atoms must be positive"));
        }
        if amplitudes.len() != n_atoms + 1 {
            return Err(Error::invalid(format!(
                "expected {} amplitudes for N = {n_atoms}, got {}",
                n_atoms + 1,
                amplitudes.len()
            )));
        }
        let state = Self { n_atoms, amplitudes };
        state.check_finite()?;
        if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "state not normalised: |c|^2 = {}",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    /// The stretched state `|m = m_index - J>`.
    pub fn basis(n_atoms: usize, m_index: usize) -> Result<Self> {
        if m_index > n_atoms {
            return Err(Error::invalid(format!("index {m_index} out of range for N = {n_atoms}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_atoms + 1];
        amps[m_index] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(n_atoms, amps)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// `m` value of amplitude index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DickeState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_finite(&self) -> Result<()> {
        if self.amplitudes.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("non-finite amplitudes"))
        }
    }
}

/// Real CSS weights `C^J_m(θ)` for `m = -J..J`.
fn css_weights(n_atoms: usize, theta: f64) -> Vec<f64> {
    let (s, c) = (0.5 * theta).sin_cos();
    let n = n_atoms as u64;
    (0..=n)
        .map(|up| {
            // up = J + m, down = J - m
            let down = n - up;
            let mut w = 0.5 * ln_binomial(n, up);
            let mut sign = 1.0;
            for (base, power) in [(c, down), (s, up)] {
                if power == 0 {
                    continue;
                }
                if base == 0.0 {
                    return 0.0;
                }
                w += power as f64 * base.abs().ln();
                if base < 0.0 && power % 2 == 1 {
                    sign = -sign;
                }
            }
            sign * w.exp()
        })
        .collect()
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}

/// Coherent spin state `|α(θ, φ)>`.
pub fn make_css(n_atoms: usize, theta: f64, phi: f64) -> Result<DickeState> {
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be positive"));
    }
    check_angle("theta", theta)?;
    check_angle("phi", phi)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(format!("theta must lie in [0, pi], got {theta}")));
    }
    let mut amps: Vec<Complex64> = css_weights(n_atoms, theta)
        .into_iter()
        .enumerate()
        .map(|(up, w)| Complex64::from_polar(1.0, -(up as f64) * phi) * w)
        .collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|c| *c /= norm);
    DickeState::from_amplitudes(n_atoms, amps)
}

/// One-axis twisting `exp(-i J_z^2 χt)`.
pub fn evolve_oat(state: &DickeState, twist_angle: f64) -> Result<DickeState> {
    check_angle("twist angle", twist_angle)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = state.m(k);
            c * Complex64::from_polar(1.0, -m * m * twist_angle)
        })
        .collect();
    Ok(DickeState {
        n_atoms: state.n_atoms,
        amplitudes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::invalid(format!("unknown rotation axis '{other}'"))),
        }
    }
}

/// `sqrt(J(J+1) - m(m+1))` for amplitude index `k`: the `J_+` matrix
/// element `<m+1|J_+|m>`.
fn raise_coeff(n_atoms: usize, k: usize) -> f64 {
    let j = n_atoms as f64 / 2.0;
    let m = k as f64 - j;
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Dense `J_x` in the `|m>` basis (real, symmetric, tridiagonal).
pub fn jx_matrix(n_atoms: usize) -> DMatrix<f64> {
    let dim = n_atoms + 1;
    let mut jx = DMatrix::zeros(dim, dim);
    for k in 0..n_atoms {
        let v = 0.5 * raise_coeff(n_atoms, k);
        jx[(k + 1, k)] = v;
        jx[(k, k + 1)] = v;
    }
    jx
}

fn phase_z(state: &DickeState, angle: f64) -> Vec<Complex64> {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, -state.m(k) * angle))
        .collect()
}

fn apply_exp_jx(n_atoms: usize, amps: &[Complex64], angle: f64) -> Vec<Complex64> {
    let eig = SymmetricEigen::new(jx_matrix(n_atoms));
    let v = &eig.eigenvectors;
    let dim = n_atoms + 1;
    // exp(-i angle Jx) = V diag(e^{-i angle λ}) V^T
    let mut projected = vec![Complex64::new(0.0, 0.0); dim];
    for (col, p) in projected.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for row in 0..dim {
            acc += amps[row] * v[(row, col)];
        }
        *p = acc * Complex64::from_polar(1.0, -angle * eig.eigenvalues[col]);
    }
    (0..dim)
        .map(|row| (0..dim).map(|col| projected[col] * v[(row, col)]).sum())
        .collect()
}

/// `exp(-i J_axis angle)`. The x and y rotations use an exact eigen-
/// decomposition of the tridiagonal generator.
pub fn rotate(state: &DickeState, axis: Axis, angle: f64) -> Result<DickeState> {
    check_angle("rotation angle", angle)?;
    let n = state.n_atoms;
    let amplitudes = match axis {
        Axis::Z => phase_z(state, angle),
        Axis::X => apply_exp_jx(n, &state.amplitudes, angle),
        Axis::Y => {
            // exp(-iθJy) = exp(-iπ/2 Jz) exp(-iθJx) exp(iπ/2 Jz)
            let tmp = phase_z(state, -FRAC_PI_2);
            let tmp = apply_exp_jx(n, &tmp, angle);
            let tmp = DickeState {
                n_atoms: n,
                amplitudes: tmp,
            };
            phase_z(&tmp, FRAC_PI_2)
        }
    };
    Ok(DickeState {
        n_atoms: n,
        amplitudes,
    })
}

/// Exact ladder sums over the amplitude vector.
pub fn ladder_moments(state: &DickeState) -> LadderMoments {
    let n = state.n_atoms;
    let j = state.j();
    let c = &state.amplitudes;
    let mut jp = Complex64::new(0.0, 0.0);
    let mut jp_jp = Complex64::new(0.0, 0.0);
    let mut anti = Complex64::new(0.0, 0.0);
    let (mut jp_jm, mut jm_jp, mut jz, mut jz2) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..=n {
        let m = state.m(k);
        let p = c[k].norm_sqr();
        jz += p * m;
        jz2 += p * m * m;
        jp_jm += p * (j * (j + 1.0) - m * (m - 1.0));
        jm_jp += p * (j * (j + 1.0) - m * (m + 1.0));
        if k < n {
            let t = c[k + 1].conj() * c[k] * raise_coeff(n, k);
            jp += t;
            anti += t * (2.0 * m + 1.0);
        }
        if k + 1 < n {
            jp_jp += c[k + 2].conj() * c[k] * raise_coeff(n, k) * raise_coeff(n, k + 1);
        }
    }
    LadderMoments {
        jp,
        jp_jp,
        jp_jm,
        jm_jp,
        jp_jz_anti: anti,
        jz,
        jz2,
    }
}

pub fn spin_moments(state: &DickeState) -> SpinMoments {
    ladder_moments(state).to_spin_moments()
}

/// QFI of a Dicke state: largest eigenvalue of its covariance matrix.
pub fn qfi(state: &DickeState) -> Result<f64> {
    Ok(qfi_from_moments(&spin_moments(state))?.qfi)
}

/// `|<cat(θ, φ)|ψ>|` for the superposition produced by `exp(-i J_z^2 π/2)`
/// acting on `|α(θ, φ)>`: for even N
/// `e^{-iπ/4}/√2 (|α(θ,φ)> + i(-1)^J |α(θ,φ+π)>)`, for odd N
/// `e^{-iπ/4}/√2 (|α(θ,φ+π/2)> + i(-1)^{J+1/2} |α(θ,φ-π/2)>)`.
pub fn cat_fidelity(state: &DickeState, theta: f64, phi: f64) -> Result<f64> {
    let cat = cat_state(state.n_atoms, theta, phi)?;
    Ok(cat.inner(state).norm())
}

pub fn cat_state(n_atoms: usize, theta: f64, phi: f64) -> Result<DickeState> {
    let (first, second, sign_exponent) = if n_atoms % 2 == 0 {
        (
            make_css(n_atoms, theta, phi)?,
            make_css(n_atoms, theta, phi + PI)?,
            n_atoms / 2,
        )
    } else {
        (
            make_css(n_atoms, theta, phi + FRAC_PI_2)?,
            make_css(n_atoms, theta, phi - FRAC_PI_2)?,
            (n_atoms + 1) / 2,
        )
    };
    let sign = if sign_exponent % 2 == 0 { 1.0 } else { -1.0 };
    let prefactor = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -FRAC_PI_4);
    let rel = Complex64::new(0.0, sign);
    let amplitudes = first
        .amplitudes
        .iter()
        .zip(&second.amplitudes)
        .map(|(a, b)| prefactor * (a + rel * b))
        .collect();
    Ok(DickeState { n_atoms, amplitudes })
}

/// Husimi-style overlap magnitudes on a `(θ, φ)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `values[i][j]` is `|<α(θ_i, φ_j)|ψ>|`.
    pub values: Vec<Vec<f64>>,
}

/// Uniform grid with `n_theta` nodes over `[0, π]` and `n_phi` over `[0, 2π]`.
pub fn uniform_q_grid(n_theta: usize, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    let lin = |n: usize, hi: f64| -> Vec<f64> {
        if n == 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
        }
    };
    (lin(n_theta, PI), lin(n_phi, 2.0 * PI))
}

/// The 181 x 361 grid used by default.
pub fn default_q_grid() -> (Vec<f64>, Vec<f64>) {
    uniform_q_grid(181, 361)
}

pub fn q_function(state: &DickeState, thetas: &[f64], phis: &[f64]) -> Result<QGrid> {
    if thetas.is_empty() || phis.is_empty() {
        return Err(Error::invalid("Q-function grids must be nonempty"));
    }
    if thetas.iter().chain(phis).any(|v| !v.is_finite()) {
        return Err(Error::invalid("Q-function grids must be finite"));
    }
    let n = state.n_atoms;
    // <α|ψ> = Σ_m C_m(θ) e^{+i(J+m)φ} c_m
    let unit_phases: Vec<Complex64> = phis.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    let values = thetas
        .iter()
        .map(|&theta| {
            let weighted: Vec<Complex64> = css_weights(n, theta)
                .into_iter()
                .zip(&state.amplitudes)
                .map(|(w, c)| c * w)
                .collect();
            unit_phases
                .iter()
                .map(|&u| {
                    // Horner in e^{iφ}
                    let mut acc = Complex64::new(0.0, 0.0);
                    for w in weighted.iter().rev() {
                        acc = acc * u + w;
                    }
                    acc.norm()
                })
                .collect()
        })
        .collect();
    Ok(QGrid {
        thetas: thetas.to_vec(),
        phis: phis.to_vec(),
        values,
    })
}
