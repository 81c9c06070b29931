//! Pseudospectral machinery on a periodic 1D grid in oscillator units
//! (`τ = ωt`, `ξ = x √(Mω/ħ)`, energies in `ħω`).
//!
//! Fourier transforms use the unitary convention: both directions are
//! scaled by `1/√n`. Only products of a field with a conjugated field
//! enter overlap integrals, so no observable depends on the convention.

mod grid;
mod ground;
mod split_step;
mod thomas_fermi;

pub use grid::{ComplexField, Grid1D};
pub use ground::{
    calibrate_g0, calibrate_ground_state, solve_ground_state, solve_ground_state_from, GroundState,
    GroundStateOptions,
};
pub use split_step::{pair_energy, Couplings, PairIntegrals, SplitStepper, StepReport};
pub use thomas_fermi::{excitation_period, tf_chi, tf_g0, tf_profile, tf_tcat};

/// Twisting rate `χ = χ_aa + χ_bb - 2χ_ab` with
/// `χ_jk = (g_jk/2) ∫|φ_j|^2 |φ_k|^2` and `g_aa = g0`, `g_bb = λ g0`,
/// `g_ab = κ g0`.
pub fn chi_instantaneous(
    grid: &Grid1D,
    phi_a: &ComplexField,
    phi_b: &ComplexField,
    g0: f64,
    lambda: f64,
    kappa: f64,
) -> f64 {
    let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
    for (a, b) in phi_a.values().iter().zip(phi_b.values()) {
        let (ra, rb) = (a.norm_sqr(), b.norm_sqr());
        aa += ra * ra;
        bb += rb * rb;
        ab += ra * rb;
    }
    let dx = grid.dx();
    0.5 * g0 * dx * (aa + lambda * bb - 2.0 * kappa * ab)
}
