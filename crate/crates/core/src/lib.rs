//! Simulation of spin-cat state generation by one-axis twisting in
//! two-component, quasi one-dimensional Bose-Einstein condensates.
//!
//! The crate is split into four engines that share the collective-spin
//! conventions defined in [`dicke`]:
//!
//! - [`dicke`]: the exact single-mode model in the `J_z` eigenbasis.
//! - [`tw`]: a truncated-Wigner comparator for the same single-mode model.
//! - [`field1d`]: pseudospectral 1D machinery (grids, split-step propagation,
//!   ground states, Thomas-Fermi analytics).
//! - [`multimode`]: the number-basis multi-mode engine in which every
//!   population partition carries its own pair of mode functions.
//!
//! Spin conventions: `J_+ = a†b` raises `m = (n_a - n_b)/2`,
//! `J_x = (J_+ + J_-)/2`, `J_y = (J_+ - J_-)/(2i)`, `J_z = (N_a - N_b)/2`.

pub mod dicke;
pub mod error;
pub mod field1d;
pub mod fisher;
pub mod logspace;
pub mod multimode;
pub mod tw;

pub use error::{Error, Result};
pub use num_complex::Complex64;
