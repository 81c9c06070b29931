//! Independent brute-force references: dense collective-spin matrices and a
//! sparse second-quantised Fock representation of multimode states. Inputs
//! are plain vectors so nothing here shares code with the engines.

pub mod dense;
pub mod fock;

use num_complex::Complex64;
use rand::Rng;

/// Normalised smooth complex field: displaced, skewed Gaussian with a
/// random linear and quadratic phase.
pub fn random_smooth_field<R: Rng>(x: &[f64], dx: f64, rng: &mut R) -> Vec<Complex64> {
    let x0: f64 = rng.random_range(-1.0..1.0);
    let w: f64 = rng.random_range(0.7..1.5);
    let p: f64 = rng.random_range(-0.8..0.8);
    let q: f64 = rng.random_range(-0.3..0.3);
    let skew: f64 = rng.random_range(-0.4..0.4);
    let mut f: Vec<Complex64> = x
        .iter()
        .map(|&x| {
            let env = (-(x - x0).powi(2) / (2.0 * w * w)).exp() * (1.0 + skew * x);
            Complex64::from_polar(env, p * x + q * x * x)
        })
        .collect();
    let n = (f.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx).sqrt();
    f.iter_mut().for_each(|v| *v /= n);
    f
}
