use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{ComplexField, Grid1D};
use crate::{Error, Result};

/// Inverted-parabola density `(μ - ξ²/2)/(N g0)` inside `ξ² < 2μ`,
/// renormalised on the grid so the discrete norm is exactly one.
pub fn tf_profile(grid: &Grid1D, mu: f64, n_atoms: usize, g0: f64) -> Result<ComplexField> {
    if !(mu > 0.0 && g0 > 0.0 && n_atoms > 0) {
        return Err(Error::invalid("tf_profile needs mu > 0, g0 > 0, N > 0"));
    }
    let ng = n_atoms as f64 * g0;
    let mut f = ComplexField::from_fn(grid, |x| Complex64::new(((mu - 0.5 * x * x).max(0.0) / ng).sqrt(), 0.0));
    if grid.norm_sqr(&f) == 0.0 {
        return Err(Error::invalid("TF profile has no support on the grid"));
    }
    f.normalize(grid);
    Ok(f)
}

pub fn tf_g0(mu: f64, n_atoms: usize) -> f64 {
    4.0 * 2f64.sqrt() * mu.powf(1.5) / (3.0 * n_atoms as f64)
}

pub fn tf_chi(mu: f64, n_atoms: usize, lambda: f64, kappa: f64) -> f64 {
    (1.0 + lambda - 2.0 * kappa) * 2.0 * mu / (5.0 * n_atoms as f64)
}

pub fn tf_tcat(mu: f64, n_atoms: usize, lambda: f64, kappa: f64) -> Result<f64> {
    let s = 1.0 + lambda - 2.0 * kappa;
    if !(s > 0.0) {
        return Err(Error::invalid(format!("1 + lambda - 2 kappa must be positive, got {s}")));
    }
    if !(mu > 0.0) {
        return Err(Error::invalid("mu must be positive"));
    }
    Ok(5.0 * PI * n_atoms as f64 / (4.0 * mu * s))
}

/// Period of the `n`-th collective excitation of a 1D TF condensate.
pub fn excitation_period(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("excitation index must be >= 1"));
    }
    let n = n as f64;
    Ok(2.0 * PI / (0.5 * n * (n + 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field1d::chi_instantaneous;

    #[test]
    fn cat_times() {
        assert!((tf_tcat(200.0, 100, 1.0, 0.0).unwrap() - 0.9817).abs() < 1e-4);
        assert!((tf_tcat(10.29, 100, 0.5, 0.0).unwrap() - 25.44).abs() < 5e-3);
        assert!(tf_tcat(10.0, 100, 1.0, 1.0).is_err());
    }

    #[test]
    fn chi_matches_cat_time() {
        let chi = tf_chi(32.08, 100, 1.0, 0.0);
        let t = tf_tcat(32.08, 100, 1.0, 0.0).unwrap();
        assert!((PI / (2.0 * chi) - t).abs() < 1e-12);
    }

    #[test]
    fn profile_norm_and_support() {
        let mu = 200.0;
        let grid = Grid1D::for_mu(mu).unwrap();
        let f = tf_profile(&grid, mu, 100, tf_g0(mu, 100)).unwrap();
        assert!((grid.norm_sqr(&f) - 1.0).abs() < 1e-12);
        for (v, x) in f.values().iter().zip(grid.x()) {
            if x * x >= 2.0 * mu {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }

    #[test]
    fn profile_chi_approaches_formula() {
        let mu = 32.08;
        let grid = Grid1D::new(4096, 2.5 * (2.0 * mu as f64).sqrt()).unwrap();
        let f = tf_profile(&grid, mu, 100, tf_g0(mu, 100)).unwrap();
        let chi = chi_instantaneous(&grid, &f, &f, tf_g0(mu, 100), 1.0, 0.0);
        let want = tf_chi(mu, 100, 1.0, 0.0);
        assert!((chi - want).abs() / want < 1e-3, "{chi} vs {want}");
    }

    #[test]
    fn periods() {
        assert!((excitation_period(2).unwrap() - 3.6276).abs() < 1e-4);
        assert!((excitation_period(1).unwrap() - 2.0 * PI).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for n in 1..20 {
            let t = excitation_period(n).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(excitation_period(0).is_err());
    }
}
