use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Uniform periodic grid on `[-L, L)` with `n` points and its conjugate
/// momentum grid. Plans are shared, so clones are cheap.
#[derive(Clone)]
pub struct Grid1D {
    n_points: usize,
    half_width: f64,
    dx: f64,
    dk: f64,
    x: Arc<[f64]>,
    k: Arc<[f64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n_points", &self.n_points)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl Grid1D {
    pub fn new(n_points: usize, half_width: f64) -> Result<Self> {
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(Error::invalid(format!("n_points must be a power of two >= 4, got {n_points}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(format!("half_width must be positive, got {half_width}")));
        }
        let dx = 2.0 * half_width / n_points as f64;
        let dk = PI / half_width;
        let x: Vec<f64> = (0..n_points).map(|j| -half_width + j as f64 * dx).collect();
        let k: Vec<f64> = (0..n_points)
            .map(|j| {
                let j = j as i64;
                let n = n_points as i64;
                let idx = if j < n / 2 { j } else { j - n };
                idx as f64 * dk
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Self {
            n_points,
            half_width,
            dx,
            dk,
            x: x.into(),
            k: k.into(),
            forward,
            inverse,
        })
    }

    /// Grid sized for a chemical potential: half-width
    /// `max(8, 2.5 √(2μ))`, 256 points, 512 above `μ = 100`.
    pub fn for_mu(mu: f64) -> Result<Self> {
        let half_width = (2.5 * (2.0 * mu.max(0.0)).sqrt()).max(8.0);
        let n_points = if mu > 100.0 { 512 } else { 256 };
        Self::new(n_points, half_width)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn k_max(&self) -> f64 {
        self.dk * (self.n_points / 2) as f64
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// Unitary forward transform.
    pub fn fft(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
        let s = 1.0 / (self.n_points as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
    }

    /// Unitary inverse transform.
    pub fn ifft(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
        let s = 1.0 / (self.n_points as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
    }

    /// Forward then inverse transform with a combined `1/n` scale; used on
    /// hot paths where the intermediate scaling does not matter.
    pub(crate) fn raw_fft(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    pub(crate) fn raw_ifft(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }

    /// Rectangle-rule integral, spectrally accurate for smooth periodic data.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().sum::<f64>() * self.dx
    }

    /// `∫ conj(a) b dξ`.
    pub fn inner(&self, a: &ComplexField, b: &ComplexField) -> Complex64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            * self.dx
    }

    pub fn norm_sqr(&self, f: &ComplexField) -> f64 {
        self.integrate(f.values.iter().map(|v| v.norm_sqr()))
    }

    /// Normalised Gaussian `exp(-(ξ-ξ0)^2/(2w^2))`; `w = 1` is the
    /// oscillator ground state.
    pub fn gaussian(&self, center: f64, width: f64) -> ComplexField {
        let mut f = ComplexField::from_fn(self, |x| {
            Complex64::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0)
        });
        f.normalize(self);
        f
    }

    /// `<φ|H0|φ>` with `H0 = -½∂² + ½ξ²`, evaluated spectrally.
    pub fn single_particle_energy(&self, f: &ComplexField) -> f64 {
        let mut buf = f.values.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.fft(&mut buf, &mut scratch);
        // Parseval: unitary FFT => Σ|f_k|^2 = Σ|f_j|^2
        let kinetic: f64 = buf
            .iter()
            .zip(self.k.iter())
            .map(|(v, k)| 0.5 * k * k * v.norm_sqr())
            .sum::<f64>()
            * self.dx;
        let potential = self.integrate(f.values.iter().zip(self.x.iter()).map(|(v, x)| 0.5 * x * x * v.norm_sqr()));
        kinetic + potential
    }

    /// Applies `H0` to a field.
    pub fn apply_h0(&self, f: &ComplexField) -> ComplexField {
        let mut buf = f.values.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.fft(&mut buf, &mut scratch);
        buf.iter_mut().zip(self.k.iter()).for_each(|(v, k)| *v *= 0.5 * k * k);
        self.ifft(&mut buf, &mut scratch);
        buf.iter_mut()
            .zip(f.values.iter().zip(self.x.iter()))
            .for_each(|(v, (orig, x))| *v += 0.5 * x * x * orig);
        ComplexField { values: buf }
    }
}

/// Complex values sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            values: grid.x().iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn normalize(&mut self, grid: &Grid1D) {
        let n = grid.norm_sqr(self).sqrt();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(64, 4.0).unwrap();
        assert!((g.dx() * 64.0 - 8.0).abs() < 1e-15);
        assert!((g.k_max() - PI / g.dx()).abs() < 1e-12);
        assert_eq!(g.x()[0], -4.0);
        assert!(Grid1D::new(100, 4.0).is_err());
        assert!(Grid1D::new(64, -1.0).is_err());
    }

    #[test]
    fn default_sizes() {
        let g = Grid1D::for_mu(0.6).unwrap();
        assert_eq!((g.n_points(), g.half_width()), (256, 8.0));
        let g = Grid1D::for_mu(200.0).unwrap();
        assert_eq!(g.n_points(), 512);
        assert!((g.half_width() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_transform_round_trip() {
        let g = Grid1D::new(128, 6.0).unwrap();
        let f = g.gaussian(0.5, 0.8);
        let mut buf = f.values().to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); g.scratch_len()];
        g.fft(&mut buf, &mut scratch);
        let e: f64 = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
        assert!((e - 1.0).abs() < 1e-13);
        g.ifft(&mut buf, &mut scratch);
        for (a, b) in buf.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn oscillator_energies() {
        let g = Grid1D::new(256, 10.0).unwrap();
        let phi0 = g.gaussian(0.0, 1.0);
        assert!((g.single_particle_energy(&phi0) - 0.5).abs() < 1e-12);
        let mut phi1 = ComplexField::from_fn(&g, |x| Complex64::new(x * (-x * x / 2.0).exp(), 0.0));
        phi1.normalize(&g);
        assert!((g.single_particle_energy(&phi1) - 1.5).abs() < 1e-12);
        let h = g.apply_h0(&phi1);
        for (a, b) in h.values().iter().zip(phi1.values()) {
            assert!((a - 1.5 * b).norm() < 1e-10);
        }
    }
}
