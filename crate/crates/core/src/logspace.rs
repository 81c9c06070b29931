//! Log-space helpers for binomial weights and complex numbers whose
//! magnitudes span hundreds of orders of magnitude.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `ln n!` via the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// A complex number stored as `exp(ln_mag + i phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub ln_mag: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        ln_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub fn new(ln_mag: f64, phase: f64) -> Self {
        Self { ln_mag, phase }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            Self::ZERO
        } else {
            Self {
                ln_mag: r.ln(),
                phase: z.arg(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_mag == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.ln_mag.exp(), self.phase)
        }
    }

    pub fn conj(self) -> Self {
        Self {
            ln_mag: self.ln_mag,
            phase: -self.phase,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self {
            ln_mag: self.ln_mag + other.ln_mag,
            phase: self.phase + other.phase,
        }
    }

    /// Integer power; `z^0 = 1` even for `z = 0`.
    pub fn powi(self, n: u64) -> Self {
        if n == 0 {
            return Self::new(0.0, 0.0);
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        Self {
            ln_mag: n as f64 * self.ln_mag,
            phase: n as f64 * self.phase,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            (2.0 * self.ln_mag).exp()
        }
    }
}
