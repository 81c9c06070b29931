use num_complex::Complex64;

use super::grid::{ComplexField, Grid1D};
use crate::{Error, Result};

/// Per-field nonlinear coefficients of a coupled pair. Field `a` sees the
/// potential `ξ²/2 + g_self_a |φ_a|² + g_cross_a |φ_b|²`, field `b` the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Couplings {
    pub g_self_a: f64,
    pub g_self_b: f64,
    pub g_cross_a: f64,
    pub g_cross_b: f64,
}

impl Couplings {
    pub const ZERO: Couplings = Couplings {
        g_self_a: 0.0,
        g_self_b: 0.0,
        g_cross_a: 0.0,
        g_cross_b: 0.0,
    };

    fn is_finite(&self) -> bool {
        [self.g_self_a, self.g_self_b, self.g_cross_a, self.g_cross_b]
            .iter()
            .all(|g| g.is_finite())
    }
}

/// Time integrals of the quartic overlaps accumulated over a propagation:
/// `∫dτ ∫|φ_a|⁴`, `∫dτ ∫|φ_b|⁴`, `∫dτ ∫|φ_a|²|φ_b|²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairIntegrals {
    pub aa: f64,
    pub bb: f64,
    pub ab: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub integrals: PairIntegrals,
    /// `dt` times the largest nonlinear potential seen at the start of the
    /// call; values above 0.1 signal a stiff step.
    pub stiffness: f64,
}

impl StepReport {
    pub fn is_stiff(&self) -> bool {
        self.stiffness > 0.1
    }
}

/// Strang-split propagator for a pair of fields in real time. Half kinetic
/// steps of consecutive steps are merged, so `n` steps cost `n + 1` kinetic
/// applications.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    grid: Grid1D,
    dt: f64,
    kin_half: Vec<Complex64>,
    kin_full: Vec<Complex64>,
    trap: Vec<f64>,
}

const NAN_CHECK_INTERVAL: usize = 256;

impl SplitStepper {
    pub fn new(grid: &Grid1D, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {dt}")));
        }
        // raw transforms are unnormalised: fold 1/n into the kinetic factor
        let scale = 1.0 / grid.n_points() as f64;
        let phase = |k: f64, t: f64| Complex64::from_polar(scale, -0.5 * k * k * t);
        Ok(Self {
            grid: grid.clone(),
            dt,
            kin_half: grid.k().iter().map(|&k| phase(k, 0.5 * dt)).collect(),
            kin_full: grid.k().iter().map(|&k| phase(k, dt)).collect(),
            trap: grid.x().iter().map(|&x| 0.5 * x * x).collect(),
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances both fields by `n_steps`. The density integrals are sampled
    /// at the position substep of each step (the step midpoint).
    pub fn propagate(
        &self,
        a: &mut ComplexField,
        b: &mut ComplexField,
        couplings: &Couplings,
        n_steps: usize,
    ) -> Result<StepReport> {
        let n = self.grid.n_points();
        if a.len() != n || b.len() != n {
            return Err(Error::invalid("field length does not match grid"));
        }
        if !couplings.is_finite() {
            return Err(Error::invalid("non-finite couplings"));
        }
        let stiffness = self.dt * max_nonlinear(a, b, couplings);
        let mut integrals = PairIntegrals::default();
        if n_steps == 0 {
            return Ok(StepReport { integrals, stiffness });
        }

        let mut scratch = vec![Complex64::new(0.0, 0.0); self.grid.scratch_len()];
        let mut rho_a = vec![0.0; n];
        let mut rho_b = vec![0.0; n];
        let dx = self.grid.dx();
        let dt = self.dt;
        let (fa, fb) = (a.values_mut(), b.values_mut());

        self.kinetic(fa, &self.kin_half, &mut scratch);
        self.kinetic(fb, &self.kin_half, &mut scratch);
        for step in 0..n_steps {
            let (mut s_aa, mut s_bb, mut s_ab) = (0.0, 0.0, 0.0);
            for j in 0..n {
                let (ra, rb) = (fa[j].norm_sqr(), fb[j].norm_sqr());
                rho_a[j] = ra;
                rho_b[j] = rb;
                s_aa += ra * ra;
                s_bb += rb * rb;
                s_ab += ra * rb;
            }
            integrals.aa += s_aa * dx * dt;
            integrals.bb += s_bb * dx * dt;
            integrals.ab += s_ab * dx * dt;
            potential(fa, &self.trap, &rho_a, &rho_b, couplings.g_self_a, couplings.g_cross_a, dt);
            potential(fb, &self.trap, &rho_b, &rho_a, couplings.g_self_b, couplings.g_cross_b, dt);

            let kin = if step + 1 == n_steps { &self.kin_half } else { &self.kin_full };
            self.kinetic(fa, kin, &mut scratch);
            self.kinetic(fb, kin, &mut scratch);

            if (step + 1) % NAN_CHECK_INTERVAL == 0 || step + 1 == n_steps {
                if !(all_finite(fa) && all_finite(fb)) {
                    return Err(Error::NonFinite { step: step + 1, component: None });
                }
            }
        }
        Ok(StepReport { integrals, stiffness })
    }

    fn kinetic(&self, f: &mut [Complex64], factor: &[Complex64], scratch: &mut [Complex64]) {
        self.grid.raw_fft(f, scratch);
        f.iter_mut().zip(factor).for_each(|(v, k)| *v *= k);
        self.grid.raw_ifft(f, scratch);
    }
}

fn potential(f: &mut [Complex64], trap: &[f64], own: &[f64], other: &[f64], g_self: f64, g_cross: f64, dt: f64) {
    for (((v, &t), &ro), &rx) in f.iter_mut().zip(trap).zip(own).zip(other) {
        let (s, c) = (-dt * (t + g_self * ro + g_cross * rx)).sin_cos();
        *v *= Complex64::new(c, s);
    }
}

fn max_nonlinear(a: &ComplexField, b: &ComplexField, c: &Couplings) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| {
            let (ra, rb) = (x.norm_sqr(), y.norm_sqr());
            (c.g_self_a * ra + c.g_cross_a * rb)
                .abs()
                .max((c.g_self_b * rb + c.g_cross_b * ra).abs())
        })
        .fold(0.0, f64::max)
}

fn all_finite(f: &[Complex64]) -> bool {
    f.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Energy functional of a coupled pair with particle weights `(w_a, w_b)`:
/// `Σ_j w_j <H0>_j + ½ w_a g_self_a ∫|φ_a|⁴ + ½ w_b g_self_b ∫|φ_b|⁴ + w_a g_cross_a ∫|φ_a|²|φ_b|²`.
/// It is conserved by the pair dynamics whenever `w_a g_cross_a = w_b g_cross_b`.
pub fn pair_energy(
    grid: &Grid1D,
    a: &ComplexField,
    b: &ComplexField,
    couplings: &Couplings,
    weights: (f64, f64),
) -> f64 {
    let (w_a, w_b) = weights;
    let (mut s_aa, mut s_bb, mut s_ab) = (0.0, 0.0, 0.0);
    for (x, y) in a.values().iter().zip(b.values()) {
        let (ra, rb) = (x.norm_sqr(), y.norm_sqr());
        s_aa += ra * ra;
        s_bb += rb * rb;
        s_ab += ra * rb;
    }
    let dx = grid.dx();
    w_a * grid.single_particle_energy(a)
        + w_b * grid.single_particle_energy(b)
        + 0.5 * w_a * couplings.g_self_a * s_aa * dx
        + 0.5 * w_b * couplings.g_self_b * s_bb * dx
        + w_a * couplings.g_cross_a * s_ab * dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_excited(grid: &Grid1D) -> ComplexField {
        let mut f = ComplexField::from_fn(grid, |x| Complex64::new(x * (-x * x / 2.0).exp(), 0.0));
        f.normalize(grid);
        f
    }

    #[test]
    fn ground_state_is_stationary() {
        let grid = Grid1D::new(256, 10.0).unwrap();
        let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
        let phi0 = grid.gaussian(0.0, 1.0);
        let (mut a, mut b) = (phi0.clone(), phi0.clone());
        stepper.propagate(&mut a, &mut b, &Couplings::ZERO, 1000).unwrap();
        let overlap = grid.inner(&phi0, &a);
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        // splitting error is O(dt^2) in the phase and the pointwise density
        assert!((overlap.arg() + 0.5).abs() < 1e-7);
        let dens = a
            .values()
            .iter()
            .zip(phi0.values())
            .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(dens < 1e-6);
    }

    #[test]
    fn excited_state_phase_rate() {
        let grid = Grid1D::new(256, 10.0).unwrap();
        let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
        let phi1 = first_excited(&grid);
        let (mut a, mut b) = (phi1.clone(), phi1.clone());
        stepper.propagate(&mut a, &mut b, &Couplings::ZERO, 1000).unwrap();
        let overlap = grid.inner(&phi1, &a);
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        let rate = -overlap.arg();
        assert!((rate - 1.5).abs() < 1e-6, "rate {rate}");
    }

    fn nonlinear_run(dt: f64, t: f64) -> (ComplexField, ComplexField) {
        let grid = Grid1D::new(128, 8.0).unwrap();
        let stepper = SplitStepper::new(&grid, dt).unwrap();
        let mut a = grid.gaussian(0.4, 0.8);
        let mut b = grid.gaussian(-0.3, 1.2);
        let c = Couplings {
            g_self_a: 5.0,
            g_self_b: 3.0,
            g_cross_a: 2.0,
            g_cross_b: 2.0,
        };
        let steps = (t / dt).round() as usize;
        stepper.propagate(&mut a, &mut b, &c, steps).unwrap();
        (a, b)
    }

    fn distance(x: &ComplexField, y: &ComplexField) -> f64 {
        x.values()
            .iter()
            .zip(y.values())
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn second_order_convergence() {
        let t = 1.0;
        let base = 0.02;
        let (ra, rb) = nonlinear_run(base / 8.0, t);
        let (a1, b1) = nonlinear_run(base, t);
        let (a2, b2) = nonlinear_run(base / 2.0, t);
        let e1 = distance(&a1, &ra) + distance(&b1, &rb);
        let e2 = distance(&a2, &ra) + distance(&b2, &rb);
        // against a dt/8 reference the ideal ratio is (1 - 1/64)/(1/4 - 1/64)
        let ratio = e1 / e2;
        assert!((3.5..4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn norm_and_energy_conservation() {
        let grid = Grid1D::new(256, 10.0).unwrap();
        let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
        let mut a = grid.gaussian(0.5, 0.9);
        let mut b = grid.gaussian(0.0, 1.3);
        let c = Couplings {
            g_self_a: 4.0,
            g_self_b: 6.0,
            g_cross_a: 1.5,
            g_cross_b: 1.5,
        };
        let e0 = pair_energy(&grid, &a, &b, &c, (1.0, 1.0));
        for _ in 0..5 {
            stepper.propagate(&mut a, &mut b, &c, 1000).unwrap();
            assert!((grid.norm_sqr(&a) - 1.0).abs() < 1e-8);
            assert!((grid.norm_sqr(&b) - 1.0).abs() < 1e-8);
        }
        let e1 = pair_energy(&grid, &a, &b, &c, (1.0, 1.0));
        assert!(((e1 - e0) / e0).abs() < 1e-6, "drift {}", (e1 - e0) / e0);
    }

    #[test]
    fn integrals_of_stationary_state() {
        let grid = Grid1D::new(256, 10.0).unwrap();
        let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
        let phi0 = grid.gaussian(0.0, 1.0);
        let (mut a, mut b) = (phi0.clone(), phi0.clone());
        let r = stepper.propagate(&mut a, &mut b, &Couplings::ZERO, 500).unwrap();
        let q = 0.5 / (2.0 * std::f64::consts::PI).sqrt();
        for v in [r.integrals.aa, r.integrals.bb, r.integrals.ab] {
            assert!(((v - q) / q).abs() < 1e-6);
        }
    }

    #[test]
    fn nan_is_reported() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
        let mut a = grid.gaussian(0.0, 1.0);
        a.values_mut()[3] = Complex64::new(f64::NAN, 0.0);
        let mut b = grid.gaussian(0.0, 1.0);
        let err = stepper.propagate(&mut a, &mut b, &Couplings::ZERO, 10).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn stiffness_flag() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let stepper = SplitStepper::new(&grid, 0.1).unwrap();
        let mut a = grid.gaussian(0.0, 1.0);
        let mut b = a.clone();
        let c = Couplings {
            g_self_a: 100.0,
            ..Couplings::ZERO
        };
        assert!(stepper.propagate(&mut a, &mut b, &c, 1).unwrap().is_stiff());
    }
}
