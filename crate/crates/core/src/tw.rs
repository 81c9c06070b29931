//! Truncated-Wigner comparator for single-mode one-axis twisting.
//!
//! Each trajectory carries two complex amplitudes `(α_a, α_b)` sampled from
//! the Wigner function of a coherent spin state. Under `H_W = χ (J_z^W)^2`
//! the population difference `J_z^W = (|α_a|^2 - |α_b|^2)/2` is a constant
//! of motion, so trajectories are advanced in closed form.
//!
//! Trajectory averages estimate symmetrically ordered products; they are
//! converted to ordinary spin moments through the bosonic ordering
//! relations (one half-quantum per mode at second order).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::fisher::SpinMoments;
use crate::{Error, Result};

/// Generator used for Wigner sampling.
pub const RNG_ALGORITHM: &str = "ChaCha12 (rand_chacha::ChaCha12Rng::seed_from_u64)";

#[derive(Debug, Clone, PartialEq)]
pub struct TwEnsemble {
    pub n_atoms: usize,
    pub alpha_a: Vec<Complex64>,
    pub alpha_b: Vec<Complex64>,
    pub seed: u64,
}

impl TwEnsemble {
    pub fn n_traj(&self) -> usize {
        self.alpha_a.len()
    }
}

/// Samples `α_j = √N c_j + η_j` with `Var(Re η) = Var(Im η) = 1/4`.
pub fn sample_css_wigner(
    n_atoms: usize,
    c_a: Complex64,
    c_b: Complex64,
    n_traj: usize,
    seed: u64,
) -> Result<TwEnsemble> {
    if n_traj == 0 {
        return Err(Error::invalid("n_traj must be positive"));
    }
    if n_atoms == 0 {
        return Err(Error::invalid("n_atoms must be positive"));
    }
    let norm = c_a.norm_sqr() + c_b.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("|c_a|^2 + |c_b|^2 = {norm}, expected 1")));
    }
    let root_n = (n_atoms as f64).sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draw = || -> f64 {
        let z: f64 = StandardNormal.sample(&mut rng);
        0.5 * z
    };
    let mut alpha_a = Vec::with_capacity(n_traj);
    let mut alpha_b = Vec::with_capacity(n_traj);
    for _ in 0..n_traj {
        let a = root_n * c_a + Complex64::new(draw(), draw());
        let b = root_n * c_b + Complex64::new(draw(), draw());
        alpha_a.push(a);
        alpha_b.push(b);
    }
    Ok(TwEnsemble {
        n_atoms,
        alpha_a,
        alpha_b,
        seed,
    })
}

/// Advances every trajectory by `χt` under `H_W = χ (J_z^W)^2`.
pub fn evolve_tw(ensemble: &TwEnsemble, chi: f64, t: f64) -> Result<TwEnsemble> {
    let twist = chi * t;
    if !twist.is_finite() {
        return Err(Error::invalid("chi * t must be finite"));
    }
    let (alpha_a, alpha_b): (Vec<_>, Vec<_>) = ensemble
        .alpha_a
        .par_iter()
        .zip(ensemble.alpha_b.par_iter())
        .map(|(&a, &b)| {
            let jz = 0.5 * (a.norm_sqr() - b.norm_sqr());
            let rot = Complex64::from_polar(1.0, -twist * jz);
            (a * rot, b * rot.conj())
        })
        .unzip();
    Ok(TwEnsemble {
        n_atoms: ensemble.n_atoms,
        alpha_a,
        alpha_b,
        seed: ensemble.seed,
    })
}

/// Spin moments estimated from an ensemble, with standard errors of the
/// same entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwMoments {
    pub moments: SpinMoments,
    pub std_err: SpinMoments,
    pub n_traj: usize,
}

fn pauli(axis: usize) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        0 => [[z, one], [one, z]],
        1 => [[z, -i], [i, z]],
        _ => [[one, z], [z, -one]],
    }
}

fn delta(p: usize, q: usize) -> f64 {
    if p == q {
        1.0
    } else {
        0.0
    }
}

/// Per-trajectory estimators: three first moments followed by the six
/// symmetrised second moments `xx, yy, zz, xy, xz, yz`.
fn trajectory_estimators(alpha: [Complex64; 2]) -> [f64; 9] {
    // Normally ordered two- and four-point functions from Weyl symbols.
    let n2 = |p: usize, s: usize| -> Complex64 { alpha[p].conj() * alpha[s] - 0.5 * delta(p, s) };
    let n4 = |p: usize, r: usize, q: usize, s: usize| -> Complex64 {
        alpha[p].conj() * alpha[r].conj() * alpha[q] * alpha[s]
            - 0.5 * (delta(p, q) * n2(r, s) + delta(p, s) * n2(r, q) + delta(r, q) * n2(p, s) + delta(r, s) * n2(p, q))
            - 0.25 * (delta(p, q) * delta(r, s) + delta(p, s) * delta(r, q))
    };
    let sig = [pauli(0), pauli(1), pauli(2)];
    let mut out = [0.0; 9];
    for i in 0..3 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..2 {
            for q in 0..2 {
                acc += sig[i][p][q] * n2(p, q);
            }
        }
        out[i] = 0.5 * acc.re;
    }
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        let coeff = sig[i][p][q] * sig[j][r][s];
                        if coeff == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        acc += coeff * (n4(p, r, q, s) + delta(q, r) * n2(p, s));
                    }
                }
            }
        }
        // Re<J_i J_j> is the symmetrised product.
        out[3 + slot] = 0.25 * acc.re;
    }
    out
}

/// Sum with a fixed pairwise tree so the result does not depend on how
/// the per-trajectory work was scheduled.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn assemble(v: &[f64; 9]) -> SpinMoments {
    SpinMoments {
        first: [v[0], v[1], v[2]],
        second_sym: [[v[3], v[6], v[7]], [v[6], v[4], v[8]], [v[7], v[8], v[5]]],
    }
}

pub fn tw_moments(ensemble: &TwEnsemble) -> Result<TwMoments> {
    let n = ensemble.n_traj();
    if n < 2 {
        return Err(Error::invalid("at least two trajectories are needed"));
    }
    let first = (ensemble.alpha_a[0], ensemble.alpha_b[0]);
    if ensemble
        .alpha_a
        .iter()
        .zip(&ensemble.alpha_b)
        .all(|(&a, &b)| (a, b) == first)
    {
        return Err(Error::invalid("degenerate ensemble: all trajectories identical"));
    }
    let per_traj: Vec<[f64; 9]> = ensemble
        .alpha_a
        .par_iter()
        .zip(ensemble.alpha_b.par_iter())
        .map(|(&a, &b)| trajectory_estimators([a, b]))
        .collect();
    let mut mean = [0.0; 9];
    let mut err = [0.0; 9];
    let mut column = vec![0.0; n];
    for k in 0..9 {
        column.iter_mut().zip(&per_traj).for_each(|(c, t)| *c = t[k]);
        let mu = pairwise_sum(&column) / n as f64;
        column.iter_mut().for_each(|c| *c = (*c - mu) * (*c - mu));
        let var = pairwise_sum(&column) / (n - 1) as f64;
        mean[k] = mu;
        err[k] = (var / n as f64).sqrt();
    }
    Ok(TwMoments {
        moments: assemble(&mean),
        std_err: assemble(&err),
        n_traj: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn equal_split() -> (Complex64, Complex64) {
        (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0))
    }

    #[test]
    fn fixed_seed_replays() {
        let (a, b) = equal_split();
        let e1 = sample_css_wigner(50, a, b, 500, 7).unwrap();
        let e2 = sample_css_wigner(50, a, b, 500, 7).unwrap();
        assert_eq!(e1, e2);
        let e3 = sample_css_wigner(50, a, b, 500, 8).unwrap();
        assert_ne!(e1, e3);
    }

    #[test]
    fn rejects_bad_input() {
        let (a, b) = equal_split();
        assert!(sample_css_wigner(10, a, b, 0, 1).is_err());
        assert!(sample_css_wigner(10, a, a * 2.0, 10, 1).is_err());
        let e = sample_css_wigner(10, a, b, 1, 1).unwrap();
        assert!(tw_moments(&e).is_err());
        let e = TwEnsemble {
            n_atoms: 10,
            alpha_a: vec![a; 5],
            alpha_b: vec![b; 5],
            seed: 0,
        };
        assert!(tw_moments(&e).is_err());
    }

    #[test]
    fn all_in_a_statistics() {
        let n = 100;
        let e = sample_css_wigner(n, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 20_000, 3).unwrap();
        let k = e.n_traj() as f64;
        let mean_b: Complex64 = e.alpha_b.iter().sum::<Complex64>() / k;
        // each quadrature has sd 1/2
        assert!(mean_b.re.abs() < 5.0 * 0.5 / k.sqrt());
        assert!(mean_b.im.abs() < 5.0 * 0.5 / k.sqrt());
        let na: Vec<f64> = e.alpha_a.iter().map(|a| a.norm_sqr() - 0.5).collect();
        let mu = na.iter().sum::<f64>() / k;
        let sd = (na.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        assert!((mu - n as f64).abs() < 5.0 * sd / k.sqrt());
        let tot: f64 = e
            .alpha_a
            .iter()
            .zip(&e.alpha_b)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr() - 1.0)
            .sum::<f64>()
            / k;
        assert!((tot - n as f64).abs() < 5.0 * sd / k.sqrt() + 0.05);
    }

    #[test]
    fn evolution_conserves_populations() {
        let (a, b) = equal_split();
        let e = sample_css_wigner(40, a, b, 1000, 11).unwrap();
        assert_eq!(evolve_tw(&e, 0.3, 0.0).unwrap(), e);
        let ev = evolve_tw(&e, 0.3, 2.0).unwrap();
        for (x, y) in e.alpha_a.iter().zip(&ev.alpha_a) {
            assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-14 * x.norm_sqr().max(1.0));
        }
        for (x, y) in e.alpha_b.iter().zip(&ev.alpha_b) {
            assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-14 * x.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn unevolved_moments() {
        let n = 60;
        let c_a = Complex64::new(0.8, 0.0);
        let c_b = Complex64::new(0.0, 0.6);
        let e = sample_css_wigner(n, c_a, c_b, 20_000, 5).unwrap();
        let m = tw_moments(&e).unwrap();
        let jz = n as f64 * (0.64 - 0.36) / 2.0;
        assert!((m.moments.first[2] - jz).abs() < 5.0 * m.std_err.first[2]);
        // <J_y> = N Im(c_a* c_b)
        assert!((m.moments.first[1] - n as f64 * 0.48).abs() < 5.0 * m.std_err.first[1]);

        let (a, b) = equal_split();
        let e = sample_css_wigner(n, a, b, 20_000, 6).unwrap();
        let m = tw_moments(&e).unwrap();
        assert!((m.moments.second_sym[2][2] - n as f64 / 4.0).abs() < 5.0 * m.std_err.second_sym[2][2]);
    }

    #[test]
    fn standard_error_scales_with_trajectory_count() {
        let (a, b) = equal_split();
        let small = tw_moments(&sample_css_wigner(80, a, b, 4000, 1).unwrap()).unwrap();
        let large = tw_moments(&sample_css_wigner(80, a, b, 16000, 2).unwrap()).unwrap();
        let ratio = small.std_err.second_sym[2][2] / large.std_err.second_sym[2][2];
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
