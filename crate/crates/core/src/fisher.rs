//! Collective-spin moments and the quantum Fisher information obtained as
//! the largest eigenvalue of the collective covariance matrix
//! `F_ij = 2<J_i J_j + J_j J_i> - 4<J_i><J_j>`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// First moments `<J_x>, <J_y>, <J_z>` and symmetrised second moments
/// `<J_i J_j + J_j J_i>/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub first: [f64; 3],
    pub second_sym: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn variance(&self, axis: usize) -> f64 {
        self.second_sym[axis][axis] - self.first[axis] * self.first[axis]
    }

    /// `<J_x^2 + J_y^2 + J_z^2>`; equals `J(J+1)` for any pure SU(2) state.
    pub fn casimir(&self) -> f64 {
        self.second_sym[0][0] + self.second_sym[1][1] + self.second_sym[2][2]
    }

    pub fn covariance_matrix(&self) -> [[f64; 3]; 3] {
        let mut f = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                f[i][j] = 4.0 * self.second_sym[i][j] - 4.0 * self.first[i] * self.first[j];
            }
        }
        f
    }
}

/// Covariance matrix and its largest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    pub matrix: [[f64; 3]; 3],
    pub qfi: f64,
}

pub fn qfi_from_moments(moments: &SpinMoments) -> Result<FisherResult> {
    let s = &moments.second_sym;
    let scale = s
        .iter()
        .flatten()
        .chain(moments.first.iter())
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (s[i][j] - s[j][i]).abs() > 1e-9 * scale {
                return Err(Error::invalid(format!(
                    "second-moment matrix not symmetric: [{i}][{j}] = {} vs {}",
                    s[i][j], s[j][i]
                )));
            }
        }
    }
    if moments
        .first
        .iter()
        .chain(s.iter().flatten())
        .any(|v| !v.is_finite())
    {
        return Err(Error::invalid("non-finite spin moments"));
    }
    let mut matrix = moments.covariance_matrix();
    symmetrize(&mut matrix);
    let qfi = max_eigenvalue_sym3(&matrix);
    Ok(FisherResult { matrix, qfi })
}

fn symmetrize(m: &mut [[f64; 3]; 3]) {
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
}

/// Largest eigenvalue of a symmetric 3x3 matrix.
///
/// Uses the trigonometric solution of the characteristic cubic. That
/// formula loses roughly half the significant digits when the two largest
/// eigenvalues (nearly) coincide, so in that case the result comes from
/// cyclic Jacobi rotations instead.
pub fn max_eigenvalue_sym3(a: &[[f64; 3]; 3]) -> f64 {
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let b00 = a[0][0] - q;
    let b11 = a[1][1] - q;
    let b22 = a[2][2] - q;
    let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let p2 = (b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off) / 6.0;
    if p2 == 0.0 {
        return q;
    }
    let p = p2.sqrt();
    let det = b00 * (b11 * b22 - a[1][2] * a[1][2]) - a[0][1] * (a[0][1] * b22 - a[1][2] * a[0][2])
        + a[0][2] * (a[0][1] * a[1][2] - b11 * a[0][2]);
    let r = (det / (p * p2) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let middle = 3.0 * q - largest - smallest;
    if largest - middle < 1e-4 * p {
        jacobi_eigenvalues(a).into_iter().fold(f64::NEG_INFINITY, f64::max)
    } else {
        largest
    }
}

fn jacobi_eigenvalues(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut m = *a;
    for _sweep in 0..64 {
        let off = m[0][1].abs() + m[0][2].abs() + m[1][2].abs();
        let diag = m[0][0].abs() + m[1][1].abs() + m[2][2].abs();
        if off <= f64::EPSILON * 1e-3 * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q] == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut next = m;
            for k in 0..3 {
                next[k][p] = c * m[k][p] - s * m[k][q];
                next[k][q] = s * m[k][p] + c * m[k][q];
            }
            m = next;
            for k in 0..3 {
                next[p][k] = c * m[p][k] - s * m[q][k];
                next[q][k] = s * m[p][k] + c * m[q][k];
            }
            m = next;
            m[p][q] = 0.0;
            m[q][p] = 0.0;
        }
    }
    [m[0][0], m[1][1], m[2][2]]
}


/// Ladder-operator expectation values from which [`SpinMoments`] follow.
///
/// `jp_jz_anti` is `<J_+ J_z + J_z J_+>`. `jp_jm` and `jm_jp` are real for
/// any state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderMoments {
    pub jp: num_complex::Complex64,
    pub jp_jp: num_complex::Complex64,
    pub jp_jm: f64,
    pub jm_jp: f64,
    pub jp_jz_anti: num_complex::Complex64,
    pub jz: f64,
    pub jz2: f64,
}

impl LadderMoments {
    pub fn to_spin_moments(&self) -> SpinMoments {
        let jxx = 0.25 * (2.0 * self.jp_jp.re + self.jp_jm + self.jm_jp);
        let jyy = 0.25 * (-2.0 * self.jp_jp.re + self.jp_jm + self.jm_jp);
        let jxy = 0.5 * self.jp_jp.im;
        let jxz = 0.5 * self.jp_jz_anti.re;
        let jyz = 0.5 * self.jp_jz_anti.im;
        SpinMoments {
            first: [self.jp.re, self.jp.im, self.jz],
            second_sym: [[jxx, jxy, jxz], [jxy, jyy, jyz], [jxz, jyz, self.jz2]],
        }
    }
}
