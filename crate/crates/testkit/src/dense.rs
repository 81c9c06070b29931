//! `(N+1)`-dimensional matrix representation of `J_x, J_y, J_z` in the
//! basis `m = -J..J`.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn spin_operators(n_atoms: usize) -> [CMat; 3] {
    let j = n_atoms as f64 / 2.0;
    let dim = n_atoms + 1;
    let mut jp = CMat::zeros(dim, dim);
    let mut jz = CMat::zeros(dim, dim);
    for k in 0..dim {
        let m = k as f64 - j;
        jz[(k, k)] = Complex64::new(m, 0.0);
        if k + 1 < dim {
            jp[(k + 1, k)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).map(|z| z * 0.5);
    let jy = (&jp - &jm).map(|z| z * Complex64::new(0.0, -0.5));
    [jx, jy, jz]
}

/// `exp(-i angle G)` by dense matrix exponential.
pub fn unitary(generator: &CMat, angle: f64) -> CMat {
    generator.map(|z| z * Complex64::new(0.0, -angle)).exp()
}

pub fn evolve_oat(amplitudes: &[Complex64], chi_t: f64) -> Vec<Complex64> {
    let n = amplitudes.len() - 1;
    let jz = &spin_operators(n)[2];
    let u = unitary(&(jz * jz), chi_t);
    (u * DVector::from_column_slice(amplitudes)).iter().copied().collect()
}

pub struct DenseMoments {
    pub first: [f64; 3],
    pub second_sym: [[f64; 3]; 3],
    pub qfi: f64,
}

pub fn moments(amplitudes: &[Complex64]) -> DenseMoments {
    let n = amplitudes.len() - 1;
    let ops = spin_operators(n);
    let psi = DVector::from_column_slice(amplitudes);
    let applied: Vec<DVector<Complex64>> = ops.iter().map(|o| o * &psi).collect();
    let mut first = [0.0; 3];
    let mut second_sym = [[0.0; 3]; 3];
    for i in 0..3 {
        first[i] = psi.dotc(&applied[i]).re;
        for k in 0..3 {
            second_sym[i][k] = applied[i].dotc(&applied[k]).re;
        }
    }
    let mut f = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for k in 0..3 {
            f[(i, k)] = 4.0 * second_sym[i][k] - 4.0 * first[i] * first[k];
        }
    }
    DenseMoments {
        first,
        second_sym,
        qfi: f.symmetric_eigenvalues().max(),
    }
}
