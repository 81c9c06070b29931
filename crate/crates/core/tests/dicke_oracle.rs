use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincat_core::dicke::{evolve_oat, make_css, qfi, rotate, spin_moments, Axis};
use spincat_testkit::dense;

#[test]
fn moments_and_qfi_match_dense_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..20 {
        let n = 1 + trial % 8;
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let chi_t = rng.random_range(0.0..std::f64::consts::PI);

        let css = make_css(n, theta, phi).unwrap();
        let psi = dense::evolve_oat(css.amplitudes(), chi_t);
        let state = evolve_oat(&css, chi_t).unwrap();
        for (a, b) in state.amplitudes().iter().zip(&psi) {
            assert!((a - b).norm() < 1e-10);
        }
        let want = dense::moments(&psi);
        let sm = spin_moments(&state);
        for i in 0..3 {
            assert!((sm.first[i] - want.first[i]).abs() < 1e-10, "N={n} first[{i}]");
            for k in 0..3 {
                assert!((sm.second_sym[i][k] - want.second_sym[i][k]).abs() < 1e-10, "N={n} [{i}][{k}]");
            }
        }
        let got = qfi(&state).unwrap();
        assert!((got - want.qfi).abs() < 1e-10, "N={n} qfi {got} vs {}", want.qfi);
    }
}

#[test]
fn rotations_match_dense_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=8 {
        let ops = dense::spin_operators(n);
        let css = make_css(n, rng.random_range(0.0..3.0), rng.random_range(0.0..6.0)).unwrap();
        let start = evolve_oat(&css, 0.4).unwrap();
        for (axis, op) in [(Axis::X, &ops[0]), (Axis::Y, &ops[1]), (Axis::Z, &ops[2])] {
            let angle = rng.random_range(-3.0..3.0);
            let want = dense::unitary(op, angle) * DVector::from_column_slice(start.amplitudes());
            let got = rotate(&start, axis, angle).unwrap();
            for (a, b) in got.amplitudes().iter().zip(want.iter()) {
                assert!((a - b).norm() < 1e-10, "N={n} {axis:?}");
            }
        }
    }
}
