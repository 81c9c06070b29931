use spincat_core::field1d::{calibrate_ground_state, Grid1D, SplitStepper};
use spincat_core::multimode::{
    apply_pi_pulse, assemble_moments, init_state, overlaps, qfi_multimode, step_all, InteractionParams,
    MultimodeState, Species,
};

fn prepared(n: usize, mu: f64, lambda: f64, kappa: f64) -> (MultimodeState, InteractionParams, Grid1D) {
    let grid = Grid1D::for_mu(mu).unwrap();
    let gs = calibrate_ground_state(mu, n, &grid, 1e-10).unwrap();
    let p = InteractionParams {
        g0: gs.g0,
        lambda,
        kappa,
    };
    (init_state(n, &gs, &grid).unwrap(), p, grid)
}

// A field whose coupling falls short of the ground-state coupling by G breathes;
// to first order in G the peak density swings by G / (2 sqrt(2 pi)).
#[test]
fn near_single_mode_breathing_tracks_coupling_shortfall() {
    let n = 100;
    let (mut s, p, grid) = prepared(n, 0.6, 1.0, 0.0);
    let stepper = SplitStepper::new(&grid, 1e-2).unwrap();
    let initial = s.components()[0].phi_a.density();
    let peak = initial.iter().cloned().fold(0.0, f64::max);
    let mut worst = vec![0.0f64; n + 1];
    for _ in 0..200 {
        step_all(&mut s, &stepper, &p, 50).unwrap();
        for (k, c) in s.components().iter().enumerate() {
            let dev = c
                .phi_a
                .density()
                .iter()
                .zip(&initial)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst[k] = worst[k].max(dev / peak);
        }
    }
    assert!((s.time() - 100.0).abs() < 1e-9);
    for (k, &w) in worst.iter().enumerate() {
        let shortfall = (n as f64 - (k as f64 - 1.0).max(0.0)) * p.g0;
        let predicted = shortfall / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
        assert!(w < 1.25 * predicted + 2e-3, "k = {k}: {w} vs {predicted}");
        if predicted > 0.01 {
            assert!(w > 0.75 * predicted, "k = {k}: {w} vs {predicted}");
        }
    }
    assert!(worst[n] < 0.01);
}

#[test]
fn pulse_is_inert_for_symmetric_mixture() {
    let (start, p, grid) = prepared(20, 5.0, 1.0, 0.0);
    let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
    let mut plain = start.clone();
    step_all(&mut plain, &stepper, &p, 2000).unwrap();
    let mut pulsed = start;
    step_all(&mut pulsed, &stepper, &p, 1000).unwrap();
    let mut pulsed = apply_pi_pulse(&pulsed);
    step_all(&mut pulsed, &stepper, &p, 1000).unwrap();
    let q = |s: &MultimodeState| qfi_multimode(&assemble_moments(s, &overlaps(s)).unwrap()).unwrap().qfi;
    let (a, b) = (q(&plain), q(&pulsed));
    assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn overlap_decay_and_revival_in_breathing_regime() {
    let n = 100;
    let (mut s, p, grid) = prepared(n, 32.08, 1.0, 0.0);
    let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
    let k0 = n / 2;
    let mut trace = Vec::new();
    for _ in 0..200 {
        step_all(&mut s, &stepper, &p, 40).unwrap();
        let t = overlaps(&s);
        let g_ab = t.gamma(Species::A, Species::B, 0, k0).unwrap();
        assert!((g_ab.norm() - 1.0).abs() < 1e-10);
        let g_bb = t.gamma(Species::B, Species::B, 2, k0).unwrap();
        trace.push(g_bb.norm().powi((n / 2) as i32));
    }
    let min_index = trace
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    assert!(trace[min_index] < 0.8, "minimum {}", trace[min_index]);
    let later_max = trace[min_index..].iter().cloned().fold(0.0, f64::max);
    assert!(later_max > 0.95, "revival to {later_max}");
}
