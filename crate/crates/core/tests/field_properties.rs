use spincat_core::field1d::{
    calibrate_ground_state, chi_instantaneous, pair_energy, solve_ground_state, tf_chi, tf_g0, Couplings, Grid1D,
    SplitStepper,
};

#[test]
fn thomas_fermi_consistency() {
    for mu in [50.0, 100.0, 200.0] {
        let grid = Grid1D::for_mu(mu).unwrap();
        let gs = calibrate_ground_state(mu, 100, &grid, 1e-9).unwrap();
        assert!((gs.mu - mu).abs() <= 1e-9 * mu);
        let chi = chi_instantaneous(&grid, &gs.phi0, &gs.phi0, gs.g0, 1.0, 0.0);
        let want = tf_chi(mu, 100, 1.0, 0.0);
        assert!(((chi - want) / want).abs() < 0.03, "mu {mu}: {chi} vs {want}");
        let g_tf = tf_g0(mu, 100);
        assert!((gs.g0 - g_tf).abs() / g_tf < 0.01);
    }
}

#[test]
fn large_mu_solution_matches_thomas_fermi() {
    let grid = Grid1D::for_mu(200.0).unwrap();
    let gs = solve_ground_state(tf_g0(200.0, 100), 100, &grid, 1e-12).unwrap();
    assert!((gs.mu - 200.0).abs() / 200.0 < 0.02);
    assert!(gs.residual <= 1e-8);
}

#[test]
fn breathing_component_conserves_energy() {
    let mu = 32.08;
    let grid = Grid1D::for_mu(mu).unwrap();
    let gs = calibrate_ground_state(mu, 100, &grid, 1e-9).unwrap();
    // the balanced component of a symmetric mixture feels half the mean field
    let c = Couplings {
        g_self_a: 49.0 * gs.g0,
        g_self_b: 49.0 * gs.g0,
        g_cross_a: 0.0,
        g_cross_b: 0.0,
    };
    let stepper = SplitStepper::new(&grid, 1e-3).unwrap();
    let (mut a, mut b) = (gs.phi0.clone(), gs.phi0.clone());
    let e0 = pair_energy(&grid, &a, &b, &c, (50.0, 50.0));
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        stepper.propagate(&mut a, &mut b, &c, 1000).unwrap();
        let e = pair_energy(&grid, &a, &b, &c, (50.0, 50.0));
        worst = worst.max(((e - e0) / e0).abs());
        assert!((grid.norm_sqr(&a) - 1.0).abs() < 1e-8);
    }
    assert!(worst < 1e-6, "relative energy drift {worst:e}");
}
