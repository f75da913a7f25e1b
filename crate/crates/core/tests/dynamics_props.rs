use gallery_core::dynamics::*;
use gallery_core::grid::graded_s_grid;
use gallery_core::quad::adaptive;
use gallery_core::spectral::{natural_cut_evaluator, ModeSpec, ProfileEvaluator};
use gallery_core::synthesis::{LpCutoff, TangentialGrid, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn leapfrog_reproduces_separated_modes() {
    for kappa in [0.5, 1.0, 2.0] {
        for n in 0..=5u32 {
            let ev = ProfileEvaluator::new(ModeSpec::quantized(kappa, n).unwrap()).unwrap();
            let s_max = (ev.spec.mu / kappa + 30.0).max(40.0);
            let (err, run) = separated_solution_error(&ev, 0.8, s_max, 16).unwrap();
            assert!(err <= 1e-4, "kappa={kappa} n={n}: {err:e}");
            assert!(run.max_energy_drift <= 1e-6);
        }
    }
}

#[test]
fn leapfrog_energy_over_ten_periods() {
    let ev = ProfileEvaluator::new(ModeSpec::quantized(0.5, 2).unwrap()).unwrap();
    let o = RadialOracle::for_profile(&ev, 2.0, 40.0).unwrap();
    let b = o.sample(&ev).unwrap();
    let w = (ev.spec.mu * 2.0).sqrt();
    let vel: Vec<f64> = b.iter().map(|v| w * v).collect();
    let run = o.evolve(&b, &vel, 10.0 * 2.0 * PI / w, None).unwrap();
    assert!(run.max_energy_drift <= 1e-6, "{:e}", run.max_energy_drift);
    // the staggered energy tracks the continuous one to discretization order
    let e_cont = o.energy(&b, &vel);
    assert!((run.energy_start - e_cont).abs() <= 1e-3 * e_cont);
}

#[test]
fn leapfrog_packet_profile_cut_domains() {
    for (j, eta) in [(2, 0.93), (3, 1.04), (4, 1.07)] {
        let xi = 4f64.powi(j) * eta;
        let mu = 4f64.powi(j) / xi;
        let ev = natural_cut_evaluator(ModeSpec::with_mu(0.5, mu).unwrap(), 40.0).unwrap();
        assert!(ev.cut.is_some());
        let (err, _) = separated_solution_error(&ev, xi, 40.0, 16).unwrap();
        assert!(err <= 1e-4, "j={j}: {err:e}");
    }
}

#[test]
fn halfwave_gallery_wave_solves_the_pde() {
    let g = TangentialGrid::new(2, 2.0 * PI, 16).unwrap();
    let xd = graded_s_grid(20.0).unwrap();
    let mut hat = vec![C64::new(0.0, 0.0); 16];
    hat[1] = C64::new(1.0, 0.0);
    hat[2] = C64::new(0.3, -0.2);
    hat[15] = C64::new(0.0, 0.5);
    for mu in [2.0, 1.7] {
        let s = HalfWaveState::half_wave(mu, g, hat.clone()).unwrap();
        let later = halfwave_evolve(&s, 0.37);
        let r = reduction_residual(&later, 0.5, &xd).unwrap();
        assert!(r <= 1e-5, "mu={mu}: {r:e}");
    }
}

#[test]
fn zero_z_matches_polar_reduction() {
    let c = LpCutoff::default();
    for lam in [50.0, 500.0] {
        let g = g_scale(0, 1.0);
        let re = adaptive(&|r: f64| 2.0 * PI * r * c.multiplier(r) * (lam * g * r.sqrt()).cos(), 0.625, 1.75, 1e-12, 1e-14).0;
        let im = adaptive(&|r: f64| -2.0 * PI * r * c.multiplier(r) * (lam * g * r.sqrt()).sin(), 0.625, 1.75, 1e-12, 1e-14).0;
        let j = oscillatory_j(&[0.0, 0.0], 0, lam, 1.0, &c).unwrap();
        assert!((j - C64::new(re, im)).norm() <= 1e-8 * (1.0 + j.norm()), "{j} vs {re} {im}");
    }
}

#[test]
fn stationary_phase_leading_term() {
    let c = LpCutoff::default();
    for d in [2usize, 3] {
        for lam in [300.0, 1000.0] {
            for eta in SUP_RADII {
                let mut z = vec![0.0; d - 1];
                z[0] = z_for_radius(eta, 0, 1.0);
                let j = oscillatory_j(&z, 0, lam, 1.0, &c).unwrap();
                let p = stationary_phase_prediction(&z, 0, lam, 1.0, &c).unwrap();
                let ratio = j.norm() / p.norm();
                assert!((ratio - 1.0).abs() <= 0.1, "d={d} lam={lam} eta={eta}: {ratio}");
            }
        }
    }
}

#[test]
fn decay_slopes() {
    let c = LpCutoff::default();
    let (f2, _) = dispersive_decay_fit(2, 0, &log_spaced(100.0, 1e4, 8), 1.0, &c, 0.05).unwrap();
    assert!(f2.pass, "d=2 slope {}", f2.slope);
    let (f3, _) = dispersive_decay_fit(3, 0, &log_spaced(100.0, 800.0, 6), 1.0, &c, 0.05).unwrap();
    assert!(f3.pass, "d=3 slope {}", f3.slope);
}

#[test]
fn prefactor_scales_with_j_at_fixed_time() {
    let c = LpCutoff::default();
    let t = 100.0;
    for (d, jmax) in [(2usize, 4), (3, 3)] {
        let base = sup_abs_j(d, 0, t, 1.0, &c).unwrap().value().norm();
        for j in 1..=jmax {
            let v = sup_abs_j(d, j, t * 4f64.powi(j), 1.0, &c).unwrap().value().norm();
            let ratio = v / (base * 2f64.powf(-(j as f64) * (d - 1) as f64 / 2.0));
            assert!((ratio - 1.0).abs() <= 0.1, "d={d} j={j}: {ratio}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halfwave_is_unitary(seed in proptest::collection::vec(-1.0f64..1.0, 32), mu in 0.1f64..10.0, t in -50.0f64..50.0) {
        let g = TangentialGrid::new(2, 5.0, 16).unwrap();
        let hat: Vec<C64> = seed.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        let s = HalfWaveState::half_wave(mu, g, hat).unwrap();
        let o = halfwave_evolve(&s, t);
        prop_assert!((o.l2_sq() - s.l2_sq()).abs() <= 1e-12 * s.l2_sq().max(1e-300));
        prop_assert!((o.energy() - s.energy()).abs() <= 1e-12 * s.energy().max(1e-300));
    }
}
