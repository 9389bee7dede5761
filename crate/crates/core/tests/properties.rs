use std::f64::consts::PI;

use cavity_casimir::fictitious::{total_reflection_delay, InterfaceScattering};
use cavity_casimir::lifshitz::{casimir_pressure, free_energy, PlanarCavity, QuadratureSpec};
use cavity_casimir::modes::{count_modes_argument_principle, find_modes, CavityConfig, DelayedMirror, ModeWindow, Wall};
use cavity_casimir::{MirrorModel, PermittivityModel, Polarization, Sector, UnitSystem};
use num_complex::Complex64;
use proptest::prelude::*;

fn passive_propagating() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, -PI..PI).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

fn passive_evanescent() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, 0.0..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn propagating_interfaces_are_unitary(r in passive_propagating(), kv in 0.05..20.0f64, kd in 0.05..20.0f64, phase in -PI..PI) {
        let s = InterfaceScattering::propagating_with_phase(r, kv, kd, phase).unwrap();
        prop_assert!(s.unitarity_defect().unwrap() < 1e-12);
        let (rv, rd, tv, td) = s.reflectance_transmittance();
        prop_assert!((rv - rd).abs() < 1e-12 && (tv - td).abs() < 1e-12 && (rv + tv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evanescent_interfaces_conserve_flux(r in passive_evanescent(), kappa in 0.05..20.0f64, kd in 0.05..20.0f64,
                                           iv in (-1.0..1.0f64, -1.0..1.0f64), id in (-1.0..1.0f64, -1.0..1.0f64)) {
        let s = InterfaceScattering::evanescent(r, kappa, kd).unwrap();
        let (iv, id) = (Complex64::new(iv.0, iv.1), Complex64::new(id.0, id.1));
        let scale = kappa * iv.norm_sqr() * (1.0 + r.norm_sqr()) + kd * id.norm_sqr() + 1e-300;
        prop_assert!(s.flux_imbalance(iv, id).abs() / scale < 1e-12);
        prop_assert!(s.s_matrix().is_none());
    }

    #[test]
    fn delay_form_is_lossless(r in passive_propagating(), phase in -50.0..50.0f64) {
        let rt = total_reflection_delay(r, phase, Sector::Propagating).unwrap();
        prop_assert!((rt.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gain_is_refused(m in 1.001..3.0f64, a in -PI..PI) {
        let r = Complex64::from_polar(m, a);
        prop_assert!(InterfaceScattering::propagating(r, 1.0, 1.0).is_err());
        prop_assert!(InterfaceScattering::evanescent(Complex64::new(0.2, -m), 1.0, 1.0).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn root_finder_matches_contour_count(m1 in 0.05..0.95f64, a1 in -PI..PI, m2 in 0.05..0.95f64, a2 in -PI..PI,
                                         t1 in 50.0..400.0f64, t2 in 50.0..400.0f64, q in 0.0..0.9f64) {
        let wall = |m: f64, a: f64, t: f64| DelayedMirror::new(Wall::Constant(Complex64::from_polar(m, a)), t).unwrap();
        let cav = CavityConfig::new(wall(m1, a1, t1), wall(m2, a2, t2), 1.0, UnitSystem::Natural { gap: 1.0 }).unwrap();
        let window = ModeWindow::new(1.0, 0.05).unwrap();
        let roots = find_modes(&cav, q, Polarization::S, window).unwrap();
        let count = count_modes_argument_principle(&cav, q, Polarization::S, window).unwrap();
        prop_assert_eq!(roots.len(), count);
        prop_assert!(roots.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(roots.iter().all(|&w| w >= window.lo() && w < window.hi()));
    }

    #[test]
    fn attraction_weakens_with_distance(l in 1e-7..1e-5f64, t in prop::sample::select(vec![0.0, 77.0, 300.0])) {
        let wall = MirrorModel::HalfSpace(PermittivityModel::drude(1.37e16, 5.3e13).unwrap());
        let near = PlanarCavity::new(wall.clone(), wall.clone(), l).unwrap();
        let far = near.with_gap(1.5 * l).unwrap();
        let quad = QuadratureSpec::with_rel_tol(1e-6).unwrap();
        let (pn, pf) = (casimir_pressure(&near, t, &quad).unwrap().value, casimir_pressure(&far, t, &quad).unwrap().value);
        prop_assert!(pn < pf && pf < 0.0);
        prop_assert!(free_energy(&near, t, &quad).unwrap().value < 0.0);
    }
}
