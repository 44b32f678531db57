mod common;

use common::{symmetric_cubic_roots, Lambda};
use proptest::prelude::*;
use stirap::model3::{
    adiabatic_spectrum, adiabatic_track, dark_state, pulse_envelopes, rwa_hamiltonian, DetuningParams, PulseParams,
    ThreeLevelDrive, C64,
};

fn drive(omega0_t: f64, tau: f64, kp: f64, ks: f64, delta: f64, delta_p: f64) -> ThreeLevelDrive {
    let p = PulseParams::reduced(omega0_t, tau).unwrap().with_kappas(kp, ks).unwrap();
    ThreeLevelDrive::new(p, DetuningParams::new(delta, delta_p))
}

#[test]
fn pulse_order_is_counterintuitive() {
    let p = PulseParams::reduced(20.0, 0.6).unwrap();
    let (wp_early, ws_early) = pulse_envelopes(-0.6, &p);
    assert_eq!(ws_early, 20.0);
    assert!(wp_early < ws_early);
    let (wp_late, ws_late) = pulse_envelopes(0.6, &p);
    assert_eq!(wp_late, 20.0);
    assert!(ws_late < wp_late);
    assert_eq!(p.t_start, -4.6);
    assert_eq!(p.t_end, 4.6);
}

#[test]
fn window_tails_are_negligible() {
    let p = PulseParams::reduced(20.0, 0.6).unwrap();
    let (wp, ws) = pulse_envelopes(p.t_start, &p);
    assert!((ws / p.omega0 - (-16.0f64).exp()).abs() < 1e-20);
    assert!(wp < ws);
}

#[test]
fn invalid_pulses_rejected() {
    assert!(PulseParams::reduced(0.0, 0.6).is_err());
    assert!(PulseParams::reduced(20.0, 0.6).unwrap().with_kappas(-1.0, 1.0).is_err());
    assert!(PulseParams::new(20.0, 0.0, 0.6).is_err());
    assert!(PulseParams::reduced(f64::NAN, 0.6).is_err());
    assert!(dark_state(0.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn hamiltonian_matches_oracle(
        o in 1.0f64..50.0, tau in -1.5f64..1.5, kp in 0.0f64..3.0, ks in 0.0f64..3.0,
        delta in -40.0f64..40.0, delta_p in -40.0f64..40.0, t in -6.0f64..6.0,
    ) {
        let d = drive(o, tau, kp, ks, delta, delta_p);
        let h = rwa_hamiltonian(t, &d);
        let reference = Lambda { omega0: o, width: 1.0, tau, kappa_p: kp, kappa_s: ks, delta, delta_p }.hamiltonian(t);
        prop_assert_eq!(h, h.adjoint());
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((h[(i, j)] - C64::new(reference[(i, j)], 0.0)).norm() <= 1e-12 * o.max(1.0));
            }
        }
    }

    #[test]
    fn spectrum_matches_characteristic_polynomial(
        o in 1.0f64..50.0, tau in -1.5f64..1.5, delta in -30.0f64..30.0, delta_p in -30.0f64..30.0, t in -3.0f64..3.0,
    ) {
        let d = drive(o, tau, 1.0, 1.0, delta, delta_p);
        let s = adiabatic_spectrum(t, &d);
        let reference = symmetric_cubic_roots(&Lambda { omega0: o, width: 1.0, tau, kappa_p: 1.0, kappa_s: 1.0, delta, delta_p }.hamiltonian(t));
        let scale = o + delta.abs() + delta_p.abs();
        for k in 0..3 {
            prop_assert!((s.values[k] - reference[k]).abs() <= 1e-9 * scale, "{:?} vs {:?}", s.values, reference);
        }
        let h = rwa_hamiltonian(t, &d);
        for k in 0..3 {
            let v = s.vectors[k].0;
            let residual = (h * v - v * C64::new(s.values[k], 0.0)).norm();
            prop_assert!(residual <= 1e-9 * scale);
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dark_state_is_null_at_two_photon_resonance(
        o in 1.0f64..50.0, tau in -1.5f64..1.5, delta_p in -30.0f64..30.0, t in -3.0f64..3.0,
    ) {
        let d = drive(o, tau, 1.0, 1.0, 0.0, delta_p);
        let p = d.pulses;
        let (wp, ws) = pulse_envelopes(t, &p);
        prop_assume!(wp.hypot(ws) > 1e-6);
        let dark = dark_state(wp, ws).unwrap();
        let hv = rwa_hamiltonian(t, &d) * dark.0;
        prop_assert!(hv.norm() <= 1e-12 * o);
        prop_assert!((dark.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tracked_branches_are_continuous(delta in -10.0f64..10.0, delta_p in -10.0f64..10.0) {
        prop_assume!(delta.abs() > 0.5 && delta_p.abs() > 0.5 && (delta - delta_p).abs() > 0.5);
        let d = drive(20.0, 0.6, 1.0, 1.0, delta, delta_p);
        let times: Vec<f64> = (0..=400).map(|i| -4.6 + 9.2 * i as f64 / 400.0).collect();
        let track = adiabatic_track(&d, &times);
        for w in track.windows(2) {
            for b in 0..3 {
                prop_assert!(w[0].vectors[b].overlap(&w[1].vectors[b]) > 0.5);
            }
        }
        let first = &track[0];
        prop_assert!((first.values[1] - delta).abs() < 1e-9);
        prop_assert!((first.values[2] - delta_p).abs() < 1e-9);
    }
}

#[test]
fn dark_state_follows_mixing_angle() {
    // early: Stokes dominates, dark state ~ |0>; late: pump dominates, ~ -|1>
    let p = PulseParams::reduced(20.0, 0.6).unwrap();
    let (wp, ws) = pulse_envelopes(-3.0, &p);
    assert!(dark_state(wp, ws).unwrap().populations()[0] > 0.999);
    let (wp, ws) = pulse_envelopes(3.0, &p);
    assert!(dark_state(wp, ws).unwrap().populations()[1] > 0.999);
}
