mod common;

use common::dense_cpb;
use proptest::prelude::*;
use stirap::cpb::{
    calibrated_pump_rabi, charge_element_expansion, cpb_spectrum, detuning_fluctuations, CpbModel, ExpansionOrder,
};
use stirap::Error;

fn level_energies(j: f64, qg: f64) -> Vec<f64> {
    cpb_spectrum(&CpbModel::new(j, qg), 3).unwrap().energies
}

proptest! {
    #[test]
    fn matches_dense_diagonalization(j in 0.3f64..3.0, qg in 0.02f64..0.98) {
        let s = cpb_spectrum(&CpbModel::new(j, qg), 3).unwrap();
        let (energies, n) = dense_cpb(j, qg, 10);
        for i in 0..3 {
            prop_assert!((s.energies[i] - energies[i]).abs() < 1e-10);
            for k in 0..3 {
                prop_assert!((s.n(i, k).abs() - n[i][k]).abs() < 1e-9, "n{}{}: {} vs {}", i, k, s.n(i, k), n[i][k]);
            }
        }
    }

    #[test]
    fn sensitivities_are_bias_derivatives(j in 0.5f64..2.5, qg in 0.05f64..0.95) {
        // Richardson-extrapolated five-point stencils
        let s = cpb_spectrum(&CpbModel::new(j, qg), 3).unwrap();
        let stencil = |h: f64| [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| level_energies(j, qg + k * h));
        let slope = |e: &[Vec<f64>; 5], h: f64, i: usize| (e[0][i] - 8.0 * e[1][i] + 8.0 * e[3][i] - e[4][i]) / (12.0 * h);
        let curv = |e: &[Vec<f64>; 5], h: f64, i: usize| {
            (-e[0][i] + 16.0 * e[1][i] - 30.0 * e[2][i] + 16.0 * e[3][i] - e[4][i]) / (12.0 * h * h)
        };
        let (h, e1, e2) = (2e-4, stencil(2e-4), stencil(4e-4));
        for i in 1..3 {
            let a = (16.0 * slope(&e1, h, i) - slope(&e2, 2.0 * h, i)) / 15.0;
            let b = (16.0 * curv(&e1, h, i) - curv(&e2, 2.0 * h, i)) / 15.0;
            prop_assert!((s.a[i] - a).abs() <= 1e-6 * a.abs().max(1e-2), "A{}: {} vs {}", i, s.a[i], a);
            prop_assert!((s.b[i] - b).abs() <= 1e-5 * b.abs().max(1e-1), "B{}: {} vs {}", i, s.b[i], b);
        }
        prop_assert_eq!(s.a[0], 0.0);
        prop_assert_eq!(s.b[0], 0.0);
    }

    #[test]
    fn default_truncation_converges(j in 0.0f64..5.0, qg in 0.0f64..1.0) {
        prop_assert!(cpb_spectrum(&CpbModel::new(j, qg), 3).is_ok());
    }

    #[test]
    fn mirror_symmetry_about_half_charge(j in 0.3f64..3.0, u in 0.0f64..0.45) {
        let a = cpb_spectrum(&CpbModel::new(j, 0.5 - u), 3).unwrap();
        let b = cpb_spectrum(&CpbModel::new(j, 0.5 + u), 3).unwrap();
        for i in 0..3 {
            prop_assert!((a.energies[i] - b.energies[i]).abs() < 1e-11);
            prop_assert!((a.a[i] + b.a[i]).abs() < 1e-9);
            prop_assert!((a.b[i] - b.b[i]).abs() < 1e-6 * (1.0 + a.b[i].abs()));
        }
    }

    #[test]
    fn parity_rule_at_symmetry_point(j in 0.2f64..3.0) {
        let s = cpb_spectrum(&CpbModel::new(j, 0.5), 3).unwrap();
        prop_assert!(s.n(0, 2).abs() <= 1e-10);
        prop_assert!(s.a[1].abs() <= 1e-8 && s.a[2].abs() <= 1e-8);
        prop_assert!(s.n(0, 1).abs() > 0.1);
    }
}

#[test]
fn working_point_against_large_basis_oracle() {
    let (j, qg, h) = (1.0, 0.48, 1e-5);
    let s = cpb_spectrum(&CpbModel::new(j, qg), 3).unwrap();
    let (e, n) = dense_cpb(j, qg, 20);
    let (lo, hi) = (dense_cpb(j, qg - h, 20).0, dense_cpb(j, qg + h, 20).0);
    for i in 1..3 {
        assert!((s.energies[i] - e[i]).abs() < 1e-10);
        let a = (hi[i] - lo[i]) / (2.0 * h);
        let b = (hi[i] - 2.0 * e[i] + lo[i]) / (h * h);
        assert!((s.a[i] - a).abs() <= 1e-6 * a.abs(), "A{i}: {} vs {a}", s.a[i]);
        assert!((s.b[i] - b).abs() <= 1e-3 * b.abs(), "B{i}: {} vs {b}", s.b[i]);
    }
    for (i, k) in [(0, 1), (0, 2), (1, 2)] {
        assert!((s.n(i, k).abs() - n[i][k]).abs() < 1e-10);
    }
}

#[test]
fn reference_values_at_working_point() {
    let s = cpb_spectrum(&CpbModel::new(1.0, 0.48), 3).unwrap();
    assert!((s.energies[1] - 0.94341).abs() < 1e-5);
    assert!((s.energies[2] - 2.59746).abs() < 1e-5);
    assert!((s.n(0, 2).abs() - 0.074562).abs() < 1e-6);
    let ratio = s.a[2] / s.a[1];
    assert!((ratio + 27.04).abs() < 0.01, "{ratio}");
    // opposite signs: charge noise anticorrelates delta and delta_p
    let (d, dp) = detuning_fluctuations(&s, 1e-3, ExpansionOrder::Linear);
    assert!(d * dp < 0.0);
}

#[test]
fn calibration_uses_symmetry_point_reference() {
    let m = CpbModel::new(1.0, 0.48);
    let s = cpb_spectrum(&m, 3).unwrap();
    let sweet = cpb_spectrum(&m.at_gate_charge(0.5), 3).unwrap();
    let omega = calibrated_pump_rabi(&m, 0.05).unwrap();
    assert!((omega - 0.05 * s.n(0, 2).abs() / sweet.n(0, 1).abs()).abs() < 1e-15);
}

#[test]
fn element_expansion_matches_neighbouring_bias() {
    let m = CpbModel::new(1.0, 0.46);
    let e = charge_element_expansion(&m, 1, 2, 1e-4).unwrap();
    let next = cpb_spectrum(&m.at_gate_charge(0.4605), 3).unwrap().n(1, 2);
    let (linear, quadratic) = (e.at(5e-4, ExpansionOrder::Linear), e.at(5e-4, ExpansionOrder::Quadratic));
    assert!((quadratic - next).abs() < 1e-7);
    assert!((quadratic - next).abs() < 0.05 * (linear - next).abs());
}

#[test]
fn truncation_and_level_limits() {
    assert!(matches!(cpb_spectrum(&CpbModel::new(200.0, 0.3).with_n_max(3), 3), Err(Error::Truncation(_))));
    assert!(cpb_spectrum(&CpbModel::new(1.0, 0.3).with_n_max(3), 6).is_err());
    assert!(cpb_spectrum(&CpbModel::new(-1.0, 0.3), 3).is_err());
    assert!(cpb_spectrum(&CpbModel::new(1.0, 0.3).with_n_max(2), 3).is_err());
}
