mod common;

use std::f64::consts::PI;

use common::{joint_half_phase_fit, rel_diff};
use larmor_core::phase::{wrap, wrapped_difference};
use larmor_core::units::{beam_from_energy, beam_from_velocity, beam_from_wavenumber};
use larmor_core::{
    channel_wavenumbers, detection_probability_modified, detection_probability_standard,
    high_energy_limit_phases, modified_spinor, scatter_channel, standard_phase,
    transmission_amplitude, transmission_re_im_closed_form, ChannelKind, Evanescence, FieldRegion,
    Normalization, ParticleSpec, CALIBRATED_WIDTH_M,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn neutron() -> ParticleSpec {
    ParticleSpec::neutron()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn kinematic_round_trip(v in log_uniform(1e-2, 1e4)) {
        let p = neutron();
        let b = beam_from_velocity(&p, v).unwrap();
        let back = beam_from_wavenumber(&p, beam_from_energy(&p, b.kinetic_energy).unwrap().wavenumber)
            .unwrap();
        prop_assert!((back.velocity - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn channel_wavenumbers_split_symmetrically(v in log_uniform(1.0, 1e4), b in log_uniform(1e-4, 5.0)) {
        let p = neutron();
        let beam = beam_from_velocity(&p, v).unwrap();
        prop_assume!(beam.kinetic_energy > p.zeeman_energy(b));
        let wn = channel_wavenumbers(&beam, &p, b, Evanescence::Reject).unwrap();
        let (k, k1, k2) = wn.triple().unwrap();
        let q2 = p.coupling_sq(b);
        let tol = 8.0 * f64::EPSILON * k2 * k2;
        prop_assert!((k2 * k2 - k * k - q2).abs() <= tol);
        prop_assert!((k * k - k1 * k1 - q2).abs() <= tol);
        prop_assert!(k1 < k && k < k2);
    }

    #[test]
    fn field_separates_channels_monotonically(v in log_uniform(5.0, 1e4), b in log_uniform(1e-4, 2.0)) {
        let p = neutron();
        let beam = beam_from_velocity(&p, v).unwrap();
        prop_assume!(beam.kinetic_energy > p.zeeman_energy(1.5 * b));
        let lo = channel_wavenumbers(&beam, &p, b, Evanescence::Reject).unwrap();
        let hi = channel_wavenumbers(&beam, &p, 1.5 * b, Evanescence::Reject).unwrap();
        prop_assert!(hi.barrier_shift.re < lo.barrier_shift.re);
        prop_assert!(hi.well_shift > lo.well_shift);
    }

    #[test]
    fn channels_conserve_flux(
        v in log_uniform(1.0, 1e4),
        b in log_uniform(1e-4, 5.0),
        a in log_uniform(1e-6, 1e-2),
    ) {
        let p = neutron();
        let beam = beam_from_velocity(&p, v).unwrap();
        prop_assume!(beam.kinetic_energy > p.zeeman_energy(b));
        let field = FieldRegion::new(b, a).unwrap();
        for kind in [ChannelKind::Well, ChannelKind::Barrier] {
            let ch = scatter_channel(&beam, &p, &field, kind, Evanescence::Reject).unwrap();
            prop_assert!(ch.flux_defect().abs() <= 1e-12);
            prop_assert!(ch.t.norm() <= 1.0 + 1e-15 && ch.r.norm() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn closed_form_agrees_with_complex_evaluation(
        v in log_uniform(1.0, 1e4),
        b in log_uniform(1e-4, 5.0),
        a in log_uniform(1e-6, 1e-2),
    ) {
        let p = neutron();
        let beam = beam_from_velocity(&p, v).unwrap();
        prop_assume!(beam.kinetic_energy > p.zeeman_energy(b));
        let (k, k1, k2) = channel_wavenumbers(&beam, &p, b, Evanescence::Reject)
            .unwrap()
            .triple()
            .unwrap();
        for kc in [k1, k2] {
            let t = transmission_amplitude(k, kc, a).unwrap();
            prop_assume!(t.norm() > 1e-6);
            let (re, im) = transmission_re_im_closed_form(k, kc, a).unwrap();
            prop_assert!(rel_diff(t, Complex64::new(re, im)) <= 1e-10);
        }
    }

    #[test]
    fn modified_probabilities_are_bounded(
        v in log_uniform(3.0, 1e4),
        b in log_uniform(1e-4, 5.0),
        theta in -PI..PI,
    ) {
        let p = neutron();
        let beam = beam_from_velocity(&p, v).unwrap();
        prop_assume!(beam.kinetic_energy > p.zeeman_energy(b));
        let field = FieldRegion::new(b, CALIBRATED_WIDTH_M).unwrap();
        let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
        prop_assert!(s.transmitted_weight > 0.0 && s.transmitted_weight <= 1.0 + 1e-15);
        let raw = |t| detection_probability_modified(&s, t, Normalization::Raw).unwrap();
        let norm = |t| detection_probability_modified(&s, t, Normalization::Normalized).unwrap();
        prop_assert!((0.0..=1.0).contains(&raw(theta)));
        prop_assert!((raw(theta) + raw(theta + PI) - s.transmitted_weight).abs() < 1e-14);
        prop_assert!((norm(theta) + norm(theta + PI) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn evanescent_threshold_is_continuous() {
    let p = neutron();
    let b = 1.0;
    let a = 1e-6;
    let threshold = p.zeeman_energy(b);
    let field = FieldRegion::new(b, a).unwrap();
    let t2 = |e: f64| {
        let beam = beam_from_energy(&p, e).unwrap();
        scatter_channel(
            &beam,
            &p,
            &field,
            ChannelKind::Barrier,
            Evanescence::Continue,
        )
        .unwrap()
        .transmission()
    };
    for rel in [1e-9, 1e-11, 1e-13] {
        let above = t2(threshold * (1.0 + rel));
        let below = t2(threshold * (1.0 - rel));
        assert!((above - below).abs() < 1e-6, "{rel}: {above} {below}");
    }
    // exactly at threshold: |t|² = 1/(1 + (ka/2)²)
    let beam = beam_from_energy(&p, threshold).unwrap();
    let at = scatter_channel(
        &beam,
        &p,
        &field,
        ChannelKind::Barrier,
        Evanescence::Continue,
    )
    .unwrap()
    .transmission();
    let ka = beam.wavenumber * a;
    assert!((at - 1.0 / (1.0 + 0.25 * ka * ka)).abs() < 1e-9, "{at}");
}

#[test]
fn calibrated_width_matches_joint_fit_oracle() {
    let p = neutron();
    // φ(B=0.001, v=10) = φ(B=2, v=2000) / 10
    let x = joint_half_phase_fit(0.40725, 0.1, 0.949661, 8);
    let width = x * p.hbar * 2000.0 / (p.mu() * 2.0);
    assert!(
        (width - CALIBRATED_WIDTH_M).abs() / width < 1e-12,
        "{width:e}"
    );
    assert!((width - 2.47e-5).abs() < 1e-8);
}

#[test]
fn high_energy_spinor_is_standard_rotation() {
    let p = neutron();
    let beam = beam_from_velocity(&p, 2000.0).unwrap();
    let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
    let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
    assert!((s.amp_up - 1.0).abs() < 1e-4 && (s.amp_down - 1.0).abs() < 1e-4);
    let phi = standard_phase(&p, &field, &beam).phi;
    // the exact spinor's relative phase is +φ
    assert!(wrapped_difference(s.relative_phase(), phi).abs() < 1e-4);
}

#[test]
fn low_energy_spinor_fixture() {
    let p = neutron();
    let beam = beam_from_velocity(&p, 10.0).unwrap();
    let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
    let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
    // frozen from an independent numpy evaluation and the transfer matrix
    assert!((s.amp_up - 0.998_042_441_736).abs() < 1e-9, "{}", s.amp_up);
    assert!(
        (s.amp_down - 0.998_827_575_329).abs() < 1e-9,
        "{}",
        s.amp_down
    );
    assert!((s.phase_up - 1.855_983_836).abs() < 1e-6, "{}", s.phase_up);
    assert!(
        (s.phase_down - 1.586_995_037).abs() < 1e-6,
        "{}",
        s.phase_down
    );
    assert!((s.amp_up - s.amp_down).abs() > 5e-4);
}

#[test]
fn limit_phases() {
    let p = neutron();
    let beam = beam_from_velocity(&p, 500.0).unwrap();
    let wn = channel_wavenumbers(&beam, &p, 0.0, Evanescence::Reject).unwrap();
    assert_eq!(high_energy_limit_phases(&wn, 1e-4).unwrap(), (0.0, 0.0));

    // first order: (k₁ − k)a → −ωτ with relative error O(μB/E)
    for v in [200.0, 2000.0, 20000.0] {
        let beam = beam_from_velocity(&p, v).unwrap();
        let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
        let wn = channel_wavenumbers(&beam, &p, 2.0, Evanescence::Reject).unwrap();
        let (up, down) = high_energy_limit_phases(&wn, field.width).unwrap();
        let std = standard_phase(&p, &field, &beam);
        let omega_tau = std.omega * std.tau;
        let ratio = beam.regime_ratio(&p, 2.0);
        assert!((down + omega_tau).abs() / omega_tau <= ratio);
        assert!((up - omega_tau).abs() / omega_tau <= ratio);
    }

    let beam = beam_from_velocity(&p, 2000.0).unwrap();
    let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
    let wn = channel_wavenumbers(&beam, &p, 2.0, Evanescence::Reject).unwrap();
    let (_, down) = high_energy_limit_phases(&wn, field.width).unwrap();
    let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
    assert!(wrapped_difference(wrap(s.phase_down), wrap(down)).abs() < 1e-3);
}

#[test]
fn departure_shrinks_with_velocity() {
    let p = neutron();
    let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
    let dp: Vec<f64> = [10.0, 50.0, 200.0, 2000.0]
        .iter()
        .map(|&v| {
            let beam = beam_from_velocity(&p, v).unwrap();
            let phi = standard_phase(&p, &field, &beam).phi;
            let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
            let m = detection_probability_modified(&s, 0.0, Normalization::Raw).unwrap();
            (m - detection_probability_standard(phi, 0.0)).abs()
        })
        .collect();
    let non_monotone = dp.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(non_monotone <= 1, "{dp:?}");
    assert!(dp[3] < 1e-4 && 1e-4 < dp[0], "{dp:?}");
}
