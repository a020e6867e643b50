//! Spin rotation: the spin-only Larmor baseline, the exact transmitted
//! spinor, analyzer probabilities and rotator-width calibration.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::phase::wrap;
use crate::scattering::{channel_amplitudes, ChannelAmplitudes, ChannelKind, FieldRegion};
use crate::units::{channel_wavenumbers, Beam, ChannelWavenumbers, Evanescence, ParticleSpec};

/// Default rotator width in metres.
///
/// Obtained by inverting the standard rotation against two neutron anchors,
/// `cos²(φ/2) = 0.40725` at 2 T, 2000 m/s and `0.949661` at 1 mT, 10 m/s
/// (the second anchor has one tenth of the phase). The physical width behind
/// those anchors was never published, so this is an inferred value.
pub const CALIBRATED_WIDTH_M: f64 = 2.469_783_456_159_988e-5;

/// Spin-only Larmor rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardPrecession {
    /// Larmor frequency `μB/ħ`, rad/s
    pub omega: f64,
    /// Transit time `a/v`, s
    pub tau: f64,
    /// Rotation angle `2ωτ`, rad, not reduced mod 2π
    pub phi: f64,
}

pub fn standard_phase(
    particle: &ParticleSpec,
    field: &FieldRegion,
    beam: &Beam,
) -> StandardPrecession {
    let omega = particle.zeeman_energy(field.b_tesla) / particle.hbar;
    let tau = field.width / beam.velocity;
    StandardPrecession {
        omega,
        tau,
        phi: 2.0 * omega * tau,
    }
}

/// Post-selected transmitted spin state `(a e^{iφ₁}, b e^{iφ₂})/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmittedSpinor {
    /// `a = |t_well|`
    pub amp_up: f64,
    /// `b = |t_barrier|`
    pub amp_down: f64,
    /// `φ₁ = arg t_well` in (−π, π]
    pub phase_up: f64,
    /// `φ₂ = arg t_barrier` in (−π, π]
    pub phase_down: f64,
    /// `(a² + b²)/2`, the transmitted fraction of an unpolarized-in-z beam
    pub transmitted_weight: f64,
}

impl TransmittedSpinor {
    pub fn from_channels(well: &ChannelAmplitudes, barrier: &ChannelAmplitudes) -> Self {
        let amp_up = well.t.norm();
        let amp_down = barrier.t.norm();
        Self {
            amp_up,
            amp_down,
            phase_up: wrap(well.t.arg()),
            phase_down: wrap(barrier.t.arg()),
            transmitted_weight: 0.5 * (amp_up * amp_up + amp_down * amp_down),
        }
    }

    /// `φ₁ − φ₂` wrapped to (−π, π].
    pub fn relative_phase(&self) -> f64 {
        wrap(self.phase_up - self.phase_down)
    }
}

/// Stern-Gerlach analyzer direction in the x-y plane, measured from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerSetting {
    theta: f64,
}

impl AnalyzerSetting {
    pub fn new(theta: f64) -> Result<Self> {
        require_finite("theta", theta)?;
        Ok(Self { theta: wrap(theta) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Projection of the transmitted spinor as is.
    #[default]
    Raw,
    /// Conditioned on transmission: divided by the transmitted weight.
    Normalized,
}

/// Exact transmitted spinor from both scattering channels.
pub fn modified_spinor(
    particle: &ParticleSpec,
    field: &FieldRegion,
    beam: &Beam,
    evanescence: Evanescence,
) -> Result<TransmittedSpinor> {
    let wn = channel_wavenumbers(beam, particle, field.b_tesla, evanescence)?;
    let well = channel_amplitudes(&wn, ChannelKind::Well, field.width)?;
    let barrier = channel_amplitudes(&wn, ChannelKind::Barrier, field.width)?;
    Ok(TransmittedSpinor::from_channels(&well, &barrier))
}

/// Probability of passing an analyzer at `theta` after a spin-only rotation
/// by `phi`: `cos²((θ − φ)/2)`.
///
/// This follows the convention `χ(φ) = (|↑⟩ + e^{iφ}|↓⟩)/√2`. The exact
/// spinor rotates the other way (`φ₁ − φ₂ → +φ`), so away from `θ = 0` the
/// two treatments agree under `θ → −θ`.
pub fn detection_probability_standard(phi: f64, theta: f64) -> f64 {
    let half = 0.5 * (theta - phi);
    let c = half.cos();
    c * c
}

/// Probability of passing an analyzer at `theta` for the exact transmitted
/// spinor: `¼(a² + b² + 2ab·cos(φ₁ − φ₂ + θ))`, optionally divided by the
/// transmitted weight `(a² + b²)/2`.
pub fn detection_probability_modified(
    spinor: &TransmittedSpinor,
    theta: f64,
    normalization: Normalization,
) -> Result<f64> {
    let a = spinor.amp_up;
    let b = spinor.amp_down;
    let raw =
        0.25 * (a * a + b * b + 2.0 * a * b * (spinor.phase_up - spinor.phase_down + theta).cos());
    match normalization {
        Normalization::Raw => Ok(raw.max(0.0)),
        Normalization::Normalized => {
            if spinor.transmitted_weight == 0.0 {
                return Err(Error::DegenerateSpinor);
            }
            Ok((raw / spinor.transmitted_weight).clamp(0.0, 1.0))
        }
    }
}

/// Limit phases `((k₂ − k)a, (k₁ − k)a)` that the exact spinor phases approach
/// when `μB ≪ E`. Not wrapped.
pub fn high_energy_limit_phases(
    wavenumbers: &ChannelWavenumbers,
    width: f64,
) -> Result<(f64, f64)> {
    require_positive("width", width)?;
    if wavenumbers.barrier_shift.im != 0.0 {
        return Err(Error::domain(
            "B",
            "no high-energy limit for an evanescent barrier channel",
        ));
    }
    Ok((
        wavenumbers.well_shift * width,
        wavenumbers.barrier_shift.re * width,
    ))
}

/// Rotator width `a` at which the standard formula gives `target_p` for an
/// analyzer at `theta`.
///
/// `cos²((θ − φ)/2) = p` has the solutions `φ = θ ± 2·acos(√p) + 2πn`; the
/// positive ones are sorted ascending and `branch` picks among them
/// (0 = smallest). `a = 0` is never returned.
pub fn calibrate_width(
    particle: &ParticleSpec,
    b_tesla: f64,
    v: f64,
    theta: f64,
    target_p: f64,
    branch: usize,
) -> Result<f64> {
    let phi = calibration_phases(b_tesla, v, theta, target_p, branch + 1)?[branch];
    Ok(width_for_phase(particle, b_tesla, v, phi))
}

/// Width giving a standard rotation `phi` at field `b_tesla`, speed `v`.
pub fn width_for_phase(particle: &ParticleSpec, b_tesla: f64, v: f64, phi: f64) -> f64 {
    phi * particle.hbar * v / (2.0 * particle.zeeman_energy(b_tesla))
}

/// The `count` smallest positive rotation angles reproducing `target_p`.
fn calibration_phases(
    b_tesla: f64,
    v: f64,
    theta: f64,
    target_p: f64,
    count: usize,
) -> Result<Vec<f64>> {
    require_positive("B", b_tesla)?;
    require_positive("v", v)?;
    require_finite("theta", theta)?;
    if !(0.0..=1.0).contains(&target_p) {
        return Err(Error::domain(
            "target_p",
            format!("{target_p} is not a probability"),
        ));
    }
    let alpha = target_p.sqrt().acos();
    let theta = wrap(theta);
    // θ ∈ (−π, π], α ∈ [0, π/2]: n ≥ 0 covers every positive root, and each
    // extra n adds two roots.
    let mut roots = Vec::with_capacity(2 * count + 4);
    for n in 0..=(count + 2) {
        let base = theta + TAU * n as f64;
        for phi in [base - 2.0 * alpha, base + 2.0 * alpha] {
            if phi > 1e-12 {
                roots.push(phi);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(PI));
    roots.truncate(count);
    debug_assert_eq!(roots.len(), count);
    Ok(roots)
}

/// A `(B, v, p)` reference point for width calibration at a common analyzer
/// angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationAnchor {
    pub b_tesla: f64,
    pub velocity: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointCalibration {
    pub width: f64,
    pub branch: usize,
    /// Largest `|p_std − p|` over the check anchors.
    pub residual: f64,
}

/// Picks the branch of the `primary` inversion whose width best reproduces
/// every `checks` anchor (max-abs residual), scanning branches
/// `0..=max_branch`. Ties go to the smaller branch.
pub fn calibrate_width_joint(
    particle: &ParticleSpec,
    primary: CalibrationAnchor,
    checks: &[CalibrationAnchor],
    theta: f64,
    max_branch: usize,
) -> Result<JointCalibration> {
    for c in checks {
        require_non_negative("B", c.b_tesla)?;
        require_positive("v", c.velocity)?;
    }
    let phases = calibration_phases(
        primary.b_tesla,
        primary.velocity,
        theta,
        primary.probability,
        max_branch + 1,
    )?;
    let mut best: Option<JointCalibration> = None;
    for (branch, phi) in phases.into_iter().enumerate() {
        let width = width_for_phase(particle, primary.b_tesla, primary.velocity, phi);
        let residual = checks
            .iter()
            .map(|c| {
                let phi_c =
                    2.0 * particle.zeeman_energy(c.b_tesla) * width / (particle.hbar * c.velocity);
                (detection_probability_standard(phi_c, theta) - c.probability).abs()
            })
            .fold(0.0, f64::max);
        if best.is_none_or(|b| residual < b.residual) {
            best = Some(JointCalibration {
                width,
                branch,
                residual,
            });
        }
    }
    best.ok_or_else(|| Error::Invariant("no calibration branch evaluated".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::beam_from_velocity;

    fn neutron() -> ParticleSpec {
        ParticleSpec::neutron()
    }

    #[test]
    fn zero_field_has_no_rotation() {
        let p = neutron();
        let beam = beam_from_velocity(&p, 10.0).unwrap();
        let field = FieldRegion::new(0.0, CALIBRATED_WIDTH_M).unwrap();
        assert_eq!(standard_phase(&p, &field, &beam).phi, 0.0);
        let s = modified_spinor(&p, &field, &beam, Evanescence::Reject).unwrap();
        assert!((s.amp_up - 1.0).abs() < 1e-15 && (s.amp_down - 1.0).abs() < 1e-15);
        assert!(s.phase_up.abs() < 1e-15 && s.phase_down.abs() < 1e-15);
        assert!((s.transmitted_weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn standard_phase_is_linear_in_width() {
        let p = neutron();
        let beam = beam_from_velocity(&p, 321.0).unwrap();
        let one = standard_phase(&p, &FieldRegion::new(0.7, 1e-4).unwrap(), &beam);
        let two = standard_phase(&p, &FieldRegion::new(0.7, 2e-4).unwrap(), &beam);
        assert!((two.phi - 2.0 * one.phi).abs() <= 1e-15 * two.phi);
        assert_eq!(one.phi, 2.0 * one.omega * one.tau);
    }

    #[test]
    fn standard_table_anchor_at_two_tesla() {
        let p = neutron();
        let beam = beam_from_velocity(&p, 2000.0).unwrap();
        let field = FieldRegion::new(2.0, CALIBRATED_WIDTH_M).unwrap();
        let phi = standard_phase(&p, &field, &beam).phi;
        let prob = detection_probability_standard(phi, 0.0);
        assert!((prob - 0.40725).abs() < 5e-4, "{prob}");
    }

    #[test]
    fn standard_probability_identities() {
        for phi in [-2.0, 0.0, 0.3, 7.1] {
            assert!((detection_probability_standard(phi, phi) - 1.0).abs() < 1e-15);
            assert!(detection_probability_standard(phi, phi + PI) < 1e-30);
        }
    }

    #[test]
    fn ultracold_table_anchor() {
        let p = neutron();
        let beam = beam_from_velocity(&p, 10.0).unwrap();
        let field = FieldRegion::new(0.001, CALIBRATED_WIDTH_M).unwrap();
        let phi = standard_phase(&p, &field, &beam).phi;
        let prob = detection_probability_standard(phi, 0.0);
        assert!((prob - 0.949661).abs() < 1e-3, "{prob}");
    }

    #[test]
    fn reduction_to_standard_formula() {
        let phi = 1.234;
        let spinor = TransmittedSpinor {
            amp_up: 1.0,
            amp_down: 1.0,
            phase_up: -phi / 2.0,
            phase_down: phi / 2.0,
            transmitted_weight: 1.0,
        };
        for i in 0..100 {
            let theta = -PI + TAU * i as f64 / 100.0;
            let m = detection_probability_modified(&spinor, theta, Normalization::Raw).unwrap();
            let s = detection_probability_standard(phi, theta);
            assert!((m - s).abs() < 1e-14);
        }
    }

    #[test]
    fn normalized_probability_is_complementary() {
        let spinor = TransmittedSpinor {
            amp_up: 0.9,
            amp_down: 0.6,
            phase_up: 0.4,
            phase_down: -1.1,
            transmitted_weight: 0.5 * (0.81 + 0.36),
        };
        for theta in [0.0, 0.5, 2.0, -3.0] {
            let n =
                |t| detection_probability_modified(&spinor, t, Normalization::Normalized).unwrap();
            let r = |t| detection_probability_modified(&spinor, t, Normalization::Raw).unwrap();
            assert!((n(theta) + n(theta + PI) - 1.0).abs() < 1e-14);
            assert!((r(theta) + r(theta + PI) - spinor.transmitted_weight).abs() < 1e-14);
            assert!(r(theta) <= 1.0 && r(theta) >= 0.0);
        }
    }

    #[test]
    fn degenerate_spinor_rejected_when_normalizing() {
        let spinor = TransmittedSpinor {
            amp_up: 0.0,
            amp_down: 0.0,
            phase_up: 0.0,
            phase_down: 0.0,
            transmitted_weight: 0.0,
        };
        assert_eq!(
            detection_probability_modified(&spinor, 0.0, Normalization::Normalized),
            Err(Error::DegenerateSpinor)
        );
        assert_eq!(
            detection_probability_modified(&spinor, 0.0, Normalization::Raw),
            Ok(0.0)
        );
    }

    #[test]
    fn analyzer_angle_is_wrapped() {
        let a = AnalyzerSetting::new(3.0 * PI).unwrap();
        assert!((a.theta() - PI).abs() < 1e-15);
        assert!(AnalyzerSetting::new(f64::NAN).is_err());
    }

    #[test]
    fn calibration_closed_forms() {
        let p = neutron();
        let (b, v) = (2.0, 2000.0);
        let full_turn = calibrate_width(&p, b, v, 0.0, 1.0, 0).unwrap();
        let expect = TAU * p.hbar * v / (2.0 * p.mu() * b);
        assert!((full_turn - expect).abs() / expect < 1e-14);

        let half_turn = calibrate_width(&p, b, v, 0.0, 0.0, 0).unwrap();
        let expect = PI * p.hbar * v / (2.0 * p.mu() * b);
        assert!((half_turn - expect).abs() / expect < 1e-14);
        let next = calibrate_width(&p, b, v, 0.0, 0.0, 1).unwrap();
        assert!((next / half_turn - 3.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_branches_are_ordered() {
        let p = neutron();
        let mut prev = 0.0;
        for branch in 0..8 {
            let a = calibrate_width(&p, 0.3, 40.0, 0.7, 0.25, branch).unwrap();
            assert!(a > prev);
            let field = FieldRegion::new(0.3, a).unwrap();
            let beam = beam_from_velocity(&p, 40.0).unwrap();
            let phi = standard_phase(&p, &field, &beam).phi;
            assert!((detection_probability_standard(phi, 0.7) - 0.25).abs() < 1e-12);
            prev = a;
        }
    }

    #[test]
    fn calibration_rejects_bad_probability() {
        let p = neutron();
        assert!(calibrate_width(&p, 2.0, 2000.0, 0.0, 1.5, 0).is_err());
        assert!(calibrate_width(&p, 2.0, 2000.0, 0.0, -0.1, 0).is_err());
        assert!(calibrate_width(&p, 0.0, 2000.0, 0.0, 0.5, 0).is_err());
    }

    #[test]
    fn joint_calibration_selects_frozen_width() {
        let p = neutron();
        let fit = calibrate_width_joint(
            &p,
            CalibrationAnchor {
                b_tesla: 2.0,
                velocity: 2000.0,
                probability: 0.40725,
            },
            &[CalibrationAnchor {
                b_tesla: 0.001,
                velocity: 10.0,
                probability: 0.949661,
            }],
            0.0,
            6,
        )
        .unwrap();
        assert_eq!(fit.branch, 1);
        assert!((fit.width - CALIBRATED_WIDTH_M).abs() / CALIBRATED_WIDTH_M < 1e-12);
        assert!(fit.residual < 1e-6);
    }
}
