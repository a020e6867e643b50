//! Plane-wave scattering on a rectangular well or barrier of width `a`.
//!
//! Amplitudes are reported with the incident amplitude set to 1 and the free
//! factor `e^{±ikx}` stripped: the transmitted wave is `t·e^{ikx}` for
//! `x > a` and the reflected wave `r·e^{−ikx}` for `x < 0`.
//!
//! The common denominator `(k+k_c)² − (k−k_c)² e^{2ik_c a}` is evaluated as
//! `4k·k_c + (k−k_c)²(1 − e^{2ik_c a})`, which is algebraically identical and
//! keeps full relative accuracy when `k_c → k` and when `k_c → 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::units::{
    channel_wavenumbers, Beam, ChannelWavenumber, ChannelWavenumbers, Evanescence, ParticleSpec,
};

/// The magnetic field region (spin rotator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRegion {
    /// T, ≥ 0
    pub b_tesla: f64,
    /// m, > 0
    pub width: f64,
}

impl FieldRegion {
    pub fn new(b_tesla: f64, width: f64) -> Result<Self> {
        require_non_negative("B", b_tesla)?;
        require_positive("width", width)?;
        Ok(Self { b_tesla, width })
    }
}

/// Spin channel. Spin-down sees the barrier `+μB`, spin-up the well `−μB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Barrier,
    Well,
}

/// Transmission and reflection amplitudes of one spin channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelAmplitudes {
    pub kind: ChannelKind,
    pub t: Complex64,
    pub r: Complex64,
    pub channel_k: ChannelWavenumber,
}

impl ChannelAmplitudes {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// `|t|² + |r|² − 1`; zero up to rounding for a propagating channel.
    pub fn flux_defect(&self) -> f64 {
        self.transmission() + self.reflection() - 1.0
    }

    /// `1 − |t|`, evaluated as `|r|²/(1 + |t|)` so that it stays accurate
    /// when the channel transmits almost fully. Propagating channels only.
    pub fn transmission_deficit(&self) -> f64 {
        self.reflection() / (1.0 + self.t.norm())
    }

    pub fn is_propagating(&self) -> bool {
        matches!(self.channel_k, ChannelWavenumber::Propagating(_))
    }
}

/// `sin(z)/z` for complex `z`, with the removable singularity filled in.
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Shared amplitude core.
///
/// * `shift` is `k_c − k`
/// * `advance` is `e^{i(k_c − k)a}`
/// * `half_turn` is `e^{i k_c a}`
///
/// `(1 − e^{2ik_c a})/k_c` is formed as `−2i·a·sinc(k_c a)·e^{ik_c a}` for
/// real or small `k_c` so the threshold `k_c = 0` is regular; deep evanescent
/// channels use the direct quotient, which cannot overflow.
fn amplitudes_core(
    k: f64,
    kc: Complex64,
    shift: Complex64,
    advance: Complex64,
    half_turn: Complex64,
    a: f64,
) -> Result<(Complex64, Complex64)> {
    let s = if kc.im == 0.0 || (kc * a).norm() < 1.0 {
        Complex64::new(0.0, -2.0 * a) * sinc(kc * a) * half_turn
    } else {
        (Complex64::new(1.0, 0.0) - half_turn * half_turn) / kc
    };
    let den = Complex64::new(4.0 * k, 0.0) + shift * shift * s;
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::Invariant(format!(
            "vanishing scattering denominator at k = {k:e}, k_c = {kc}, a = {a:e}"
        )));
    }
    let t = advance * (4.0 * k) / den;
    // k² − k_c² = −shift·(2k + shift)
    let r = -shift * (shift + 2.0 * k) * s / den;
    Ok((t, r))
}

fn validate_literal(k: f64, k_chan: f64, a: f64) -> Result<()> {
    require_positive("k", k)?;
    require_positive("k_chan", k_chan)?;
    require_positive("width", a)?;
    Ok(())
}

fn literal(k: f64, k_chan: f64, a: f64) -> Result<(Complex64, Complex64)> {
    validate_literal(k, k_chan, a)?;
    let ka = k * a;
    let kca = k_chan * a;
    let advance = Complex64::cis(-ka) * Complex64::cis(kca);
    core_real(k, k_chan, k_chan - k, advance, kca, a)
}

fn core_real(
    k: f64,
    k_chan: f64,
    shift: f64,
    advance: Complex64,
    kca: f64,
    a: f64,
) -> Result<(Complex64, Complex64)> {
    amplitudes_core(
        k,
        Complex64::new(k_chan, 0.0),
        Complex64::new(shift, 0.0),
        advance,
        Complex64::cis(kca),
        a,
    )
}

/// Transmission amplitude
/// `t = 4k·k_c·e^{−ika}e^{ik_c a} / [(k+k_c)² − (k−k_c)² e^{2ik_c a}]`.
///
/// The phase factors are evaluated literally from `k·a` and `k_c·a`, so for
/// very large `ka` the absolute phase inherits the rounding of those
/// products. [`scatter_channel`] avoids that by working from the exact
/// wavenumber shift.
pub fn transmission_amplitude(k: f64, k_chan: f64, a: f64) -> Result<Complex64> {
    literal(k, k_chan, a).map(|(t, _)| t)
}

/// Reflection amplitude
/// `r = (k²−k_c²)(1 − e^{2ik_c a}) / [(k+k_c)² − (k−k_c)² e^{2ik_c a}]`.
pub fn reflection_amplitude(k: f64, k_chan: f64, a: f64) -> Result<Complex64> {
    literal(k, k_chan, a).map(|(_, r)| r)
}

/// Real and imaginary parts of the transmission amplitude in explicit
/// trigonometric form:
///
/// ```text
/// Re = [8k k_c (k²+k_c²) sin(ka) sin(k_c a) + 16k² k_c² cos(ka) cos(k_c a)] / D
/// Im = [8k k_c (k²+k_c²) cos(ka) sin(k_c a) − 16k² k_c² sin(ka) cos(k_c a)] / D
/// D  = (k+k_c)⁴ + (k−k_c)⁴ − 2(k+k_c)²(k−k_c)² cos(2k_c a)
/// ```
///
/// For `|k − k_c|·a < 1e-4`, `D` is taken as `|(k+k_c)² − (k−k_c)² e^{2ik_c a}|²`
/// instead of the expanded quartic.
pub fn transmission_re_im_closed_form(k: f64, k_chan: f64, a: f64) -> Result<(f64, f64)> {
    validate_literal(k, k_chan, a)?;
    let kc = k_chan;
    let ka = k * a;
    let kca = kc * a;
    let (s, c) = ka.sin_cos();
    let (s1, c1) = kca.sin_cos();
    let sum = k + kc;
    let diff = k - kc;
    let d = if diff.abs() * a < 1e-4 {
        let factored = Complex64::new(sum * sum, 0.0) - Complex64::cis(2.0 * kca) * (diff * diff);
        factored.norm_sqr()
    } else {
        sum.powi(4) + diff.powi(4) - 2.0 * sum * sum * diff * diff * (2.0 * kca).cos()
    };
    let cross = 8.0 * k * kc * (k * k + kc * kc);
    let direct = 16.0 * k * k * kc * kc;
    let re = (cross * s * s1 + direct * c * c1) / d;
    let im = (cross * c * s1 - direct * s * c1) / d;
    Ok((re, im))
}

/// Amplitudes for one channel from precomputed wavenumbers.
pub fn channel_amplitudes(
    wavenumbers: &ChannelWavenumbers,
    kind: ChannelKind,
    width: f64,
) -> Result<ChannelAmplitudes> {
    require_positive("width", width)?;
    let k = wavenumbers.k;
    let (kc, shift) = match kind {
        ChannelKind::Well => (
            ChannelWavenumber::Propagating(wavenumbers.well),
            Complex64::new(wavenumbers.well_shift, 0.0),
        ),
        ChannelKind::Barrier => (wavenumbers.barrier, wavenumbers.barrier_shift),
    };
    let kc_c = kc.as_complex();
    let advance = (Complex64::i() * shift * width).exp();
    let half_turn = (Complex64::i() * kc_c * width).exp();
    let (t, r) = amplitudes_core(k, kc_c, shift, advance, half_turn, width)?;
    Ok(ChannelAmplitudes {
        kind,
        t,
        r,
        channel_k: kc,
    })
}

/// Scatters the requested spin channel of `beam` off `field`.
///
/// Only the barrier channel can be evanescent; the well channel is always
/// propagating and never fails on that account.
pub fn scatter_channel(
    beam: &Beam,
    particle: &ParticleSpec,
    field: &FieldRegion,
    which: ChannelKind,
    evanescence: Evanescence,
) -> Result<ChannelAmplitudes> {
    let policy = match which {
        ChannelKind::Well => Evanescence::Continue,
        ChannelKind::Barrier => evanescence,
    };
    let wn = channel_wavenumbers(beam, particle, field.b_tesla, policy)?;
    channel_amplitudes(&wn, which, field.width)
}
