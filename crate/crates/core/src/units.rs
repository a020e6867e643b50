//! Physical constants, particle specifications and beam kinematics.
//!
//! Everything is SI internally. Electron-volt conversions exist only for I/O.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR_J_S: f64 = 1.054_571_817e-34;
/// Neutron mass, kg (CODATA 2018).
pub const NEUTRON_MASS_KG: f64 = 1.674_927_498_04e-27;
/// Magnitude of the neutron magnetic moment, J/T (CODATA 2018).
pub const NEUTRON_MOMENT_J_PER_T: f64 = 9.662_365_1e-27;
/// Joules per electron-volt (exact).
pub const JOULES_PER_EV: f64 = 1.602_176_634e-19;

pub fn ev_to_joules(ev: f64) -> f64 {
    ev * JOULES_PER_EV
}

pub fn joules_to_ev(joules: f64) -> f64 {
    joules / JOULES_PER_EV
}

/// Mass and magnetic moment of the probe particle.
///
/// `hbar` travels with the particle so that a configuration override of ħ
/// reaches every conversion that uses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub label: String,
    /// kg, > 0
    pub mass: f64,
    /// J/T, nonzero; the sign is carried but formulas use the magnitude.
    pub magnetic_moment: f64,
    /// J·s
    pub hbar: f64,
}

impl ParticleSpec {
    pub fn new(label: impl Into<String>, mass: f64, magnetic_moment: f64) -> Result<Self> {
        Self::with_hbar(label, mass, magnetic_moment, HBAR_J_S)
    }

    pub fn with_hbar(
        label: impl Into<String>,
        mass: f64,
        magnetic_moment: f64,
        hbar: f64,
    ) -> Result<Self> {
        require_positive("particle.mass_kg", mass)?;
        if !magnetic_moment.is_finite() || magnetic_moment == 0.0 {
            return Err(Error::domain(
                "particle.moment_J_per_T",
                format!("{magnetic_moment} must be finite and nonzero"),
            ));
        }
        require_positive("hbar_J_s", hbar)?;
        Ok(Self {
            label: label.into(),
            mass,
            magnetic_moment,
            hbar,
        })
    }

    /// The free neutron with CODATA constants. The moment is negative
    /// (antiparallel to the spin).
    pub fn neutron() -> Self {
        Self {
            label: "neutron".to_owned(),
            mass: NEUTRON_MASS_KG,
            magnetic_moment: -NEUTRON_MOMENT_J_PER_T,
            hbar: HBAR_J_S,
        }
    }

    /// `|magnetic_moment|`, the `μ` appearing in the channel potentials.
    pub fn mu(&self) -> f64 {
        self.magnetic_moment.abs()
    }

    /// Zeeman energy `μB` in joules.
    pub fn zeeman_energy(&self, b_tesla: f64) -> f64 {
        self.mu() * b_tesla
    }

    /// `2mμB/ħ²`, the squared wavenumber shift between the channels, in 1/m².
    pub fn coupling_sq(&self, b_tesla: f64) -> f64 {
        2.0 * self.mass * self.mu() * b_tesla / (self.hbar * self.hbar)
    }
}

impl Default for ParticleSpec {
    fn default() -> Self {
        Self::neutron()
    }
}

/// Which beam quantity the caller supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamSource {
    Velocity,
    Energy,
    Wavenumber,
}

/// Monochromatic incident beam. One quantity is authoritative; the other two
/// are derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub source: BeamSource,
    /// m/s
    pub velocity: f64,
    /// J
    pub kinetic_energy: f64,
    /// 1/m
    pub wavenumber: f64,
}

impl Beam {
    pub fn kinetic_energy_ev(&self) -> f64 {
        joules_to_ev(self.kinetic_energy)
    }

    /// `μB/E`, the dimensionless regime parameter.
    pub fn regime_ratio(&self, particle: &ParticleSpec, b_tesla: f64) -> f64 {
        particle.zeeman_energy(b_tesla) / self.kinetic_energy
    }
}

pub fn beam_from_velocity(particle: &ParticleSpec, v: f64) -> Result<Beam> {
    require_positive("v", v)?;
    Ok(Beam {
        source: BeamSource::Velocity,
        velocity: v,
        kinetic_energy: 0.5 * particle.mass * v * v,
        wavenumber: particle.mass * v / particle.hbar,
    })
}

pub fn beam_from_energy(particle: &ParticleSpec, energy: f64) -> Result<Beam> {
    require_positive("E", energy)?;
    Ok(Beam {
        source: BeamSource::Energy,
        velocity: (2.0 * energy / particle.mass).sqrt(),
        kinetic_energy: energy,
        wavenumber: (2.0 * particle.mass * energy).sqrt() / particle.hbar,
    })
}

pub fn beam_from_wavenumber(particle: &ParticleSpec, k: f64) -> Result<Beam> {
    require_positive("k", k)?;
    let p = particle.hbar * k;
    Ok(Beam {
        source: BeamSource::Wavenumber,
        velocity: p / particle.mass,
        kinetic_energy: p * p / (2.0 * particle.mass),
        wavenumber: k,
    })
}

/// Whether an evanescent barrier channel is an error or continued
/// analytically to `k₁ = iκ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evanescence {
    #[default]
    Reject,
    Continue,
}

/// Interior wavenumber of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelWavenumber {
    Propagating(f64),
    /// `k = iκ`
    Evanescent {
        kappa: f64,
    },
}

impl ChannelWavenumber {
    pub fn as_complex(self) -> Complex64 {
        match self {
            ChannelWavenumber::Propagating(k) => Complex64::new(k, 0.0),
            ChannelWavenumber::Evanescent { kappa } => Complex64::new(0.0, kappa),
        }
    }

    pub fn real(self) -> Option<f64> {
        match self {
            ChannelWavenumber::Propagating(k) => Some(k),
            ChannelWavenumber::Evanescent { .. } => None,
        }
    }

    /// Real wavenumber, or `-κ` for an evanescent channel. Used for flat
    /// numeric output.
    pub fn signed_value(self) -> f64 {
        match self {
            ChannelWavenumber::Propagating(k) => k,
            ChannelWavenumber::Evanescent { kappa } => -kappa,
        }
    }
}

/// Incident wavenumber and both interior channel wavenumbers.
///
/// The shifts `k₁ − k` and `k₂ − k` are stored separately, computed as
/// `∓q²/(k_c + k)` with `q² = 2mμB/ħ²`. Subtracting the rounded wavenumbers
/// instead would lose every digit once `μB ≪ E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWavenumbers {
    pub k: f64,
    /// Barrier channel (spin-down), `k₁ = √(2m(E−μB))/ħ`.
    pub barrier: ChannelWavenumber,
    /// Well channel (spin-up), `k₂ = √(2m(E+μB))/ħ`.
    pub well: f64,
    /// `2mμB/ħ²`
    pub coupling_sq: f64,
    /// `k₁ − k`
    pub barrier_shift: Complex64,
    /// `k₂ − k`
    pub well_shift: f64,
}

impl ChannelWavenumbers {
    /// `(k, k₁, k₂)` for a propagating barrier channel.
    pub fn triple(&self) -> Option<(f64, f64, f64)> {
        self.barrier.real().map(|k1| (self.k, k1, self.well))
    }
}

/// Splits the incident wavenumber into the barrier and well channels for a
/// field of `b_tesla`.
pub fn channel_wavenumbers(
    beam: &Beam,
    particle: &ParticleSpec,
    b_tesla: f64,
    evanescence: Evanescence,
) -> Result<ChannelWavenumbers> {
    require_non_negative("B", b_tesla)?;
    let k = require_positive("k", beam.wavenumber)?;
    let q_sq = particle.coupling_sq(b_tesla);
    let q = q_sq.sqrt();

    let well = (k * k + q_sq).sqrt();
    let well_shift = q_sq / (well + k);

    let (barrier, barrier_shift) = if k > q {
        let k1 = ((k - q) * (k + q)).sqrt();
        (
            ChannelWavenumber::Propagating(k1),
            Complex64::new(-q_sq / (k1 + k), 0.0),
        )
    } else {
        let kappa = ((q - k) * (q + k)).sqrt();
        if evanescence == Evanescence::Reject {
            return Err(Error::EvanescentChannel { k, kappa });
        }
        (
            ChannelWavenumber::Evanescent { kappa },
            Complex64::new(-k, kappa),
        )
    };

    Ok(ChannelWavenumbers {
        k,
        barrier,
        well,
        coupling_sq: q_sq,
        barrier_shift,
        well_shift,
    })
}
