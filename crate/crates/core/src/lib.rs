//! Exact quantum-mechanical spin rotation of a spin-1/2 particle crossing a
//! finite region of uniform magnetic field.
//!
//! The spin-up component sees a potential well of depth `μB` and the
//! spin-down component a barrier of height `μB`. Solving both stationary
//! scattering problems gives the transmitted spinor, which is compared against
//! the textbook Larmor rotation `φ = 2μBa/(ħv)`.
//!
//! Modules, bottom-up:
//! - [`units`]: constants, particle specs, beam kinematics, channel wavenumbers
//! - [`scattering`]: transmission/reflection amplitudes for one channel
//! - [`precession`]: standard and exact spin rotation, analyzer probabilities
//! - [`wavepacket`]: Gaussian packets resolved per wavenumber
//! - [`quadrature`]: composite Simpson with a Richardson error estimate

pub mod error;
pub mod phase;
pub mod precession;
pub mod quadrature;
pub mod scattering;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use precession::{
    calibrate_width, detection_probability_modified, detection_probability_standard,
    high_energy_limit_phases, modified_spinor, standard_phase, AnalyzerSetting, Normalization,
    StandardPrecession, TransmittedSpinor, CALIBRATED_WIDTH_M,
};
pub use scattering::{
    reflection_amplitude, scatter_channel, transmission_amplitude, transmission_re_im_closed_form,
    ChannelAmplitudes, ChannelKind, FieldRegion,
};
pub use units::{
    beam_from_energy, beam_from_velocity, beam_from_wavenumber, channel_wavenumbers, Beam,
    BeamSource, ChannelWavenumber, ChannelWavenumbers, Evanescence, ParticleSpec,
};
pub use wavepacket::{GaussianPacket, KGrid, SpinDensityTable};
