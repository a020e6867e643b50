//! Gaussian wave packets through the spin rotator, resolved per wavenumber.
//!
//! Each spectral component scatters as a plane wave, so the +x spin density
//! in k-space is `|g(k)|²` times the single-k detection probability at
//! `θ = 0`. Nothing is propagated in time.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::precession::{
    detection_probability_modified, detection_probability_standard, modified_spinor,
    standard_phase, Normalization,
};
use crate::quadrature::{simpson, simpson_with_richardson, SimpsonEstimate};
use crate::scattering::FieldRegion;
use crate::units::{beam_from_wavenumber, Evanescence, ParticleSpec};

/// Number of spectral standard deviations on either side of `k₀` covered by
/// the default grid.
pub const DEFAULT_GRID_HALF_WIDTH_SIGMAS: f64 = 6.0;
pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_SIGMA_REL: f64 = 0.05;

/// Initial packet `ψ(x) ∝ exp(−(x−x₀)²/4δ²) e^{ik₀x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    /// m
    pub x0: f64,
    /// 1/m, > 0
    pub k0: f64,
    /// m, > 0
    pub delta: f64,
}

impl GaussianPacket {
    pub fn new(x0: f64, k0: f64, delta: f64) -> Result<Self> {
        require_finite("x0", x0)?;
        require_positive("k0", k0)?;
        require_positive("delta", delta)?;
        Ok(Self { x0, k0, delta })
    }

    /// Packet whose spectral density has standard deviation `sigma_rel·k₀`.
    pub fn with_relative_width(x0: f64, k0: f64, sigma_rel: f64) -> Result<Self> {
        require_positive("sigma_rel", sigma_rel)?;
        require_positive("k0", k0)?;
        Self::new(x0, k0, 1.0 / (2.0 * sigma_rel * k0))
    }

    /// Standard deviation of `|g(k)|²`, `1/(2δ)`.
    pub fn sigma_k(&self) -> f64 {
        0.5 / self.delta
    }

    /// `k₀ ± 6σ_k` with 2001 points. Fails if the lower edge is not positive.
    pub fn default_grid(&self) -> Result<KGrid> {
        let half = DEFAULT_GRID_HALF_WIDTH_SIGMAS * self.sigma_k();
        KGrid::new(self.k0 - half, self.k0 + half, DEFAULT_GRID_POINTS)
    }

    /// `g(k) = (2δ²/π)^{1/4} e^{−δ²(k−k₀)²} e^{ikx₀}`
    pub fn spectral_amplitude(&self, k: f64) -> Complex64 {
        let d2 = self.delta * self.delta;
        let dk = k - self.k0;
        let modulus = (2.0 * d2 / PI).powf(0.25) * (-d2 * dk * dk).exp();
        Complex64::from_polar(modulus, k * self.x0)
    }

    /// `|g(k)|²`
    pub fn spectral_density(&self, k: f64) -> f64 {
        let d2 = self.delta * self.delta;
        let dk = k - self.k0;
        (2.0 * d2 / PI).sqrt() * (-2.0 * d2 * dk * dk).exp()
    }
}

/// Uniform wavenumber grid with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n_points: usize,
}

impl KGrid {
    pub fn new(k_min: f64, k_max: f64, n_points: usize) -> Result<Self> {
        require_positive("k_min", k_min)?;
        require_finite("k_max", k_max)?;
        if k_max <= k_min {
            return Err(Error::domain(
                "k_max",
                format!("{k_max:e} must exceed k_min {k_min:e}"),
            ));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::domain(
                "n_points",
                format!("{n_points} must be odd and >= 3"),
            ));
        }
        Ok(Self {
            k_min,
            k_max,
            n_points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.k_max - self.k_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.k_max
        } else {
            self.k_min + self.step() * i as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// +x spin density of the exact treatment:
/// `|g(k)|² · ¼|a(k)e^{iφ₁(k)} + b(k)e^{iφ₂(k)}|²`.
pub fn spin_x_density_modified(
    packet: &GaussianPacket,
    particle: &ParticleSpec,
    field: &FieldRegion,
    k: f64,
    evanescence: Evanescence,
) -> Result<f64> {
    let beam = beam_from_wavenumber(particle, k)?;
    let spinor = modified_spinor(particle, field, &beam, evanescence)?;
    let p = detection_probability_modified(&spinor, 0.0, Normalization::Raw)?;
    Ok(packet.spectral_density(k) * p)
}

/// +x spin density of the spin-only treatment, `|g(k)|² cos²(φ(k)/2)` with
/// `φ(k) = 2μBa·m/(ħ²k)` evaluated at each component's own velocity.
pub fn spin_x_density_standard(
    packet: &GaussianPacket,
    particle: &ParticleSpec,
    field: &FieldRegion,
    k: f64,
) -> Result<f64> {
    let beam = beam_from_wavenumber(particle, k)?;
    let phi = standard_phase(particle, field, &beam).phi;
    Ok(packet.spectral_density(k) * detection_probability_standard(phi, 0.0))
}

/// Simpson integral of `density` sampled on `grid`, with error estimate.
pub fn integrate_density(grid: &KGrid, density: &[f64]) -> Result<SimpsonEstimate> {
    if density.len() != grid.n_points {
        return Err(Error::domain(
            "density",
            format!(
                "{} samples for a grid of {} points",
                density.len(),
                grid.n_points
            ),
        ));
    }
    simpson_with_richardson(grid.step(), density)
}

/// What to do with grid points where the barrier channel is evanescent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridEvanescence {
    /// Refuse, reporting the cutoff wavenumber.
    #[default]
    Fail,
    /// Drop every point at or below the cutoff (keeping the count odd).
    Truncate,
    /// Continue the barrier channel analytically (`k₁ = iκ`).
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDensityRow {
    pub k: f64,
    pub spectral: f64,
    pub p_standard: f64,
    pub p_modified_raw: f64,
    pub p_modified_normalized: f64,
    pub density_standard: f64,
    pub density_modified: f64,
}

/// Spectral spin densities of one packet on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinDensityTable {
    pub grid: KGrid,
    pub rows: Vec<SpinDensityRow>,
    /// Set when [`GridEvanescence::Truncate`] removed points; holds the
    /// cutoff wavenumber `√(2mμB)/ħ`.
    pub truncated_below: Option<f64>,
}

impl SpinDensityTable {
    /// Evaluates every grid point in parallel.
    pub fn build(
        packet: &GaussianPacket,
        particle: &ParticleSpec,
        field: &FieldRegion,
        grid: KGrid,
        policy: GridEvanescence,
    ) -> Result<Self> {
        let cutoff = particle.coupling_sq(field.b_tesla).sqrt();
        let mut grid = grid;
        let mut truncated_below = None;
        if grid.k_min <= cutoff {
            match policy {
                GridEvanescence::Fail => {
                    return Err(Error::EvanescentChannel {
                        k: grid.k_min,
                        kappa: ((cutoff - grid.k_min) * (cutoff + grid.k_min)).sqrt(),
                    })
                }
                GridEvanescence::Truncate => {
                    grid = truncate_grid(&grid, cutoff)?;
                    truncated_below = Some(cutoff);
                }
                GridEvanescence::Continue => {}
            }
        }
        let evanescence = match policy {
            GridEvanescence::Continue => Evanescence::Continue,
            _ => Evanescence::Reject,
        };
        let rows = (0..grid.n_points)
            .into_par_iter()
            .map(|i| row_at(packet, particle, field, grid.point(i), evanescence))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            rows,
            truncated_below,
        })
    }

    fn column(&self, f: impl Fn(&SpinDensityRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn spectral_norm(&self) -> Result<SimpsonEstimate> {
        integrate_density(&self.grid, &self.column(|r| r.spectral))
    }

    pub fn integrated_standard(&self) -> Result<SimpsonEstimate> {
        integrate_density(&self.grid, &self.column(|r| r.density_standard))
    }

    pub fn integrated_modified(&self) -> Result<SimpsonEstimate> {
        integrate_density(&self.grid, &self.column(|r| r.density_modified))
    }

    /// `(∫ (ρ_std − ρ_mod)² dk)^{1/2}`
    pub fn l2_distance(&self) -> Result<f64> {
        let sq = self.column(|r| (r.density_standard - r.density_modified).powi(2));
        Ok(simpson(self.grid.step(), &sq)?.max(0.0).sqrt())
    }

    /// `max_k |ρ_std − ρ_mod|`
    pub fn max_gap(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.density_standard - r.density_modified).abs())
            .fold(0.0, f64::max)
    }

    pub fn peak_density(&self) -> f64 {
        self.rows.iter().map(|r| r.spectral).fold(0.0, f64::max)
    }
}

fn truncate_grid(grid: &KGrid, cutoff: f64) -> Result<KGrid> {
    let h = grid.step();
    let mut first = grid
        .points()
        .iter()
        .position(|&k| k > cutoff)
        .ok_or_else(|| Error::EvanescentChannel {
            k: grid.k_max,
            kappa: ((cutoff - grid.k_max) * (cutoff + grid.k_max))
                .max(0.0)
                .sqrt(),
        })?;
    if (grid.n_points - first).is_multiple_of(2) {
        first += 1;
    }
    let n = grid.n_points - first;
    if n < 3 {
        return Err(Error::domain(
            "grid",
            format!("fewer than 3 propagating points above cutoff k = {cutoff:e}"),
        ));
    }
    KGrid::new(grid.k_min + h * first as f64, grid.k_max, n)
}

fn row_at(
    packet: &GaussianPacket,
    particle: &ParticleSpec,
    field: &FieldRegion,
    k: f64,
    evanescence: Evanescence,
) -> Result<SpinDensityRow> {
    let beam = beam_from_wavenumber(particle, k)?;
    let spectral = packet.spectral_density(k);
    let phi = standard_phase(particle, field, &beam).phi;
    let p_standard = detection_probability_standard(phi, 0.0);
    let spinor = modified_spinor(particle, field, &beam, evanescence)?;
    let p_modified_raw = detection_probability_modified(&spinor, 0.0, Normalization::Raw)?;
    let p_modified_normalized =
        detection_probability_modified(&spinor, 0.0, Normalization::Normalized)?;
    Ok(SpinDensityRow {
        k,
        spectral,
        p_standard,
        p_modified_raw,
        p_modified_normalized,
        density_standard: spectral * p_standard,
        density_modified: spectral * p_modified_raw,
    })
}
