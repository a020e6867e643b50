//! One evaluated (beam, field, analyzer) point and its serializations.

use larmor_core::scattering::channel_amplitudes;
use larmor_core::{
    channel_wavenumbers, detection_probability_modified, detection_probability_standard,
    standard_phase, Beam, ChannelKind, Evanescence, FieldRegion, Normalization, ParticleSpec,
    TransmittedSpinor,
};
use serde::Serialize;

use crate::error::CliResult;
use crate::settings::{Settings, WidthSource};

pub const COLUMNS: [&str; 22] = [
    "param",
    "v_mps",
    "E_J",
    "B_T",
    "a_m",
    "theta_rad",
    "k",
    "k1",
    "k2",
    "t2_up",
    "t2_down",
    "r2_up",
    "r2_down",
    "amp_a",
    "amp_b",
    "phi1",
    "phi2",
    "phi_std",
    "p_std",
    "p_mod_raw",
    "p_mod_norm",
    "mu_B_over_E",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    /// Name of the swept parameter, or `scan`.
    pub param: String,
    pub v_mps: f64,
    #[serde(rename = "E_J")]
    pub e_j: f64,
    #[serde(rename = "B_T")]
    pub b_t: f64,
    pub a_m: f64,
    pub theta_rad: f64,
    pub k: f64,
    /// `−κ` for an evanescent barrier channel.
    pub k1: f64,
    pub k2: f64,
    pub t2_up: f64,
    pub t2_down: f64,
    pub r2_up: f64,
    pub r2_down: f64,
    pub amp_a: f64,
    pub amp_b: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi_std: f64,
    pub p_std: f64,
    pub p_mod_raw: f64,
    pub p_mod_norm: f64,
    #[serde(rename = "mu_B_over_E")]
    pub mu_b_over_e: f64,
}

pub fn evaluate(
    param: &str,
    particle: &ParticleSpec,
    beam: &Beam,
    field: &FieldRegion,
    theta: f64,
    evanescence: Evanescence,
) -> CliResult<ScanRecord> {
    let wn = channel_wavenumbers(beam, particle, field.b_tesla, evanescence)?;
    let well = channel_amplitudes(&wn, ChannelKind::Well, field.width)?;
    let barrier = channel_amplitudes(&wn, ChannelKind::Barrier, field.width)?;
    let spinor = TransmittedSpinor::from_channels(&well, &barrier);
    let phi_std = standard_phase(particle, field, beam).phi;
    Ok(ScanRecord {
        param: param.to_string(),
        v_mps: beam.velocity,
        e_j: beam.kinetic_energy,
        b_t: field.b_tesla,
        a_m: field.width,
        theta_rad: theta,
        k: wn.k,
        k1: wn.barrier.signed_value(),
        k2: wn.well,
        t2_up: well.transmission(),
        t2_down: barrier.transmission(),
        r2_up: well.reflection(),
        r2_down: barrier.reflection(),
        amp_a: spinor.amp_up,
        amp_b: spinor.amp_down,
        phi1: spinor.phase_up,
        phi2: spinor.phase_down,
        phi_std,
        p_std: detection_probability_standard(phi_std, theta),
        p_mod_raw: detection_probability_modified(&spinor, theta, Normalization::Raw)?,
        p_mod_norm: detection_probability_modified(&spinor, theta, Normalization::Normalized)?,
        mu_b_over_e: beam.regime_ratio(particle, field.b_tesla),
    })
}

/// Fixed 12-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

impl ScanRecord {
    pub fn csv_row(&self) -> String {
        let values = [
            self.v_mps,
            self.e_j,
            self.b_t,
            self.a_m,
            self.theta_rad,
            self.k,
            self.k1,
            self.k2,
            self.t2_up,
            self.t2_down,
            self.r2_up,
            self.r2_down,
            self.amp_a,
            self.amp_b,
            self.phi1,
            self.phi2,
            self.phi_std,
            self.p_std,
            self.p_mod_raw,
            self.p_mod_norm,
            self.mu_b_over_e,
        ];
        let mut row = self.param.clone();
        for v in values {
            row.push(',');
            row.push_str(&num(v));
        }
        row
    }
}

/// `(key, value)` pairs recorded at the top of every output file.
pub fn metadata(
    command: &str,
    settings: &Settings,
    inputs: &[(String, String)],
) -> Vec<(String, String)> {
    let p = &settings.particle;
    let mut meta = vec![
        (
            "tool".to_string(),
            format!("larmor {}", env!("CARGO_PKG_VERSION")),
        ),
        ("command".to_string(), command.to_string()),
    ];
    meta.extend(inputs.iter().cloned());
    meta.extend([
        ("particle".to_string(), p.label.clone()),
        ("mass_kg".to_string(), num(p.mass)),
        ("moment_J_per_T".to_string(), num(p.magnetic_moment)),
        ("hbar_J_s".to_string(), num(p.hbar)),
        ("width_m".to_string(), num(settings.width)),
        (
            "width_provenance".to_string(),
            match settings.width_source {
                WidthSource::Calibrated => {
                    "calibrated default (fit to reference probabilities; true width unknown)"
                }
                WidthSource::Supplied => "user supplied",
            }
            .to_string(),
        ),
        ("theta_rad".to_string(), num(settings.theta)),
        (
            "evanescent_channels".to_string(),
            match settings.evanescence {
                Evanescence::Continue => "continued (k1 column holds -kappa)",
                Evanescence::Reject => "rejected",
            }
            .to_string(),
        ),
    ]);
    if let Some(path) = &settings.config_path {
        meta.push(("config".to_string(), path.clone()));
    }
    meta
}

pub fn comment_header(meta: &[(String, String)]) -> String {
    meta.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
}

pub fn records_csv(meta: &[(String, String)], records: &[ScanRecord]) -> String {
    let mut out = comment_header(meta);
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn meta_json(meta: &[(String, String)]) -> serde_json::Map<String, serde_json::Value> {
    meta.iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect()
}

pub fn records_json(meta: &[(String, String)], records: &[ScanRecord]) -> CliResult<String> {
    let doc = serde_json::json!({ "meta": meta_json(meta), "records": records });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
