//! Merges the optional JSON config with command-line flags (flags win).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use larmor_core::units::{ev_to_joules, HBAR_J_S};
use larmor_core::{
    beam_from_energy, beam_from_velocity, beam_from_wavenumber, Beam, Evanescence, ParticleSpec,
    CALIBRATED_WIDTH_M,
};
use serde_json::Value;

use crate::args::{Format, PointArgs};
use crate::error::{CliError, CliResult};

const KNOWN_KEYS: &[&str] = &[
    "particle.label",
    "particle.mass_kg",
    "particle.moment_J_per_T",
    "hbar_J_s",
    "B_T",
    "width_m",
    "theta_rad",
    "v_mps",
    "E_eV",
    "k_per_m",
    "format",
];

/// Flattened config: nested objects and dotted keys are equivalent.
#[derive(Debug, Default, Clone)]
pub struct Config {
    path: String,
    entries: BTreeMap<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| CliError::io(&shown, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: shown.clone(),
            reason: e.to_string(),
        })?;
        Self::from_value(&shown, &value)
    }

    pub fn from_value(path: &str, value: &Value) -> CliResult<Self> {
        let Value::Object(_) = value else {
            return Err(CliError::Config {
                path: path.into(),
                reason: "top level must be a JSON object".into(),
            });
        };
        let mut entries = BTreeMap::new();
        flatten("", value, &mut entries);
        if let Some(bad) = entries.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Config {
                path: path.into(),
                reason: format!("unknown key `{bad}`"),
            });
        }
        Ok(Self {
            path: path.into(),
            entries,
        })
    }

    fn number(&self, key: &str) -> CliResult<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| CliError::Config {
                path: self.path.clone(),
                reason: format!("`{key}` must be a number"),
            }),
        }
    }

    fn string(&self, key: &str) -> CliResult<Option<String>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(CliError::Config {
                path: self.path.clone(),
                reason: format!("`{key}` must be a string"),
            }),
        }
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut BTreeMap<String, Value>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamInput {
    Velocity(f64),
    EnergyEv(f64),
    Wavenumber(f64),
}

impl BeamInput {
    pub fn beam(self, particle: &ParticleSpec) -> CliResult<Beam> {
        Ok(match self {
            BeamInput::Velocity(v) => beam_from_velocity(particle, v)?,
            BeamInput::EnergyEv(e) => beam_from_energy(particle, ev_to_joules(e))?,
            BeamInput::Wavenumber(k) => beam_from_wavenumber(particle, k)?,
        })
    }

    pub fn describe(self) -> String {
        match self {
            BeamInput::Velocity(v) => format!("v = {v} m/s"),
            BeamInput::EnergyEv(e) => format!("E = {e} eV"),
            BeamInput::Wavenumber(k) => format!("k = {k} 1/m"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthSource {
    Calibrated,
    Supplied,
}

/// Fully resolved inputs of one evaluating command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub particle: ParticleSpec,
    pub b_tesla: Option<f64>,
    pub width: f64,
    pub width_source: WidthSource,
    pub theta: f64,
    pub beam: Option<BeamInput>,
    pub evanescence: Evanescence,
    pub format: Format,
    pub config_path: Option<String>,
}

impl Settings {
    pub fn resolve(args: &PointArgs) -> CliResult<Self> {
        let config = match &args.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        Self::merge(args, &config)
    }

    pub fn merge(args: &PointArgs, config: &Config) -> CliResult<Self> {
        let defaults = ParticleSpec::neutron();
        let label = config
            .string("particle.label")?
            .unwrap_or_else(|| defaults.label.clone());
        let mass = config.number("particle.mass_kg")?.unwrap_or(defaults.mass);
        let moment = config
            .number("particle.moment_J_per_T")?
            .unwrap_or(defaults.magnetic_moment);
        let hbar = config.number("hbar_J_s")?.unwrap_or(HBAR_J_S);
        let particle = ParticleSpec::with_hbar(label, mass, moment, hbar)?;

        let (width, width_source) = match args.width.or(config.number("width_m")?) {
            Some(w) => (w, WidthSource::Supplied),
            None => (CALIBRATED_WIDTH_M, WidthSource::Calibrated),
        };

        let flag_beam = [
            args.v.map(BeamInput::Velocity),
            args.e_ev.map(BeamInput::EnergyEv),
            args.k.map(BeamInput::Wavenumber),
        ];
        let config_beam = [
            config.number("v_mps")?.map(BeamInput::Velocity),
            config.number("E_eV")?.map(BeamInput::EnergyEv),
            config.number("k_per_m")?.map(BeamInput::Wavenumber),
        ];
        let beam = match single(&flag_beam)? {
            Some(b) => Some(b),
            None => single(&config_beam)?,
        };

        let format = match (args.format, config.string("format")?) {
            (Some(f), _) => f,
            (None, Some(s)) => match s.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => {
                    return Err(CliError::usage(
                        "format",
                        format!("`{other}` is not csv|json"),
                    ))
                }
            },
            (None, None) => Format::Csv,
        };

        Ok(Self {
            particle,
            b_tesla: args.b.or(config.number("B_T")?),
            width,
            width_source,
            theta: args.theta.or(config.number("theta_rad")?).unwrap_or(0.0),
            beam,
            evanescence: if args.allow_evanescent {
                Evanescence::Continue
            } else {
                Evanescence::Reject
            },
            format,
            config_path: args.config.as_ref().map(|p| p.display().to_string()),
        })
    }

    pub fn require_b(&self) -> CliResult<f64> {
        self.b_tesla
            .ok_or_else(|| CliError::usage("B", "no field given (use --B or B_T in the config)"))
    }

    pub fn require_beam(&self) -> CliResult<BeamInput> {
        self.beam
            .ok_or_else(|| CliError::usage("beam", "give exactly one of --v, --E-eV, --k"))
    }
}

fn single(options: &[Option<BeamInput>]) -> CliResult<Option<BeamInput>> {
    let given: Vec<BeamInput> = options.iter().flatten().copied().collect();
    match given.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some(*one)),
        _ => Err(CliError::usage(
            "beam",
            "exactly one of v, E, k may be given",
        )),
    }
}
