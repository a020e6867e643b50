use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use larmor_core::precession::{calibrate_width_joint, CalibrationAnchor};
use larmor_core::wavepacket::{integrate_density, GridEvanescence, DEFAULT_GRID_HALF_WIDTH_SIGMAS};
use larmor_core::{
    beam_from_velocity, calibrate_width, detection_probability_standard, standard_phase,
    FieldRegion, GaussianPacket, KGrid, SpinDensityTable,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    CalibrateArgs, Format, PacketArgs, PacketParam, ScanArgs, SweepParam, TableArgs,
};
use crate::error::{CliError, CliResult};
use crate::record::{
    comment_header, evaluate, meta_json, metadata, num, records_csv, records_json, ScanRecord,
};
use crate::settings::{BeamInput, Settings};
use crate::sweep::sweep_values;

/// Writes `text` to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn render(format: Format, meta: &[(String, String)], records: &[ScanRecord]) -> CliResult<String> {
    match format {
        Format::Csv => Ok(records_csv(meta, records)),
        Format::Json => records_json(meta, records),
    }
}

pub fn scan(args: &ScanArgs) -> CliResult<()> {
    let s = Settings::resolve(&args.point)?;
    let b = s.require_b()?;
    let beam_input = s.require_beam()?;
    let beam = beam_input.beam(&s.particle)?;
    let field = FieldRegion::new(b, s.width)?;
    let record = evaluate("scan", &s.particle, &beam, &field, s.theta, s.evanescence)?;
    let meta = metadata(
        "scan",
        &s,
        &[
            ("beam".into(), beam_input.describe()),
            ("B_T".into(), num(b)),
        ],
    );
    emit(
        args.point.out.as_deref(),
        &render(s.format, &meta, &[record])?,
    )
}

pub fn table(args: &TableArgs) -> CliResult<()> {
    let s = Settings::resolve(&args.point)?;
    let values = sweep_values(&args.values)?;
    let param = args.param;
    let beam_input = match param {
        SweepParam::V => {
            if s.beam.is_some() {
                return Err(CliError::usage(
                    "beam",
                    "sweeping v: drop --v/--E-eV/--k (and beam keys in the config)",
                ));
            }
            None
        }
        _ => Some(s.require_beam()?),
    };
    let b_fixed = match param {
        SweepParam::B => None,
        _ => Some(s.require_b()?),
    };

    let rows: Vec<CliResult<ScanRecord>> = values
        .par_iter()
        .map(|&x| {
            let beam = match beam_input {
                Some(input) => input.beam(&s.particle)?,
                None => beam_from_velocity(&s.particle, x)?,
            };
            let b = b_fixed.unwrap_or(x);
            let width = if param == SweepParam::A { x } else { s.width };
            let theta = if param == SweepParam::Theta {
                x
            } else {
                s.theta
            };
            let field = FieldRegion::new(b, width)?;
            evaluate(
                param.name(),
                &s.particle,
                &beam,
                &field,
                theta,
                s.evanescence,
            )
        })
        .collect();

    let mut inputs = vec![
        ("sweep".to_string(), param.name().to_string()),
        (
            "values".to_string(),
            values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" "),
        ),
    ];
    if let Some(input) = beam_input {
        inputs.push(("beam".into(), input.describe()));
    }
    if let Some(b) = b_fixed {
        inputs.push(("B_T".into(), num(b)));
    }
    let meta = metadata("table", &s, &inputs);

    let mut records = Vec::with_capacity(rows.len());
    let mut failure = None;
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Ok(r) => records.push(r),
            Err(e) => {
                failure = Some((i, e));
                break;
            }
        }
    }
    let mut text = render(s.format, &meta, &records)?;
    if let Some((i, e)) = failure {
        // the CSV stays parseable; JSON gets the note on stderr only
        if s.format == Format::Csv {
            let _ = writeln!(
                text,
                "# aborted at row {i} ({} = {}): {e}",
                param.name(),
                values[i]
            );
        }
        emit(args.point.out.as_deref(), &text)?;
        eprintln!(
            "table aborted at row {i} ({} = {}); {} complete row(s) written",
            param.name(),
            values[i],
            records.len()
        );
        return Err(e);
    }
    emit(args.point.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct PacketSummary {
    param: &'static str,
    value: f64,
    v0_mps: f64,
    #[serde(rename = "B_T")]
    b_t: f64,
    k0: f64,
    sigma_k: f64,
    n_points: usize,
    /// Cutoff wavenumber when evanescent points were dropped.
    truncated_below: Option<f64>,
    spectral_norm: f64,
    integrated_standard: f64,
    integrated_modified: f64,
    /// Richardson estimates of the Simpson error; absent for grids without
    /// a half-resolution rule.
    integrated_standard_err: Option<f64>,
    integrated_modified_err: Option<f64>,
    l2_distance: f64,
    max_gap: f64,
    peak_density: f64,
    file: Option<String>,
}

#[derive(Debug, Serialize)]
struct DensityColumns {
    k: Vec<f64>,
    spectral: Vec<f64>,
    p_std: Vec<f64>,
    p_mod: Vec<f64>,
    density_std: Vec<f64>,
    density_mod: Vec<f64>,
}

fn density_columns(table: &SpinDensityTable, normalized: bool) -> DensityColumns {
    let p_mod: Vec<f64> = table
        .rows
        .iter()
        .map(|r| {
            if normalized {
                r.p_modified_normalized
            } else {
                r.p_modified_raw
            }
        })
        .collect();
    DensityColumns {
        k: table.rows.iter().map(|r| r.k).collect(),
        spectral: table.rows.iter().map(|r| r.spectral).collect(),
        p_std: table.rows.iter().map(|r| r.p_standard).collect(),
        density_std: table.rows.iter().map(|r| r.density_standard).collect(),
        density_mod: table
            .rows
            .iter()
            .zip(&p_mod)
            .map(|(r, p)| r.spectral * p)
            .collect(),
        p_mod,
    }
}

fn density_csv(header: &str, c: &DensityColumns) -> String {
    let mut out = header.to_string();
    out.push_str("k,spectral,p_std,p_mod,density_std,density_mod\n");
    for i in 0..c.k.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(c.k[i]),
            num(c.spectral[i]),
            num(c.p_std[i]),
            num(c.p_mod[i]),
            num(c.density_std[i]),
            num(c.density_mod[i])
        );
    }
    out
}

const SUMMARY_COLUMNS: &str = "param,value,v0_mps,B_T,k0,sigma_k,n_points,truncated_below,\
spectral_norm,integrated_standard,integrated_modified,integrated_standard_err,\
integrated_modified_err,l2_distance,max_gap,peak_density,file";

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn summary_row(s: &PacketSummary) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        s.param,
        num(s.value),
        num(s.v0_mps),
        num(s.b_t),
        num(s.k0),
        num(s.sigma_k),
        s.n_points,
        opt(s.truncated_below),
        num(s.spectral_norm),
        num(s.integrated_standard),
        num(s.integrated_modified),
        opt(s.integrated_standard_err),
        opt(s.integrated_modified_err),
        num(s.l2_distance),
        num(s.max_gap),
        num(s.peak_density),
        s.file.as_deref().unwrap_or("")
    )
}

fn gnuplot_script(summaries: &[PacketSummary]) -> String {
    let mut out = String::from(
        "# Companion plot for the density files in this directory.\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set xlabel 'k (1/m)'\n\
         set ylabel 'spin +x density'\n\
         plot \\\n",
    );
    let lines: Vec<String> = summaries
        .iter()
        .filter_map(|s| s.file.as_ref().map(|f| (s, f)))
        .map(|(s, f)| {
            let label = format!("{}={}", s.param, s.value);
            format!(
                "  '{f}' every ::1 using 1:5 with lines dashtype 2 title 'standard {label}', \\\n  \
                 '{f}' every ::1 using 1:6 with lines title 'modified {label}'"
            )
        })
        .collect();
    out.push_str(&lines.join(", \\\n"));
    out.push('\n');
    out
}

pub fn packet(args: &PacketArgs) -> CliResult<()> {
    let s = Settings::resolve(&args.point)?;
    let values = sweep_values(&args.values)?;
    if args.grid_points < 3 || args.grid_points.is_multiple_of(2) {
        return Err(CliError::usage(
            "grid-points",
            format!("{} is not an odd count >= 3", args.grid_points),
        ));
    }
    let (param_name, beam_input, b_fixed) = match args.param {
        PacketParam::B => ("B", Some(s.require_beam()?), None),
        PacketParam::V => {
            if s.beam.is_some() {
                return Err(CliError::usage(
                    "beam",
                    "sweeping v: drop --v/--E-eV/--k (and beam keys in the config)",
                ));
            }
            ("v", None, Some(s.require_b()?))
        }
    };
    let policy = if args.point.allow_evanescent {
        GridEvanescence::Continue
    } else if args.truncate {
        GridEvanescence::Truncate
    } else {
        GridEvanescence::Fail
    };
    let dir: PathBuf = args
        .point
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("packet_out"));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;

    let mut inputs = vec![
        ("sweep".to_string(), param_name.to_string()),
        (
            "values".to_string(),
            values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" "),
        ),
        ("sigma_rel".to_string(), num(args.sigma_rel)),
        ("grid_points".to_string(), args.grid_points.to_string()),
        (
            "grid_half_width_sigmas".to_string(),
            num(DEFAULT_GRID_HALF_WIDTH_SIGMAS),
        ),
        (
            "modified_probability".to_string(),
            if args.normalized { "normalized" } else { "raw" }.to_string(),
        ),
        (
            "grid_evanescence".to_string(),
            format!("{policy:?}").to_lowercase(),
        ),
    ];
    if let Some(input) = beam_input {
        inputs.push(("beam".into(), input.describe()));
    }
    if let Some(b) = b_fixed {
        inputs.push(("B_T".into(), num(b)));
    }
    let meta = metadata("packet", &s, &inputs);
    let header = comment_header(&meta);

    let mut summaries = Vec::with_capacity(values.len());
    let mut json_tables = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        let beam = match beam_input {
            Some(input) => input.beam(&s.particle)?,
            None => BeamInput::Velocity(x).beam(&s.particle)?,
        };
        let b = b_fixed.unwrap_or(x);
        let field = FieldRegion::new(b, s.width)?;
        let packet = GaussianPacket::with_relative_width(0.0, beam.wavenumber, args.sigma_rel)?;
        let half = DEFAULT_GRID_HALF_WIDTH_SIGMAS * packet.sigma_k();
        let grid = KGrid::new(packet.k0 - half, packet.k0 + half, args.grid_points)?;
        let table = SpinDensityTable::build(&packet, &s.particle, &field, grid, policy)?;
        if let Some(cut) = table.truncated_below {
            eprintln!(
                "warning: {param_name} = {x}: dropped evanescent grid points with k <= {cut:.6e} 1/m"
            );
        }
        let cols = density_columns(&table, args.normalized);
        let norm = integrate_density(&table.grid, &cols.spectral)?;
        let int_std = integrate_density(&table.grid, &cols.density_std)?;
        let int_mod = integrate_density(&table.grid, &cols.density_mod)?;
        let sq: Vec<f64> = cols
            .density_std
            .iter()
            .zip(&cols.density_mod)
            .map(|(a, b)| (a - b) * (a - b))
            .collect();
        let l2 = integrate_density(&table.grid, &sq)?.value.max(0.0).sqrt();
        let max_gap = sq.iter().map(|d| d.sqrt()).fold(0.0, f64::max);

        let file = match s.format {
            Format::Csv => {
                let name = format!("density_{i:03}.csv");
                let path = dir.join(&name);
                let mut file_header = header.clone();
                let _ = writeln!(file_header, "# {param_name}: {}", num(x));
                fs::write(&path, density_csv(&file_header, &cols))
                    .map_err(|e| CliError::io(path.display().to_string(), e))?;
                Some(name)
            }
            Format::Json => None,
        };
        let summary = PacketSummary {
            param: param_name,
            value: x,
            v0_mps: beam.velocity,
            b_t: b,
            k0: packet.k0,
            sigma_k: packet.sigma_k(),
            n_points: table.grid.n_points,
            truncated_below: table.truncated_below,
            spectral_norm: norm.value,
            integrated_standard: int_std.value,
            integrated_modified: int_mod.value,
            integrated_standard_err: int_std.error_estimate,
            integrated_modified_err: int_mod.error_estimate,
            l2_distance: l2,
            max_gap,
            peak_density: table.peak_density(),
            file,
        };
        if s.format == Format::Json {
            json_tables.push(cols);
        }
        summaries.push(summary);
    }

    match s.format {
        Format::Csv => {
            let mut text = header.clone();
            text.push_str(SUMMARY_COLUMNS);
            text.push('\n');
            for sm in &summaries {
                text.push_str(&summary_row(sm));
                text.push('\n');
            }
            let path = dir.join("summary.csv");
            fs::write(&path, &text).map_err(|e| CliError::io(path.display().to_string(), e))?;
            let gp = dir.join("plot.gp");
            fs::write(&gp, gnuplot_script(&summaries))
                .map_err(|e| CliError::io(gp.display().to_string(), e))?;
            emit(None, &text)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "meta": meta_json(&meta),
                "summary": summaries,
                "densities": json_tables,
            });
            let text = serde_json::to_string_pretty(&doc)? + "\n";
            let path = dir.join("packet.json");
            fs::write(&path, &text).map_err(|e| CliError::io(path.display().to_string(), e))?;
            emit(None, &(serde_json::to_string_pretty(&summaries)? + "\n"))
        }
    }
}

#[derive(Debug, Serialize)]
struct Calibration {
    #[serde(rename = "B_T")]
    b_t: f64,
    v_mps: f64,
    theta_rad: f64,
    target_p: f64,
    branch: usize,
    width_m: f64,
    phi_std: f64,
    p_std: f64,
    /// Largest `|p_std − p|` over the extra anchors (0 without anchors).
    anchor_residual: f64,
}

fn parse_anchor(spec: &str) -> CliResult<CalibrationAnchor> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage("anchor", format!("`{spec}` is not B:v:p")))?;
    match parts.as_slice() {
        [b, v, p] => Ok(CalibrationAnchor {
            b_tesla: *b,
            velocity: *v,
            probability: *p,
        }),
        _ => Err(CliError::usage("anchor", format!("`{spec}` is not B:v:p"))),
    }
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult<()> {
    let s = Settings::resolve(&args.point)?;
    let b = s.require_b()?;
    let v = s.require_beam()?.beam(&s.particle)?.velocity;
    let (width, branch, residual) = if args.anchor.is_empty() {
        let w = calibrate_width(&s.particle, b, v, s.theta, args.target_p, args.branch)?;
        (w, args.branch, 0.0)
    } else {
        let checks = args
            .anchor
            .iter()
            .map(|a| parse_anchor(a))
            .collect::<CliResult<Vec<_>>>()?;
        let primary = CalibrationAnchor {
            b_tesla: b,
            velocity: v,
            probability: args.target_p,
        };
        let fit = calibrate_width_joint(&s.particle, primary, &checks, s.theta, args.max_branch)?;
        (fit.width, fit.branch, fit.residual)
    };
    let field = FieldRegion::new(b, width)?;
    let phi = standard_phase(&s.particle, &field, &beam_from_velocity(&s.particle, v)?).phi;
    let c = Calibration {
        b_t: b,
        v_mps: v,
        theta_rad: s.theta,
        target_p: args.target_p,
        branch,
        width_m: width,
        phi_std: phi,
        p_std: detection_probability_standard(phi, s.theta),
        anchor_residual: residual,
    };
    let mut inputs = vec![("target_p".to_string(), num(args.target_p))];
    for a in &args.anchor {
        inputs.push(("anchor".to_string(), a.clone()));
    }
    let meta = metadata("calibrate", &s, &inputs);
    let text = match s.format {
        Format::Csv => format!(
            "{}B_T,v_mps,theta_rad,target_p,branch,width_m,phi_std,p_std,anchor_residual\n\
             {},{},{},{},{},{},{},{},{}\n",
            comment_header(&meta),
            num(c.b_t),
            num(c.v_mps),
            num(c.theta_rad),
            num(c.target_p),
            c.branch,
            num(c.width_m),
            num(c.phi_std),
            num(c.p_std),
            num(c.anchor_residual)
        ),
        Format::Json => {
            serde_json::to_string_pretty(
                &serde_json::json!({ "meta": meta_json(&meta), "calibration": c }),
            )? + "\n"
        }
    };
    emit(args.point.out.as_deref(), &text)
}
