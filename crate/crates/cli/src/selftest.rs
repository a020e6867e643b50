//! Built-in invariant checks, run by `larmor selftest`.

use larmor_core::phase::wrapped_difference;
use larmor_core::quadrature::simpson;
use larmor_core::{
    beam_from_velocity, channel_wavenumbers, high_energy_limit_phases, scatter_channel,
    transmission_amplitude, transmission_re_im_closed_form, ChannelKind, Evanescence, FieldRegion,
    GaussianPacket, KGrid, ParticleSpec, TransmittedSpinor, CALIBRATED_WIDTH_M,
};
use num_complex::Complex64;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

/// Propagating `(v, B, a)` points on a log grid.
fn grid_inputs(p: &ParticleSpec) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for v in log_grid(1.0, 1e4, 20) {
        for b in log_grid(1e-4, 5.0, 20) {
            if 0.5 * p.mass * v * v <= p.zeeman_energy(b) {
                continue;
            }
            for a in log_grid(1e-6, 1e-2, 10) {
                out.push((v, b, a));
            }
        }
    }
    out
}

fn unitarity(p: &ParticleSpec) -> larmor_core::Result<Check> {
    let inputs = grid_inputs(p);
    let mut worst = 0.0f64;
    for &(v, b, a) in &inputs {
        let beam = beam_from_velocity(p, v)?;
        let field = FieldRegion::new(b, a)?;
        for kind in [ChannelKind::Well, ChannelKind::Barrier] {
            let ch = scatter_channel(&beam, p, &field, kind, Evanescence::Reject)?;
            worst = worst.max(ch.flux_defect().abs());
        }
    }
    Ok(Check {
        name: "unitarity",
        pass: worst <= 1e-12,
        detail: format!("{} points, max ||t|^2+|r|^2-1| = {worst:.2e}", inputs.len()),
    })
}

fn closed_form(p: &ParticleSpec) -> larmor_core::Result<Check> {
    let inputs = grid_inputs(p);
    let mut worst = 0.0f64;
    for &(v, b, a) in &inputs {
        let beam = beam_from_velocity(p, v)?;
        let wn = channel_wavenumbers(&beam, p, b, Evanescence::Reject)?;
        let Some((k, k1, k2)) = wn.triple() else {
            continue;
        };
        for kc in [k1, k2] {
            let t = transmission_amplitude(k, kc, a)?;
            let (re, im) = transmission_re_im_closed_form(k, kc, a)?;
            let scale = t.norm();
            if scale > 0.0 {
                worst = worst.max((t - Complex64::new(re, im)).norm() / scale);
            }
        }
    }
    Ok(Check {
        name: "closed-form equivalence",
        pass: worst <= 1e-10,
        detail: format!("max relative difference {worst:.2e}"),
    })
}

fn limit_recovery(p: &ParticleSpec) -> larmor_core::Result<Check> {
    let b = 2.0;
    let field = FieldRegion::new(b, CALIBRATED_WIDTH_M)?;
    let mut errors = Vec::new();
    for v in [200.0, 2000.0, 20000.0] {
        let beam = beam_from_velocity(p, v)?;
        let wn = channel_wavenumbers(&beam, p, b, Evanescence::Reject)?;
        let (up, down) = high_energy_limit_phases(&wn, field.width)?;
        let well = scatter_channel(&beam, p, &field, ChannelKind::Well, Evanescence::Reject)?;
        let barrier = scatter_channel(&beam, p, &field, ChannelKind::Barrier, Evanescence::Reject)?;
        let s = TransmittedSpinor::from_channels(&well, &barrier);
        errors.push([
            wrapped_difference(s.phase_up, up).abs(),
            wrapped_difference(s.phase_down, down).abs(),
            well.transmission_deficit(),
            barrier.transmission_deficit(),
        ]);
    }
    let min_factor = (0..4)
        .flat_map(|j| [errors[0][j] / errors[1][j], errors[1][j] / errors[2][j]])
        .fold(f64::INFINITY, f64::min);
    Ok(Check {
        name: "high-energy limit recovery",
        pass: min_factor >= 10.0,
        detail: format!("smallest error reduction per decade of v: x{min_factor:.0}"),
    })
}

fn quadrature(p: &ParticleSpec) -> larmor_core::Result<Check> {
    let k0 = beam_from_velocity(p, 10.0)?.wavenumber;
    let packet = GaussianPacket::with_relative_width(0.0, k0, 0.05)?;
    let half = 6.0 * packet.sigma_k();
    let integral = |n: usize| -> larmor_core::Result<f64> {
        let grid = KGrid::new(k0 - half, k0 + half, n)?;
        let samples: Vec<f64> = grid
            .points()
            .iter()
            .map(|&k| packet.spectral_density(k))
            .collect();
        simpson(grid.step(), &samples)
    };
    let reference = integral(8193)?;
    let errs = [17, 33, 65]
        .into_iter()
        .map(|n| integral(n).map(|x| (x - reference).abs()))
        .collect::<larmor_core::Result<Vec<_>>>()?;
    let factors = [errs[0] / errs[1], errs[1] / errs[2]];
    let norm = integral(2001)?;
    Ok(Check {
        name: "quadrature convergence",
        pass: factors.iter().all(|&f| f >= 8.0) && (norm - 1.0).abs() <= 1e-6,
        detail: format!(
            "halving h reduces the error x{:.0}, x{:.0}; norm - 1 = {:.1e}",
            factors[0],
            factors[1],
            norm - 1.0
        ),
    })
}

type CheckFn = fn(&ParticleSpec) -> larmor_core::Result<Check>;

pub fn run_checks() -> Vec<Check> {
    let p = ParticleSpec::neutron();
    let checks: [(&'static str, CheckFn); 4] = [
        ("unitarity", unitarity),
        ("closed-form equivalence", closed_form),
        ("high-energy limit recovery", limit_recovery),
        ("quadrature convergence", quadrature),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            f(&p).unwrap_or_else(|e| Check {
                name,
                pass: false,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}
