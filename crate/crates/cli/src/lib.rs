//! Command-line front end: single scans, parameter sweeps, wave-packet
//! density dumps, width calibration and a self-test.

pub mod args;
pub mod commands;
pub mod error;
pub mod record;
pub mod selftest;
pub mod settings;
pub mod sweep;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Scan(a) => commands::scan(a),
        Command::Table(a) => commands::table(a),
        Command::Packet(a) => commands::packet(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Selftest => {
            let checks = selftest::run_checks();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            match checks.iter().filter(|c| !c.pass).count() {
                0 => Ok(()),
                n => Err(CliError::SelfTest(n)),
            }
        }
    }
}
