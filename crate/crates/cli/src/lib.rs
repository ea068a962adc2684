//! Command-line front end: configuration, the five commands and their
//! CSV / JSON / SVG artifacts.

pub mod analyze;
pub mod block_bound;
pub mod config;
pub mod error;
pub mod generate;
pub mod output;
pub mod problem;
pub mod solve;
pub mod svg;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use nsamg_core::theory::BlockBounds;

use config::{BlockBoundArgs, Cli, Command, RunConfig};
use error::{CliError, CliResult};

/// Runs one parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let written: Vec<PathBuf> = match &cli.command {
        Command::Generate(a) => generate::run_generate(&RunConfig::resolve(a)?)?,
        Command::Analyze(a) => analyze::run_analyze(&RunConfig::resolve(a)?)?,
        Command::Solve(a) => solve::run_solve(&RunConfig::resolve(a)?)?,
        Command::Sweep(a) => sweep::run_sweep(&RunConfig::resolve(a)?)?,
        Command::BlockBound(a) => return run_block_bound(a, out),
    };
    for p in written {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

pub fn run_block_bound(args: &BlockBoundArgs, out: &mut dyn Write) -> CliResult<()> {
    match (args.fuzz, args.values.as_slice()) {
        (Some(n), []) => {
            let f = block_bound::fuzz(n, args.seed.unwrap_or(0));
            write!(out, "{}", block_bound::format_fuzz(&f))?;
        }
        (None, [a0, a1, b, c, d0, d1]) => {
            let r = block_bound::evaluate(BlockBounds::new(*a0, *a1, *b, *c, *d0, *d1))
                .map_err(|e| CliError::Config(e.to_string()))?;
            write!(out, "{}", block_bound::format_report(&r))?;
        }
        _ => {
            return Err(CliError::Config(
                "block-bound takes either six values a0 a1 b c d0 d1 or --fuzz N".into(),
            ))
        }
    }
    Ok(())
}
