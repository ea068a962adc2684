use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nsamg_core::problem::{Discretization, ProblemSpec, DEFAULT_THETA};
use nsamg_core::transfer::{InterpKind, RestrictKind, TransferConfig, DEFAULT_THETA_S};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "nsamg", version, about = "Nonsymmetric AMG laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the test matrix as MatrixMarket plus a problem description.
    Generate(CommonArgs),
    /// Approximation constants, projection norms and theory bounds.
    Analyze(CommonArgs),
    /// Build a hierarchy and run a two-grid or recursive cycle.
    Solve(CommonArgs),
    /// One row of constants per (n, transfer pair).
    Sweep(CommonArgs),
    /// Evaluate or fuzz the 2x2 block singular value bounds.
    BlockBound(BlockBoundArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub disc: Option<String>,
    /// Cells per side; a comma-separated list for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Read the matrix from a MatrixMarket file instead of generating it.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub interp: Option<String>,
    #[arg(long)]
    pub restrict: Option<String>,
    /// Transfer pairs for `sweep`, written restrict+interp or `counterexample`.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Vec<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub mu: Option<usize>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long = "theta-s")]
    pub theta_s: Option<f64>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Any of csv, svg, json.
    #[arg(long, value_delimiter = ',')]
    pub formats: Vec<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BlockBoundArgs {
    /// a0 a1 b c d0 d1
    #[arg(num_args = 6, allow_negative_numbers = true)]
    pub values: Vec<f64>,
    /// Sample this many scalar quadruples instead.
    #[arg(long)]
    pub fuzz: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Generated(ProblemSpec),
    Matrix(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub json: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            svg: true,
            json: true,
        }
    }
}

/// A transfer pair named on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairChoice {
    Builders(InterpKind, RestrictKind),
    Counterexample,
}

impl PairChoice {
    pub fn label(&self) -> String {
        match self {
            PairChoice::Builders(i, r) => format!("{r}+{i}"),
            PairChoice::Counterexample => "counterexample".into(),
        }
    }
}

impl FromStr for PairChoice {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if s == "counterexample" {
            return Ok(PairChoice::Counterexample);
        }
        let (r, i) = s
            .split_once('+')
            .ok_or_else(|| CliError::Config(format!("pair '{s}' is not restrict+interp")))?;
        Ok(PairChoice::Builders(i.parse()?, r.parse()?))
    }
}

/// Fully resolved settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: ProblemSource,
    pub spec: ProblemSpec,
    pub n_list: Vec<usize>,
    pub transfer: TransferConfig,
    pub pairs: Vec<PairChoice>,
    pub beta: f64,
    pub gamma: f64,
    pub nu: usize,
    pub mu: usize,
    pub levels: usize,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
}

const KEYS: &[&str] = &[
    "disc", "n", "theta", "tau", "matrix", "interp", "restrict", "pairs", "beta", "gamma", "nu", "mu", "levels",
    "theta-s", "degree", "seed", "out", "formats", "tol", "max-iters",
];

pub fn parse_config_file(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::Config(format!("config value for '{key}' is invalid: '{v}'")))
        })
        .transpose()
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => from_file(file, key),
    }
}

fn pick_list<T: FromStr>(flag: &[T], file: &BTreeMap<String, String>, key: &str) -> CliResult<Vec<T>>
where
    T: Clone,
{
    if !flag.is_empty() {
        return Ok(flag.to_vec());
    }
    match file.get(key) {
        None => Ok(Vec::new()),
        Some(v) => v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<T>()
                    .map_err(|_| CliError::Config(format!("config value for '{key}' is invalid: '{v}'")))
            })
            .collect(),
    }
}

fn parse_disc(s: &str) -> CliResult<Discretization> {
    match s {
        "upwind" | "upwind_fv" => Ok(Discretization::UpwindFv),
        "supg" => Ok(Discretization::Supg),
        other => Err(CliError::Config(format!("unknown discretization '{other}' (upwind|supg)"))),
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => parse_config_file(&std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?)?,
            None => BTreeMap::new(),
        };
        Self::resolve_with(args, &file)
    }

    pub fn resolve_with(args: &CommonArgs, file: &BTreeMap<String, String>) -> CliResult<Self> {
        let disc = match pick(args.disc.clone(), file, "disc")? {
            Some(d) => parse_disc(&d)?,
            None => Discretization::UpwindFv,
        };
        let n_list: Vec<usize> = pick_list(&args.n, file, "n")?;
        let n_list = if n_list.is_empty() { vec![8] } else { n_list };
        let seed = pick(args.seed, file, "seed")?.unwrap_or(0);
        let spec = ProblemSpec {
            disc,
            n: n_list[0],
            theta: pick(args.theta, file, "theta")?.unwrap_or(DEFAULT_THETA),
            tau: pick(args.tau, file, "tau")?.unwrap_or(1.0),
            seed,
        };
        spec.validate()?;
        let source = match pick(args.matrix.clone(), file, "matrix")? {
            Some(p) => ProblemSource::Matrix(p),
            None => ProblemSource::Generated(spec),
        };

        let interp: InterpKind = pick(args.interp.clone(), file, "interp")?
            .map_or(Ok(InterpKind::Classical), |s: String| s.parse())?;
        let restrict: RestrictKind = pick(args.restrict.clone(), file, "restrict")?
            .map_or(Ok(RestrictKind::Lair), |s: String| s.parse())?;
        let transfer = TransferConfig {
            interp,
            restrict,
            theta_s: pick(args.theta_s, file, "theta-s")?.unwrap_or(DEFAULT_THETA_S),
            degree: pick(args.degree, file, "degree")?.unwrap_or(1),
        };
        transfer.validate()?;

        let pair_names: Vec<String> = pick_list(&args.pairs, file, "pairs")?;
        let pairs = if pair_names.is_empty() {
            vec![PairChoice::Builders(interp, restrict)]
        } else {
            pair_names.iter().map(|s| s.parse()).collect::<CliResult<Vec<_>>>()?
        };

        let format_names: Vec<String> = pick_list(&args.formats, file, "formats")?;
        let formats = if format_names.is_empty() {
            Formats::default()
        } else {
            let mut f = Formats {
                csv: false,
                svg: false,
                json: false,
            };
            for name in &format_names {
                match name.as_str() {
                    "csv" => f.csv = true,
                    "svg" => f.svg = true,
                    "json" => f.json = true,
                    other => return Err(CliError::Config(format!("unknown format '{other}' (csv|svg|json)"))),
                }
            }
            f
        };

        let beta = pick(args.beta, file, "beta")?.unwrap_or(1.0);
        let gamma = pick(args.gamma, file, "gamma")?.unwrap_or(1.0);
        if !(beta > 0.5 && gamma > 0.0) {
            return Err(CliError::Config(format!("need beta > 1/2 and gamma > 0 (beta = {beta}, gamma = {gamma})")));
        }
        let mu = pick(args.mu, file, "mu")?.unwrap_or(2);
        if mu == 0 {
            return Err(CliError::Config("mu must be at least 1".into()));
        }
        let levels = pick(args.levels, file, "levels")?.unwrap_or(nsamg_core::solver::hierarchy::DEFAULT_MAX_LEVELS);
        if levels == 0 {
            return Err(CliError::Config("levels must be at least 1".into()));
        }
        let tol = pick(args.tol, file, "tol")?.unwrap_or(1e-8);
        if !(tol >= 0.0) {
            return Err(CliError::Config(format!("tol = {tol} must be non-negative")));
        }
        Ok(Self {
            source,
            spec,
            n_list,
            transfer,
            pairs,
            beta,
            gamma,
            nu: pick(args.nu, file, "nu")?.unwrap_or(2),
            mu,
            levels,
            out_dir: pick(args.out.clone(), file, "out")?.unwrap_or_else(|| PathBuf::from("nsamg-out")),
            formats,
            seed,
            tol,
            max_iters: pick(args.max_iters, file, "max-iters")?.unwrap_or(200),
        })
    }

    pub fn single_n(&self) -> CliResult<usize> {
        match self.n_list.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::Config("this command takes a single --n".into())),
        }
    }

    pub fn spec_for(&self, n: usize) -> ProblemSpec {
        ProblemSpec { n, ..self.spec }
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn matrix_path(&self) -> Option<&Path> {
        match &self.source {
            ProblemSource::Matrix(p) => Some(p),
            ProblemSource::Generated(_) => None,
        }
    }
}
