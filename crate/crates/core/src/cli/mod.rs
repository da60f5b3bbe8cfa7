//! Command-line front end. Every command produces one JSON report whose
//! pass flag can be recomputed from the numbers and tolerances it contains.

mod args;
mod commands;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use args::{BundleCase, Cli, Command};
pub use commands::Results;

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SEARCH_FAILURE: i32 = 3;
pub const EXIT_NONCONVERGENT: i32 = 4;

/// Validated settings shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub mesh_level: u32,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub inputs_digest: String,
    pub results: Results,
    pub pass: bool,
    pub flags: Vec<String>,
}

/// What a command hands back before serialization.
pub(crate) struct Outcome {
    pub results: Results,
    pub pass: bool,
    pub flags: Vec<String>,
    pub csv: Option<String>,
    /// Exit code to use when `pass` is false.
    pub failure_code: i32,
}

/// Default tolerances per command; `--tol` may only override these names.
fn default_tolerances(command: &Command) -> BTreeMap<String, f64> {
    let pairs: &[(&str, f64)] = match command {
        Command::Degree { .. } => &[("residual", 0.2)],
        Command::Swtable { .. } | Command::Rh { .. } => &[],
        Command::Eigen { .. } => &[("residual", 1e-8), ("witness", 1e-6)],
        Command::Span { .. } => &[("sigma", 1e-6)],
        Command::Bundle { .. } => &[("defect", 1e-12), ("det", 1e-8), ("rank-drop", 1e-5)],
    };
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn echo(command: &Command) -> String {
    let path = |p: &Path| p.display().to_string();
    match command {
        Command::Degree { map: Some(m), .. } => format!("degree --map {m}"),
        Command::Degree {
            samples: Some(s), ..
        } => format!("degree --samples {}", path(s)),
        Command::Degree { .. } => "degree".into(),
        Command::Swtable { max_k, max_n } => format!("swtable --max-k {max_k} --max-n {max_n}"),
        Command::Eigen { matrix } => format!("eigen --matrix {}", path(matrix)),
        Command::Span { matrices } => format!("span --matrices {}", path(matrices)),
        Command::Bundle { case } => format!("bundle --case {}", case.tag()),
        Command::Rh { n } => format!("rh {n}"),
    }
}

fn tag(command: &Command) -> &'static str {
    match command {
        Command::Degree { .. } => "degree",
        Command::Swtable { .. } => "swtable",
        Command::Eigen { .. } => "eigen",
        Command::Span { .. } => "span",
        Command::Bundle { .. } => "bundle",
        Command::Rh { .. } => "rh",
    }
}

pub fn config_from(cli: &Cli) -> Result<RunConfig, Error> {
    let mut tolerances = default_tolerances(&cli.command);
    for (name, value) in &cli.tol {
        match tolerances.get_mut(name) {
            Some(slot) => *slot = *value,
            None => {
                let known: Vec<&str> = tolerances.keys().map(String::as_str).collect();
                return Err(Error::Input(format!(
                    "unknown tolerance `{name}` for {}; known: [{}]",
                    tag(&cli.command),
                    known.join(", ")
                )));
            }
        }
    }
    Ok(RunConfig {
        command: tag(&cli.command).to_string(),
        mesh_level: cli.mesh_level,
        seed: cli.seed,
        tolerances,
        out: cli.out.clone(),
    })
}

/// Input files named on the command line, in order.
fn input_files(command: &Command) -> Vec<&Path> {
    match command {
        Command::Degree {
            samples: Some(p), ..
        } => vec![p.as_path()],
        Command::Eigen { matrix } => vec![matrix.as_path()],
        Command::Span { matrices } => vec![matrices.as_path()],
        _ => vec![],
    }
}

fn digest(echo: &str, config: &RunConfig, files: &[(&Path, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    h.update(echo.as_bytes());
    h.update(serde_json::to_vec(config).expect("plain data"));
    for (_, bytes) in files {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Exit code for an error that escaped a command.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Input(_) | Error::Parameter(_) | Error::Dimension(_) => EXIT_USAGE,
        Error::NonConvergentDegree { .. }
        | Error::DegenerateMap { .. }
        | Error::Undersampled { .. }
        | Error::IrregularValue { .. } => EXIT_NONCONVERGENT,
        Error::SearchFailure { .. } | Error::NoNullVector { .. } => EXIT_SEARCH_FAILURE,
    }
}

/// Runs a parsed command and returns the report plus its exit code.
pub fn execute(cli: &Cli) -> Result<(Report, i32, Option<String>), Error> {
    let config = config_from(cli)?;
    let files = input_files(&cli.command)
        .into_iter()
        .map(|p| {
            fs::read(p)
                .map(|b| (p, b))
                .map_err(|e| Error::Input(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let echo = echo(&cli.command);
    let inputs_digest = digest(&echo, &config, &files);
    let texts: Vec<String> = files
        .iter()
        .map(|(_, b)| String::from_utf8_lossy(b).into_owned())
        .collect();
    let outcome = commands::run(&cli.command, &config, &texts)?;
    let code = if outcome.pass {
        EXIT_PASS
    } else {
        outcome.failure_code
    };
    let report = Report {
        command: echo,
        config,
        inputs_digest,
        results: outcome.results,
        pass: outcome.pass,
        flags: outcome.flags,
    };
    Ok((report, code, outcome.csv))
}

fn csv_path(cli: &Cli, requested: Option<&Path>) -> PathBuf {
    if let Some(path) = requested {
        return path.to_path_buf();
    }
    match &cli.out {
        Some(out) => out.with_extension("csv"),
        None => PathBuf::from(format!("oddaxis-{}.csv", tag(&cli.command))),
    }
}

fn init_logging() -> Result<(), Error> {
    let level = match std::env::var("ODDAXIS_LOG").as_deref() {
        Err(_) | Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => {
            return Err(Error::Input(format!(
                "ODDAXIS_LOG must be quiet, info or debug, got `{other}`"
            )))
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    Ok(())
}

/// Parses arguments, runs the command, writes outputs, and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    if let Err(e) = init_logging() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            log::debug!("thread pool already configured: {e}");
        }
    }
    let started = Instant::now();
    let (report, code, csv) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    let written = match &cli.out {
        Some(path) => fs::write(path, &json).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if let (Some(requested), Some(csv)) = (&cli.emit_csv, csv) {
        let path = csv_path(&cli, requested.as_deref());
        if let Err(e) = fs::write(&path, csv) {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
        log::info!("wrote {}", path.display());
    }
    log::info!(
        "{} finished in {:.3} s (pass: {})",
        report.command,
        started.elapsed().as_secs_f64(),
        report.pass
    );
    code
}
