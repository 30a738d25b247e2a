use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};
use wgqed::{emit, execute, CliError, Entries, ExperimentConfig, Format};

/// Waveguide QED transport, photon statistics and collective-mode simulations.
#[derive(Debug, Parser)]
#[command(name = "wgqed", version)]
struct Cli {
    /// Scenario name; may instead come from the config file.
    scenario: Option<String>,

    /// Configuration file (key = value lines, [section] headers, # comments).
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Output format; defaults to the output file extension, then csv.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// RNG seed for disorder sampling.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,

    /// Record wall time in the output metadata (output is then not reproducible byte for byte).
    #[arg(long)]
    timing: bool,
}

const KNOWN_FLAGS: [&str; 8] = ["-c", "--config", "-o", "--output", "--format", "--seed", "--threads", "--timing"];

type Overrides = Vec<(String, String)>;

/// Separates parameter overrides (`--key value`, `--key=value`) from the flags clap knows.
fn split_args(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    let mut known = vec![args.first().cloned().unwrap_or_else(|| "wgqed".into())];
    let mut overrides: Overrides = Vec::new();
    let mut it = args.into_iter().skip(1);
    while let Some(arg) = it.next() {
        let flag = arg.split_once('=').map_or(arg.as_str(), |(f, _)| f);
        let is_known = KNOWN_FLAGS.contains(&flag) || matches!(flag, "-h" | "--help" | "-V" | "--version");
        if is_known || !arg.starts_with("--") || arg == "--" {
            let takes_value = !arg.contains('=') && !matches!(flag, "--timing" | "-h" | "--help" | "-V" | "--version");
            known.push(arg.clone());
            if is_known && takes_value {
                if let Some(v) = it.next() {
                    known.push(v);
                }
            }
            continue;
        }
        let body = &arg[2..];
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("missing value for --{body}")))?;
                (body.to_string(), v)
            }
        };
        if overrides.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Usage(format!("duplicate key '{key}' on the command line")));
        }
        overrides.push((key, value));
    }
    Ok((known, overrides))
}

fn real_main() -> Result<(), CliError> {
    let (known, overrides) = split_args(std::env::args().collect())?;
    let command = Cli::command().after_help(wgqed::scenario_help());
    let matches = command.get_matches_from(known);
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut entries = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Entries::parse(&text)?
        }
        None => Entries::default(),
    };
    if let Some(name) = &cli.scenario {
        match entries.get("scenario") {
            Some(existing) if existing != name => {
                return Err(CliError::Usage(format!(
                    "scenario '{name}' conflicts with scenario '{existing}' in the config file"
                )))
            }
            _ => entries.set("scenario", name),
        }
    }
    for (key, value) in &overrides {
        entries.set(key, value);
    }
    if let Some(seed) = cli.seed {
        entries.set("seed", &seed.to_string());
    }
    let config = ExperimentConfig::from_entries(&entries)?;

    let output = cli.output.clone().or_else(|| config.output.clone().map(PathBuf::from));
    let format = cli
        .format
        .as_deref()
        .or(config.format.as_deref())
        .and_then(Format::parse)
        .or_else(|| output.as_deref().map(Format::from_path))
        .unwrap_or(Format::Csv);

    let envelope = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| execute(&config, cli.timing))?,
        None => execute(&config, cli.timing)?,
    };
    let bytes = emit(&envelope, format)?;
    match output {
        Some(path) => wgqed::emit::write_output(&path, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wgqed: error: {e}");
            ExitCode::FAILURE
        }
    }
}
