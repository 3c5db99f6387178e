use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use spinwitness::experiments::{run, Command, RunParams};
use spinwitness::optimize::OptConfig;
use spinwitness::witness::DEFAULT_DIM_CAP;
use spinwitness::{Error, OrderingSpec, SpinQuantum};

const EXIT_TARGET_MISS: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_RUNTIME: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Entanglement witnesses from spin-vector geometry.
///
/// Exit status: 0 all targets met, 2 a target was missed, 3 invalid input.
#[derive(Parser, Debug)]
#[command(name = "spinwitness", version)]
struct Cli {
    #[arg(value_parser = ["table1", "table2", "ratios", "noise", "bound", "verify"])]
    command: String,
    /// Twice the spin quantum number (1 = qubits, 2 = qutrits).
    #[arg(long = "spin", value_name = "TWO_J")]
    spin: Option<u32>,
    /// Number of sites (largest N for table1 and ratios).
    #[arg(long, value_name = "N")]
    sites: Option<usize>,
    /// One-based role ordering, e.g. 3,4,2,1.
    #[arg(long)]
    ordering: Option<String>,
    /// One-based partition, e.g. "12|34".
    #[arg(long)]
    partition: Option<String>,
    #[arg(long, value_name = "K")]
    restarts: Option<usize>,
    /// Master seed; falls back to the config file, then SPINWITNESS_SEED.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Optimizer convergence tolerance.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    dim_cap: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// key=value file with defaults for any of the options above.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 11] =
    ["spin", "sites", "ordering", "partition", "restarts", "seed", "tol", "max_iterations", "dim_cap", "format", "out"];

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = k.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key `{}`", i + 1, k.trim()));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn pick<T: std::str::FromStr>(flag: Option<T>, config: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String> {
    if flag.is_some() {
        return Ok(flag);
    }
    config
        .get(key)
        .map(|v| v.parse::<T>().map_err(|_| format!("config key `{key}`: cannot parse `{v}`")))
        .transpose()
}

struct Resolved {
    command: Command,
    params: RunParams,
    format: Format,
    out: Option<PathBuf>,
}

fn resolve(cli: Cli) -> Result<Resolved, String> {
    let config = match &cli.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let command: Command = cli.command.parse().map_err(|e: Error| e.to_string())?;
    let two_j = pick(cli.spin, &config, "spin")?.unwrap_or(1);
    if two_j == 0 {
        return Err("spin must be at least 1 (TWO_J = 2j)".into());
    }
    let seed = match pick(cli.seed, &config, "seed")? {
        Some(s) => s,
        None => match std::env::var("SPINWITNESS_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| format!("SPINWITNESS_SEED: cannot parse `{v}`"))?,
            Err(_) => 0,
        },
    };
    let defaults = OptConfig::default();
    let opt = OptConfig {
        restarts: pick(cli.restarts, &config, "restarts")?.unwrap_or(match command {
            Command::Table2 => 256,
            _ => defaults.restarts,
        }),
        max_iterations: pick(cli.max_iterations, &config, "max_iterations")?.unwrap_or(defaults.max_iterations),
        tolerance: pick(cli.tol, &config, "tol")?.unwrap_or(defaults.tolerance),
        seed,
    };
    if opt.restarts == 0 {
        return Err("restarts must be at least 1".into());
    }
    if !(opt.tolerance > 0.0) {
        return Err("tol must be positive".into());
    }
    let ordering = pick(cli.ordering, &config, "ordering")?
        .map(|o| OrderingSpec::parse_one_based(&o).map_err(|e| e.to_string()))
        .transpose()?;
    let format = match cli.format {
        Some(f) => f,
        None => match config.get("format").map(String::as_str) {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(format!("config key `format`: unknown format `{other}`")),
        },
    };
    let out = cli.out.or_else(|| config.get("out").map(PathBuf::from));
    Ok(Resolved {
        command,
        params: RunParams {
            spin: SpinQuantum::from_two_j(two_j),
            sites: pick(cli.sites, &config, "sites")?,
            ordering,
            partition: pick(cli.partition, &config, "partition")?,
            opt,
            dim_cap: pick(cli.dim_cap, &config, "dim_cap")?.unwrap_or(DEFAULT_DIM_CAP),
        },
        format,
        out,
    })
}

fn is_validation(e: &Error) -> bool {
    !matches!(e, Error::Io(_) | Error::NoConvergence { .. })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let resolved = match resolve(cli) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let report = match run(resolved.command, &resolved.params) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_validation(&e) { EXIT_VALIDATION } else { EXIT_RUNTIME });
        }
    };
    let text = match resolved.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    match &resolved.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
        None => print!("{text}"),
    }
    for f in report.failures() {
        eprintln!("target missed: {} = {} (target {})", f.name, f.value, f.target_expr.as_deref().unwrap_or("-"));
    }
    if report.all_targets_met {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TARGET_MISS)
    }
}
