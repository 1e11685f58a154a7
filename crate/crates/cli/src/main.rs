mod manifest;
mod replay;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::{Command, Format, Manifest, RawManifest};
use run::{ResultFile, RunError};

/// Optimal Riesz polarization configurations, coverings and lattice densities.
#[derive(Parser)]
#[command(name = "rieszlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Maximize polarization over N-point configurations.
    Polarize(Flags),
    /// Approximate best coverings.
    Cover(Flags),
    /// Polarization plus covering, separation and boundary diagnostics.
    Diagnose(Flags),
    /// Extrapolate the large-N polarization constant.
    Sigma(Flags),
    /// Table of s-th roots against the covering limit.
    Chain(Flags),
    /// Lattice covering radius and density.
    Lattice(Flags),
    /// Run a TOML manifest.
    Run { manifest: PathBuf },
    /// Re-verify a JSON result file.
    Replay { file: PathBuf },
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    semi_axes: Option<Vec<f64>>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<f64>>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "N-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    eta_list: Option<Vec<f64>>,
    /// Lattice name: z1..z5, hex, a2..a5, a2*..a5*.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl Flags {
    fn into_raw(self, command: Command) -> RawManifest {
        RawManifest {
            command: Some(command),
            domain: self.domain,
            d: self.d,
            t0: self.t0,
            semi_axes: self.semi_axes,
            s: self.s,
            s_list: self.s_list,
            n: self.n,
            n_list: self.n_list,
            seed: self.seed,
            restarts: self.restarts,
            budget: self.budget,
            tol: self.tol,
            eta_list: self.eta_list,
            name: self.name,
            out_dir: self.out_dir,
            format: self.format.map(|f| match f {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            }),
            ..RawManifest::default()
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {}", msg.to_string().replace('\n', " "));
    ExitCode::from(2)
}

fn io_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn write_artifacts(m: &Manifest, file: &ResultFile, json: &str, csv: &str) -> std::io::Result<()> {
    let Some(dir) = &m.out_dir else { return Ok(()) };
    let dir = Path::new(dir);
    std::fs::create_dir_all(dir)?;
    let stem = m.command.name();
    std::fs::write(dir.join(format!("{stem}.json")), json)?;
    std::fs::write(dir.join(format!("{stem}.csv")), csv)?;
    if let Some(profile) = run::profile_csv(file) {
        std::fs::write(dir.join("profile.csv"), profile)?;
    }
    Ok(())
}

fn execute(m: Manifest) -> ExitCode {
    let file = match run::run(&m) {
        Ok(f) => f,
        Err(RunError(e)) => return invalid(e),
    };
    let json = match serde_json::to_string_pretty(&file) {
        Ok(j) => j + "\n",
        Err(e) => return io_error(e),
    };
    let csv = run::to_csv(&file);
    if let Err(e) = write_artifacts(&m, &file, &json, &csv) {
        return io_error(e);
    }
    match m.format {
        Format::Json => print!("{json}"),
        Format::Csv => print!("{csv}"),
    }
    if file.all_certified() {
        ExitCode::SUCCESS
    } else {
        eprintln!("warning: some results are not certified within budget");
        ExitCode::from(3)
    }
}

fn replay_file(path: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return io_error(format!("{}: {e}", path.display())),
    };
    let file: ResultFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return io_error(format!("{}: {e}", path.display())),
    };
    let failures = replay::replay(&file);
    if failures.is_empty() {
        println!("replay ok: {} records in {}", file.records.len(), path.display());
        ExitCode::SUCCESS
    } else {
        for f in &failures {
            println!("replay failed: {f}");
        }
        ExitCode::from(1)
    }
}

fn set_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("RIESZLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("RIESZLAB_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("RIESZLAB_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = set_threads() {
        return invalid(e);
    }
    let (command, flags) = match cli.command {
        Sub::Polarize(f) => (Command::Polarize, f),
        Sub::Cover(f) => (Command::Cover, f),
        Sub::Diagnose(f) => (Command::Diagnose, f),
        Sub::Sigma(f) => (Command::Sigma, f),
        Sub::Chain(f) => (Command::Chain, f),
        Sub::Lattice(f) => (Command::Lattice, f),
        Sub::Replay { file } => return replay_file(&file),
        Sub::Run { manifest } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => return io_error(format!("{}: {e}", manifest.display())),
            };
            return match Manifest::parse_toml(&text) {
                Ok(m) => execute(m),
                Err(e) => invalid(e),
            };
        }
    };
    match flags.into_raw(command).validate() {
        Ok(m) => execute(m),
        Err(e) => invalid(e),
    }
}
