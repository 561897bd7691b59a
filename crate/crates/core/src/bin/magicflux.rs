use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magicflux::harness::{
    emit_outputs, parse_angle, run_experiment, series_by_size, Angle, EnsembleConfig, ExperimentKind, LinePlot, Table,
};
use magicflux::Error;

#[derive(Parser)]
#[command(name = "magicflux", version, about = "Magic, mutual-information fluctuations and monitored circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fluctuations of mutual information versus T count.
    Tdoped(RunArgs),
    /// Measurement-rate sweep of monitored brickwork circuits.
    Mipt(RunArgs),
    /// Kurtosis of region spins versus T count.
    Kurtosis(RunArgs),
    /// Order-4 entropy fluctuations versus T count.
    Renyi4(RunArgs),
    /// Clifford-average predictions and exact identities.
    Oracle(RunArgs),
    /// Line plot of one CSV column against another, one series per `n`.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file mirroring the ensemble configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',')]
    qubits: Option<Vec<usize>>,
    #[arg(long)]
    nt_max: Option<usize>,
    /// Explicit comma-separated T counts.
    #[arg(long, value_delimiter = ',')]
    nt_values: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    instances: Option<usize>,
    /// Comma-separated angles, e.g. `0,pi/20,pi/4`.
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<String>>,
    /// Measurement rates as `start:stop:step`.
    #[arg(long)]
    pm_grid: Option<String>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    subsystem_fraction: Option<String>,
    /// auto | tableau | statevector
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// independent | shared
    #[arg(long)]
    pairing: Option<String>,
    /// interleaved | trailing-t
    #[arg(long)]
    layout: Option<String>,
    /// steps | uniform
    #[arg(long)]
    block: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV table written by one of the experiments.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    title: Option<String>,
    /// SVG path to write.
    #[arg(long)]
    out: PathBuf,
}

fn parse_fraction(s: &str) -> Result<f64, Error> {
    let bad = || Error::InvalidConfig(format!("bad subsystem fraction `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => Ok(a.trim().parse::<f64>().map_err(|_| bad())? / b.trim().parse::<f64>().map_err(|_| bad())?),
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, Error> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::InvalidConfig(format!("unknown {what} `{s}`")))
}

fn build_config(kind: ExperimentKind, a: RunArgs) -> Result<EnsembleConfig, Error> {
    let mut c = match &a.config {
        Some(path) => {
            let c = EnsembleConfig::from_file(path)?;
            if c.kind != kind {
                return Err(Error::InvalidConfig(format!(
                    "config file describes `{}` but the subcommand is `{}`",
                    c.kind.name(),
                    kind.name()
                )));
            }
            c
        }
        None => EnsembleConfig::new(kind),
    };
    if let Some(v) = a.qubits {
        c.qubits = v;
    }
    if let Some(v) = a.nt_max {
        c.nt_max = Some(v);
        c.nt_values = None;
    }
    if let Some(v) = a.nt_values {
        c.nt_values = Some(v);
    }
    if let Some(v) = a.samples {
        c.samples = v;
    }
    if let Some(v) = a.instances {
        c.instances = v;
    }
    if let Some(v) = a.theta {
        for t in &v {
            parse_angle(t)?;
        }
        c.thetas = v.into_iter().map(Angle::Text).collect();
    }
    if let Some(v) = a.pm_grid {
        c.pm_grid = v.parse()?;
    }
    if let Some(v) = a.cycles {
        c.cycles = v;
    }
    if let Some(v) = a.subsystem_fraction {
        c.subsystem_fraction = parse_fraction(&v)?;
    }
    if let Some(v) = a.backend {
        c.backend = v.parse()?;
    }
    if let Some(v) = a.seed {
        c.master_seed = v;
    }
    if let Some(v) = a.out {
        c.out = v;
    }
    if let Some(v) = a.format {
        c.format = v.parse()?;
    }
    if let Some(v) = a.threads {
        c.threads = v;
    }
    if let Some(v) = a.pairing {
        c.pairing = parse_enum(&v, "pairing")?;
    }
    if let Some(v) = a.layout {
        c.layout = parse_enum(&v, "layout")?;
    }
    if let Some(v) = a.block {
        c.block = parse_enum(&v, "block")?;
    }
    Ok(c)
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<(), Error> {
    let cfg = build_config(kind, args)?;
    let output = run_experiment(&cfg)?;
    for line in &output.notes {
        println!("{line}");
    }
    for path in emit_outputs(&output, &cfg.out, cfg.format)? {
        println!("wrote {}", path.display());
    }
    if kind == ExperimentKind::Oracle && output.notes.iter().any(|l| l.starts_with("FAIL")) {
        return Err(Error::NumericalState("some oracle checks failed".into()));
    }
    Ok(())
}

fn plot(a: PlotArgs) -> Result<(), Error> {
    let file = std::fs::File::open(&a.input).map_err(|e| Error::Io(format!("{}: {e}", a.input.display())))?;
    let table = Table::from_csv_reader(file)?;
    let plot = LinePlot {
        title: a.title.unwrap_or_else(|| format!("{} vs {}", a.y, a.x)),
        x_label: a.x.clone(),
        y_label: a.y.clone(),
        series: series_by_size(&table, &a.x, &a.y, |_| true)?,
    };
    std::fs::write(&a.out, plot.to_svg()).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tdoped(a) => run(ExperimentKind::Tdoped, a),
        Command::Mipt(a) => run(ExperimentKind::Mipt, a),
        Command::Kurtosis(a) => run(ExperimentKind::Kurtosis, a),
        Command::Renyi4(a) => run(ExperimentKind::Renyi4, a),
        Command::Oracle(a) => run(ExperimentKind::Oracle, a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidConfig(_) | Error::Parse(_) => 2,
                Error::Resource(_) => 3,
                _ => 1,
            })
        }
    }
}
