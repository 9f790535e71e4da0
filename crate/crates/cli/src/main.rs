//! `cluster-entropy`: machine and cluster entropy, benchmark correlation,
//! the reproduction bundle and scatter plots.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cluster_entropy::analysis::{correlate_all, sensitivity_sweep};
use cluster_entropy::dataset::{
    bundled_compatibility_matrix, bundled_top10, load_benchmarks, load_cluster_spec,
    load_machine_spec, load_matrix, Benchmark, BenchmarkTable,
};
use cluster_entropy::entropy::{
    cluster_entropy, machine_entropy, ClusterEntropy, CompatibilityMatrix, LogBase, PenaltyParams,
};
use cluster_entropy::plot::{
    render_grid_csv, render_grid_svg, render_scatter_csv, render_scatter_svg, PlotFormat,
};
use cluster_entropy::report::{cluster_text, correlation_text, machine_text, sensitivity_text};
use cluster_entropy::reproduce::write_bundle;
use cluster_entropy::stats::DEFAULT_ALPHA;
use cluster_entropy::{Error, ErrorKind};

#[derive(Parser)]
#[command(
    name = "cluster-entropy",
    version,
    about = "Entropy of heterogeneous HPC clusters and its relation to benchmark results"
)]
struct Cli {
    /// Compatibility matrix (CSV or .json). Defaults to the bundled matrix.
    #[arg(long, global = true, env = "CLUSTER_ENTROPY_MATRIX")]
    matrix: Option<PathBuf>,

    /// Print machine-readable JSON instead of text tables.
    #[arg(long, global = true)]
    json: bool,

    /// Output location: a directory for `reproduce`, a file for `plot`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PenaltyArgs {
    /// Logarithm base of the penalty: `e` or `10`.
    #[arg(long, default_value = "e")]
    log_base: String,

    /// Penalty coefficient.
    #[arg(long, default_value_t = 3.0)]
    coefficient: f64,
}

impl PenaltyArgs {
    fn params(&self) -> cluster_entropy::Result<PenaltyParams> {
        PenaltyParams::new(self.coefficient, self.log_base.parse::<LogBase>()?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of a single machine.
    Machine {
        /// Machine spec (JSON).
        spec: PathBuf,
    },
    /// Penalized entropy of a cluster.
    Cluster {
        /// Cluster spec (JSON); a bare machine counts as one node.
        spec: PathBuf,
        #[command(flatten)]
        penalty: PenaltyArgs,
    },
    /// Correlate entropy with every benchmark column.
    Correlate {
        /// Benchmark table (CSV or .json). Defaults to the bundled Top-10.
        #[arg(long)]
        benchmarks: Option<PathBuf>,
        /// Significance level.
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Write correlation, consistency and efficiency reports plus plots.
    Reproduce {
        #[arg(long)]
        benchmarks: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Scatter plot of entropy against one benchmark, or all of them.
    Plot {
        #[arg(long)]
        benchmarks: Option<PathBuf>,
        /// Benchmark name, e.g. LINPACK or HPCG.
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        benchmark: Option<String>,
        /// Emit a grid with every benchmark present.
        #[arg(long)]
        all: bool,
        /// `svg` or `csv`.
        #[arg(long, default_value = "svg")]
        format: String,
    },
    /// Perturb every matrix cell a cluster uses and report the entropy change.
    Sensitivity {
        spec: PathBuf,
        /// Perturbation size, applied as both +delta and -delta.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[command(flatten)]
        penalty: PenaltyArgs,
    },
}

fn matrix(cli: &Cli) -> cluster_entropy::Result<CompatibilityMatrix> {
    match &cli.matrix {
        Some(path) => load_matrix(path),
        None => Ok(bundled_compatibility_matrix()),
    }
}

fn benchmarks(path: Option<&Path>) -> cluster_entropy::Result<BenchmarkTable> {
    match path {
        Some(path) => load_benchmarks(path),
        None => Ok(bundled_top10()),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

#[derive(Serialize)]
struct ClusterOutput<'a> {
    penalty: &'a PenaltyParams,
    #[serde(flatten)]
    entropy: &'a ClusterEntropy,
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Machine { spec } => {
            let machine = load_machine_spec(spec)?;
            let e = machine_entropy(&machine, &matrix(cli)?)?;
            print!("{}", if cli.json { json(&e) } else { machine_text(&e) });
        }
        Command::Cluster { spec, penalty } => {
            let params = penalty.params()?;
            let cluster = load_cluster_spec(spec)?;
            let e = cluster_entropy(&cluster, &matrix(cli)?, &params)?;
            if cli.json {
                print!(
                    "{}",
                    json(&ClusterOutput {
                        penalty: &params,
                        entropy: &e
                    })
                );
            } else {
                print!("{}", cluster_text(&e, &params));
            }
        }
        Command::Correlate {
            benchmarks: path,
            alpha,
        } => {
            let table = benchmarks(path.as_deref())?;
            let report = correlate_all(&table, *alpha);
            print!(
                "{}",
                if cli.json {
                    json(&report)
                } else {
                    correlation_text(&report)
                }
            );
        }
        Command::Reproduce {
            benchmarks: path,
            alpha,
        } => {
            let table = benchmarks(path.as_deref())?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("reproduction"));
            let manifest = write_bundle(&out, &table, *alpha)?;
            if cli.json {
                print!("{}", json(&manifest));
            } else {
                println!("wrote {} files to {}", manifest.files.len(), out.display());
                for f in &manifest.files {
                    println!("  {f}");
                }
            }
        }
        Command::Plot {
            benchmarks: path,
            benchmark,
            all,
            format,
        } => {
            let table = benchmarks(path.as_deref())?;
            let format: PlotFormat = format.parse()?;
            let body = match (benchmark, *all, format) {
                (_, true, PlotFormat::Svg) => render_grid_svg(&table)?,
                (_, true, PlotFormat::Csv) => render_grid_csv(&table),
                (Some(name), false, fmt) => {
                    let b: Benchmark = name.parse()?;
                    match fmt {
                        PlotFormat::Svg => render_scatter_svg(&table, b)?,
                        PlotFormat::Csv => render_scatter_csv(&table, b)?,
                    }
                }
                (None, false, _) => unreachable!("clap requires --benchmark or --all"),
            };
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, body).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    if cli.json {
                        print!("{}", json(&serde_json::json!({ "path": path })));
                    }
                }
                None => print!("{body}"),
            }
        }
        Command::Sensitivity {
            spec,
            delta,
            penalty,
        } => {
            let params = penalty.params()?;
            let cluster = load_cluster_spec(spec)?;
            let rows = sensitivity_sweep(&cluster, &matrix(cli)?, *delta, &params)?;
            print!(
                "{}",
                if cli.json {
                    json(&rows)
                } else {
                    sensitivity_text(&rows)
                }
            );
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::kind) {
        Some(ErrorKind::Io) => 1,
        Some(ErrorKind::Validation) => 2,
        Some(ErrorKind::Domain) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
