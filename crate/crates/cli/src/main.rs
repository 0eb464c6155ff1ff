use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ttortho_cli::config::{parse_deltas, parse_kernels};
use ttortho_cli::{cmd_gen, cmd_plot, cmd_run, CliError, InputSource, RunConfig};

#[derive(Parser)]
#[command(name = "ttortho", version, about = "Orthogonalization experiments on Tensor-Train vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shape {
    /// Tensor order d.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Mode size n of every mode.
    #[arg(long = "mode-size", default_value_t = 15)]
    mode_size: usize,
    /// Number m of Krylov vectors.
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Krylov input set as a TTV1 set file.
    Gen {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run kernels over rounding accuracies and emit the metrics CSV.
    Run {
        #[command(flatten)]
        shape: Shape,
        /// Comma-separated kernel names, or `all`.
        #[arg(long, default_value = "all")]
        kernels: String,
        /// Comma-separated rounding accuracies.
        #[arg(long, default_value = "1e-3,1e-5,1e-8")]
        deltas: String,
        /// TTV1 set written by `gen`.
        #[arg(long, conflicts_with = "seed_free")]
        input: Option<PathBuf>,
        /// Generate the inputs in memory from the shape flags (the default
        /// when no input file is given).
        #[arg(long = "seed-free")]
        seed_free: bool,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also render figures into this directory.
        #[arg(long = "svg-dir")]
        svg_dir: Option<PathBuf>,
        /// Add condition numbers of the densified input prefixes.
        #[arg(long = "with-kappa")]
        with_kappa: bool,
    },
    /// Render SVG figures from a metrics CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long = "svg-dir")]
        svg_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Gen { shape, output } => {
            cmd_gen(shape.order, shape.mode_size, shape.count, &output)?;
            Ok(0)
        }
        Command::Run { shape, kernels, deltas, input, seed_free: _, csv, svg_dir, with_kappa } => {
            let cfg = RunConfig {
                order: shape.order,
                mode_size: shape.mode_size,
                count: shape.count,
                kernels: parse_kernels(&kernels)?,
                deltas: parse_deltas(&deltas)?,
                input: input.map_or(InputSource::Generate, InputSource::File),
                csv: csv.clone(),
                svg_dir,
                with_kappa,
            };
            let outcome = cmd_run(&cfg)?;
            if csv.is_none() {
                print!("{}", outcome.csv);
            }
            for f in &outcome.failures {
                eprintln!("{} at delta {:e} stopped: {}", f.kernel, f.delta, f.message);
            }
            Ok(outcome.exit_code())
        }
        Command::Plot { csv, svg_dir } => {
            for path in cmd_plot(&csv, &svg_dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
