use std::path::{Path, PathBuf};

use rayon::prelude::*;
use ttortho::generators::{krylov_set, KrylovSetSpec};
use ttortho::metrics::{condition_track_prefixes, MetricSeries};
use ttortho::ortho::{run_kernel, StepMetrics};
use ttortho::tt::TTVector;
use ttortho::{io, Kernel};

use crate::config::{validate_shape, InputSource, RunConfig};
use crate::error::{CliError, Result};
use crate::svg;
use crate::table::{self, Row, HOUSEHOLDER_A, HOUSEHOLDER_U};

/// The Krylov input set encoded as a TTV1 set.
pub fn gen_bytes(order: usize, mode_size: usize, count: usize) -> Result<Vec<u8>> {
    validate_shape(order, mode_size, count)?;
    let set = krylov_set(&KrylovSetSpec::new(order, mode_size, count)?)?;
    Ok(io::set_to_bytes(&set)?)
}

pub fn cmd_gen(order: usize, mode_size: usize, count: usize, output: &Path) -> Result<()> {
    let bytes = gen_bytes(order, mode_size, count)?;
    std::fs::write(output, bytes).map_err(|e| CliError::io(output, e))
}

/// A kernel run that stopped early.
#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub kernel: Kernel,
    pub delta: f64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<Row>,
    pub csv: String,
    pub failures: Vec<RunFailure>,
    pub figures: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Vec<TTVector>> {
    match &cfg.input {
        InputSource::File(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
            let set = io::set_from_bytes(&bytes)?;
            if set.is_empty() {
                return Err(CliError::Config(format!("{} holds no vectors", path.display())));
            }
            Ok(set)
        }
        InputSource::Generate => Ok(krylov_set(&KrylovSetSpec::new(cfg.order, cfg.mode_size, cfg.count)?)?),
    }
}

fn trace_rows(name: &str, delta: f64, steps: &[StepMetrics]) -> Vec<Row> {
    steps
        .iter()
        .map(|s| Row {
            kernel: name.to_string(),
            delta,
            k: s.k,
            max_rank: Some(s.max_rank),
            storage_count: Some(s.storage_after),
            compression_ratio: Some(s.compression_ratio),
            compression_gain: Some(s.compression_gain()),
            rounding_calls: Some(s.rounding_calls),
            ..Row::default()
        })
        .collect()
}

fn run_one(kernel: Kernel, delta: f64, a: &[TTVector], kappas: Option<&[(f64, f64)]>) -> Result<(Vec<Row>, Option<RunFailure>)> {
    let run = run_kernel(kernel, a, delta, None)?;
    let series = MetricSeries::from_result(&run.result, delta, kappas)?;
    let mut rows: Vec<Row> = series
        .records
        .iter()
        .map(|r| Row {
            kernel: kernel.name().to_string(),
            delta,
            k: r.k,
            loo: Some(r.loo),
            max_rank: Some(r.max_rank),
            storage_count: Some(r.storage_count),
            compression_ratio: Some(r.compression_ratio),
            compression_gain: Some(r.compression_gain),
            kappa: r.kappa,
            kappa_sq: r.kappa_sq,
            rounding_calls: Some(r.rounding_calls),
            error: None,
        })
        .collect();
    let failure = run.error.map(|e| {
        let message = e.to_string();
        rows.push(Row {
            kernel: kernel.name().to_string(),
            delta,
            k: series.records.len() + 1,
            rounding_calls: Some(run.result.rounding_calls),
            error: Some(message.clone()),
            ..Row::default()
        });
        RunFailure { kernel, delta, message }
    });
    if let Some(trace) = &run.result.householder {
        rows.extend(trace_rows(HOUSEHOLDER_U, delta, &trace.u_steps));
        rows.extend(trace_rows(HOUSEHOLDER_A, delta, &trace.a_steps));
    }
    Ok((rows, failure))
}

/// Runs every (kernel, delta) pair on the configured input. Runs proceed in
/// parallel; rows come out ordered by kernel, then delta, then `k`, in the
/// order given in the configuration.
pub fn run_rows(cfg: &RunConfig, a: &[TTVector]) -> Result<(Vec<Row>, Vec<RunFailure>)> {
    let kappas = if cfg.with_kappa { Some(condition_track_prefixes(a)?) } else { None };
    let jobs: Vec<(Kernel, f64)> = cfg.kernels.iter().flat_map(|&k| cfg.deltas.iter().map(move |&d| (k, d))).collect();
    let results: Vec<Result<(Vec<Row>, Option<RunFailure>)>> =
        jobs.par_iter().map(|&(k, d)| run_one(k, d, a, kappas.as_deref())).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        let (mut part, failure) = r?;
        rows.append(&mut part);
        failures.extend(failure);
    }
    Ok((rows, failures))
}

/// Runs the experiment and writes the CSV (and figures) requested by `cfg`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let a = load_inputs(cfg)?;
    let (rows, failures) = run_rows(cfg, &a)?;
    let csv = table::to_string(&rows)?;
    if let Some(path) = &cfg.csv {
        std::fs::write(path, &csv).map_err(|e| CliError::io(path, e))?;
    }
    let figures = match &cfg.svg_dir {
        Some(dir) => svg::write_figures(&rows, dir)?,
        None => Vec::new(),
    };
    Ok(RunOutcome { rows, csv, failures, figures })
}

pub fn cmd_plot(csv: &Path, svg_dir: &Path) -> Result<Vec<PathBuf>> {
    let file = std::fs::File::open(csv).map_err(|e| CliError::io(csv, e))?;
    let rows = table::read_rows(file)?;
    svg::write_figures(&rows, svg_dir)
}
