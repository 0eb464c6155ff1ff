use std::path::PathBuf;

use ttortho::Kernel;

use crate::error::{CliError, Result};

pub const DEFAULT_DELTAS: [f64; 3] = [1e-3, 1e-5, 1e-8];

/// Where the input vectors of a run come from.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    /// A TTV1 set file written by `gen`.
    File(PathBuf),
    /// The Krylov set generated in memory from `order`, `mode_size`, `count`.
    Generate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub order: usize,
    pub mode_size: usize,
    pub count: usize,
    pub kernels: Vec<Kernel>,
    pub deltas: Vec<f64>,
    pub input: InputSource,
    pub csv: Option<PathBuf>,
    pub svg_dir: Option<PathBuf>,
    pub with_kappa: bool,
}

impl RunConfig {
    /// Default experiment: all kernels, three accuracies, fresh input.
    pub fn new(order: usize, mode_size: usize, count: usize) -> Self {
        Self {
            order,
            mode_size,
            count,
            kernels: Kernel::ALL.to_vec(),
            deltas: DEFAULT_DELTAS.to_vec(),
            input: InputSource::Generate,
            csv: None,
            svg_dir: None,
            with_kappa: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernels.is_empty() {
            return Err(CliError::Config("no kernels selected".into()));
        }
        if self.deltas.is_empty() {
            return Err(CliError::Config("no rounding accuracies given".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(CliError::Config(format!("accuracy {d} is not a positive number")));
        }
        if self.input == InputSource::Generate {
            validate_shape(self.order, self.mode_size, self.count)?;
        }
        Ok(())
    }
}

pub fn validate_shape(order: usize, mode_size: usize, count: usize) -> Result<()> {
    if order == 0 {
        return Err(CliError::Config("order must be at least 1".into()));
    }
    if mode_size < 2 {
        return Err(CliError::Config("mode size must be at least 2".into()));
    }
    if count == 0 {
        return Err(CliError::Config("count must be at least 1".into()));
    }
    Ok(())
}

/// Parses a comma-separated kernel list; `all` selects every kernel.
pub fn parse_kernels(s: &str) -> Result<Vec<Kernel>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Kernel::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let k: Kernel = part.parse().map_err(|e: ttortho::Error| CliError::Config(e.to_string()))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

pub fn parse_deltas(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad accuracy '{p}'"))))
        .collect()
}
