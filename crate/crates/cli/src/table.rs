//! The metrics CSV: one row per (series, delta, k).

use std::io::{Read, Write};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 12] = [
    "kernel",
    "delta",
    "k",
    "loo",
    "max_rank",
    "storage_count",
    "compression_ratio",
    "compression_gain",
    "kappa",
    "kappa_sq",
    "rounding_calls",
    "error",
];

/// Series names of the Householder memory traces.
pub const HOUSEHOLDER_U: &str = "householder-u";
pub const HOUSEHOLDER_A: &str = "householder-a";

/// One CSV row. `kernel` is a kernel name or one of the Householder trace
/// series; fields that do not apply are `None` and written empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub kernel: String,
    pub delta: f64,
    pub k: usize,
    pub loo: Option<f64>,
    pub max_rank: Option<usize>,
    pub storage_count: Option<usize>,
    pub compression_ratio: Option<f64>,
    pub compression_gain: Option<f64>,
    pub kappa: Option<f64>,
    pub kappa_sq: Option<f64>,
    pub rounding_calls: Option<usize>,
    pub error: Option<String>,
}

/// Shortest representation that parses back to the same value.
pub fn format_f64(v: f64) -> String {
    format!("{v:e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl Row {
    fn fields(&self) -> [String; 12] {
        [
            self.kernel.clone(),
            format_f64(self.delta),
            self.k.to_string(),
            opt(self.loo, format_f64),
            opt(self.max_rank, |v| v.to_string()),
            opt(self.storage_count, |v| v.to_string()),
            opt(self.compression_ratio, format_f64),
            opt(self.compression_gain, format_f64),
            opt(self.kappa, format_f64),
            opt(self.kappa_sq, format_f64),
            opt(self.rounding_calls, |v| v.to_string()),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

pub fn write_rows<W: Write>(w: W, rows: &[Row]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(HEADER)?;
    for row in rows {
        out.write_record(row.fields())?;
    }
    out.flush().map_err(|e| CliError::io("<csv output>", e))?;
    Ok(())
}

pub fn to_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| CliError::Schema(e.to_string()))
}

fn parse_opt<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| CliError::Schema(format!("line {line}: bad {name} value '{field}'")))
}

fn required<T>(v: Option<T>, name: &str, line: usize) -> Result<T> {
    v.ok_or_else(|| CliError::Schema(format!("line {line}: missing {name}")))
}

/// Reads rows back; the header must match [`HEADER`] and at least one row
/// must be present.
pub fn read_rows<R: Read>(r: R) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(r);
    let header = reader.headers().map_err(|e| CliError::Schema(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Schema(format!("expected header '{}'", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CliError::Schema(e.to_string()))?;
        let f = |j: usize| rec.get(j).unwrap_or("");
        rows.push(Row {
            kernel: required(Some(f(0)).filter(|s| !s.is_empty()), "kernel", line)?.to_string(),
            delta: required(parse_opt(f(1), "delta", line)?, "delta", line)?,
            k: required(parse_opt(f(2), "k", line)?, "k", line)?,
            loo: parse_opt(f(3), "loo", line)?,
            max_rank: parse_opt(f(4), "max_rank", line)?,
            storage_count: parse_opt(f(5), "storage_count", line)?,
            compression_ratio: parse_opt(f(6), "compression_ratio", line)?,
            compression_gain: parse_opt(f(7), "compression_gain", line)?,
            kappa: parse_opt(f(8), "kappa", line)?,
            kappa_sq: parse_opt(f(9), "kappa_sq", line)?,
            rounding_calls: parse_opt(f(10), "rounding_calls", line)?,
            error: Some(f(11).to_string()).filter(|s| !s.is_empty()),
        });
    }
    if rows.is_empty() {
        return Err(CliError::Schema("no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            Row {
                kernel: "mgs".into(),
                delta: 1e-8,
                k: 1,
                loo: Some(2.220446049250313e-16),
                max_rank: Some(1),
                storage_count: Some(45),
                compression_ratio: Some(45.0 / 3375.0),
                compression_gain: Some(1.0),
                rounding_calls: Some(1),
                ..Row::default()
            },
            Row { kernel: "gram".into(), delta: 1e-3, k: 2, error: Some("singular, at pivot 1".into()), ..Row::default() },
        ];
        let text = to_string(&rows).unwrap();
        assert!(text.starts_with(&HEADER.join(",")));
        assert!(text.contains("mgs,1e-8,1,2.220446049250313e-16,1,45,"));
        assert_eq!(read_rows(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn schema_errors() {
        let header_only = format!("{}\n", HEADER.join(","));
        assert!(matches!(read_rows(header_only.as_bytes()), Err(CliError::Schema(_))));
        assert!(matches!(read_rows("a,b\n1,2\n".as_bytes()), Err(CliError::Schema(_))));
        let bad = format!("{}\nmgs,x,1,,,,,,,,,\n", HEADER.join(","));
        assert!(matches!(read_rows(bad.as_bytes()), Err(CliError::Schema(_))));
    }
}
