//! CSV ingestion and output writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bae::DataMatrix;

use crate::error::{CliError, CliResult};

/// Reads a comma-separated numeric matrix. A first line that does not
/// parse as numbers is taken as a header. Errors name the offending cell
/// by 1-based line and column.
pub fn read_csv(path: &Path) -> CliResult<DataMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::io(path, &e),
            _ => CliError::Parse(format!("{}: line {line}: {e}", path.display())),
        })?;
        let parsed: Vec<Result<f64, &str>> = record
            .iter()
            .map(|cell| cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(cell))
            .collect();
        if k == 0 && parsed.iter().any(|c| c.is_err()) {
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (c, cell) in parsed.into_iter().enumerate() {
            row.push(cell.map_err(|raw| {
                CliError::Parse(format!(
                    "{}: line {line}, column {}: cannot parse {raw:?} as a finite number",
                    path.display(),
                    c + 1
                ))
            })?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Shape(format!("{}: no data rows", path.display())));
    }
    Ok(DataMatrix::from_rows(&rows)?)
}

pub fn write_csv(path: &Path, rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Writes a delimited table whose first line is `# ` followed by the run
/// metadata as compact JSON.
pub fn write_table(
    path: &Path,
    delimiter: u8,
    metadata: &serde_json::Value,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<PathBuf> {
    let io = |e: &dyn std::fmt::Display| CliError::io(path, e);
    let mut file = BufWriter::new(File::create(path).map_err(|e| io(&e))?);
    writeln!(file, "# {metadata}").map_err(|e| io(&e))?;
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(file);
    w.write_record(header).map_err(|e| io(&e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))?;
    Ok(path.to_path_buf())
}

/// Appends a timestamped line to `run.log`; timestamps live only here so
/// the primary outputs stay byte-reproducible.
pub fn append_log(dir: &Path, command: &str, seconds: f64, outputs: &[PathBuf]) -> CliResult<()> {
    let path = dir.join("run.log");
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let names: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| CliError::io(&path, e))?;
    writeln!(f, "unix_time={stamp} command={command} seconds={seconds:.3} outputs={}", names.join(","))
        .map_err(|e| CliError::io(&path, e))
}
