//! CSV input for observed series and custom deterministic columns.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Minimum number of observations accepted from a series file.
pub const MIN_OBSERVATIONS: usize = 10;

/// A parsed series file: one numeric column, or `(time label, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub path: PathBuf,
    pub time_labels: Option<Vec<String>>,
    pub values: Vec<f64>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

struct Table {
    header: Option<Vec<String>>,
    /// `(line number, cells)` per data row.
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(text: &str, what: &Path) -> Result<Table> {
    let mut header = None;
    let mut rows = Vec::new();
    for (i, rec) in reader(text).records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", what.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let cells: Vec<String> = rec.iter().map(str::to_string).collect();
        if cells.iter().all(String::is_empty) {
            continue;
        }
        if i == 0 && cells.last().is_some_and(|c| c.parse::<f64>().is_err()) {
            header = Some(cells);
            continue;
        }
        rows.push((line, cells));
    }
    Ok(Table { header, rows })
}

fn parse_cell(cell: &str, line: u64, col: usize, what: &Path) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse(format!(
            "{}: row {line}, column {}: `{cell}` is not a finite number",
            what.display(),
            col + 1
        ))),
    }
}

/// Parses series text. Comment lines start with `#`; a non-numeric first
/// row is a header.
pub fn parse_series(text: &str, path: &Path) -> Result<SeriesFile> {
    let table = read_table(text, path)?;
    let width = table
        .header
        .as_ref()
        .map(Vec::len)
        .or_else(|| table.rows.first().map(|r| r.1.len()))
        .unwrap_or(1);
    if !(1..=2).contains(&width) {
        return Err(Error::Parse(format!(
            "{}: expected 1 or 2 columns, found {width}",
            path.display()
        )));
    }
    let mut values = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::new();
    for (line, cells) in &table.rows {
        if cells.len() != width {
            return Err(Error::Parse(format!(
                "{}: row {line} has {} columns, expected {width}",
                path.display(),
                cells.len()
            )));
        }
        let col = width - 1;
        values.push(parse_cell(&cells[col], *line, col, path)?);
        if width == 2 {
            labels.push(cells[0].clone());
        }
    }
    if values.len() < MIN_OBSERVATIONS {
        return Err(Error::Parse(format!(
            "{}: {} observations, need at least {MIN_OBSERVATIONS}",
            path.display(),
            values.len()
        )));
    }
    Ok(SeriesFile {
        path: path.to_path_buf(),
        time_labels: (width == 2).then_some(labels),
        values,
    })
}

pub fn read_series(path: &Path) -> Result<SeriesFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_series(&text, path)
}

/// Reads a numeric column matrix; labels come from the header or default
/// to `custom0, custom1, ...`.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let table = read_table(&text, path)?;
    let width = table
        .header
        .as_ref()
        .map(Vec::len)
        .or_else(|| table.rows.first().map(|r| r.1.len()))
        .ok_or_else(|| Error::Parse(format!("{}: no data", path.display())))?;
    let labels = table
        .header
        .unwrap_or_else(|| (0..width).map(|j| format!("custom{j}")).collect());
    let mut cols = vec![Vec::with_capacity(table.rows.len()); width];
    for (line, cells) in &table.rows {
        if cells.len() != width {
            return Err(Error::Parse(format!(
                "{}: row {line} has {} columns, expected {width}",
                path.display(),
                cells.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            cols[j].push(parse_cell(cell, *line, j, path)?);
        }
    }
    Ok((labels, cols))
}
