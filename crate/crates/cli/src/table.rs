//! Series CSV files: a 1-based contiguous `t` column followed by named real
//! columns.

use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, column: Vec<f64>) {
        self.names.push(name.to_string());
        self.columns.push(column);
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn require(&self, name: &str, path: &Path) -> CliResult<&[f64]> {
        self.column(name)
            .ok_or_else(|| CliError::invalid(format!("{}: missing column `{name}`", path.display())))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        let t_col = headers
            .iter()
            .position(|h| h == "t")
            .ok_or_else(|| CliError::invalid(format!("{}: missing column `t`", path.display())))?;
        let mut table = Table::new();
        for (i, name) in headers.iter().enumerate() {
            if i != t_col {
                table.push(name, Vec::new());
            }
        }
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| csv_error(path, e))?;
            let line = row + 2;
            let expected = row + 1;
            let t: usize = record[t_col].parse().map_err(|_| {
                CliError::invalid(format!("{}: row {line}: bad index `{}`", path.display(), &record[t_col]))
            })?;
            if t != expected {
                return Err(CliError::invalid(format!(
                    "{}: row {line}: expected t = {expected}, found {t}",
                    path.display()
                )));
            }
            let mut c = 0;
            for (i, cell) in record.iter().enumerate() {
                if i == t_col {
                    continue;
                }
                let name = &table.names[c];
                let value: f64 = cell.parse().map_err(|_| {
                    CliError::invalid(format!(
                        "{}: row {line} (t = {t}): column `{name}` is not a number: `{cell}`",
                        path.display()
                    ))
                })?;
                if !value.is_finite() {
                    return Err(CliError::invalid(format!(
                        "{}: row {line} (t = {t}): column `{name}` is {value}",
                        path.display()
                    )));
                }
                table.columns[c].push(value);
                c += 1;
            }
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        let io = |e: csv::Error| csv_error(path, e);
        writer
            .write_record(std::iter::once("t").chain(self.names.iter().map(String::as_str)))
            .map_err(io)?;
        for row in 0..self.rows() {
            let mut record = vec![(row + 1).to_string()];
            record.extend(self.columns.iter().map(|c| c[row].to_string()));
            writer.write_record(&record).map_err(io)?;
        }
        writer.flush().map_err(|e| CliError::io(path, e))
    }
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    match err.kind() {
        csv::ErrorKind::Io(_) => CliError::io(path, err),
        _ => CliError::invalid(format!("{}: {err}", path.display())),
    }
}
