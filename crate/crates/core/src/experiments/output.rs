use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "eeps";

/// CSV bytes for `records`: two `#` metadata lines (tool version and the
/// effective config), a header row, then one row per record.
pub fn csv_bytes<R: Serialize>(cfg: &ExperimentConfig, records: &[R]) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::Config(format!("{} produced no rows", cfg.experiment)));
    }
    let mut out = format!(
        "# {TOOL_NAME} {}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.describe()
    )
    .into_bytes();
    let mut writer = csv::Writer::from_writer(&mut out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| Error::io("<csv buffer>", e))?;
    drop(writer);
    Ok(out)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Columns and rows of a CSV written by [`csv_bytes`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&bytes).map_err(|e| match e {
            Error::Schema { message, .. } => Error::Schema {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_owned).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        if headers.iter().all(|h| h.is_empty()) || rows.is_empty() {
            return Err(Error::Schema {
                path: Default::default(),
                message: "no data rows".into(),
            });
        }
        Ok(Self { headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Values of `name` parsed as floats; empty cells become NaN.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column_index(name).ok_or_else(|| Error::Schema {
            path: Default::default(),
            message: format!("missing column `{name}`"),
        })?;
        self.rows
            .iter()
            .map(|row| {
                let cell = row[k].trim();
                if cell.is_empty() {
                    Ok(f64::NAN)
                } else {
                    cell.parse::<f64>().map_err(|_| Error::Schema {
                        path: Default::default(),
                        message: format!("column `{name}` holds non-numeric value `{cell}`"),
                    })
                }
            })
            .collect()
    }

    pub fn strings(&self, name: &str) -> Result<Vec<String>> {
        let k = self.column_index(name).ok_or_else(|| Error::Schema {
            path: Default::default(),
            message: format!("missing column `{name}`"),
        })?;
        Ok(self.rows.iter().map(|row| row[k].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::Experiment;

    #[derive(Serialize)]
    struct Row {
        n: usize,
        value: f64,
        fit: Option<f64>,
    }

    #[test]
    fn metadata_header_and_rows() {
        let cfg = ExperimentConfig::defaults(Experiment::TbBands);
        let rows = [
            Row { n: 1, value: 0.5, fit: None },
            Row { n: 2, value: 1e-20, fit: Some(-3.0) },
        ];
        let text = String::from_utf8(csv_bytes(&cfg, &rows).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# eeps {}", env!("CARGO_PKG_VERSION")));
        assert!(lines[1].starts_with("# config: experiment=tb-bands"));
        assert_eq!(lines[2], "n,value,fit");
        assert_eq!(lines[3], "1,0.5,");
        let table = CsvTable::parse(text.as_bytes()).unwrap();
        assert_eq!(table.floats("value").unwrap(), vec![0.5, 1e-20]);
        assert!(table.floats("fit").unwrap()[0].is_nan());
        assert!(table.floats("missing").is_err());
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let cfg = ExperimentConfig::defaults(Experiment::TbBands);
        assert!(csv_bytes::<Row>(&cfg, &[]).is_err());
        assert!(CsvTable::parse(b"# eeps\n").is_err());
        assert!(CsvTable::parse(b"a,b\n").is_err());
    }
}
