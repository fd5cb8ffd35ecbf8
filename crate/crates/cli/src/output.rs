//! CSV tables with a leading config-hash comment, and the plots derived from them.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// One output file: `# config-sha256: ...`, further `# ...` notes, a header row, then data rows.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub notes: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self { name: name.into(), notes: Vec::new(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        writeln!(file, "# config-sha256: {config_hash}").map_err(io)?;
        for note in &self.notes {
            writeln!(file, "# {note}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(file);
        let csv_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(path)
    }
}

/// Shortest round-trip representation, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Reads named numeric columns back from a table written by [`Table::write`].
pub fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(err)?;
    let header = r.headers().map_err(err)?.clone();
    let index = columns
        .iter()
        .map(|c| header.iter().position(|h| h == *c).ok_or_else(|| CliError::Io(format!("missing column {c}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = vec![Vec::new(); columns.len()];
    for record in r.records() {
        let record = record.map_err(err)?;
        for (col, &i) in out.iter_mut().zip(&index) {
            col.push(record[i].parse().unwrap_or(f64::NAN));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_a_file() {
        let dir = std::env::temp_dir().join(format!("dasim-output-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut t = Table::new("t", vec!["a", "b"]);
        t.notes.push("note".into());
        t.push(vec![num(1.5), num(0.1)]);
        t.push(vec![num(2.0), num(1e-300)]);
        let path = t.write(&dir, "abc").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# config-sha256: abc\n# note\na,b\n"));
        let cols = read_columns(&path, &["b", "a"]).unwrap();
        assert_eq!(cols, vec![vec![0.1, 1e-300], vec![1.5, 2.0]]);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
