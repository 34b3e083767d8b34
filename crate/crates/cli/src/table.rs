//! CSV tables with `#` metadata lines.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use fuzzybox_core::banded::fmt_f64;

use crate::config::{Resolved, Settings};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn write<W: Write>(
        &self,
        out: &mut W,
        command: &str,
        settings: &Settings,
    ) -> io::Result<()> {
        writeln!(out, "# fuzzybox {} {}", env!("CARGO_PKG_VERSION"), command)?;
        write!(out, "{}", Resolved(settings))?;
        for n in &self.notes {
            writeln!(out, "# {n}")?;
        }
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Writes each table to `<dir>/<name>.csv`, or all of them to stdout.
pub fn emit(tables: &[Table], command: &str, settings: &Settings) -> Result<(), CliError> {
    match &settings.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for t in tables {
                let path = dir.join(format!("{}.csv", t.name));
                write_file(&path, t, command, settings)?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut lock = io::BufWriter::new(stdout.lock());
            let written = tables
                .iter()
                .try_for_each(|t| t.write(&mut lock, command, settings))
                .and_then(|()| lock.flush());
            match written {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other.map_err(|e| CliError::Io(e.to_string()))?,
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, t: &Table, command: &str, settings: &Settings) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    t.write(&mut w, command, settings).map_err(io_err)?;
    w.flush().map_err(io_err)
}
