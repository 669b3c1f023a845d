//! CSV files (comma separated, header row, LF endings) and gnuplot stubs.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, self.to_bytes()?).with_context(|| format!("writing {}", path.display()))
    }
}

/// Shortest round-trip decimal form of `x`.
pub fn num(x: f64) -> String {
    // no negative zero in files
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

pub fn ints(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes a gnuplot script plotting column `y` (1-based) of `csv` against column `x`.
pub fn gnuplot_stub(path: &Path, csv: &Path, x: usize, ys: &[(usize, &str)]) -> Result<()> {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut f = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    writeln!(f, "# gnuplot -p {}", path.file_name().unwrap_or_default().to_string_lossy())?;
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key autotitle columnhead")?;
    let plots: Vec<String> = ys.iter().map(|(y, t)| format!("'{name}' using {x}:{y} with lines title '{t}'")).collect();
    writeln!(f, "plot {}", plots.join(", \\\n     "))?;
    Ok(())
}
