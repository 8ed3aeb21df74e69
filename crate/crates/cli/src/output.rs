use std::fs::File;
use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::GlobalOpts;

/// Everything a command produces. Exit status depends on `pass` alone.
pub struct Outcome {
    pub pass: bool,
    pub text: String,
    pub json: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
}

pub fn emit(outcome: &Outcome, opts: &GlobalOpts) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if opts.json {
        serde_json::to_writer_pretty(&mut out, &outcome.json)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", outcome.text)?;
    }
    if let Some(path) = &opts.csv {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
        w.write_record(&outcome.csv_header)?;
        for row in &outcome.csv_rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
