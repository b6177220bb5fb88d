use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use atomflux::{NoiseSpectra64, PsdEstimate64};
use serde::Serialize;

use crate::error::CliError;

pub const SPECTRA_HEADER: &str = "omega,n_x,n_u,n_k,n_uk,n_sp";
pub const PSD_HEADER: &str = "omega,s_xx,stderr";

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:e}")
}

fn row(out: &mut (impl Write + ?Sized), fields: &[f64]) -> io::Result<()> {
    let mut line = String::with_capacity(24 * fields.len());
    for (i, &f) in fields.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format_float(f));
    }
    line.push('\n');
    out.write_all(line.as_bytes())
}

pub fn write_spectra_csv(out: &mut (impl Write + ?Sized), s: &NoiseSpectra64) -> io::Result<()> {
    writeln!(out, "{SPECTRA_HEADER}")?;
    for p in s.points() {
        row(out, &[p.omega, p.n_x, p.n_u, p.n_k, p.n_uk, p.n_sp])?;
    }
    Ok(())
}

pub fn write_psd_csv(out: &mut (impl Write + ?Sized), psd: &PsdEstimate64) -> io::Result<()> {
    writeln!(out, "{PSD_HEADER}")?;
    for ((&w, &s), &e) in psd.grid.omegas().iter().zip(&psd.s_xx).zip(&psd.stderr) {
        row(out, &[w, s, e])?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(out: &mut (impl Write + ?Sized), doc: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc)?;
    out.write_all(b"\n")
}

/// Parses a CSV produced by this crate back into a header and rows.
pub fn parse_csv(text: &str) -> Result<(String, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?.to_string();
    let width = header.split(',').count();
    let rows = lines
        .map(|line| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| format!("{f:?}: {e}")))
                .collect::<Result<_, _>>()?;
            if row.len() == width {
                Ok(row)
            } else {
                Err(format!("expected {width} fields in {line:?}"))
            }
        })
        .collect::<Result<_, String>>()?;
    Ok((header, rows))
}

/// A file or standard output.
pub struct Sink {
    path: Option<PathBuf>,
    writer: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let writer: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self {
            path: path.map(Path::to_path_buf),
            writer,
        })
    }

    fn label(&self) -> PathBuf {
        self.path.clone().unwrap_or_else(|| PathBuf::from("<stdout>"))
    }

    /// Runs `f` against the sink and flushes it, mapping failures to I/O errors.
    pub fn emit(mut self, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
        f(&mut self.writer)
            .and_then(|_| self.writer.flush())
            .map_err(|e| CliError::io(self.label(), e))
    }
}
