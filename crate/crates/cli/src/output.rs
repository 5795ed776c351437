//! Shared output helpers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Seventeen significant digits: enough to reproduce every double exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Buffered writer to `dir/name`, or to stdout without a directory.
pub fn sink(dir: Option<&Path>, name: &str) -> io::Result<Box<dyn Write>> {
    Ok(match dir {
        Some(d) => Box::new(BufWriter::new(File::create(d.join(name))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn print_json<T: Serialize>(value: &T) -> Result<(), crate::Failure> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), crate::Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
