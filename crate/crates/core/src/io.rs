//! Output helpers: lossless real formatting, CSV tables and binary PPM images.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

/// Formats a real with 17 significant digits, enough for an exact round trip.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header row and numeric rows as comma-separated text.
pub fn write_csv_rows<P, R>(path: P, header: &[String], rows: R) -> Result<()>
where
    P: AsRef<Path>,
    R: IntoIterator<Item = Vec<f64>>,
{
    write_csv_records(
        path,
        header,
        rows.into_iter().map(|r| r.into_iter().map(fmt_real).collect()),
    )
}

/// Like [`write_csv_rows`] for pre-formatted cells.
pub fn write_csv_records<P, R>(path: P, header: &[String], rows: R) -> Result<()>
where
    P: AsRef<Path>,
    R: IntoIterator<Item = Vec<String>>,
{
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// 24-bit RGB color.
pub type Rgb = [u8; 3];

/// Writes a binary PPM (P6) image, `pixels` in row-major order.
pub fn write_ppm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[Rgb]) -> Result<()> {
    let path = path.as_ref();
    if pixels.len() != width * height {
        return Err(Error::Dimension(format!(
            "{} pixels for a {width}x{height} image",
            pixels.len()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let body: Vec<u8> = pixels.iter().flatten().copied().collect();
    write!(w, "P6\n{width} {height}\n255\n")
        .and_then(|_| w.write_all(&body))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
