//! Snapshot persistence.
//!
//! Binary layout (little-endian): `n: u64`, `time: f64`, then `n` pairs
//! `(re: f64, im: f64)` of coefficients in ascending wavenumber order
//! `k = −n/2+1, …, n/2`.

use std::io::Write;
use std::path::Path;

use super::{index_of, GridFunction, SpectralError, C64};

pub fn snapshot_bytes(f: &GridFunction, time: f64) -> Vec<u8> {
    let n = f.n();
    let mut out = Vec::with_capacity(16 + 16 * n);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for (_, c) in f.coeffs_ascending() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

pub fn read_snapshot_bytes(bytes: &[u8]) -> Result<(GridFunction, f64), SpectralError> {
    let bad = |m: &str| SpectralError::MalformedSnapshot(m.to_string());
    if bytes.len() < 16 {
        return Err(bad("header truncated"));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i..i + 8].try_into().expect("8 bytes") };
    let n = u64::from_le_bytes(word(0)) as usize;
    let time = f64::from_le_bytes(word(8));
    if bytes.len() != 16 + 16 * n {
        return Err(bad("payload length does not match n"));
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    let half = (n / 2) as i64;
    for (j, k) in (-half + 1..=half).enumerate() {
        let off = 16 + 16 * j;
        let re = f64::from_le_bytes(word(off));
        let im = f64::from_le_bytes(word(off + 8));
        let i = index_of(k, n).ok_or_else(|| bad("wavenumber out of band"))?;
        coeffs[i] = C64::new(re, im);
    }
    Ok((GridFunction::from_coeffs(coeffs)?, time))
}

pub fn write_snapshot(path: &Path, f: &GridFunction, time: f64) -> Result<(), SpectralError> {
    std::fs::write(path, snapshot_bytes(f, time)).map_err(|e| SpectralError::Io(e.to_string()))
}

pub fn read_snapshot(path: &Path) -> Result<(GridFunction, f64), SpectralError> {
    let bytes = std::fs::read(path).map_err(|e| SpectralError::Io(e.to_string()))?;
    read_snapshot_bytes(&bytes)
}

/// CSV with header `k,re,im`, ascending `k`.
pub fn write_coeff_csv(path: &Path, f: &GridFunction) -> Result<(), SpectralError> {
    let io = |e: std::io::Error| SpectralError::Io(e.to_string());
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(file, "k,re,im").map_err(io)?;
    for (k, c) in f.coeffs_ascending() {
        writeln!(file, "{k},{:e},{:e}", c.re, c.im).map_err(io)?;
    }
    file.flush().map_err(io)
}
