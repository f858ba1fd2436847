//! Waveform container: little-endian header `fs: f64, fc: f64, kind: u32,
//! length: u64` followed by `length` interleaved `f64` I/Q pairs. Bandwidth
//! metadata and the retune schedule are not stored.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Waveform, WaveformKind};
use crate::error::{Error, Result};
use crate::report::fmt_f64;

pub const HEADER_LEN: usize = 8 + 8 + 4 + 8;

pub fn write_binary<W: Write>(w: &Waveform, mut out: W) -> Result<()> {
    out.write_all(&w.sample_rate.to_le_bytes())?;
    out.write_all(&w.carrier.to_le_bytes())?;
    out.write_all(&w.kind.code().to_le_bytes())?;
    out.write_all(&(w.samples.len() as u64).to_le_bytes())?;
    for z in &w.samples {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads a container. The instantaneous bandwidth is set to `fs / 2.5` (the
/// largest value the sample rate supports) since the container does not carry it.
pub fn read_binary<R: Read>(mut input: R) -> Result<Waveform> {
    let fs = f64::from_le_bytes(read_array(&mut input)?);
    let fc = f64::from_le_bytes(read_array(&mut input)?);
    let code = u32::from_le_bytes(read_array(&mut input)?);
    let len = u64::from_le_bytes(read_array(&mut input)?) as usize;
    let kind = WaveformKind::from_code(code)
        .ok_or_else(|| Error::Config(format!("unknown waveform kind code {code}")))?;
    let mut samples = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        let re = f64::from_le_bytes(read_array(&mut input)?);
        let im = f64::from_le_bytes(read_array(&mut input)?);
        samples.push(Complex64::new(re, im));
    }
    Waveform::new(
        fs,
        fc,
        samples,
        fs / super::MIN_OVERSAMPLING,
        Vec::new(),
        kind,
    )
}

/// `t,I,Q` rows with a header line.
pub fn write_csv<W: Write>(w: &Waveform, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["t", "I", "Q"])?;
    for (n, z) in w.samples.iter().enumerate() {
        wr.write_record([fmt_f64(w.time(n)), fmt_f64(z.re), fmt_f64(z.im)])?;
    }
    wr.flush()?;
    Ok(())
}
