//! Sensor stream CSV files: header `t_ms,x,y,z`, one sample per row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dfam_core::signal::{Sample, StreamKind, TimeSeries};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Row {
    t_ms: i64,
    x: f64,
    y: f64,
    z: f64,
}

pub const HEADER: [&str; 4] = ["t_ms", "x", "y", "z"];

pub fn read_stream(path: &Path, kind: StreamKind, sampling_hz: f64) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| Error::format(path, e))?;
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::format(path, format!("expected header {}", HEADER.join(","))));
    }
    let mut samples = Vec::new();
    for row in reader.deserialize::<Row>() {
        let r = row.map_err(|e| Error::format(path, e))?;
        samples.push(Sample::new(r.t_ms, r.x, r.y, r.z));
    }
    TimeSeries::new(kind, sampling_hz, samples).map_err(|e| Error::format(path, e))
}

pub fn write_stream(path: &Path, stream: &TimeSeries) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "{}", HEADER.join(",")).map_err(io)?;
    for s in stream.samples() {
        writeln!(out, "{},{},{},{}", s.t_ms, s.x, s.y, s.z).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Checks that timestamps advance by `1000 / sampling_hz` ms on average
/// (within 5%).
pub fn check_rate(path: &Path, stream: &TimeSeries) -> Result<()> {
    let s = stream.samples();
    if s.len() < 2 {
        return Ok(());
    }
    let expected = 1000.0 / stream.sampling_hz();
    let span = (s[s.len() - 1].t_ms - s[0].t_ms) as f64;
    let mean = span / (s.len() - 1) as f64;
    if (mean - expected).abs() > 0.05 * expected {
        return Err(Error::Manifest(format!(
            "{}: mean sample spacing {mean:.3} ms does not match {} Hz",
            path.display(),
            stream.sampling_hz()
        )));
    }
    Ok(())
}
