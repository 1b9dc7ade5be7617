use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker in the `j_star` column for steps where no bank member was selected.
pub const NO_SELECTION: i64 = -1;

/// One control step of a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
    pub delta: f64,
    /// Input computed at this step.
    pub d: f64,
    pub ddelta: f64,
    pub mu_true: f64,
    pub mu_hat: f64,
    pub j_star: i64,
    /// Centerline arc length.
    pub s: f64,
    /// Lateral offset from the centerline, left positive.
    pub e_y: f64,
    /// Distance to the raceline.
    pub deviation: f64,
    /// Laps completed when this state was reached.
    pub lap: u32,
    pub mpc_cost: f64,
    /// Wall-clock seconds spent on this control step.
    pub compute_time: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub dt: f64,
    pub laps_target: u32,
    /// Whether the run stopped on divergence.
    pub diverged: bool,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV with `#` metadata lines ahead of the header. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut out = out;
        writeln!(out, "# dt={}", self.dt)?;
        writeln!(out, "# laps_target={}", self.laps_target)?;
        writeln!(out, "# diverged={}", self.diverged)?;
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        if self.records.is_empty() {
            w.write_record(HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut trace = RunTrace::default();
        let mut have_dt = false;
        let mut line = String::new();
        let mut line_no = 0;
        // metadata
        let body = loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                return Err(Error::Parse { line: line_no, msg: "trace has no header".into() });
            }
            line_no += 1;
            let Some(meta) = line.trim_end().strip_prefix('#') else {
                break line.clone();
            };
            let Some((key, value)) = meta.trim().split_once('=') else { continue };
            let bad = |e: String| Error::Parse { line: line_no, msg: format!("{key}: {e}") };
            match key {
                "dt" => {
                    trace.dt = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
                    have_dt = true;
                }
                "laps_target" => trace.laps_target = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "diverged" => trace.diverged = value.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
                _ => {}
            }
        };
        if !have_dt {
            return Err(Error::Parse { line: line_no, msg: "missing `# dt=` metadata".into() });
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes().chain(reader));
        for (i, rec) in rdr.deserialize().enumerate() {
            let rec: TraceRecord = rec.map_err(|e| Error::Parse { line: line_no + 1 + i, msg: e.to_string() })?;
            trace.records.push(rec);
        }
        Ok(trace)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

const HEADER: [&str; 19] = [
    "t", "x", "y", "phi", "vx", "vy", "omega", "delta", "d", "ddelta", "mu_true", "mu_hat", "j_star", "s", "e_y", "deviation", "lap",
    "mpc_cost", "compute_time",
];
