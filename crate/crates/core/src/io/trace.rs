use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::evolve::{DiagnosticsTrace, TraceRow};

pub const TRACE_HEADER: [&str; 8] = ["iter", "t", "wall_ms", "mean", "min", "max", "rel_change", "err"];

/// Writes the trace as CSV; `err` is left empty when no reference was set.
pub fn write_trace(trace: &DiagnosticsTrace, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.rows {
        w.write_record([
            r.iter.to_string(),
            r.t.to_string(),
            r.wall_ms.to_string(),
            r.mean.to_string(),
            r.min.to_string(),
            r.max.to_string(),
            r.rel_change.to_string(),
            r.err.map(|e| e.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trace(trace: &DiagnosticsTrace, path: impl AsRef<Path>) -> Result<()> {
    write_trace(trace, std::fs::File::create(path)?)
}

/// Parses a trace file written by [`save_trace`].
pub fn load_trace(input: impl Read) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_HEADER {
        return Err(Error::InvalidConfig(format!("unexpected trace header {header:?}")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidConfig(format!("bad number '{s}' in trace")))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record?;
        let err = match &rec[7] {
            "" => None,
            s => Some(num(s)?),
        };
        rows.push(TraceRow {
            iter: rec[0]
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad iteration '{}'", &rec[0])))?,
            t: num(&rec[1])?,
            wall_ms: num(&rec[2])?,
            mean: num(&rec[3])?,
            min: num(&rec[4])?,
            max: num(&rec[5])?,
            rel_change: num(&rec[6])?,
            err,
        });
    }
    Ok(rows)
}
