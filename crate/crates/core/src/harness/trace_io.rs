//! CSV trace files: `# key = value` provenance lines, one header row, then
//! one row per record. Absent values are empty fields.

use std::path::Path;

use crate::app::TraceRow;
use crate::error::{Error, Result};

/// Provenance pairs and rows of a trace file.
pub type ParsedTrace = (Vec<(String, String)>, Vec<TraceRow>);

pub const TRACE_COLUMNS: [&str; 7] = ["k", "eval_count", "err_sq", "f_best", "m_hat", "sigma2_k", "wall_ms"];

pub fn trace_to_string(provenance: &[(String, String)], rows: &[TraceRow]) -> Result<String> {
    let mut out = String::new();
    for (k, v) in provenance {
        if k.contains('\n') || v.contains('\n') {
            return Err(Error::TraceFormat("provenance entries must be single-line".into()));
        }
        out.push_str(&format!("# {k} = {v}\n"));
    }
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(TRACE_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
    Ok(out)
}

pub fn write_trace(path: &Path, provenance: &[(String, String)], rows: &[TraceRow]) -> Result<()> {
    std::fs::write(path, trace_to_string(provenance, rows)?)?;
    Ok(())
}

/// Parses a trace produced by [`trace_to_string`].
pub fn parse_trace(text: &str) -> Result<ParsedTrace> {
    let mut provenance = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let (k, v) = line[1..]
            .split_once('=')
            .ok_or_else(|| Error::TraceFormat(format!("bad provenance line {line:?}")))?;
        provenance.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_COLUMNS {
        return Err(Error::TraceFormat(format!("unexpected columns {header:?}")));
    }
    let rows = r.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?;
    Ok((provenance, rows))
}

pub fn read_trace(path: &Path) -> Result<ParsedTrace> {
    parse_trace(&std::fs::read_to_string(path)?)
}
