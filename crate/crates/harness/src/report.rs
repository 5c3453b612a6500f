//! Results output: per-op CSV and the summary JSON document.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::runner::{OpRecord, Summary};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct Row {
    #[serde(rename = "op-index")]
    index: usize,
    #[serde(rename = "op-kind")]
    op: char,
    micros: String,
    answer: String,
    cells: usize,
    edges: usize,
}

/// Writes one CSV row per replayed op; non-queries leave `answer` empty.
pub fn write_csv<W: Write>(out: W, records: &[OpRecord]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(Row {
            index: r.index,
            op: r.op,
            micros: format!("{:.3}", r.micros),
            answer: r.answer.map(|a| a.to_string()).unwrap_or_default(),
            cells: r.cells,
            edges: r.edges,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(mut out: W, summary: &Summary) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)?;
    Ok(())
}
