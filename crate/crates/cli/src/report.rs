//! Report writers: JSON-lines records, the CSV summary and the pretty table
//! printer behind the `show` verb.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cache::CachedWindow;

/// One scan record, serialized as a JSON line with this exact field layout.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub algebra: String,
    pub module: String,
    pub q: usize,
    pub d: i64,
    pub r: i64,
    pub h: usize,
    #[serde(rename = "dim_Z_proj")]
    pub dim_z_proj: usize,
    #[serde(rename = "dim_B_proj")]
    pub dim_b_proj: usize,
    pub stable: bool,
    pub elapsed_ms: u64,
    pub engine_version: String,
}

impl ScanRecord {
    pub fn from_cached(entry: &CachedWindow, stable: bool) -> ScanRecord {
        ScanRecord {
            algebra: entry.algebra.clone(),
            module: entry.module.clone(),
            q: entry.q,
            d: entry.d,
            r: entry.r,
            h: entry.h,
            dim_z_proj: entry.dim_z_proj,
            dim_b_proj: entry.dim_b_proj,
            stable,
            elapsed_ms: entry.elapsed_ms,
            engine_version: entry.engine_version.clone(),
        }
    }
}

pub const CSV_HEADER: &str = "algebra,module,q,d,r,h,stable";

pub fn write_jsonl(path: &Path, records: &[ScanRecord]) -> std::io::Result<()> {
    let mut out = std::fs::File::create(path)?;
    for record in records {
        writeln!(
            out,
            "{}",
            serde_json::to_string(record).expect("serializable")
        )?;
    }
    Ok(())
}

pub fn write_csv(path: &Path, records: &[ScanRecord]) -> std::io::Result<()> {
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.algebra, r.module, r.q, r.d, r.r, r.h, r.stable
        )?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> std::io::Result<Vec<ScanRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ScanRecord = serde_json::from_str(line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        records.push(record);
    }
    Ok(records)
}

/// Dimension table for human eyes.
pub fn format_table(records: &[ScanRecord]) -> String {
    let mut out = String::new();
    if let Some(first) = records.first() {
        out.push_str(&format!(
            "algebra: {}   module: {}\n",
            first.algebra, first.module
        ));
    }
    out.push_str(&format!(
        "{:>3} {:>4} {:>3} {:>5} {:>7}\n",
        "q", "d", "r", "h", "stable"
    ));
    for r in records {
        out.push_str(&format!(
            "{:>3} {:>4} {:>3} {:>5} {:>7}\n",
            r.q, r.d, r.r, r.h, r.stable
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(q: usize, r: i64, h: usize) -> ScanRecord {
        ScanRecord {
            algebra: "witt".into(),
            module: "adjoint".into(),
            q,
            d: 0,
            r,
            h,
            dim_z_proj: h + 3,
            dim_b_proj: 3,
            stable: true,
            elapsed_ms: 12,
            engine_version: "0.1.0".into(),
        }
    }

    #[test]
    fn jsonl_round_trip_and_field_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.jsonl");
        let records = vec![record(1, 4, 0), record(2, 4, 1)];
        write_jsonl(&path, &records).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"dim_Z_proj\""));
        assert!(text.contains("\"dim_B_proj\""));
        assert!(text.contains("\"engine_version\""));
        assert_eq!(read_jsonl(&path).unwrap(), records);
    }

    #[test]
    fn csv_header_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        write_csv(&path, &[record(3, 5, 0)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("algebra,module,q,d,r,h,stable"));
        assert_eq!(lines.next(), Some("witt,adjoint,3,0,5,0,true"));
    }
}
