//! Results files, aggregate counts and the text table.
//!
//! The results file is JSON lines: a header line naming the field, the
//! point normalization and the equivalence group, then one class record per
//! line. The aggregate is one row per (q, k, label) with separate counts for
//! plain classes and complete arcs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::classify::ClassRecord;
use crate::collineation::Variant;
use crate::error::{Error, Result};
use crate::groups::label_order;

pub const NORMALIZATION: &str = "last nonzero coordinate = 1; points (1,0,0), (x,1,0), (x,y,1)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultsHeader {
    pub format: String,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub variant: Variant,
    pub normalization: String,
}

impl ResultsHeader {
    pub fn new(q: u32, modulus: Vec<u32>, variant: Variant) -> Self {
        ResultsHeader { format: "minsat-results-v1".into(), q, modulus, variant, normalization: NORMALIZATION.into() }
    }
}

pub fn write_results(mut w: impl Write, header: &ResultsHeader, records: &[ClassRecord]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(r: impl BufRead) -> Result<(ResultsHeader, Vec<ClassRecord>)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty results file".into()))??;
    let header: ResultsHeader = serde_json::from_str(&first)?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok((header, records))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub q: u32,
    pub k: usize,
    pub group_label: String,
    pub group_order: u64,
    pub plain: u64,
    pub complete: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub q: u32,
    pub modulus: Vec<u32>,
    pub variant: Variant,
    pub normalization: String,
    pub rows: Vec<AggregateRow>,
}

/// Rows sorted by (q, k, group order, label).
pub fn aggregate_rows(records: &[ClassRecord]) -> Vec<AggregateRow> {
    let mut map: BTreeMap<(u32, usize, u64, String), (u64, u64)> = BTreeMap::new();
    for r in records {
        let order = label_order(&r.group_label).unwrap_or_else(|| r.stab_order());
        let e = map.entry((r.q, r.k, order, r.group_label.clone())).or_default();
        if r.is_complete_arc {
            e.1 += 1;
        } else {
            e.0 += 1;
        }
    }
    map.into_iter()
        .map(|((q, k, group_order, group_label), (plain, complete))| AggregateRow {
            q,
            k,
            group_label,
            group_order,
            plain,
            complete,
        })
        .collect()
}

pub fn aggregate(header: &ResultsHeader, records: &[ClassRecord]) -> Aggregate {
    Aggregate {
        q: header.q,
        modulus: header.modulus.clone(),
        variant: header.variant,
        normalization: header.normalization.clone(),
        rows: aggregate_rows(records),
    }
}

pub fn aggregate_json(agg: &Aggregate) -> Result<String> {
    let mut s = serde_json::to_string_pretty(agg)?;
    s.push('\n');
    Ok(s)
}

/// One line per (q, k): `label: plain` cells, with complete-arc counts
/// appended as `+ n complete`, followed by the row total.
pub fn format_table(rows: &[AggregateRow]) -> String {
    let mut by_qk: BTreeMap<(u32, usize), Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows {
        by_qk.entry((r.q, r.k)).or_default().push(r);
    }
    let mut out = String::new();
    let mut last_q = None;
    for ((q, k), cells) in by_qk {
        if last_q != Some(q) {
            let _ = writeln!(out, "PG(2,{q})");
            last_q = Some(q);
        }
        let total: u64 = cells.iter().map(|c| c.plain + c.complete).sum();
        let parts: Vec<String> = cells
            .iter()
            .map(|c| {
                if c.complete == 0 {
                    format!("{}: {}", c.group_label, c.plain)
                } else {
                    format!("{}: {} + {} complete", c.group_label, c.plain, c.complete)
                }
            })
            .collect();
        let _ = writeln!(out, "  k={k}: {}  [total {total}]", parts.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, label: &str, order: u64, complete: bool, canon: u16) -> ClassRecord {
        ClassRecord {
            q: 9,
            k,
            canonical: vec![0, 1, 10, canon],
            stab_order_pgl: order,
            stab_order_pgammal: order,
            group_label: label.into(),
            variant: Variant::PGammaL,
            is_complete_arc: complete,
            contains_frame: true,
        }
    }

    #[test]
    fn table_and_aggregate() {
        let recs = vec![
            rec(6, "G_120", 120, true, 20),
            rec(8, "G_16", 16, false, 21),
            rec(8, "G_16", 16, true, 22),
            rec(8, "Z_1", 1, false, 23),
            rec(8, "Z_2xZ_2", 4, false, 24),
        ];
        let rows = aggregate_rows(&recs);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].group_label, "Z_1");
        let t = format_table(&rows);
        assert!(t.contains("k=6: G_120: 0 + 1 complete  [total 1]"), "{t}");
        assert!(t.contains("k=8: Z_1: 1, Z_2xZ_2: 1, G_16: 1 + 1 complete  [total 4]"), "{t}");
        assert_eq!(format_table(&[]), "");
    }

    #[test]
    fn results_roundtrip() {
        let h = ResultsHeader::new(9, vec![1, 0, 1], Variant::PGammaL);
        let recs = vec![rec(6, "G_120", 120, true, 20)];
        let mut buf = Vec::new();
        write_results(&mut buf, &h, &recs).unwrap();
        let (h2, r2) = read_results(&buf[..]).unwrap();
        assert_eq!((h2, r2), (h, recs));
        assert!(read_results(&b""[..]).is_err());
    }
}
