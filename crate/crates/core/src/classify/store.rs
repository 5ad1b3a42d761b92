//! Harvest store: deduplicates class records by (size, canonical form) and
//! spills sorted runs to disk once the in-memory part grows past a cap.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use tempfile::TempDir;

use super::ClassRecord;
use crate::error::Result;

type Key = (usize, Vec<u16>);

pub struct HarvestStore {
    cap: usize,
    mem: BTreeMap<Key, ClassRecord>,
    dir: Option<TempDir>,
    runs: Vec<PathBuf>,
    offered: u64,
}

impl HarvestStore {
    /// `cap` is the number of records kept in memory before spilling.
    pub fn new(cap: usize) -> Self {
        HarvestStore { cap: cap.max(1), mem: BTreeMap::new(), dir: None, runs: Vec::new(), offered: 0 }
    }

    pub fn insert(&mut self, rec: ClassRecord) -> Result<()> {
        self.offered += 1;
        self.mem.entry((rec.k, rec.canonical.clone())).or_insert(rec);
        if self.mem.len() >= self.cap {
            self.spill()?;
        }
        Ok(())
    }

    /// Number of records offered so far, duplicates included.
    pub fn offered(&self) -> u64 {
        self.offered
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn spill(&mut self) -> Result<()> {
        if self.mem.is_empty() {
            return Ok(());
        }
        if self.dir.is_none() {
            self.dir = Some(tempfile::Builder::new().prefix("minsat-runs").tempdir()?);
        }
        let path = self.dir.as_ref().unwrap().path().join(format!("run-{:05}.jsonl", self.runs.len()));
        let mut w = BufWriter::new(File::create(&path)?);
        for rec in std::mem::take(&mut self.mem).into_values() {
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        self.runs.push(path);
        Ok(())
    }

    /// All distinct records sorted by size and canonical form.
    pub fn finish(mut self) -> Result<Vec<ClassRecord>> {
        if self.runs.is_empty() {
            return Ok(self.mem.into_values().collect());
        }
        self.spill()?;
        let mut readers = Vec::new();
        let mut heads: Vec<Option<ClassRecord>> = Vec::new();
        for p in &self.runs {
            let mut lines = BufReader::new(File::open(p)?).lines();
            heads.push(next_record(&mut lines)?);
            readers.push(lines);
        }
        let mut out: Vec<ClassRecord> = Vec::new();
        loop {
            let Some(i) = (0..heads.len())
                .filter(|&i| heads[i].is_some())
                .min_by(|&a, &b| key(heads[a].as_ref().unwrap()).cmp(&key(heads[b].as_ref().unwrap())))
            else {
                break;
            };
            let rec = heads[i].take().unwrap();
            heads[i] = next_record(&mut readers[i])?;
            if out.last().is_none_or(|l| key(l) != key(&rec)) {
                out.push(rec);
            }
        }
        Ok(out)
    }
}

fn key(r: &ClassRecord) -> (usize, &[u16]) {
    (r.k, &r.canonical)
}

fn next_record(lines: &mut std::io::Lines<BufReader<File>>) -> Result<Option<ClassRecord>> {
    match lines.next() {
        None => Ok(None),
        Some(line) => Ok(Some(serde_json::from_str(&line?)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collineation::Variant;

    fn rec(k: usize, canon: &[u16]) -> ClassRecord {
        ClassRecord {
            q: 5,
            k,
            canonical: canon.to_vec(),
            stab_order_pgl: 1,
            stab_order_pgammal: 1,
            group_label: "Z_1".into(),
            variant: Variant::Pgl,
            is_complete_arc: false,
            contains_frame: true,
        }
    }

    #[test]
    fn dedup_in_memory_and_across_runs() {
        for cap in [1, 2, 3, 100] {
            let mut st = HarvestStore::new(cap);
            for c in [[0, 1, 6, 12, 20], [0, 1, 6, 12, 19], [0, 1, 6, 12, 20], [0, 1, 2, 6, 12]] {
                st.insert(rec(5, &c)).unwrap();
            }
            st.insert(rec(4, &[0, 1, 6, 12])).unwrap();
            st.insert(rec(5, &[0, 1, 6, 12, 19])).unwrap();
            assert_eq!(st.offered(), 6);
            let out = st.finish().unwrap();
            let keys: Vec<(usize, Vec<u16>)> = out.iter().map(|r| (r.k, r.canonical.clone())).collect();
            assert_eq!(
                keys,
                vec![
                    (4, vec![0, 1, 6, 12]),
                    (5, vec![0, 1, 2, 6, 12]),
                    (5, vec![0, 1, 6, 12, 19]),
                    (5, vec![0, 1, 6, 12, 20]),
                ],
                "cap {cap}"
            );
        }
    }
}
