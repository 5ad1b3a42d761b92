//! Resumable progress log for long classification runs.
//!
//! JSON lines: a header describing the search, then one line per finished
//! work unit carrying the records harvested from it. A truncated final line
//! (interrupted write) is ignored on resume.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ClassRecord;
use crate::collineation::Variant;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub q: u32,
    pub modulus: Vec<u32>,
    pub variant: Variant,
    pub seed_size: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub prefix_depth: usize,
    pub units: usize,
}

#[derive(Serialize, Deserialize)]
struct UnitLine {
    unit: usize,
    records: Vec<ClassRecord>,
}

pub struct Checkpoint {
    out: BufWriter<File>,
    pending: usize,
    every: usize,
}

impl Checkpoint {
    /// Starts a fresh log, truncating any existing file.
    pub fn create(path: &Path, header: &CheckpointHeader, every: usize) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(Checkpoint { out, pending: 0, every: every.max(1) })
    }

    /// Reopens an existing log for appending; returns finished units.
    pub fn resume(
        path: &Path,
        header: &CheckpointHeader,
        every: usize,
    ) -> Result<(Self, BTreeMap<usize, Vec<ClassRecord>>)> {
        let file = File::open(path).map_err(|e| Error::Io(format!("cannot open checkpoint {}: {e}", path.display())))?;
        let mut lines = BufReader::new(file).lines();
        let first = lines.next().ok_or_else(|| Error::Parse("empty checkpoint file".into()))??;
        let found: CheckpointHeader = serde_json::from_str(&first)?;
        if &found != header {
            return Err(Error::Config(format!(
                "checkpoint was written for a different search: {found:?} vs {header:?}"
            )));
        }
        let mut done = BTreeMap::new();
        let mut valid_len = first.len() + 1;
        for line in lines {
            let line = line?;
            match serde_json::from_str::<UnitLine>(&line) {
                Ok(u) => {
                    valid_len += line.len() + 1;
                    done.insert(u.unit, u.records);
                }
                Err(_) => break,
            }
        }
        let f = OpenOptions::new().write(true).open(path)?;
        f.set_len(valid_len as u64)?;
        let mut out = BufWriter::new(f);
        use std::io::Seek;
        out.seek(std::io::SeekFrom::End(0))?;
        Ok((Checkpoint { out, pending: 0, every: every.max(1) }, done))
    }

    pub fn record(&mut self, unit: usize, records: &[ClassRecord]) -> Result<()> {
        serde_json::to_writer(&mut self.out, &UnitLine { unit, records: records.to_vec() })?;
        self.out.write_all(b"\n")?;
        self.pending += 1;
        if self.pending >= self.every {
            self.flush()?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.pending = 0;
        self.out.flush()?;
        self.out.get_ref().sync_data()?;
        Ok(())
    }
}
