//! Isomorph-free classification of minimal 1-saturating sets containing a
//! projective frame.
//!
//! Phase 1 grows the standard frame breadth-first up to the seed size (plus
//! `prefix_depth` further levels); the resulting sets are the work units.
//! Phase 2 extends every unit depth-first on a pool of workers. Each
//! harvested set is analysed for its canonical form and stabilizer, then
//! deduplicated by canonical form in the harvest store.

mod canon;
mod checkpoint;
mod search;
mod store;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

pub use canon::{analyze, canonical_form, stabilizer, Analysis};
pub use checkpoint::{Checkpoint, CheckpointHeader};
pub use search::SearchStats;
pub use store::HarvestStore;

use crate::collineation::{all_elements, group_order, Collineation, Variant};
use crate::error::{Error, Result};
use crate::groups::label_of;
use crate::plane::{PlaneModel, PointSet};
use crate::saturation::{is_arc, is_complete_arc};
use search::Engine;

/// One equivalence class of minimal 1-saturating sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub q: u32,
    pub k: usize,
    /// Canonical representative as a sorted point index list.
    pub canonical: Vec<u16>,
    pub stab_order_pgl: u64,
    pub stab_order_pgammal: u64,
    /// Label of the stabilizer in the equivalence group `variant`.
    pub group_label: String,
    pub variant: Variant,
    pub is_complete_arc: bool,
    pub contains_frame: bool,
}

impl ClassRecord {
    pub fn set(&self) -> PointSet {
        PointSet::from_indices(self.canonical.iter().copied())
    }

    /// Stabilizer order in the equivalence group.
    pub fn stab_order(&self) -> u64 {
        match self.variant {
            Variant::Pgl => self.stab_order_pgl,
            Variant::PGammaL => self.stab_order_pgammal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q: u32,
    /// Field modulus, low degree first; must match the plane's field.
    pub modulus: Vec<u32>,
    pub seed_size: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub variant: Variant,
    pub workers: usize,
    /// Extra breadth-first levels past the seed size used to cut work units.
    pub prefix_depth: usize,
    /// Records held in memory before the harvest store spills to disk.
    pub spill_cap: usize,
}

impl SearchConfig {
    /// Defaults: seed size 6 (clamped to the range), the default variant,
    /// all available cores, one extra partition level.
    pub fn new(m: &PlaneModel, k_min: usize, k_max: usize) -> Self {
        let q = m.q() as u32;
        SearchConfig {
            q,
            modulus: m.field().spec().modulus.clone(),
            seed_size: 6.min(k_min).max(4),
            k_min,
            k_max,
            variant: Variant::default_for(q),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            prefix_depth: 1,
            spill_cap: 1 << 20,
        }
    }

    pub fn validate(&self, m: &PlaneModel) -> Result<()> {
        if self.q as usize != m.q() || self.modulus != m.field().spec().modulus {
            return Err(Error::Config("search configuration does not match the plane's field".into()));
        }
        let top = m.q() + 2;
        if !(4 <= self.seed_size && self.seed_size <= self.k_min && self.k_min <= self.k_max && self.k_max <= top) {
            return Err(Error::Config(format!(
                "need 4 <= seed_size ({}) <= k_min ({}) <= k_max ({}) <= q+2 ({top})",
                self.seed_size, self.k_min, self.k_max
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    fn header(&self, units: usize) -> CheckpointHeader {
        CheckpointHeader {
            q: self.q,
            modulus: self.modulus.clone(),
            variant: self.variant,
            seed_size: self.seed_size,
            k_min: self.k_min,
            k_max: self.k_max,
            prefix_depth: self.prefix_depth,
            units,
        }
    }
}

/// Checkpointing and progress options for [`run`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    /// Flush the checkpoint after this many finished units (0 = every unit).
    pub checkpoint_every: usize,
    pub progress: bool,
}

#[derive(Clone, Debug)]
pub struct ClassifyOutput {
    pub records: Vec<ClassRecord>,
    pub stats: SearchStats,
    pub units: usize,
    pub resumed_units: usize,
    /// Harvested sets before deduplication.
    pub harvested: u64,
}

/// Full analysis of a frame-containing minimal 1-saturating set.
pub fn class_record(m: &PlaneModel, s: &PointSet, variant: Variant) -> Result<ClassRecord> {
    let a = analyze(m, s, variant)?;
    let group = a.stabilizer_in(variant);
    let arc = is_arc(m, s);
    Ok(ClassRecord {
        q: m.q() as u32,
        k: s.len(),
        canonical: a.canonical.clone(),
        stab_order_pgl: a.stab_order_pgl(),
        stab_order_pgammal: a.stab_order_pgammal(),
        group_label: label_of(m.field(), &group)?,
        variant,
        is_complete_arc: arc && is_complete_arc(m, s)?,
        contains_frame: true,
    })
}

/// One record per class of frame-containing minimal 1-saturating sets with
/// size in `[k_min, k_max]`, sorted by size and canonical form.
pub fn classify(m: &PlaneModel, cfg: &SearchConfig) -> Result<Vec<ClassRecord>> {
    Ok(run(m, cfg, &RunOptions::default())?.records)
}

pub fn run(m: &PlaneModel, cfg: &SearchConfig, opts: &RunOptions) -> Result<ClassifyOutput> {
    cfg.validate(m)?;
    let autos = cfg.variant.automorphisms(m.field().h());
    let mut eng = Engine::new(m, autos, cfg.k_min, cfg.k_max);
    let mut store = HarvestStore::new(cfg.spill_cap);
    let mut stats = SearchStats::default();

    // phase 1
    let root = PointSet::from_indices(m.standard_frame());
    let mut level = Vec::new();
    let mut early = Vec::new();
    eng.load(&root);
    if eng.saturated() {
        if cfg.k_min <= 4 && eng.is_minimal() {
            early.push(root);
        }
    } else {
        level.push(root);
    }
    let depth = (cfg.seed_size + cfg.prefix_depth).min(cfg.k_max - 1);
    let mut size = 4;
    while size < depth && !level.is_empty() {
        let mut next = Vec::new();
        for s in &level {
            eng.load(s);
            let (nodes, leaves) = eng.child_sets();
            next.extend(nodes);
            early.extend(leaves);
        }
        level = next;
        size += 1;
    }
    stats.merge(&eng.stats);
    for s in &early {
        store.insert(class_record(m, s, cfg.variant)?)?;
    }
    let units = level;
    if opts.progress {
        eprintln!("phase 1: {} work units of size {size}, {} early leaves", units.len(), early.len());
    }

    // phase 2
    let header = cfg.header(units.len());
    let every = opts.checkpoint_every.max(1);
    let (mut ck, done) = match (&opts.checkpoint, opts.resume) {
        (Some(p), true) => {
            let (c, d) = Checkpoint::resume(p, &header, every)?;
            (Some(c), d)
        }
        (Some(p), false) => (Some(Checkpoint::create(p, &header, every)?), BTreeMap::new()),
        (None, true) => return Err(Error::Config("resume requested without a checkpoint path".into())),
        (None, false) => (None, BTreeMap::new()),
    };
    let resumed_units = done.len();
    for recs in done.values() {
        for r in recs {
            store.insert(r.clone())?;
        }
    }

    let todo: Vec<usize> = (0..units.len()).filter(|i| !done.contains_key(i)).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Result<(usize, Vec<ClassRecord>, SearchStats)>>();
    let workers = cfg.workers.min(todo.len()).max(1);
    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (units, todo, next) = (&units, &todo, &next);
            scope.spawn(move || {
                let mut eng = Engine::new(m, autos, cfg.k_min, cfg.k_max);
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&u) = todo.get(i) else { break };
                    eng.stats = SearchStats::default();
                    eng.load(&units[u]);
                    let mut leaves = Vec::new();
                    eng.dfs(&mut leaves);
                    let recs: Result<Vec<ClassRecord>> =
                        leaves.iter().map(|s| class_record(m, s, cfg.variant)).collect();
                    if tx.send(recs.map(|r| (u, r, eng.stats))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        let mut finished = 0;
        for msg in rx {
            let (u, recs, st) = msg?;
            stats.merge(&st);
            if let Some(c) = ck.as_mut() {
                c.record(u, &recs)?;
            }
            for r in recs {
                store.insert(r)?;
            }
            finished += 1;
            if opts.progress && (finished % 64 == 0 || finished == todo.len()) {
                eprintln!("phase 2: {finished}/{} units, {} sets harvested", todo.len(), store.offered());
            }
        }
        Ok(())
    })?;
    if let Some(c) = ck.as_mut() {
        c.flush()?;
    }
    let harvested = store.offered();
    let records = store.finish()?;
    Ok(ClassifyOutput { records, stats, units: units.len(), resumed_units, harvested })
}

/// The unique frame-free minimal 1-saturating set: the line z = 0 together
/// with the point (0,0,1).
pub fn theorem1_points(m: &PlaneModel) -> PointSet {
    PointSet::from_indices(0..=m.q() as u16 + 1)
}

/// Stabilizer order of the line-plus-point set from the closed formula
/// |G| / (q^2 (q^2+q+1)).
pub fn theorem1_formula(q: u32, variant: Variant) -> Result<u64> {
    let q64 = q as u64;
    Ok(group_order(q, variant)? / (q64 * q64 * (q64 * q64 + q64 + 1)))
}

/// Elements of the stabilizer of the line-plus-point set by direct count.
///
/// For q <= 4 the whole group is scanned. Otherwise only matrices
/// `[[a,b,0],[c,d,0],[0,0,1]]` are tried: a stabilizing collineation must fix
/// the external point (the only point of the set off the line z = 0, which
/// holds q+1 of its q+2 points) and the line itself, and these are exactly
/// the matrices doing so. Every candidate is still checked on the set.
pub fn theorem1_stabilizer(m: &PlaneModel, variant: Variant) -> Result<Vec<Collineation>> {
    let s = theorem1_points(m);
    let f = m.field();
    if m.q() <= 4 {
        return Ok(all_elements(m, variant)?.into_iter().filter(|g| g.apply(m, &s) == s).collect());
    }
    let q = m.q() as u8;
    let mut out = Vec::new();
    for e in 0..variant.automorphisms(f.h()) {
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        if f.sub(f.mul(a, d), f.mul(b, c)) == 0 {
                            continue;
                        }
                        let g = Collineation::new(f, [a, b, 0, c, d, 0, 0, 0, 1], e)?;
                        if g.apply(m, &s) == s {
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Record for the frame-free class under the default variant.
pub fn theorem1_set(m: &PlaneModel) -> Result<ClassRecord> {
    theorem1_record(m, Variant::default_for(m.q() as u32))
}

/// Record for the frame-free class, with both stabilizer orders counted
/// directly. The label is computed from the elements for orders below 16.
pub fn theorem1_record(m: &PlaneModel, variant: Variant) -> Result<ClassRecord> {
    let q = m.q() as u32;
    let stab = theorem1_stabilizer(m, variant)?;
    let pgl = if variant == Variant::Pgl { stab.len() } else { stab.iter().filter(|g| g.auto_exp == 0).count() };
    let pgammal = if variant == Variant::PGammaL { stab.len() } else { theorem1_stabilizer(m, Variant::PGammaL)?.len() };
    let order = stab.len() as u64;
    let group_label = if order < 16 { label_of(m.field(), &stab)? } else { format!("G_{order}") };
    let s = theorem1_points(m);
    let arc = is_arc(m, &s);
    Ok(ClassRecord {
        q,
        k: s.len(),
        canonical: s.to_vec(),
        stab_order_pgl: pgl as u64,
        stab_order_pgammal: pgammal as u64,
        group_label,
        variant,
        is_complete_arc: arc && is_complete_arc(m, &s)?,
        contains_frame: false,
    })
}

/// Orbit–stabilizer check: for each size present in `records`,
/// Σ |G| / |Stab| must equal the number of labeled minimal 1-saturating
/// sets of that size, counted by direct enumeration (q <= 4).
pub fn verify_class_counts(m: &PlaneModel, records: &[ClassRecord], variant: Variant) -> Result<bool> {
    let g = group_order(m.q() as u32, variant)?;
    let mut sums: BTreeMap<usize, u64> = BTreeMap::new();
    for r in records {
        let stab = match variant {
            Variant::Pgl => r.stab_order_pgl,
            Variant::PGammaL => r.stab_order_pgammal,
        };
        *sums.entry(r.k).or_default() += g / stab;
    }
    let labeled = crate::verify::labeled_minimal_counts(m)?;
    Ok(sums.iter().all(|(k, &n)| labeled.get(k).copied().unwrap_or(0) == n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saturation::{is_one_minimal, is_one_saturating};

    fn cfg(m: &PlaneModel, k_min: usize, k_max: usize) -> SearchConfig {
        let mut c = SearchConfig::new(m, k_min, k_max);
        c.workers = 2;
        c
    }

    #[test]
    fn config_validation() {
        let m = PlaneModel::for_order(5).unwrap();
        assert!(cfg(&m, 5, 7).validate(&m).is_ok());
        assert!(cfg(&m, 3, 7).validate(&m).is_err());
        assert!(cfg(&m, 6, 8).validate(&m).is_err());
        let mut c = cfg(&m, 5, 7);
        c.seed_size = 6;
        assert!(c.validate(&m).is_err());
        c.seed_size = 5;
        c.q = 7;
        assert!(c.validate(&m).is_err());
    }

    #[test]
    fn outputs_are_minimal_distinct_and_canonical() {
        for q in [5, 7] {
            let m = PlaneModel::for_order(q).unwrap();
            let recs = classify(&m, &cfg(&m, 5, q as usize + 2)).unwrap();
            assert!(!recs.is_empty());
            let mut seen = std::collections::HashSet::new();
            for r in &recs {
                let s = r.set();
                assert!(is_one_saturating(&m, &s).unwrap());
                assert!(is_one_minimal(&m, &s).unwrap());
                assert!(m.contains_frame(&s));
                assert_eq!(canonical_form(&m, &s, r.variant).unwrap(), s);
                assert!(seen.insert(r.canonical.clone()));
            }
        }
    }

    #[test]
    fn results_do_not_depend_on_partitioning() {
        let m = PlaneModel::for_order(7).unwrap();
        let base = classify(&m, &cfg(&m, 6, 9)).unwrap();
        for (seed, depth, workers) in [(4, 0, 1), (5, 2, 3), (6, 0, 4)] {
            let mut c = cfg(&m, 6, 9);
            c.seed_size = seed;
            c.prefix_depth = depth;
            c.workers = workers;
            assert_eq!(classify(&m, &c).unwrap(), base);
        }
    }

    #[test]
    fn checkpoint_resume_gives_same_result() {
        let m = PlaneModel::for_order(7).unwrap();
        let c = cfg(&m, 6, 8);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ck");
        let opts = RunOptions { checkpoint: Some(path.clone()), ..Default::default() };
        let full = run(&m, &c, &opts).unwrap();
        // keep the header and half the unit lines
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let keep = 1 + (lines.len() - 1) / 2;
        std::fs::write(&path, lines[..keep].join("\n") + "\n").unwrap();
        let resumed = run(&m, &c, &RunOptions { resume: true, ..opts }).unwrap();
        assert_eq!(resumed.resumed_units, keep - 1);
        assert_eq!(resumed.records, full.records);
    }

    #[test]
    fn spilling_store_matches() {
        let m = PlaneModel::for_order(7).unwrap();
        let mut c = cfg(&m, 6, 8);
        let base = classify(&m, &c).unwrap();
        c.spill_cap = 3;
        assert_eq!(classify(&m, &c).unwrap(), base);
    }

    #[test]
    fn theorem1_small() {
        let m = PlaneModel::for_order(2).unwrap();
        let r = theorem1_set(&m).unwrap();
        assert_eq!((r.k, r.stab_order_pgl), (4, 6));
        assert_eq!(theorem1_stabilizer(&m, Variant::Pgl).unwrap().len(), 6);
        assert_eq!(r.group_label, "S_3");
        assert!(!r.contains_frame);
        for q in [3, 4, 5, 7] {
            let m = PlaneModel::for_order(q).unwrap();
            let s = theorem1_points(&m);
            assert!(!m.contains_frame(&s));
            assert!(is_one_minimal(&m, &s).unwrap());
            for v in [Variant::Pgl, Variant::PGammaL] {
                let direct = theorem1_stabilizer(&m, v).unwrap().len() as u64;
                assert_eq!(direct, theorem1_formula(q, v).unwrap(), "q={q} {v}");
            }
        }
    }
}
