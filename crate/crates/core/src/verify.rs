//! Brute-force oracles for small planes: every subset is tested with the
//! plain predicates and classes are formed by the full group action.

use std::collections::{BTreeMap, HashSet};

use crate::classify::ClassRecord;
use crate::collineation::{all_elements, Variant};
use crate::error::{domain, Result};
use crate::plane::{PlaneModel, PointSet};
use crate::saturation::{is_one_minimal, is_one_saturating};

/// Every minimal 1-saturating set of the plane, from all 2^n subsets.
pub fn all_minimal_sets(m: &PlaneModel) -> Result<Vec<PointSet>> {
    let n = m.num_points();
    if n > 21 {
        return domain(format!("subset enumeration is limited to q <= 4, got q = {}", m.q()));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        if mask.count_ones() < 2 {
            continue;
        }
        let s = PointSet::from_indices((0..n as u16).filter(|&i| mask >> i & 1 == 1));
        if is_one_saturating(m, &s)? && is_one_minimal(m, &s)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// Number of labeled minimal 1-saturating sets per size (q <= 4).
pub fn labeled_minimal_counts(m: &PlaneModel) -> Result<BTreeMap<usize, u64>> {
    let mut counts = BTreeMap::new();
    for s in all_minimal_sets(m)? {
        *counts.entry(s.len()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// One equivalence class found by the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleClass {
    pub k: usize,
    /// Least member of the orbit (sorted index lists compared lexicographically).
    pub representative: Vec<u16>,
    pub stab_order_pgl: u64,
    pub stab_order_pgammal: u64,
    pub orbit_size: u64,
    pub contains_frame: bool,
}

/// Brute-force classification: all minimal 1-saturating sets partitioned
/// into orbits of the full group of the variant (q <= 4).
pub fn oracle_classify(m: &PlaneModel, variant: Variant) -> Result<Vec<OracleClass>> {
    let full = all_elements(m, Variant::PGammaL)?;
    let autos = variant.automorphisms(m.field().h());
    let sets = all_minimal_sets(m)?;
    let mut seen: HashSet<PointSet> = HashSet::new();
    let mut out = Vec::new();
    for s in &sets {
        if seen.contains(s) {
            continue;
        }
        let mut orbit: HashSet<PointSet> = HashSet::new();
        let (mut pgl, mut pgammal) = (0, 0);
        for g in &full {
            let t = g.apply(m, s);
            if t == *s {
                pgammal += 1;
                if g.auto_exp == 0 {
                    pgl += 1;
                }
            }
            if g.auto_exp < autos {
                orbit.insert(t);
            }
        }
        let representative = orbit.iter().map(|t| t.to_vec()).min().unwrap();
        out.push(OracleClass {
            k: s.len(),
            representative,
            stab_order_pgl: pgl,
            stab_order_pgammal: pgammal,
            orbit_size: orbit.len() as u64,
            contains_frame: m.contains_frame(s),
        });
        seen.extend(orbit);
    }
    out.sort_by(|a, b| (a.k, &a.representative).cmp(&(b.k, &b.representative)));
    Ok(out)
}

/// Per size: number of classes and the sorted multiset of stabilizer orders
/// in the equivalence group.
pub type ClassSummary = BTreeMap<usize, (usize, Vec<u64>)>;

pub fn summarize_oracle(classes: &[OracleClass], variant: Variant) -> ClassSummary {
    let mut out: ClassSummary = BTreeMap::new();
    for c in classes {
        let e = out.entry(c.k).or_default();
        e.0 += 1;
        e.1.push(if variant == Variant::Pgl { c.stab_order_pgl } else { c.stab_order_pgammal });
    }
    out.values_mut().for_each(|v| v.1.sort_unstable());
    out
}

pub fn summarize_records(records: &[ClassRecord]) -> ClassSummary {
    let mut out: ClassSummary = BTreeMap::new();
    for r in records {
        let e = out.entry(r.k).or_default();
        e.0 += 1;
        e.1.push(r.stab_order());
    }
    out.values_mut().for_each(|v| v.1.sort_unstable());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_plane() {
        let m = PlaneModel::for_order(2).unwrap();
        let classes = oracle_classify(&m, Variant::Pgl).unwrap();
        // hyperovals (frames, 7 of them) and line-plus-point sets (7*4 = 28)
        let mut sizes: Vec<(usize, u64, bool)> = classes.iter().map(|c| (c.k, c.orbit_size, c.contains_frame)).collect();
        sizes.sort();
        assert_eq!(sizes, vec![(4, 7, true), (4, 28, false)]);
        assert_eq!(labeled_minimal_counts(&m).unwrap(), [(4, 35)].into_iter().collect());
    }

    #[test]
    fn dfs_count_matches_subset_scan_q3() {
        let m = PlaneModel::for_order(3).unwrap();
        let direct = labeled_minimal_counts(&m).unwrap();
        let mut st = crate::saturation::CoverageState::new(&m);
        let mut counts = BTreeMap::new();
        fn rec(m: &PlaneModel, st: &mut crate::saturation::CoverageState, from: u16, counts: &mut BTreeMap<usize, u64>) {
            for x in from..m.num_points() as u16 {
                st.add(m, x);
                if st.saturated() {
                    if st.all_essential(m) {
                        *counts.entry(st.len()).or_insert(0) += 1;
                    }
                } else {
                    rec(m, st, x + 1, counts);
                }
                st.pop(m);
            }
        }
        rec(&m, &mut st, 0, &mut counts);
        assert_eq!(direct, counts);
    }
}
