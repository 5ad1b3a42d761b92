//! Point sets as parity-check matrices of [l, l-3]_q codes.
//!
//! A spanning 1-saturating l-set gives a code of covering radius 2: every
//! syndrome in GF(q)^3 is a combination of at most two columns.

use std::fmt::Write as _;

use crate::error::{domain, Result};
use crate::field::FieldTable;
use crate::plane::{PlaneModel, PointSet, Triple};

/// 3 x l matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    pub q: u32,
    pub modulus: Vec<u32>,
    pub columns: Vec<Triple>,
}

impl ParityCheckMatrix {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `[n, k]` of the code.
    pub fn parameters(&self) -> (usize, usize) {
        let l = self.columns.len();
        (l, l.saturating_sub(3))
    }

    pub fn rank(&self, f: &FieldTable) -> usize {
        rank(f, &self.columns)
    }

    /// Header comment plus three rows of space-separated field values.
    pub fn to_text(&self) -> String {
        let (n, k) = self.parameters();
        let mut out = format!(
            "# parity-check matrix q={} modulus={:?} l={} code=[{n},{k}]_{}\n",
            self.q, self.modulus, n, self.q
        );
        for r in 0..3 {
            let row: Vec<String> = self.columns.iter().map(|c| c[r].to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

fn rank(f: &FieldTable, cols: &[Triple]) -> usize {
    let mut rows: Vec<Vec<u8>> = (0..3).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let l = cols.len();
    let mut rank = 0;
    for c in 0..l {
        let Some(p) = (rank..3).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = f.inv(rows[rank][c]);
        for x in rows[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..3 {
            if r != rank && rows[r][c] != 0 {
                let factor = rows[r][c];
                for j in 0..l {
                    let v = f.mul(factor, rows[rank][j]);
                    rows[r][j] = f.sub(rows[r][j], v);
                }
            }
        }
        rank += 1;
        if rank == 3 {
            break;
        }
    }
    rank
}

/// Columns are the normalized triples of `s` in index order.
pub fn export_code(m: &PlaneModel, s: &PointSet) -> Result<ParityCheckMatrix> {
    let columns: Vec<Triple> = s.iter().map(|p| m.point(p)).collect();
    if rank(m.field(), &columns) < 3 {
        return domain("point set does not span the plane");
    }
    let spec = m.field().spec();
    Ok(ParityCheckMatrix { q: m.q() as u32, modulus: spec.modulus.clone(), columns })
}

/// True iff every nonzero syndrome is a combination of at most two columns
/// and at least one needs two.
pub fn covering_radius_is_2(f: &FieldTable, h: &ParityCheckMatrix) -> Result<bool> {
    if h.rank(f) < 3 {
        return domain("parity-check matrix must have rank 3");
    }
    let q = f.q();
    let idx = |v: Triple| (v[0] as usize * q + v[1] as usize) * q + v[2] as usize;
    let mut reach = vec![0u8; q * q * q];
    let scaled: Vec<Vec<Triple>> =
        h.columns.iter().map(|c| (1..q as u8).map(|l| c.map(|x| f.mul(l, x))).collect()).collect();
    for col in &scaled {
        for v in col {
            reach[idx(*v)] = 1;
        }
    }
    for i in 0..scaled.len() {
        for j in i + 1..scaled.len() {
            for a in &scaled[i] {
                for b in &scaled[j] {
                    let v = [f.add(a[0], b[0]), f.add(a[1], b[1]), f.add(a[2], b[2])];
                    let r = &mut reach[idx(v)];
                    if *r == 0 {
                        *r = 2;
                    }
                }
            }
        }
    }
    let nonzero = &reach[1..];
    Ok(nonzero.iter().all(|&r| r > 0) && nonzero.contains(&2))
}
