//! The projective plane PG(2,q): indexed points and lines with fully
//! precomputed incidence.
//!
//! Homogeneous triples are normalized so that their last nonzero coordinate
//! is 1. Points are numbered `(1,0,0)`, then `(x,1,0)` for `x = 0..q`, then
//! `(x,y,1)` in lexicographic order of `(x,y)`; lines use the same numbering
//! on dual coordinates. A point lies on a line iff the dot product vanishes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::{FieldElement, FieldTable};

pub type PointIndex = u16;
pub type LineIndex = u16;
pub type Triple = [FieldElement; 3];

const NONE: u16 = u16::MAX;

/// Bit words needed for the largest supported plane (q = 32, 1057 points).
pub const SET_WORDS: usize = 17;

/// The incidence structure of PG(2,q).
#[derive(Clone, Debug)]
pub struct PlaneModel {
    field: FieldTable,
    q: usize,
    n: usize,
    points: Vec<Triple>,
    vec_index: Vec<u16>,
    line_through: Vec<u16>,
    points_on: Vec<u16>,
    lines_on: Vec<u16>,
    incidence: Vec<u64>,
    inc_words: usize,
    frob_point: Vec<Vec<u16>>,
}

impl PlaneModel {
    pub fn build(field: FieldTable) -> Self {
        let q = field.q();
        let n = q * q + q + 1;

        let mut points = Vec::with_capacity(n);
        points.push([1, 0, 0]);
        for x in 0..q as u8 {
            points.push([x, 1, 0]);
        }
        for x in 0..q as u8 {
            for y in 0..q as u8 {
                points.push([x, y, 1]);
            }
        }

        let mut vec_index = vec![NONE; q * q * q];
        for a in 0..q as u8 {
            for b in 0..q as u8 {
                for c in 0..q as u8 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let t = normalize(&field, [a, b, c]);
                    vec_index[(a as usize * q + b as usize) * q + c as usize] = index_of_normalized(q, t);
                }
            }
        }

        let inc_words = n.div_ceil(64);
        let mut incidence = vec![0u64; n * inc_words];
        let mut points_on = Vec::with_capacity(n * (q + 1));
        let mut lines_on = vec![Vec::with_capacity(q + 1); n];
        for (li, l) in points.iter().enumerate() {
            for (pi, pt) in points.iter().enumerate() {
                if dot(&field, l, pt) == 0 {
                    incidence[li * inc_words + pi / 64] |= 1 << (pi % 64);
                    points_on.push(pi as u16);
                    lines_on[pi].push(li as u16);
                }
            }
        }
        debug_assert_eq!(points_on.len(), n * (q + 1));
        let lines_on: Vec<u16> = lines_on.into_iter().flatten().collect();

        let mut line_through = vec![NONE; n * n];
        for l in 0..n {
            let on = &points_on[l * (q + 1)..(l + 1) * (q + 1)];
            for &a in on {
                for &b in on {
                    if a != b {
                        line_through[a as usize * n + b as usize] = l as u16;
                    }
                }
            }
        }

        let h = field.h();
        let frob_point = (0..h)
            .map(|e| {
                points
                    .iter()
                    .map(|t| {
                        let v = t.map(|x| field.frobenius_power(x, e));
                        vec_index[(v[0] as usize * q + v[1] as usize) * q + v[2] as usize]
                    })
                    .collect()
            })
            .collect();

        PlaneModel {
            field,
            q,
            n,
            points,
            vec_index,
            line_through,
            points_on,
            lines_on,
            incidence,
            inc_words,
            frob_point,
        }
    }

    pub fn for_order(q: u32) -> Result<Self> {
        Ok(Self::build(FieldTable::for_order(q)?))
    }

    #[inline]
    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of points (and of lines): q^2 + q + 1.
    #[inline]
    pub fn num_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn point(&self, p: PointIndex) -> Triple {
        self.points[p as usize]
    }

    /// Dual coordinates of a line.
    #[inline]
    pub fn line(&self, l: LineIndex) -> Triple {
        self.points[l as usize]
    }

    /// Index of the point represented by any nonzero vector.
    #[inline(always)]
    pub fn index_of_vector(&self, v: Triple) -> PointIndex {
        let i = self.vec_index[(v[0] as usize * self.q + v[1] as usize) * self.q + v[2] as usize];
        debug_assert!(i != NONE, "zero vector has no point");
        i
    }

    pub fn index_of(&self, v: Triple) -> Option<PointIndex> {
        if v.iter().any(|&x| x as usize >= self.q) {
            return None;
        }
        match self.vec_index[(v[0] as usize * self.q + v[1] as usize) * self.q + v[2] as usize] {
            NONE => None,
            i => Some(i),
        }
    }

    /// Index of the line with the given dual coordinates.
    pub fn line_index_of(&self, v: Triple) -> Option<LineIndex> {
        self.index_of(v)
    }

    /// The unique line through two distinct points.
    pub fn line_through(&self, a: PointIndex, b: PointIndex) -> Result<LineIndex> {
        if a == b {
            return domain(format!("line_through needs two distinct points, got {a} twice"));
        }
        Ok(self.join(a, b))
    }

    /// Unchecked join of two distinct points.
    #[inline(always)]
    pub fn join(&self, a: PointIndex, b: PointIndex) -> LineIndex {
        let l = self.line_through[a as usize * self.n + b as usize];
        debug_assert!(l != NONE);
        l
    }

    /// The common point of two distinct lines.
    pub fn meet(&self, l: LineIndex, m: LineIndex) -> PointIndex {
        debug_assert!(l != m);
        self.join(l, m)
    }

    /// The q+1 points of a line, ascending.
    #[inline(always)]
    pub fn points_on(&self, l: LineIndex) -> &[PointIndex] {
        let k = self.q + 1;
        &self.points_on[l as usize * k..(l as usize + 1) * k]
    }

    /// The q+1 lines through a point, ascending.
    #[inline(always)]
    pub fn lines_through(&self, p: PointIndex) -> &[LineIndex] {
        let k = self.q + 1;
        &self.lines_on[p as usize * k..(p as usize + 1) * k]
    }

    #[inline(always)]
    pub fn on_line(&self, p: PointIndex, l: LineIndex) -> bool {
        let w = self.incidence[l as usize * self.inc_words + p as usize / 64];
        w >> (p % 64) & 1 == 1
    }

    #[inline(always)]
    pub fn collinear(&self, a: PointIndex, b: PointIndex, c: PointIndex) -> bool {
        a == b || a == c || b == c || self.on_line(c, self.join(a, b))
    }

    /// Image of a point under the field automorphism `x -> x^(p^e)`.
    #[inline(always)]
    pub fn frobenius_point(&self, p: PointIndex, e: u32) -> PointIndex {
        self.frob_point[e as usize][p as usize]
    }

    /// The standard frame e1, e2, e3, (1,1,1).
    pub fn standard_frame(&self) -> [PointIndex; 4] {
        let q = self.q as u16;
        [0, 1, q + 1, 2 * q + 2]
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::from_indices(0..self.n as u16)
    }

    pub fn line_set(&self, l: LineIndex) -> PointSet {
        PointSet::from_indices(self.points_on(l).iter().copied())
    }

    /// True iff the four points form a frame (no three collinear).
    pub fn is_frame(&self, s: &PointSet) -> Result<bool> {
        if s.len() != 4 {
            return domain(format!("is_frame needs exactly 4 points, got {}", s.len()));
        }
        let v = s.to_vec();
        Ok(self.is_frame_tuple([v[0], v[1], v[2], v[3]]))
    }

    #[inline]
    pub fn is_frame_tuple(&self, f: [PointIndex; 4]) -> bool {
        let [a, b, c, d] = f;
        !(self.collinear(a, b, c)
            || self.collinear(a, b, d)
            || self.collinear(a, c, d)
            || self.collinear(b, c, d))
    }

    /// True iff some 4-subset of `s` is a frame.
    pub fn contains_frame(&self, s: &PointSet) -> bool {
        self.find_frame(&s.to_vec()).is_some()
    }

    /// True iff `pts` lies inside the union of one line and one extra point.
    pub fn within_line_plus_point(&self, pts: &[PointIndex]) -> bool {
        if pts.len() <= 3 {
            return true;
        }
        let (a, b, c) = (pts[0], pts[1], pts[2]);
        [self.join(a, b), self.join(a, c), self.join(b, c)]
            .into_iter()
            .any(|l| pts.iter().filter(|&&p| !self.on_line(p, l)).count() <= 1)
    }

    /// Some frame inside `pts`, if any.
    ///
    /// A set with at least four points is frame-free exactly when it lies in
    /// a line plus one point; otherwise the 4-subsets are scanned until the
    /// first frame.
    pub fn find_frame(&self, pts: &[PointIndex]) -> Option<[PointIndex; 4]> {
        if pts.len() < 4 || self.within_line_plus_point(pts) {
            return None;
        }
        let k = pts.len();
        for i in 0..k {
            for j in i + 1..k {
                let l = self.join(pts[i], pts[j]);
                for m in j + 1..k {
                    if self.on_line(pts[m], l) {
                        continue;
                    }
                    for r in m + 1..k {
                        let f = [pts[i], pts[j], pts[m], pts[r]];
                        if self.is_frame_tuple(f) {
                            return Some(f);
                        }
                    }
                }
            }
        }
        unreachable!("sets not inside a line plus a point contain a frame")
    }

    /// Homogeneous triples of a set, for debugging output.
    pub fn describe(&self, s: &PointSet) -> String {
        let parts: Vec<String> = s
            .iter()
            .map(|p| {
                let [a, b, c] = self.point(p);
                format!("({a},{b},{c})")
            })
            .collect();
        parts.join(" ")
    }
}

#[inline]
fn dot(f: &FieldTable, a: &Triple, b: &Triple) -> FieldElement {
    f.add(f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1])), f.mul(a[2], b[2]))
}

/// Scale a nonzero vector so that its last nonzero coordinate is 1.
pub fn normalize(f: &FieldTable, v: Triple) -> Triple {
    let pivot = v.iter().rev().find(|&&x| x != 0).copied().expect("nonzero vector");
    let s = f.inv(pivot);
    v.map(|x| f.mul(x, s))
}

fn index_of_normalized(q: usize, t: Triple) -> u16 {
    match t {
        [_, _, 1] => (q + 1 + t[0] as usize * q + t[1] as usize) as u16,
        [_, 1, 0] => (1 + t[0] as usize) as u16,
        _ => 0,
    }
}

/// A set of points of PG(2,q), q <= 32, as a fixed-capacity bit vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet {
    words: [u64; SET_WORDS],
    len: u16,
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices(it: impl IntoIterator<Item = PointIndex>) -> Self {
        let mut s = Self::new();
        for p in it {
            s.insert(p);
        }
        s
    }

    /// Returns true if `p` was not yet present.
    #[inline]
    pub fn insert(&mut self, p: PointIndex) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        self.len += fresh as u16;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, p: PointIndex) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        let present = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.len -= present as u16;
        present
    }

    #[inline]
    pub fn contains(&self, p: PointIndex) -> bool {
        self.words[p as usize / 64] >> (p % 64) & 1 == 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = PointIndex> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((i * 64) as u16 + b as u16)
            })
        })
    }

    /// Sorted point indices.
    pub fn to_vec(&self) -> Vec<PointIndex> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut words = [0u64; SET_WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words[i] | other.words[i];
        }
        PointSet::from_words(words)
    }

    fn from_words(words: [u64; SET_WORDS]) -> Self {
        let len = words.iter().map(|w| w.count_ones()).sum::<u32>() as u16;
        PointSet { words, len }
    }

    /// Number of points shared with a line.
    pub fn count_on(&self, m: &PlaneModel, l: LineIndex) -> usize {
        m.points_on(l).iter().filter(|&&p| self.contains(p)).count()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<PointIndex> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointIndex>>(iter: I) -> Self {
        PointSet::from_indices(iter)
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u16>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&p| p as usize >= SET_WORDS * 64) {
            return Err(serde::de::Error::custom(format!("point index {bad} out of range")));
        }
        Ok(PointSet::from_indices(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane(q: u32) -> PlaneModel {
        PlaneModel::for_order(q).unwrap()
    }

    fn frame_brute(m: &PlaneModel, pts: &[PointIndex]) -> bool {
        let k = pts.len();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    for d in c + 1..k {
                        if m.is_frame_tuple([pts[a], pts[b], pts[c], pts[d]]) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn counts() {
        let m = plane(2);
        assert_eq!(m.num_points(), 7);
        assert_eq!(m.points_on(0).len(), 3);
        assert_eq!(plane(9).num_points(), 91);
        let m = plane(23);
        assert_eq!(m.num_points(), 553);
        assert!((0..553).all(|l| m.points_on(l).len() == 24));
    }

    #[test]
    fn enumeration_order() {
        let m = plane(3);
        assert_eq!(m.point(0), [1, 0, 0]);
        assert_eq!(m.point(1), [0, 1, 0]);
        assert_eq!(m.point(3), [2, 1, 0]);
        assert_eq!(m.point(4), [0, 0, 1]);
        assert_eq!(m.point(5), [0, 1, 1]);
        assert_eq!(m.point(7), [1, 0, 1]);
        assert_eq!(m.point(12), [2, 2, 1]);
        assert_eq!(m.standard_frame(), [0, 1, 4, 8]);
        assert_eq!(m.point(8), [1, 1, 1]);
    }

    #[test]
    fn join_examples() {
        let m = plane(3);
        let e1 = m.index_of([1, 0, 0]).unwrap();
        let e2 = m.index_of([0, 1, 0]).unwrap();
        assert_eq!(m.line(m.line_through(e1, e2).unwrap()), [0, 0, 1]);
        assert!(m.line_through(e1, e1).is_err());

        let a = m.index_of([0, 0, 1]).unwrap();
        let b = m.index_of([1, 1, 1]).unwrap();
        let l = m.line_through(a, b).unwrap();
        let brute: Vec<PointIndex> = (0..m.num_points() as u16)
            .filter(|&p| dot(m.field(), &m.point(p), &m.line(l)) == 0)
            .collect();
        assert_eq!(m.points_on(l), brute.as_slice());
        let expect: Vec<PointIndex> =
            [[0, 0, 1], [1, 1, 0], [1, 1, 1], [2, 2, 1]].iter().map(|&t| m.index_of(t).unwrap()).collect();
        let mut expect = expect;
        expect.sort();
        assert_eq!(m.points_on(l), expect.as_slice());
    }

    #[test]
    fn join_symmetric_q4() {
        let m = plane(4);
        let n = m.num_points() as u16;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    assert_eq!(m.join(a, b), m.join(b, a));
                }
            }
        }
    }

    #[test]
    fn incidence_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let m = plane(q);
            let n = m.num_points() as u16;
            for a in 0..n {
                assert_eq!(m.lines_through(a).len(), q as usize + 1);
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let common: Vec<_> = (0..n).filter(|&l| m.on_line(a, l) && m.on_line(b, l)).collect();
                    assert_eq!(common, vec![m.join(a, b)]);
                    // dual: two lines meet in exactly one point
                    let meet: Vec<_> = (0..n).filter(|&p| m.on_line(p, a) && m.on_line(p, b)).collect();
                    assert_eq!(meet.len(), 1);
                }
            }
        }
    }

    #[test]
    fn dual_triples_enumerate_all_lines() {
        let m = plane(5);
        let mut seen = std::collections::HashSet::new();
        for l in 0..m.num_points() as u16 {
            let set: Vec<_> = m.points_on(l).to_vec();
            assert!(seen.insert(set));
        }
        assert_eq!(seen.len(), 31);
    }

    #[test]
    fn frame_examples() {
        let m = plane(5);
        let idx = |t: Triple| m.index_of(t).unwrap();
        let std = PointSet::from_indices(m.standard_frame());
        assert!(m.is_frame(&std).unwrap());
        let bad = PointSet::from_indices([idx([1, 0, 0]), idx([0, 1, 0]), idx([1, 1, 0]), idx([0, 0, 1])]);
        assert!(!m.is_frame(&bad).unwrap());
        assert!(m.is_frame(&PointSet::from_indices([0, 1, 2])).is_err());
    }

    #[test]
    fn fano_frames_are_line_complements() {
        let m = plane(2);
        let mut frames = 0;
        for mask in 0u32..128 {
            if mask.count_ones() != 4 {
                continue;
            }
            let s = PointSet::from_indices((0..7).filter(|i| mask >> i & 1 == 1));
            let brute = frame_brute(&m, &s.to_vec());
            assert_eq!(m.is_frame(&s).unwrap(), brute);
            if brute {
                frames += 1;
                let complement: Vec<u16> = (0..7).filter(|&i| !s.contains(i)).collect();
                let l = m.join(complement[0], complement[1]);
                assert!(m.on_line(complement[2], l));
            }
        }
        // 7 lines, each complement is a frame
        assert_eq!(frames, 7);
    }

    #[test]
    fn contains_frame_examples() {
        let m = plane(7);
        let mut s = m.line_set(3);
        let ext = (0..m.num_points() as u16).find(|&p| !m.on_line(p, 3)).unwrap();
        s.insert(ext);
        assert!(!m.contains_frame(&s));
        let mut t = PointSet::from_indices(m.standard_frame());
        t.insert(17);
        t.insert(40);
        assert!(m.contains_frame(&t));
        assert!(!m.contains_frame(&PointSet::from_indices([0, 1, 9])));
    }

    #[test]
    fn contains_frame_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4] {
            let m = plane(q);
            let all: Vec<u16> = (0..m.num_points() as u16).collect();
            for _ in 0..2000 {
                let k = rng.gen_range(0..=m.num_points().min(9));
                let pts: Vec<u16> = all.choose_multiple(&mut rng, k).copied().collect();
                let s = PointSet::from_indices(pts.iter().copied());
                assert_eq!(m.contains_frame(&s), frame_brute(&m, &s.to_vec()), "{s:?}");
            }
            // structured near-degenerate sets: a line plus two extra points
            for l in 0..m.num_points() as u16 {
                let off: Vec<u16> = all.iter().copied().filter(|&p| !m.on_line(p, l)).take(2).collect();
                let mut s = m.line_set(l);
                s.insert(off[0]);
                assert!(!m.contains_frame(&s));
                s.insert(off[1]);
                assert_eq!(m.contains_frame(&s), frame_brute(&m, &s.to_vec()));
            }
        }
    }

    #[test]
    fn pointset_basics() {
        let mut s = PointSet::new();
        assert!(s.insert(700));
        assert!(!s.insert(700));
        assert!(s.insert(3));
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_vec(), vec![3, 700]);
        assert!(s.remove(3));
        assert_eq!(s.len(), 1);
        let json = serde_json::to_string(&PointSet::from_indices([5, 1, 9])).unwrap();
        assert_eq!(json, "[1,5,9]");
        let back: PointSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_vec(), vec![1, 5, 9]);
    }
}
