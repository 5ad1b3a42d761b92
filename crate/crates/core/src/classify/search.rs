//! Backtracking over frame-containing, non-saturating point sets with
//! isomorph rejection by canonical deletion.
//!
//! Every tree node is one representative of its equivalence class. A child
//! `T = S ∪ {x}` is kept only when `x` lies in the stabilizer-orbit of the
//! canonically chosen deletable point of `T`, and candidate points `x` are
//! taken one per orbit of the stabilizer of `S`. The deletable point is the
//! one with the largest geometric invariant; only ties fall back to a frame
//! scan restricted to frames of minimal invariant signature.
//!
//! All proper subsets of a minimal 1-saturating set are non-saturating, so
//! the tree never has to grow past a saturating set.

use crate::collineation::frame_to_standard;
use crate::collineation::map_point;
use crate::plane::{LineIndex, PlaneModel, PointIndex, PointSet};
use crate::saturation::CoverageState;

use super::canon::image_sorted;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ChildKind {
    /// Minimal 1-saturating set with size in the target range.
    Leaf,
    /// Non-saturating set to be extended further.
    Node,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub candidates: u64,
    pub leaves: u64,
    pub frame_scans: u64,
}

impl SearchStats {
    pub fn merge(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.candidates += o.candidates;
        self.leaves += o.leaves;
        self.frame_scans += o.frame_scans;
    }
}

#[inline(always)]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps achieving the least image of the current set over the frames of
/// minimal invariant signature.
struct Certificate {
    maps: Vec<([u8; 9], u32)>,
}

pub(crate) struct Engine<'a> {
    m: &'a PlaneModel,
    autos: u32,
    k_min: usize,
    k_max: usize,
    st: CoverageState,
    pos: Vec<u8>,
    key_stamp: Vec<u32>,
    key_val: Vec<u64>,
    stamp: u32,
    inv: Vec<u64>,
    heavy: Vec<LineIndex>,
    img: Vec<PointIndex>,
    best: Vec<PointIndex>,
    pub stats: SearchStats,
}

impl<'a> Engine<'a> {
    pub fn new(m: &'a PlaneModel, autos: u32, k_min: usize, k_max: usize) -> Self {
        let n = m.num_points();
        Engine {
            m,
            autos,
            k_min,
            k_max,
            st: CoverageState::new(m),
            pos: vec![0; n],
            key_stamp: vec![0; n],
            key_val: vec![0; n],
            stamp: 0,
            inv: Vec::new(),
            heavy: Vec::new(),
            img: Vec::new(),
            best: Vec::new(),
            stats: SearchStats::default(),
        }
    }

    /// Resets the state to the given set.
    pub fn load(&mut self, s: &PointSet) {
        while self.st.pop(self.m).is_some() {}
        for p in s.iter() {
            self.push(p);
        }
    }

    pub fn saturated(&self) -> bool {
        self.st.saturated()
    }

    pub fn current(&self) -> PointSet {
        self.st.to_set()
    }

    pub fn is_minimal(&self) -> bool {
        self.st.saturated() && self.st.all_essential(self.m)
    }

    fn push(&mut self, x: PointIndex) {
        self.pos[x as usize] = self.st.len() as u8;
        self.st.add(self.m, x);
    }

    fn pop(&mut self) {
        self.st.pop(self.m);
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.key_stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
    }

    #[inline]
    fn line_key(&mut self, l: LineIndex) -> u64 {
        if self.key_stamp[l as usize] == self.stamp {
            return self.key_val[l as usize];
        }
        let mut acc = 0u64;
        for &p in self.m.points_on(l) {
            if !self.st.contains(p) {
                acc = acc.wrapping_add(mix(self.st.cover(p) as u64 | 0x1_0000));
            }
        }
        let k = mix(acc ^ (self.st.line_count(l) as u64).wrapping_mul(0xA24B_AED4_963E_E407));
        self.key_stamp[l as usize] = self.stamp;
        self.key_val[l as usize] = k;
        k
    }

    /// Per-point invariants of the current set, plus the lines that may keep
    /// a point from being deletable.
    fn compute_invariants(&mut self) {
        self.next_stamp();
        let t = self.st.len();
        self.inv.clear();
        self.inv.resize(t, 0);
        self.heavy.clear();
        let heavy_at = t.saturating_sub(2).max(3) as u8;
        for i in 0..t {
            let a = self.st.members()[i];
            for j in i + 1..t {
                let b = self.st.members()[j];
                let l = self.m.join(a, b);
                let k = self.line_key(l);
                self.inv[i] = self.inv[i].wrapping_add(k);
                self.inv[j] = self.inv[j].wrapping_add(k);
                if self.st.line_count(l) >= heavy_at && !self.heavy.contains(&l) {
                    self.heavy.push(l);
                }
            }
        }
    }

    /// Positions whose removal leaves a frame-containing set.
    fn deletable(&self, i: usize) -> bool {
        let t = self.st.len();
        if t < 5 {
            return false;
        }
        let y = self.st.members()[i];
        self.heavy.iter().all(|&l| {
            let c = self.st.line_count(l) as usize - self.m.on_line(y, l) as usize;
            c < t - 2
        })
    }

    /// Frames of minimal invariant signature and the maps attaining the
    /// least sorted image among them.
    fn certificate(&mut self) -> Certificate {
        self.stats.frame_scans += 1;
        let m = self.m;
        let t = self.st.len();
        let members: Vec<PointIndex> = self.st.members().to_vec();
        let mut order: Vec<usize> = (0..t).collect();
        order.sort_by_key(|&i| (self.inv[i], i));

        let mut sig = None;
        'find: for &a in &order {
            for &b in &order {
                if b == a {
                    continue;
                }
                for &c in &order {
                    if c == a || c == b {
                        continue;
                    }
                    for &d in &order {
                        if d == a || d == b || d == c {
                            continue;
                        }
                        if m.is_frame_tuple([members[a], members[b], members[c], members[d]]) {
                            sig = Some([self.inv[a], self.inv[b], self.inv[c], self.inv[d]]);
                            break 'find;
                        }
                    }
                }
            }
        }
        let sig = sig.expect("node sets contain a frame");
        let class = |v: u64| -> Vec<usize> { (0..t).filter(|&i| self.inv[i] == v).collect() };
        let (c0, c1, c2, c3) = (class(sig[0]), class(sig[1]), class(sig[2]), class(sig[3]));

        let mut maps = Vec::new();
        self.best.clear();
        for &a in &c0 {
            for &b in &c1 {
                if b == a {
                    continue;
                }
                for &c in &c2 {
                    if c == a || c == b {
                        continue;
                    }
                    for &d in &c3 {
                        if d == a || d == b || d == c {
                            continue;
                        }
                        let fr = [members[a], members[b], members[c], members[d]];
                        if !m.is_frame_tuple(fr) {
                            continue;
                        }
                        for e in 0..self.autos {
                            let tw = fr.map(|p| if e == 0 { p } else { m.frobenius_point(p, e) });
                            let mat = frame_to_standard(m, tw);
                            image_sorted(m, &mat, e, &members, &mut self.img);
                            if maps.is_empty() || self.img < self.best {
                                maps.clear();
                                std::mem::swap(&mut self.best, &mut self.img);
                                maps.push((mat, e));
                            } else if self.img == self.best {
                                maps.push((mat, e));
                            }
                        }
                    }
                }
            }
        }
        Certificate { maps }
    }

    #[inline]
    fn apply(&self, map: &([u8; 9], u32), p: PointIndex) -> PointIndex {
        let p = if map.1 == 0 { p } else { self.m.frobenius_point(p, map.1) };
        map_point(self.m, &map.0, p)
    }

    /// Canonical-deletion test for the last added point.
    fn accept_last(&mut self) -> bool {
        self.compute_invariants();
        let t = self.st.len();
        let x = t - 1;
        if !self.deletable(x) {
            return false;
        }
        let vx = self.inv[x];
        let mut ties = 0;
        for i in 0..t - 1 {
            if self.inv[i] >= vx && self.deletable(i) {
                if self.inv[i] > vx {
                    return false;
                }
                ties += 1;
            }
        }
        if ties == 0 {
            return true;
        }
        let cands: Vec<PointIndex> =
            (0..t).filter(|&i| self.inv[i] == vx && self.deletable(i)).map(|i| self.st.members()[i]).collect();
        let cert = self.certificate();
        let target = cands.iter().map(|&c| self.apply(&cert.maps[0], c)).min().unwrap();
        let xp = self.st.members()[x];
        cert.maps.iter().any(|mp| self.apply(mp, xp) == target)
    }

    /// One candidate point per orbit of the stabilizer of the current set.
    fn orbit_representatives(&mut self) -> Vec<PointIndex> {
        let n = self.m.num_points();
        self.compute_invariants();
        let cert = self.certificate();
        let outside = (0..n as u16).filter(|&p| !self.st.contains(p));
        if cert.maps.len() == 1 {
            return outside.collect();
        }
        let first: Vec<PointIndex> = (0..n as u16).map(|p| self.apply(&cert.maps[0], p)).collect();
        let mut back = vec![0u16; n];
        for (p, &img) in first.iter().enumerate() {
            back[img as usize] = p as u16;
        }
        let mut parent: Vec<u16> = (0..n as u16).collect();
        fn find(parent: &mut [u16], mut a: u16) -> u16 {
            while parent[a as usize] != a {
                let up = parent[parent[a as usize] as usize];
                parent[a as usize] = up;
                a = up;
            }
            a
        }
        for mp in &cert.maps[1..] {
            for p in 0..n as u16 {
                if self.st.contains(p) {
                    continue;
                }
                let img = back[self.apply(mp, p) as usize];
                let (ra, rb) = (find(&mut parent, p), find(&mut parent, img));
                if ra != rb {
                    // keep the smaller index as root
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent[hi as usize] = lo;
                }
            }
        }
        outside.filter(|&p| find(&mut parent, p) == p).collect()
    }

    /// Accepted children of the current node, in ascending point order.
    pub(crate) fn children(&mut self) -> Vec<(PointIndex, ChildKind)> {
        debug_assert!(!self.st.saturated());
        self.stats.nodes += 1;
        let m = self.m;
        let s = self.st.len();
        if s >= self.k_max || (s + 1 == self.k_max && !self.completable_by_one()) {
            return Vec::new();
        }
        let reps = self.orbit_representatives();

        let n = m.num_points() as u16;
        let uncovered: Vec<PointIndex> = (0..n).filter(|&p| !self.st.is_covered(p)).collect();
        // points whose only secant is a 2-secant: (point, line, both ends)
        let mut witnesses: Vec<(PointIndex, LineIndex, u64)> = Vec::new();
        for p in 0..n {
            if self.st.contains(p) || self.st.cover(p) != 1 {
                continue;
            }
            let l = *m.lines_through(p).iter().find(|&&l| self.st.line_count(l) >= 2).unwrap();
            if self.st.line_count(l) == 2 {
                let mut bits = 0u64;
                for &y in m.points_on(l) {
                    if self.st.contains(y) {
                        bits |= 1 << self.pos[y as usize];
                    }
                }
                witnesses.push((p, l, bits));
            }
        }
        let mut on_triple = 0u64;
        let members = self.st.members();
        for i in 0..s {
            for j in i + 1..s {
                if self.st.line_count(m.join(members[i], members[j])) >= 3 {
                    on_triple |= (1 << i) | (1 << j);
                }
            }
        }

        let mut out = Vec::new();
        for x in reps {
            self.stats.candidates += 1;
            let sat = uncovered.iter().all(|&p| p == x || self.st.line_count(m.join(p, x)) >= 1);
            if sat {
                if s + 1 < self.k_min || !self.child_minimal(x, &uncovered, &witnesses, on_triple) {
                    continue;
                }
            } else if s + 1 >= self.k_max {
                continue;
            }
            self.push(x);
            if !sat && s + 2 == self.k_max && !self.completable_by_one() {
                self.pop();
                continue;
            }
            let ok = self.accept_last();
            self.pop();
            if ok {
                let kind = if sat { ChildKind::Leaf } else { ChildKind::Node };
                out.push((x, kind));
            }
        }
        out
    }

    /// Whether one more point can saturate the current set. The first
    /// uncovered point must end up on a secant, so the added point is either
    /// that point or lies on a tangent line through it.
    fn completable_by_one(&self) -> bool {
        let m = self.m;
        let n = m.num_points() as u16;
        let uncovered: Vec<PointIndex> = (0..n).filter(|&p| !self.st.is_covered(p)).collect();
        let Some(&p0) = uncovered.first() else { return true };
        let saturates = |y: PointIndex| uncovered.iter().all(|&u| u == y || self.st.line_count(m.join(u, y)) >= 1);
        if saturates(p0) {
            return true;
        }
        for &l in m.lines_through(p0) {
            if self.st.line_count(l) == 0 {
                continue;
            }
            for &y in m.points_on(l) {
                if y != p0 && !self.st.contains(y) && saturates(y) {
                    return true;
                }
            }
        }
        false
    }

    /// Minimality of `S ∪ {x}`, given that it is saturating and `S` is not.
    fn child_minimal(
        &self,
        x: PointIndex,
        uncovered: &[PointIndex],
        witnesses: &[(PointIndex, LineIndex, u64)],
        on_triple: u64,
    ) -> bool {
        let m = self.m;
        let s = self.st.len();
        let full = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
        let members = self.st.members();
        let mut ess = 0u64;
        for (i, &y) in members.iter().enumerate() {
            if on_triple >> i & 1 == 0 && self.st.line_count(m.join(x, y)) < 2 {
                ess |= 1 << i;
            }
        }
        if ess == full {
            return true;
        }
        for &p in uncovered {
            if p == x {
                continue;
            }
            let l = m.join(p, x);
            if self.st.line_count(l) == 1 {
                let y = *m.points_on(l).iter().find(|&&y| self.st.contains(y)).unwrap();
                ess |= 1 << self.pos[y as usize];
            }
        }
        if ess == full {
            return true;
        }
        for &(p, l, bits) in witnesses {
            if p == x || m.on_line(x, l) || self.st.line_count(m.join(p, x)) != 0 {
                continue;
            }
            ess |= bits;
            if ess == full {
                return true;
            }
        }
        ess == full
    }

    /// Depth-first extension of the current node; leaves are appended.
    pub(crate) fn dfs(&mut self, leaves: &mut Vec<PointSet>) {
        for (x, kind) in self.children() {
            match kind {
                ChildKind::Leaf => {
                    self.stats.leaves += 1;
                    let mut t = self.current();
                    t.insert(x);
                    leaves.push(t);
                }
                ChildKind::Node => {
                    self.push(x);
                    self.dfs(leaves);
                    self.pop();
                }
            }
        }
    }

    /// Children of the current node as explicit sets.
    pub(crate) fn child_sets(&mut self) -> (Vec<PointSet>, Vec<PointSet>) {
        let base = self.current();
        let mut nodes = Vec::new();
        let mut leaves = Vec::new();
        for (x, kind) in self.children() {
            let mut t = base;
            t.insert(x);
            match kind {
                ChildKind::Leaf => {
                    self.stats.leaves += 1;
                    leaves.push(t)
                }
                ChildKind::Node => nodes.push(t),
            }
        }
        (nodes, leaves)
    }
}
