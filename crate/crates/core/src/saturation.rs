//! 1-saturation, minimality and arc predicates.
//!
//! A set S is 1-saturating when every point of the plane lies on a line
//! through two distinct points of S. Points of S count as covered once
//! |S| >= 2. Only ϱ = 1 is supported, hence the `one_` prefixes.

use crate::error::{domain, Result};
use crate::plane::{LineIndex, PlaneModel, PointIndex, PointSet};

/// Incrementally maintained secant coverage of a point set.
///
/// `line_count[l]` is |l ∩ S|; `cover[p]` is the number of secants
/// (lines with at least two points of S) through `p`.
#[derive(Clone, Debug)]
pub struct CoverageState {
    members: Vec<PointIndex>,
    in_set: Vec<bool>,
    line_count: Vec<u8>,
    cover: Vec<u16>,
    uncovered: usize,
}

impl CoverageState {
    pub fn new(m: &PlaneModel) -> Self {
        let n = m.num_points();
        CoverageState {
            members: Vec::new(),
            in_set: vec![false; n],
            line_count: vec![0; n],
            cover: vec![0; n],
            uncovered: n,
        }
    }

    pub fn from_set(m: &PlaneModel, s: &PointSet) -> Self {
        let mut st = Self::new(m);
        for p in s.iter() {
            st.add(m, p);
        }
        st
    }

    pub fn add(&mut self, m: &PlaneModel, x: PointIndex) {
        debug_assert!(!self.in_set[x as usize]);
        self.in_set[x as usize] = true;
        self.members.push(x);
        for &l in m.lines_through(x) {
            let c = &mut self.line_count[l as usize];
            *c += 1;
            if *c == 2 {
                for &p in m.points_on(l) {
                    let cv = &mut self.cover[p as usize];
                    if *cv == 0 {
                        self.uncovered -= 1;
                    }
                    *cv += 1;
                }
            }
        }
    }

    /// Removes the most recently added point.
    pub fn pop(&mut self, m: &PlaneModel) -> Option<PointIndex> {
        let x = self.members.pop()?;
        self.in_set[x as usize] = false;
        for &l in m.lines_through(x) {
            let c = &mut self.line_count[l as usize];
            if *c == 2 {
                for &p in m.points_on(l) {
                    let cv = &mut self.cover[p as usize];
                    *cv -= 1;
                    if *cv == 0 {
                        self.uncovered += 1;
                    }
                }
            }
            *c -= 1;
        }
        Some(x)
    }

    #[inline]
    pub fn members(&self) -> &[PointIndex] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: PointIndex) -> bool {
        self.in_set[p as usize]
    }

    #[inline]
    pub fn line_count(&self, l: LineIndex) -> u8 {
        self.line_count[l as usize]
    }

    #[inline]
    pub fn cover(&self, p: PointIndex) -> u16 {
        self.cover[p as usize]
    }

    #[inline]
    pub fn is_covered(&self, p: PointIndex) -> bool {
        self.cover[p as usize] > 0
    }

    #[inline]
    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    #[inline]
    pub fn saturated(&self) -> bool {
        self.uncovered == 0
    }

    pub fn to_set(&self) -> PointSet {
        self.members.iter().copied().collect()
    }

    /// For a saturated state: true iff no single point can be dropped.
    ///
    /// `y` is essential when it lies on no line with three or more points of
    /// S (then `y` itself is uncovered without it), or when some point has
    /// exactly one secant through it and that secant is a 2-secant via `y`.
    pub fn all_essential(&self, m: &PlaneModel) -> bool {
        debug_assert!(self.saturated());
        let k = self.members.len();
        let mut essential = vec![false; m.num_points()];
        let mut missing = k;
        for &y in &self.members {
            if m.lines_through(y).iter().all(|&l| self.line_count[l as usize] <= 2) {
                essential[y as usize] = true;
                missing -= 1;
            }
        }
        if missing == 0 {
            return true;
        }
        for p in 0..m.num_points() as u16 {
            if self.in_set[p as usize] || self.cover[p as usize] != 1 {
                continue;
            }
            let l = *m
                .lines_through(p)
                .iter()
                .find(|&&l| self.line_count[l as usize] >= 2)
                .expect("covered point has a secant");
            if self.line_count[l as usize] != 2 {
                continue;
            }
            for &y in m.points_on(l) {
                if self.in_set[y as usize] && !essential[y as usize] {
                    essential[y as usize] = true;
                    missing -= 1;
                    if missing == 0 {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn check_not_full(m: &PlaneModel, s: &PointSet) -> Result<()> {
    if s.len() == m.num_points() {
        return domain("the whole plane is 0-saturating, not 1-saturating");
    }
    Ok(())
}

/// True iff every point of the plane lies on a line joining two points of `s`.
pub fn is_one_saturating(m: &PlaneModel, s: &PointSet) -> Result<bool> {
    check_not_full(m, s)?;
    if s.len() < 2 {
        return Ok(false);
    }
    Ok(CoverageState::from_set(m, s).saturated())
}

/// True iff `s` is 1-saturating and no `s \ {x}` is.
pub fn is_one_minimal(m: &PlaneModel, s: &PointSet) -> Result<bool> {
    if !is_one_saturating(m, s)? {
        return domain("is_one_minimal needs a 1-saturating set");
    }
    Ok(CoverageState::from_set(m, s).all_essential(m))
}

/// True iff no line meets `s` in three or more points.
pub fn is_arc(m: &PlaneModel, s: &PointSet) -> bool {
    let pts = s.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate().skip(i + 1) {
            let l = m.join(a, b);
            if pts[j + 1..].iter().any(|&c| m.on_line(c, l)) {
                return false;
            }
        }
    }
    true
}

/// True iff `s` is an arc that no further point extends.
pub fn is_complete_arc(m: &PlaneModel, s: &PointSet) -> Result<bool> {
    if !is_arc(m, s) {
        return domain("is_complete_arc needs an arc");
    }
    if s.len() < 2 {
        return Ok(s.len() == m.num_points());
    }
    let st = CoverageState::from_set(m, s);
    Ok((0..m.num_points() as u16).all(|p| st.is_covered(p)))
}
