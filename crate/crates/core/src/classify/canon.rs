//! Canonical forms and stabilizers of frame-containing point sets.
//!
//! Any collineation mapping a set onto an image that contains the standard
//! frame sends some ordered frame of the set to the standard frame, so
//! scanning the ordered frames inside the set (times field automorphisms)
//! reaches every such image.

use crate::collineation::{frame_to_standard, map_point, Collineation, Variant};
use crate::error::{domain, Result};
use crate::plane::{PlaneModel, PointIndex, PointSet};

/// Result of a full scan over the ordered frames of a set.
#[derive(Clone, Debug)]
pub struct Analysis {
    /// Lexicographically least sorted image under the chosen variant.
    pub canonical: Vec<PointIndex>,
    /// Every collineation of PΓL(3,q) fixing the set.
    pub stabilizer: Vec<Collineation>,
}

impl Analysis {
    pub fn stab_order_pgl(&self) -> u64 {
        self.stabilizer.iter().filter(|g| g.auto_exp == 0).count() as u64
    }

    pub fn stab_order_pgammal(&self) -> u64 {
        self.stabilizer.len() as u64
    }

    /// Stabilizer elements inside the given group.
    pub fn stabilizer_in(&self, variant: Variant) -> Vec<Collineation> {
        match variant {
            Variant::PGammaL => self.stabilizer.clone(),
            Variant::Pgl => self.stabilizer.iter().filter(|g| g.auto_exp == 0).copied().collect(),
        }
    }
}

/// Unordered frames among `pts`, as index quadruples.
pub(crate) fn frames_in(m: &PlaneModel, pts: &[PointIndex]) -> Vec<[PointIndex; 4]> {
    let k = pts.len();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let l = m.join(pts[i], pts[j]);
            for a in j + 1..k {
                if m.on_line(pts[a], l) {
                    continue;
                }
                let l1 = m.join(pts[i], pts[a]);
                let l2 = m.join(pts[j], pts[a]);
                for b in a + 1..k {
                    let p = pts[b];
                    if !(m.on_line(p, l) || m.on_line(p, l1) || m.on_line(p, l2)) {
                        out.push([pts[i], pts[j], pts[a], pts[b]]);
                    }
                }
            }
        }
    }
    out
}

pub(crate) const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

/// Sorted image of `pts` under `x -> mat · φ^e(x)`.
#[inline]
pub(crate) fn image_sorted(
    m: &PlaneModel,
    mat: &[u8; 9],
    e: u32,
    pts: &[PointIndex],
    out: &mut Vec<PointIndex>,
) {
    out.clear();
    for &p in pts {
        let p = if e == 0 { p } else { m.frobenius_point(p, e) };
        out.push(map_point(m, mat, p));
    }
    out.sort_unstable();
}

/// Canonical form and full PΓL stabilizer in one pass.
///
/// The maps attaining the least image over all of PΓL form a coset
/// `g1 · Stab(s)`, so the stabilizer is `{g1⁻¹ · g}` over those maps.
pub fn analyze(m: &PlaneModel, s: &PointSet, variant: Variant) -> Result<Analysis> {
    let pts = s.to_vec();
    let frames = frames_in(m, &pts);
    if frames.is_empty() {
        return domain("set contains no projective frame");
    }
    let f = m.field();
    let h = f.h();
    let canon_autos = variant.automorphisms(h);
    let mut best: Vec<PointIndex> = Vec::new();
    let mut best_variant: Vec<PointIndex> = Vec::new();
    let mut achievers: Vec<([u8; 9], u32)> = Vec::new();
    let mut img = Vec::with_capacity(pts.len());
    for fr in &frames {
        for perm in &PERMS4 {
            let ordered = perm.map(|i| fr[i]);
            for e in 0..h {
                let twisted = ordered.map(|p| if e == 0 { p } else { m.frobenius_point(p, e) });
                let mat = frame_to_standard(m, twisted);
                image_sorted(m, &mat, e, &pts, &mut img);
                if e < canon_autos && (best_variant.is_empty() || img < best_variant) {
                    best_variant.clone_from(&img);
                }
                if achievers.is_empty() || img < best {
                    best.clone_from(&img);
                    achievers.clear();
                    achievers.push((mat, e));
                } else if img == best {
                    achievers.push((mat, e));
                }
            }
        }
    }
    let to_col = |(mat, e): ([u8; 9], u32)| Collineation::new(f, mat, e).expect("frame maps are invertible");
    let g1_inv = to_col(achievers[0]).inverse(f);
    let mut stabilizer: Vec<Collineation> = achievers.into_iter().map(|a| g1_inv.compose(f, &to_col(a))).collect();
    stabilizer.sort();
    Ok(Analysis { canonical: best_variant, stabilizer })
}

/// Lexicographically least sorted image of `s` over all collineations of
/// the variant that carry a frame of `s` onto the standard frame.
pub fn canonical_form(m: &PlaneModel, s: &PointSet, variant: Variant) -> Result<PointSet> {
    Ok(analyze(m, s, variant)?.canonical.into_iter().collect())
}

/// Order and elements of the stabilizer of `s` in the variant's group.
pub fn stabilizer(m: &PlaneModel, s: &PointSet, variant: Variant) -> Result<(u64, Vec<Collineation>)> {
    let els = analyze(m, s, variant)?.stabilizer_in(variant);
    Ok((els.len() as u64, els))
}
