//! PGL(3,q) and PΓL(3,q) acting on PG(2,q).
//!
//! A collineation applies the field automorphism `x -> x^(p^auto_exp)` to
//! coordinates first and then multiplies by its matrix. Matrices are kept
//! normalized (first nonzero entry in row-major order is 1), so equal group
//! elements have equal representations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{prime_power, FieldElement, FieldTable};
use crate::plane::{PlaneModel, PointIndex, PointSet, Triple};

/// Which collineation group defines equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Pgl,
    #[serde(rename = "pgammal")]
    PGammaL,
}

impl Variant {
    /// PΓL for proper prime powers, PGL for primes (where the two coincide).
    pub fn default_for(q: u32) -> Variant {
        match prime_power(q) {
            Some((_, h)) if h > 1 => Variant::PGammaL,
            _ => Variant::Pgl,
        }
    }

    /// Number of field automorphisms taken into account.
    pub fn automorphisms(self, h: u32) -> u32 {
        match self {
            Variant::Pgl => 1,
            Variant::PGammaL => h,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Pgl => "pgl",
            Variant::PGammaL => "pgammal",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pgl" => Ok(Variant::Pgl),
            "pgammal" | "pgaml" | "pγl" => Ok(Variant::PGammaL),
            _ => Err(Error::Config(format!("unknown variant {s:?} (expected pgl or pgammal)"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// |PGL(3,q)| = q^3 (q^3-1)(q^2-1), times h for PΓL(3,q).
pub fn group_order(q: u32, variant: Variant) -> Result<u64> {
    let (_, h) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let q = q as u64;
    let pgl = q.pow(3) * (q.pow(3) - 1) * (q * q - 1);
    Ok(pgl * variant.automorphisms(h) as u64)
}

/// Order of the setwise stabilizer of a frame in PGL(3,q): every permutation
/// of the four points is realized by exactly one projectivity.
pub fn frame_stabilizer_order() -> u64 {
    24
}

/// An element of PΓL(3,q).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Collineation {
    pub matrix: [FieldElement; 9],
    pub auto_exp: u32,
}

impl fmt::Debug for Collineation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^{}", self.matrix, self.auto_exp)
    }
}

impl Collineation {
    pub fn identity() -> Self {
        Collineation { matrix: [1, 0, 0, 0, 1, 0, 0, 0, 1], auto_exp: 0 }
    }

    /// Builds a normalized collineation, rejecting singular matrices.
    pub fn new(f: &FieldTable, matrix: [FieldElement; 9], auto_exp: u32) -> Result<Self> {
        if matrix.iter().any(|&x| x as usize >= f.q()) {
            return domain("matrix entry outside the field");
        }
        if det(f, &matrix) == 0 {
            return domain("singular matrix");
        }
        if auto_exp >= f.h() {
            return domain(format!("automorphism exponent {auto_exp} out of range 0..{}", f.h()));
        }
        Ok(Collineation { matrix: normalize_matrix(f, matrix), auto_exp })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    #[inline]
    pub fn apply_vector(&self, f: &FieldTable, v: Triple) -> Triple {
        let v = if self.auto_exp == 0 { v } else { v.map(|x| f.frobenius_power(x, self.auto_exp)) };
        mat_vec(f, &self.matrix, v)
    }

    #[inline]
    pub fn apply_point(&self, m: &PlaneModel, p: PointIndex) -> PointIndex {
        let p = if self.auto_exp == 0 { p } else { m.frobenius_point(p, self.auto_exp) };
        map_point(m, &self.matrix, p)
    }

    /// Image of a point set.
    pub fn apply(&self, m: &PlaneModel, s: &PointSet) -> PointSet {
        s.iter().map(|p| self.apply_point(m, p)).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, f: &FieldTable, other: &Collineation) -> Collineation {
        let h = f.h();
        let twisted = other.matrix.map(|x| f.frobenius_power(x, self.auto_exp));
        Collineation {
            matrix: normalize_matrix(f, mat_mul(f, &self.matrix, &twisted)),
            auto_exp: (self.auto_exp + other.auto_exp) % h,
        }
    }

    pub fn inverse(&self, f: &FieldTable) -> Collineation {
        let h = f.h();
        let e = (h - self.auto_exp) % h;
        let inv = mat_inverse(f, &self.matrix).expect("collineations are invertible");
        Collineation { matrix: normalize_matrix(f, inv.map(|x| f.frobenius_power(x, e))), auto_exp: e }
    }

    /// Nine matrix entries followed by the automorphism exponent.
    pub fn to_values(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.matrix.iter().map(|&x| x as u32).collect();
        v.push(self.auto_exp);
        v
    }
}

pub(crate) fn det(f: &FieldTable, m: &[FieldElement; 9]) -> FieldElement {
    let c0 = f.sub(f.mul(m[4], m[8]), f.mul(m[5], m[7]));
    let c1 = f.sub(f.mul(m[3], m[8]), f.mul(m[5], m[6]));
    let c2 = f.sub(f.mul(m[3], m[7]), f.mul(m[4], m[6]));
    f.add(f.sub(f.mul(m[0], c0), f.mul(m[1], c1)), f.mul(m[2], c2))
}

pub(crate) fn normalize_matrix(f: &FieldTable, m: [FieldElement; 9]) -> [FieldElement; 9] {
    let lead = m.iter().find(|&&x| x != 0).copied().expect("nonzero matrix");
    if lead == 1 {
        return m;
    }
    let s = f.inv(lead);
    m.map(|x| f.mul(x, s))
}

#[inline(always)]
fn mat_vec(f: &FieldTable, m: &[FieldElement; 9], v: Triple) -> Triple {
    [
        f.add(f.add(f.mul(m[0], v[0]), f.mul(m[1], v[1])), f.mul(m[2], v[2])),
        f.add(f.add(f.mul(m[3], v[0]), f.mul(m[4], v[1])), f.mul(m[5], v[2])),
        f.add(f.add(f.mul(m[6], v[0]), f.mul(m[7], v[1])), f.mul(m[8], v[2])),
    ]
}

/// Image index of point `p` under the matrix `m` (no automorphism).
#[inline(always)]
pub(crate) fn map_point(m: &PlaneModel, mat: &[FieldElement; 9], p: PointIndex) -> PointIndex {
    m.index_of_vector(mat_vec(m.field(), mat, m.point(p)))
}

fn mat_mul(f: &FieldTable, a: &[FieldElement; 9], b: &[FieldElement; 9]) -> [FieldElement; 9] {
    let mut out = [0; 9];
    for r in 0..3 {
        for c in 0..3 {
            let mut acc = 0;
            for k in 0..3 {
                acc = f.add(acc, f.mul(a[r * 3 + k], b[k * 3 + c]));
            }
            out[r * 3 + c] = acc;
        }
    }
    out
}

fn cross(f: &FieldTable, u: Triple, v: Triple) -> Triple {
    [
        f.sub(f.mul(u[1], v[2]), f.mul(u[2], v[1])),
        f.sub(f.mul(u[2], v[0]), f.mul(u[0], v[2])),
        f.sub(f.mul(u[0], v[1]), f.mul(u[1], v[0])),
    ]
}

fn dot(f: &FieldTable, u: Triple, v: Triple) -> FieldElement {
    f.add(f.add(f.mul(u[0], v[0]), f.mul(u[1], v[1])), f.mul(u[2], v[2]))
}

fn mat_inverse(f: &FieldTable, m: &[FieldElement; 9]) -> Option<[FieldElement; 9]> {
    let d = det(f, m);
    if d == 0 {
        return None;
    }
    // rows of the inverse are cross products of the columns
    let col = |c: usize| [m[c], m[3 + c], m[6 + c]];
    let rows = [cross(f, col(1), col(2)), cross(f, col(2), col(0)), cross(f, col(0), col(1))];
    let s = f.inv(d);
    let mut out = [0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[r * 3 + c] = f.mul(rows[r][c], s);
        }
    }
    Some(out)
}

/// Matrix sending the ordered frame `(a,b,c,d)` to the standard frame
/// `(e1,e2,e3,(1,1,1))`, up to a scalar.
///
/// Row i is the dual triple of the side opposite the i-th vertex of the
/// triangle `abc`, scaled to evaluate to 1 at `d`.
#[inline]
pub(crate) fn frame_to_standard(m: &PlaneModel, frame: [PointIndex; 4]) -> [FieldElement; 9] {
    let f = m.field();
    let [a, b, c, d] = frame;
    let dv = m.point(d);
    let mut out = [0; 9];
    for (i, (u, v)) in [(b, c), (c, a), (a, b)].into_iter().enumerate() {
        let l = m.line(m.join(u, v));
        let s = f.inv(dot(f, l, dv));
        out[3 * i] = f.mul(l[0], s);
        out[3 * i + 1] = f.mul(l[1], s);
        out[3 * i + 2] = f.mul(l[2], s);
    }
    out
}

/// The unique projectivity sending `src[i]` to `dst[i]` for i = 0..4.
pub fn projectivity_from_frames(
    m: &PlaneModel,
    src: [PointIndex; 4],
    dst: [PointIndex; 4],
) -> Result<Collineation> {
    let n = m.num_points() as u16;
    if src.iter().chain(&dst).any(|&p| p >= n) {
        return domain("frame point out of range");
    }
    if !m.is_frame_tuple(src) || !m.is_frame_tuple(dst) {
        return domain("projectivity_from_frames needs two frames");
    }
    let f = m.field();
    let to_std = frame_to_standard(m, src);
    let dst_to_std = frame_to_standard(m, dst);
    let from_std = mat_inverse(f, &dst_to_std).expect("frame matrices are invertible");
    Ok(Collineation { matrix: normalize_matrix(f, mat_mul(f, &from_std, &to_std)), auto_exp: 0 })
}

/// The collineation `x -> M φ^e(x)` sending the ordered frame `frame` to
/// the standard frame after applying the automorphism `φ^e`.
pub fn to_standard_frame(m: &PlaneModel, frame: [PointIndex; 4], auto_exp: u32) -> Collineation {
    let twisted = frame.map(|p| if auto_exp == 0 { p } else { m.frobenius_point(p, auto_exp) });
    Collineation { matrix: normalize_matrix(m.field(), frame_to_standard(m, twisted)), auto_exp }
}

/// Every element of PGL(3,q) or PΓL(3,q), by exhaustive matrix enumeration.
/// Only meant for q <= 5.
pub fn all_elements(m: &PlaneModel, variant: Variant) -> Result<Vec<Collineation>> {
    let f = m.field();
    let q = f.q();
    if q > 5 {
        return domain(format!("exhaustive group enumeration is limited to q <= 5, got {q}"));
    }
    let autos = variant.automorphisms(f.h());
    let mut mats = Vec::new();
    let total = q.pow(9);
    let mut entries = [0u8; 9];
    for code in 0..total {
        let mut c = code;
        for e in entries.iter_mut() {
            *e = (c % q) as u8;
            c /= q;
        }
        if entries.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        if det(f, &entries) != 0 {
            mats.push(entries);
        }
    }
    let mut out = Vec::with_capacity(mats.len() * autos as usize);
    for e in 0..autos {
        out.extend(mats.iter().map(|&matrix| Collineation { matrix, auto_exp: e }));
    }
    Ok(out)
}

/// Point permutation induced by a collineation.
pub fn permutation(m: &PlaneModel, g: &Collineation) -> Vec<PointIndex> {
    (0..m.num_points() as u16).map(|p| g.apply_point(m, p)).collect()
}
