//! Structure labels for small stabilizer groups.
//!
//! Labels are ASCII: `Z_4`, `Z_2xZ_2`, `S_3`, `D_4` (dihedral of order 8),
//! `Q_4` (quaternion, order 8), `Q_6` (dicyclic, order 12), `Z_7:Z_3`, and
//! `G_n` for everything else. Abelian groups always get their invariant
//! factors; nonabelian groups of order 16 or more are reported as `G_n`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::collineation::Collineation;
use crate::error::{domain, Result};
use crate::field::FieldTable;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFingerprint {
    pub order: u64,
    pub is_abelian: bool,
    /// element order -> number of elements of that order
    pub element_orders: BTreeMap<u64, u64>,
    /// invariant factors `n1 | n2 | ...` when abelian, empty otherwise
    pub abelian_invariants: Vec<u64>,
    pub center_order: u64,
}

/// Fingerprint of the group formed by `elements` under composition.
pub fn fingerprint(f: &FieldTable, elements: &[Collineation]) -> Result<GroupFingerprint> {
    let n = elements.len();
    if n == 0 {
        return domain("empty element list");
    }
    let index: HashMap<Collineation, usize> = elements.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    if index.len() != n {
        return domain("duplicate group elements");
    }
    let Some(&id) = index.get(&Collineation::identity()) else {
        return domain("element list does not contain the identity");
    };
    let mut table = vec![0u32; n * n];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            match index.get(&a.compose(f, b)) {
                Some(&k) => table[i * n + j] = k as u32,
                None => return domain("element list is not closed under composition"),
            }
        }
    }
    let mul = |a: usize, b: usize| table[a * n + b] as usize;

    let mut center = 0u64;
    for a in 0..n {
        if (0..n).all(|b| mul(a, b) == mul(b, a)) {
            center += 1;
        }
    }
    let is_abelian = center == n as u64;

    let mut orders = vec![0u64; n];
    let mut element_orders = BTreeMap::new();
    for a in 0..n {
        let (mut x, mut k) = (a, 1u64);
        while x != id {
            x = mul(x, a);
            k += 1;
        }
        orders[a] = k;
        *element_orders.entry(k).or_insert(0) += 1;
    }

    let abelian_invariants = if is_abelian { invariant_factors(n as u64, &orders) } else { Vec::new() };
    Ok(GroupFingerprint { order: n as u64, is_abelian, element_orders, abelian_invariants, center_order: center })
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors of an abelian group from its element orders.
///
/// For each prime p, the number of elements killed by p^i is p^(Σ min(i, e_j))
/// over the cyclic p-factors Z_{p^e_j}; successive differences of the
/// exponents give the conjugate partition of (e_j).
fn invariant_factors(order: u64, orders: &[u64]) -> Vec<u64> {
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for (p, e) in prime_factors(order) {
        let mut logs = vec![0u32];
        for i in 1..=e {
            let pi = p.pow(i);
            let killed = orders.iter().filter(|&&o| pi % o == 0).count() as u64;
            logs.push(killed.ilog(p));
        }
        // parts[i-1] = number of cyclic factors of exponent >= i
        let at_least: Vec<u32> = (1..=e as usize).map(|i| logs[i] - logs[i - 1]).collect();
        let factors = at_least.first().copied().unwrap_or(0) as usize;
        let mut powers: Vec<u64> = (0..factors)
            .map(|j| {
                let ej = at_least.iter().filter(|&&c| c as usize > j).count() as u32;
                p.pow(ej)
            })
            .collect();
        powers.sort_unstable();
        per_prime.push(powers);
    }
    let width = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    if width == 0 {
        return vec![1];
    }
    // align each prime's powers to the right, multiply columnwise
    let mut out = vec![1u64; width];
    for powers in &per_prime {
        let off = width - powers.len();
        for (j, &pw) in powers.iter().enumerate() {
            out[off + j] *= pw;
        }
    }
    out
}

/// Symbolic name of a group.
pub fn label(fp: &GroupFingerprint) -> String {
    let n = fp.order;
    if fp.is_abelian {
        return fp.abelian_invariants.iter().map(|k| format!("Z_{k}")).collect::<Vec<_>>().join("x");
    }
    let count = |k: u64| fp.element_orders.get(&k).copied().unwrap_or(0);
    if n >= 16 {
        return if n == 21 { "Z_7:Z_3".into() } else { format!("G_{n}") };
    }
    match n {
        6 => "S_3".into(),
        8 if count(2) == 1 => "Q_4".into(),
        12 if count(2) == 1 => "Q_6".into(),
        // a cyclic subgroup of index 2 whose complement is all involutions
        _ if n.is_multiple_of(2) && count(n / 2) > 0 && count(2) >= n / 2 && is_dihedral(fp) => format!("D_{}", n / 2),
        _ => format!("G_{n}"),
    }
}

fn is_dihedral(fp: &GroupFingerprint) -> bool {
    let n = fp.order / 2;
    let involutions_inside = if n.is_multiple_of(2) { 1 } else { 0 };
    fp.element_orders.get(&2).copied().unwrap_or(0) == n + involutions_inside
}

/// Label straight from a list of group elements.
pub fn label_of(f: &FieldTable, elements: &[Collineation]) -> Result<String> {
    Ok(label(&fingerprint(f, elements)?))
}

/// Group order implied by a label (`G_n`, `Z_axZ_b`, `D_n`, ...).
pub fn label_order(label: &str) -> Option<u64> {
    if label == "Z_7:Z_3" {
        return Some(21);
    }
    let mut total = 1u64;
    for part in label.split('x') {
        let (kind, num) = part.split_once('_')?;
        let v: u64 = num.parse().ok()?;
        total *= match kind {
            "Z" | "G" => v,
            "D" => 2 * v,
            "Q" => 2 * v,
            "S" if v == 3 => 6,
            _ => return None,
        };
    }
    Some(total)
}
