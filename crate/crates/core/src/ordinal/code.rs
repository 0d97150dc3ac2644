//! Canonical codes of well-orders as bit sequences over ω.
//!
//! Naturals are numbered against ordinals below ω^ω by grade (the sum of
//! `(exponent + 1) * coefficient`), ties broken by ordinal order. The code of
//! `alpha` sets bit `pair_index(i, j)` iff both `i` and `j` number ordinals
//! below `alpha` and `ord(i) <= ord(j)`. Because the numbering is global, the
//! restriction of a canonical code is again canonical, bit for bit.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{Ordinal, OrdinalError};
use crate::real::Real;

/// Cantor pairing.
pub fn pair_index(i: u64, j: u64) -> u64 {
    let s = i + j;
    s * (s + 1) / 2 + j
}

/// Inverse of [`pair_index`].
pub fn unpair(k: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 <= k
    let mut s = (((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while (s + 1) * (s + 2) / 2 <= k {
        s += 1;
    }
    while s * (s + 1) / 2 > k {
        s -= 1;
    }
    let j = k - s * (s + 1) / 2;
    (s - j, j)
}

/// Interleave two reals (`a` on even positions).
pub fn join(a: &Real, b: &Real) -> Real {
    Real::join(a, b)
}

const MAX_GRADE: usize = 256;

/// `parts[r][k]`: partitions of `r` into parts of size at most `k`.
fn partition_table() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![vec![0u64; MAX_GRADE + 1]; MAX_GRADE + 1];
        for k in 0..=MAX_GRADE {
            t[0][k] = 1;
        }
        for r in 1..=MAX_GRADE {
            for k in 1..=MAX_GRADE {
                let without = t[r][k - 1];
                let with = if r >= k { t[r - k][k] } else { 0 };
                t[r][k] = without.saturating_add(with);
            }
        }
        t
    })
}

fn partitions_bounded(r: u64, k: u64) -> u64 {
    let r = r as usize;
    assert!(r <= MAX_GRADE, "ordinal grade {r} beyond numbering table");
    partition_table()[r][(k as usize).min(MAX_GRADE)]
}

/// Number of naturals assigned to ordinals of grade below `g`.
fn grade_offset(g: u64) -> u64 {
    (0..g).map(|h| partitions_bounded(h, h)).sum()
}

/// The natural number assigned to `alpha`.
pub fn index_of(alpha: &Ordinal) -> u64 {
    let g = alpha.grade();
    let mut index = grade_offset(g);
    let mut remaining = g;
    let top = g.saturating_sub(1);
    for e in (0..=top).rev() {
        let part = e + 1;
        let a = alpha.coefficient(e as u32);
        for c in 0..a {
            if let Some(r) = remaining.checked_sub(part * c) {
                index += partitions_bounded(r, e);
            }
        }
        remaining -= part * a;
    }
    index
}

/// The ordinal numbered by `m`.
pub fn ordinal_of_index(m: u64) -> Ordinal {
    let mut g = 0;
    let mut pos = m;
    loop {
        let count = partitions_bounded(g, g);
        if pos < count {
            break;
        }
        pos -= count;
        g += 1;
    }
    let mut remaining = g;
    let mut terms = Vec::new();
    for e in (0..g.max(1)).rev() {
        let part = e + 1;
        let mut c = 0;
        loop {
            let r = remaining - part * c;
            let ways = partitions_bounded(r, e);
            if pos < ways {
                break;
            }
            pos -= ways;
            c += 1;
        }
        if c > 0 {
            terms.push((e as u32, c));
        }
        remaining -= part * c;
    }
    Ordinal::from_terms(terms)
}

/// Whether the identity on naturals embeds the order coded by `a` into the
/// one coded by `b`, judged on the bits both prefixes materialize.
pub fn prefix_embeds(a: &OrderCode, b: &OrderCode) -> bool {
    a.bits.iter().zip(&b.bits).all(|(&x, &y)| !x || y)
}

/// Materialized prefix of the canonical code of an ordinal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCode {
    pub ordinal: Ordinal,
    #[serde(with = "bitstring")]
    bits: Vec<bool>,
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(serde::de::Error::custom("bit string")),
            })
            .collect()
    }
}

impl OrderCode {
    pub fn materialized_prefix_len(&self) -> usize {
        self.bits.len()
    }

    pub fn prefix(&self) -> &[bool] {
        &self.bits
    }

    /// Any bit of the canonical code, materialized or not.
    pub fn bit(&self, k: u64) -> bool {
        if let Some(&b) = self.bits.get(k as usize) {
            return b;
        }
        code_bit(&self.ordinal, k, &mut |m| ordinal_of_index(m))
    }

    /// Naturals in the field whose rank is below `beta`, up to `bound` (exclusive).
    pub fn elements_below(&self, beta: &Ordinal, bound: u64) -> Vec<(u64, Ordinal)> {
        (0..bound)
            .map(|m| (m, ordinal_of_index(m)))
            .filter(|(_, o)| o < beta && o < &self.ordinal)
            .collect()
    }
}

fn code_bit(alpha: &Ordinal, k: u64, ord: &mut impl FnMut(u64) -> Ordinal) -> bool {
    let (i, j) = unpair(k);
    let (oi, oj) = (ord(i), ord(j));
    oi < *alpha && oj < *alpha && oi <= oj
}

/// Largest natural that occurs in some pair index below `prefix_bits`.
fn max_element(prefix_bits: usize) -> u64 {
    if prefix_bits == 0 {
        return 0;
    }
    let (mut hi, mut k) = (0, 0);
    // pair(i, 0) and pair(0, j) are the smallest indices mentioning i or j
    while pair_index(k, 0) < prefix_bits as u64 || pair_index(0, k) < prefix_bits as u64 {
        hi = k;
        k += 1;
    }
    hi
}

pub fn encode_order(alpha: &Ordinal, prefix_bits: usize) -> OrderCode {
    let table: Vec<Ordinal> = (0..=max_element(prefix_bits)).map(ordinal_of_index).collect();
    let bits = (0..prefix_bits as u64)
        .map(|k| code_bit(alpha, k, &mut |m| table[m as usize].clone()))
        .collect();
    OrderCode {
        ordinal: alpha.clone(),
        bits,
    }
}

/// Keep the part of `y`'s relation whose elements have rank below `beta`.
pub fn restrict_code(y: &OrderCode, beta: &Ordinal) -> Result<OrderCode, OrdinalError> {
    if beta > &y.ordinal {
        return Err(OrdinalError::RankOutOfRange {
            beta: beta.clone(),
            alpha: y.ordinal.clone(),
        });
    }
    let decoded = decode_prefix(&y.bits);
    let ranks = decoded.ranks();
    let bits = y
        .bits
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let (i, j) = unpair(k as u64);
            let keep = |m: u64| ranks.get(&m).is_some_and(|r| r < beta);
            b && keep(i) && keep(j)
        })
        .collect();
    Ok(OrderCode {
        ordinal: beta.clone(),
        bits,
    })
}

/// The relation visible in a finite prefix of a code.
#[derive(Debug, Clone)]
pub struct DecodedOrder {
    bits: Vec<bool>,
    pub field: Vec<u64>,
}

pub fn decode_prefix(bits: &[bool]) -> DecodedOrder {
    // the relation is reflexive, so any visible 1 puts both ends in the field
    let mut field = BTreeSet::new();
    for (k, &b) in bits.iter().enumerate() {
        if b {
            let (i, j) = unpair(k as u64);
            field.insert(i);
            field.insert(j);
        }
    }
    let field = field.into_iter().collect();
    DecodedOrder {
        bits: bits.to_vec(),
        field,
    }
}

impl DecodedOrder {
    /// `Some(i ⊴ j)` when the bit is materialized.
    pub fn le(&self, i: u64, j: u64) -> Option<bool> {
        self.bits.get(pair_index(i, j) as usize).copied()
    }

    /// Checks reflexivity, antisymmetry, totality and transitivity on every
    /// triple whose bits are all visible.
    pub fn is_linear_on_visible(&self) -> bool {
        let f = &self.field;
        for &a in f {
            if self.le(a, a) == Some(false) {
                return false;
            }
            for &b in f {
                if a != b {
                    if let (Some(x), Some(y)) = (self.le(a, b), self.le(b, a)) {
                        if x == y {
                            return false;
                        }
                    }
                }
                for &c in f {
                    if let (Some(true), Some(true), Some(ac)) =
                        (self.le(a, b), self.le(b, c), self.le(a, c))
                    {
                        if !ac {
                            return false;
                        }
                    }
                }
            }
        }
        // nothing outside the field may relate to anything
        self.bits.iter().enumerate().all(|(k, &b)| {
            let (i, j) = unpair(k as u64);
            !b || (f.contains(&i) && f.contains(&j))
        })
    }

    /// Rank of each visible element within the canonical numbering.
    pub fn ranks(&self) -> std::collections::BTreeMap<u64, Ordinal> {
        self.field.iter().map(|&m| (m, ordinal_of_index(m))).collect()
    }

    /// Visible elements listed in increasing order of the decoded relation,
    /// when the relation among them is fully materialized.
    pub fn sorted_field(&self) -> Option<Vec<u64>> {
        let mut out: Vec<u64> = Vec::new();
        for &m in &self.field {
            let mut pos = out.len();
            for (idx, &o) in out.iter().enumerate() {
                if self.le(m, o)? {
                    pos = idx;
                    break;
                }
            }
            out.insert(pos, m);
        }
        Some(out)
    }

    pub fn field_set(&self) -> BTreeSet<u64> {
        self.field.iter().copied().collect()
    }
}
