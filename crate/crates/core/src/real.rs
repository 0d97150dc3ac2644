//! Ultimately periodic bit sequences, written `prefix(tail)*`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse real `{0}` (expected e.g. `101(0)*`)")]
pub struct RealParseError(pub String);

/// An ultimately periodic element of Cantor space.
///
/// Always canonical: the tail is a primitive word and the prefix is as short
/// as possible, so structural equality is equality of sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Real {
    prefix: Vec<bool>,
    tail: Vec<bool>,
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl Real {
    pub fn zero() -> Self {
        Real {
            prefix: Vec::new(),
            tail: vec![false],
        }
    }

    pub fn ones() -> Self {
        Real {
            prefix: Vec::new(),
            tail: vec![true],
        }
    }

    /// `prefix` followed by `tail` repeated forever. Panics on an empty tail.
    pub fn new(prefix: Vec<bool>, tail: Vec<bool>) -> Self {
        assert!(!tail.is_empty(), "tail pattern must be nonempty");
        let mut r = Real { prefix, tail };
        r.canonicalize();
        r
    }

    /// Finitely many bits followed by zeros.
    pub fn from_bits(bits: &[bool]) -> Self {
        Real::new(bits.to_vec(), vec![false])
    }

    /// The characteristic sequence of a finite set of naturals.
    pub fn characteristic(members: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = Vec::new();
        for m in members {
            if bits.len() <= m {
                bits.resize(m + 1, false);
            }
            bits[m] = true;
        }
        Real::from_bits(&bits)
    }

    fn canonicalize(&mut self) {
        let n = self.tail.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.tail[i] == self.tail[i - p])) {
            self.tail.truncate(p);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.tail.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.tail.rotate_right(1);
        }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn tail(&self) -> &[bool] {
        &self.tail
    }

    pub fn period(&self) -> usize {
        self.tail.len()
    }

    pub fn bit(&self, n: usize) -> bool {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.tail[(n - self.prefix.len()) % self.tail.len()]
        }
    }

    pub fn bits(&self, len: usize) -> Vec<bool> {
        (0..len).map(|n| self.bit(n)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.tail == [false]
    }

    /// Positions of ones, when there are finitely many.
    pub fn finite_support(&self) -> Option<Vec<usize>> {
        (self.tail == [false]).then(|| {
            self.prefix
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect()
        })
    }

    /// The first `n` bits followed by zeros.
    pub fn truncate(&self, n: usize) -> Real {
        Real::from_bits(&self.bits(n))
    }

    /// Pointwise combination; the result is again ultimately periodic.
    pub fn zip_with(&self, other: &Real, f: impl Fn(bool, bool) -> bool) -> Real {
        let pre = self.prefix.len().max(other.prefix.len());
        let per = lcm(self.period(), other.period());
        let prefix = (0..pre).map(|i| f(self.bit(i), other.bit(i))).collect();
        let tail = (pre..pre + per)
            .map(|i| f(self.bit(i), other.bit(i)))
            .collect();
        Real::new(prefix, tail)
    }

    pub fn or(&self, other: &Real) -> Real {
        self.zip_with(other, |a, b| a | b)
    }

    /// Interleaving: bit `2n` is `a[n]`, bit `2n+1` is `b[n]`.
    pub fn join(a: &Real, b: &Real) -> Real {
        let pre = a.prefix.len().max(b.prefix.len());
        let per = lcm(a.period(), b.period());
        let spread = |range: std::ops::Range<usize>| {
            range
                .flat_map(|i| [a.bit(i), b.bit(i)])
                .collect::<Vec<bool>>()
        };
        Real::new(spread(0..pre), spread(pre..pre + per))
    }

    /// 64-bit FNV-1a over the rendered form; stable across runs and platforms.
    pub fn digest(&self) -> u64 {
        fnv1a(self.to_string().as_bytes())
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn render(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})*", render(&self.prefix), render(&self.tail))
    }
}

fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

impl FromStr for Real {
    type Err = RealParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RealParseError(s.to_string());
        let s = s.trim();
        match s.split_once('(') {
            Some((pre, rest)) => {
                let tail = rest.strip_suffix(")*").ok_or_else(err)?;
                let prefix = parse_bits(pre).ok_or_else(err)?;
                let tail = parse_bits(tail).ok_or_else(err)?;
                if tail.is_empty() {
                    return Err(err());
                }
                Ok(Real::new(prefix, tail))
            }
            None if !s.is_empty() => Ok(Real::from_bits(&parse_bits(s).ok_or_else(err)?)),
            None => Err(err()),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
