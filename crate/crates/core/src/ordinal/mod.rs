//! Ordinals below ω^ω in Cantor normal form, plus canonical well-order codes.

mod code;

pub use code::{
    decode_prefix, encode_order, index_of, join, ordinal_of_index, pair_index, prefix_embeds, restrict_code,
    unpair, DecodedOrder, OrderCode,
};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("stage {stage} is not below w^{depth}")]
    BudgetOrdinalOverflow { stage: Ordinal, depth: u32 },
    #[error("limit level must be at least 1")]
    ZeroLevel,
    #[error("rank {beta} exceeds coded ordinal {alpha}")]
    RankOutOfRange { beta: Ordinal, alpha: Ordinal },
    #[error("cannot parse ordinal `{0}`")]
    Parse(String),
}

/// A single Cantor-normal-form term `w^exponent * coefficient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

/// An ordinal below ω^ω, stored as terms with strictly decreasing exponents
/// and positive coefficients. The empty sum is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub const fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exponent: 0,
                    coefficient: n,
                }],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    /// `w^exponent`.
    pub fn omega_pow(exponent: u32) -> Self {
        Self::monomial(exponent, 1)
    }

    /// `w^exponent * coefficient`.
    pub fn monomial(exponent: u32, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds an ordinal from arbitrary terms by summing them left to right.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u64)>) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add(&Self::monomial(e, c)))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero with no finite part.
    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent > 0)
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent == 0)
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent == 0 => Some(t.coefficient),
            _ => None,
        }
    }

    /// Exponent of the leading term; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.exponent)
    }

    /// Coefficient of `w^exponent` (zero when absent).
    pub fn coefficient(&self, exponent: u32) -> u64 {
        self.terms
            .iter()
            .find(|t| t.exponent == exponent)
            .map_or(0, |t| t.coefficient)
    }

    /// Sum of `(exponent + 1) * coefficient`; the grade used by the canonical numbering.
    pub fn grade(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| (u64::from(t.exponent) + 1) * t.coefficient)
            .sum()
    }

    pub fn cnf_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .copied()
            .take_while(|t| t.exponent >= lead.exponent)
            .collect();
        let mut rest = other.terms.iter().copied();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient += lead.coefficient;
                rest.next();
            }
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    pub fn successor(&self) -> Self {
        self.add(&Self::finite(1))
    }

    pub fn add_finite(&self, n: u64) -> Self {
        self.add(&Self::finite(n))
    }

    /// Least multiple of `w^level` strictly above `self`.
    pub fn limit_step(&self, level: u32) -> Result<Self, OrdinalError> {
        if level == 0 {
            return Err(OrdinalError::ZeroLevel);
        }
        let head = Ordinal {
            terms: self
                .terms
                .iter()
                .copied()
                .filter(|t| t.exponent >= level)
                .collect(),
        };
        Ok(head.add(&Self::omega_pow(level)))
    }

    /// Fails with `BudgetOrdinalOverflow` unless `self < w^depth`.
    pub fn check_below(self, depth: u32) -> Result<Self, OrdinalError> {
        match self.degree() {
            Some(d) if d >= depth => Err(OrdinalError::BudgetOrdinalOverflow {
                stage: self,
                depth,
            }),
            _ => Ok(self),
        }
    }

    /// The unique `t` with `self + t == target`, when `self <= target`.
    pub fn sub_left(&self, target: &Self) -> Option<Self> {
        if self.cnf_cmp(target) == Ordering::Greater {
            return None;
        }
        let common = self
            .terms
            .iter()
            .zip(&target.terms)
            .take_while(|(a, b)| a == b)
            .count();
        let (Some(a), Some(b)) = (self.terms.get(common), target.terms.get(common)) else {
            return Some(Ordinal {
                terms: target.terms[common..].to_vec(),
            });
        };
        let mut terms = Vec::new();
        if a.exponent == b.exponent {
            terms.push(Term {
                exponent: b.exponent,
                coefficient: b.coefficient - a.coefficient,
            });
        } else {
            terms.push(*b);
        }
        terms.extend_from_slice(&target.terms[common + 1..]);
        Some(Ordinal { terms })
    }

    /// All ordinals below `w^max_exponent_plus_one` with every coefficient at most `max_coef`,
    /// in increasing order.
    pub fn all_bounded(exponents: u32, max_coef: u64) -> Vec<Ordinal> {
        let mut out = vec![Ordinal::zero()];
        for e in 0..exponents {
            let mut next = Vec::new();
            for c in 0..=max_coef {
                for low in &out {
                    next.push(Ordinal::monomial(e, c).add(low));
                }
            }
            out = next;
        }
        // each pass prepends a higher term, so sort into ordinal order
        out.sort();
        out
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cnf_cmp(other)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (t.exponent, t.coefficient) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OrdinalError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut acc = Ordinal::zero();
        for term in compact.split('+') {
            let (base, coef) = match term.split_once('*') {
                Some((b, c)) => (b, c.parse::<u64>().map_err(|_| err())?),
                None => (term, 1),
            };
            let exponent = if let Some(rest) = base.strip_prefix('w') {
                match rest.strip_prefix('^') {
                    Some(e) => e.parse::<u32>().map_err(|_| err())?,
                    None if rest.is_empty() => 1,
                    None => return Err(err()),
                }
            } else {
                // bare natural; a coefficient on it is not allowed
                if term.contains('*') {
                    return Err(err());
                }
                let n = base.parse::<u64>().map_err(|_| err())?;
                acc = acc.add(&Ordinal::finite(n));
                continue;
            };
            acc = acc.add(&Ordinal::monomial(exponent, coef));
        }
        Ok(acc)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(o("w+1").cnf_cmp(&o("w")), Ordering::Greater);
        assert_eq!(o("0").cnf_cmp(&o("0")), Ordering::Equal);
        assert_eq!(o("w*2").cnf_cmp(&o("w+5")), Ordering::Greater);
    }

    #[test]
    fn addition_examples() {
        assert_eq!(o("w").add(&o("1")), o("w+1"));
        assert_eq!(o("1").add(&o("w")), o("w"));
        assert_eq!(o("w+2").add(&o("w*3")), o("w*4"));
    }

    #[test]
    fn successor_and_limit_step() {
        assert_eq!(o("w").successor(), o("w+1"));
        assert_eq!(o("5").limit_step(1).unwrap(), o("w"));
        assert_eq!(o("w*2+3").limit_step(2).unwrap(), o("w^2"));
        assert_eq!(o("w^2+w").limit_step(1).unwrap(), o("w^2+w*2"));
        assert_eq!(o("3").limit_step(0), Err(OrdinalError::ZeroLevel));
    }

    #[test]
    fn limit_step_is_least_multiple_above() {
        // scan candidates in order; the first w^2-multiple above w*2+3 is w^2
        let a = o("w*2+3");
        let found = Ordinal::all_bounded(3, 3)
            .into_iter()
            .find(|c| c > &a && c.terms().iter().all(|t| t.exponent >= 2))
            .unwrap();
        assert_eq!(found, a.limit_step(2).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let stage = o("w^2").limit_step(2).unwrap();
        assert_eq!(stage, o("w^2*2"));
        assert!(stage.clone().check_below(3).is_ok());
        assert!(matches!(
            stage.check_below(2),
            Err(OrdinalError::BudgetOrdinalOverflow { depth: 2, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "4", "w", "w*2+1", "w^2*3+w+4", "w^5"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("w^2*3+w*1+4").to_string(), "w^2*3+w+4");
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("3*2".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
    }

    #[test]
    fn limit_classification() {
        assert!(o("w").is_limit());
        assert!(o("w^2+w").is_limit());
        assert!(!o("w+1").is_limit());
        assert!(!Ordinal::zero().is_limit());
        assert!(o("w+1").is_successor());
    }

    #[test]
    fn sub_left_examples() {
        assert_eq!(o("w").sub_left(&o("w+3")), Some(o("3")));
        assert_eq!(o("3").sub_left(&o("w+3")), Some(o("w+3")));
        assert_eq!(o("w+1").sub_left(&o("w*2")), Some(o("w")));
        assert_eq!(o("w*2").sub_left(&o("w")), None);
    }

    #[test]
    fn add_laws_exhaustive_small() {
        let all = Ordinal::all_bounded(3, 2);
        for a in &all {
            assert_eq!(a.add(&Ordinal::zero()), *a);
            assert_eq!(Ordinal::zero().add(a), *a);
            for b in &all {
                let ab = a.add(b);
                assert!(ab >= *b);
                assert_eq!(a.sub_left(&ab).as_ref(), Some(b));
                for c in &all {
                    assert_eq!(ab.add(c), a.add(&b.add(c)));
                }
            }
        }
    }

    fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
        proptest::collection::vec((0u32..4, 0u64..5), 0..5).prop_map(Ordinal::from_terms)
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(a in arb_ordinal()) {
            prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
        }

        #[test]
        fn cmp_is_antisymmetric(a in arb_ordinal(), b in arb_ordinal()) {
            prop_assert_eq!(a.cnf_cmp(&b), b.cnf_cmp(&a).reverse());
        }

        #[test]
        fn terms_stay_normal(a in arb_ordinal(), b in arb_ordinal()) {
            let s = a.add(&b);
            prop_assert!(s.terms().windows(2).all(|w| w[0].exponent > w[1].exponent));
            prop_assert!(s.terms().iter().all(|t| t.coefficient >= 1));
        }
    }
}
