//! Tower groups `∏ S_k^{a_k}` (all degrees `k ≥ 3`), their factor slots and
//! the chains `N(S_k)`.
//!
//! Slots are always ordered lexicographically by `(degree, copy)`; that index
//! is the coordinate used by sign vectors, slot permutations and every
//! serialized form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on factor degrees, keeps `k!` inside a `u64`.
pub const DEFAULT_MAX_DEGREE: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("degree {0} is too small (tower-group factors need k >= 3)")]
    DegreeTooSmall(i64),
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeTooLarge { degree: i64, max: u32 },
    #[error("negative exponent {exponent} for degree {degree}")]
    NegativeExponent { degree: i64, exponent: i64 },
    #[error("chains of degrees {0} and {1} have different lengths")]
    ChainLengthMismatch(u32, u32),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

/// The A/B partition of slots: class A holds the `S_4` copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotClass {
    A,
    B,
}

impl SlotClass {
    pub fn of_degree(degree: u32) -> Self {
        if degree == 4 {
            SlotClass::A
        } else {
            SlotClass::B
        }
    }
}

/// One copy `S_k^{(k,i)}` inside the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorSlot {
    pub degree: u32,
    /// 1-based copy number.
    pub copy: u32,
    pub class: SlotClass,
    pub index: usize,
}

impl fmt::Display for FactorSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.degree, self.copy)
    }
}

/// A normal subgroup of a single `S_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChainPosition {
    Triv,
    /// The Klein four-group; only exists for `k = 4`.
    V,
    Alt,
    Full,
}

impl ChainPosition {
    pub fn is_legal_for(self, degree: u32) -> bool {
        degree >= 3 && (self != ChainPosition::V || degree == 4)
    }

    /// `|P|` as a subgroup of `S_k`.
    pub fn cardinality(self, degree: u32) -> u128 {
        match self {
            ChainPosition::Triv => 1,
            ChainPosition::V => 4,
            ChainPosition::Alt => factorial(degree) / 2,
            ChainPosition::Full => factorial(degree),
        }
    }

    /// Rank within `chain(degree)`.
    pub fn rank_in(self, degree: u32) -> usize {
        match (self, degree == 4) {
            (ChainPosition::Triv, _) => 0,
            (ChainPosition::V, _) => 1,
            (ChainPosition::Alt, false) => 1,
            (ChainPosition::Alt, true) => 2,
            (ChainPosition::Full, false) => 2,
            (ChainPosition::Full, true) => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChainPosition::Triv => "Triv",
            ChainPosition::V => "V",
            ChainPosition::Alt => "Alt",
            ChainPosition::Full => "Full",
        }
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `N(S_k)` in inclusion order.
pub fn chain(degree: u32) -> Result<&'static [ChainPosition], SpecError> {
    use ChainPosition::*;
    match degree {
        0..=2 => Err(SpecError::DegreeTooSmall(degree as i64)),
        4 => Ok(&[Triv, V, Alt, Full]),
        _ => Ok(&[Triv, Alt, Full]),
    }
}

/// The unique order-preserving bijection `N(S_from) -> N(S_to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainIso {
    from: u32,
    to: u32,
}

impl ChainIso {
    pub fn apply(&self, position: ChainPosition) -> ChainPosition {
        let rank = position.rank_in(self.from);
        chain(self.to).expect("validated degree")[rank]
    }

    pub fn source(&self) -> u32 {
        self.from
    }

    pub fn target(&self) -> u32 {
        self.to
    }
}

pub fn chain_iso(from: u32, to: u32) -> Result<ChainIso, SpecError> {
    let a = chain(from)?;
    let b = chain(to)?;
    if a.len() != b.len() {
        return Err(SpecError::ChainLengthMismatch(from, to));
    }
    Ok(ChainIso { from, to })
}

/// `G = ∏ S_k^{a_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerGroupSpec {
    exponents: BTreeMap<u32, u32>,
    slots: Vec<FactorSlot>,
}

impl TowerGroupSpec {
    pub fn new<I>(exponents: I) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        Self::with_max_degree(exponents, DEFAULT_MAX_DEGREE)
    }

    /// Builds a spec; repeated degrees accumulate and zero exponents are dropped.
    pub fn with_max_degree<I>(exponents: I, max_degree: u32) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut map = BTreeMap::new();
        for (degree, exponent) in exponents {
            if degree < 3 {
                return Err(SpecError::DegreeTooSmall(degree));
            }
            if degree > max_degree as i64 {
                return Err(SpecError::DegreeTooLarge {
                    degree,
                    max: max_degree,
                });
            }
            if exponent < 0 {
                return Err(SpecError::NegativeExponent { degree, exponent });
            }
            if exponent > 0 {
                *map.entry(degree as u32).or_insert(0u32) += exponent as u32;
            }
        }
        Ok(Self::from_normalized(map))
    }

    pub fn trivial() -> Self {
        Self::from_normalized(BTreeMap::new())
    }

    fn from_normalized(exponents: BTreeMap<u32, u32>) -> Self {
        let mut slots = Vec::new();
        for (&degree, &count) in &exponents {
            for copy in 1..=count {
                slots.push(FactorSlot {
                    degree,
                    copy,
                    class: SlotClass::of_degree(degree),
                    index: slots.len(),
                });
            }
        }
        TowerGroupSpec { exponents, slots }
    }

    /// Spec with one factor per listed degree, in any order.
    pub fn from_degrees(degrees: &[u32]) -> Result<Self, SpecError> {
        Self::new(degrees.iter().map(|&d| (d as i64, 1)))
    }

    pub fn exponents(&self) -> &BTreeMap<u32, u32> {
        &self.exponents
    }

    pub fn slots(&self) -> &[FactorSlot] {
        &self.slots
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn a4(&self) -> usize {
        self.exponents.get(&4).copied().unwrap_or(0) as usize
    }

    pub fn b(&self) -> usize {
        self.slot_count() - self.a4()
    }

    pub fn is_trivial(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.slots.iter().map(|s| s.degree).collect()
    }

    /// `|G|`, or `None` on `u128` overflow.
    pub fn group_order(&self) -> Option<u128> {
        self.slots
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(factorial(s.degree)))
    }

    /// Parses `"S4^2*S3^2"`. Case-insensitive, whitespace is ignored, and
    /// `"1"` or the empty string denote the trivial group.
    pub fn parse(literal: &str) -> Result<Self, SpecError> {
        Self::parse_with_max_degree(literal, DEFAULT_MAX_DEGREE)
    }

    pub fn parse_with_max_degree(literal: &str, max_degree: u32) -> Result<Self, SpecError> {
        let factors = parse_factors(literal, &['s'])?;
        Self::with_max_degree(
            factors.into_iter().map(|f| (f.degree, f.exponent)),
            max_degree,
        )
    }
}

impl FromStr for TowerGroupSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for TowerGroupSpec {
    /// Largest degree first, e.g. `S4^2*S3^2`; the trivial group prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        let mut first = true;
        for (&degree, &count) in self.exponents.iter().rev() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "S{degree}")?;
            if count > 1 {
                write!(f, "^{count}")?;
            }
        }
        Ok(())
    }
}

/// One `X<degree>^<exponent>` term of a group literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsedFactor {
    /// Lower-cased family letter (`s` or `c`).
    pub family: char,
    pub degree: i64,
    pub exponent: i64,
}

/// Shared tokenizer for tower specs (`S3^2*S4`) and the small concrete
/// groups used by the oracle (`C2*S3`). Positions in errors are byte offsets
/// into the original literal.
pub fn parse_factors(literal: &str, families: &[char]) -> Result<Vec<ParsedFactor>, SpecError> {
    let chars: Vec<(usize, char)> = literal
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (i, c.to_ascii_lowercase()))
        .collect();
    if chars.is_empty() || (chars.len() == 1 && chars[0].1 == '1') {
        return Ok(Vec::new());
    }
    let end = literal.len();
    let err = |position: usize, message: &str| SpecError::Parse {
        position,
        message: message.to_string(),
    };
    let mut out = Vec::new();
    let mut pos = 0;
    loop {
        let (at, family) = match chars.get(pos) {
            Some(&(at, c)) => (at, c),
            None => return Err(err(end, "expected a factor")),
        };
        if !families.contains(&family) {
            let shown = literal[at..].chars().next().unwrap_or(family);
            return Err(err(at, &format!("unexpected '{shown}', expected a factor")));
        }
        pos += 1;
        let degree = read_number(&chars, &mut pos)
            .ok_or_else(|| err(chars.get(pos).map_or(end, |c| c.0), "expected a degree"))?;
        let mut exponent = 1;
        if let Some(&(_, '^')) = chars.get(pos) {
            pos += 1;
            exponent = read_number(&chars, &mut pos)
                .ok_or_else(|| err(chars.get(pos).map_or(end, |c| c.0), "expected an exponent"))?;
        }
        out.push(ParsedFactor {
            family,
            degree,
            exponent,
        });
        match chars.get(pos) {
            None => return Ok(out),
            Some(&(_, '*')) | Some(&(_, 'x')) => pos += 1,
            Some(&(at, c)) => {
                let shown = literal[at..].chars().next().unwrap_or(c);
                return Err(err(at, &format!("unexpected '{shown}'")));
            }
        }
    }
}

fn read_number(chars: &[(usize, char)], pos: &mut usize) -> Option<i64> {
    let start = *pos;
    let mut value: i64 = 0;
    while let Some(&(_, c)) = chars.get(*pos) {
        let Some(d) = c.to_digit(10) else { break };
        value = value.checked_mul(10)?.checked_add(d as i64)?;
        *pos += 1;
    }
    (*pos > start).then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ChainPosition::*;

    #[test]
    fn s3_cubed_counts() {
        let spec = TowerGroupSpec::new([(3, 3)]).unwrap();
        assert_eq!((spec.slot_count(), spec.a4(), spec.b()), (3, 0, 3));
    }

    #[test]
    fn empty_spec_is_trivial_group() {
        let spec = TowerGroupSpec::new([]).unwrap();
        assert!(spec.is_trivial());
        assert_eq!(spec.slot_count(), 0);
        assert_eq!(spec.group_order(), Some(1));
        assert_eq!(spec.to_string(), "1");
    }

    #[test]
    fn sharpness_spec_counts() {
        let spec = TowerGroupSpec::new([(4, 2), (3, 2)]).unwrap();
        assert_eq!((spec.slot_count(), spec.a4(), spec.b()), (4, 2, 2));
        let degrees: Vec<_> = spec.slots().iter().map(|s| (s.degree, s.copy)).collect();
        assert_eq!(degrees, vec![(3, 1), (3, 2), (4, 1), (4, 2)]);
        assert_eq!(spec.slots()[2].class, SlotClass::A);
        assert_eq!(spec.slots()[0].class, SlotClass::B);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            TowerGroupSpec::new([(2, 1)]),
            Err(SpecError::DegreeTooSmall(2))
        );
        assert_eq!(
            TowerGroupSpec::new([(3, -1)]),
            Err(SpecError::NegativeExponent {
                degree: 3,
                exponent: -1
            })
        );
        assert!(matches!(
            TowerGroupSpec::new([(21, 1)]),
            Err(SpecError::DegreeTooLarge { .. })
        ));
        let zero = TowerGroupSpec::new([(3, 0), (5, 1)]).unwrap();
        assert_eq!(zero.exponents().len(), 1);
    }

    #[test]
    fn chains() {
        assert_eq!(chain(3).unwrap(), &[Triv, Alt, Full]);
        assert_eq!(chain(4).unwrap(), &[Triv, V, Alt, Full]);
        assert_eq!(chain(5).unwrap(), &[Triv, Alt, Full]);
        assert_eq!(chain(2), Err(SpecError::DegreeTooSmall(2)));
    }

    #[test]
    fn chain_isos() {
        let iso = chain_iso(3, 5).unwrap();
        for p in [Triv, Alt, Full] {
            assert_eq!(iso.apply(p), p);
        }
        let id = chain_iso(4, 4).unwrap();
        for &p in chain(4).unwrap() {
            assert_eq!(id.apply(p), p);
        }
        assert_eq!(chain_iso(4, 3), Err(SpecError::ChainLengthMismatch(4, 3)));
    }

    #[test]
    fn chain_isos_compose() {
        for (a, b, c) in [(3, 5, 7), (5, 3, 6), (4, 4, 4)] {
            let ab = chain_iso(a, b).unwrap();
            let bc = chain_iso(b, c).unwrap();
            let ac = chain_iso(a, c).unwrap();
            for &p in chain(a).unwrap() {
                assert_eq!(bc.apply(ab.apply(p)), ac.apply(p));
            }
        }
    }

    #[test]
    fn cardinalities() {
        assert_eq!(V.cardinality(4), 4);
        assert_eq!(Alt.cardinality(5), 60);
        assert_eq!(Full.cardinality(3), 6);
        assert_eq!(Triv.cardinality(7), 1);
        assert!(!V.is_legal_for(3));
    }

    #[test]
    fn parse_literals() {
        let spec: TowerGroupSpec = "S4^2*S3^2".parse().unwrap();
        assert_eq!(spec, TowerGroupSpec::new([(4, 2), (3, 2)]).unwrap());
        assert_eq!(spec.to_string(), "S4^2*S3^2");
        let spaced = TowerGroupSpec::parse(" s5 ^ 2 * S3^2 ").unwrap();
        assert_eq!(spaced.to_string(), "S5^2*S3^2");
        assert_eq!(TowerGroupSpec::parse("S3*S3").unwrap().to_string(), "S3^2");
        assert!(TowerGroupSpec::parse("1").unwrap().is_trivial());
    }

    #[test]
    fn parse_errors_carry_position() {
        match TowerGroupSpec::parse("S3^2*Q4") {
            Err(SpecError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        match TowerGroupSpec::parse("S3^") {
            Err(SpecError::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            TowerGroupSpec::parse("S2"),
            Err(SpecError::DegreeTooSmall(2))
        );
    }
}
