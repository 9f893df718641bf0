//! Linear algebra over `F_2` for sign vectors.
//!
//! A sign `-1` is the bit `1`, `+1` is the bit `0`. Coordinate `i` lives in
//! bit `i` of a `u64`, so widths are limited to 64. In bit strings the first
//! character is coordinate 0.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const MAX_WIDTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("width {0} exceeds the maximum of {MAX_WIDTH}")]
    WidthTooLarge(usize),
    #[error("coordinate {coord} out of range for width {width}")]
    BadCoordinate { coord: usize, width: usize },
    #[error("invalid bit string {0:?}")]
    BadBitString(String),
}

fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(width: usize) -> Result<(), Gf2Error> {
    if width > MAX_WIDTH {
        Err(Gf2Error::WidthTooLarge(width))
    } else {
        Ok(())
    }
}

#[cfg(test)]
fn parity(x: u64) -> bool {
    x.count_ones() % 2 == 1
}

fn bits_to_string(width: usize, bits: u64) -> String {
    (0..width)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn string_to_bits(s: &str) -> Result<(usize, u64), Gf2Error> {
    check_width(s.len())?;
    let mut bits = 0;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << i,
            _ => return Err(Gf2Error::BadBitString(s.to_string())),
        }
    }
    Ok((s.len(), bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    width: usize,
    bits: u64,
}

impl SignVector {
    pub fn new(width: usize, bits: u64) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Ok(SignVector {
            width,
            bits: bits & mask(width),
        })
    }

    pub fn zero(width: usize) -> Result<Self, Gf2Error> {
        Self::new(width, 0)
    }

    pub fn unit(width: usize, coord: usize) -> Result<Self, Gf2Error> {
        if coord >= width {
            return Err(Gf2Error::BadCoordinate { coord, width });
        }
        Self::new(width, 1 << coord)
    }

    /// From a `{±1}` tuple.
    pub fn from_signs(signs: &[i8]) -> Result<Self, Gf2Error> {
        let bits = signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        Self::new(signs.len(), bits)
    }

    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.width)
            .map(|i| if self.get(i) { -1 } else { 1 })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, coord: usize) -> bool {
        self.bits >> coord & 1 == 1
    }

    pub fn add(&self, other: &SignVector) -> Result<SignVector, Gf2Error> {
        if self.width != other.width {
            return Err(Gf2Error::WidthMismatch(self.width, other.width));
        }
        Ok(SignVector {
            width: self.width,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn parse(s: &str) -> Result<Self, Gf2Error> {
        let (width, bits) = string_to_bits(s)?;
        Ok(SignVector { width, bits })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(self.width, self.bits))
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SignVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A subspace of `F_2^width`, kept in reduced row-echelon form.
///
/// The pivot of a row is its lowest set bit; rows are sorted by pivot and
/// every pivot column is zero in all other rows. Equal subspaces therefore
/// have identical bases, so the derived `Eq`/`Hash` are subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    width: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn zero(width: usize) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Ok(Subspace {
            width,
            basis: Vec::new(),
        })
    }

    pub fn full(width: usize) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Ok(Subspace {
            width,
            basis: (0..width).map(|i| 1u64 << i).collect(),
        })
    }

    /// The product-one kernel: vectors of even weight.
    pub fn even_weight(width: usize) -> Result<Self, Gf2Error> {
        Self::from_raw(width, (1..width).map(|i| 1u64 | 1 << i))
    }

    pub fn span(width: usize, vectors: &[SignVector]) -> Result<Self, Gf2Error> {
        for v in vectors {
            if v.width != width {
                return Err(Gf2Error::WidthMismatch(width, v.width));
            }
        }
        Self::from_raw(width, vectors.iter().map(|v| v.bits))
    }

    /// Span of raw bit rows (bits beyond `width` are discarded).
    pub fn from_raw<I: IntoIterator<Item = u64>>(width: usize, rows: I) -> Result<Self, Gf2Error> {
        let mut s = Self::zero(width)?;
        for r in rows {
            s.insert_raw(r & mask(width));
        }
        Ok(s)
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.basis {
            let pivot = row.trailing_zeros();
            if v >> pivot & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    fn insert_raw(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pivot = v.trailing_zeros();
        for row in &mut self.basis {
            if *row >> pivot & 1 == 1 {
                *row ^= v;
            }
        }
        let at = self.basis.partition_point(|r| r.trailing_zeros() < pivot);
        self.basis.insert(at, v);
        true
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cardinality(&self) -> u128 {
        1u128 << self.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> Vec<SignVector> {
        self.basis
            .iter()
            .map(|&bits| SignVector {
                width: self.width,
                bits,
            })
            .collect()
    }

    pub fn raw_basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn contains(&self, v: &SignVector) -> Result<bool, Gf2Error> {
        if v.width != self.width {
            return Err(Gf2Error::WidthMismatch(self.width, v.width));
        }
        Ok(self.contains_raw(v.bits))
    }

    pub fn contains_raw(&self, v: u64) -> bool {
        self.reduce(v & mask(self.width)) == 0 && v & !mask(self.width) == 0
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, Gf2Error> {
        self.same_width(other)?;
        Ok(self.basis.iter().all(|&b| other.contains_raw(b)))
    }

    /// Bitwise OR of all vectors: the coordinates where some vector is nonzero.
    pub fn support(&self) -> u64 {
        self.basis.iter().fold(0, |acc, &b| acc | b)
    }

    fn same_width(&self, other: &Subspace) -> Result<(), Gf2Error> {
        if self.width != other.width {
            Err(Gf2Error::WidthMismatch(self.width, other.width))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.same_width(other)?;
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert_raw(b);
        }
        Ok(s)
    }

    /// `{v : v·s = 0 for all s ∈ self}`.
    pub fn annihilator(&self) -> Subspace {
        let pivots: u64 = self
            .basis
            .iter()
            .fold(0, |acc, r| acc | 1 << r.trailing_zeros());
        let mut out = Subspace {
            width: self.width,
            basis: Vec::new(),
        };
        for free in (0..self.width).filter(|&c| pivots >> c & 1 == 0) {
            let mut v = 1u64 << free;
            for &row in &self.basis {
                if row >> free & 1 == 1 {
                    v |= 1 << row.trailing_zeros();
                }
            }
            out.insert_raw(v);
        }
        out
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.same_width(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Image under keeping only `coords` (in the given order).
    pub fn project(&self, coords: &[usize]) -> Result<Subspace, Gf2Error> {
        for &c in coords {
            if c >= self.width {
                return Err(Gf2Error::BadCoordinate {
                    coord: c,
                    width: self.width,
                });
            }
        }
        Subspace::from_raw(
            coords.len(),
            self.basis.iter().map(|&b| gather_bits(b, coords)),
        )
    }

    /// Image under placing coordinate `i` at `coords[i]` in `F_2^width`.
    pub fn embed(&self, width: usize, coords: &[usize]) -> Result<Subspace, Gf2Error> {
        if coords.len() != self.width {
            return Err(Gf2Error::WidthMismatch(self.width, coords.len()));
        }
        for &c in coords {
            if c >= width {
                return Err(Gf2Error::BadCoordinate { coord: c, width });
            }
        }
        Subspace::from_raw(width, self.basis.iter().map(|&b| scatter_bits(b, coords)))
    }

    /// All `2^dim` vectors, in Gray-code order starting from zero.
    pub fn elements(&self) -> impl Iterator<Item = SignVector> + '_ {
        let mut current = 0u64;
        (0..1u64 << self.dim()).map(move |i| {
            if i > 0 {
                current ^= self.basis[i.trailing_zeros() as usize];
            }
            SignVector {
                width: self.width,
                bits: current,
            }
        })
    }

    /// Every subspace of `F_2^width`, each exactly once, by enumerating
    /// reduced echelon forms.
    pub fn enumerate_all(width: usize) -> Result<Vec<Subspace>, Gf2Error> {
        check_width(width)?;
        let mut out = Vec::new();
        if width > 20 {
            return Err(Gf2Error::WidthTooLarge(width));
        }
        for pivots in 0u64..1 << width {
            let pivot_cols: Vec<usize> = (0..width).filter(|&c| pivots >> c & 1 == 1).collect();
            // Free slots of row r: non-pivot columns to the right of its pivot.
            let free: Vec<Vec<usize>> = pivot_cols
                .iter()
                .map(|&p| ((p + 1)..width).filter(|&c| pivots >> c & 1 == 0).collect())
                .collect();
            let total: usize = free.iter().map(Vec::len).sum();
            for assignment in 0u64..1 << total {
                let mut bit = 0;
                let mut basis = Vec::with_capacity(pivot_cols.len());
                for (row, &p) in pivot_cols.iter().enumerate() {
                    let mut v = 1u64 << p;
                    for &c in &free[row] {
                        if assignment >> bit & 1 == 1 {
                            v |= 1 << c;
                        }
                        bit += 1;
                    }
                    basis.push(v);
                }
                out.push(Subspace { width, basis });
            }
        }
        Ok(out)
    }

    pub fn to_bit_strings(&self) -> Vec<String> {
        self.basis
            .iter()
            .map(|&b| bits_to_string(self.width, b))
            .collect()
    }

    pub fn from_bit_strings(width: usize, rows: &[String]) -> Result<Self, Gf2Error> {
        let mut vs = Vec::with_capacity(rows.len());
        for r in rows {
            let (w, bits) = string_to_bits(r)?;
            if w != width {
                return Err(Gf2Error::WidthMismatch(width, w));
            }
            vs.push(bits);
        }
        Self::from_raw(width, vs)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    width: usize,
    basis: Vec<String>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SubspaceRepr {
            width: self.width,
            basis: self.to_bit_strings(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SubspaceRepr::deserialize(deserializer)?;
        Subspace::from_bit_strings(repr.width, &repr.basis).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{{}}}", self.to_bit_strings().join(","))
    }
}

pub(crate) fn gather_bits(v: u64, coords: &[usize]) -> u64 {
    coords
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &c)| acc | (v >> c & 1) << i)
}

pub(crate) fn scatter_bits(v: u64, coords: &[usize]) -> u64 {
    coords
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &c)| acc | (v >> i & 1) << c)
}

#[cfg(test)]
fn dot(a: u64, b: u64) -> bool {
    parity(a & b)
}
