//! Arithmetic in a prime field `F_q`, points of `F_q^n`, and finite point sets.
//!
//! Field elements are plain `u32` residues in `[0, q)`; the [`PrimeField`] value
//! carries the modulus. Points are [`FieldVector`]s, ordered lexicographically by
//! coordinate tuple, and that order is the canonical order used everywhere.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default refusal threshold for anything that walks all of `F_q^n`.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 22;
/// Default refusal threshold for `|S| + |T|` in the exhaustive oracle.
pub const DEFAULT_ORACLE_CAP: usize = 16;

/// Resource caps shared by the enumerating operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub enumeration_cap: u64,
    pub oracle_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u32,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        make_field(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q as u64
    }
}

/// Builds `F_q`, rejecting composite moduli.
///
/// Moduli are limited to `q < 2^31` so that residues fit in `u32` and products in `u64`.
pub fn make_field(q: u64) -> Result<PrimeField> {
    if q >= 1 << 31 {
        return Err(Error::Validation(format!("modulus {q} too large")));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(PrimeField { q: q as u32 })
}

pub(crate) fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

impl PrimeField {
    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.q as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.q as u64 {
            (s - self.q as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.q) {
            None
        } else {
            Some(self.pow(a, self.q as u64 - 2))
        }
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A point of `F_q^n`. The modulus lives in the enclosing [`Space`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldVector(Vec<u32>);

impl FieldVector {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The ambient group `F_q^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    field: PrimeField,
    n: usize,
}

impl Space {
    pub fn new(field: PrimeField, n: usize) -> Self {
        Space { field, n }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`, or `None` on `u64` overflow.
    pub fn size(&self) -> Option<u64> {
        (self.field.q as u64).checked_pow(u32::try_from(self.n).ok()?)
    }

    /// `q^n`, provided it does not exceed `cap`.
    pub fn require_enumerable(&self, cap: u64) -> Result<u64> {
        match self.size() {
            Some(size) if size <= cap => Ok(size),
            Some(size) => Err(Error::EnumerationTooLarge {
                what: "F_q^n",
                required: size.to_string(),
                cap,
            }),
            None => Err(Error::EnumerationTooLarge {
                what: "F_q^n",
                required: format!("{}^{}", self.field.q, self.n),
                cap,
            }),
        }
    }

    /// Validates coordinates already in `[0, q)`.
    pub fn vector(&self, coords: Vec<u32>) -> Result<FieldVector> {
        if coords.len() != self.n {
            return Err(Error::mismatch(
                (self.q(), self.n),
                (self.q(), coords.len()),
            ));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= self.field.q) {
            return Err(Error::Validation(format!(
                "coordinate {c} out of range for q = {}",
                self.field.q
            )));
        }
        Ok(FieldVector(coords))
    }

    /// Builds a vector from arbitrary integers, reducing each coordinate mod `q`.
    pub fn vector_reduced(&self, coords: &[i64]) -> Result<FieldVector> {
        let q = self.field.q as i64;
        self.vector(coords.iter().map(|&c| c.rem_euclid(q) as u32).collect())
    }

    pub fn zero(&self) -> FieldVector {
        FieldVector(vec![0; self.n])
    }

    pub fn check(&self, v: &FieldVector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::mismatch((self.q(), self.n), (self.q(), v.len())));
        }
        Ok(())
    }

    pub fn add(&self, u: &FieldVector, v: &FieldVector) -> Result<FieldVector> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.add_unchecked(u, v))
    }

    pub fn sub(&self, u: &FieldVector, v: &FieldVector) -> Result<FieldVector> {
        self.check(u)?;
        self.check(v)?;
        Ok(FieldVector(
            u.0.iter()
                .zip(&v.0)
                .map(|(&a, &b)| self.field.sub(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, k: u32, v: &FieldVector) -> FieldVector {
        FieldVector(v.0.iter().map(|&a| self.field.mul(k, a)).collect())
    }

    pub(crate) fn add_unchecked(&self, u: &FieldVector, v: &FieldVector) -> FieldVector {
        FieldVector(
            u.0.iter()
                .zip(&v.0)
                .map(|(&a, &b)| self.field.add(a, b))
                .collect(),
        )
    }

    /// Position of `v` in the canonical enumeration (base-`q` digits, first coordinate most significant).
    pub fn index_of(&self, v: &FieldVector) -> u64 {
        v.0.iter()
            .fold(0u64, |acc, &c| acc * self.field.q as u64 + c as u64)
    }

    pub fn point_at(&self, mut index: u64) -> FieldVector {
        let q = self.field.q as u64;
        let mut coords = vec![0u32; self.n];
        for slot in coords.iter_mut().rev() {
            *slot = (index % q) as u32;
            index /= q;
        }
        FieldVector(coords)
    }

    /// All of `F_q^n` in lexicographic order.
    pub fn points(self, cap: u64) -> Result<impl Iterator<Item = FieldVector>> {
        let size = self.require_enumerable(cap)?;
        Ok((0..size).map(move |i| self.point_at(i)))
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.field.q, self.n)
    }
}

/// A duplicate-free finite subset of `F_q^n`, iterated in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    space: Space,
    members: BTreeSet<FieldVector>,
}

impl PointSet {
    pub fn empty(space: Space) -> Self {
        PointSet {
            space,
            members: BTreeSet::new(),
        }
    }

    /// Collects points, validating each against `space`. Repeated points collapse.
    pub fn from_points<I>(space: Space, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = FieldVector>,
    {
        let mut set = PointSet::empty(space);
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// Convenience constructor from raw coordinate tuples.
    pub fn from_coords<I, C>(space: Space, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[u32]>,
    {
        let mut set = PointSet::empty(space);
        for t in tuples {
            set.insert(space.vector(t.as_ref().to_vec())?)?;
        }
        Ok(set)
    }

    pub fn full(space: Space, cap: u64) -> Result<Self> {
        Ok(PointSet {
            space,
            members: space.points(cap)?.collect(),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn insert(&mut self, v: FieldVector) -> Result<bool> {
        self.space.check(&v)?;
        if let Some(c) = v.0.iter().find(|&&c| c >= self.space.q()) {
            return Err(Error::Validation(format!(
                "coordinate {c} out of range for q = {}",
                self.space.q()
            )));
        }
        Ok(self.members.insert(v))
    }

    pub fn contains(&self, v: &FieldVector) -> bool {
        self.members.contains(v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FieldVector> + '_ {
        self.members.iter()
    }

    pub fn to_vec(&self) -> Vec<FieldVector> {
        self.members.iter().cloned().collect()
    }

    pub fn members(&self) -> &BTreeSet<FieldVector> {
        &self.members
    }

    pub fn same_space(&self, other: &PointSet) -> Result<()> {
        if self.space != other.space {
            return Err(Error::mismatch(
                (self.space.q(), self.space.n()),
                (other.space.q(), other.space.n()),
            ));
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.space == other.space && self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        Ok(PointSet {
            space: self.space,
            members: self.members.union(&other.members).cloned().collect(),
        })
    }

    pub fn difference(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        Ok(PointSet {
            space: self.space,
            members: self.members.difference(&other.members).cloned().collect(),
        })
    }
}

impl Serialize for PointSet {
    fn serialize<Ser: serde::Serializer>(
        &self,
        serializer: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.collect_seq(self.members.iter())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a FieldVector;
    type IntoIter = std::collections::btree_set::Iter<'a, FieldVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// `S + T = { s + t : s ∈ S, t ∈ T }`.
pub fn sumset(s: &PointSet, t: &PointSet) -> Result<PointSet> {
    s.same_space(t)?;
    let space = s.space;
    let mut members = BTreeSet::new();
    for a in s {
        for b in t {
            members.insert(space.add_unchecked(a, b));
        }
    }
    Ok(PointSet { space, members })
}

/// `F_q^n \ A`.
pub fn complement(a: &PointSet, cap: u64) -> Result<PointSet> {
    let space = a.space;
    Ok(PointSet {
        space,
        members: space.points(cap)?.filter(|p| !a.contains(p)).collect(),
    })
}
