//! Independent checks for the consequences of the decomposition, plus
//! exhaustive and greedy baselines for tiny instances.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::decompose::{decompose, symmetric_subset, verify_decomposition};
use crate::error::{Error, Result};
use crate::field::{sumset, FieldVector, Limits, PointSet, Space};
use crate::monomial::capset_bound_m;

/// Largest `|S|` for which every proper subset is tried in [`proper_subsets_fail`].
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 12;

/// True iff no three distinct points `a, a + b, a + 2b` with `b != 0` lie in `S`.
///
/// Over `F_2` every progression degenerates (`a + 2b = a`), so every set qualifies.
pub fn is_ap_free(s: &PointSet) -> bool {
    let space = s.space();
    for a in s {
        for c in s {
            if a == c {
                continue;
            }
            // c = a + b, so a + 2b = 2c - a
            let Ok(b) = space.sub(c, a) else { return false };
            let third = space.add_unchecked(c, &b);
            if third != *a && third != *c && s.contains(&third) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapsetReport {
    pub size: usize,
    pub ap_free: bool,
    /// The bound only speaks to AP-free sets over odd `q`.
    pub applicable: bool,
    pub bound: String,
    pub size_within_bound: bool,
    pub symmetric_subset_is_whole: Option<bool>,
    /// Every proper `S' ⊊ S` has `S' + S != S + S`; only run for small `S`.
    pub proper_subsets_fail: Option<bool>,
    pub passed: bool,
}

/// For AP-free `S` over odd `q`: `|S| <= M(F_q^n)`, and the symmetric witness is `S` itself
/// because any `S'` missing `s` cannot produce `2s`.
pub fn check_capset_bound(s: &PointSet, limits: &Limits) -> Result<CapsetReport> {
    let space = s.space();
    let bound = capset_bound_m(space.q(), space.n());
    let ap_free = is_ap_free(s);
    let applicable = ap_free && space.q() >= 3;
    let size_within_bound = num_bigint::BigUint::from(s.len()) <= bound;
    let mut report = CapsetReport {
        size: s.len(),
        ap_free,
        applicable,
        bound: bound.to_string(),
        size_within_bound,
        symmetric_subset_is_whole: None,
        proper_subsets_fail: None,
        passed: true,
    };
    if !applicable {
        return Ok(report);
    }
    report.symmetric_subset_is_whole = Some(symmetric_subset(s, limits)? == *s);
    if s.len() <= EXHAUSTIVE_SUBSET_LIMIT {
        report.proper_subsets_fail = Some(proper_subsets_fail(s)?);
    }
    report.passed = size_within_bound
        && report.symmetric_subset_is_whole == Some(true)
        && report.proper_subsets_fail != Some(false);
    Ok(report)
}

/// Tries every proper subset `S'` of `S` and reports whether all have `S' + S != S + S`.
pub fn proper_subsets_fail(s: &PointSet) -> Result<bool> {
    if s.len() > EXHAUSTIVE_SUBSET_LIMIT {
        return Err(Error::SearchTooLarge {
            size: s.len(),
            cap: EXHAUSTIVE_SUBSET_LIMIT,
        });
    }
    let lines = SumLines::new(s, s)?;
    let full = (1u64 << s.len()) - 1;
    Ok((0..full).all(|mask| !lines.covers(mask)))
}

/// Pairs `(s_i, t_i)` with both lists duplicate-free and of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPairFamily {
    space: Space,
    s_ord: Vec<FieldVector>,
    t_ord: Vec<FieldVector>,
}

impl OrderedPairFamily {
    pub fn new(space: Space, s_ord: Vec<FieldVector>, t_ord: Vec<FieldVector>) -> Result<Self> {
        if s_ord.len() != t_ord.len() {
            return Err(Error::Validation(format!(
                "ordered lists have lengths {} and {}",
                s_ord.len(),
                t_ord.len()
            )));
        }
        for list in [&s_ord, &t_ord] {
            let mut seen = BTreeSet::new();
            for v in list {
                space.check(v)?;
                if !seen.insert(v) {
                    return Err(Error::Validation(format!("duplicate point {v}")));
                }
            }
        }
        Ok(OrderedPairFamily {
            space,
            s_ord,
            t_ord,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.s_ord.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_ord.is_empty()
    }

    pub fn s_ord(&self) -> &[FieldVector] {
        &self.s_ord
    }

    pub fn t_ord(&self) -> &[FieldVector] {
        &self.t_ord
    }

    pub fn s_set(&self) -> PointSet {
        PointSet::from_points(self.space, self.s_ord.iter().cloned()).expect("validated")
    }

    pub fn t_set(&self) -> PointSet {
        PointSet::from_points(self.space, self.t_ord.iter().cloned()).expect("validated")
    }
}

/// True iff `s_i + t_i = s_j + t_k` forces `(j, k) = (i, i)`.
pub fn is_matching_sumfree(fam: &OrderedPairFamily) -> bool {
    let space = fam.space;
    let mut multiplicity: BTreeMap<FieldVector, usize> = BTreeMap::new();
    for s in &fam.s_ord {
        for t in &fam.t_ord {
            *multiplicity.entry(space.add_unchecked(s, t)).or_default() += 1;
        }
    }
    fam.s_ord
        .iter()
        .zip(&fam.t_ord)
        .all(|(s, t)| multiplicity[&space.add_unchecked(s, t)] == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumfreeReport {
    pub n: usize,
    pub bound: String,
    pub n_within_bound: bool,
    pub s_prime_size: usize,
    pub t_prime_size: usize,
    /// Every `i` has `s_i ∈ S'` or `t_i ∈ T'`.
    pub all_indices_covered: bool,
    pub n_le_witness_total: bool,
    pub passed: bool,
}

/// `N <= M(F_q^n)` for a multicolored sum-free family, re-derived through a decomposition.
pub fn check_sumfree_bound(fam: &OrderedPairFamily, limits: &Limits) -> Result<SumfreeReport> {
    if !is_matching_sumfree(fam) {
        return Err(Error::PreconditionFailed(
            "some s_i + t_i equals s_j + t_k with (j, k) != (i, i)".into(),
        ));
    }
    let space = fam.space;
    let bound = capset_bound_m(space.q(), space.n());
    let dec = decompose(&fam.s_set(), &fam.t_set(), None, limits)?;
    let all_indices_covered = fam
        .s_ord
        .iter()
        .zip(&fam.t_ord)
        .all(|(s, t)| dec.s_prime.contains(s) || dec.t_prime.contains(t));
    let n_within_bound = num_bigint::BigUint::from(fam.len()) <= bound;
    let n_le_witness_total = fam.len() <= dec.total();
    Ok(SumfreeReport {
        n: fam.len(),
        bound: bound.to_string(),
        n_within_bound,
        s_prime_size: dec.s_prime.len(),
        t_prime_size: dec.t_prime.len(),
        all_indices_covered,
        n_le_witness_total,
        passed: n_within_bound && all_indices_covered && n_le_witness_total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub best_s_prime: PointSet,
    pub best_t_prime: PointSet,
    pub best_total: usize,
}

/// For each element of `S` then `T`, the set of sums its line `{s} + T` or `S + {t}` hits.
struct SumLines {
    lines: Vec<FixedBitSet>,
    sums: usize,
}

impl SumLines {
    fn new(s: &PointSet, t: &PointSet) -> Result<Self> {
        let sums = sumset(s, t)?;
        let index: BTreeMap<&FieldVector, usize> =
            sums.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let space = s.space();
        let mut lines = Vec::with_capacity(s.len() + t.len());
        for a in s {
            let mut bits = FixedBitSet::with_capacity(sums.len());
            for b in t {
                bits.insert(index[&space.add_unchecked(a, b)]);
            }
            lines.push(bits);
        }
        for b in t {
            let mut bits = FixedBitSet::with_capacity(sums.len());
            for a in s {
                bits.insert(index[&space.add_unchecked(a, b)]);
            }
            lines.push(bits);
        }
        Ok(SumLines {
            lines,
            sums: sums.len(),
        })
    }

    fn covers(&self, mask: u64) -> bool {
        let mut acc = FixedBitSet::with_capacity(self.sums);
        for (i, line) in self.lines.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc.union_with(line);
            }
        }
        acc.count_ones(..) == self.sums
    }
}

/// Next larger integer with the same popcount.
fn next_combination(x: u64) -> Option<u64> {
    let c = x & x.wrapping_neg();
    let r = x.checked_add(c)?;
    Some((((r ^ x) >> 2) / c) | r)
}

/// Smallest `|S'| + |T'|` over all valid witness pairs, by trying totals `0, 1, 2, ...`.
///
/// Within a total, candidates are tried in increasing bitmask order over the elements of
/// `S` then `T` (canonical order), so the reported witness is deterministic.
pub fn oracle_min_decomposition(
    s: &PointSet,
    t: &PointSet,
    limits: &Limits,
) -> Result<OracleResult> {
    s.same_space(t)?;
    let size = s.len() + t.len();
    let cap = limits.oracle_cap.min(63);
    if size > cap {
        return Err(Error::SearchTooLarge { size, cap });
    }
    let lines = SumLines::new(s, t)?;
    let elements: Vec<&FieldVector> = s.iter().chain(t).collect();
    let witness = |mask: u64| -> Result<OracleResult> {
        let pick = |range: std::ops::Range<usize>| {
            PointSet::from_points(
                s.space(),
                range
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| elements[i].clone()),
            )
        };
        Ok(OracleResult {
            best_s_prime: pick(0..s.len())?,
            best_t_prime: pick(s.len()..size)?,
            best_total: mask.count_ones() as usize,
        })
    };

    for k in 0..=size {
        let limit = 1u64 << size;
        let mut mask = (1u64 << k) - 1;
        while mask < limit {
            if lines.covers(mask) {
                return witness(mask);
            }
            if k == 0 {
                break;
            }
            match next_combination(mask) {
                Some(next) => mask = next,
                None => break,
            }
        }
    }
    unreachable!("taking every element always covers S + T")
}

/// Greedy cover of `S + T` by lines `{s} + T` and `S + {t}`, largest gain first,
/// ties to the earliest line (elements of `S` before `T`, canonical order within each).
pub fn greedy_decomposition(s: &PointSet, t: &PointSet) -> Result<(PointSet, PointSet)> {
    s.same_space(t)?;
    let lines = SumLines::new(s, t)?;
    let elements: Vec<&FieldVector> = s.iter().chain(t).collect();
    let mut covered = FixedBitSet::with_capacity(lines.sums);
    let mut s_prime = PointSet::empty(s.space());
    let mut t_prime = PointSet::empty(t.space());
    while covered.count_ones(..) < lines.sums {
        let (best, _) = lines
            .lines
            .iter()
            .enumerate()
            .map(|(i, line)| (i, line.difference(&covered).count()))
            .fold(
                (usize::MAX, 0),
                |acc, (i, gain)| if gain > acc.1 { (i, gain) } else { acc },
            );
        covered.union_with(&lines.lines[best]);
        if best < s.len() {
            s_prime.insert(elements[best].clone())?;
        } else {
            t_prime.insert(elements[best].clone())?;
        }
    }
    debug_assert!(verify_decomposition(s, t, &s_prime, &t_prime).unwrap_or(false));
    Ok((s_prime, t_prime))
}
