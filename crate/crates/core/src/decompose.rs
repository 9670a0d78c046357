//! Witness construction for `(S' + T) ∪ (S + T') = S + T` with `|S'| + |T'|` at most
//! `2 m_{floor(d/2)} + q^n - m_d`.
//!
//! Pipeline: vanishing space `V` at degree `d`, its sum matrices, a pivot basis of
//! those, a minimum line cover of the pivots (rows give `S_0`, columns `T_0`), then one
//! representative in `S` for each sum the cover misses.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cover::{line_cover, pivot_basis};
use crate::error::{Error, Result};
use crate::field::{sumset, FieldVector, Limits, PointSet};
use crate::monomial::CountTable;
use crate::sum_matrix::sum_matrix;
use crate::vanishing::vanishing_space_of;

/// `2 m_{floor(d/2)} + q^n - m_d`.
pub fn degree_bound(table: &CountTable, d: usize) -> BigUint {
    table.m(d / 2) * 2u32 + table.total() - table.m(d)
}

/// The degree in `0..=(q-1)n` minimizing [`degree_bound`], smallest on ties.
pub fn choose_degree(q: u32, n: usize) -> (usize, BigUint) {
    choose_degree_from_table(&CountTable::new(q, n))
}

pub fn choose_degree_from_table(table: &CountTable) -> (usize, BigUint) {
    (0..=table.max_degree())
        .map(|d| (d, degree_bound(table, d)))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("degree range is never empty")
}

/// Everything needed to re-check a [`Decomposition`] without rerunning it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub s0: PointSet,
    pub t0: PointSet,
    pub s1: PointSet,
    /// Sums missed by `(S_0 + T) ∪ (S + T_0)`.
    pub uncovered: PointSet,
    pub sumset_size: usize,
    pub q_pow_n: u64,
    pub m_d: u64,
    pub m_half: u64,
    pub dim_v: usize,
    pub dim_v_lower_bound: i64,
    pub rank_bound: usize,
    pub cover_size: usize,
    pub matching_size: usize,
    /// Pivot positions of the eliminated basis, as `(s, t)` pairs.
    pub pivots: Vec<(FieldVector, FieldVector)>,
    /// How many distinct pivot sums land in `(S_0 + T) ∪ (S + T_0)`.
    pub pivot_sums_covered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub s_prime: PointSet,
    pub t_prime: PointSet,
    pub d: usize,
    pub bound: u64,
    pub certificate: Certificate,
}

impl Decomposition {
    pub fn total(&self) -> usize {
        self.s_prime.len() + self.t_prime.len()
    }
}

fn invariant(name: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvariantViolated {
            name,
            detail: detail(),
        })
    }
}

/// Runs the full construction. `d = None` picks the degree with [`choose_degree`].
///
/// Every inequality the construction relies on is re-checked; a failure comes back as
/// [`Error::InvariantViolated`] or [`Error::BoundViolated`].
pub fn decompose(
    s: &PointSet,
    t: &PointSet,
    d: Option<usize>,
    limits: &Limits,
) -> Result<Decomposition> {
    s.same_space(t)?;
    let space = s.space();
    let q_pow_n = space.require_enumerable(limits.enumeration_cap)?;
    let table = CountTable::new(space.q(), space.n());
    let d = d.unwrap_or_else(|| choose_degree_from_table(&table).0);
    let small = |x: &BigUint| x.to_u64().expect("bounded by q^n");
    let m_d = small(table.m(d));
    let m_half = small(table.m(d / 2));
    let bound = small(&degree_bound(&table, d));

    let sums = sumset(s, t)?;
    let v = vanishing_space_of(&sums, d, limits.enumeration_cap)?;
    let dim_v_lower_bound = v.dim_lower_bound();
    invariant(
        "dim_v_lower_bound",
        v.dim() as i64 >= dim_v_lower_bound,
        || format!("dim V = {} < {}", v.dim(), dim_v_lower_bound),
    )?;

    let rows = s.to_vec();
    let cols = t.to_vec();
    let matrices = v
        .basis()
        .iter()
        .map(|p| sum_matrix(p, &rows, &cols).map(|m| m.into_entries()))
        .collect::<Result<Vec<_>>>()?;
    let basis = pivot_basis(matrices).map_err(|e| match e {
        Error::DependentInput { index } => Error::InvariantViolated {
            name: "sum_matrix_injective",
            detail: format!("basis element {index} maps into the span of earlier ones"),
        },
        other => other,
    })?;

    let pivot_pairs: Vec<(FieldVector, FieldVector)> = basis
        .pivots
        .iter()
        .map(|&(i, j)| (rows[i].clone(), cols[j].clone()))
        .collect();
    let pivot_sums = PointSet::from_points(
        space,
        pivot_pairs.iter().map(|(a, b)| space.add_unchecked(a, b)),
    )?;
    invariant(
        "pivot_sums_distinct",
        pivot_sums.len() == pivot_pairs.len(),
        || {
            format!(
                "{} pivots but {} distinct sums",
                pivot_pairs.len(),
                pivot_sums.len()
            )
        },
    )?;

    let rank_bound = 2 * m_half as usize;
    let cover = line_cover(&basis.pivots, rank_bound)?;
    let s0 = PointSet::from_points(space, cover.cover_rows.iter().map(|&i| rows[i].clone()))?;
    let t0 = PointSet::from_points(space, cover.cover_cols.iter().map(|&j| cols[j].clone()))?;
    invariant(
        "cover_contains_pivots",
        basis.pivots.iter().all(|&p| cover.covers(p)),
        || "some pivot lies outside the cover".into(),
    )?;

    let covered = sumset(&s0, t)?.union(&sumset(s, &t0)?)?;
    let pivot_sums_covered = pivot_sums.iter().filter(|w| covered.contains(w)).count();
    invariant("pivot_sums_covered", pivot_sums_covered == v.dim(), || {
        format!(
            "only {pivot_sums_covered} of {} pivot sums covered",
            v.dim()
        )
    })?;

    let uncovered = sums.difference(&covered)?;
    invariant(
        "uncovered_bound",
        uncovered.len() as u64 <= q_pow_n - m_d,
        || format!("|W| = {} > q^n - m_d = {}", uncovered.len(), q_pow_n - m_d),
    )?;

    let mut s1 = PointSet::empty(space);
    for w in &uncovered {
        let rep = s
            .iter()
            .find(|a| space.sub(w, a).is_ok_and(|b| t.contains(&b)))
            .expect("every element of S + T has a representative");
        s1.insert(rep.clone())?;
    }

    let s_prime = s0.union(&s1)?;
    let t_prime = t0.clone();
    let total = (s_prime.len() + t_prime.len()) as u64;
    invariant("witness_size", total <= bound, || {
        format!("|S'| + |T'| = {total} > {bound}")
    })?;
    invariant(
        "coverage",
        verify_decomposition(s, t, &s_prime, &t_prime)?,
        || "(S' + T) ∪ (S + T') != S + T".into(),
    )?;

    Ok(Decomposition {
        s_prime,
        t_prime,
        d,
        bound,
        certificate: Certificate {
            s0,
            t0,
            s1,
            uncovered,
            sumset_size: sums.len(),
            q_pow_n,
            m_d,
            m_half,
            dim_v: v.dim(),
            dim_v_lower_bound,
            rank_bound,
            cover_size: cover.size(),
            matching_size: cover.matching.len(),
            pivots: pivot_pairs,
            pivot_sums_covered,
        },
    })
}

/// A subset `S'` of `S` with `S' + S = S + S`: the union of both witnesses for `(S, S)`.
pub fn symmetric_subset(s: &PointSet, limits: &Limits) -> Result<PointSet> {
    let dec = decompose(s, s, None, limits)?;
    let out = dec.s_prime.union(&dec.t_prime)?;
    invariant("symmetric_size", out.len() as u64 <= dec.bound, || {
        format!("|S'| = {} > {}", out.len(), dec.bound)
    })?;
    Ok(out)
}

/// Direct check that `S' ⊆ S`, `T' ⊆ T` and `(S' + T) ∪ (S + T') = S + T`.
pub fn verify_decomposition(
    s: &PointSet,
    t: &PointSet,
    s_prime: &PointSet,
    t_prime: &PointSet,
) -> Result<bool> {
    s.same_space(t)?;
    s.same_space(s_prime)?;
    s.same_space(t_prime)?;
    if !s_prime.is_subset(s) || !t_prime.is_subset(t) {
        return Ok(false);
    }
    let target = sumset(s, t)?;
    let got = sumset(s_prime, t)?.union(&sumset(s, t_prime)?)?;
    Ok(got == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, Space};

    fn space(q: u64, n: usize) -> Space {
        Space::new(make_field(q).unwrap(), n)
    }

    fn set(sp: Space, pts: &[&[u32]]) -> PointSet {
        PointSet::from_coords(sp, pts.iter().copied()).unwrap()
    }

    #[test]
    fn degree_choice_examples() {
        assert_eq!(choose_degree(2, 2), (1, BigUint::from(3u32)));
        assert_eq!(choose_degree(3, 2), (3, BigUint::from(7u32)));
        assert_eq!(choose_degree(2, 1), (1, BigUint::from(2u32)));

        let table = CountTable::new(3, 2);
        let all: Vec<u32> = (0..=4)
            .map(|d| degree_bound(&table, d).try_into().unwrap())
            .collect();
        assert_eq!(all, vec![10, 8, 9, 7, 12]);
        let table = CountTable::new(2, 2);
        let all: Vec<u32> = (0..=2)
            .map(|d| degree_bound(&table, d).try_into().unwrap())
            .collect();
        assert_eq!(all, vec![5, 3, 6]);
    }

    #[test]
    fn singletons() {
        let sp = space(3, 2);
        let s = set(sp, &[&[1, 2]]);
        let t = set(sp, &[&[2, 2]]);
        let dec = decompose(&s, &t, None, &Limits::default()).unwrap();
        assert_eq!(dec.total(), 1);
        assert!(verify_decomposition(&s, &t, &dec.s_prime, &dec.t_prime).unwrap());
        assert!(dec.total() as u64 <= dec.bound);
    }

    #[test]
    fn whole_binary_plane() {
        let sp = space(2, 2);
        let all = PointSet::full(sp, 16).unwrap();
        let dec = decompose(&all, &all, None, &Limits::default()).unwrap();
        assert_eq!(dec.d, 1);
        assert_eq!(dec.bound, 3);
        assert!(dec.total() <= 3);
        assert!(verify_decomposition(&all, &all, &dec.s_prime, &dec.t_prime).unwrap());
    }

    #[test]
    fn empty_inputs_give_empty_witnesses() {
        let sp = space(3, 2);
        let s = set(sp, &[&[0, 1]]);
        let e = PointSet::empty(sp);
        for (a, b) in [(&s, &e), (&e, &s), (&e, &e)] {
            let dec = decompose(a, b, None, &Limits::default()).unwrap();
            assert!(dec.s_prime.is_empty() && dec.t_prime.is_empty());
            assert_eq!(dec.certificate.dim_v, 0);
        }
    }

    #[test]
    fn explicit_degree_is_respected() {
        let sp = space(3, 2);
        let s = set(sp, &[&[0, 0], &[1, 0], &[0, 1]]);
        for d in 0..=6 {
            let dec = decompose(&s, &s, Some(d), &Limits::default()).unwrap();
            assert_eq!(dec.d, d);
            assert!(verify_decomposition(&s, &s, &dec.s_prime, &dec.t_prime).unwrap());
            assert!(dec.total() as u64 <= dec.bound);
        }
    }

    #[test]
    fn decompose_refuses_above_cap() {
        let sp = space(3, 3);
        let s = set(sp, &[&[0, 0, 0]]);
        let limits = Limits {
            enumeration_cap: 26,
            ..Limits::default()
        };
        assert!(decompose(&s, &s, None, &limits)
            .unwrap_err()
            .is_cap_refusal());
    }

    #[test]
    fn symmetric_examples() {
        let f3 = space(3, 1);
        let s = set(f3, &[&[0], &[1]]);
        assert_eq!(symmetric_subset(&s, &Limits::default()).unwrap(), s);

        let f2 = space(2, 1);
        let all = PointSet::full(f2, 4).unwrap();
        let out = symmetric_subset(&all, &Limits::default()).unwrap();
        assert!(out.len() <= 2);
        assert_eq!(sumset(&out, &all).unwrap(), sumset(&all, &all).unwrap());

        let single = set(space(5, 2), &[&[3, 4]]);
        assert_eq!(
            symmetric_subset(&single, &Limits::default()).unwrap(),
            single
        );
    }

    #[test]
    fn verify_examples() {
        let sp = space(3, 1);
        let s = set(sp, &[&[0], &[1]]);
        let t = set(sp, &[&[1], &[2]]);
        let e = PointSet::empty(sp);
        assert!(verify_decomposition(&s, &t, &s, &t).unwrap());
        assert!(!verify_decomposition(&s, &t, &e, &e).unwrap());
        // not a subset of S
        assert!(!verify_decomposition(&s, &t, &set(sp, &[&[2]]), &t).unwrap());
        let other = PointSet::empty(space(3, 2));
        assert!(verify_decomposition(&s, &t, &other, &e).is_err());
    }

    #[test]
    fn decompose_is_deterministic() {
        let sp = space(3, 2);
        let s = set(sp, &[&[0, 0], &[1, 2], &[2, 1], &[2, 2]]);
        let t = set(sp, &[&[0, 1], &[1, 1], &[2, 0]]);
        let a = decompose(&s, &t, None, &Limits::default()).unwrap();
        let b = decompose(&s, &t, None, &Limits::default()).unwrap();
        assert_eq!(a, b);
    }
}
