//! Reduced monomials and exact counts of them.
//!
//! A reduced monomial in `n` variables over `F_q` has every exponent in `[0, q-1]`.
//! `m_d` is the number of reduced monomials of total degree at most `d`. Counts come
//! from the coefficients of `(1 + x + ... + x^{q-1})^n`, kept as big integers so that
//! `n` in the hundreds is routine.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
    total_degree: usize,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        let total_degree = exponents.iter().map(|&e| e as usize).sum();
        Monomial {
            exponents,
            total_degree,
        }
    }

    pub fn one(n: usize) -> Self {
        Monomial::new(vec![0; n])
    }

    /// `x_var^power`.
    pub fn var_power(n: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; n];
        e[var] = power;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn max_exponent(&self) -> u32 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }
}

/// Graded order: lower total degree first, then lexicographically larger exponent
/// tuples first, so `1, x1, x2, x1^2, x1 x2, x2^2, ...`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree
            .cmp(&other.total_degree)
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total_degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// Number of reduced monomials of each exact total degree `0..=(q-1)n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    q: u32,
    n: usize,
    counts: Vec<BigUint>,
    cumulative: Vec<BigUint>,
}

impl CountTable {
    pub fn new(q: u32, n: usize) -> Self {
        assert!(q >= 2, "per-variable cap needs q >= 2");
        let mut table = CountTable::from_counts(q, 0, vec![BigUint::one()]);
        for _ in 0..n {
            table = table.next();
        }
        table
    }

    fn from_counts(q: u32, n: usize, counts: Vec<BigUint>) -> Self {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = BigUint::zero();
        for c in &counts {
            acc += c;
            cumulative.push(acc.clone());
        }
        CountTable {
            q,
            n,
            counts,
            cumulative,
        }
    }

    /// The table for `n + 1` variables: one more convolution with `(1, ..., 1)` of length `q`.
    pub fn next(&self) -> CountTable {
        let width = self.q as usize;
        let len = self.counts.len() + width - 1;
        let mut out = Vec::with_capacity(len);
        // sliding window sum of the previous row
        let mut window = BigUint::zero();
        for e in 0..len {
            if let Some(c) = self.counts.get(e) {
                window += c;
            }
            if e >= width {
                window -= &self.counts[e - width];
            }
            out.push(window.clone());
        }
        CountTable::from_counts(self.q, self.n + 1, out)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(q-1) n`.
    pub fn max_degree(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// `m_d`; degrees past `(q-1)n` clamp to `q^n`.
    pub fn m(&self, d: usize) -> &BigUint {
        &self.cumulative[d.min(self.max_degree())]
    }

    /// `m_d` as a machine integer, when it fits.
    pub fn m_u64(&self, d: usize) -> Option<u64> {
        self.m(d).to_u64()
    }

    /// `q^n`.
    pub fn total(&self) -> &BigUint {
        self.cumulative.last().expect("count table is never empty")
    }
}

/// `m_d` for reduced monomials in `n` variables with per-variable cap `q - 1`.
pub fn count_m(q: u32, n: usize, d: usize) -> BigUint {
    CountTable::new(q, n).m(d).clone()
}

/// The cap-set bound `M(F_q^n) = 3 m_{floor((q-1)n/3)}`.
pub fn capset_bound_m(q: u32, n: usize) -> BigUint {
    capset_bound_from_table(&CountTable::new(q, n))
}

pub fn capset_bound_from_table(table: &CountTable) -> BigUint {
    let index = (table.q() as usize - 1) * table.n() / 3;
    table.m(index) * 3u32
}

/// All reduced monomials of total degree at most `d`, in graded order.
///
/// Refuses when `m_d` exceeds `cap`.
pub fn enumerate_monomials(q: u32, n: usize, d: usize, cap: u64) -> Result<Vec<Monomial>> {
    let table = CountTable::new(q, n);
    let count = table.m(d);
    match count.to_u64() {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::EnumerationTooLarge {
                what: "monomials",
                required: count.to_string(),
                cap,
            })
        }
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut current = vec![0u32; n];
    fill_monomials(q - 1, d, 0, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn fill_monomials(
    cap: u32,
    budget: usize,
    var: usize,
    current: &mut [u32],
    out: &mut Vec<Monomial>,
) {
    if var == current.len() {
        out.push(Monomial::new(current.to_vec()));
        return;
    }
    let top = (cap as usize).min(budget) as u32;
    for e in 0..=top {
        current[var] = e;
        fill_monomials(cap, budget - e as usize, var + 1, current, out);
    }
    current[var] = 0;
}

/// One entry of the growth sequence `M(F_q^n)^{1/n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthPoint {
    pub n: usize,
    pub bound: BigUint,
    /// `M^{1/n}` truncated (not rounded) to [`GROWTH_DIGITS`] decimal places, computed exactly.
    pub root_decimal: String,
    pub root: f64,
}

pub const GROWTH_DIGITS: u32 = 15;

/// `M(F_q^n)^{1/n}` for `n = 1..=n_max`.
pub fn growth_estimate(q: u32, n_max: usize) -> Vec<GrowthPoint> {
    let mut out = Vec::with_capacity(n_max);
    let mut table = CountTable::new(q, 0);
    for n in 1..=n_max {
        table = table.next();
        let bound = capset_bound_from_table(&table);
        out.push(GrowthPoint {
            n,
            root_decimal: truncated_root_decimal(&bound, n as u32, GROWTH_DIGITS),
            root: (big_ln(&bound) / n as f64).exp(),
            bound,
        });
    }
    out
}

/// `floor(x^{1/k} * 10^digits)` rendered as a decimal with `digits` places.
pub fn truncated_root_decimal(x: &BigUint, k: u32, digits: u32) -> String {
    let scale = BigUint::from(10u32).pow(digits * k);
    let scaled = (x * scale).nth_root(k);
    let s = scaled.to_string();
    let digits = digits as usize;
    if s.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - s.len()), s)
    } else {
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{int}.{frac}")
    }
}

/// `x^{1/k} < num/den`, decided exactly as `x * den^k < num^k`.
pub fn root_below(x: &BigUint, k: u32, num: u32, den: u32) -> bool {
    x * BigUint::from(den).pow(k) < BigUint::from(num).pow(k)
}

/// `a^{1/k} >= b^{1/(k+1)}`, decided exactly as `a^{k+1} >= b^k`.
pub fn root_not_increasing(a: &BigUint, k: u32, b: &BigUint) -> bool {
    a.pow(k + 1) >= b.pow(k)
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
