//! Sum matrices `(P(s+t))` and the low-rank certificate coming from splitting
//! `P(x+y)` into products with one low-degree factor.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField, Space};
use crate::matrix::Matrix;
use crate::monomial::Monomial;
use crate::vanishing::Polynomial;

pub use crate::matrix::matrix_rank;

/// The `|S| x |T|` matrix with entry `P(s + t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumMatrix {
    rows: Vec<FieldVector>,
    cols: Vec<FieldVector>,
    entries: Matrix,
    source: Polynomial,
}

impl SumMatrix {
    pub fn rows(&self) -> &[FieldVector] {
        &self.rows
    }

    pub fn cols(&self) -> &[FieldVector] {
        &self.cols
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }

    pub fn source(&self) -> &Polynomial {
        &self.source
    }

    pub fn rank(&self) -> usize {
        self.entries.rank()
    }

    /// Whether entries agree at every pair of positions with the same sum `s + t`.
    pub fn constant_on_equal_sums(&self) -> bool {
        let space = Space::new(self.source.field(), self.source.n());
        let mut seen: BTreeMap<FieldVector, u32> = BTreeMap::new();
        for (i, s) in self.rows.iter().enumerate() {
            for (j, t) in self.cols.iter().enumerate() {
                let v = self.entries.get(i, j);
                if *seen.entry(space.add_unchecked(s, t)).or_insert(v) != v {
                    return false;
                }
            }
        }
        true
    }
}

/// Evaluates `P` on every `s + t`, rows and columns in the given order.
pub fn sum_matrix(p: &Polynomial, rows: &[FieldVector], cols: &[FieldVector]) -> Result<SumMatrix> {
    let space = Space::new(p.field(), p.n());
    for v in rows.iter().chain(cols) {
        space.check(v)?;
    }
    // entries depend only on s + t
    let mut cache: BTreeMap<FieldVector, u32> = BTreeMap::new();
    let mut entries = Matrix::zeros(p.field(), rows.len(), cols.len());
    for (i, s) in rows.iter().enumerate() {
        for (j, t) in cols.iter().enumerate() {
            let sum = space.add_unchecked(s, t);
            let v = *cache
                .entry(sum)
                .or_insert_with_key(|k| p.eval_unchecked(k.coords()));
            entries.set(i, j, v);
        }
    }
    Ok(SumMatrix {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        entries,
        source: p.clone(),
    })
}

/// A decomposition `P(x + y) = sum_k f_k(x) g_k(y)` where every left pair has
/// `deg f_k <= floor(d/2)` and every right pair has `deg g_k <= floor(d/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClpCertificate {
    pub d: usize,
    pub half: usize,
    /// `(x^a, g_a(y))` with `|a| <= half`.
    pub left_factors: Vec<(Polynomial, Polynomial)>,
    /// `(f_b(x), y^b)` with `|b| <= half`.
    pub right_factors: Vec<(Polynomial, Polynomial)>,
}

impl ClpCertificate {
    pub fn term_count(&self) -> usize {
        self.left_factors.len() + self.right_factors.len()
    }

    /// `sum_k f_k(s) g_k(t)` over the given rows and columns.
    pub fn reconstruct(
        &self,
        field: PrimeField,
        rows: &[FieldVector],
        cols: &[FieldVector],
    ) -> Matrix {
        let mut out = Matrix::zeros(field, rows.len(), cols.len());
        for (f, g) in self.left_factors.iter().chain(&self.right_factors) {
            let fs: Vec<u32> = rows.iter().map(|s| f.eval_unchecked(s.coords())).collect();
            let gt: Vec<u32> = cols.iter().map(|t| g.eval_unchecked(t.coords())).collect();
            for (i, &a) in fs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in gt.iter().enumerate() {
                    let v = field.add(out.get(i, j), field.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Splits `P(x + y)` at degree `floor(d/2)`.
///
/// Each term `x^a y^b` of the expansion has `|a| + |b| <= d`, so `|a| <= floor(d/2)` or
/// `|b| <= floor(d/2)`. Terms of the first kind are grouped by `a`, the rest by `b`,
/// which gives at most `m_{floor(d/2)}` products on each side.
pub fn clp_decompose(p: &Polynomial, d: usize) -> Result<ClpCertificate> {
    let f = p.field();
    let n = p.n();
    if let Some(deg) = p.degree() {
        if deg > d {
            return Err(Error::DegreeTooHigh {
                degree: deg,
                limit: d,
            });
        }
    }
    let half = d / 2;

    let mut expansion: BTreeMap<(Monomial, Monomial), u32> = BTreeMap::new();
    for (m, &c) in p.terms() {
        for (a, b, binom) in binomial_splits(f, m.exponents()) {
            let coef = f.mul(c, binom);
            let slot = expansion
                .entry((Monomial::new(a), Monomial::new(b)))
                .or_insert(0);
            *slot = f.add(*slot, coef);
        }
    }

    let mut left: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    let mut right: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for ((a, b), coef) in expansion {
        if coef == 0 {
            continue;
        }
        if a.total_degree() <= half {
            left.entry(a)
                .or_insert_with(|| Polynomial::zero(f, n))
                .add_term(b, coef);
        } else {
            debug_assert!(b.total_degree() <= half);
            right
                .entry(b)
                .or_insert_with(|| Polynomial::zero(f, n))
                .add_term(a, coef);
        }
    }

    let monomial_poly = |m: Monomial| {
        let mut q = Polynomial::zero(f, n);
        q.add_term(m, 1);
        q
    };
    Ok(ClpCertificate {
        d,
        half,
        left_factors: left
            .into_iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(a, g)| (monomial_poly(a), g))
            .collect(),
        right_factors: right
            .into_iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(b, g)| (g, monomial_poly(b)))
            .collect(),
    })
}

/// All `(a, b, prod_i C(e_i, a_i))` with `a + b = e`, binomials reduced mod `q`.
fn binomial_splits(f: PrimeField, e: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, u32)> {
    let mut out = vec![(
        Vec::with_capacity(e.len()),
        Vec::with_capacity(e.len()),
        1 % f.q(),
    )];
    for &ei in e {
        let row = binomial_row(f, ei);
        let mut next = Vec::with_capacity(out.len() * (ei as usize + 1));
        for (a, b, c) in &out {
            for (ai, &binom) in row.iter().enumerate() {
                if binom == 0 {
                    continue;
                }
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.push(ai as u32);
                b2.push(ei - ai as u32);
                next.push((a2, b2, f.mul(*c, binom)));
            }
        }
        out = next;
    }
    out
}

/// `C(e, k) mod q` for `k = 0..=e`, valid for `e < q`.
fn binomial_row(f: PrimeField, e: u32) -> Vec<u32> {
    let mut row = Vec::with_capacity(e as usize + 1);
    let mut c = 1 % f.q();
    row.push(c);
    for k in 1..=e {
        let num = f.reduce((e - k + 1) as u64);
        let inv = f.inv(f.reduce(k as u64)).expect("k < q is invertible");
        c = f.mul(f.mul(c, num), inv);
        row.push(c);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn line(q: u64) -> (PrimeField, Vec<FieldVector>) {
        let f = make_field(q).unwrap();
        let sp = Space::new(f, 1);
        (f, sp.points(1000).unwrap().collect())
    }

    fn x_pow(f: PrimeField, n: usize, var: usize, e: u32) -> Polynomial {
        Polynomial::from_terms(f, n, [(Monomial::var_power(n, var, e), 1)]).unwrap()
    }

    #[test]
    fn constant_gives_all_ones() {
        let (f, pts) = line(3);
        let m = sum_matrix(&Polynomial::constant(f, 1, 1), &pts, &pts).unwrap();
        assert!(m.entries().as_slice().iter().all(|&x| x == 1));
        assert_eq!(matrix_rank(m.entries()), 1);
    }

    #[test]
    fn zero_polynomial_gives_zero_matrix() {
        let (f, pts) = line(5);
        let m = sum_matrix(&Polynomial::zero(f, 1), &pts, &pts).unwrap();
        assert!(m.entries().is_zero());
    }

    #[test]
    fn x_squared_over_f3() {
        let (f, pts) = line(3);
        let p = x_pow(f, 1, 0, 2);
        let m = sum_matrix(&p, &pts, &pts).unwrap();
        assert_eq!(
            m.entries().to_rows(),
            vec![vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1]]
        );
        assert_eq!(m.rank(), 3);
        assert!(m.constant_on_equal_sums());

        let cert = clp_decompose(&p, 2).unwrap();
        // (x+y)^2 = x^2 * 1 + x * 2y + 1 * y^2
        assert_eq!(cert.term_count(), 3);
        assert_eq!(cert.left_factors.len(), 2);
        assert_eq!(cert.right_factors.len(), 1);
        let (fx, gy) = &cert.right_factors[0];
        assert_eq!(fx, &p);
        assert_eq!(gy, &Polynomial::constant(f, 1, 1));
        let left: Vec<_> = cert
            .left_factors
            .iter()
            .map(|(a, g)| (a.to_string(), g.to_string()))
            .collect();
        assert!(left.contains(&("1".into(), "x1^2".into())));
        assert!(left.contains(&("x1".into(), "2*x1".into())));
        assert_eq!(cert.reconstruct(f, &pts, &pts), *m.entries());
    }

    #[test]
    fn constant_certificate() {
        let f = make_field(5).unwrap();
        let p = Polynomial::constant(f, 2, 3);
        let cert = clp_decompose(&p, 0).unwrap();
        assert_eq!(cert.term_count(), 1);
        assert_eq!(cert.left_factors[0].0, Polynomial::constant(f, 2, 1));
        assert_eq!(cert.left_factors[0].1, p);
    }

    #[test]
    fn degree_too_high() {
        let f = make_field(3).unwrap();
        let p = x_pow(f, 1, 0, 2);
        assert_eq!(
            clp_decompose(&p, 1),
            Err(Error::DegreeTooHigh {
                degree: 2,
                limit: 1
            })
        );
    }

    #[test]
    fn binomials_mod_q() {
        let f = make_field(7).unwrap();
        assert_eq!(binomial_row(f, 6), vec![1, 6, 15 % 7, 20 % 7, 15 % 7, 6, 1]);
        let f2 = make_field(2).unwrap();
        assert_eq!(binomial_row(f2, 1), vec![1, 1]);
    }

    #[test]
    fn reconstruction_on_dense_polynomials() {
        // every reduced monomial of degree <= 4 in two variables over F_5
        let f = make_field(5).unwrap();
        let sp = Space::new(f, 2);
        let pts: Vec<_> = sp.points(100).unwrap().collect();
        let monos = crate::monomial::enumerate_monomials(5, 2, 4, 100).unwrap();
        let p = Polynomial::from_terms(
            f,
            2,
            monos
                .into_iter()
                .enumerate()
                .map(|(i, m)| (m, (i as u32 % 4) + 1)),
        )
        .unwrap();
        for d in 4..=6 {
            let cert = clp_decompose(&p, d).unwrap();
            let m = sum_matrix(&p, &pts, &pts).unwrap();
            assert_eq!(cert.reconstruct(f, &pts, &pts), *m.entries());
            let bound = crate::monomial::count_m(5, 2, d / 2) * 2u32;
            assert!(num_bigint::BigUint::from(cert.term_count()) <= bound);
            assert!(m.rank() <= cert.term_count());
        }
    }
}
