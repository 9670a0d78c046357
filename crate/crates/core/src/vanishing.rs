//! Reduced polynomials over `F_q` and the space of those vanishing off a sumset.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{complement, sumset, FieldVector, PointSet, PrimeField, Space};
use crate::matrix::Matrix;
use crate::monomial::{enumerate_monomials, Monomial};

/// A polynomial in `n` variables with every exponent at most `q - 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: PrimeField,
    n: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl Polynomial {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        Polynomial {
            field,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, n: usize, c: u32) -> Self {
        let mut p = Polynomial::zero(field, n);
        p.add_term(Monomial::one(n), c);
        p
    }

    /// Sums the given terms; rejects monomials that are not reduced or have the wrong arity.
    pub fn from_terms<I>(field: PrimeField, n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut p = Polynomial::zero(field, n);
        for (m, c) in terms {
            if m.n() != n {
                return Err(Error::mismatch((field.q(), n), (field.q(), m.n())));
            }
            if m.max_exponent() >= field.q() {
                return Err(Error::Validation(format!(
                    "monomial {m} is not reduced for q = {}",
                    field.q()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: u32) {
        let f = self.field;
        let c = f.reduce(c as u64);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: &FieldVector) -> Result<u32> {
        if x.len() != self.n {
            return Err(Error::mismatch(
                (self.field.q(), self.n),
                (self.field.q(), x.len()),
            ));
        }
        Ok(self.eval_unchecked(x.coords()))
    }

    pub(crate) fn eval_unchecked(&self, x: &[u32]) -> u32 {
        let f = self.field;
        self.terms.iter().fold(0, |acc, (m, &c)| {
            f.add(acc, f.mul(c, eval_monomial(f, m, x)))
        })
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, k: u32, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), self.field.mul(k, c));
        }
        out
    }
}

pub(crate) fn eval_monomial(f: PrimeField, m: &Monomial, x: &[u32]) -> u32 {
    m.exponents()
        .iter()
        .zip(x)
        .fold(1 % f.q(), |acc, (&e, &xi)| f.mul(acc, f.pow(xi, e as u64)))
}

/// `P(x)`.
pub fn eval_poly(p: &Polynomial, x: &FieldVector) -> Result<u32> {
    p.eval(x)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (*c, m.total_degree()) {
                (c, 0) => write!(f, "{c}")?,
                (1, _) => write!(f, "{m}")?,
                (c, _) => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}; {}]", self.field, self)
    }
}

/// The space of reduced polynomials of total degree at most `d` that vanish on the
/// complement of a sumset, held as a canonical (row-reduced) basis.
#[derive(Clone, Debug)]
pub struct PolySubspace {
    space: Space,
    d: usize,
    monomials: Vec<Monomial>,
    basis: Vec<Polynomial>,
    complement: PointSet,
    sumset_size: usize,
}

impl PolySubspace {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `m_d`, the dimension of the ambient space of reduced polynomials of degree at most `d`.
    pub fn ambient_dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// The points every basis element vanishes on.
    pub fn complement(&self) -> &PointSet {
        &self.complement
    }

    pub fn sumset_size(&self) -> usize {
        self.sumset_size
    }

    /// `m_d - q^n + |S+T|`, which `dim` is never below.
    pub fn dim_lower_bound(&self) -> i64 {
        // q^n = |complement| + |S+T|
        self.monomials.len() as i64 - self.complement.len() as i64
    }

    /// Coefficient vector of a basis element in monomial order.
    pub fn coefficients(&self, index: usize) -> Vec<u32> {
        self.monomials
            .iter()
            .map(|m| self.basis[index].coefficient(m))
            .collect()
    }
}

/// Builds the vanishing space for `S + T` at degree `d`.
pub fn build_vanishing_space(
    s: &PointSet,
    t: &PointSet,
    d: usize,
    enumeration_cap: u64,
) -> Result<PolySubspace> {
    let sums = sumset(s, t)?;
    vanishing_space_of(&sums, d, enumeration_cap)
}

/// Same as [`build_vanishing_space`] with the sumset already computed.
pub fn vanishing_space_of(sums: &PointSet, d: usize, enumeration_cap: u64) -> Result<PolySubspace> {
    let space = sums.space();
    let f = space.field();
    space.require_enumerable(enumeration_cap)?;
    let outside = complement(sums, enumeration_cap)?;
    let monomials = enumerate_monomials(f.q(), space.n(), d, enumeration_cap)?;

    // one row per point off the sumset, one column per monomial
    let points: Vec<&FieldVector> = outside.iter().collect();
    let evaluation = Matrix::from_fn(f, points.len(), monomials.len(), |i, j| {
        eval_monomial(f, &monomials[j], points[i].coords())
    });
    let basis = evaluation
        .null_space()
        .into_iter()
        .map(|coeffs| {
            let mut p = Polynomial::zero(f, space.n());
            for (m, c) in monomials.iter().zip(coeffs) {
                p.add_term(m.clone(), c);
            }
            p
        })
        .collect();

    Ok(PolySubspace {
        space,
        d,
        monomials,
        basis,
        complement: outside,
        sumset_size: sums.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::monomial::count_m;
    use num_traits::ToPrimitive;

    fn space(q: u64, n: usize) -> Space {
        Space::new(make_field(q).unwrap(), n)
    }

    #[test]
    fn evaluation_examples() {
        let f3 = make_field(3).unwrap();
        let one = Polynomial::constant(f3, 2, 1);
        for x in space(3, 2).points(100).unwrap() {
            assert_eq!(eval_poly(&one, &x).unwrap(), 1);
        }

        let x_sq = Polynomial::from_terms(f3, 1, [(Monomial::new(vec![2]), 1)]).unwrap();
        assert_eq!(
            eval_poly(&x_sq, &space(3, 1).vector(vec![2]).unwrap()).unwrap(),
            1
        );

        // x1 x2 + 2 x1 at (1, 2) = 2 + 2 = 4 = 1 mod 3
        let p = Polynomial::from_terms(
            f3,
            2,
            [
                (Monomial::new(vec![1, 1]), 1),
                (Monomial::new(vec![1, 0]), 2),
            ],
        )
        .unwrap();
        assert_eq!(
            eval_poly(&p, &space(3, 2).vector(vec![1, 2]).unwrap()).unwrap(),
            1
        );

        assert!(matches!(
            eval_poly(&p, &space(3, 1).vector(vec![1]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unreduced_monomials_rejected() {
        let f3 = make_field(3).unwrap();
        assert!(Polynomial::from_terms(f3, 1, [(Monomial::new(vec![3]), 1)]).is_err());
    }

    #[test]
    fn zero_coefficients_dropped() {
        let f3 = make_field(3).unwrap();
        let p = Polynomial::from_terms(
            f3,
            1,
            [(Monomial::new(vec![1]), 1), (Monomial::new(vec![1]), 2)],
        )
        .unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn full_sumset_gives_all_monomials() {
        let sp = space(3, 2);
        let all = PointSet::full(sp, 100).unwrap();
        let zero = PointSet::from_coords(sp, [[0, 0]]).unwrap();
        for d in 0..=4 {
            let v = build_vanishing_space(&all, &zero, d, 100).unwrap();
            assert_eq!(v.dim(), count_m(3, 2, d).to_usize().unwrap());
            assert_eq!(v.dim(), v.ambient_dim());
        }
    }

    #[test]
    fn one_dimensional_binary_example() {
        // S + T = {0}, so V is spanned by 1 + x, which vanishes at x = 1.
        let sp = space(2, 1);
        let s = PointSet::from_coords(sp, [[0]]).unwrap();
        let v = build_vanishing_space(&s, &s, 1, 100).unwrap();
        assert_eq!(v.dim(), 1);
        assert_eq!(v.dim_lower_bound(), 1);
        let f2 = sp.field();
        let expected = Polynomial::from_terms(
            f2,
            1,
            [(Monomial::new(vec![0]), 1), (Monomial::new(vec![1]), 1)],
        )
        .unwrap();
        assert_eq!(v.basis()[0], expected);
    }

    #[test]
    fn reduced_monomials_separate_points() {
        // No nonzero reduced polynomial vanishes on all of F_q^n.
        for (q, n) in [(2u64, 3usize), (3, 2), (5, 1), (3, 3)] {
            let sp = space(q, n);
            let f = sp.field();
            let monomials = enumerate_monomials(f.q(), n, (q as usize - 1) * n, 1000).unwrap();
            let points: Vec<_> = sp.points(1000).unwrap().collect();
            let m = Matrix::from_fn(f, points.len(), monomials.len(), |i, j| {
                eval_monomial(f, &monomials[j], points[i].coords())
            });
            assert!(m.null_space().is_empty(), "q={q} n={n}");
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let sp = space(3, 3);
        let s = PointSet::from_coords(sp, [[0, 0, 0]]).unwrap();
        assert!(build_vanishing_space(&s, &s, 2, 26)
            .unwrap_err()
            .is_cap_refusal());
    }
}
