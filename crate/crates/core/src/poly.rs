//! Sparse bivariate polynomials over arbitrary-precision integers.
//!
//! The counting machinery extracts coefficients from products of the form
//! `prod_i (1 + x z^i)^(c_i)`, where the first variable marks node counts
//! and the second marks edge counts. Terms are stored sparsely; zero
//! coefficients are never kept.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Sparse polynomial in two variables with `BigInt` coefficients.
///
/// Exponent pairs are `(a, b)` for `x^a z^b`. The variable names are
/// positional; callers decide what each axis marks.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparsePoly2 {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl SparsePoly2 {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::monomial(0, 0, BigInt::one())
    }

    /// `c * x^a z^b`.
    pub fn monomial(a: u32, b: u32, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((a, b), coeff);
        }
        Self { terms }
    }

    /// `1 + x z^i`, the generating factor for one node of degree `i`.
    pub fn one_plus_node_of_degree(i: u32) -> Self {
        let mut p = Self::one();
        p.add_term(1, i, BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Exact coefficient of `x^a z^b`; zero when the term is absent.
    pub fn coef(&self, a: u32, b: u32) -> BigInt {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterate stored terms as `((a, b), coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    /// Add `c * x^a z^b` in place.
    pub fn add_term(&mut self, a: u32, b: u32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((a, b)) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Exact `self^exp` via binary exponentiation.
    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Largest `a` with a nonzero `x^a z^b` term, or `None` if zero.
    pub fn max_x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, _)| a).max()
    }

    /// Largest `b` with a nonzero `x^a z^b` term, or `None` if zero.
    pub fn max_z_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, b)| b).max()
    }

    /// Sum of coefficients of all `x^a z^b` terms with the given `a`
    /// (the `z = 1` evaluation of that `x`-slice).
    pub fn x_slice_total(&self, a: u32) -> BigInt {
        self.terms
            .iter()
            .filter(|&(&(ta, _), _)| ta == a)
            .map(|(_, c)| c)
            .sum()
    }
}

impl Add for &SparsePoly2 {
    type Output = SparsePoly2;

    fn add(self, rhs: &SparsePoly2) -> SparsePoly2 {
        let mut out = self.clone();
        for (&(a, b), c) in rhs.terms.iter() {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Mul for &SparsePoly2 {
    type Output = SparsePoly2;

    fn mul(self, rhs: &SparsePoly2) -> SparsePoly2 {
        let mut out = SparsePoly2::zero();
        for (&(a1, b1), c1) in self.terms.iter() {
            for (&(a2, b2), c2) in rhs.terms.iter() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xz() -> SparsePoly2 {
        SparsePoly2::one_plus_node_of_degree(1)
    }

    #[test]
    fn binomial_square() {
        // (1 + xz)^2 = 1 + 2xz + x^2 z^2
        let sq = &xz() * &xz();
        assert_eq!(sq.coef(0, 0), BigInt::from(1));
        assert_eq!(sq.coef(1, 1), BigInt::from(2));
        assert_eq!(sq.coef(2, 2), BigInt::from(1));
        assert_eq!(sq.term_count(), 3);
    }

    #[test]
    fn multiplicative_identity() {
        let f = &(&xz() * &xz()) + &SparsePoly2::monomial(3, 1, BigInt::from(-5));
        assert_eq!(&f * &SparsePoly2::one(), f);
    }

    #[test]
    fn cube_binomial_coefficients() {
        let cube = xz().pow(3);
        for (j, expect) in [(0u32, 1i64), (1, 3), (2, 3), (3, 1)] {
            assert_eq!(cube.coef(j, j), BigInt::from(expect));
        }
        assert_eq!(cube.coef(1, 2), BigInt::from(0));
    }

    #[test]
    fn pow_zero_is_one() {
        let f = &xz() * &SparsePoly2::one_plus_node_of_degree(2);
        assert_eq!(f.pow(0), SparsePoly2::one());
        assert_eq!(SparsePoly2::zero().pow(0), SparsePoly2::one());
    }

    #[test]
    fn degree_two_square() {
        // (1 + xz^2)^2 = 1 + 2xz^2 + x^2 z^4
        let f = SparsePoly2::one_plus_node_of_degree(2).pow(2);
        assert_eq!(f.coef(1, 2), BigInt::from(2));
        assert_eq!(f.coef(2, 4), BigInt::from(1));
        assert_eq!(f.coef(1, 1), BigInt::from(0));
    }

    #[test]
    fn mixed_product_coefficients() {
        // (1+xz)^2 (1+xz^2): x^1 z^2 appears once, x^1 z^1 twice
        let f = &xz().pow(2) * &SparsePoly2::one_plus_node_of_degree(2);
        assert_eq!(f.coef(1, 2), BigInt::from(1));
        assert_eq!(f.coef(1, 1), BigInt::from(2));
    }

    #[test]
    fn coef_beyond_degree_is_zero() {
        let f = xz().pow(4);
        assert_eq!(f.max_x_degree(), Some(4));
        assert_eq!(f.coef(5, 5), BigInt::from(0));
        assert_eq!(f.coef(0, 9), BigInt::from(0));
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let mut f = SparsePoly2::monomial(2, 3, BigInt::from(7));
        f.add_term(2, 3, BigInt::from(-7));
        assert!(f.is_zero());
    }
}
