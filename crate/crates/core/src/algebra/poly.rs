use std::collections::BTreeMap;
use std::fmt;

use super::monomial::Monomial;
use super::scalar::{Field, Scalar};
use super::AlgebraError;

/// An element of the free algebra (with adjoined unity), stored sparsely.
///
/// No zero coefficient is ever stored, so structural equality is equality
/// of elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreePoly {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl FreePoly {
    pub fn zero(field: Field) -> FreePoly {
        FreePoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: Field) -> FreePoly {
        FreePoly::monomial(Monomial::unit(), field)
    }

    pub fn monomial(m: Monomial, field: Field) -> FreePoly {
        FreePoly::term(m, Scalar::one(field))
    }

    pub fn term(m: Monomial, c: Scalar) -> FreePoly {
        let field = c.field();
        let mut p = FreePoly::zero(field);
        p.add_term(m, c);
        p
    }

    /// `x_i`.
    pub fn letter(i: u64, field: Field) -> FreePoly {
        FreePoly::monomial(Monomial::letter(i), field)
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> FreePoly {
        let mut p = FreePoly::zero(field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Smallest monomial in canonical order.
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next()
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FreePoly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn add(&self, other: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one(self.field));
        out
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_i64(-1, self.field));
        out
    }

    pub fn neg(&self) -> FreePoly {
        self.scale(&Scalar::from_i64(-1, self.field))
    }

    pub fn scale(&self, c: &Scalar) -> FreePoly {
        if c.is_zero() {
            return FreePoly::zero(self.field);
        }
        FreePoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Bilinear extension of concatenation.
    pub fn mul(&self, other: &FreePoly) -> FreePoly {
        assert_eq!(self.field, other.field, "product across different fields");
        let mut out = FreePoly::zero(self.field);
        for (m1, a) in &self.terms {
            for (m2, b) in &other.terms {
                out.add_term(m1.concat(m2), a * b);
            }
        }
        out
    }

    pub fn mul_monomial_left(&self, u: &Monomial) -> FreePoly {
        FreePoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, a)| (u.concat(m), a.clone())).collect(),
        }
    }

    pub fn mul_monomial_right(&self, v: &Monomial) -> FreePoly {
        FreePoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, a)| (m.concat(v), a.clone())).collect(),
        }
    }

    /// `u * self * v` for monomials `u`, `v`.
    pub fn sandwich(&self, u: &Monomial, v: &Monomial) -> FreePoly {
        FreePoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (u.concat(m).concat(v), a.clone()))
                .collect(),
        }
    }

    /// The part of `self` made of monomials with the given length and degree.
    pub fn component(&self, length: usize, degree: u64) -> FreePoly {
        FreePoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.len() == length && m.degree() == degree)
                .map(|(m, a)| (m.clone(), a.clone()))
                .collect(),
        }
    }

    /// All `(length, degree)` pairs with a nonzero component, ascending.
    pub fn components(&self) -> Vec<(usize, u64)> {
        let mut v: Vec<_> = self.terms.keys().map(Monomial::stats).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The common `(length, degree)` if `self` is nonzero and bi-homogeneous.
    pub fn bidegree(&self) -> Option<(usize, u64)> {
        let c = self.components();
        (c.len() == 1).then(|| c[0])
    }

    /// `true` when no term is the bare unity, i.e. the element lies in the
    /// algebra without adjoined identity.
    pub fn is_proper(&self) -> bool {
        !self.terms.contains_key(&Monomial::unit())
    }

    /// The shift derivation `x_i -> x_{i+1}` extended by the Leibniz rule.
    pub fn derive(&self) -> FreePoly {
        let mut out = FreePoly::zero(self.field);
        for (m, a) in &self.terms {
            for idx in 0..m.len() {
                out.add_term(m.shifted_at(idx), a.clone());
            }
        }
        out
    }

    /// `D^l(self)`.
    pub fn derive_iter(&self, l: usize) -> FreePoly {
        let mut p = self.clone();
        for _ in 0..l {
            if p.is_zero() {
                break;
            }
            p = p.derive();
        }
        p
    }

    /// Applies `f` to each monomial and sums `coeff * f(m)`.
    pub fn map_linear(&self, mut f: impl FnMut(&Monomial) -> FreePoly) -> FreePoly {
        let mut out = FreePoly::zero(self.field);
        for (m, a) in &self.terms {
            out.add_scaled(&f(m), a);
        }
        out
    }

    /// Parses the text form `coeff*x<i>.x<j> + ...`; `0` is the zero polynomial.
    pub fn parse(s: &str, field: Field) -> Result<FreePoly, AlgebraError> {
        let s = s.trim();
        let mut p = FreePoly::zero(field);
        if s == "0" || s.is_empty() {
            return Ok(p);
        }
        for term in s.split(" + ") {
            let (c, m) = term
                .trim()
                .split_once('*')
                .ok_or_else(|| AlgebraError::Parse(format!("term `{term}` lacks `coeff*`")))?;
            let c = Scalar::parse(c, field)?;
            let m = Monomial::parse(m)?;
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m}")?;
        }
        Ok(())
    }
}

/// `sum coeffs[i] * polys[i]`.
pub fn poly_combine(coeffs: &[Scalar], polys: &[FreePoly]) -> Result<FreePoly, AlgebraError> {
    if coeffs.len() != polys.len() {
        return Err(AlgebraError::LengthMismatch {
            coeffs: coeffs.len(),
            polys: polys.len(),
        });
    }
    let field = polys
        .first()
        .map(FreePoly::field)
        .or_else(|| coeffs.first().map(Scalar::field))
        .unwrap_or(Field::Rationals);
    let mut out = FreePoly::zero(field);
    for (c, p) in coeffs.iter().zip(polys) {
        out.add_scaled(p, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn w(v: &[u64]) -> FreePoly {
        FreePoly::monomial(Monomial::new(v.to_vec()), Q)
    }

    fn int(n: i64) -> Scalar {
        Scalar::from_i64(n, Q)
    }

    #[test]
    fn combine() {
        let x0 = w(&[0]);
        assert!(poly_combine(&[int(1), int(-1)], &[x0.clone(), x0.clone()])
            .unwrap()
            .is_zero());
        assert_eq!(
            poly_combine(&[int(2)], &[w(&[0, 1])]).unwrap(),
            w(&[0, 1]).scale(&int(2))
        );
        assert_eq!(
            poly_combine(&[int(1), int(1)], &[w(&[0]), w(&[1])]).unwrap(),
            w(&[0]).add(&w(&[1]))
        );
        assert!(matches!(
            poly_combine(&[int(1)], &[]),
            Err(AlgebraError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn products() {
        let a = w(&[0]).add(&w(&[1]));
        assert_eq!(a.mul(&w(&[0])), w(&[0, 0]).add(&w(&[1, 0])));
        assert_eq!(a.mul(&FreePoly::one(Q)), a);
        assert_eq!(w(&[0, 1]).mul(&w(&[2])), w(&[0, 1, 2]));
    }

    #[test]
    fn bigraded_components() {
        let a = w(&[0, 1]).add(&w(&[2])).add(&w(&[0, 0]));
        assert_eq!(a.component(2, 1), w(&[0, 1]));
        assert_eq!(a.component(1, 2), w(&[2]));
        assert!(w(&[0]).component(3, 0).is_zero());
    }

    #[test]
    fn derivation_examples() {
        assert_eq!(w(&[0]).derive(), w(&[1]));
        assert_eq!(w(&[0, 1]).derive(), w(&[1, 1]).add(&w(&[0, 2])));
        assert!(FreePoly::zero(Q).derive().is_zero());
        assert_eq!(w(&[0]).derive_iter(2), w(&[2]));
        assert_eq!(w(&[0, 0]).derive_iter(1), w(&[1, 0]).add(&w(&[0, 1])));
        let expected = w(&[2, 0]).add(&w(&[1, 1]).scale(&int(2))).add(&w(&[0, 2]));
        assert_eq!(w(&[0, 0]).derive_iter(2), expected);
        assert_eq!(w(&[3, 1]).derive_iter(0), w(&[3, 1]));
    }

    #[test]
    fn middle_coefficient_vanishes_in_characteristic_two() {
        let f = Field::Prime(2);
        let x00 = FreePoly::monomial(Monomial::new(vec![0, 0]), f);
        let d2 = x00.derive_iter(2);
        assert_eq!(d2.num_terms(), 2);
        assert!(d2.coeff(&Monomial::new(vec![1, 1])).is_zero());
    }

    #[test]
    fn text_form() {
        let p = w(&[0, 1]).add(&w(&[2]).scale(&Scalar::parse("-2/3", Q).unwrap()));
        assert_eq!(p.to_string(), "-2/3*x2 + 1*x0.x1");
        assert_eq!(FreePoly::parse(&p.to_string(), Q).unwrap(), p);
        assert_eq!(FreePoly::zero(Q).to_string(), "0");
        assert_eq!(FreePoly::one(Q).to_string(), "1*1");
        assert!(FreePoly::parse("x0", Q).is_err());
    }

    #[test]
    fn proper_flag() {
        assert!(w(&[0]).is_proper());
        assert!(!FreePoly::one(Q).add(&w(&[0])).is_proper());
    }
}
