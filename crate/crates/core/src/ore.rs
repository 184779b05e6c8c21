//! Differential polynomial rings `R[X; D]`: `X^i X^j = X^{i+j}` and
//! `X a = a X + D(a)`.
//!
//! Coefficients come from any [`DifferentialAlgebra`]; the free algebra with
//! the shift derivation is [`ShiftAlgebra`], and the matrix algebras of the
//! `series` module plug in the same way.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, FreePoly, Monomial, Scalar};

/// Full expansions of `(x_0 X)^m` above this `m` are refused by default.
pub const DEFAULT_EXPANSION_BUDGET: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("full expansion of (x0 X)^{m} exceeds the budget m <= {budget}; use a windowed expansion")]
    BudgetExceeded { m: u64, budget: u64 },
    #[error("window floor {floor} exceeds the power {m}")]
    WindowAboveDegree { m: u64, floor: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// An associative algebra with a derivation, as used for Ore coefficients.
pub trait DifferentialAlgebra {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn field(&self) -> Field;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Scalar) -> Self::Elem;
    fn derive(&self, a: &Self::Elem) -> Self::Elem;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.scale(a, &Scalar::from_i64(-1, self.field()))
    }
}

/// The free algebra (with unity adjoined) and `D(x_i) = x_{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftAlgebra {
    pub field: Field,
}

impl ShiftAlgebra {
    pub fn new(field: Field) -> Self {
        ShiftAlgebra { field }
    }
}

impl DifferentialAlgebra for ShiftAlgebra {
    type Elem = FreePoly;

    fn field(&self) -> Field {
        self.field
    }
    fn zero(&self) -> FreePoly {
        FreePoly::zero(self.field)
    }
    fn one(&self) -> FreePoly {
        FreePoly::one(self.field)
    }
    fn is_zero(&self, a: &FreePoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FreePoly, b: &FreePoly) -> FreePoly {
        a.add(b)
    }
    fn mul(&self, a: &FreePoly, b: &FreePoly) -> FreePoly {
        a.mul(b)
    }
    fn scale(&self, a: &FreePoly, c: &Scalar) -> FreePoly {
        a.scale(c)
    }
    fn derive(&self, a: &FreePoly) -> FreePoly {
        a.derive()
    }
}

/// `sum_t a_t X^t`, sparse in the exponent, no zero coefficient stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrePoly<E> {
    coeffs: BTreeMap<u64, E>,
}

impl<E: Clone> OrePoly<E> {
    pub fn zero() -> Self {
        OrePoly {
            coeffs: BTreeMap::new(),
        }
    }

    /// `a X^t`.
    pub fn term<A: DifferentialAlgebra<Elem = E>>(alg: &A, a: E, t: u64) -> Self {
        let mut p = OrePoly::zero();
        p.add_term(alg, t, a);
        p
    }

    pub fn constant<A: DifferentialAlgebra<Elem = E>>(alg: &A, a: E) -> Self {
        OrePoly::term(alg, a, 0)
    }

    pub fn one<A: DifferentialAlgebra<Elem = E>>(alg: &A) -> Self {
        OrePoly::constant(alg, alg.one())
    }

    /// `X`.
    pub fn x<A: DifferentialAlgebra<Elem = E>>(alg: &A) -> Self {
        OrePoly::term(alg, alg.one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Nonzero coefficients by ascending exponent.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u64, &E)> {
        self.coeffs.iter().map(|(t, a)| (*t, a))
    }

    pub fn get(&self, t: u64) -> Option<&E> {
        self.coeffs.get(&t)
    }

    /// `(P)_t`, zero when absent.
    pub fn coefficient_at<A: DifferentialAlgebra<Elem = E>>(&self, alg: &A, t: u64) -> E {
        self.coeffs.get(&t).cloned().unwrap_or_else(|| alg.zero())
    }

    pub fn add_term<A: DifferentialAlgebra<Elem = E>>(&mut self, alg: &A, t: u64, a: E) {
        if alg.is_zero(&a) {
            return;
        }
        match self.coeffs.remove(&t) {
            None => {
                self.coeffs.insert(t, a);
            }
            Some(old) => {
                let s = alg.add(&old, &a);
                if !alg.is_zero(&s) {
                    self.coeffs.insert(t, s);
                }
            }
        }
    }

    pub fn add<A: DifferentialAlgebra<Elem = E>>(&self, alg: &A, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, a) in &other.coeffs {
            out.add_term(alg, *t, a.clone());
        }
        out
    }

    pub fn neg<A: DifferentialAlgebra<Elem = E>>(&self, alg: &A) -> Self {
        OrePoly {
            coeffs: self.coeffs.iter().map(|(t, a)| (*t, alg.neg(a))).collect(),
        }
    }

    pub fn sub<A: DifferentialAlgebra<Elem = E>>(&self, alg: &A, other: &Self) -> Self {
        self.add(alg, &other.neg(alg))
    }

    /// Scales every coefficient on the left: `c * P`.
    pub fn left_mul<A: DifferentialAlgebra<Elem = E>>(&self, alg: &A, c: &E) -> Self {
        let mut out = OrePoly::zero();
        for (t, a) in &self.coeffs {
            out.add_term(alg, *t, alg.mul(c, a));
        }
        out
    }

    /// Keeps only exponents `>= floor`.
    pub fn truncate_below(&self, floor: u64) -> Self {
        OrePoly {
            coeffs: self.coeffs.range(floor..).map(|(t, a)| (*t, a.clone())).collect(),
        }
    }
}

/// `X * P` by a single application of `X a = a X + D(a)` to every coefficient.
pub fn mul_by_x<A: DifferentialAlgebra>(alg: &A, p: &OrePoly<A::Elem>) -> OrePoly<A::Elem> {
    let mut out = OrePoly::zero();
    for (t, a) in p.iter() {
        out.add_term(alg, t + 1, a.clone());
        out.add_term(alg, t, alg.derive(a));
    }
    out
}

/// Row `n` of Pascal's triangle over the integers.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for k in 0..n {
        let next = &row[k as usize] * BigUint::from(n - k) / BigUint::from(k + 1);
        row.push(next);
    }
    row
}

/// `X^n * a = sum_k C(n, k) D^k(a) X^{n-k}`; binomials are formed over the
/// integers and only then mapped into the field.
pub fn commute_past<A: DifferentialAlgebra>(alg: &A, a: &A::Elem, n: u64) -> OrePoly<A::Elem> {
    let field = alg.field();
    let row = binomial_row(n);
    let mut out = OrePoly::zero();
    let mut dk = a.clone();
    for (k, c) in row.iter().enumerate() {
        if alg.is_zero(&dk) {
            break;
        }
        let c = Scalar::from_biguint(c, field);
        out.add_term(alg, n - k as u64, alg.scale(&dk, &c));
        dk = alg.derive(&dk);
    }
    out
}

/// The product in `R[X; D]`.
pub fn ore_mul<A: DifferentialAlgebra>(
    alg: &A,
    p: &OrePoly<A::Elem>,
    q: &OrePoly<A::Elem>,
) -> OrePoly<A::Elem> {
    let mut out = OrePoly::zero();
    for (i, a) in p.iter() {
        for (j, b) in q.iter() {
            // a X^i b X^j = a (X^i b) X^j
            for (e, c) in commute_past(alg, b, i).iter() {
                out.add_term(alg, e + j, alg.mul(a, c));
            }
        }
    }
    out
}

pub fn ore_pow<A: DifferentialAlgebra>(alg: &A, p: &OrePoly<A::Elem>, n: u64) -> OrePoly<A::Elem> {
    let mut acc = OrePoly::one(alg);
    for _ in 0..n {
        acc = ore_mul(alg, &acc, p);
    }
    acc
}

/// Binomials `C(j, k)` for `j <= max`, already mapped into the field.
struct BinomialTable {
    rows: Vec<Vec<Scalar>>,
}

impl BinomialTable {
    fn new(max: u64, field: Field) -> Self {
        let rows = (0..=max)
            .map(|j| {
                binomial_row(j)
                    .iter()
                    .map(|c| Scalar::from_biguint(c, field))
                    .collect()
            })
            .collect();
        BinomialTable { rows }
    }

    fn get(&self, j: u64, k: u64) -> &Scalar {
        &self.rows[j as usize][k as usize]
    }
}

/// One right factor: `P <- P (x_0 X)`, keeping exponents `>= floor`.
///
/// `a_j X^j x_0 X = sum_k C(j, k) a_j x_k X^{j-k+1}`.
fn step_x0x(
    current: &BTreeMap<u64, FreePoly>,
    floor: u64,
    binomials: &BinomialTable,
    field: Field,
) -> BTreeMap<u64, FreePoly> {
    let mut next: BTreeMap<u64, FreePoly> = BTreeMap::new();
    for (&j, a) in current {
        // t = j - k + 1 >= floor  <=>  k <= j + 1 - floor
        let k_max = match (j + 1).checked_sub(floor) {
            Some(v) => v.min(j),
            None => continue,
        };
        for k in 0..=k_max {
            let c = binomials.get(j, k);
            if c.is_zero() {
                continue;
            }
            let t = j - k + 1;
            let slot = next.entry(t).or_insert_with(|| FreePoly::zero(field));
            for (mono, coeff) in a.terms() {
                let mut letters = mono.letters().to_vec();
                letters.push(k);
                slot.add_term(Monomial::new(letters), coeff * c);
            }
        }
    }
    next.retain(|_, p| !p.is_zero());
    next
}

fn expand_x0x(m: u64, floor: u64, field: Field) -> OrePoly<FreePoly> {
    let binomials = BinomialTable::new(m, field);
    let mut current: BTreeMap<u64, FreePoly> = BTreeMap::new();
    current.insert(0, FreePoly::one(field));
    for s in 1..=m {
        // after s factors only exponents that can still climb to `floor` matter;
        // each factor raises the exponent by at most one
        let step_floor = floor.saturating_sub(m - s);
        current = step_x0x(&current, step_floor, &binomials, field);
    }
    OrePoly { coeffs: current }
}

/// Full expansion of `(x_0 X)^m`, refused above `budget`.
pub fn power_x0x(m: u64, field: Field, budget: u64) -> Result<OrePoly<FreePoly>, OreError> {
    if m > budget {
        return Err(OreError::BudgetExceeded { m, budget });
    }
    Ok(expand_x0x(m, 0, field))
}

/// The coefficients `a_t` of `(x_0 X)^m` with `t >= floor`, bit-identical to
/// the corresponding part of the full expansion.
pub fn windowed_power(m: u64, floor: u64, field: Field) -> Result<OrePoly<FreePoly>, OreError> {
    if floor > m {
        return Err(OreError::WindowAboveDegree { m, floor });
    }
    Ok(expand_x0x(m, floor, field))
}

impl<E: fmt::Display + Clone> fmt::Display for OrePoly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, a)) in self.coeffs.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a})X^{t}")?;
        }
        Ok(())
    }
}

impl OrePoly<FreePoly> {
    /// Parses `(<poly>)X^<t> + ...` as produced by `Display`.
    pub fn parse(s: &str, field: Field) -> Result<Self, OreError> {
        let alg = ShiftAlgebra::new(field);
        let mut out = OrePoly::zero();
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(out);
        }
        let bad = |msg: &str| OreError::Algebra(AlgebraError::Parse(msg.to_string()));
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(")X^").ok_or_else(|| bad("expected `)X^`"))?;
            let poly = FreePoly::parse(&body[..close], field)?;
            let after = &body[close + 3..];
            let digits_end = after
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(after.len());
            let t: u64 = after[..digits_end]
                .parse()
                .map_err(|_| bad("bad exponent"))?;
            out.add_term(&alg, t, poly);
            rest = after[digits_end..].trim_start();
            if rest.is_empty() {
                break;
            }
            rest = rest.strip_prefix('+').ok_or_else(|| bad("expected `+`"))?;
        }
        Ok(out)
    }
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

    fn x0x(alg: &ShiftAlgebra) -> OrePoly<FreePoly> {
        OrePoly::term(alg, w(&[0]), 1)
    }

    #[test]
    fn commutation_examples() {
        let alg = ShiftAlgebra::new(Q);
        let one_step = commute_past(&alg, &w(&[0]), 1);
        let mut expected = OrePoly::term(&alg, w(&[0]), 1);
        expected.add_term(&alg, 0, w(&[1]));
        assert_eq!(one_step, expected);

        let two = commute_past(&alg, &w(&[0]), 2);
        let mut expected = OrePoly::term(&alg, w(&[0]), 2);
        expected.add_term(&alg, 1, w(&[1]).scale(&int(2)));
        expected.add_term(&alg, 0, w(&[2]));
        assert_eq!(two, expected);

        let a = w(&[3, 1]).add(&w(&[0]));
        assert_eq!(commute_past(&alg, &a, 0), OrePoly::constant(&alg, a));
    }

    #[test]
    fn square_of_x0x() {
        let alg = ShiftAlgebra::new(Q);
        let sq = ore_mul(&alg, &x0x(&alg), &x0x(&alg));
        let mut expected = OrePoly::term(&alg, w(&[0, 0]), 2);
        expected.add_term(&alg, 1, w(&[0, 1]));
        assert_eq!(sq, expected);
        assert_eq!(ore_mul(&alg, &sq, &OrePoly::one(&alg)), sq);
    }

    #[test]
    fn cube_of_x0x() {
        let alg = ShiftAlgebra::new(Q);
        let cube = power_x0x(3, Q, DEFAULT_EXPANSION_BUDGET).unwrap();
        assert_eq!(cube.coefficient_at(&alg, 3), w(&[0, 0, 0]));
        assert_eq!(
            cube.coefficient_at(&alg, 2),
            w(&[0, 0, 1]).scale(&int(2)).add(&w(&[0, 1, 0]))
        );
        assert_eq!(cube.coefficient_at(&alg, 1), w(&[0, 0, 2]).add(&w(&[0, 1, 1])));
        assert!(cube.coefficient_at(&alg, 0).is_zero());
        assert_eq!(cube, ore_pow(&alg, &x0x(&alg), 3));
    }

    #[test]
    fn small_powers() {
        let alg = ShiftAlgebra::new(Q);
        let p1 = power_x0x(1, Q, 16).unwrap();
        assert_eq!(p1, x0x(&alg));
        let p2 = power_x0x(2, Q, 16).unwrap();
        assert_eq!(p2.coefficient_at(&alg, 2), w(&[0, 0]));
        assert_eq!(p2.coefficient_at(&alg, 1), w(&[0, 1]));
        assert!(p2.coefficient_at(&alg, 0).is_zero());
        assert_eq!(power_x0x(0, Q, 16).unwrap(), OrePoly::one(&alg));
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            power_x0x(17, Q, DEFAULT_EXPANSION_BUDGET),
            Err(OreError::BudgetExceeded { m: 17, budget: 16 })
        );
    }

    #[test]
    fn window_examples() {
        let alg = ShiftAlgebra::new(Q);
        let win = windowed_power(3, 2, Q).unwrap();
        assert_eq!(win.iter().map(|(t, _)| t).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(
            win.coefficient_at(&alg, 2),
            w(&[0, 0, 1]).scale(&int(2)).add(&w(&[0, 1, 0]))
        );
        assert_eq!(windowed_power(7, 7, Q).unwrap(), OrePoly::term(&alg, w(&[0; 7]), 7));
        assert!(matches!(
            windowed_power(3, 4, Q),
            Err(OreError::WindowAboveDegree { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let p = power_x0x(4, Q, 16).unwrap();
        let text = p.to_string();
        assert!(text.starts_with("(1*x0.x0.x0.x0)X^4"));
        assert_eq!(OrePoly::parse(&text, Q).unwrap(), p);
        assert_eq!(OrePoly::parse("0", Q).unwrap(), OrePoly::zero());
    }
}
