//! Nilpotent coefficient rings with inner derivations: the index `s(r)`,
//! inversion of `1 - c X^p` in `R[X; D]`, the coefficient identity
//! `((c X^p)^n)_{np} = c^n`, and Vandermonde recovery of homogeneous parts.
//!
//! `R` is the algebra of strictly upper-triangular `n x n` matrices, embedded
//! in the full matrix algebra so that `1 + f` makes sense. The derivation is
//! `a -> u a - a u`, which kills the identity and maps `R` into itself.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{Field, FreePoly, Scalar};
use crate::ore::{ore_mul, ore_pow, DifferentialAlgebra, OrePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("matrix is not strictly upper triangular")]
    NotStrictlyUpper,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix parse error: {0}")]
    Parse(String),
    #[error("power p = {p} must exceed s(c) = {s}")]
    PowerTooSmall { p: u64, s: u64 },
    #[error("inverse identity failed: {0}")]
    IdentityFailed(String),
    #[error("sample points repeat")]
    RepeatedSample,
    #[error("sample point zero cannot separate degrees")]
    ZeroSample,
    #[error("need {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples are inconsistent with degrees {low}..={high}")]
    InconsistentSamples { low: u64, high: u64 },
}

/// A dense square matrix over a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    field: Field,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(n: usize, field: Field) -> Matrix {
        Matrix {
            n,
            field,
            entries: vec![Scalar::zero(field); n * n],
        }
    }

    pub fn identity(n: usize, field: Field) -> Matrix {
        let mut m = Matrix::zero(n, field);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one(field);
        }
        m
    }

    /// The matrix unit with a 1 at 1-based `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize, field: Field) -> Matrix {
        let mut m = Matrix::zero(n, field);
        m.entries[(i - 1) * n + (j - 1)] = Scalar::one(field);
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>, field: Field) -> Result<Matrix, SeriesError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(SeriesError::DimensionMismatch(n, r.len()));
            }
            entries.extend(r);
        }
        Ok(Matrix { n, field, entries })
    }

    /// Random strictly upper-triangular matrix with integer entries in `-2..=2`.
    pub fn random_strictly_upper<R: Rng>(n: usize, field: Field, rng: &mut R) -> Matrix {
        let mut m = Matrix::zero(n, field);
        for i in 0..n {
            for j in i + 1..n {
                m.entries[i * n + j] = Scalar::from_i64(rng.gen_range(-2..=2), field);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        Matrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = Matrix::zero(n, self.field);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let e = &mut out.entries[i * n + j];
                        *e = &*e + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u64) -> Matrix {
        let mut acc = Matrix::identity(self.n, self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reads a grid: rows separated by `;` or newlines, entries by whitespace
    /// or commas.
    pub fn parse(s: &str, field: Field) -> Result<Matrix, SeriesError> {
        let rows: Vec<Vec<Scalar>> = s
            .split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| {
                r.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| Scalar::parse(t, field).map_err(|e| SeriesError::Parse(e.to_string())))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Matrix::from_rows(rows, field)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// A strictly upper-triangular matrix: an element of the nilpotent ring `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilAlgebraElement(Matrix);

impl NilAlgebraElement {
    pub fn new(m: Matrix) -> Result<Self, SeriesError> {
        if m.is_strictly_upper() {
            Ok(NilAlgebraElement(m))
        } else {
            Err(SeriesError::NotStrictlyUpper)
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// `a -> u a - a u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerDerivation {
    u: Matrix,
}

impl InnerDerivation {
    pub fn new(u: NilAlgebraElement) -> Self {
        InnerDerivation { u: u.0 }
    }

    pub fn zero(n: usize, field: Field) -> Self {
        InnerDerivation {
            u: Matrix::zero(n, field),
        }
    }

    pub fn generator(&self) -> &Matrix {
        &self.u
    }

    pub fn apply(&self, a: &Matrix) -> Matrix {
        self.u.mul(a).sub(&a.mul(&self.u))
    }
}

/// The unital matrix algebra with an inner derivation, as Ore coefficients.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub derivation: InnerDerivation,
}

impl MatrixAlgebra {
    pub fn new(derivation: InnerDerivation) -> Self {
        MatrixAlgebra { derivation }
    }

    pub fn dim(&self) -> usize {
        self.derivation.u.n
    }
}

impl DifferentialAlgebra for MatrixAlgebra {
    type Elem = Matrix;

    fn field(&self) -> Field {
        self.derivation.u.field
    }
    fn zero(&self) -> Matrix {
        Matrix::zero(self.dim(), self.field())
    }
    fn one(&self) -> Matrix {
        Matrix::identity(self.dim(), self.field())
    }
    fn is_zero(&self, a: &Matrix) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.add(b)
    }
    fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b)
    }
    fn scale(&self, a: &Matrix, c: &Scalar) -> Matrix {
        a.scale(c)
    }
    fn derive(&self, a: &Matrix) -> Matrix {
        self.derivation.apply(a)
    }
}

/// The least `s` with `D^s(r) = 0`; 0 for `r = 0`, where it is undefined.
pub fn s_index(r: &NilAlgebraElement, d: &InnerDerivation) -> u64 {
    let mut cur = r.0.clone();
    let mut s = 0;
    // ad_u of a nilpotent u is nilpotent of index at most 2n - 1
    let bound = 2 * r.0.n as u64;
    while !cur.is_zero() {
        s += 1;
        assert!(s <= bound, "inner derivation failed to terminate");
        cur = d.apply(&cur);
    }
    s
}

fn check_power(c: &NilAlgebraElement, p: u64, d: &InnerDerivation) -> Result<(), SeriesError> {
    let s = s_index(c, d);
    if p <= s {
        return Err(SeriesError::PowerTooSmall { p, s });
    }
    Ok(())
}

/// `(1 - c X^p)^{-1} = 1 + sum_{i >= 1} (c X^p)^i`, a polynomial because `R`
/// is nilpotent. Both one-sided products are checked before returning.
pub fn invert_one_minus(
    c: &NilAlgebraElement,
    p: u64,
    d: &InnerDerivation,
) -> Result<OrePoly<Matrix>, SeriesError> {
    check_power(c, p, d)?;
    let alg = MatrixAlgebra::new(d.clone());
    let y = OrePoly::term(&alg, c.0.clone(), p);
    let mut inverse = OrePoly::one(&alg);
    let mut power = y.clone();
    let mut steps = 0;
    while !power.is_zero() {
        inverse = inverse.add(&alg, &power);
        power = ore_mul(&alg, &power, &y);
        steps += 1;
        if steps > alg.dim() {
            return Err(SeriesError::IdentityFailed("geometric series did not terminate".into()));
        }
    }
    let one_minus = OrePoly::one(&alg).sub(&alg, &y);
    let one = OrePoly::one(&alg);
    if ore_mul(&alg, &one_minus, &inverse) != one {
        return Err(SeriesError::IdentityFailed("(1 - cX^p)(1 + f) != 1".into()));
    }
    if ore_mul(&alg, &inverse, &one_minus) != one {
        return Err(SeriesError::IdentityFailed("(1 + f)(1 - cX^p) != 1".into()));
    }
    Ok(inverse)
}

/// Whether the `X^{np}` coefficient of `(c X^p)^n` equals `c^n`.
pub fn coefficient_identity(
    c: &NilAlgebraElement,
    p: u64,
    n: u64,
    d: &InnerDerivation,
) -> Result<bool, SeriesError> {
    check_power(c, p, d)?;
    let alg = MatrixAlgebra::new(d.clone());
    let y = OrePoly::term(&alg, c.0.clone(), p);
    let power = ore_pow(&alg, &y, n);
    Ok(power.coefficient_at(&alg, n * p) == c.0.pow(n))
}

/// Values that can be combined linearly: the unknowns of a Vandermonde solve.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl Linear for Matrix {
    fn zero_like(&self) -> Self {
        Matrix::zero(self.n, self.field)
    }
    fn add(&self, other: &Self) -> Self {
        Matrix::add(self, other)
    }
    fn scale(&self, c: &Scalar) -> Self {
        Matrix::scale(self, c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl Linear for FreePoly {
    fn zero_like(&self) -> Self {
        FreePoly::zero(self.field())
    }
    fn add(&self, other: &Self) -> Self {
        FreePoly::add(self, other)
    }
    fn scale(&self, c: &Scalar) -> Self {
        FreePoly::scale(self, c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// Given `value(alpha) = sum_{j=low}^{high} alpha^j v_j` at distinct nonzero
/// sample points, recovers `v_low, ..., v_high`. Samples beyond the first
/// `high - low + 1` must agree with the recovered parts.
pub fn vandermonde_extract<V: Linear>(
    samples: &[(Scalar, V)],
    low: u64,
    high: u64,
) -> Result<Vec<V>, SeriesError> {
    let k = (high - low + 1) as usize;
    if samples.len() < k {
        return Err(SeriesError::TooFewSamples {
            needed: k,
            got: samples.len(),
        });
    }
    for (a, (x, _)) in samples.iter().enumerate() {
        if x.is_zero() {
            return Err(SeriesError::ZeroSample);
        }
        if samples[..a].iter().any(|(y, _)| y == x) {
            return Err(SeriesError::RepeatedSample);
        }
    }
    let field = samples[0].0.field();
    // invert the k x k system alpha_s^(low + j) by Gauss-Jordan
    let mut m: Vec<Vec<Scalar>> = samples[..k]
        .iter()
        .map(|(x, _)| (0..k).map(|j| x.pow(low + j as u64)).collect())
        .collect();
    let mut inv: Vec<Vec<Scalar>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| Scalar::from_i64(i64::from(i == j), field))
                .collect()
        })
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(SeriesError::RepeatedSample)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let f = m[col][col].inv().expect("nonzero pivot");
        for j in 0..k {
            m[col][j] = &m[col][j] * &f;
            inv[col][j] = &inv[col][j] * &f;
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let g = m[r][col].clone();
                for j in 0..k {
                    m[r][j] = &m[r][j] - &(&g * &m[col][j]);
                    inv[r][j] = &inv[r][j] - &(&g * &inv[col][j]);
                }
            }
        }
    }
    let template = &samples[0].1;
    let parts: Vec<V> = (0..k)
        .map(|j| {
            let mut acc = template.zero_like();
            for (s, (_, v)) in samples[..k].iter().enumerate() {
                acc = acc.add(&v.scale(&inv[j][s]));
            }
            acc
        })
        .collect();
    for (x, v) in &samples[k..] {
        let mut acc = template.zero_like();
        for (j, part) in parts.iter().enumerate() {
            acc = acc.add(&part.scale(&x.pow(low + j as u64)));
        }
        if !acc.add(&v.scale(&Scalar::from_i64(-1, field))).is_zero_value() {
            return Err(SeriesError::InconsistentSamples { low, high });
        }
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: Field = Field::Rationals;

    fn e(i: usize, j: usize) -> Matrix {
        Matrix::unit(3, i, j, Q)
    }

    fn nil(m: Matrix) -> NilAlgebraElement {
        NilAlgebraElement::new(m).unwrap()
    }

    fn u() -> InnerDerivation {
        InnerDerivation::new(nil(e(1, 2).add(&e(2, 3))))
    }

    #[test]
    fn s_index_examples() {
        assert_eq!(s_index(&nil(e(1, 2)), &u()), 2);
        assert_eq!(s_index(&nil(e(1, 3)), &u()), 1);
        assert_eq!(s_index(&nil(e(1, 2)), &InnerDerivation::zero(3, Q)), 1);
        assert_eq!(s_index(&nil(Matrix::zero(3, Q)), &u()), 0);
    }

    #[test]
    fn inverse_examples() {
        let inv = invert_one_minus(&nil(e(1, 2)), 3, &u()).unwrap();
        let alg = MatrixAlgebra::new(u());
        let expected = OrePoly::one(&alg).add(&alg, &OrePoly::term(&alg, e(1, 2), 3));
        assert_eq!(inv, expected);
        let zero = invert_one_minus(&nil(Matrix::zero(3, Q)), 1, &u()).unwrap();
        assert_eq!(zero, OrePoly::one(&alg));
        let c = nil(e(1, 2).add(&e(2, 3)));
        let p = s_index(&c, &u()) + 1;
        let inv = invert_one_minus(&c, p, &u()).unwrap();
        assert!(inv.degree().unwrap() <= 2 * p);
        assert!(matches!(
            invert_one_minus(&nil(e(1, 2)), 2, &u()),
            Err(SeriesError::PowerTooSmall { p: 2, s: 2 })
        ));
    }

    #[test]
    fn coefficient_identity_examples() {
        assert!(coefficient_identity(&nil(e(1, 2)), 3, 2, &u()).unwrap());
        assert!(coefficient_identity(&nil(e(1, 2).add(&e(2, 3))), 3, 2, &u()).unwrap());
        assert!(coefficient_identity(&nil(e(2, 3)), 4, 1, &u()).unwrap());
    }

    #[test]
    fn vandermonde_examples() {
        let s = |x| Scalar::from_i64(x, Q);
        let z = Matrix::zero(3, Q);
        let parts = vandermonde_extract(&[(s(1), z.clone()), (s(2), z.clone())], 2, 3).unwrap();
        assert!(parts.iter().all(Matrix::is_zero));
        let v1 = FreePoly::parse("1*x0", Q).unwrap();
        let v2 = FreePoly::parse("3*x1", Q).unwrap();
        let samples = [
            (s(1), v1.add(&v2)),
            (s(2), v1.scale(&s(2)).add(&v2.scale(&s(4)))),
        ];
        assert_eq!(vandermonde_extract(&samples, 1, 2).unwrap(), vec![v1, v2]);
        assert_eq!(
            vandermonde_extract(&[(s(1), z.clone()), (s(1), z.clone())], 1, 2),
            Err(SeriesError::RepeatedSample)
        );
        assert!(matches!(
            vandermonde_extract(&[(s(1), z.clone())], 1, 2),
            Err(SeriesError::TooFewSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn grid_round_trip() {
        let m = Matrix::parse("0 1 -1/2; 0 0 3; 0 0 0", Q).unwrap();
        assert_eq!(Matrix::parse(&m.to_string(), Q).unwrap(), m);
        assert!(NilAlgebraElement::new(Matrix::identity(2, Q)).is_err());
    }

    #[test]
    fn inner_derivation_is_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = InnerDerivation::new(nil(Matrix::random_strictly_upper(4, Q, &mut rng)));
            let a = Matrix::random_strictly_upper(4, Q, &mut rng);
            let b = Matrix::random_strictly_upper(4, Q, &mut rng);
            let lhs = d.apply(&a.mul(&b));
            let rhs = d.apply(&a).mul(&b).add(&a.mul(&d.apply(&b)));
            assert_eq!(lhs, rhs);
        }
    }
}
