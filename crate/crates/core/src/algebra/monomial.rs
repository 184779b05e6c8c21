use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraError;

/// A word `x_{i_1} x_{i_2} ... x_{i_n}` in the free generators.
///
/// The empty word is the unity of the algebra with adjoined identity.
/// Ordering is by length first, then lexicographic on the letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn new(letters: Vec<u64>) -> Monomial {
        Monomial(letters)
    }

    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn letter(i: u64) -> Monomial {
        Monomial(vec![i])
    }

    /// `x_i^n`.
    pub fn power(i: u64, n: usize) -> Monomial {
        Monomial(vec![i; n])
    }

    pub fn letters(&self) -> &[u64] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `(length, degree)`.
    pub fn stats(&self) -> (usize, u64) {
        (self.len(), self.degree())
    }

    /// The letter at 1-based position `q`.
    pub fn letter_at(&self, q: usize) -> Result<u64, AlgebraError> {
        if q == 0 || q > self.0.len() {
            return Err(AlgebraError::PositionOutOfRange {
                position: q,
                length: self.0.len(),
            });
        }
        Ok(self.0[q - 1])
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    /// A copy with the letter at 0-based `idx` raised by one.
    pub fn shifted_at(&self, idx: usize) -> Monomial {
        let mut v = self.0.clone();
        v[idx] = v[idx].checked_add(1).expect("generator index overflow");
        Monomial(v)
    }

    pub fn with_letter(&self, idx: usize, letter: u64) -> Monomial {
        let mut v = self.0.clone();
        v[idx] = letter;
        Monomial(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Monomial {
        Monomial(self.0[from..to].to_vec())
    }

    pub fn parse(s: &str) -> Result<Monomial, AlgebraError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::unit());
        }
        s.split('.')
            .map(|tok| {
                tok.trim()
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| AlgebraError::Parse(format!("bad letter `{tok}` in `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Monomial::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<Vec<u64>> for Monomial {
    fn from(v: Vec<u64>) -> Self {
        Monomial(v)
    }
}

/// Calls `visit` on every word of `length` letters whose indices sum to `degree`,
/// each letter below `alphabet` (use `u64::MAX` for no bound). Words arrive in
/// increasing canonical order.
pub fn for_each_word(length: usize, degree: u64, alphabet: u64, mut visit: impl FnMut(&[u64])) {
    fn rec(
        buf: &mut Vec<u64>,
        remaining_len: usize,
        remaining_deg: u64,
        alphabet: u64,
        visit: &mut dyn FnMut(&[u64]),
    ) {
        if remaining_len == 0 {
            if remaining_deg == 0 {
                visit(buf);
            }
            return;
        }
        let cap = remaining_deg.min(alphabet.saturating_sub(1));
        // the tail can absorb at most (remaining_len - 1) * (alphabet - 1)
        let tail_cap = (remaining_len as u64 - 1).saturating_mul(alphabet.saturating_sub(1));
        let lo = remaining_deg.saturating_sub(tail_cap);
        if lo > cap {
            return;
        }
        for l in lo..=cap {
            buf.push(l);
            rec(buf, remaining_len - 1, remaining_deg - l, alphabet, visit);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(length);
    rec(&mut buf, length, degree, alphabet, &mut visit);
}

/// Number of words of `length` letters with index sum `degree` (no alphabet bound).
pub fn component_dimension(length: usize, degree: u64) -> u128 {
    if length == 0 {
        return u128::from(degree == 0);
    }
    // C(degree + length - 1, degree), saturating
    let n = degree as u128 + length as u128 - 1;
    let k = (degree as u128).min(length as u128 - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[u64]) -> Monomial {
        Monomial::new(v.to_vec())
    }

    #[test]
    fn letter_at_is_one_based() {
        let s = m(&[0, 3, 1]);
        assert_eq!(s.letter_at(2).unwrap(), 3);
        assert_eq!(s.letter_at(1).unwrap(), 0);
        assert!(matches!(
            s.letter_at(4),
            Err(AlgebraError::PositionOutOfRange { position: 4, length: 3 })
        ));
        assert!(s.letter_at(0).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(m(&[0, 3, 1]).stats(), (3, 4));
        assert_eq!(Monomial::unit().stats(), (0, 0));
        assert_eq!(m(&[2, 2]).stats(), (2, 4));
    }

    #[test]
    fn order_is_length_then_lex() {
        assert!(m(&[9]) < m(&[0, 0]));
        assert!(m(&[0, 1]) < m(&[1, 0]));
        assert!(Monomial::unit() < m(&[0]));
    }

    #[test]
    fn text_round_trip() {
        for w in [m(&[0, 1, 12]), Monomial::unit(), m(&[7])] {
            assert_eq!(Monomial::parse(&w.to_string()).unwrap(), w);
        }
        assert!(Monomial::parse("x0.y1").is_err());
    }

    #[test]
    fn word_enumeration_matches_dimension() {
        for (len, deg) in [(1, 0), (3, 2), (5, 4), (9, 1), (4, 7)] {
            let mut count = 0u128;
            let mut last: Option<Monomial> = None;
            for_each_word(len, deg, u64::MAX, |w| {
                let w = m(w);
                assert_eq!(w.stats(), (len, deg));
                if let Some(prev) = &last {
                    assert!(prev < &w);
                }
                last = Some(w);
                count += 1;
            });
            assert_eq!(count, component_dimension(len, deg));
        }
    }

    #[test]
    fn bounded_alphabet() {
        let mut words = Vec::new();
        for_each_word(3, 2, 2, |w| words.push(w.to_vec()));
        assert_eq!(words, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    }
}
