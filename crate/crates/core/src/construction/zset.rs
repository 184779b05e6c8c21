use serde::Serialize;

use crate::algebra::{Field, FreePoly, Monomial};

use super::params::{ConstructionParams, Level};
use super::ConstructionError;

/// Which condition a `Z_k` element satisfies, with the witnessing data.
///
/// `p < q` index checkpoints `0..=k`, i.e. positions `c_{p+1}` and `c_{q+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ZWitness {
    Repeat { p: usize, q: usize },
    Swap { p: usize, q: usize, l1: u64, l2: u64 },
}

/// An element of `Z_k` (with unit coefficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZElement {
    /// A monomial repeating a letter at two checkpoints.
    Repeat { word: Monomial, p: usize, q: usize },
    /// `s1 + s2`, where `s2` is `s1` with the letters `x_{l1}` (at `c_{p+1}`)
    /// and `x_{l2}` (at `c_{q+1}`) exchanged.
    Swap {
        s1: Monomial,
        s2: Monomial,
        p: usize,
        q: usize,
        l1: u64,
        l2: u64,
    },
}

impl ZElement {
    pub fn to_poly(&self, field: Field) -> FreePoly {
        match self {
            ZElement::Repeat { word, .. } => FreePoly::monomial(word.clone(), field),
            ZElement::Swap { s1, s2, .. } => {
                FreePoly::monomial(s1.clone(), field).add(&FreePoly::monomial(s2.clone(), field))
            }
        }
    }

    pub fn witness(&self) -> ZWitness {
        match self {
            ZElement::Repeat { p, q, .. } => ZWitness::Repeat { p: *p, q: *q },
            ZElement::Swap { p, q, l1, l2, .. } => ZWitness::Swap {
                p: *p,
                q: *q,
                l1: *l1,
                l2: *l2,
            },
        }
    }
}

/// What [`z_test`] inspects: a single word (condition 1) or a pair (condition 2).
#[derive(Clone, Copy, Debug)]
pub enum ZCandidate<'a> {
    Single(&'a Monomial),
    Pair(&'a Monomial, &'a Monomial),
}

fn idx(level: &Level, i: usize) -> usize {
    level.positions()[i] as usize - 1
}

/// Decides membership of a candidate in `Z_k`, returning the first witness
/// in `(p, q)` order.
pub fn z_test(
    candidate: ZCandidate<'_>,
    params: &ConstructionParams,
    k: u32,
) -> Result<Option<ZWitness>, ConstructionError> {
    let level = params.level(k)?;
    let need = level.z_length();
    let check_len = |m: &Monomial| {
        if m.len() != need {
            Err(ConstructionError::WrongLength {
                expected: need,
                got: m.len(),
            })
        } else {
            Ok(())
        }
    };
    let npos = level.positions().len();
    match candidate {
        ZCandidate::Single(s) => {
            check_len(s)?;
            let l = s.letters();
            for p in 0..npos {
                for q in p + 1..npos {
                    if l[idx(&level, p)] == l[idx(&level, q)] {
                        return Ok(Some(ZWitness::Repeat { p, q }));
                    }
                }
            }
            Ok(None)
        }
        ZCandidate::Pair(a, b) => {
            check_len(a)?;
            check_len(b)?;
            let (la, lb) = (a.letters(), b.letters());
            let diff: Vec<usize> = (0..need).filter(|&i| la[i] != lb[i]).collect();
            if diff.len() != 2 {
                return Ok(None);
            }
            let slot = |i: usize| (0..npos).find(|&p| idx(&level, p) == i);
            let (Some(p), Some(q)) = (slot(diff[0]), slot(diff[1])) else {
                return Ok(None);
            };
            let (i, j) = (diff[0], diff[1]);
            if la[i] != lb[j] || la[j] != lb[i] {
                return Ok(None);
            }
            // s1 carries the larger letter at the earlier checkpoint
            let (l1, l2) = if la[i] > la[j] { (la[i], la[j]) } else { (lb[i], lb[j]) };
            if l2 < params.swap_rule.floor() {
                return Ok(None);
            }
            Ok(Some(ZWitness::Swap { p, q, l1, l2 }))
        }
    }
}

/// Builds the element of `Z_k` a witness describes for `word`: the word itself
/// for a repeat, or the pair completed by exchanging the two checkpoint letters.
pub fn z_element(
    word: &Monomial,
    witness: &ZWitness,
    params: &ConstructionParams,
    k: u32,
) -> Result<ZElement, ConstructionError> {
    let level = params.level(k)?;
    match *witness {
        ZWitness::Repeat { p, q } => {
            let l = word.letters();
            if word.len() == level.z_length() && l[idx(&level, p)] == l[idx(&level, q)] {
                Ok(ZElement::Repeat {
                    word: word.clone(),
                    p,
                    q,
                })
            } else {
                Err(ConstructionError::NotInZ(word.to_string()))
            }
        }
        ZWitness::Swap { p, q, .. } => {
            if word.len() != level.z_length() {
                return Err(ConstructionError::WrongLength {
                    expected: level.z_length(),
                    got: word.len(),
                });
            }
            let (i, j) = (idx(&level, p), idx(&level, q));
            let (a, b) = (word.letters()[i], word.letters()[j]);
            if a == b || a.min(b) < params.swap_rule.floor() {
                return Err(ConstructionError::NotInZ(word.to_string()));
            }
            let other = word.with_letter(i, b).with_letter(j, a);
            let (s1, s2) = if a > b { (word.clone(), other) } else { (other, word.clone()) };
            Ok(ZElement::Swap {
                s1,
                s2,
                p,
                q,
                l1: a.max(b),
                l2: a.min(b),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: u64, r: u64, k: u32) -> ConstructionParams {
        ConstructionParams::new(b, r, k, Field::Rationals).unwrap()
    }

    fn word(len: usize, set: &[(usize, u64)]) -> Monomial {
        let mut v = vec![0; len];
        for &(pos, l) in set {
            v[pos - 1] = l;
        }
        Monomial::new(v)
    }

    #[test]
    fn repeat_at_first_two_checkpoints() {
        let p = params(100, 3, 1);
        let s = word(99, &[(5, 5)]);
        assert_eq!(
            z_test(ZCandidate::Single(&s), &p, 1).unwrap(),
            Some(ZWitness::Repeat { p: 0, q: 1 })
        );
    }

    #[test]
    fn distinct_checkpoint_letters_fail_condition_one() {
        let p = params(100, 3, 1);
        let s = word(99, &[(3, 1)]);
        assert_eq!(z_test(ZCandidate::Single(&s), &p, 1).unwrap(), None);
    }

    #[test]
    fn swapped_pair() {
        let p = params(100, 3, 1);
        let s1 = word(99, &[(1, 2), (3, 1)]);
        let s2 = word(99, &[(1, 1), (3, 2)]);
        let expected = Some(ZWitness::Swap { p: 0, q: 1, l1: 2, l2: 1 });
        assert_eq!(z_test(ZCandidate::Pair(&s1, &s2), &p, 1).unwrap(), expected);
        assert_eq!(z_test(ZCandidate::Pair(&s2, &s1), &p, 1).unwrap(), expected);
        // differing away from the checkpoints is not a swap
        let t = word(99, &[(1, 2), (4, 1)]);
        let u = word(99, &[(1, 1), (4, 2)]);
        assert_eq!(z_test(ZCandidate::Pair(&t, &u), &p, 1).unwrap(), None);
    }

    #[test]
    fn swap_with_zero_depends_on_rule() {
        let p = params(10, 3, 1);
        let s1 = word(9, &[(1, 1)]);
        let s2 = word(9, &[(3, 1)]);
        assert!(z_test(ZCandidate::Pair(&s1, &s2), &p, 1).unwrap().is_some());
        let strict = p.with_swap_rule(super::super::SwapRule::PositiveOnly);
        assert!(z_test(ZCandidate::Pair(&s1, &s2), &strict, 1).unwrap().is_none());
    }

    #[test]
    fn wrong_length() {
        let p = params(10, 3, 1);
        let s = word(8, &[]);
        assert!(matches!(
            z_test(ZCandidate::Single(&s), &p, 1),
            Err(ConstructionError::WrongLength { expected: 9, got: 8 })
        ));
    }

    #[test]
    fn completing_a_swap() {
        let p = params(10, 3, 1);
        let w = word(9, &[(1, 1), (3, 4)]);
        let z = z_element(&w, &ZWitness::Swap { p: 0, q: 1, l1: 0, l2: 0 }, &p, 1).unwrap();
        match z {
            ZElement::Swap { s1, s2, l1, l2, .. } => {
                assert_eq!(s1, word(9, &[(1, 4), (3, 1)]));
                assert_eq!(s2, w);
                assert_eq!((l1, l2), (4, 1));
            }
            _ => panic!("expected a swap"),
        }
    }
}
