use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{component_dimension, for_each_word, Field, FreePoly, Monomial};

use super::params::ConstructionParams;
use super::{Budget, ConstructionError};

/// The spaces whose bi-graded components the membership oracles decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum Space {
    /// `W_k`, spanned by `A(mN) W(k, N) A^1`.
    W(u32),
    /// `B_k`, spanned by `A(mN) Z_k A^1`.
    B(u32),
    /// `B_1 + ... + B_k`.
    BSum(u32),
    /// The ideal `I_k` generated by `W(k, 2N)`.
    I(u32),
    /// `I = sum_k I_k`, keeping the levels that can meet the component.
    ITruncated,
}

impl Space {
    /// Parses `W`, `B`, `Bsum` or `I` together with a level.
    pub fn from_name(name: &str, k: u32) -> Option<Space> {
        match name.to_ascii_lowercase().as_str() {
            "w" => Some(Space::W(k)),
            "b" => Some(Space::B(k)),
            "bsum" => Some(Space::BSum(k)),
            "i" => Some(Space::I(k)),
            "itruncated" | "i-truncated" => Some(Space::ITruncated),
            _ => None,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::W(k) => write!(f, "W_{k}"),
            Space::B(k) => write!(f, "B_{k}"),
            Space::BSum(k) => write!(f, "B_1+...+B_{k}"),
            Space::I(k) => write!(f, "I_{k}"),
            Space::ITruncated => write!(f, "I"),
        }
    }
}

/// A space intersected with the bi-graded component `(length, degree)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanQuery {
    pub space: Space,
    pub length: usize,
    pub degree: u64,
}

impl SpanQuery {
    pub fn new(space: Space, length: usize, degree: u64) -> Self {
        SpanQuery {
            space,
            length,
            degree,
        }
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        m.len() == self.length && m.degree() == self.degree
    }
}

/// The checkpoint positions (0-based) of one `Z_k` factor placed at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub level: u32,
    pub start: usize,
    pub positions: Vec<usize>,
}

/// All checkpoint blocks that a `B` or `B`-sum query of words of `length`
/// letters involves. Degenerate levels contribute none.
pub fn block_layout(
    params: &ConstructionParams,
    space: Space,
    length: usize,
) -> Result<Vec<Block>, ConstructionError> {
    let levels: Vec<u32> = match space {
        Space::B(k) => {
            check_level(params, k)?;
            vec![k]
        }
        Space::BSum(k) => {
            check_level(params, k)?;
            (1..=k).collect()
        }
        other => {
            return Err(ConstructionError::InvalidParams(format!(
                "{other} has no checkpoint blocks"
            )))
        }
    };
    let mut blocks = Vec::new();
    for k in levels {
        let Ok(level) = params.level(k) else {
            continue;
        };
        let mut start = 0usize;
        while start + level.z_length() <= length {
            blocks.push(Block {
                level: k,
                start,
                positions: level
                    .positions()
                    .iter()
                    .map(|&c| start + c as usize - 1)
                    .collect(),
            });
            start += level.block;
        }
    }
    Ok(blocks)
}

fn check_level(params: &ConstructionParams, k: u32) -> Result<(), ConstructionError> {
    if k == 0 || k > params.k_max {
        return Err(ConstructionError::InvalidParams(format!(
            "level {k} outside 1..={}",
            params.k_max
        )));
    }
    Ok(())
}

/// A spanning element of a component, kept in structured form so that
/// witnesses can name it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// A word repeating a letter inside some block.
    Repeat { word: Monomial },
    /// `s1 + s2` where `s2` exchanges the letters at positions `i < j` of a
    /// block, `s1` holding the larger letter at `i`.
    Swap {
        s1: Monomial,
        s2: Monomial,
        i: usize,
        j: usize,
    },
    /// `u D^order(w) v`.
    Derived {
        left: Monomial,
        core: Monomial,
        order: u32,
        right: Monomial,
    },
}

impl Generator {
    pub fn to_poly(&self, field: Field) -> FreePoly {
        match self {
            Generator::Repeat { word } => FreePoly::monomial(word.clone(), field),
            Generator::Swap { s1, s2, .. } => {
                FreePoly::monomial(s1.clone(), field).add(&FreePoly::monomial(s2.clone(), field))
            }
            Generator::Derived {
                left,
                core,
                order,
                right,
            } => FreePoly::monomial(core.clone(), field)
                .derive_iter(*order as usize)
                .sandwich(left, right),
        }
    }

    /// Builds the swap generator containing `word`, if the exchange is allowed.
    pub fn swap(word: &Monomial, i: usize, j: usize, floor: u64) -> Option<Generator> {
        let (i, j) = (i.min(j), i.max(j));
        let (a, b) = (word.letters()[i], word.letters()[j]);
        if a == b || a.min(b) < floor {
            return None;
        }
        let other = word.with_letter(i, b).with_letter(j, a);
        let (s1, s2) = if a > b {
            (word.clone(), other)
        } else {
            (other, word.clone())
        };
        Some(Generator::Swap { s1, s2, i, j })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Repeat { word } => write!(f, "{word}"),
            Generator::Swap { s1, s2, .. } => write!(f, "{s1} + {s2}"),
            Generator::Derived {
                left,
                core,
                order,
                right,
            } => write!(f, "({left})*D^{order}({core})*({right})"),
        }
    }
}

/// Number of words with the given length and degree over `x_0..x_{alphabet-1}`.
pub fn count_words(length: usize, degree: u64, alphabet: u64) -> u128 {
    if alphabet == u64::MAX {
        return component_dimension(length, degree);
    }
    let d = degree as usize;
    let mut row = vec![0u128; d + 1];
    row[0] = 1;
    for _ in 0..length {
        let mut next = vec![0u128; d + 1];
        for (s, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for l in 0..alphabet.min((d - s) as u64 + 1) {
                let t = s + l as usize;
                next[t] = next[t].saturating_add(c);
            }
        }
        row = next;
    }
    row[d]
}

fn check_component(length: usize, degree: u64, budget: &Budget) -> Result<(), ConstructionError> {
    let dim = component_dimension(length, degree);
    if dim > budget.max_component_dim {
        return Err(ConstructionError::Budget {
            what: "component dimension",
            estimate: dim,
            limit: budget.max_component_dim,
        });
    }
    Ok(())
}

/// Every generator of `space` containing the monomial `word`, for the block
/// spaces `B_k` and `B_1 + ... + B_k`.
pub fn touching(
    word: &Monomial,
    space: Space,
    params: &ConstructionParams,
) -> Result<Vec<Generator>, ConstructionError> {
    let blocks = block_layout(params, space, word.len())?;
    Ok(touching_in(word, &blocks, params.swap_rule.floor()))
}

pub(crate) fn touching_in(word: &Monomial, blocks: &[Block], floor: u64) -> Vec<Generator> {
    let letters = word.letters();
    let mut out = BTreeSet::new();
    for block in blocks {
        let pos = &block.positions;
        for (a, &i) in pos.iter().enumerate() {
            for &j in &pos[a + 1..] {
                if letters[i] == letters[j] {
                    out.insert(Generator::Repeat { word: word.clone() });
                } else if let Some(g) = Generator::swap(word, i, j, floor) {
                    out.insert(g);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Generators spanning `space ∩ A(length, degree)`, enumerated exhaustively
/// in a deterministic order.
pub fn span_basis(
    query: &SpanQuery,
    params: &ConstructionParams,
    budget: &Budget,
) -> Result<Vec<Generator>, ConstructionError> {
    let (length, degree) = (query.length, query.degree);
    match query.space {
        Space::B(_) | Space::BSum(_) => {
            let blocks = block_layout(params, query.space, length)?;
            if blocks.is_empty() {
                return Ok(Vec::new());
            }
            check_component(length, degree, budget)?;
            let floor = params.swap_rule.floor();
            let mut out = BTreeSet::new();
            for_each_word(length, degree, u64::MAX, |w| {
                let word = Monomial::new(w.to_vec());
                for g in touching_in(&word, &blocks, floor) {
                    // each swap pair is produced from both of its words
                    if let Generator::Swap { s1, .. } = &g {
                        if *s1 != word {
                            continue;
                        }
                    }
                    out.insert(g);
                }
            });
            Ok(out.into_iter().collect())
        }
        Space::W(k) => {
            check_level(params, k)?;
            let n = params.block_size(k)? as usize;
            let starts: Vec<usize> = (0..)
                .map(|m| m * n)
                .take_while(|s| s + n <= length)
                .collect();
            derived_generators(k as u64, n, &starts, length, degree, budget)
        }
        Space::I(k) => {
            check_level(params, k)?;
            let n = 2 * params.block_size(k)? as usize;
            let starts: Vec<usize> = (0..).take_while(|s| s + n <= length).collect();
            derived_generators(k as u64, n, &starts, length, degree, budget)
        }
        Space::ITruncated => {
            let mut out = Vec::new();
            for k in 1..=params.k_max {
                let n = 2 * params.block_size(k)? as usize;
                if n > length {
                    break;
                }
                let starts: Vec<usize> = (0..).take_while(|s| s + n <= length).collect();
                out.extend(derived_generators(k as u64, n, &starts, length, degree, budget)?);
            }
            Ok(out)
        }
    }
}

/// `u D^l(w) v` with `w` a word of `core_len` letters over `x_0..x_{alphabet-1}`
/// placed at each start, filling the component.
fn derived_generators(
    alphabet: u64,
    core_len: usize,
    starts: &[usize],
    length: usize,
    degree: u64,
    budget: &Budget,
) -> Result<Vec<Generator>, ConstructionError> {
    if starts.is_empty() {
        return Ok(Vec::new());
    }
    let outer = length - core_len;
    let max_core_deg = (core_len as u64).saturating_mul(alphabet - 1).min(degree);
    let mut estimate: u128 = 0;
    for l in 0..=degree {
        for dw in 0..=max_core_deg.min(degree - l) {
            let c = count_words(core_len, dw, alphabet)
                .saturating_mul(component_dimension(outer, degree - l - dw));
            estimate = estimate.saturating_add(c);
        }
    }
    estimate = estimate.saturating_mul(starts.len() as u128);
    if estimate > budget.max_spanning_set {
        return Err(ConstructionError::Budget {
            what: "spanning set",
            estimate,
            limit: budget.max_spanning_set,
        });
    }
    let mut out = Vec::new();
    for &s in starts {
        for l in 0..=degree {
            for dw in 0..=max_core_deg.min(degree - l) {
                let mut cores = Vec::new();
                for_each_word(core_len, dw, alphabet, |w| cores.push(Monomial::new(w.to_vec())));
                for_each_word(outer, degree - l - dw, u64::MAX, |uv| {
                    let left = Monomial::new(uv[..s].to_vec());
                    let right = Monomial::new(uv[s..].to_vec());
                    for core in &cores {
                        out.push(Generator::Derived {
                            left: left.clone(),
                            core: core.clone(),
                            order: l as u32,
                            right: right.clone(),
                        });
                    }
                });
            }
        }
    }
    Ok(out)
}

/// `W(k, n, l)`: all `k^n` words over `x_0..x_{k-1}` of length `n`, differentiated `l` times.
pub fn w_generators(k: u32, n: usize, l: u32, field: Field, budget: &Budget) -> Result<Vec<FreePoly>, ConstructionError> {
    let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > budget.max_spanning_set {
        return Err(ConstructionError::Budget {
            what: "W(k, n, 0)",
            estimate: count,
            limit: budget.max_spanning_set,
        });
    }
    let mut out = Vec::new();
    for d in 0..=(n as u64) * (k as u64).saturating_sub(1) {
        for_each_word(n, d, k as u64, |w| {
            out.push(FreePoly::monomial(Monomial::new(w.to_vec()), field).derive_iter(l as usize));
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::SwapRule;

    const Q: Field = Field::Rationals;

    fn polys(gens: &[Generator]) -> Vec<String> {
        gens.iter().map(|g| g.to_poly(Q).to_string()).collect()
    }

    #[test]
    fn b1_degree_zero() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let g = span_basis(&SpanQuery::new(Space::B(1), 9, 0), &p, &Budget::default()).unwrap();
        assert_eq!(polys(&g), vec!["1*x0.x0.x0.x0.x0.x0.x0.x0.x0"]);
    }

    #[test]
    fn b1_degree_one_literal_rule() {
        let p = ConstructionParams::new(10, 3, 1, Q)
            .unwrap()
            .with_swap_rule(SwapRule::PositiveOnly);
        let g = span_basis(&SpanQuery::new(Space::B(1), 9, 1), &p, &Budget::default()).unwrap();
        assert_eq!(g.len(), 7);
        for gen in &g {
            let Generator::Repeat { word } = gen else {
                panic!("unexpected {gen}");
            };
            let j = word.letters().iter().position(|&l| l == 1).unwrap();
            assert!(j != 0 && j != 2);
        }
    }

    #[test]
    fn b1_degree_one_with_zero_swaps() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let g = span_basis(&SpanQuery::new(Space::B(1), 9, 1), &p, &Budget::default()).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.iter().any(|g| matches!(g, Generator::Swap { i: 0, j: 2, .. })));
    }

    #[test]
    fn i1_degree_zero() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let g = span_basis(&SpanQuery::new(Space::I(1), 20, 0), &p, &Budget::default()).unwrap();
        assert_eq!(polys(&g), vec![format!("1*{}", Monomial::power(0, 20))]);
    }

    #[test]
    fn w_generator_sets() {
        let b = Budget::default();
        let s = |k, n, l| -> Vec<String> {
            w_generators(k, n, l, Q, &b)
                .unwrap()
                .iter()
                .map(|p| p.to_string())
                .collect()
        };
        assert_eq!(s(1, 2, 0), vec!["1*x0.x0"]);
        assert_eq!(s(2, 2, 0), vec!["1*x0.x0", "1*x0.x1", "1*x1.x0", "1*x1.x1"]);
        assert_eq!(s(1, 2, 1), vec!["1*x0.x1 + 1*x1.x0"]);
    }

    #[test]
    fn blocks_of_different_levels_are_disjoint() {
        let p = ConstructionParams::new(3, 2, 2, Q).unwrap();
        let blocks = block_layout(&p, Space::BSum(2), 80).unwrap();
        let mut seen = BTreeSet::new();
        for b in &blocks {
            for &i in &b.positions {
                assert!(seen.insert(i), "position {i} shared");
            }
        }
        assert_eq!(blocks.iter().filter(|b| b.level == 2).count(), 1);
        assert_eq!(blocks.iter().filter(|b| b.level == 1).count(), 27);
    }

    #[test]
    fn word_counts() {
        assert_eq!(count_words(3, 2, 2), 3);
        assert_eq!(count_words(4, 3, u64::MAX), component_dimension(4, 3));
        assert_eq!(count_words(2, 5, 3), 0);
    }

    #[test]
    fn budget_is_reported() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let tiny = Budget {
            max_component_dim: 10,
            max_spanning_set: 10,
        };
        let err = span_basis(&SpanQuery::new(Space::B(1), 9, 3), &p, &tiny).unwrap_err();
        assert!(matches!(err, ConstructionError::Budget { estimate: 165, .. }));
    }
}
