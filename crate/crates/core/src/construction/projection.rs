use std::collections::BTreeMap;

use crate::algebra::{Field, FreePoly, Monomial, Scalar};

use super::echelon::Functional;
use super::params::ConstructionParams;
use super::spaces::{block_layout, Block, Generator, Space};
use super::ConstructionError;

/// The product over all blocks of the block antisymmetrizers.
///
/// On one block the map sends a word with a repeated checkpoint letter to 0
/// and otherwise sorts the movable checkpoint letters increasingly, with the
/// sign of the sorting permutation. Letters below the swap floor never move.
/// Its kernel is exactly the `B` (or `B`-sum) span in every component,
/// because the blocks are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct BlockProjector {
    blocks: Vec<Block>,
    floor: u64,
    field: Field,
}

/// Largest functional support the projector will write out.
const MAX_ORBIT: usize = 1 << 16;

impl BlockProjector {
    pub fn new(
        params: &ConstructionParams,
        space: Space,
        length: usize,
    ) -> Result<Self, ConstructionError> {
        Ok(BlockProjector {
            blocks: block_layout(params, space, length)?,
            floor: params.swap_rule.floor(),
            field: params.field,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn movable(&self, letters: &[u64], block: &Block) -> Vec<usize> {
        block
            .positions
            .iter()
            .copied()
            .filter(|&i| letters[i] >= self.floor)
            .collect()
    }

    fn has_repeat(letters: &[u64], block: &Block) -> bool {
        let p = &block.positions;
        (0..p.len()).any(|a| (a + 1..p.len()).any(|b| letters[p[a]] == letters[p[b]]))
    }

    /// `None` when the word is killed, otherwise `(negative, normal word)`.
    pub fn project_monomial(&self, word: &Monomial) -> Option<(bool, Monomial)> {
        let mut letters = word.letters().to_vec();
        let mut negative = false;
        for block in &self.blocks {
            if Self::has_repeat(&letters, block) {
                return None;
            }
            let pos = self.movable(&letters, block);
            let vals: Vec<u64> = pos.iter().map(|&i| letters[i]).collect();
            let inversions = (0..vals.len())
                .map(|a| (a + 1..vals.len()).filter(|&b| vals[a] > vals[b]).count())
                .sum::<usize>();
            negative ^= inversions % 2 == 1;
            let mut sorted = vals;
            sorted.sort_unstable();
            for (&i, v) in pos.iter().zip(sorted) {
                letters[i] = v;
            }
        }
        Some((negative, Monomial::new(letters)))
    }

    pub fn project(&self, p: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero(p.field());
        for (m, c) in p.terms() {
            if let Some((neg, w)) = self.project_monomial(m) {
                out.add_term(w, if neg { -c } else { c.clone() });
            }
        }
        out
    }

    /// Writes `p = sum(c * g) + project(p)` with explicit generators `g`.
    pub fn decompose(&self, p: &FreePoly) -> (BTreeMap<Generator, Scalar>, FreePoly) {
        let mut witness: BTreeMap<Generator, Scalar> = BTreeMap::new();
        let mut rest = FreePoly::zero(p.field());
        for (m, c) in p.terms() {
            let mut word = m.clone();
            let mut coeff = c.clone();
            let mut killed = false;
            for block in &self.blocks {
                if Self::has_repeat(word.letters(), block) {
                    add_to(&mut witness, Generator::Repeat { word: word.clone() }, &coeff);
                    killed = true;
                    break;
                }
                // bubble sort over the movable positions; each exchange peels
                // off one swap generator and flips the sign
                let pos = self.movable(word.letters(), block);
                for pass in 0..pos.len() {
                    for a in 0..pos.len() - 1 - pass {
                        let (i, j) = (pos[a], pos[a + 1]);
                        if word.letters()[i] > word.letters()[j] {
                            let g = Generator::swap(&word, i, j, self.floor)
                                .expect("distinct movable letters");
                            add_to(&mut witness, g, &coeff);
                            let (li, lj) = (word.letters()[i], word.letters()[j]);
                            word = word.with_letter(i, lj).with_letter(j, li);
                            coeff = -coeff;
                        }
                    }
                }
            }
            if !killed {
                rest.add_term(word, coeff);
            }
        }
        (witness, rest)
    }

    /// The functional `w -> coefficient of target in project(w)`, written out
    /// on the orbit of `target`, which must be a normal word.
    pub fn functional(&self, target: &Monomial) -> Result<Functional, ConstructionError> {
        let mut orbit: Vec<(Monomial, bool)> = vec![(target.clone(), false)];
        for block in &self.blocks {
            let pos = self.movable(target.letters(), block);
            if pos.len() < 2 {
                continue;
            }
            let perms = permutations(pos.len());
            if orbit.len().saturating_mul(perms.len()) > MAX_ORBIT {
                return Err(ConstructionError::Budget {
                    what: "functional support",
                    estimate: (orbit.len() as u128).saturating_mul(perms.len() as u128),
                    limit: MAX_ORBIT as u128,
                });
            }
            let mut next = Vec::with_capacity(orbit.len() * perms.len());
            for (w, neg) in &orbit {
                for (perm, odd) in &perms {
                    let mut letters = w.letters().to_vec();
                    for (a, &b) in perm.iter().enumerate() {
                        letters[pos[a]] = w.letters()[pos[b]];
                    }
                    next.push((Monomial::new(letters), neg ^ odd));
                }
            }
            orbit = next;
        }
        let one = Scalar::one(self.field);
        let values = orbit
            .into_iter()
            .map(|(w, neg)| (w, if neg { -&one } else { one.clone() }))
            .collect();
        Ok(Functional { values })
    }
}

fn add_to(map: &mut BTreeMap<Generator, Scalar>, g: Generator, c: &Scalar) {
    let entry = map.entry(g).or_insert_with(|| Scalar::zero(c.field()));
    *entry = &*entry + c;
}

/// All permutations of `0..n` with their parity.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        cur: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<(Vec<usize>, bool)>,
    ) {
        if cur.len() == n {
            let inv = (0..n)
                .map(|a| (a + 1..n).filter(|&b| cur[a] > cur[b]).count())
                .sum::<usize>();
            out.push((cur.clone(), inv % 2 == 1));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// Convenience: the projection of `p` for `space` at the length of `p`'s terms.
pub fn project(
    p: &FreePoly,
    space: Space,
    params: &ConstructionParams,
) -> Result<FreePoly, ConstructionError> {
    let Some((length, _)) = p.bidegree() else {
        return Ok(FreePoly::zero(p.field()));
    };
    Ok(BlockProjector::new(params, space, length)?.project(p))
}
