use rand::Rng;

use crate::algebra::Monomial;
use crate::construction::{
    block_layout, z_element, ConstructionError, ConstructionParams, Generator, Space, ZElement,
    ZWitness,
};

/// A word whose letters are 0 half of the time and otherwise uniform in `1..=max_letter`.
pub fn random_word<R: Rng>(rng: &mut R, length: usize, max_letter: u64) -> Vec<u64> {
    (0..length)
        .map(|_| {
            if max_letter == 0 || rng.gen_bool(0.5) {
                0
            } else {
                rng.gen_range(1..=max_letter)
            }
        })
        .collect()
}

fn distinct_pair<R: Rng>(rng: &mut R, floor: u64, max_letter: u64) -> (u64, u64) {
    let a = rng.gen_range(floor..=max_letter);
    loop {
        let b = rng.gen_range(floor..=max_letter);
        if b != a {
            return (a, b);
        }
    }
}

/// A random element of `Z_k`, half repeats and half swap pairs.
pub fn sample_z<R: Rng>(
    rng: &mut R,
    params: &ConstructionParams,
    k: u32,
    max_letter: u64,
) -> Result<ZElement, ConstructionError> {
    let level = params.level(k)?;
    let positions: Vec<usize> = level.positions().iter().map(|&c| c as usize - 1).collect();
    let mut letters = random_word(rng, level.z_length(), max_letter);
    let p = rng.gen_range(0..positions.len() - 1);
    let q = rng.gen_range(p + 1..positions.len());
    let witness = if rng.gen_bool(0.5) {
        letters[positions[q]] = letters[positions[p]];
        ZWitness::Repeat { p, q }
    } else {
        let (a, b) = distinct_pair(rng, params.swap_rule.floor(), max_letter.max(2));
        letters[positions[p]] = a;
        letters[positions[q]] = b;
        ZWitness::Swap {
            p,
            q,
            l1: a.max(b),
            l2: a.min(b),
        }
    };
    z_element(&Monomial::new(letters), &witness, params, k)
}

/// A random spanning element of `B_level` among words of `length` letters,
/// or `None` when that level has no block fitting the length.
pub fn random_block_generator<R: Rng>(
    rng: &mut R,
    params: &ConstructionParams,
    level: u32,
    length: usize,
    max_letter: u64,
) -> Result<Option<Generator>, ConstructionError> {
    let blocks = block_layout(params, Space::B(level), length)?;
    if blocks.is_empty() {
        return Ok(None);
    }
    let block = &blocks[rng.gen_range(0..blocks.len())];
    let mut letters = random_word(rng, length, max_letter);
    let a = rng.gen_range(0..block.positions.len() - 1);
    let b = rng.gen_range(a + 1..block.positions.len());
    let (i, j) = (block.positions[a], block.positions[b]);
    if rng.gen_bool(0.5) {
        letters[j] = letters[i];
        return Ok(Some(Generator::Repeat {
            word: Monomial::new(letters),
        }));
    }
    let (x, y) = distinct_pair(rng, params.swap_rule.floor(), max_letter.max(2));
    letters[i] = x;
    letters[j] = y;
    Ok(Generator::swap(&Monomial::new(letters), i, j, params.swap_rule.floor()))
}
