use serde::Serialize;

use crate::algebra::{FreePoly, Monomial};

use super::params::ConstructionParams;
use super::ConstructionError;

/// Image of one word under the signed checkpoint map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", content = "word", rename_all = "snake_case")]
pub enum PhiImage {
    /// The checkpoint letters already read `x_{c_0}, ..., x_{c_k}`.
    Fixed,
    /// An even rearrangement of the target letters, put in order.
    Plus(Monomial),
    /// An odd rearrangement, put in order with a minus sign.
    Minus(Monomial),
    /// The checkpoint letters are not a rearrangement of the targets.
    Zero,
}

/// The signed map on words of length `N(k) - 1`: when the letters at the
/// checkpoints `c_1, ..., c_{k+1}` are a permutation of
/// `x_{c_0}, ..., x_{c_k}`, rewrite them in order with the sign of the
/// permutation; otherwise send the word to 0.
pub fn phi_signed(v: &Monomial, params: &ConstructionParams, k: u32) -> Result<PhiImage, ConstructionError> {
    let level = params.level(k)?;
    if v.len() != level.z_length() {
        return Err(ConstructionError::WrongLength {
            expected: level.z_length(),
            got: v.len(),
        });
    }
    let targets = level.target_letters();
    let seen: Vec<u64> = level
        .positions()
        .iter()
        .map(|&c| v.letters()[c as usize - 1])
        .collect();
    if seen == targets {
        return Ok(PhiImage::Fixed);
    }
    let mut sorted = seen.clone();
    sorted.sort_unstable();
    if sorted != targets {
        return Ok(PhiImage::Zero);
    }
    let inversions: usize = (0..seen.len())
        .map(|a| (a + 1..seen.len()).filter(|&b| seen[a] > seen[b]).count())
        .sum();
    let mut out = v.clone();
    for (&c, &t) in level.positions().iter().zip(targets) {
        out = out.with_letter(c as usize - 1, t);
    }
    Ok(if inversions % 2 == 0 {
        PhiImage::Plus(out)
    } else {
        PhiImage::Minus(out)
    })
}

/// Linear extension of [`phi_signed`].
pub fn phi_poly(a: &FreePoly, params: &ConstructionParams, k: u32) -> Result<FreePoly, ConstructionError> {
    let mut out = FreePoly::zero(a.field());
    for (m, c) in a.terms() {
        match phi_signed(m, params, k)? {
            PhiImage::Fixed => out.add_term(m.clone(), c.clone()),
            PhiImage::Plus(w) => out.add_term(w, c.clone()),
            PhiImage::Minus(w) => out.add_term(w, -c),
            PhiImage::Zero => {}
        }
    }
    Ok(out)
}
