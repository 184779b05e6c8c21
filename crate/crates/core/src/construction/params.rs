use serde::Serialize;

use crate::algebra::Field;

use super::ConstructionError;

/// Which letter pairs may be exchanged by a two-term `Z_k` element.
///
/// `AllowZero` admits `l_1 > l_2 >= 0`, which is what makes the set closed
/// under `D`; `PositiveOnly` is the literal `l_1 > l_2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SwapRule {
    #[default]
    AllowZero,
    PositiveOnly,
}

impl SwapRule {
    /// Smallest letter index allowed on the low side of a swap.
    pub fn floor(self) -> u64 {
        match self {
            SwapRule::AllowZero => 0,
            SwapRule::PositiveOnly => 1,
        }
    }
}

/// `(b, r, k_max, K)`; `(100, 3, k, K)` is the original construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionParams {
    pub b: u64,
    pub r: u64,
    pub k_max: u32,
    pub field: Field,
    pub swap_rule: SwapRule,
}

/// The data of one level `k`: block size and the checkpoint layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub k: u32,
    /// `N(k) = b^(k^2)`.
    pub block: usize,
    /// `c_0, ..., c_{k+2}`.
    pub checkpoints: Vec<u64>,
}

impl Level {
    /// 1-based positions `c_1, ..., c_{k+1}` inside a word of length `N(k) - 1`.
    pub fn positions(&self) -> &[u64] {
        &self.checkpoints[1..self.checkpoints.len() - 1]
    }

    /// Letter indices `c_0, ..., c_k` that the signed map writes at the checkpoints.
    pub fn target_letters(&self) -> &[u64] {
        &self.checkpoints[..self.checkpoints.len() - 2]
    }

    /// Length of a `Z_k` word.
    pub fn z_length(&self) -> usize {
        self.block - 1
    }
}

fn checked_pow(b: u64, e: u64) -> Option<u64> {
    let e: u32 = e.try_into().ok()?;
    b.checked_pow(e)
}

impl ConstructionParams {
    /// Validates eagerly: `b, r >= 2`, `k_max >= 1`, every block size is
    /// representable, and level `k_max` satisfies `r^k b^((k-1)^2) < b^(k^2)`.
    /// Lower levels violating that inequality are kept as degenerate levels
    /// whose `Z` set is empty.
    pub fn new(b: u64, r: u64, k_max: u32, field: Field) -> Result<Self, ConstructionError> {
        if b < 2 {
            return Err(ConstructionError::InvalidParams("b >= 2 is required".into()));
        }
        if r < 2 {
            return Err(ConstructionError::InvalidParams("r >= 2 is required".into()));
        }
        if k_max == 0 {
            return Err(ConstructionError::InvalidParams("k_max >= 1 is required".into()));
        }
        let params = ConstructionParams {
            b,
            r,
            k_max,
            field,
            swap_rule: SwapRule::default(),
        };
        for k in 1..=k_max {
            params.raw_checkpoints(k)?;
        }
        params.level(k_max)?;
        Ok(params)
    }

    /// The original constants `b = 100`, `r = 3`.
    pub fn original(k_max: u32, field: Field) -> Result<Self, ConstructionError> {
        ConstructionParams::new(100, 3, k_max, field)
    }

    pub fn with_swap_rule(mut self, rule: SwapRule) -> Self {
        self.swap_rule = rule;
        self
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    /// `b^(k^2)`.
    pub fn block_size(&self, k: u32) -> Result<u64, ConstructionError> {
        let k = k as u64;
        checked_pow(self.b, k * k)
            .filter(|&n| n <= usize::MAX as u64 / 4)
            .ok_or_else(|| ConstructionError::InvalidParams(format!("b^(k^2) overflows at k = {k}")))
    }

    fn raw_checkpoints(&self, k: u32) -> Result<Vec<u64>, ConstructionError> {
        let n = self.block_size(k)?;
        let base = if k == 1 { 1 } else { self.block_size(k - 1)? };
        let mut c = vec![0];
        for i in 0..=k {
            let v = checked_pow(self.r, i as u64)
                .and_then(|ri| ri.checked_mul(base))
                .ok_or_else(|| {
                    ConstructionError::InvalidParams(format!("r^{i} b^((k-1)^2) overflows at k = {k}"))
                })?;
            c.push(v);
        }
        c.push(n);
        Ok(c)
    }

    /// `c_0 = 0`, `c_i = r^(i-1) b^((k-1)^2)` for `1 <= i <= k+1`, `c_{k+2} = b^(k^2)`.
    pub fn checkpoints(&self, k: u32) -> Result<Vec<u64>, ConstructionError> {
        if k == 0 || k > self.k_max {
            return Err(ConstructionError::InvalidParams(format!(
                "level {k} outside 1..={}",
                self.k_max
            )));
        }
        let c = self.raw_checkpoints(k)?;
        if c.windows(2).any(|w| w[0] >= w[1]) {
            let kk = k as u64;
            return Err(ConstructionError::InvalidParams(format!(
                "checkpoints not increasing at k = {k}: r^{k} * b^{} = {} is not below b^{} = {}",
                (kk - 1) * (kk - 1),
                c[c.len() - 2],
                kk * kk,
                c[c.len() - 1]
            )));
        }
        Ok(c)
    }

    pub fn is_degenerate(&self, k: u32) -> bool {
        self.checkpoints(k).is_err()
    }

    pub fn level(&self, k: u32) -> Result<Level, ConstructionError> {
        let checkpoints = self.checkpoints(k)?;
        Ok(Level {
            k,
            block: self.block_size(k)? as usize,
            checkpoints,
        })
    }

    /// Non-degenerate levels `1..=k`.
    pub fn levels_up_to(&self, k: u32) -> Vec<Level> {
        (1..=k.min(self.k_max)).filter_map(|j| self.level(j).ok()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn original_checkpoints() {
        let p = ConstructionParams::original(3, Q).unwrap();
        assert_eq!(p.checkpoints(1).unwrap(), vec![0, 1, 3, 100]);
        assert_eq!(
            p.checkpoints(2).unwrap(),
            vec![0, 100, 300, 900, 100_000_000]
        );
        assert_eq!(
            p.checkpoints(3).unwrap(),
            vec![
                0,
                100_000_000,
                300_000_000,
                900_000_000,
                2_700_000_000,
                1_000_000_000_000_000_000
            ]
        );
    }

    #[test]
    fn scaled_checkpoints() {
        let p = ConstructionParams::new(2, 2, 2, Q).unwrap();
        assert_eq!(p.checkpoints(2).unwrap(), vec![0, 2, 4, 8, 16]);
        // level 1 has c_2 = 2 = N(1), so it carries no Z elements
        assert!(p.is_degenerate(1));
        assert_eq!(p.levels_up_to(2).len(), 1);
    }

    #[test]
    fn rejections() {
        assert!(ConstructionParams::new(1, 3, 1, Q).is_err());
        assert!(ConstructionParams::new(10, 1, 1, Q).is_err());
        assert!(ConstructionParams::new(10, 3, 0, Q).is_err());
        // 3^2 * 2 = 18 > 16
        let err = ConstructionParams::new(2, 3, 2, Q).unwrap_err();
        assert!(err.to_string().contains("18"), "{err}");
        // b = r fails at k = 1
        assert!(ConstructionParams::new(3, 3, 1, Q).is_err());
        assert!(ConstructionParams::new(100, 3, 4, Q).is_err());
    }

    #[test]
    fn level_layout() {
        let p = ConstructionParams::new(10, 3, 1, Q).unwrap();
        let l = p.level(1).unwrap();
        assert_eq!(l.block, 10);
        assert_eq!(l.positions(), &[1, 3]);
        assert_eq!(l.target_letters(), &[0, 1]);
        assert_eq!(l.z_length(), 9);
    }
}
