//! Work estimates in elementary bit-operations, and the guard that refuses
//! runs whose estimate is over budget.

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u128 = 100_000_000_000;
pub const BUDGET_ENV: &str = "TEACHLAB_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget(u128::MAX)
    }

    /// Default budget, overridden by `TEACHLAB_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => parse_ops(&v).map(Budget),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn check(&self, estimate: u128) -> Result<()> {
        if estimate > self.0 {
            Err(Error::BudgetExceeded { estimate, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Accepts plain integers and `1e11`-style powers of ten.
pub fn parse_ops(s: &str) -> Result<u128> {
    let s = s.trim().replace('_', "");
    let bad = || Error::Usage(format!("cannot parse budget {s:?}"));
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let mant: u128 = mant.parse().map_err(|_| bad())?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        return 10u128.checked_pow(exp).and_then(|p| p.checked_mul(mant)).ok_or_else(bad);
    }
    s.parse().map_err(|_| bad())
}

/// `C(n, r)` saturating at `u128::MAX`.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `sum_{t=1..=k} C(points, t) * 2^t * concepts`: cost of scanning every
/// restriction with at most `k` points.
pub fn restriction_scan_ops(points: usize, concepts: usize, k: usize) -> u128 {
    (1..=k.min(points)).fold(0u128, |acc, t| {
        let term = binomial(points, t)
            .saturating_mul(1u128 << t.min(127))
            .saturating_mul(concepts as u128);
        acc.saturating_add(term)
    })
}

/// `sum_{s=0..=cap} C(points, s) * concepts`: cost of an exhaustive subset search.
pub fn subset_scan_ops(points: usize, concepts: usize, cap: usize) -> u128 {
    (0..=cap.min(points)).fold(0u128, |acc, s| {
        acc.saturating_add(binomial(points, s).saturating_mul(concepts as u128))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(60, 2), 1770);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn scan_estimate_for_headtail_desk_instance() {
        // (60*2 + 1770*4) restrictions over 171528 concepts
        assert_eq!(restriction_scan_ops(60, 171_528, 2), 7200 * 171_528);
    }

    #[test]
    fn budget_parsing_and_guard() {
        assert_eq!(parse_ops("1e11").unwrap(), DEFAULT_BUDGET);
        assert_eq!(parse_ops("2_000").unwrap(), 2000);
        assert!(parse_ops("lots").is_err());
        assert!(Budget(10).check(11).is_err());
        assert!(Budget(10).check(10).is_ok());
    }
}
