//! Per-run operation counters.
//!
//! Real-endpoint counts (`adds`, `muls`, ...) follow the endpoint operation
//! counts of the textbook interval formulas: two additions per interval
//! addition, four products and six comparisons per interval multiplication,
//! two divisions plus a multiplication per interval division. The `iv_*`
//! fields count calls of interval-level operations, which is the unit of the
//! `c·k` cost model.

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// How integer powers are weighed when counting interval operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CostConvention {
    /// Every elementary node costs one unit.
    #[default]
    Uniform,
    /// `x^k` costs `⌈log₂ k⌉` units (the repeated-squaring depth).
    Refined,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
    pub comparisons: u64,
    pub f_evals: u64,
    pub j_evals: u64,
    pub inversions: u64,
    pub contractor_calls: u64,

    pub iv_add: u64,
    pub iv_sub: u64,
    pub iv_mul: u64,
    pub iv_div: u64,
    pub iv_neg: u64,
    pub iv_pow: u64,
    /// Sum of `⌈log₂ k⌉` over all power calls.
    pub iv_pow_steps: u64,
    /// Divisions whose divisor contained zero and were hulled.
    pub extended_divs: u64,
    pub box_diams: u64,
}

impl OpCounters {
    pub fn new() -> OpCounters {
        OpCounters::default()
    }

    pub fn reset(&mut self) {
        *self = OpCounters::default();
    }

    /// Accumulates another run's counters (for merging parallel work).
    pub fn merge(&mut self, other: &OpCounters) {
        *self += other;
    }

    /// Interval-level operation total under the given convention.
    pub fn interval_ops(&self, convention: CostConvention) -> u64 {
        let pow = match convention {
            CostConvention::Uniform => self.iv_pow,
            CostConvention::Refined => self.iv_pow_steps,
        };
        self.iv_add + self.iv_sub + self.iv_mul + self.iv_div + self.iv_neg + pow
    }

    /// Real-endpoint operation total.
    pub fn real_ops(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs + self.comparisons
    }
}

impl AddAssign<&OpCounters> for OpCounters {
    fn add_assign(&mut self, o: &OpCounters) {
        self.adds += o.adds;
        self.subs += o.subs;
        self.muls += o.muls;
        self.divs += o.divs;
        self.comparisons += o.comparisons;
        self.f_evals += o.f_evals;
        self.j_evals += o.j_evals;
        self.inversions += o.inversions;
        self.contractor_calls += o.contractor_calls;
        self.iv_add += o.iv_add;
        self.iv_sub += o.iv_sub;
        self.iv_mul += o.iv_mul;
        self.iv_div += o.iv_div;
        self.iv_neg += o.iv_neg;
        self.iv_pow += o.iv_pow;
        self.iv_pow_steps += o.iv_pow_steps;
        self.extended_divs += o.extended_divs;
        self.box_diams += o.box_diams;
    }
}

/// `⌈log₂ k⌉`, zero for `k <= 1`.
pub fn ceil_log2(k: u32) -> u64 {
    if k <= 1 {
        0
    } else {
        u64::from(32 - (k - 1).leading_zeros())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(10), 4);
    }

    #[test]
    fn merge_sums_fieldwise() {
        let mut a = OpCounters {
            adds: 2,
            iv_mul: 1,
            ..Default::default()
        };
        let b = OpCounters {
            adds: 3,
            f_evals: 1,
            ..Default::default()
        };
        a.merge(&b);
        assert_eq!(a.adds, 5);
        assert_eq!(a.iv_mul, 1);
        assert_eq!(a.f_evals, 1);
    }
}
