//! Counted interval operations.
//!
//! These wrap the pure operators on [`Interval`] and charge the run's
//! [`OpCounters`]. Every routine that participates in cost accounting goes
//! through here.

use crate::counters::{ceil_log2, OpCounters};
use crate::error::IntervalError;
use crate::interval::{DivPieces, Interval};
use crate::round;

#[inline]
pub fn add(a: Interval, b: Interval, c: &mut OpCounters) -> Interval {
    c.iv_add += 1;
    c.adds += 2;
    a + b
}

#[inline]
pub fn sub(a: Interval, b: Interval, c: &mut OpCounters) -> Interval {
    c.iv_sub += 1;
    c.subs += 2;
    a - b
}

#[inline]
pub fn mul(a: Interval, b: Interval, c: &mut OpCounters) -> Interval {
    c.iv_mul += 1;
    c.muls += 4;
    c.comparisons += 6;
    a * b
}

#[inline]
pub fn neg(a: Interval, c: &mut OpCounters) -> Interval {
    c.iv_neg += 1;
    -a
}

/// Division for a divisor that excludes zero.
pub fn div(a: Interval, b: Interval, c: &mut OpCounters) -> Result<Interval, IntervalError> {
    c.iv_div += 1;
    c.divs += 2;
    c.muls += 4;
    c.comparisons += 6;
    a.checked_div(b)
}

/// Two-piece extended division. Charged as a division plus the comparisons
/// that classify the divisor.
pub fn extended_div(a: Interval, b: Interval, c: &mut OpCounters) -> DivPieces {
    c.iv_div += 1;
    c.divs += 2;
    if b.contains_zero() {
        c.extended_divs += 1;
        c.comparisons += 4;
    } else {
        c.muls += 4;
        c.comparisons += 6;
    }
    a.extended_div(b)
}

/// Division as used by natural extensions: hull of the extended pieces.
pub fn div_hull(a: Interval, b: Interval, c: &mut OpCounters) -> Interval {
    extended_div(a, b, c).hull()
}

pub fn powi(a: Interval, k: u32, c: &mut OpCounters) -> Interval {
    c.iv_pow += 1;
    c.iv_pow_steps += ceil_log2(k);
    let per_endpoint = round::pow_mul_count(k);
    c.muls += 2 * per_endpoint;
    c.comparisons += 2;
    a.powi(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_increments_match_endpoint_counts() {
        let mut c = OpCounters::new();
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(4.0, 5.0);
        mul(a, b, &mut c);
        assert_eq!((c.muls, c.comparisons, c.iv_mul), (4, 6, 1));
        add(a, b, &mut c);
        assert_eq!((c.adds, c.iv_add), (2, 1));
        sub(a, b, &mut c);
        assert_eq!(c.subs, 2);
        div(a, b, &mut c).unwrap();
        assert_eq!((c.divs, c.muls), (2, 8));
    }

    #[test]
    fn extended_division_is_flagged() {
        let mut c = OpCounters::new();
        let q = div_hull(Interval::new(1.0, 2.0), Interval::new(-1.0, 1.0), &mut c);
        assert_eq!(q, Interval::ENTIRE);
        assert_eq!(c.extended_divs, 1);
    }
}
