//! Directed rounding for `f64` endpoint arithmetic.
//!
//! Stable Rust gives no access to the FPU rounding mode (LLVM assumes
//! round-to-nearest everywhere), so the downward and upward results are
//! recovered from the round-to-nearest result with error-free
//! transformations: TwoSum for addition, a fused multiply-add residual for
//! multiplication and division. When the residual is zero the nearest result
//! is exact and is returned unchanged; otherwise it is stepped by one ulp in
//! the requested direction. This yields the correctly rounded directed
//! result, not just a widened one.
//!
//! The residual tricks lose their exactness when intermediate values are
//! subnormal, so results in that range are widened unconditionally.

/// Below this magnitude a product or quotient residual may have underflowed.
const TINY: f64 = 1.0e-290;

thread_local! {
    static FAULT: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

/// Makes `add_up` round toward negative infinity on the current thread.
/// Exists so that the invariant battery can demonstrate that it catches a
/// rounding bug; never enable it in real runs.
pub fn inject_rounding_fault(on: bool) {
    FAULT.with(|f| f.set(on));
}

pub fn rounding_fault_injected() -> bool {
    FAULT.with(|f| f.get())
}

#[inline]
fn step_down(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x.next_down()
    }
}

#[inline]
fn step_up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        f64::MIN
    } else {
        x.next_up()
    }
}

/// Exact error of `a + b` given `s = fl(a + b)` (Knuth's TwoSum).
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        // Overflow of two finite operands rounds to +inf under nearest.
        if s == f64::INFINITY && a.is_finite() && b.is_finite() {
            return f64::MAX;
        }
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        step_down(s)
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    if rounding_fault_injected() {
        return add_down(a, b);
    }
    let s = a + b;
    if !s.is_finite() {
        if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
            return f64::MIN;
        }
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        step_up(s)
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Product with the convention `0 * inf = 0` used for interval endpoints.
#[inline]
fn mul_nearest(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = mul_nearest(a, b);
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    if !p.is_finite() {
        if p == f64::INFINITY && a.is_finite() && b.is_finite() {
            return f64::MAX;
        }
        return p;
    }
    if p.abs() < TINY {
        return step_down(p);
    }
    if a.mul_add(b, -p) < 0.0 {
        step_down(p)
    } else {
        p
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = mul_nearest(a, b);
    if p == 0.0 && (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    if !p.is_finite() {
        if p == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
            return f64::MIN;
        }
        return p;
    }
    if p.abs() < TINY {
        return step_up(p);
    }
    if a.mul_add(b, -p) > 0.0 {
        step_up(p)
    } else {
        p
    }
}

/// Sign of `a / b - q` where `q = fl(a / b)`, from the residual `a - q b`.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if b > 0.0 {
        r
    } else {
        -r
    }
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.is_nan() {
        return f64::NEG_INFINITY;
    }
    if !q.is_finite() {
        if q == f64::INFINITY && a.is_finite() && b != 0.0 {
            return f64::MAX;
        }
        return q;
    }
    if !a.is_finite() || !b.is_finite() {
        return q;
    }
    if q == 0.0 {
        if a == 0.0 {
            return 0.0;
        }
        // Underflow to zero; the exact quotient has the sign of a/b.
        return if (a > 0.0) == (b > 0.0) {
            0.0
        } else {
            -f64::from_bits(1)
        };
    }
    if q.abs() < TINY || a.abs() < TINY {
        return step_down(q);
    }
    if div_err_sign(a, b, q) < 0.0 {
        step_down(q)
    } else {
        q
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.is_nan() {
        return f64::INFINITY;
    }
    if !q.is_finite() {
        if q == f64::NEG_INFINITY && a.is_finite() && b != 0.0 {
            return f64::MIN;
        }
        return q;
    }
    if !a.is_finite() || !b.is_finite() {
        return q;
    }
    if q == 0.0 {
        if a == 0.0 {
            return 0.0;
        }
        return if (a > 0.0) == (b > 0.0) {
            f64::from_bits(1)
        } else {
            0.0
        };
    }
    if q.abs() < TINY || a.abs() < TINY {
        return step_up(q);
    }
    if div_err_sign(a, b, q) > 0.0 {
        step_up(q)
    } else {
        q
    }
}

/// Powers by repeated squaring, least significant bit first. The schedule is
/// shared by the rounded variants and [`pow_nearest`], which keeps a plain
/// floating-point evaluation inside the rounded enclosure.
#[inline]
fn pow_with(x: f64, k: u32, mul: impl Fn(f64, f64) -> f64) -> f64 {
    let mut result = 1.0;
    let mut base = x;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(result, base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(base, base);
        }
    }
    result
}

/// `x^k` rounded down, for `x >= 0`.
pub fn pow_down_nonneg(x: f64, k: u32) -> f64 {
    debug_assert!(x >= 0.0);
    pow_with(x, k, mul_down)
}

/// `x^k` rounded up, for `x >= 0`.
pub fn pow_up_nonneg(x: f64, k: u32) -> f64 {
    debug_assert!(x >= 0.0);
    pow_with(x, k, mul_up)
}

/// `x^k` in round-to-nearest with the same squaring schedule as the rounded
/// variants.
pub fn pow_nearest(x: f64, k: u32) -> f64 {
    let m = pow_with(x.abs(), k, mul_nearest);
    if x < 0.0 && k % 2 == 1 {
        -m
    } else {
        m
    }
}

/// Number of real multiplications performed by the squaring schedule.
pub fn pow_mul_count(k: u32) -> u64 {
    if k == 0 {
        return 0;
    }
    let bits = 32 - k.leading_zeros();
    let ones = k.count_ones();
    // squarings + multiplications into the accumulator
    u64::from(bits - 1 + ones)
}

/// Largest `r >= 0` (up to one ulp) with `r^k <= x`, for `x >= 0`.
pub fn root_down(x: f64, k: u32) -> f64 {
    debug_assert!(k >= 1 && x >= 0.0);
    if x == 0.0 || k == 1 {
        return x;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut r = x.powf(1.0 / f64::from(k)).next_down().max(0.0);
    while r > 0.0 && pow_up_nonneg(r, k) > x {
        r = r.next_down().max(0.0);
    }
    r
}

/// Smallest `r >= 0` (up to one ulp) with `r^k >= x`, for `x >= 0`.
pub fn root_up(x: f64, k: u32) -> f64 {
    debug_assert!(k >= 1 && x >= 0.0);
    if x == 0.0 || k == 1 {
        return x;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut r = x.powf(1.0 / f64::from(k)).next_up();
    while pow_down_nonneg(r, k) < x {
        r = r.next_up();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sums_are_not_widened() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(1.0, 4.0), 4.0);
        assert_eq!(mul_up(2.0, 5.0), 10.0);
        assert_eq!(div_down(1.0, 4.0), 0.25);
    }

    #[test]
    fn inexact_results_bracket_the_truth() {
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert!(lo < hi);
        assert_eq!(hi, lo.next_up());
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert_eq!(hi, lo.next_up());
        assert!(mul_down(lo, 3.0) <= 1.0 && mul_up(hi, 3.0) >= 1.0);
    }

    #[test]
    fn overflow_saturates_toward_the_right_side() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_down(1e300, 1e300), f64::MAX);
        assert_eq!(mul_up(-1e300, 1e300), f64::MIN);
        assert_eq!(mul_down(0.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn roots_bracket() {
        for &(x, k) in &[(2.0, 2u32), (10.0, 10), (1e-5, 3), (7.5, 9)] {
            let lo = root_down(x, k);
            let hi = root_up(x, k);
            assert!(pow_up_nonneg(lo, k) <= x);
            assert!(pow_down_nonneg(hi, k) >= x);
            assert!(hi - lo <= 4.0 * f64::EPSILON * hi.max(1.0));
        }
    }

    #[test]
    fn squaring_schedule_count() {
        assert_eq!(pow_mul_count(1), 1);
        assert_eq!(pow_mul_count(2), 2);
        assert_eq!(pow_mul_count(10), 5);
    }
}
