//! Closed real intervals with outward-rounded endpoints.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::IntervalError;
use crate::round;

/// A closed interval `[lo, hi]` of extended reals, or the empty set.
///
/// The empty interval is a dedicated sentinel (both endpoints NaN), so for
/// every non-empty value `lo <= hi` holds and `lo < +inf`, `hi > -inf`.
#[derive(Clone, Copy, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::NAN,
        hi: f64::NAN,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`.
    ///
    /// Panics if the endpoints do not describe a non-empty interval; use
    /// [`Interval::try_new`] for untrusted input.
    pub fn new(lo: f64, hi: f64) -> Interval {
        match Interval::try_new(lo, hi) {
            Ok(iv) => iv,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidBounds { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Internal constructor for endpoints produced by rounded arithmetic.
    /// NaN endpoints (an `inf - inf` somewhere) collapse to the whole line.
    #[inline]
    pub(crate) fn from_rounded(lo: f64, hi: f64) -> Interval {
        let lo = if lo.is_nan() { f64::NEG_INFINITY } else { lo };
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        debug_assert!(lo <= hi, "rounded endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
    }

    /// Lower endpoint (NaN for the empty interval).
    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Upper endpoint (NaN for the empty interval).
    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        !self.is_empty() && self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        !self.is_empty() && self.lo.is_finite() && self.hi.is_finite()
    }

    #[inline]
    pub fn contains_zero(&self) -> bool {
        self.contains_point(0.0)
    }

    #[inline]
    pub fn contains_point(&self, x: f64) -> bool {
        !self.is_empty() && self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`. The empty interval is a subset of everything.
    pub fn subset_of(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        !other.is_empty() && other.lo <= self.lo && self.hi <= other.hi
    }

    /// Midpoint, rounded to nearest and clamped into the interval.
    pub fn mid(&self) -> Result<f64, IntervalError> {
        if self.is_empty() {
            return Err(IntervalError::EmptyInterval);
        }
        let (lo, hi) = (self.lo, self.hi);
        let m = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let m = 0.5 * lo + 0.5 * hi;
                if m.is_finite() {
                    m
                } else {
                    0.5 * (lo + hi)
                }
            }
            (false, false) => 0.0,
            (false, true) => {
                if hi >= 0.0 {
                    -f64::MAX.min(1.0 + hi.abs())
                } else {
                    f64::MIN.max(2.0 * hi)
                }
            }
            (true, false) => {
                if lo <= 0.0 {
                    f64::MAX.min(1.0 + lo.abs())
                } else {
                    f64::MAX.min(2.0 * lo)
                }
            }
        };
        Ok(m.clamp(lo, hi))
    }

    /// Radius `(hi - lo) / 2`, rounded upward.
    pub fn rad(&self) -> Result<f64, IntervalError> {
        Ok(0.5 * self.diam()?)
    }

    /// Width `hi - lo`, rounded upward.
    pub fn diam(&self) -> Result<f64, IntervalError> {
        if self.is_empty() {
            return Err(IntervalError::EmptyInterval);
        }
        Ok(round::sub_up(self.hi, self.lo))
    }

    /// Magnitude `max |x|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude `min |x|` over the interval; zero when it contains zero.
    pub fn mig(&self) -> f64 {
        if self.is_empty() {
            return f64::NAN;
        }
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Splits at the midpoint. Both halves share the midpoint.
    pub fn split(&self) -> Result<(Interval, Interval), IntervalError> {
        let m = self.mid()?;
        Ok((
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        ))
    }

    /// Division `self / rhs` for a divisor that excludes zero, computed as
    /// multiplication by the reciprocal interval `[1/hi, 1/lo]`.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if self.is_empty() || rhs.is_empty() {
            return Ok(Interval::EMPTY);
        }
        if rhs.contains_zero() {
            return Err(IntervalError::ZeroInDivisor);
        }
        Ok(self * rhs.recip_nonzero())
    }

    fn recip_nonzero(self) -> Interval {
        Interval::from_rounded(round::div_down(1.0, self.hi), round::div_up(1.0, self.lo))
    }

    /// Two-piece extended division. The union of the returned pieces encloses
    /// `{x / y : x ∈ self, y ∈ rhs, y ≠ 0}`.
    pub fn extended_div(self, rhs: Interval) -> DivPieces {
        if self.is_empty() || rhs.is_empty() {
            return DivPieces::One(Interval::EMPTY);
        }
        if !rhs.contains_zero() {
            return DivPieces::One(self * rhs.recip_nonzero());
        }
        if rhs.lo == 0.0 && rhs.hi == 0.0 {
            // No admissible y ≠ 0.
            return DivPieces::One(Interval::EMPTY);
        }
        if self.contains_zero() {
            if self.lo == 0.0 && self.hi == 0.0 {
                return DivPieces::One(Interval::ZERO);
            }
            return DivPieces::One(Interval::ENTIRE);
        }
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (rhs.lo, rhs.hi);
        if b < 0.0 {
            // numerator strictly negative
            if c == 0.0 {
                DivPieces::One(Interval::from_rounded(
                    f64::NEG_INFINITY,
                    round::div_up(b, d),
                ))
            } else if d == 0.0 {
                DivPieces::One(Interval::from_rounded(round::div_down(b, c), f64::INFINITY))
            } else {
                DivPieces::Two(
                    Interval::from_rounded(f64::NEG_INFINITY, round::div_up(b, d)),
                    Interval::from_rounded(round::div_down(b, c), f64::INFINITY),
                )
            }
        } else {
            // numerator strictly positive
            if c == 0.0 {
                DivPieces::One(Interval::from_rounded(round::div_down(a, d), f64::INFINITY))
            } else if d == 0.0 {
                DivPieces::One(Interval::from_rounded(
                    f64::NEG_INFINITY,
                    round::div_up(a, c),
                ))
            } else {
                DivPieces::Two(
                    Interval::from_rounded(f64::NEG_INFINITY, round::div_up(a, c)),
                    Interval::from_rounded(round::div_down(a, d), f64::INFINITY),
                )
            }
        }
    }

    /// `self^k` with the even/odd range rules; tight up to rounding.
    pub fn powi(self, k: u32) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        if k == 0 {
            return Interval::ONE;
        }
        if k % 2 == 1 {
            let lo = signed_pow_down(self.lo, k);
            let hi = signed_pow_up(self.hi, k);
            Interval::from_rounded(lo, hi)
        } else {
            let lo = round::pow_down_nonneg(self.mig(), k);
            let hi = round::pow_up_nonneg(self.mag(), k);
            Interval::from_rounded(lo, hi)
        }
    }

    /// The set `{x : x^k ∈ self}` intersected with `domain`, hulled.
    pub(crate) fn pow_preimage(self, k: u32, domain: Interval) -> Interval {
        if self.is_empty() || domain.is_empty() {
            return Interval::EMPTY;
        }
        if k == 0 {
            return if self.contains_point(1.0) {
                domain
            } else {
                Interval::EMPTY
            };
        }
        if k % 2 == 1 {
            let lo = if self.lo < 0.0 {
                -round::root_up(-self.lo, k)
            } else {
                round::root_down(self.lo, k)
            };
            let hi = if self.hi < 0.0 {
                -round::root_down(-self.hi, k)
            } else {
                round::root_up(self.hi, k)
            };
            return Interval::from_rounded(lo, hi).intersect(&domain);
        }
        let nonneg = self.intersect(&Interval::new(0.0, f64::INFINITY));
        if nonneg.is_empty() {
            return Interval::EMPTY;
        }
        let r_lo = round::root_down(nonneg.lo, k);
        let r_hi = round::root_up(nonneg.hi, k);
        let pos = Interval::from_rounded(r_lo, r_hi).intersect(&domain);
        let neg = Interval::from_rounded(-r_hi, -r_lo).intersect(&domain);
        pos.hull(&neg)
    }
}

fn signed_pow_down(x: f64, k: u32) -> f64 {
    if x >= 0.0 {
        round::pow_down_nonneg(x, k)
    } else {
        -round::pow_up_nonneg(-x, k)
    }
}

fn signed_pow_up(x: f64, k: u32) -> f64 {
    if x >= 0.0 {
        round::pow_up_nonneg(x, k)
    } else {
        -round::pow_down_nonneg(-x, k)
    }
}

/// Result of an extended division: at most two disjoint pieces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivPieces {
    One(Interval),
    Two(Interval, Interval),
}

impl DivPieces {
    pub fn hull(&self) -> Interval {
        match self {
            DivPieces::One(a) => *a,
            DivPieces::Two(a, b) => a.hull(b),
        }
    }

    pub fn pieces(&self) -> Vec<Interval> {
        match self {
            DivPieces::One(a) => vec![*a],
            DivPieces::Two(a, b) => vec![*a, *b],
        }
    }

    /// Intersects every piece with `domain` and hulls the survivors.
    pub fn intersect_hull(&self, domain: &Interval) -> Interval {
        match self {
            DivPieces::One(a) => a.intersect(domain),
            DivPieces::Two(a, b) => a.intersect(domain).hull(&b.intersect(domain)),
        }
    }

    pub fn contains_point(&self, x: f64) -> bool {
        match self {
            DivPieces::One(a) => a.contains_point(x),
            DivPieces::Two(a, b) => a.contains_point(x) || b.contains_point(x),
        }
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Interval) -> bool {
        (self.is_empty() && other.is_empty()) || (self.lo == other.lo && self.hi == other.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "[{:?}, {:?}]", self.lo, self.hi)
        }
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Interval {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::from_rounded(
            round::add_down(self.lo, rhs.lo),
            round::add_up(self.hi, rhs.hi),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::from_rounded(
            round::sub_down(self.lo, rhs.hi),
            round::sub_up(self.hi, rhs.lo),
        )
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = round::mul_down(a, c)
            .min(round::mul_down(a, d))
            .min(round::mul_down(b, c))
            .min(round::mul_down(b, d));
        let hi = round::mul_up(a, c)
            .max(round::mul_up(a, d))
            .max(round::mul_up(b, c))
            .max(round::mul_up(b, d));
        Interval::from_rounded(lo, hi)
    }
}

/// Division through the natural-extension convention: a divisor containing
/// zero yields the hull of the extended-division pieces.
impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        self.extended_div(rhs).hull()
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn add_examples() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(0.0, 0.0) + iv(-5.0, 7.0), iv(-5.0, 7.0));
        assert_eq!(iv(-1.0, 1.0) + iv(-1.0, 1.0), iv(-2.0, 2.0));
    }

    #[test]
    fn sub_examples() {
        assert_eq!(iv(1.0, 2.0) - iv(1.0, 2.0), iv(-1.0, 1.0));
        assert_eq!(iv(4.0, 6.0) - iv(3.0, 4.0), iv(0.0, 3.0));
        assert_eq!(iv(0.0, 0.0) - iv(2.0, 3.0), iv(-3.0, -2.0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(iv(1.0, 2.0) * iv(4.0, 5.0), iv(4.0, 10.0));
        assert_eq!(iv(0.0, 1.0) * iv(0.0, 1.0), iv(0.0, 1.0));
        assert_eq!(iv(-1.0, 2.0) * iv(-3.0, 4.0), iv(-6.0, 8.0));
    }

    #[test]
    fn div_examples() {
        assert_eq!(
            iv(4.0, 6.0).checked_div(iv(2.0, 2.0)).unwrap(),
            iv(2.0, 3.0)
        );
        let q = iv(1.0, 2.0).checked_div(iv(4.0, 5.0)).unwrap();
        assert!(q.lo() <= 0.2 && q.lo() >= 0.2 - 1e-15);
        assert_eq!(q.hi(), 0.5);
        assert_eq!(
            iv(-2.0, 2.0).checked_div(iv(1.0, 2.0)).unwrap(),
            iv(-2.0, 2.0)
        );
        assert_eq!(
            iv(1.0, 2.0).checked_div(iv(-1.0, 1.0)),
            Err(IntervalError::ZeroInDivisor)
        );
    }

    #[test]
    fn extended_div_examples() {
        assert_eq!(
            iv(1.0, 2.0).extended_div(iv(-1.0, 1.0)),
            DivPieces::Two(iv(f64::NEG_INFINITY, -1.0), iv(1.0, f64::INFINITY))
        );
        assert_eq!(
            iv(0.0, 0.0).extended_div(iv(-1.0, 1.0)),
            DivPieces::One(iv(0.0, 0.0))
        );
        assert_eq!(
            iv(1.0, 2.0).extended_div(iv(0.0, 1.0)),
            DivPieces::One(iv(1.0, f64::INFINITY))
        );
        assert_eq!(
            iv(-1.0, 2.0).extended_div(iv(-1.0, 1.0)),
            DivPieces::One(Interval::ENTIRE)
        );
    }

    #[test]
    fn intersect_and_hull() {
        assert_eq!(iv(0.0, 2.0).intersect(&iv(1.0, 3.0)), iv(1.0, 2.0));
        assert!(iv(0.0, 1.0).intersect(&iv(2.0, 3.0)).is_empty());
        assert_eq!(iv(0.0, 1.0).intersect(&iv(0.0, 1.0)), iv(0.0, 1.0));
        assert!(Interval::EMPTY.intersect(&Interval::ENTIRE).is_empty());
        assert_eq!(iv(0.0, 1.0).hull(&iv(2.0, 3.0)), iv(0.0, 3.0));
    }

    #[test]
    fn scalar_queries() {
        assert_eq!(iv(1.0, 4.0).diam().unwrap(), 3.0);
        assert_eq!(iv(1.0, 2.0).mid().unwrap(), 1.5);
        assert!(iv(-1.0, 1.0).contains_zero());
        assert_eq!(Interval::EMPTY.mid(), Err(IntervalError::EmptyInterval));
        assert_eq!(Interval::EMPTY.diam(), Err(IntervalError::EmptyInterval));
        let m = Interval::ENTIRE.mid().unwrap();
        assert!(Interval::ENTIRE.contains_point(m));
        let m = iv(f64::MAX, f64::INFINITY).mid().unwrap();
        assert!(m >= f64::MAX);
    }

    #[test]
    fn invalid_bounds_are_rejected() {
        assert!(Interval::try_new(2.0, 1.0).is_err());
        assert!(Interval::try_new(f64::NAN, 1.0).is_err());
        assert!(Interval::try_new(f64::INFINITY, f64::INFINITY).is_err());
    }

    #[test]
    fn infinite_endpoints_saturate() {
        let a = iv(0.0, f64::INFINITY);
        let b = iv(f64::NEG_INFINITY, 0.0);
        assert_eq!(a + b, Interval::ENTIRE);
        assert_eq!(a * iv(0.0, 0.0), iv(0.0, 0.0));
        assert_eq!(
            iv(f64::MAX, f64::MAX) + iv(f64::MAX, f64::MAX),
            iv(f64::MAX, f64::INFINITY)
        );
    }

    #[test]
    fn powers_use_range_rules() {
        assert_eq!(iv(-2.0, 1.0).powi(2), iv(0.0, 4.0));
        assert_eq!(iv(-2.0, 1.0).powi(3), iv(-8.0, 1.0));
        assert_eq!(iv(-3.0, -2.0).powi(2), iv(4.0, 9.0));
        assert_eq!(iv(0.5, 2.0).powi(0), iv(1.0, 1.0));
        assert_eq!(iv(1.0, 2.0).powi(10), iv(1.0, 1024.0));
    }

    #[test]
    fn pow_preimage_even_keeps_both_branches() {
        let x = iv(4.0, 9.0).pow_preimage(2, iv(-10.0, 10.0));
        assert!(x.contains_point(-3.0) && x.contains_point(3.0));
        let x = iv(4.0, 9.0).pow_preimage(2, iv(0.0, 10.0));
        assert!(x.lo() <= 2.0 && x.lo() > 1.99 && x.hi() >= 3.0 && x.hi() < 3.01);
        assert!(iv(-2.0, -1.0).pow_preimage(2, Interval::ENTIRE).is_empty());
        let x = iv(-8.0, 27.0).pow_preimage(3, Interval::ENTIRE);
        assert!(x.lo() <= -2.0 && x.hi() >= 3.0);
    }
}
