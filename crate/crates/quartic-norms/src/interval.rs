//! Directed-rounding dyadic floats for rigorous product brackets.
//!
//! A [`Dyadic`] is mantissa * 2^exp with a normalised 128-bit mantissa, so
//! every rounding step carries at most 2^-127 relative error, and the
//! rounding direction is always explicit. An [`Interval`] is a pair of
//! outward-rounded bounds; exact rationals enter through
//! [`Interval::from_ratio`] and the enclosure is preserved by
//! multiplication. The density code turns its exact finite products into
//! f64 value/error pairs through these brackets, so the reported absolute
//! error dominates both the analytic tail and all rounding.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// A positive dyadic rational mantissa * 2^exp, mantissa in [2^127, 2^128).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: u128,
    exp: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

impl Dyadic {
    pub fn one() -> Dyadic {
        Dyadic {
            mantissa: 1 << 127,
            exp: -127,
        }
    }

    /// Round a positive big integer times 2^exp into a normalised dyadic.
    fn from_biguint(value: &BigUint, exp: i64, round: Round) -> Dyadic {
        assert!(!value.is_zero(), "dyadic values are strictly positive");
        let bits = value.bits();
        if bits <= 128 {
            let shift = 128 - bits;
            let mantissa = value.to_u128().expect("fits") << shift;
            return Dyadic {
                mantissa,
                exp: exp - shift as i64,
            };
        }
        let shift = bits - 128;
        let top = (value >> shift).to_u128().expect("128 bits");
        let exact = (value & ((BigUint::from(1u8) << shift) - 1u8)).is_zero();
        let mut mantissa = top;
        let mut exp = exp + shift as i64;
        if round == Round::Up && !exact {
            if mantissa == u128::MAX {
                mantissa = 1 << 127;
                exp += 1;
            } else {
                mantissa += 1;
                if mantissa & (1 << 127) == 0 {
                    // cannot happen: top bit was set and we added 1 below MAX
                    unreachable!();
                }
            }
        }
        Dyadic { mantissa, exp }
    }

    fn mul(self, other: Dyadic, round: Round) -> Dyadic {
        let product = BigUint::from(self.mantissa) * BigUint::from(other.mantissa);
        Dyadic::from_biguint(&product, self.exp + other.exp, round)
    }

    /// Directed conversion to f64 through the top 53 mantissa bits.
    ///
    /// Inside the saturation band the result is exact: m has at most 53
    /// significant bits and scaling by a power of two stays in the normal
    /// range, so no rounding occurs. Outside it, saturate in the valid
    /// direction.
    fn to_f64(self, round: Round) -> f64 {
        let top = (self.mantissa >> 75) as u64;
        let m = match round {
            Round::Down => top,
            // +1 covers the discarded low bits; detecting exactness would
            // only narrow the bracket by one ulp
            Round::Up => top + 1,
        };
        let e = self.exp + 75;
        if e > 971 {
            // value exceeds 2^1023
            return match round {
                Round::Down => f64::MAX,
                Round::Up => f64::INFINITY,
            };
        }
        if e < -900 {
            // value is below 2^-847; avoid the denormal range, where
            // multiplication rounds to nearest instead of directedly
            return match round {
                Round::Down => 0.0,
                Round::Up => 2f64.powi(-800),
            };
        }
        (m as f64) * 2f64.powi(e as i32)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // both mantissas are normalised, so the exponent decides first
        self.exp
            .cmp(&other.exp)
            .then(self.mantissa.cmp(&other.mantissa))
    }
}

/// A closed positive interval [lo, hi] with outward-rounded dyadic ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point_one() -> Interval {
        Interval {
            lo: Dyadic::one(),
            hi: Dyadic::one(),
        }
    }

    /// Enclose a positive rational.
    pub fn from_ratio(value: &BigRational) -> Interval {
        assert!(value.is_positive(), "interval endpoints must be positive");
        Interval::from_ratio_pair(value, value)
    }

    /// Enclose [lo, hi] given as positive rationals.
    pub fn from_ratio_pair(lo: &BigRational, hi: &BigRational) -> Interval {
        debug_assert!(lo <= hi);
        Interval {
            lo: ratio_bound(lo, Round::Down),
            hi: ratio_bound(hi, Round::Up),
        }
    }

    /// Outward f64 bracket (lo rounded down, hi rounded up).
    pub fn to_f64_bracket(self) -> (f64, f64) {
        (self.lo.to_f64(Round::Down), self.hi.to_f64(Round::Up))
    }

    /// Midpoint value and a radius that dominates the true half-width.
    pub fn value_and_error(self) -> (f64, f64) {
        let (lo, hi) = self.to_f64_bracket();
        let value = lo / 2.0 + hi / 2.0;
        // the f64 midpoint may sit slightly off-centre; cover both gaps
        let error = (hi - value).max(value - lo).max(0.0) * (1.0 + 1e-12);
        (value, error)
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;

    fn mul(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.mul(other.lo, Round::Down),
            hi: self.hi.mul(other.hi, Round::Up),
        }
    }
}

/// Directed 128-bit approximation of a positive rational.
///
/// Numerator and denominator are first truncated to their top 192 bits
/// with directed adjustment, so the cost stays O(1) even when the inputs
/// are unreduced products with millions of digits; the truncation costs
/// at most 2^-190 of extra relative width.
fn ratio_bound(value: &BigRational, round: Round) -> Dyadic {
    let (num, num_exp, num_up) = truncate_192(value.numer().magnitude());
    let (den, den_exp, den_up) = truncate_192(value.denom().magnitude());
    // num/den >= num_lo / den_hi and <= num_hi / den_lo
    let (a, b) = match round {
        Round::Down => (num, den_up),
        Round::Up => (num_up, den),
    };
    // scale so the quotient keeps > 128 significant bits
    let scale = 160 + b.bits().saturating_sub(a.bits());
    let scaled = a << scale;
    let q = &scaled / &b;
    let exp = num_exp - den_exp - scale as i64;
    match round {
        Round::Down => Dyadic::from_biguint(&q, exp, Round::Down),
        Round::Up => {
            let exact = (&q * &b) == scaled;
            let q = if exact { q } else { q + 1u8 };
            Dyadic::from_biguint(&q, exp, Round::Up)
        }
    }
}

/// Split a positive integer as [top * 2^shift, (top+1) * 2^shift) with at
/// most 192 significant bits in `top`; returns (lower, shift, upper).
fn truncate_192(n: &BigUint) -> (BigUint, i64, BigUint) {
    let bits = n.bits();
    if bits <= 192 {
        return (n.clone(), 0, n.clone());
    }
    let shift = bits - 192;
    let top = n >> shift;
    let exact = (top.clone() << shift) == *n;
    let upper = if exact { top.clone() } else { &top + 1u8 };
    (top, shift as i64, upper)
}

/// Nearest-enough f64 for display: midpoint of the 128-bit bracket.
/// Exact for zero; handles signs.
pub fn ratio_to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    if value.is_negative() {
        return -ratio_to_f64(&-value);
    }
    let (lo, hi) = Interval::from_ratio(value).to_f64_bracket();
    lo / 2.0 + hi / 2.0
}
