//! Unreduced values `(rat + irr·√d) / den` with integer coefficients.
//!
//! This is the workhorse behind every floor on the decision path: the
//! coefficients grow like `b^k`, so nothing here ever normalizes by a gcd.
//! Signs are decided by comparing squares, never by approximation.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::NumError;

/// `(rat + irr·√radicand) / den` with `den > 0`.
///
/// `radicand` is `None` for rationals, in which case `irr` is always zero.
#[derive(Clone, Debug)]
pub struct QuadraticValue {
    rat: BigInt,
    irr: BigInt,
    den: BigInt,
    radicand: Option<BigInt>,
}

/// Sign of `a + c·√d` for `d > 0`.
pub fn surd_sign(a: &BigInt, c: &BigInt, d: &BigInt) -> Ordering {
    let sa = a.sign();
    let sc = c.sign();
    match (sa, sc) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ord(s),
        (x, y) if x == y => sign_to_ord(x),
        _ => {
            // opposite signs: whichever magnitude wins decides
            let lhs = a * a;
            let rhs = c * c * d;
            match lhs.cmp(&rhs) {
                Ordering::Equal => Ordering::Equal,
                Ordering::Greater => sign_to_ord(sa),
                Ordering::Less => sign_to_ord(sc),
            }
        }
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl QuadraticValue {
    pub fn integer(n: BigInt) -> Self {
        QuadraticValue {
            rat: n,
            irr: BigInt::zero(),
            den: BigInt::one(),
            radicand: None,
        }
    }

    /// Builds `(rat + irr·√radicand)/den`. `den` must be nonzero; its sign is
    /// folded into the numerator.
    pub fn new(rat: BigInt, irr: BigInt, den: BigInt, radicand: Option<BigInt>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (rat, irr, den) = if den.is_negative() {
            (-rat, -irr, -den)
        } else {
            (rat, irr, den)
        };
        match radicand {
            Some(d) if !irr.is_zero() => QuadraticValue {
                rat,
                irr,
                den,
                radicand: Some(d),
            },
            _ => QuadraticValue {
                rat,
                irr: BigInt::zero(),
                den,
                radicand: None,
            },
        }
    }

    pub fn rat(&self) -> &BigInt {
        &self.rat
    }

    pub fn irr(&self) -> &BigInt {
        &self.irr
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        self.radicand.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_none()
    }

    pub fn signum(&self) -> Ordering {
        match &self.radicand {
            None => sign_to_ord(self.rat.sign()),
            Some(d) => surd_sign(&self.rat, &self.irr, d),
        }
    }

    /// Compares against the integer `n`.
    pub fn cmp_integer(&self, n: &BigInt) -> Ordering {
        let shifted = &self.rat - n * &self.den;
        match &self.radicand {
            None => sign_to_ord(shifted.sign()),
            Some(d) => surd_sign(&shifted, &self.irr, d),
        }
    }

    fn common_radicand(&self, other: &Self) -> Result<Option<BigInt>, NumError> {
        match (&self.radicand, &other.radicand) {
            (None, None) => Ok(None),
            (Some(d), None) | (None, Some(d)) => Ok(Some(d.clone())),
            (Some(d1), Some(d2)) if d1 == d2 => Ok(Some(d1.clone())),
            (Some(d1), Some(d2)) => Err(NumError::IncompatibleRadicands(d1.clone(), d2.clone())),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, NumError> {
        let d = self.common_radicand(other)?;
        Ok(QuadraticValue::new(
            &self.rat * &other.den + &other.rat * &self.den,
            &self.irr * &other.den + &other.irr * &self.den,
            &self.den * &other.den,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, NumError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_cmp(&self, other: &Self) -> Result<Ordering, NumError> {
        Ok(self.checked_sub(other)?.signum())
    }

    pub fn neg(&self) -> Self {
        QuadraticValue {
            rat: -&self.rat,
            irr: -&self.irr,
            den: self.den.clone(),
            radicand: self.radicand.clone(),
        }
    }

    /// Multiplies by an integer.
    pub fn scale(&self, m: &BigInt) -> Self {
        QuadraticValue::new(&self.rat * m, &self.irr * m, self.den.clone(), self.radicand.clone())
    }

    pub fn add_integer(&self, n: &BigInt) -> Self {
        QuadraticValue {
            rat: &self.rat + n * &self.den,
            irr: self.irr.clone(),
            den: self.den.clone(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn sub_integer(&self, n: &BigInt) -> Self {
        QuadraticValue {
            rat: &self.rat - n * &self.den,
            irr: self.irr.clone(),
            den: self.den.clone(),
            radicand: self.radicand.clone(),
        }
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        let d = match &self.radicand {
            None => return self.rat.div_floor(&self.den),
            Some(d) => d,
        };
        // irr·√d lies in [s, s+1) (or (-s-1, -s]) for s = isqrt(irr²·d)
        let s = (&self.irr * &self.irr * d).sqrt();
        let (lo_num, hi_num) = if self.irr.is_positive() {
            (&self.rat + &s, &self.rat + &s + 1u32)
        } else {
            (&self.rat - &s - 1u32, &self.rat - &s)
        };
        let mut n = lo_num.div_floor(&self.den);
        let hi = hi_num.div_floor(&self.den);
        while n < hi && self.cmp_integer(&(&n + 1u32)) != Ordering::Less {
            n += 1u32;
        }
        debug_assert!(self.cmp_integer(&n) != Ordering::Less);
        n
    }

    /// Floor, searched first in `[base, base + width]`.
    ///
    /// The window is only a search hint: the result is verified exactly and
    /// falls back to [`QuadraticValue::floor`] when the value lies outside it.
    pub fn floor_near(&self, base: &BigInt, width: u32) -> BigInt {
        let probe = SignProbe::new(self, base);
        if probe.sign_at(0) == Ordering::Less
            || probe.sign_at(u64::from(width) + 1) != Ordering::Less
        {
            return self.floor();
        }
        // invariant: sign_at(lo) >= 0, sign_at(hi) < 0
        let (mut lo, mut hi) = (0u64, u64::from(width) + 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe.sign_at(mid) == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        base + BigInt::from(lo)
    }

    pub fn frac(&self) -> Self {
        self.sub_integer(&self.floor())
    }

    pub fn is_integer(&self) -> bool {
        self.radicand.is_none() && self.rat.is_multiple_of(&self.den)
    }
}

/// Evaluates `sign(value - (base + t))` for many small `t` with one squaring
/// of the large coefficients.
struct SignProbe<'a> {
    shifted: BigInt,
    den: &'a BigInt,
    irr: &'a BigInt,
    squares: Option<ProbeSquares>,
}

struct ProbeSquares {
    shifted_sq: BigInt,
    twice_shifted_den: BigInt,
    den_sq: BigInt,
    irr_sq_d: BigInt,
}

impl<'a> SignProbe<'a> {
    fn new(v: &'a QuadraticValue, base: &BigInt) -> Self {
        let shifted = &v.rat - base * &v.den;
        let squares = v.radicand.as_ref().map(|d| ProbeSquares {
            shifted_sq: &shifted * &shifted,
            twice_shifted_den: &shifted * &v.den * 2u32,
            den_sq: &v.den * &v.den,
            irr_sq_d: &v.irr * &v.irr * d,
        });
        SignProbe {
            shifted,
            den: &v.den,
            irr: &v.irr,
            squares,
        }
    }

    fn sign_at(&self, t: u64) -> Ordering {
        let t_big = BigInt::from(t);
        let lin = &self.shifted - &t_big * self.den;
        let sq = match &self.squares {
            None => return sign_to_ord(lin.sign()),
            Some(sq) => sq,
        };
        let sl = lin.sign();
        let si = self.irr.sign();
        match (sl, si) {
            (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ord(s),
            (x, y) if x == y => sign_to_ord(x),
            _ => {
                // lin² = shifted² − 2t·shifted·den + t²·den²
                let lin_sq = &sq.shifted_sq - &t_big * &sq.twice_shifted_den
                    + &t_big * &t_big * &sq.den_sq;
                match lin_sq.cmp(&sq.irr_sq_d) {
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => sign_to_ord(sl),
                    Ordering::Less => sign_to_ord(si),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(r: i64, i: i64, den: i64, d: Option<i64>) -> QuadraticValue {
        QuadraticValue::new(r.into(), i.into(), den.into(), d.map(BigInt::from))
    }

    #[test]
    fn surd_sign_cases() {
        let two = BigInt::from(2);
        assert_eq!(surd_sign(&(-1).into(), &1.into(), &two), Ordering::Greater);
        assert_eq!(surd_sign(&(-2).into(), &1.into(), &two), Ordering::Less);
        assert_eq!(surd_sign(&3.into(), &(-2).into(), &two), Ordering::Greater);
        assert_eq!(surd_sign(&0.into(), &0.into(), &two), Ordering::Equal);
    }

    #[test]
    fn floor_of_512_sqrt2() {
        assert_eq!(q(0, 512, 1, Some(2)).floor(), BigInt::from(724));
        assert_eq!(q(0, -512, 1, Some(2)).floor(), BigInt::from(-725));
        assert_eq!(q(7, 0, -3, None).floor(), BigInt::from(-3));
    }

    #[test]
    fn floor_near_matches_floor_inside_and_outside_window() {
        let v = q(3, 5, 7, Some(3)); // (3 + 5√3)/7 ≈ 1.665
        for base in -3..4 {
            assert_eq!(v.floor_near(&BigInt::from(base), 2), BigInt::from(1));
        }
        let big = q(0, 1 << 40, 3, Some(5));
        assert_eq!(big.floor_near(&BigInt::zero(), 4), big.floor());
    }
}
