//! Independent oracles for the integration suites. Nothing here calls the
//! library's arithmetic: floors of `(P + Q√d)/R` come from integer square
//! roots, and comparisons from a fixed-point interval enclosure.

#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Bits used by the interval oracle before it starts refining.
pub const ORACLE_BITS_VAR: &str = "BREGULAR_ORACLE_BITS";

pub fn oracle_bits() -> u32 {
    std::env::var(ORACLE_BITS_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(200)
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `⌊(p + q√d)/r⌋` for `r ≠ 0`, `d = 0` meaning a rational value.
pub fn floor_quad(p: &BigInt, q: &BigInt, d: &BigInt, r: &BigInt) -> BigInt {
    let (p, q, r) = if r.is_negative() { (-p, -q, -r) } else { (p.clone(), q.clone(), r.clone()) };
    if q.is_zero() || d.is_zero() {
        return p.div_floor(&r);
    }
    let root = (&q * &q * d).sqrt();
    let exact = &root * &root == &q * &q * d;
    // ⌊q√d⌋
    let t = if q.is_positive() {
        root
    } else if exact {
        -root
    } else {
        -root - 1
    };
    (p + t).div_floor(&r)
}

/// `x = (n0 + n1√d)/den` with `d` square-free or 0.
#[derive(Clone, Debug)]
pub struct Quad {
    pub n0: BigInt,
    pub n1: BigInt,
    pub den: BigInt,
}

impl Quad {
    pub fn rational(num: i64, den: i64) -> Self {
        Quad {
            n0: big(num),
            n1: big(0),
            den: big(den),
        }
    }

    /// `(n0 + n1√d)/den`.
    pub fn new(n0: i64, n1: i64, den: i64) -> Self {
        Quad {
            n0: big(n0),
            n1: big(n1),
            den: big(den),
        }
    }
}

/// One battery instance with its oracle description.
#[derive(Clone, Debug)]
pub struct Case {
    pub alpha: &'static str,
    pub beta: &'static str,
    pub base: u32,
    pub d: i64,
    pub a: Quad,
    pub b: Quad,
}

impl Case {
    pub fn rational(&self) -> bool {
        self.d == 0
    }

    /// `(num/den − β)/α` as `(P + Q√d)/R`.
    fn shifted_quotient(&self, pk_num: &BigInt, pk_den: &BigInt) -> (BigInt, BigInt, BigInt) {
        let d = big(self.d);
        let (a0, a1, ad) = (&self.a.n0, &self.a.n1, &self.a.den);
        let (b0, b1, bd) = (&self.b.n0, &self.b.n1, &self.b.den);
        // num/den − β = (u + v√d)/(bd·den)
        let u = pk_num * bd - b0 * pk_den;
        let v = -(b1 * pk_den);
        // dividing by (a0 + a1√d)/ad multiplies by ad·(a0 − a1√d)/(a0² − a1²d)
        let p = ad * (&u * a0 - &v * a1 * &d);
        let q = ad * (&v * a0 - &u * a1);
        let r = bd * pk_den * (a0 * a0 - a1 * a1 * &d);
        (p, q, r)
    }

    /// `(b^k − β)/α` for any integer `k`.
    fn threshold(&self, k: i64) -> (BigInt, BigInt, BigInt) {
        let bb = big(self.base as i64);
        if k >= 0 {
            self.shifted_quotient(&bb.pow(k as u32), &BigInt::one())
        } else {
            self.shifted_quotient(&BigInt::one(), &bb.pow((-k) as u32))
        }
    }

    /// Least `n ≥ 0` with `αn + β > 0`.
    pub fn n_min(&self) -> BigInt {
        let (p, q, r) = self.shifted_quotient(&BigInt::zero(), &BigInt::one());
        let first: BigInt = floor_quad(&p, &q, &big(self.d), &r) + 1;
        first.max(BigInt::zero())
    }

    /// `f_k = #{n ≥ n_min : u_n = k}`.
    pub fn level_count(&self, k: i64) -> BigInt {
        let n_min = self.n_min();
        let lo = self.level_entry(k).max(n_min.clone());
        let hi = self.level_entry(k + 1).max(n_min);
        hi - lo
    }

    pub fn threshold_floor(&self, k: i64) -> BigInt {
        let (p, q, r) = self.threshold(k);
        floor_quad(&p, &q, &big(self.d), &r)
    }

    /// Whether `(b^k − β)/α` is an integer.
    pub fn threshold_integral(&self, k: i64) -> bool {
        let (p, q, r) = self.threshold(k);
        (q.is_zero() || self.d == 0) && p.is_multiple_of(&r)
    }

    /// First original index at level `≥ k`: `⌈(b^k − β)/α⌉`.
    pub fn level_entry(&self, k: i64) -> BigInt {
        let f = self.threshold_floor(k);
        if self.threshold_integral(k) {
            f
        } else {
            f + 1
        }
    }

    /// `⌊(αn + β)·b^j⌋`.
    fn scaled_floor(&self, n: &BigInt, j: u32) -> BigInt {
        let d = big(self.d);
        let (a0, a1, ad) = (&self.a.n0, &self.a.n1, &self.a.den);
        let (b0, b1, bd) = (&self.b.n0, &self.b.n1, &self.b.den);
        let s = big(self.base as i64).pow(j);
        let p = (n * a0 * bd + b0 * ad) * &s;
        let q = (n * a1 * bd + b1 * ad) * &s;
        floor_quad(&p, &q, &d, &(ad * bd))
    }

    /// `u_n = ⌊log_b(αn + β)⌋` for `αn + β > 0`.
    pub fn u(&self, n: &BigInt) -> i64 {
        let f = self.scaled_floor(n, 0);
        if f >= BigInt::one() {
            let mut k = 0i64;
            let mut p = big(self.base as i64);
            while p <= f {
                p *= self.base;
                k += 1;
            }
            k
        } else {
            let mut j = 1u32;
            while self.scaled_floor(n, j) < BigInt::one() {
                j += 1;
            }
            -(j as i64)
        }
    }
}

pub fn battery() -> Vec<Case> {
    let r = Quad::rational;
    let q = Quad::new;
    let case = |alpha, beta, base, d, a, b| Case {
        alpha,
        beta,
        base,
        d,
        a,
        b,
    };
    vec![
        case("1", "0", 2, 0, r(1, 1), r(0, 1)),
        case("3/2", "0", 2, 0, r(3, 2), r(0, 1)),
        case("5/3", "0", 2, 0, r(5, 3), r(0, 1)),
        case("7/4", "0", 3, 0, r(7, 4), r(0, 1)),
        case("22/7", "0", 10, 0, r(22, 7), r(0, 1)),
        case("3/2", "1/3", 3, 0, r(3, 2), r(1, 3)),
        case("5/3", "1/3", 10, 0, r(5, 3), r(1, 3)),
        case("7/4", "1/3", 2, 0, r(7, 4), r(1, 3)),
        case("22/7", "1/3", 2, 0, r(22, 7), r(1, 3)),
        case("1", "1/3", 10, 0, r(1, 1), r(1, 3)),
        case("5/3", "0", 3, 0, r(5, 3), r(0, 1)),
        case("sqrt(2)", "0", 2, 2, q(0, 1, 1), r(0, 1)),
        case("sqrt(3)", "0", 2, 3, q(0, 1, 1), r(0, 1)),
        case("1+sqrt(2)", "0", 2, 2, q(1, 1, 1), r(0, 1)),
        case("1/2+1/2*sqrt(5)", "0", 2, 5, q(1, 1, 2), r(0, 1)),
        case("sqrt(2)", "1/3", 3, 2, q(0, 1, 1), r(1, 3)),
        case("sqrt(3)", "1/3", 10, 3, q(0, 1, 1), r(1, 3)),
        case("sqrt(2)", "1/4*sqrt(2)", 2, 2, q(0, 1, 1), q(0, 1, 4)),
        case("1+sqrt(2)", "1/3", 3, 2, q(1, 1, 1), r(1, 3)),
        case("1/2+1/2*sqrt(5)", "1/2*sqrt(5)-1", 3, 5, q(1, 1, 2), q(-2, 1, 2)),
    ]
}

/// `a + c√d` with rational parts; `d = 0` for rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReal {
    pub a: BigRational,
    pub c: BigRational,
    pub d: BigInt,
}

impl OracleReal {
    /// Closed enclosure with `√d` known to `bits` fractional bits.
    fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        if self.c.is_zero() || self.d.is_zero() {
            return (self.a.clone(), self.a.clone());
        }
        let scale = BigInt::one() << bits;
        let lo_root = (&self.d * &scale * &scale).sqrt();
        let lo = BigRational::new(lo_root.clone(), scale.clone());
        let hi = BigRational::new(lo_root + 1, scale);
        let (x, y) = (&self.a + &self.c * &lo, &self.a + &self.c * &hi);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

/// Sign of `x − y` by interval refinement from [`oracle_bits`]; ties the
/// intervals cannot separate are settled symbolically.
pub fn oracle_compare(x: &OracleReal, y: &OracleReal) -> Ordering {
    let mut bits = oracle_bits();
    loop {
        let (xl, xh) = x.enclosure(bits);
        let (yl, yh) = y.enclosure(bits);
        if xh < yl {
            return Ordering::Less;
        }
        if xl > yh {
            return Ordering::Greater;
        }
        let same_value = x.a == y.a
            && ((x.c.is_zero() && y.c.is_zero()) || (x.c == y.c && x.d == y.d));
        if same_value {
            return Ordering::Equal;
        }
        assert!(bits < 1 << 16, "interval oracle failed to separate {x:?} and {y:?}");
        bits *= 2;
    }
}
