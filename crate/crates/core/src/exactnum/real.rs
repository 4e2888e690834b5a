use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::quadratic::{surd_sign, QuadraticValue};
use super::NumError;

/// Largest radicand accepted; square-free reduction is by trial division.
pub const MAX_RADICAND: u64 = 1_000_000_000_000;

/// A rational number or a real quadratic surd `a + c·√d`.
///
/// Values are kept canonical (reduced rationals, square-free `d`, `c ≠ 0`),
/// so structural equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(BigRational),
    Surd(Surd),
}

/// `a + c·√d` with `c ≠ 0` and `d > 1` square-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: BigRational,
    c: BigRational,
    d: BigInt,
}

impl Surd {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_coeff(&self) -> &BigRational {
        &self.c
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }
}

/// Splits `d > 0` as `s²·f` with `f` square-free.
pub(crate) fn square_free_split(d: &BigInt) -> Result<(BigInt, BigInt), NumError> {
    if !d.is_positive() {
        return Err(NumError::NonPositiveRadicand(d.clone()));
    }
    let mut rest: u64 = d
        .try_into()
        .ok()
        .filter(|&v: &u64| v <= MAX_RADICAND)
        .ok_or_else(|| NumError::RadicandTooLarge(d.clone()))?;
    let mut square: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            square *= p;
        }
        p += 1;
    }
    Ok((BigInt::from(square), BigInt::from(rest)))
}

impl ExactReal {
    pub fn integer<T: Into<BigInt>>(n: T) -> Self {
        ExactReal::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio<T: Into<BigInt>>(num: T, den: T) -> Result<Self, NumError> {
        let den = den.into();
        if den.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(ExactReal::Rational(BigRational::new(num.into(), den)))
    }

    pub fn zero() -> Self {
        ExactReal::integer(0)
    }

    pub fn one() -> Self {
        ExactReal::integer(1)
    }

    /// `a + c·√d`, normalized: square factors of `d` move into `c`, and a
    /// vanishing irrational part collapses to a rational.
    pub fn surd(a: BigRational, c: BigRational, d: BigInt) -> Result<Self, NumError> {
        let (square, free) = square_free_split(&d)?;
        let c = c * BigRational::from_integer(square);
        if c.is_zero() {
            return Ok(ExactReal::Rational(a));
        }
        if free.is_one() {
            return Ok(ExactReal::Rational(a + c));
        }
        Ok(ExactReal::Surd(Surd { a, c, d: free }))
    }

    pub fn sqrt_of<T: Into<BigInt>>(d: T) -> Result<Self, NumError> {
        ExactReal::surd(BigRational::zero(), BigRational::one(), d.into())
    }

    fn parts(&self) -> (BigRational, BigRational, Option<&BigInt>) {
        match self {
            ExactReal::Rational(r) => (r.clone(), BigRational::zero(), None),
            ExactReal::Surd(s) => (s.a.clone(), s.c.clone(), Some(&s.d)),
        }
    }

    fn from_parts(a: BigRational, c: BigRational, d: Option<&BigInt>) -> Self {
        match d {
            Some(d) if !c.is_zero() => ExactReal::Surd(Surd { a, c, d: d.clone() }),
            _ => ExactReal::Rational(a),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            ExactReal::Surd(_) => None,
        }
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            ExactReal::Rational(_) => None,
            ExactReal::Surd(s) => Some(&s.d),
        }
    }

    fn shared_radicand<'a>(&'a self, other: &'a Self) -> Result<Option<&'a BigInt>, NumError> {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) if x != y => {
                Err(NumError::IncompatibleRadicands(x.clone(), y.clone()))
            }
            (Some(x), _) | (None, Some(x)) => Ok(Some(x)),
            (None, None) => Ok(None),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, NumError> {
        let d = self.shared_radicand(other)?;
        let (a1, c1, _) = self.parts();
        let (a2, c2, _) = other.parts();
        Ok(ExactReal::from_parts(a1 + a2, c1 + c2, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, NumError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, NumError> {
        let d = self.shared_radicand(other)?;
        let (a1, c1, _) = self.parts();
        let (a2, c2, _) = other.parts();
        let dd = d
            .map(|d| BigRational::from_integer(d.clone()))
            .unwrap_or_else(BigRational::zero);
        let a = &a1 * &a2 + &c1 * &c2 * dd;
        let c = a1 * c2 + c1 * a2;
        Ok(ExactReal::from_parts(a, c, d))
    }

    /// Reciprocal via the conjugate: `1/(a + c√d) = (a − c√d)/(a² − c²d)`.
    pub fn recip(&self) -> Result<Self, NumError> {
        match self {
            ExactReal::Rational(r) => {
                if r.is_zero() {
                    Err(NumError::DivisionByZero)
                } else {
                    Ok(ExactReal::Rational(r.recip()))
                }
            }
            ExactReal::Surd(s) => {
                let norm = &s.a * &s.a - &s.c * &s.c * BigRational::from_integer(s.d.clone());
                // norm ≠ 0 because √d is irrational
                Ok(ExactReal::from_parts(
                    &s.a / &norm,
                    -(&s.c / &norm),
                    Some(&s.d),
                ))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, NumError> {
        self.checked_mul(&other.recip()?)
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(-r),
            ExactReal::Surd(s) => ExactReal::Surd(Surd {
                a: -&s.a,
                c: -&s.c,
                d: s.d.clone(),
            }),
        }
    }

    pub fn mul_integer(&self, m: &BigInt) -> Self {
        let m = BigRational::from_integer(m.clone());
        let (a, c, d) = self.parts();
        ExactReal::from_parts(a * &m, c * m, d)
    }

    pub fn add_integer(&self, n: &BigInt) -> Self {
        let (a, c, d) = self.parts();
        ExactReal::from_parts(a + BigRational::from_integer(n.clone()), c, d)
    }

    pub fn signum(&self) -> Ordering {
        match self {
            ExactReal::Rational(r) => r.cmp(&BigRational::zero()),
            ExactReal::Surd(s) => {
                // scale both coefficients to a common integer denominator
                let den = s.a.denom().lcm(s.c.denom());
                let a = s.a.numer() * (&den / s.a.denom());
                let c = s.c.numer() * (&den / s.c.denom());
                surd_sign(&a, &c, &s.d)
            }
        }
    }

    /// Exact comparison in the real order. Works across different radicands.
    pub fn compare(&self, other: &Self) -> Ordering {
        if let Ok(diff) = self.checked_sub(other) {
            return diff.signum();
        }
        // a1 + c1√d1 − (a2 + c2√d2): compare x = a + c1√d1 against y = c2√d2
        let (a1, c1, d1) = self.parts();
        let (a2, c2, d2) = other.parts();
        let (d1, d2) = (d1.expect("surd"), d2.expect("surd"));
        let x = ExactReal::from_parts(a1 - a2, c1, Some(d1));
        let y = ExactReal::from_parts(BigRational::zero(), c2, Some(d2));
        let (sx, sy) = (x.signum(), y.signum());
        if sx != sy {
            return sx.cmp(&sy);
        }
        // same sign: compare squares; x² − y² lies in Q(√d1)
        let (xa, xc, _) = x.parts();
        let (_, yc, _) = y.parts();
        let d1r = BigRational::from_integer(d1.clone());
        let d2r = BigRational::from_integer(d2.clone());
        let sq_diff = ExactReal::from_parts(
            &xa * &xa + &xc * &xc * d1r - &yc * &yc * d2r,
            BigRational::from_integer(2.into()) * xa * xc,
            Some(d1),
        );
        let mag = sq_diff.signum();
        if sx == Ordering::Less {
            mag.reverse()
        } else {
            mag
        }
    }

    /// Same value over a common integer denominator.
    pub fn to_quadratic(&self) -> QuadraticValue {
        match self {
            ExactReal::Rational(r) => QuadraticValue::new(
                r.numer().clone(),
                BigInt::zero(),
                r.denom().clone(),
                None,
            ),
            ExactReal::Surd(s) => {
                let den = s.a.denom().lcm(s.c.denom());
                let a = s.a.numer() * (&den / s.a.denom());
                let c = s.c.numer() * (&den / s.c.denom());
                QuadraticValue::new(a, c, den, Some(s.d.clone()))
            }
        }
    }

    pub fn from_quadratic(q: &QuadraticValue) -> Self {
        let den = q.den().clone();
        let a = BigRational::new(q.rat().clone(), den.clone());
        let c = BigRational::new(q.irr().clone(), den);
        ExactReal::from_parts(a, c, q.radicand())
    }

    pub fn floor(&self) -> BigInt {
        match self {
            ExactReal::Rational(r) => r.floor().to_integer(),
            ExactReal::Surd(_) => self.to_quadratic().floor(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// `x − ⌊x⌋`, always in `[0, 1)`.
    pub fn frac(&self) -> Self {
        self.add_integer(&-self.floor())
    }

    pub fn is_integer(&self) -> bool {
        match self {
            ExactReal::Rational(r) => r.is_integer(),
            ExactReal::Surd(_) => false,
        }
    }
}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Renders in the same grammar accepted by [`crate::exactnum::parse`].
impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => fmt_rational(r, f),
            ExactReal::Surd(s) => {
                if !s.a.is_zero() {
                    fmt_rational(&s.a, f)?;
                    if s.c.is_positive() {
                        write!(f, "+")?;
                    }
                }
                if s.c.is_one() {
                    write!(f, "sqrt({})", s.d)
                } else if (-&s.c).is_one() {
                    write!(f, "-sqrt({})", s.d)
                } else {
                    fmt_rational(&s.c, f)?;
                    write!(f, "*sqrt({})", s.d)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;

    fn p(s: &str) -> ExactReal {
        parse(s).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(p("1/2").compare(&p("1/2")), Ordering::Equal);
        assert_eq!(p("sqrt(2)").compare(&p("3/2")), Ordering::Less);
        // 49/25 < 2
        assert_eq!(p("7/5").compare(&p("sqrt(2)")), Ordering::Less);
        assert_eq!(p("sqrt(3)").compare(&p("sqrt(2)")), Ordering::Greater);
        assert_eq!(
            p("1+sqrt(2)").compare(&p("sqrt(3)+2/3")),
            Ordering::Greater
        );
    }

    #[test]
    fn floor_examples() {
        assert_eq!(p("4/3").floor(), BigInt::from(1));
        assert_eq!(p("sqrt(2)").floor(), BigInt::from(1));
        assert_eq!(p("512*sqrt(2)").floor(), BigInt::from(724));
        let v = ExactReal::integer(1024)
            .checked_div(&p("sqrt(2)"))
            .unwrap();
        assert_eq!(v.floor(), BigInt::from(724));
        assert_eq!(p("-1/3").floor(), BigInt::from(-1));
    }

    #[test]
    fn frac_examples() {
        assert_eq!(p("7/3").frac(), p("1/3"));
        assert_eq!(p("sqrt(2)").frac(), p("-1+sqrt(2)"));
        assert_eq!(p("-1/3").frac(), p("2/3"));
    }

    #[test]
    fn recip_of_surd() {
        let x = p("1+sqrt(2)");
        assert_eq!(x.recip().unwrap(), p("-1+sqrt(2)"));
        assert_eq!(x.checked_mul(&x.recip().unwrap()).unwrap(), ExactReal::one());
    }

    #[test]
    fn mixed_radicands_reject_arithmetic() {
        assert!(matches!(
            p("sqrt(2)").checked_add(&p("sqrt(3)")),
            Err(NumError::IncompatibleRadicands(_, _))
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in ["3/2", "-7", "sqrt(2)", "1/2+1/2*sqrt(5)", "-sqrt(3)", "2-3/4*sqrt(7)"] {
            let v = p(s);
            assert_eq!(p(&v.to_string()), v, "{s}");
        }
    }
}
