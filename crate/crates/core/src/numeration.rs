//! Base-b words, word values with oversized digits, digit streams of reals
//! in `[0, 1)`, and characteristic words of integer sets.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{ExactReal, QuadraticValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumerationError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("cannot expand negative value {0}")]
    Negative(BigInt),
    #[error("digit {digit} is not below {bound}")]
    DigitOutOfRange { digit: u32, bound: u32 },
    #[error("{0} is outside [0, 1)")]
    OutsideUnitInterval(String),
    #[error("malformed word {0:?}")]
    Malformed(String),
}

pub fn check_base(base: u32) -> Result<(), NumerationError> {
    if base < 2 {
        Err(NumerationError::InvalidBase(base))
    } else {
        Ok(())
    }
}

/// A word over `Σ_b = {0, …, b−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    base: u32,
    digits: Vec<u32>,
}

impl Word {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self, NumerationError> {
        check_base(base)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(NumerationError::DigitOutOfRange { digit, bound: base });
        }
        Ok(Word { base, digits })
    }

    pub fn empty(base: u32) -> Self {
        Word {
            base,
            digits: Vec::new(),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `[w]_b`.
    pub fn value(&self) -> BigInt {
        from_digits(&self.digits, self.base)
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.base, other.base);
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Word {
            base: self.base,
            digits,
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word {
            base: self.base,
            digits: self.digits[range].to_vec(),
        }
    }

    /// Drops leading zeros, keeping a single `0` for the zero word.
    pub fn canonical(&self) -> Word {
        let first = self
            .digits
            .iter()
            .position(|&d| d != 0)
            .unwrap_or(self.digits.len().saturating_sub(1));
        Word {
            base: self.base,
            digits: self.digits[first.min(self.digits.len())..].to_vec(),
        }
    }

    pub fn parse(base: u32, text: &str) -> Result<Self, NumerationError> {
        check_base(base)?;
        let digits: Result<Vec<u32>, _> = if base <= 10 {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| NumerationError::Malformed(text.into())))
                .collect()
        } else if text.is_empty() {
            Ok(Vec::new())
        } else {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| NumerationError::Malformed(text.into()))
                })
                .collect()
        };
        Word::new(base, digits?)
    }
}

/// Plain digit strings for `b ≤ 10`, comma-separated digit lists otherwise.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base <= 10 {
            for d in &self.digits {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(&self.digits)
    }
}

/// A word over `Σ_B` whose digits may exceed the base it is read in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneralWord {
    bound: u32,
    digits: Vec<u32>,
}

impl GeneralWord {
    pub fn new(bound: u32, digits: Vec<u32>) -> Result<Self, NumerationError> {
        check_base(bound)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= bound) {
            return Err(NumerationError::DigitOutOfRange { digit, bound });
        }
        Ok(GeneralWord { bound, digits })
    }

    /// Smallest alphabet bound that admits every digit (at least 2).
    pub fn from_digits(digits: Vec<u32>) -> Self {
        let bound = digits.iter().max().map_or(2, |&m| (m + 1).max(2));
        GeneralWord { bound, digits }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `[w]_b` by Horner's rule.
    pub fn value_in(&self, base: u32) -> BigInt {
        from_digits(&self.digits, base)
    }
}

impl fmt::Display for GeneralWord {
    /// Inverse of the `FromStr` forms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.iter().all(|&d| d < 10) {
            self.digits.iter().try_for_each(|d| write!(f, "{d}"))
        } else {
            let parts: Vec<String> = self.digits.iter().map(u32::to_string).collect();
            // a lone large digit keeps a trailing comma so it reads back as one digit
            let tail = if parts.len() == 1 { "," } else { "" };
            write!(f, "{}{tail}", parts.join(","))
        }
    }
}

impl FromStr for GeneralWord {
    type Err = NumerationError;

    /// Plain digit strings (`"1002"`) or comma lists (`"1,12,0"`).
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let digits: Result<Vec<u32>, _> = if text.contains(',') {
            text.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| NumerationError::Malformed(text.into()))
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| NumerationError::Malformed(text.into())))
                .collect()
        };
        Ok(GeneralWord::from_digits(digits?))
    }
}

/// Horner evaluation `Σ w_i b^{n−i}`; digits are not required to be below `b`.
pub fn from_digits(digits: &[u32], base: u32) -> BigInt {
    digits.iter().fold(BigInt::zero(), |acc, &d| acc * base + d)
}

/// `(n)_b`, most significant digit first. `(0)_b` is the single digit `0`.
pub fn to_word(n: &BigInt, base: u32) -> Result<Word, NumerationError> {
    check_base(base)?;
    match n.sign() {
        Sign::Minus => Err(NumerationError::Negative(n.clone())),
        Sign::NoSign => Ok(Word {
            base,
            digits: vec![0],
        }),
        Sign::Plus => {
            let digits = if base <= 256 {
                let (_, d) = n.to_radix_be(base);
                d.into_iter().map(u32::from).collect()
            } else {
                let mut rest = n.clone();
                let mut out = Vec::new();
                while !rest.is_zero() {
                    out.push((&rest % base).to_u32().expect("digit below base"));
                    rest /= base;
                }
                out.reverse();
                out
            };
            Ok(Word { base, digits })
        }
    }
}

/// Number of digits of `(n)_b` for `n ≥ 0`.
pub fn expansion_len(n: &BigInt, base: u32) -> usize {
    if n.is_zero() {
        return 1;
    }
    // b^m ≤ 2^{m·⌈log2 b⌉} ≤ 2^{bits−1} ≤ n gives a lower bound to start from
    let log2_ceil = u64::from(32 - (base - 1).leading_zeros());
    let m = (n.bits() - 1) / log2_ceil;
    let mut len = m as usize + 1;
    let mut power = BigInt::from(base).pow(len as u32);
    while &power <= n {
        power *= base;
        len += 1;
    }
    len
}

/// Lazily extended greedy base-b expansion of a value in `[0, 1)`.
///
/// Digits are produced by exact shift-and-floor: with remainder `y ∈ [0,1)`,
/// the next digit is `⌊b·y⌋` and the remainder becomes `b·y − digit`. For
/// rationals with a terminating expansion this yields the trailing-zeros form.
#[derive(Clone, Debug)]
pub struct DigitStream {
    base: u32,
    remainder: QuadraticValue,
    digits: Vec<u32>,
}

impl DigitStream {
    pub fn new(x: &ExactReal, base: u32) -> Result<Self, NumerationError> {
        check_base(base)?;
        if x.signum() == std::cmp::Ordering::Less || x.compare(&ExactReal::one()).is_ge() {
            return Err(NumerationError::OutsideUnitInterval(x.to_string()));
        }
        Ok(DigitStream {
            base,
            remainder: x.to_quadratic(),
            digits: Vec::new(),
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Number of digits produced so far.
    pub fn computed(&self) -> usize {
        self.digits.len()
    }

    /// `frac(b^m · x)` where `m` = [`DigitStream::computed`]; this is the
    /// tail value `0.x_{m+1}x_{m+2}⋯`.
    pub fn remainder(&self) -> &QuadraticValue {
        &self.remainder
    }

    /// Produces one more digit and returns it.
    pub fn advance(&mut self) -> u32 {
        let shifted = self.remainder.scale(&BigInt::from(self.base));
        let digit = shifted.floor_near(&BigInt::zero(), self.base - 1);
        self.remainder = shifted.sub_integer(&digit);
        let digit = digit.to_u32().expect("digit below base");
        self.digits.push(digit);
        digit
    }

    pub fn prefix(&mut self, count: usize) -> &[u32] {
        while self.digits.len() < count {
            self.advance();
        }
        &self.digits[..count]
    }

    /// The `i`-th digit after the point, 1-based.
    pub fn digit(&mut self, i: usize) -> u32 {
        assert!(i >= 1, "digits are 1-based");
        self.prefix(i)[i - 1]
    }
}

/// First `count` digits of the greedy base-b expansion of `x ∈ [0, 1)`.
pub fn digit_stream(x: &ExactReal, base: u32, count: usize) -> Result<Vec<u32>, NumerationError> {
    let mut s = DigitStream::new(x, base)?;
    Ok(s.prefix(count).to_vec())
}

/// Bits `X_S(0), …, X_S(n_max)` of the characteristic word of `set`.
pub fn characteristic_word(set: &[u64], n_max: u64) -> Vec<u8> {
    let mut bits = vec![0u8; n_max as usize + 1];
    for &n in set.iter().take_while(|&&n| n <= n_max) {
        bits[n as usize] = 1;
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;

    #[test]
    fn to_word_examples() {
        assert_eq!(to_word(&10.into(), 2).unwrap().to_string(), "1010");
        assert_eq!(to_word(&0.into(), 7).unwrap().to_string(), "0");
        assert_eq!(to_word(&85.into(), 2).unwrap().to_string(), "1010101");
        assert_eq!(to_word(&300.into(), 16).unwrap().to_string(), "1,2,12");
        assert_eq!(to_word(&1000.into(), 1000).unwrap().digits(), &[1, 0]);
        assert!(matches!(
            to_word(&(-1).into(), 2),
            Err(NumerationError::Negative(_))
        ));
    }

    #[test]
    fn from_word_examples() {
        let w: GeneralWord = "1002".parse().unwrap();
        assert_eq!(w.value_in(2), BigInt::from(10));
        assert_eq!(from_digits(&[0], 9), BigInt::zero());
        assert_eq!(from_digits(&[1, 3], 2), BigInt::from(5));
    }

    #[test]
    fn digit_stream_examples() {
        let inv_sqrt2 = parse("1/2*sqrt(2)").unwrap();
        assert_eq!(
            digit_stream(&inv_sqrt2, 2, 8).unwrap(),
            vec![1, 0, 1, 1, 0, 1, 0, 1]
        );
        let third = parse("1/3").unwrap();
        assert_eq!(digit_stream(&third, 2, 6).unwrap(), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(digit_stream(&ExactReal::zero(), 5, 4).unwrap(), vec![0; 4]);
        // terminating expansions end in zeros, never in (b-1)s
        let half = parse("1/2").unwrap();
        assert_eq!(digit_stream(&half, 2, 4).unwrap(), vec![1, 0, 0, 0]);
        assert!(DigitStream::new(&ExactReal::one(), 2).is_err());
        assert!(DigitStream::new(&parse("-1/2").unwrap(), 2).is_err());
    }

    #[test]
    fn characteristic_word_examples() {
        assert_eq!(characteristic_word(&[1, 2, 5, 11], 6), vec![0, 1, 1, 0, 0, 1, 0]);
        assert_eq!(characteristic_word(&[], 3), vec![0, 0, 0, 0]);
        assert_eq!(characteristic_word(&[0], 2), vec![1, 0, 0]);
    }

    #[test]
    fn canonical_strips_leading_zeros() {
        let w = Word::new(2, vec![0, 1, 1]).unwrap();
        assert_eq!(w.canonical().to_string(), "11");
        assert_eq!(Word::new(2, vec![0, 0]).unwrap().canonical().to_string(), "0");
    }

    #[test]
    fn expansion_len_matches_to_word() {
        for b in [2u32, 3, 10] {
            for n in 0..500 {
                let n = BigInt::from(n);
                assert_eq!(expansion_len(&n, b), to_word(&n, b).unwrap().len());
            }
        }
    }
}
