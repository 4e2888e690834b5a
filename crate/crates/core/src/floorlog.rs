//! The sequence `u_n = ⌊log_b(αn + β)⌋`, its normalization to
//! `0 ≤ β′ < α′ < b`, the increments `v_n`, and the jump positions
//! `c_k = ⌊(b^k − β′)/α′⌋`.
//!
//! Levels are found by comparing against exact powers of `b`; no logarithm
//! is ever evaluated.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{ExactReal, NumError, QuadraticValue};
use crate::numeration::expansion_len;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FloorLogError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(String),
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("index {n} lies below the domain start {n_min}")]
    BelowDomain { n: BigInt, n_min: BigInt },
}

/// `⌊log_b(αn + β)⌋` for real `α > 0`, `β` and integer `b ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    alpha: ExactReal,
    beta: ExactReal,
    base: u32,
}

impl ProblemInstance {
    pub fn new(alpha: ExactReal, beta: ExactReal, base: u32) -> Result<Self, FloorLogError> {
        if base < 2 {
            return Err(FloorLogError::InvalidBase(base));
        }
        if alpha.signum() != Ordering::Greater {
            return Err(FloorLogError::NonPositiveAlpha(alpha.to_string()));
        }
        // α and β must share a quadratic field for the thresholds to be exact
        alpha.checked_sub(&beta)?;
        Ok(ProblemInstance { alpha, beta, base })
    }

    pub fn alpha(&self) -> &ExactReal {
        &self.alpha
    }

    pub fn beta(&self) -> &ExactReal {
        &self.beta
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Least `n ≥ 0` with `αn + β > 0`.
    pub fn n_min(&self) -> BigInt {
        if self.beta.signum() == Ordering::Greater {
            return BigInt::zero();
        }
        let ratio = self
            .beta
            .neg()
            .checked_div(&self.alpha)
            .expect("compatible fields checked at construction");
        ratio.floor() + 1u32
    }

    /// `u_n` straight from the definition, without normalization.
    pub fn u(&self, n: &BigInt) -> Result<i64, FloorLogError> {
        let n_min = self.n_min();
        if n < &n_min {
            return Err(FloorLogError::BelowDomain {
                n: n.clone(),
                n_min,
            });
        }
        let x = self
            .alpha
            .mul_integer(n)
            .checked_add(&self.beta)
            .expect("compatible fields checked at construction");
        Ok(level(&x.to_quadratic(), self.base))
    }

    pub fn normalize(&self) -> NormalizedInstance {
        normalize(self)
    }
}

/// The unique `k` with `b^k ≤ x < b^{k+1}`, for `x > 0`.
pub fn level(x: &QuadraticValue, base: u32) -> i64 {
    debug_assert_eq!(x.signum(), Ordering::Greater);
    let fl = x.floor();
    if fl.is_positive() {
        return expansion_len(&fl, base) as i64 - 1;
    }
    let b = BigInt::from(base);
    let mut scaled = x.clone();
    let mut k = 0i64;
    loop {
        scaled = scaled.scale(&b);
        k -= 1;
        if scaled.cmp_integer(&BigInt::one()) != Ordering::Less {
            return k;
        }
    }
}

/// An instance rewritten with `0 ≤ β′ < α′ < b`.
///
/// For every original index `n ≥ n_min`:
/// `u_n = value_offset + u′(n + index_shift)` where
/// `u′(m) = ⌊log_b(α′m + β′)⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedInstance {
    original: ProblemInstance,
    alpha: ExactReal,
    beta: ExactReal,
    index_shift: BigInt,
    value_offset: i64,
    n_min: BigInt,
}

/// Serializable summary of a normalization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub alpha: String,
    pub beta: String,
    pub base: u32,
    pub normalized_alpha: String,
    pub normalized_beta: String,
    pub index_shift: String,
    pub value_offset: i64,
    pub n_min: String,
}

pub fn normalize(inst: &ProblemInstance) -> NormalizedInstance {
    let b = ExactReal::integer(inst.base);
    let mut alpha = inst.alpha.clone();
    let mut beta = inst.beta.clone();
    let mut value_offset = 0i64;
    // α ≥ b: divide through by b^m with b^m ≤ α < b^{m+1}
    while alpha.compare(&b) != Ordering::Less {
        alpha = alpha.checked_div(&b).expect("rational divisor");
        beta = beta.checked_div(&b).expect("rational divisor");
        value_offset += 1;
    }
    // β = qα + β′ with 0 ≤ β′ < α, so αn + β = α(n + q) + β′
    let q = beta
        .checked_div(&alpha)
        .expect("compatible fields checked at construction")
        .floor();
    let beta = beta
        .checked_sub(&alpha.mul_integer(&q))
        .expect("compatible fields checked at construction");
    NormalizedInstance {
        n_min: inst.n_min(),
        original: inst.clone(),
        alpha,
        beta,
        index_shift: q,
        value_offset,
    }
}

impl NormalizedInstance {
    pub fn original(&self) -> &ProblemInstance {
        &self.original
    }

    pub fn alpha(&self) -> &ExactReal {
        &self.alpha
    }

    pub fn beta(&self) -> &ExactReal {
        &self.beta
    }

    pub fn base(&self) -> u32 {
        self.original.base
    }

    pub fn index_shift(&self) -> &BigInt {
        &self.index_shift
    }

    pub fn value_offset(&self) -> i64 {
        self.value_offset
    }

    /// Domain start of the original sequence.
    pub fn n_min(&self) -> &BigInt {
        &self.n_min
    }

    /// Normalized index of the original `n_min`.
    pub fn start_index(&self) -> BigInt {
        &self.n_min + &self.index_shift
    }

    pub fn alpha_is_rational(&self) -> bool {
        self.alpha.is_rational()
    }

    /// `u′(m) = ⌊log_b(α′m + β′)⌋` for a normalized index `m`.
    pub fn normalized_level(&self, m: &BigInt) -> i64 {
        let x = self
            .alpha
            .mul_integer(m)
            .checked_add(&self.beta)
            .expect("compatible fields");
        level(&x.to_quadratic(), self.base())
    }

    /// `u_n` of the original sequence, evaluated through the normalized form.
    pub fn u(&self, n: &BigInt) -> Result<i64, FloorLogError> {
        if n < &self.n_min {
            return Err(FloorLogError::BelowDomain {
                n: n.clone(),
                n_min: self.n_min.clone(),
            });
        }
        Ok(self.value_offset + self.normalized_level(&(n + &self.index_shift)))
    }

    /// `(b^k − β′)/α′`.
    pub fn threshold(&self, k: u32) -> ExactReal {
        ExactReal::integer(BigInt::from(self.base()).pow(k))
            .checked_sub(&self.beta)
            .and_then(|x| x.checked_div(&self.alpha))
            .expect("compatible fields")
    }

    pub fn record(&self) -> NormalizationRecord {
        NormalizationRecord {
            alpha: self.original.alpha.to_string(),
            beta: self.original.beta.to_string(),
            base: self.base(),
            normalized_alpha: self.alpha.to_string(),
            normalized_beta: self.beta.to_string(),
            index_shift: self.index_shift.to_string(),
            value_offset: self.value_offset,
            n_min: self.n_min.to_string(),
        }
    }
}

/// `(b^k − β′)/α′` over a fixed common denominator, evaluated from `b^k`.
#[derive(Clone, Debug)]
pub struct Thresholds {
    power_rat: BigInt,
    power_irr: BigInt,
    shift_rat: BigInt,
    shift_irr: BigInt,
    den: BigInt,
    radicand: Option<BigInt>,
    shift_over_alpha: QuadraticValue,
}

impl Thresholds {
    pub fn new(norm: &NormalizedInstance) -> Self {
        let inv = norm.alpha.recip().expect("alpha > 0").to_quadratic();
        let g = norm
            .beta
            .checked_div(&norm.alpha)
            .expect("compatible fields")
            .to_quadratic();
        let radicand = inv.radicand().or(g.radicand()).cloned();
        Thresholds {
            power_rat: inv.rat() * g.den(),
            power_irr: inv.irr() * g.den(),
            shift_rat: g.rat() * inv.den(),
            shift_irr: g.irr() * inv.den(),
            den: inv.den() * g.den(),
            radicand,
            shift_over_alpha: g,
        }
    }

    /// `(power − β′)/α′`.
    pub fn at_power(&self, power: &BigInt) -> QuadraticValue {
        QuadraticValue::new(
            power * &self.power_rat - &self.shift_rat,
            power * &self.power_irr - &self.shift_irr,
            self.den.clone(),
            self.radicand.clone(),
        )
    }

    /// `β′/α′`.
    pub fn beta_over_alpha(&self) -> &QuadraticValue {
        &self.shift_over_alpha
    }
}

/// Original-index values `u_n` for `from ≤ n ≤ to`.
pub fn u_seq(norm: &NormalizedInstance, from: &BigInt, to: &BigInt) -> Result<Vec<i64>, FloorLogError> {
    let mut out = Vec::new();
    let mut n = from.clone();
    while &n <= to {
        out.push(norm.u(&n)?);
        n += 1u32;
    }
    Ok(out)
}

/// `v_n = u_{n+1} − u_n` over an index range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Increments {
    pub from: String,
    pub values: Vec<i64>,
    /// Least `N` in range such that `v_n ∈ {0, 1}` for all computed `n > N`;
    /// `None` when every computed value is already in `{0, 1}`.
    pub settled_after: Option<String>,
}

pub fn v_seq(norm: &NormalizedInstance, from: &BigInt, to: &BigInt) -> Result<Increments, FloorLogError> {
    let u = u_seq(norm, from, &(to + 1u32))?;
    let values: Vec<i64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    let settled_after = values
        .iter()
        .rposition(|v| !(0..=1).contains(v))
        .map(|i| (from + i).to_string());
    Ok(Increments {
        from: from.to_string(),
        values,
        settled_after,
    })
}

/// Jump positions `c_k` for `k = 1..=k_max` (stored at index `k − 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpData {
    pub c: Vec<BigInt>,
    /// Every `k` with `(b^k − β′)/α′ ∈ ℤ`.
    pub integrality_hits: Vec<u32>,
}

impl JumpData {
    pub fn c(&self, k: usize) -> &BigInt {
        &self.c[k - 1]
    }

    /// Two integral thresholds force `α = (b^{k2} − b^{k1})/(m2 − m1) ∈ ℚ`.
    pub fn witnesses_rationality(&self) -> bool {
        self.integrality_hits.len() >= 2
    }

    /// Last normalized index before level `k` begins: `⌈x_k⌉ − 1`.
    pub fn jump_position(&self, k: usize) -> BigInt {
        let c = self.c(k).clone();
        if self.integrality_hits.binary_search(&(k as u32)).is_ok() {
            c - 1u32
        } else {
            c
        }
    }
}

pub fn c_seq(norm: &NormalizedInstance, k_max: u32) -> JumpData {
    let th = Thresholds::new(norm);
    let b = BigInt::from(norm.base());
    let mut power = BigInt::one();
    let mut c: Vec<BigInt> = Vec::with_capacity(k_max as usize);
    let mut integrality_hits = Vec::new();
    for k in 1..=k_max {
        power *= &b;
        let x = th.at_power(&power);
        let ck = match c.last() {
            // c_k = b·c_{k−1} + r_{k−1} with 0 ≤ r < 2b − 1; used only as a hint
            Some(prev) => x.floor_near(&(prev * &b), 2 * norm.base()),
            None => x.floor(),
        };
        if x.cmp_integer(&ck) == Ordering::Equal {
            integrality_hits.push(k);
        }
        c.push(ck);
    }
    JumpData { c, integrality_hits }
}

/// Result of matching `{n : v_n = 1}` against the jump positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpCheck {
    pub checked_from: String,
    pub checked_to: String,
    pub settled_after: Option<String>,
    /// Normalized indices beyond `settled_after` where `v_n = 1` disagrees
    /// with membership in the jump set.
    pub mismatches: Vec<String>,
}

/// Enumerates `v` on normalized indices up to `limit` and confirms that,
/// past the unsettled prefix, `v_n = 1` exactly at the jump positions.
pub fn check_jumps(norm: &NormalizedInstance, jd: &JumpData, limit: &BigInt) -> JumpCheck {
    let start = norm.start_index();
    let mut jumps: Vec<BigInt> = (1..=jd.c.len()).map(|k| jd.jump_position(k)).collect();
    jumps.retain(|j| j >= &start && j <= limit);
    jumps.sort();
    let mut ones = Vec::new();
    let mut last_bad: Option<BigInt> = None;
    let mut prev = norm.normalized_level(&start);
    let mut m = start.clone();
    while &m <= limit {
        let next = norm.normalized_level(&(&m + 1u32));
        let v = next - prev;
        // jumps into levels below 1 precede c_1 and are not tracked
        if v == 1 && next >= 1 {
            ones.push(m.clone());
        }
        if !(0..=1).contains(&v) {
            last_bad = Some(m.clone());
        }
        prev = next;
        m += 1u32;
    }
    let keep = |n: &BigInt| last_bad.as_ref().is_none_or(|bad| n > bad);
    let mut mismatches = Vec::new();
    let ones: Vec<BigInt> = ones.into_iter().filter(|n| keep(n)).collect();
    let jumps: Vec<BigInt> = jumps.into_iter().filter(|n| keep(n)).collect();
    for n in ones.iter().filter(|n| jumps.binary_search(n).is_err()) {
        mismatches.push(n.to_string());
    }
    for n in jumps.iter().filter(|n| ones.binary_search(n).is_err()) {
        mismatches.push(n.to_string());
    }
    JumpCheck {
        checked_from: start.to_string(),
        checked_to: limit.to_string(),
        settled_after: last_bad.map(|b| b.to_string()),
        mismatches,
    }
}

/// `c_{k+1} − b·c_k` for each consecutive pair.
pub fn jump_increments(jd: &JumpData, base: u32) -> Vec<i64> {
    jd.c
        .windows(2)
        .map(|w| (&w[1] - &w[0] * base).to_i64().expect("small increment"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;

    fn inst(a: &str, b: &str, base: u32) -> ProblemInstance {
        ProblemInstance::new(parse(a).unwrap(), parse(b).unwrap(), base).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn normalize_examples() {
        let n = inst("3", "5", 2).normalize();
        assert_eq!(n.alpha(), &parse("3/2").unwrap());
        assert_eq!(n.beta(), &ExactReal::one());
        assert_eq!(n.index_shift(), &big(1));
        assert_eq!(n.value_offset(), 1);

        let n = inst("3/2", "0", 2).normalize();
        assert_eq!(n.alpha(), &parse("3/2").unwrap());
        assert_eq!((n.index_shift().clone(), n.value_offset()), (big(0), 0));

        let n = inst("sqrt(2)", "0", 2).normalize();
        assert_eq!(n.alpha(), &parse("sqrt(2)").unwrap());
        assert_eq!((n.index_shift().clone(), n.value_offset()), (big(0), 0));
    }

    #[test]
    fn normalize_negative_beta_shifts_backwards() {
        let n = inst("3/2", "-4", 2).normalize();
        // −4 = −3·(3/2) + 1/2
        assert_eq!(n.index_shift(), &big(-3));
        assert_eq!(n.beta(), &parse("1/2").unwrap());
        assert_eq!(n.n_min(), &big(3));
    }

    #[test]
    fn u_seq_examples() {
        let n = inst("sqrt(2)", "0", 2).normalize();
        assert_eq!(u_seq(&n, &big(1), &big(6)).unwrap(), vec![0, 1, 2, 2, 2, 3]);
        let n = inst("1", "0", 2).normalize();
        assert_eq!(u_seq(&n, &big(1), &big(4)).unwrap(), vec![0, 1, 1, 2]);
        let n = inst("3/2", "0", 2).normalize();
        assert_eq!(u_seq(&n, &big(1), &big(5)).unwrap(), vec![0, 1, 2, 2, 2]);
        assert!(matches!(
            u_seq(&n, &big(0), &big(3)),
            Err(FloorLogError::BelowDomain { .. })
        ));
    }

    #[test]
    fn negative_levels() {
        let n = inst("1/8", "1/100", 2).normalize();
        // 1/100 ∈ [2^-7, 2^-6)
        assert_eq!(n.u(&big(0)).unwrap(), -7);
        assert_eq!(n.u(&big(8)).unwrap(), 0);
    }

    #[test]
    fn v_seq_examples() {
        let n = inst("sqrt(2)", "0", 2).normalize();
        assert_eq!(v_seq(&n, &big(1), &big(5)).unwrap().values, vec![1, 1, 0, 0, 1]);
        let n = inst("1", "0", 2).normalize();
        assert_eq!(v_seq(&n, &big(1), &big(3)).unwrap().values, vec![1, 0, 1]);
        let n = inst("3/2", "0", 2).normalize();
        assert_eq!(v_seq(&n, &big(1), &big(4)).unwrap().values, vec![1, 1, 0, 0]);
    }

    #[test]
    fn v_seq_reports_unsettled_prefix() {
        let n = inst("1", "1/1000", 2).normalize();
        let v = v_seq(&n, &big(0), &big(20)).unwrap();
        assert_eq!(v.values[0], 10);
        assert_eq!(v.settled_after.as_deref(), Some("0"));
    }

    #[test]
    fn c_seq_examples() {
        let jd = c_seq(&inst("sqrt(2)", "0", 2).normalize(), 8);
        assert_eq!(jd.c, ints(&[1, 2, 5, 11, 22, 45, 90, 181]));
        assert!(jd.integrality_hits.is_empty());
        let jd = c_seq(&inst("3/2", "0", 2).normalize(), 6);
        assert_eq!(jd.c, ints(&[1, 2, 5, 10, 21, 42]));
        let jd = c_seq(&inst("1", "0", 2).normalize(), 4);
        assert_eq!(jd.c, ints(&[2, 4, 8, 16]));
        assert_eq!(jd.integrality_hits, vec![1, 2, 3, 4]);
        assert!(jd.witnesses_rationality());
    }

    #[test]
    fn jumps_match_increments() {
        for (a, b, base) in [("sqrt(2)", "0", 2), ("1", "0", 2), ("3/2", "1/3", 3), ("1+sqrt(2)", "0", 10)] {
            let n = inst(a, b, base).normalize();
            let jd = c_seq(&n, 12);
            let check = check_jumps(&n, &jd, &big(3000));
            assert!(check.mismatches.is_empty(), "{a} {b} {base}: {check:?}");
        }
    }
}
