//! The sequence `r_k = ⌊b·{(b^k − β)/α} + (b − 1)·{β/α}⌋` of a normalized
//! instance, computed two ways (closed form and `c_{k+1} − b·c_k`), with the
//! four-case classification through the propositions
//! `P_k : frac(b^k/α) ≥ β/α` and the consistency checks that go with it.

mod period;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::QuadraticValue;
use crate::floorlog::{c_seq, NormalizedInstance, Thresholds};
use crate::numeration::{to_word, DigitStream, Word};

pub use period::{
    detect_period, find_eventual_period, minimize_period, power_cycle, PeriodCertificate,
    PeriodicityVerdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RkError {
    #[error("r_{k} = {r} but case {case:?} predicts {expected}")]
    CaseMismatch {
        k: u32,
        r: i64,
        case: RkCase,
        expected: i64,
    },
}

/// Closed-form evaluation of `r_k` for successive `k`.
struct DirectRk {
    thresholds: Thresholds,
    /// `(b − 1)·frac(β′/α′)`
    beta_term: QuadraticValue,
    b: BigInt,
    base: u32,
    power: BigInt,
    prev_floor: Option<BigInt>,
}

impl DirectRk {
    fn new(norm: &NormalizedInstance) -> Self {
        let thresholds = Thresholds::new(norm);
        let beta_term = thresholds
            .beta_over_alpha()
            .frac()
            .scale(&BigInt::from(norm.base() - 1));
        DirectRk {
            thresholds,
            beta_term,
            b: BigInt::from(norm.base()),
            base: norm.base(),
            power: BigInt::one(),
            prev_floor: None,
        }
    }

    fn eval(&self, x: &QuadraticValue, floor: &BigInt) -> i64 {
        let y = x
            .sub_integer(floor)
            .scale(&self.b)
            .checked_add(&self.beta_term)
            .expect("shared field");
        y.floor_near(&BigInt::zero(), 2 * self.base - 2)
            .to_i64()
            .expect("small value")
    }

    fn next(&mut self) -> i64 {
        self.power *= &self.b;
        let x = self.thresholds.at_power(&self.power);
        let floor = match &self.prev_floor {
            Some(prev) => x.floor_near(&(prev * &self.b), 2 * self.base),
            None => x.floor(),
        };
        let r = self.eval(&x, &floor);
        self.prev_floor = Some(floor);
        r
    }
}

/// `r_k` from the closed form.
pub fn r_direct(norm: &NormalizedInstance, k: u32) -> i64 {
    assert!(k >= 1, "r_k is defined for k >= 1");
    let engine = DirectRk::new(norm);
    let x = engine
        .thresholds
        .at_power(&BigInt::from(norm.base()).pow(k));
    engine.eval(&x, &x.floor())
}

/// `r_1, …, r_{k_max}` from the closed form.
pub fn r_direct_seq(norm: &NormalizedInstance, k_max: u32) -> Vec<i64> {
    let mut engine = DirectRk::new(norm);
    (0..k_max).map(|_| engine.next()).collect()
}

/// `r_k = c_{k+1} − b·c_k`.
pub fn r_recur(norm: &NormalizedInstance, k: u32) -> i64 {
    assert!(k >= 1, "r_k is defined for k >= 1");
    let ck = norm.threshold(k).floor();
    let ck1 = norm.threshold(k + 1).floor();
    (ck1 - ck * norm.base()).to_i64().expect("small value")
}

/// `r_1, …, r_{k_max}` as differences of jump positions.
pub fn r_recur_seq(norm: &NormalizedInstance, k_max: u32) -> Vec<i64> {
    crate::floorlog::jump_increments(&c_seq(norm, k_max + 1), norm.base())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionPk {
    pub k: u32,
    pub holds: bool,
}

/// `P_k`: `frac(b^k/α′) ≥ frac(β′/α′)`, decided exactly.
pub fn eval_pk(norm: &NormalizedInstance, k: u32) -> PropositionPk {
    let inv = norm.alpha().recip().expect("alpha > 0").to_quadratic();
    let lhs = inv.scale(&BigInt::from(norm.base()).pow(k)).frac();
    let rhs = Thresholds::new(norm).beta_over_alpha().frac();
    let holds = lhs.checked_cmp(&rhs).expect("shared field") != Ordering::Less;
    PropositionPk { k, holds }
}

/// Which of the four closed forms `r_k` takes, by `(P_k, P_{k+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RkCase {
    /// `P_k, P_{k+1}`: `r_k = α_{k+1}`
    A,
    /// `P_k, ¬P_{k+1}`: `r_k = α_{k+1} − 1`
    B,
    /// `¬P_k, P_{k+1}`: `r_k = b + α_{k+1}`
    C,
    /// `¬P_k, ¬P_{k+1}`: `r_k = b + α_{k+1} − 1`
    D,
}

impl RkCase {
    pub fn from_propositions(pk: bool, pk1: bool) -> Self {
        match (pk, pk1) {
            (true, true) => RkCase::A,
            (true, false) => RkCase::B,
            (false, true) => RkCase::C,
            (false, false) => RkCase::D,
        }
    }

    /// The value the case assigns to `r_k` given the digit `α_{k+1}`.
    pub fn predicted(self, alpha_digit: u32, base: u32) -> i64 {
        let a = i64::from(alpha_digit);
        let b = i64::from(base);
        match self {
            RkCase::A => a,
            RkCase::B => a - 1,
            RkCase::C => b + a,
            RkCase::D => b + a - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RkRecord {
    pub k: u32,
    pub r: i64,
    pub case: RkCase,
    pub pk: bool,
    pub pk1: bool,
    /// `α_{k+1}`, the `(k+1)`-th base-b digit of `frac(1/α′)`.
    pub alpha_digit: u32,
}

/// Records for `k = 1..=k_max`.
///
/// `r_k` comes from the closed form; the case comes from exact `P_k`
/// evaluations against the digit stream of `frac(1/α′)`. A record whose
/// value disagrees with its case formula is an error.
pub fn classify_all(norm: &NormalizedInstance, k_max: u32) -> Result<Vec<RkRecord>, RkError> {
    let base = norm.base();
    let inv_frac = norm.alpha().recip().expect("alpha > 0").frac();
    let mut stream = DigitStream::new(&inv_frac, base).expect("fractional part in [0,1)");
    let g = Thresholds::new(norm).beta_over_alpha().frac();
    let holds = |rem: &QuadraticValue| rem.checked_cmp(&g).expect("shared field") != Ordering::Less;
    let mut direct = DirectRk::new(norm);

    stream.advance(); // α_1; the remainder is now frac(b/α′)
    let mut pk = holds(stream.remainder());
    let mut out = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let alpha_digit = stream.advance();
        let pk1 = holds(stream.remainder());
        let r = direct.next();
        let case = RkCase::from_propositions(pk, pk1);
        let expected = case.predicted(alpha_digit, base);
        if expected != r {
            return Err(RkError::CaseMismatch {
                k,
                r,
                case,
                expected,
            });
        }
        out.push(RkRecord {
            k,
            r,
            case,
            pk,
            pk1,
            alpha_digit,
        });
        pk = pk1;
    }
    Ok(out)
}

pub fn classify(norm: &NormalizedInstance, k: u32) -> Result<RkRecord, RkError> {
    assert!(k >= 1, "r_k is defined for k >= 1");
    Ok(classify_all(norm, k)?.pop().expect("k >= 1 records"))
}

/// Violations of the value bound `0 ≤ r_k ≤ 2b − 2` and of
/// "case B implies `α_{k+1} ≥ 1`".
pub fn check_remark(records: &[RkRecord], base: u32) -> Vec<u32> {
    let top = 2 * i64::from(base) - 2;
    records
        .iter()
        .filter(|rec| {
            !(0..=top).contains(&rec.r) || (rec.case == RkCase::B && rec.alpha_digit == 0)
        })
        .map(|rec| rec.k)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub pairs_checked: usize,
    /// `k` of every pair `(r_k, r_{k+1})` that breaks either equivalence.
    pub violations: Vec<u32>,
}

/// Checks, on values rather than case tags:
/// `r_k ∈ {α_{k+1}, b + α_{k+1}} ⇔ r_{k+1} ∈ {α_{k+2}, α_{k+2} − 1}` and
/// `r_k ∈ {α_{k+1} − 1, b + α_{k+1} − 1} ⇔ r_{k+1} ∈ {b + α_{k+2}, b + α_{k+2} − 1}`.
pub fn check_transitions(records: &[RkRecord], base: u32) -> TransitionReport {
    let b = i64::from(base);
    let mut violations = Vec::new();
    for pair in records.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        let a1 = i64::from(cur.alpha_digit);
        let a2 = i64::from(next.alpha_digit);
        let first_left = cur.r == a1 || cur.r == b + a1;
        let first_right = next.r == a2 || next.r == a2 - 1;
        let second_left = cur.r == a1 - 1 || cur.r == b + a1 - 1;
        let second_right = next.r == b + a2 || next.r == b + a2 - 1;
        if first_left != first_right || second_left != second_right {
            violations.push(cur.k);
        }
    }
    TransitionReport {
        pairs_checked: records.len().saturating_sub(1),
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionViolation {
    pub k: u32,
    pub case: RkCase,
    pub word: String,
    pub allowed: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub checked: usize,
    pub violations: Vec<ExpansionViolation>,
}

/// For each record, renders `([r_1⋯r_k]_b)_b` (or `([r_1⋯r_k]_b + 1)_b` in
/// case D with `α_{k+1} = 0`) and checks it against
/// `{α_2⋯α_k·t, 1α_2⋯α_k·t}` with the case's last digit `t`.
///
/// Candidate words are compared in canonical form: when `α_2 = 0` the
/// digit string `α_2⋯` carries a leading zero that no expansion has.
pub fn check_expansion_forms(records: &[RkRecord], base: u32) -> ExpansionReport {
    let mut value = BigInt::zero();
    let mut violations = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        value = value * base + rec.r;
        let incremented = rec.case == RkCase::D && rec.alpha_digit == 0;
        let last = match rec.case {
            RkCase::A | RkCase::C => Some(rec.alpha_digit),
            RkCase::B | RkCase::D if incremented => Some(rec.alpha_digit),
            RkCase::B | RkCase::D => rec.alpha_digit.checked_sub(1),
        };
        let rendered = if incremented {
            to_word(&(&value + 1u32), base)
        } else {
            to_word(&value, base)
        };
        let word = match rendered {
            Ok(w) => w.to_string(),
            Err(_) => format!("negative:{value}"),
        };
        // α_2 … α_k are the digits of the previous records
        let mut digits: Vec<u32> = records[..i].iter().map(|r| r.alpha_digit).collect();
        let allowed = match last {
            Some(t) => {
                digits.push(t);
                let plain = Word::new(base, digits.clone()).expect("digits below base");
                let mut lead = vec![1];
                lead.extend(digits);
                let lead = Word::new(base, lead).expect("digits below base");
                [plain.canonical().to_string(), lead.canonical().to_string()]
            }
            None => [String::from("<none>"), String::from("<none>")],
        };
        if !allowed.contains(&word) {
            violations.push(ExpansionViolation {
                k: rec.k,
                case: rec.case,
                word,
                allowed,
            });
        }
    }
    ExpansionReport {
        checked: records.len(),
        violations,
    }
}

/// Every lemma-level consistency check over `k = 1..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub k_max: u32,
    pub case_counts: [usize; 4],
    pub remark_violations: Vec<u32>,
    pub transitions: TransitionReport,
    pub expansions: ExpansionReport,
    /// Indices where the closed form and `c_{k+1} − b·c_k` disagree.
    pub direct_recur_mismatches: Vec<u32>,
}

impl LemmaReport {
    pub fn is_clean(&self) -> bool {
        self.remark_violations.is_empty()
            && self.transitions.violations.is_empty()
            && self.expansions.violations.is_empty()
            && self.direct_recur_mismatches.is_empty()
    }
}

pub fn check_lemmas(norm: &NormalizedInstance, k_max: u32) -> Result<(Vec<RkRecord>, LemmaReport), RkError> {
    let records = classify_all(norm, k_max)?;
    let base = norm.base();
    let recur = r_recur_seq(norm, k_max);
    let direct_recur_mismatches = records
        .iter()
        .zip(&recur)
        .filter(|(rec, &r)| rec.r != r)
        .map(|(rec, _)| rec.k)
        .collect();
    let mut case_counts = [0usize; 4];
    for rec in &records {
        case_counts[rec.case as usize] += 1;
    }
    let report = LemmaReport {
        k_max,
        case_counts,
        remark_violations: check_remark(&records, base),
        transitions: check_transitions(&records, base),
        expansions: check_expansion_forms(&records, base),
        direct_recur_mismatches,
    };
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;
    use crate::floorlog::ProblemInstance;

    fn norm(a: &str, b: &str, base: u32) -> NormalizedInstance {
        ProblemInstance::new(parse(a).unwrap(), parse(b).unwrap(), base)
            .unwrap()
            .normalize()
    }

    #[test]
    fn r_examples_both_routes() {
        let cases: [(&str, &str, u32, Vec<i64>); 3] = [
            ("sqrt(2)", "0", 2, vec![0, 1, 1, 0, 1, 0, 1]),
            ("3/2", "0", 2, vec![0, 1, 0, 1, 0]),
            ("1", "0", 2, vec![0, 0, 0, 0, 0]),
        ];
        for (a, b, base, expected) in cases {
            let n = norm(a, b, base);
            let k_max = expected.len() as u32;
            assert_eq!(r_direct_seq(&n, k_max), expected, "{a}");
            assert_eq!(r_recur_seq(&n, k_max), expected, "{a}");
            for k in 1..=k_max {
                assert_eq!(r_direct(&n, k), expected[k as usize - 1]);
                assert_eq!(r_recur(&n, k), expected[k as usize - 1]);
            }
        }
    }

    #[test]
    fn pk_examples() {
        let n = norm("sqrt(2)", "0", 2);
        assert!((0..20).all(|k| eval_pk(&n, k).holds));
        let n = norm("3/2", "0", 2);
        assert!((0..20).all(|k| eval_pk(&n, k).holds));
        // frac(4/3) = 1/3 < 2/3
        assert!(!eval_pk(&norm("3/2", "1", 2), 1).holds);
    }

    #[test]
    fn classify_examples() {
        let rec = classify(&norm("sqrt(2)", "0", 2), 3).unwrap();
        assert_eq!((rec.case, rec.r, rec.alpha_digit), (RkCase::A, 1, 1));

        let rec = classify(&norm("3/2", "1", 2), 1).unwrap();
        assert!(matches!(rec.case, RkCase::C | RkCase::D));
        assert!(!rec.pk);

        for rec in classify_all(&norm("1", "0", 2), 6).unwrap() {
            assert_eq!((rec.case, rec.alpha_digit, rec.r), (RkCase::A, 0, 0));
        }
    }

    #[test]
    fn transitions_clean() {
        for (a, b) in [("sqrt(2)", "0"), ("3/2", "1")] {
            let n = norm(a, b, 2);
            let recs = classify_all(&n, 200).unwrap();
            assert!(check_transitions(&recs, 2).violations.is_empty(), "{a}");
        }
        let single = classify_all(&norm("sqrt(2)", "0", 2), 1).unwrap();
        let rep = check_transitions(&single, 2);
        assert_eq!((rep.pairs_checked, rep.violations.len()), (0, 0));
    }

    #[test]
    fn expansion_form_of_sqrt2_at_seven() {
        let recs = classify_all(&norm("sqrt(2)", "0", 2), 7).unwrap();
        let rep = check_expansion_forms(&recs, 2);
        assert!(rep.violations.is_empty(), "{rep:?}");
        let value = recs.iter().fold(BigInt::zero(), |acc, r| acc * 2 + r.r);
        assert_eq!(value, BigInt::from(53));
        assert_eq!(to_word(&value, 2).unwrap().to_string(), "110101");
    }

    #[test]
    fn expansion_forms_three_halves() {
        let recs = classify_all(&norm("3/2", "0", 2), 4).unwrap();
        assert!(check_expansion_forms(&recs, 2).violations.is_empty());
    }

    #[test]
    fn lemma_report_on_mixed_cases() {
        let n = norm("7/4", "1/3", 3);
        let (recs, rep) = check_lemmas(&n, 300).unwrap();
        assert!(rep.is_clean(), "{rep:?}");
        // β ≠ 0 should exercise more than one case
        assert!(rep.case_counts.iter().filter(|&&c| c > 0).count() >= 2);
        assert_eq!(recs.len(), 300);
    }
}
