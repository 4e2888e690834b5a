//! The base-changed language `L_b(u) = {([u_0⋯u_n]_b)_b : n ≥ 0}` of a
//! digit sequence `u`: word generation, the one-digit growth of word lengths,
//! pattern families `V0·V1^m·V2` with exact certificates, and the decision
//! "regular iff `u` is ultimately periodic".
//!
//! The value 0 is rendered as the empty word.

mod pattern;
mod source;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::automata::{AutomataError, Dfa, DfaTable};
use crate::numeration::{to_word, NumerationError, Word};
use crate::rkseq::find_eventual_period;

pub use pattern::{
    certify_pattern, find_pattern, CertifiedPattern, PatternCandidate, PatternSummary, Rejection,
};
pub use source::{AperiodicityCertificate, DigitSource, SourcePeriodicity};

/// Regular verdicts are checked against direct enumeration on every word of
/// at most this many digits.
pub const CHECK_LEN: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("invalid source: {0}")]
    Source(String),
    #[error(transparent)]
    Numeration(#[from] NumerationError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// `w_n = [u_0⋯u_n]_b` for `n = 0..count`, with expansion lengths.
#[derive(Clone, Debug)]
pub struct LanguageWords {
    base: u32,
    terms: Vec<BigInt>,
    values: Vec<BigInt>,
    lengths: Vec<usize>,
}

impl LanguageWords {
    pub fn from_terms(base: u32, terms: Vec<BigInt>) -> Self {
        let mut values = Vec::with_capacity(terms.len());
        let mut lengths = Vec::with_capacity(terms.len());
        let mut w = BigInt::zero();
        // smallest power of b above w: b^len
        let mut bound = BigInt::from(1u32);
        let mut len = 0usize;
        for u in &terms {
            w = w * base + u;
            while w >= bound {
                bound *= base;
                len += 1;
            }
            values.push(w.clone());
            lengths.push(len);
        }
        LanguageWords {
            base,
            terms,
            values,
            lengths,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn term(&self, n: usize) -> &BigInt {
        &self.terms[n]
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn value(&self, n: usize) -> &BigInt {
        &self.values[n]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn length(&self, n: usize) -> usize {
        self.lengths[n]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// `(w_n)_b`, empty for `w_n = 0`.
    pub fn word(&self, n: usize) -> Word {
        if self.values[n].is_zero() {
            Word::empty(self.base)
        } else {
            to_word(&self.values[n], self.base).expect("values are non-negative")
        }
    }

    /// `[u_{n+1}⋯u_{n+p}]_b`.
    pub fn block_value(&self, n: usize, p: usize) -> BigInt {
        self.terms[n + 1..=n + p]
            .iter()
            .fold(BigInt::zero(), |acc, u| acc * self.base + u)
    }
}

/// `w_0, …, w_{n_max}` (fewer for a shorter finite source).
pub fn words(src: &DigitSource, base: u32, n_max: usize) -> LanguageWords {
    LanguageWords::from_terms(base, src.terms(n_max + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthClaim {
    /// Least `N` with `|(w_{n+1})_b| = |(w_n)_b| + 1` for every computed `n ≥ N`.
    pub stabilization: usize,
    pub steps_checked: usize,
    /// Steps `n → n+1` that did not add exactly one digit.
    pub irregular_steps: Vec<usize>,
    /// Steps no correct computation can produce: a nonzero word that does
    /// not grow, or a jump of two or more digits on a digit below `b`.
    pub violations: Vec<usize>,
}

impl LengthClaim {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_length_claim(lw: &LanguageWords) -> LengthClaim {
    let base = BigInt::from(lw.base);
    let mut irregular_steps = Vec::new();
    let mut violations = Vec::new();
    for n in 0..lw.count().saturating_sub(1) {
        let step = lw.lengths[n + 1] as i64 - lw.lengths[n] as i64;
        if step == 1 {
            continue;
        }
        irregular_steps.push(n);
        if !lw.values[n].is_zero() && (step < 1 || lw.terms[n + 1] < base) {
            violations.push(n);
        }
    }
    LengthClaim {
        stabilization: irregular_steps.last().map_or(0, |&n| n + 1),
        steps_checked: lw.count().saturating_sub(1),
        irregular_steps,
        violations,
    }
}

/// Outcome of one pattern search, kept as evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchNote {
    pub period: usize,
    pub residue: usize,
    pub found_at: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum RegularityVerdict {
    Regular {
        dfa: Dfa,
        patterns: Vec<CertifiedPattern>,
        /// Words outside every pattern family, including the empty word for
        /// residue classes that stay at 0.
        exceptions: Vec<Word>,
        periodicity: SourcePeriodicity,
    },
    NonRegular {
        certificate: AperiodicityCertificate,
    },
    Inconclusive {
        window: usize,
        reason: String,
        periodicity: SourcePeriodicity,
        searches: Vec<SearchNote>,
        empirical_period: Option<(u64, u64)>,
    },
}

/// Serializable view of a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictSummary {
    pub kind: &'static str,
    pub patterns: Vec<PatternSummary>,
    pub exceptions: Vec<String>,
    pub dfa_states: Option<usize>,
    pub dfa_live_states: Option<usize>,
    pub certificate: VerdictCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dfa: Option<DfaTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub searches: Vec<SearchNote>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_period: Option<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum VerdictCertificate {
    Periodicity(SourcePeriodicity),
    Aperiodicity(AperiodicityCertificate),
}

impl RegularityVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            RegularityVerdict::Regular { .. } => "regular",
            RegularityVerdict::NonRegular { .. } => "non_regular",
            RegularityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, RegularityVerdict::Regular { .. })
    }

    pub fn is_non_regular(&self) -> bool {
        matches!(self, RegularityVerdict::NonRegular { .. })
    }

    pub fn dfa(&self) -> Option<&Dfa> {
        match self {
            RegularityVerdict::Regular { dfa, .. } => Some(dfa),
            _ => None,
        }
    }

    pub fn patterns(&self) -> &[CertifiedPattern] {
        match self {
            RegularityVerdict::Regular { patterns, .. } => patterns,
            _ => &[],
        }
    }

    pub fn summary(&self, with_table: bool) -> VerdictSummary {
        let mut s = VerdictSummary {
            kind: self.kind(),
            patterns: Vec::new(),
            exceptions: Vec::new(),
            dfa_states: None,
            dfa_live_states: None,
            certificate: VerdictCertificate::Periodicity(SourcePeriodicity::Unknown {
                reason: String::new(),
            }),
            dfa: None,
            reason: None,
            searches: Vec::new(),
            empirical_period: None,
        };
        match self {
            RegularityVerdict::Regular {
                dfa,
                patterns,
                exceptions,
                periodicity,
            } => {
                s.patterns = patterns.iter().map(CertifiedPattern::summary).collect();
                s.exceptions = exceptions.iter().map(Word::to_string).collect();
                s.dfa_states = Some(dfa.state_count());
                s.dfa_live_states = Some(dfa.live_state_count());
                s.certificate = VerdictCertificate::Periodicity(periodicity.clone());
                s.dfa = with_table.then(|| dfa.table());
            }
            RegularityVerdict::NonRegular { certificate } => {
                s.certificate = VerdictCertificate::Aperiodicity(certificate.clone());
            }
            RegularityVerdict::Inconclusive {
                reason,
                periodicity,
                searches,
                empirical_period,
                ..
            } => {
                s.certificate = VerdictCertificate::Periodicity(periodicity.clone());
                s.reason = Some(reason.clone());
                s.searches = searches.clone();
                s.empirical_period = *empirical_period;
            }
        }
        s
    }
}

/// Regularity of `L_b(u)`.
///
/// A certified ultimately periodic `u` yields `Regular` with one certified
/// pattern per residue class (or a finite language for finite `u`); a
/// certified aperiodic `u` yields `NonRegular`; anything else is
/// `Inconclusive`. Every `Regular` verdict is re-checked against the
/// enumerated members of length at most [`CHECK_LEN`].
pub fn decide_regularity(
    src: &DigitSource,
    base: u32,
    window: usize,
) -> Result<RegularityVerdict, LangError> {
    crate::numeration::check_base(base)?;
    let periodicity = src.periodicity(window as u64);
    match periodicity {
        SourcePeriodicity::Aperiodic { certificate } => {
            Ok(RegularityVerdict::NonRegular { certificate })
        }
        SourcePeriodicity::Finite { len } => {
            let lw = LanguageWords::from_terms(base, src.terms(len));
            let members: Vec<Word> = dedup((0..lw.count()).map(|n| lw.word(n)).collect());
            let dfa = Dfa::from_patterns(base, &[], &members)?;
            let verdict = RegularityVerdict::Regular {
                dfa,
                patterns: Vec::new(),
                exceptions: members,
                periodicity: SourcePeriodicity::Finite { len },
            };
            self_check(&verdict, &lw, base, true)?;
            Ok(verdict)
        }
        SourcePeriodicity::Certified { start, period, .. } => {
            decide_periodic(src, base, window, start, period, periodicity.clone())
        }
        SourcePeriodicity::Unknown { reason } => {
            let lw = words(src, base, window.max(1) - 1);
            let small: Option<Vec<i64>> = lw.terms().iter().map(ToPrimitive::to_i64).collect();
            let empirical_period = small.as_deref().and_then(find_eventual_period);
            Ok(RegularityVerdict::Inconclusive {
                window: lw.count(),
                searches: search_notes(&lw, 8),
                periodicity: SourcePeriodicity::Unknown {
                    reason: reason.clone(),
                },
                reason,
                empirical_period,
            })
        }
    }
}

fn dedup(mut words: Vec<Word>) -> Vec<Word> {
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.digits().cmp(b.digits())));
    words.dedup();
    words
}

fn search_notes(lw: &LanguageWords, max_period: usize) -> Vec<SearchNote> {
    let mut notes = Vec::new();
    for p in 1..=max_period {
        for residue in 0..p {
            notes.push(SearchNote {
                period: p,
                residue,
                found_at: find_pattern(lw, p, residue, 0).map(|c| c.n0),
            });
        }
    }
    notes
}

/// One residue class modulo the pattern period.
enum ClassOutcome {
    Pattern(CertifiedPattern),
    /// `w_n = 0` from `anchor` on.
    Zero { anchor: usize },
}

impl ClassOutcome {
    fn anchor(&self) -> usize {
        match self {
            ClassOutcome::Pattern(c) => c.n0,
            ClassOutcome::Zero { anchor } => *anchor,
        }
    }
}

fn settle_class(
    lw: &LanguageWords,
    periodicity: &SourcePeriodicity,
    p: usize,
    residue: usize,
    start: usize,
) -> Option<ClassOutcome> {
    let floor = start.saturating_sub(1);
    let first = floor + (residue + p - floor % p) % p;
    if first + p >= lw.count() {
        return None;
    }
    // both vanish: the block is constant on the class, so w stays 0
    if lw.value(first).is_zero() && lw.block_value(first, p).is_zero() {
        return Some(ClassOutcome::Zero { anchor: first });
    }
    let mut from = first;
    while let Some(cand) = find_pattern(lw, p, residue, from) {
        match certify_pattern(periodicity, lw, &cand) {
            Ok(cert) => return Some(ClassOutcome::Pattern(cert)),
            Err(_) => from = cand.n0 + 1,
        }
    }
    None
}

fn decide_periodic(
    src: &DigitSource,
    base: u32,
    window: usize,
    start: usize,
    period: usize,
    periodicity: SourcePeriodicity,
) -> Result<RegularityVerdict, LangError> {
    let mut count = window.max(start + 8 * period + 2 * CHECK_LEN);
    let cap = 8 * count;
    let mut searches = Vec::new();
    while count <= cap {
        let lw = LanguageWords::from_terms(base, src.terms(count));
        for mult in 1..=4 {
            let p = period * mult;
            let outcomes: Vec<Option<ClassOutcome>> = (0..p)
                .map(|r| settle_class(&lw, &periodicity, p, r, start))
                .collect();
            searches.extend(outcomes.iter().enumerate().map(|(residue, o)| SearchNote {
                period: p,
                residue,
                found_at: o.as_ref().map(ClassOutcome::anchor),
            }));
            if outcomes.iter().all(Option::is_some) {
                let outcomes = outcomes.into_iter().flatten().collect();
                let verdict = assemble(&lw, base, p, outcomes, periodicity)?;
                self_check(&verdict, &lw, base, false)?;
                return Ok(verdict);
            }
        }
        count *= 2;
    }
    Ok(RegularityVerdict::Inconclusive {
        window: count / 2,
        reason: "u is certified ultimately periodic but no certified pattern was found in the window"
            .into(),
        periodicity,
        searches,
        empirical_period: None,
    })
}

fn assemble(
    lw: &LanguageWords,
    base: u32,
    p: usize,
    outcomes: Vec<ClassOutcome>,
    periodicity: SourcePeriodicity,
) -> Result<RegularityVerdict, LangError> {
    let mut patterns = Vec::new();
    let mut exceptions = Vec::new();
    for (r, outcome) in outcomes.into_iter().enumerate() {
        let anchor = outcome.anchor();
        match outcome {
            ClassOutcome::Pattern(cert) => patterns.push(cert),
            ClassOutcome::Zero { .. } => exceptions.push(Word::empty(base)),
        }
        exceptions.extend((r..anchor).step_by(p).map(|n| lw.word(n)));
    }
    let exceptions = dedup(exceptions);
    let families: Vec<_> = patterns.iter().map(CertifiedPattern::family).collect();
    let dfa = Dfa::from_patterns(base, &families, &exceptions)?;
    Ok(RegularityVerdict::Regular {
        dfa,
        patterns,
        exceptions,
        periodicity,
    })
}

/// Replays every pattern on the computed words and compares the automaton
/// with the enumerated members of length at most [`CHECK_LEN`].
fn self_check(
    verdict: &RegularityVerdict,
    lw: &LanguageWords,
    base: u32,
    exhaustive: bool,
) -> Result<(), LangError> {
    let RegularityVerdict::Regular { dfa, patterns, .. } = verdict else {
        return Ok(());
    };
    for pat in patterns {
        if let Some(m) = pat.replay(lw, 10) {
            return Err(LangError::Internal(format!(
                "pattern {} fails to replay at m = {m}",
                pat.summary().text
            )));
        }
    }
    // values never decrease, so once a word is too long every later one is;
    // an all-zero computed range means u has settled at 0
    let complete = exhaustive
        || lw.lengths().last().is_some_and(|&l| l > CHECK_LEN)
        || lw.values().last().is_some_and(Zero::is_zero);
    if !complete {
        return Err(LangError::Internal(format!(
            "only {} words computed, too few to enumerate lengths up to {CHECK_LEN}",
            lw.count()
        )));
    }
    let members: Vec<Word> = dedup(
        (0..lw.count())
            .filter(|&n| lw.length(n) <= CHECK_LEN)
            .map(|n| lw.word(n))
            .collect(),
    );
    let trie = Dfa::from_words(base, members.iter().map(Word::digits))?;
    let bounded = dfa.intersect(&Dfa::length_bounded(base, CHECK_LEN))?;
    match bounded.equivalent(&trie)?.witness {
        None => Ok(()),
        Some(w) => Err(LangError::Internal(format!(
            "automaton and enumeration disagree on {w:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;
    use crate::floorlog::ProblemInstance;
    use crate::numeration::GeneralWord;

    fn gw(text: &str) -> GeneralWord {
        text.parse().unwrap()
    }

    fn rk(a: &str, b: &str, base: u32) -> DigitSource {
        DigitSource::FromRk(
            ProblemInstance::new(parse(a).unwrap(), parse(b).unwrap(), base)
                .unwrap()
                .normalize(),
        )
    }

    fn rendered(lw: &LanguageWords) -> Vec<String> {
        (0..lw.count()).map(|n| lw.word(n).to_string()).collect()
    }

    #[test]
    fn thue_morse_words() {
        let lw = words(&DigitSource::thue_morse(gw("10"), gw("02")).unwrap(), 2, 6);
        let values: Vec<i64> = lw.values().iter().map(|v| v.to_i64().unwrap()).collect();
        assert_eq!(values, [1, 2, 4, 10, 20, 42, 85]);
        assert_eq!(
            rendered(&lw),
            ["1", "10", "100", "1010", "10100", "101010", "1010101"]
        );
        assert_eq!(verify_length_claim(&lw).stabilization, 0);
    }

    #[test]
    fn explicit_and_rk_words() {
        let lw = words(&DigitSource::Explicit(gw("1")), 5, 10);
        assert_eq!(rendered(&lw), ["1"]);
        assert_eq!(verify_length_claim(&lw).stabilization, 0);

        let lw = words(&rk("3/2", "0", 2), 2, 4);
        assert_eq!(rendered(&lw), ["1", "10", "101", "1010", "10101"]);
        let claim = verify_length_claim(&lw);
        assert_eq!((claim.stabilization, claim.holds()), (0, true));
    }

    #[test]
    fn length_claim_with_large_digits() {
        // 9 read in base 2 starts four digits long, then grows by one
        let src = DigitSource::periodic(gw("9"), gw("0")).unwrap();
        let claim = verify_length_claim(&words(&src, 2, 6));
        assert!(claim.holds());
        assert_eq!(claim.stabilization, 0);
        // repeated 9s overflow now and then but never break the bound
        let src = DigitSource::periodic(gw("1"), gw("9")).unwrap();
        assert!(verify_length_claim(&words(&src, 2, 40)).holds());
    }

    #[test]
    fn three_halves_is_regular() {
        let v = decide_regularity(&rk("3/2", "0", 2), 2, 200).unwrap();
        let RegularityVerdict::Regular { dfa, patterns, .. } = &v else {
            panic!("{:?}", v.summary(false));
        };
        assert_eq!(patterns.len(), 2);
        assert_eq!(dfa.live_state_count(), 3);
        assert!(dfa.accepts(&[1, 0, 1, 0, 1]) && !dfa.accepts(&[1, 1]));
    }

    #[test]
    fn irrational_and_thue_morse_are_not_regular() {
        assert!(decide_regularity(&rk("sqrt(2)", "0", 2), 2, 200)
            .unwrap()
            .is_non_regular());
        let tm = DigitSource::thue_morse(gw("10"), gw("02")).unwrap();
        assert!(decide_regularity(&tm, 2, 200).unwrap().is_non_regular());
    }

    #[test]
    fn uneven_blocks_are_inconclusive() {
        let tm = DigitSource::thue_morse(gw("1"), gw("10")).unwrap();
        let v = decide_regularity(&tm, 2, 300).unwrap();
        assert_eq!(v.kind(), "inconclusive");
    }

    #[test]
    fn finite_and_zero_sources() {
        let v = decide_regularity(&DigitSource::Explicit(gw("1,7,3")), 3, 10).unwrap();
        let dfa = v.dfa().unwrap();
        // 1, 1·3+7 = 10 = (101)_3, 10·3+3 = 33 = (1020)_3
        assert!(dfa.accepts(&[1]) && dfa.accepts(&[1, 0, 1]) && dfa.accepts(&[1, 0, 2, 0]));
        assert!(!dfa.accepts(&[1, 0]));

        // u = 0^ω: every word is empty
        let zero = DigitSource::periodic(gw(""), gw("0")).unwrap();
        let v = decide_regularity(&zero, 2, 50).unwrap();
        let dfa = v.dfa().unwrap();
        assert!(dfa.accepts(&[]) && dfa.live_state_count() == 1);

        // u = 1 0^ω: powers of two
        let pow = DigitSource::periodic(gw("1"), gw("0")).unwrap();
        let v = decide_regularity(&pow, 2, 50).unwrap();
        let dfa = v.dfa().unwrap();
        assert!(dfa.accepts(&[1, 0, 0, 0]) && !dfa.accepts(&[1, 1]));
    }

    #[test]
    fn prefix_does_not_change_verdict() {
        for (a, base) in [("3/2", 2), ("sqrt(3)", 3), ("5/3", 3)] {
            let plain = decide_regularity(&rk(a, "0", base), base, 200).unwrap();
            let pre = DigitSource::prefixed(vec![1, 0, 2], rk(a, "0", base));
            let shifted = decide_regularity(&pre, base, 200).unwrap();
            assert_eq!(plain.kind(), shifted.kind(), "{a}");
        }
    }
}
