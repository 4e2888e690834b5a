use num_bigint::BigInt;
use serde::Serialize;

use super::{LanguageWords, SourcePeriodicity};
use crate::automata::WordFamily;
use crate::numeration::Word;

/// A split `V0·V1^m·V2` consistent with the words `w_{n0+mp}` of one
/// residue class throughout the computed range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternCandidate {
    pub period: usize,
    pub residue: usize,
    pub n0: usize,
    pub v0: Word,
    pub v1: Word,
    pub v2: Word,
}

/// A candidate proven to satisfy `(w_{n0+mp})_b = V0·V1^m·V2` for every
/// `m ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedPattern {
    pub period: usize,
    pub residue: usize,
    pub n0: usize,
    pub v0: Word,
    pub v1: Word,
    pub v2: Word,
    /// `C = [V1V2]_b − b^p·[V2]_b`, equal to `w_{n+p} − b^p·w_n` on the class.
    pub constant: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternSummary {
    pub text: String,
    pub v0: String,
    pub v1: String,
    pub v2: String,
    pub period: usize,
    pub residue: usize,
    pub n0: usize,
    pub constant: String,
}

/// The certification clause a candidate failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// (i) the word at `n0 + m·p` is not `V0·V1^m·V2`.
    BaseCase { m: usize },
    /// (ii) the recurrence `w_{n+p} = b^p·w_n + C` is not established.
    Recurrence(String),
    /// (iii) the block value of `u` differs from `[V1V2]_b − b^p·[V2]_b`.
    Identity { from_source: BigInt, from_words: BigInt },
    /// (iv) empty or zero-led `V0`, or a digit outside the alphabet.
    Digits(String),
}

impl CertifiedPattern {
    pub fn family(&self) -> WordFamily {
        WordFamily {
            prefix: self.v0.clone(),
            pump: self.v1.clone(),
            suffix: self.v2.clone(),
        }
    }

    /// `V0·V1^m·V2`.
    pub fn word_at(&self, m: usize) -> Word {
        let mut w = self.v0.clone();
        for _ in 0..m {
            w = w.concat(&self.v1);
        }
        w.concat(&self.v2)
    }

    /// First `m ≤ m_max` whose computed word value disagrees with
    /// `[V0·V1^m·V2]_b`, if any.
    pub fn replay(&self, lw: &LanguageWords, m_max: usize) -> Option<usize> {
        (0..=m_max)
            .take_while(|m| self.n0 + m * self.period < lw.count())
            .find(|&m| &self.word_at(m).value() != lw.value(self.n0 + m * self.period))
    }

    pub fn summary(&self) -> PatternSummary {
        let show = |w: &Word| w.to_string();
        PatternSummary {
            text: format!("{}({})*{}", show(&self.v0), show(&self.v1), show(&self.v2)),
            v0: show(&self.v0),
            v1: show(&self.v1),
            v2: show(&self.v2),
            period: self.period,
            residue: self.residue,
            n0: self.n0,
            constant: self.constant.to_string(),
        }
    }
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn common_suffix(a: &[u32], b: &[u32]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

/// Does `w` spell `v0·v1^m·v2`?
fn spells(w: &[u32], v0: &[u32], v1: &[u32], v2: &[u32], m: usize) -> bool {
    w.len() == v0.len() + m * v1.len() + v2.len()
        && w.starts_with(v0)
        && w.ends_with(v2)
        && w[v0.len()..w.len() - v2.len()]
            .chunks(v1.len().max(1))
            .all(|c| c == v1)
}

/// Earliest `n0 ≥ from` with `n0 ≡ residue (mod p)`, and then the shortest
/// nonempty `V0`, such that every computed word `w_{n0+mp}` spells
/// `V0·V1^m·V2`.
///
/// Anchors are only tried in the first half of the computed range, so each
/// candidate is backed by at least half the window.
pub fn find_pattern(
    lw: &LanguageWords,
    p: usize,
    residue: usize,
    from: usize,
) -> Option<PatternCandidate> {
    assert!(p >= 1 && residue < p, "residue must be below the period");
    let count = lw.count();
    let mut cache: Vec<Option<Vec<u32>>> = vec![None; count];
    let mut digits = |n: usize| -> Vec<u32> {
        cache[n]
            .get_or_insert_with(|| lw.word(n).digits().to_vec())
            .clone()
    };
    let mut n0 = from + (residue + p - from % p) % p;
    while n0 <= count / 2 && n0 + 2 * p < count {
        let l0 = lw.length(n0);
        if l0 >= 1 && lw.length(n0 + p) == l0 + p && lw.length(n0 + 2 * p) == l0 + 2 * p {
            let w0 = digits(n0);
            let w1 = digits(n0 + p);
            let lcp = common_prefix(&w0, &w1).min(l0);
            let lcs = common_suffix(&w0, &w1).min(l0);
            for i in (l0 - lcs).max(1)..=lcp {
                let (v0, v2) = w0.split_at(i);
                let v1 = &w1[i..i + p];
                let consistent = (2..)
                    .map(|m| (m, n0 + m * p))
                    .take_while(|&(_, n)| n < count)
                    .all(|(m, n)| spells(&digits(n), v0, v1, v2, m));
                if consistent {
                    let word = |d: &[u32]| Word::new(lw.base(), d.to_vec()).expect("base-b digits");
                    return Some(PatternCandidate {
                        period: p,
                        residue,
                        n0,
                        v0: word(v0),
                        v1: word(v1),
                        v2: word(v2),
                    });
                }
            }
        }
        n0 += p;
    }
    None
}

/// Proves `(w_{n0+mp})_b = V0·V1^m·V2` for all `m ≥ 0`.
///
/// Clauses: (i) the words at `m = 0` and `m = 1` match; (ii) `u` has a
/// certified period dividing `p` from index `n0 + 1` on, so the block
/// `C = [u_{n+1}⋯u_{n+p}]_b` is the same for every `n` of the class and
/// `w_{n+p} = b^p·w_n + C`; (iii) `C = [V1V2]_b − b^p·[V2]_b`; (iv) `V0` is
/// nonempty with a nonzero leading digit. Given these, induction on `m`
/// closes: `b^p·[V0 V1^m V2]_b + C = [V0 V1^{m+1} V2]_b`, and the leading
/// digit makes each expansion canonical.
pub fn certify_pattern(
    periodicity: &SourcePeriodicity,
    lw: &LanguageWords,
    cand: &PatternCandidate,
) -> Result<CertifiedPattern, Rejection> {
    let base = lw.base();
    let p = cand.period;
    for w in [&cand.v0, &cand.v1, &cand.v2] {
        if w.base() != base {
            return Err(Rejection::Digits(format!("word over base {}", w.base())));
        }
    }
    if cand.v1.len() != p {
        return Err(Rejection::Digits(format!("|V1| = {} but p = {p}", cand.v1.len())));
    }
    match cand.v0.digits().first() {
        Some(&d) if d != 0 => {}
        _ => return Err(Rejection::Digits("V0 must start with a nonzero digit".into())),
    }

    if cand.n0 >= lw.count() || lw.value(cand.n0) != &cand.v0.concat(&cand.v2).value() {
        return Err(Rejection::BaseCase { m: 0 });
    }

    if cand.n0 + p >= lw.count() {
        return Err(Rejection::Recurrence("block beyond computed terms".into()));
    }
    let from_source = lw.block_value(cand.n0, p);
    let scale = BigInt::from(base).pow(p as u32);
    let from_words = cand.v1.concat(&cand.v2).value() - &scale * cand.v2.value();
    if from_source != from_words {
        return Err(Rejection::Identity {
            from_source,
            from_words,
        });
    }

    match periodicity {
        SourcePeriodicity::Certified { start, period, .. } => {
            if *period == 0 || !p.is_multiple_of(*period) {
                return Err(Rejection::Recurrence(format!(
                    "certified period {period} does not divide {p}"
                )));
            }
            if cand.n0 + 1 < *start {
                return Err(Rejection::Recurrence(format!(
                    "anchor {} precedes the periodic part starting at {start}",
                    cand.n0
                )));
            }
        }
        other => {
            return Err(Rejection::Recurrence(format!(
                "source has no periodicity certificate: {other:?}"
            )))
        }
    }
    // Horner on the computed data agrees with the recurrence
    if lw.value(cand.n0 + p) != &(&scale * lw.value(cand.n0) + &from_source) {
        return Err(Rejection::Recurrence("Horner identity fails on data".into()));
    }

    let m1 = cand.v0.concat(&cand.v1).concat(&cand.v2);
    if lw.value(cand.n0 + p) != &m1.value() {
        return Err(Rejection::BaseCase { m: 1 });
    }

    Ok(CertifiedPattern {
        period: p,
        residue: cand.residue,
        n0: cand.n0,
        v0: cand.v0.clone(),
        v1: cand.v1.clone(),
        v2: cand.v2.clone(),
        constant: from_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse;
    use crate::floorlog::ProblemInstance;
    use crate::langreg::{words, DigitSource};
    use crate::numeration::GeneralWord;

    fn three_halves() -> DigitSource {
        DigitSource::FromRk(
            ProblemInstance::new(parse("3/2").unwrap(), parse("0").unwrap(), 2)
                .unwrap()
                .normalize(),
        )
    }

    fn w(text: &str) -> Word {
        Word::parse(2, text).unwrap()
    }

    #[test]
    fn three_halves_candidates() {
        let lw = words(&three_halves(), 2, 40);
        let c0 = find_pattern(&lw, 2, 0, 0).unwrap();
        assert_eq!((c0.n0, c0.v0.to_string(), c0.v1.to_string(), c0.v2.len()), (0, "1".into(), "01".into(), 0));
        let c1 = find_pattern(&lw, 2, 1, 0).unwrap();
        assert_eq!((c1.n0, c1.v0.to_string(), c1.v1.to_string(), c1.v2.to_string()), (1, "1".into(), "01".into(), "0".into()));
    }

    #[test]
    fn three_halves_certificates() {
        let src = three_halves();
        let lw = words(&src, 2, 40);
        let per = src.periodicity(100);
        let cert = certify_pattern(&per, &lw, &find_pattern(&lw, 2, 0, 0).unwrap()).unwrap();
        assert_eq!(cert.constant, BigInt::from(1));
        assert_eq!(cert.replay(&lw, 10), None);
        let cert = certify_pattern(&per, &lw, &find_pattern(&lw, 2, 1, 0).unwrap()).unwrap();
        // [010]_2 − 4·[0]_2
        assert_eq!(cert.constant, BigInt::from(2));
    }

    #[test]
    fn wrong_split_fails_identity() {
        let src = three_halves();
        let lw = words(&src, 2, 40);
        let bad = PatternCandidate {
            period: 2,
            residue: 0,
            n0: 0,
            v0: w("1"),
            v1: w("11"),
            v2: Word::empty(2),
        };
        assert!(matches!(
            certify_pattern(&src.periodicity(100), &lw, &bad),
            Err(Rejection::Identity { .. })
        ));
    }

    #[test]
    fn uncertified_source_is_rejected() {
        let src = DigitSource::thue_morse("1".parse::<GeneralWord>().unwrap(), "10".parse().unwrap()).unwrap();
        let lw = words(&src, 2, 40);
        let cand = PatternCandidate {
            period: 1,
            residue: 0,
            n0: 0,
            v0: w("1"),
            v1: w("1"),
            v2: Word::empty(2),
        };
        assert!(matches!(
            certify_pattern(&src.periodicity(10), &lw, &cand),
            Err(Rejection::Recurrence(_))
        ));
    }

    #[test]
    fn thue_morse_has_no_full_cover() {
        let src = DigitSource::thue_morse("10".parse().unwrap(), "02".parse().unwrap()).unwrap();
        let lw = words(&src, 2, 999);
        for p in 1..=8 {
            let found: Vec<bool> = (0..p).map(|r| find_pattern(&lw, p, r, 0).is_some()).collect();
            // [10]_2 = [02]_2, so words ending on a block boundary are all
            // (10)^k; the words ending mid-block carry the Thue-Morse bits
            for (r, &f) in found.iter().enumerate() {
                let mid_block = p % 2 == 1 || r % 2 == 0;
                assert_eq!(f, !mid_block, "p={p} r={r}");
            }
        }
    }
}
