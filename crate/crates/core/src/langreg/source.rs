use num_bigint::BigInt;
use serde::Serialize;

use crate::floorlog::NormalizedInstance;
use crate::numeration::GeneralWord;
use crate::rkseq::{detect_period, r_direct_seq, PeriodCertificate, PeriodicityVerdict};

use super::LangError;

/// A deterministic digit sequence `u_0, u_1, …` whose digits may exceed the
/// base they are later read in.
#[derive(Clone, Debug)]
pub enum DigitSource {
    /// `u_0 = c_1`, then `u_k = r_k`, so that `[u_0⋯u_k]_b = c_{k+1}`.
    FromRk(NormalizedInstance),
    /// `pre · period^ω`.
    Periodic { pre: GeneralWord, period: GeneralWord },
    /// A finite sequence.
    Explicit(GeneralWord),
    /// Thue–Morse `0110100110010110⋯` with `0 ↦ A`, `1 ↦ B`.
    ThueMorseBlocks { a: GeneralWord, b: GeneralWord },
    /// `prefix · inner`.
    Prefixed {
        prefix: Vec<u32>,
        inner: Box<DigitSource>,
    },
}

/// Why a source is not ultimately periodic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AperiodicityCertificate {
    /// `r` is not ultimately periodic because the slope is a quadratic
    /// irrational.
    IrrationalSlope { alpha: String, reason: String },
    /// Equal-length distinct blocks substituted into Thue–Morse: a period of
    /// `u` would be a multiple of the block length and so a period of the
    /// Thue–Morse word, which is not ultimately periodic.
    ThueMorse { block_a: String, block_b: String },
    /// A finite prefix does not change ultimate behaviour.
    Prefixed {
        prefix_len: usize,
        inner: Box<AperiodicityCertificate>,
    },
}

/// What is known about the eventual behaviour of a source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourcePeriodicity {
    /// `u_{i+period} = u_i` for all `i ≥ start`.
    Certified {
        start: usize,
        period: usize,
        certificate: PeriodCertificate,
    },
    Finite { len: usize },
    Aperiodic { certificate: AperiodicityCertificate },
    Unknown { reason: String },
}

fn thue_morse_bit(i: usize) -> bool {
    i.count_ones() % 2 == 1
}

impl DigitSource {
    pub fn periodic(pre: GeneralWord, period: GeneralWord) -> Result<Self, LangError> {
        if period.digits().is_empty() {
            return Err(LangError::Source("period word must be non-empty".into()));
        }
        Ok(DigitSource::Periodic { pre, period })
    }

    pub fn thue_morse(a: GeneralWord, b: GeneralWord) -> Result<Self, LangError> {
        if a.digits().is_empty() || b.digits().is_empty() {
            return Err(LangError::Source("Thue-Morse blocks must be non-empty".into()));
        }
        Ok(DigitSource::ThueMorseBlocks { a, b })
    }

    pub fn prefixed(prefix: Vec<u32>, inner: DigitSource) -> Self {
        DigitSource::Prefixed {
            prefix,
            inner: Box::new(inner),
        }
    }

    /// Number of terms, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match self {
            DigitSource::Explicit(w) => Some(w.digits().len()),
            DigitSource::Prefixed { prefix, inner } => inner.len().map(|n| n + prefix.len()),
            _ => None,
        }
    }

    /// The first `count` terms (fewer for a finite source).
    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        match self {
            DigitSource::FromRk(norm) => {
                if count == 0 {
                    return Vec::new();
                }
                let mut out = Vec::with_capacity(count);
                out.push(norm.threshold(1).floor());
                out.extend(
                    r_direct_seq(norm, (count - 1) as u32)
                        .into_iter()
                        .map(BigInt::from),
                );
                out
            }
            DigitSource::Periodic { pre, period } => pre
                .digits()
                .iter()
                .chain(period.digits().iter().cycle())
                .take(count)
                .map(|&d| BigInt::from(d))
                .collect(),
            DigitSource::Explicit(w) => w.digits().iter().take(count).map(|&d| BigInt::from(d)).collect(),
            DigitSource::ThueMorseBlocks { a, b } => (0..)
                .flat_map(|i| if thue_morse_bit(i) { b.digits() } else { a.digits() })
                .take(count)
                .map(|&d| BigInt::from(d))
                .collect(),
            DigitSource::Prefixed { prefix, inner } => {
                let mut out: Vec<BigInt> = prefix.iter().take(count).map(|&d| BigInt::from(d)).collect();
                out.extend(inner.terms(count.saturating_sub(prefix.len())));
                out
            }
        }
    }

    /// Certified eventual behaviour; `window` bounds the search for the
    /// modular cycle behind `r`.
    pub fn periodicity(&self, window: u64) -> SourcePeriodicity {
        match self {
            DigitSource::FromRk(norm) => match detect_period(norm, window) {
                PeriodicityVerdict::Periodic {
                    preperiod,
                    period,
                    certificate,
                } => SourcePeriodicity::Certified {
                    // term i of r is u_{i+1}
                    start: preperiod as usize + 1,
                    period: period as usize,
                    certificate,
                },
                PeriodicityVerdict::AperiodicByTheorem { reason } => SourcePeriodicity::Aperiodic {
                    certificate: AperiodicityCertificate::IrrationalSlope {
                        alpha: norm.alpha().to_string(),
                        reason,
                    },
                },
                PeriodicityVerdict::Inconclusive { window } => SourcePeriodicity::Unknown {
                    reason: format!("no modular cycle found within {window} steps"),
                },
            },
            DigitSource::Periodic { pre, period } => SourcePeriodicity::Certified {
                start: pre.digits().len(),
                period: period.digits().len(),
                certificate: PeriodCertificate::Declared,
            },
            DigitSource::Explicit(w) => SourcePeriodicity::Finite {
                len: w.digits().len(),
            },
            DigitSource::ThueMorseBlocks { a, b } => {
                if a.digits() == b.digits() {
                    SourcePeriodicity::Certified {
                        start: 0,
                        period: a.digits().len(),
                        certificate: PeriodCertificate::Derived {
                            from: "thue_morse_blocks".into(),
                            detail: "identical blocks repeat".into(),
                        },
                    }
                } else if a.digits().len() == b.digits().len() {
                    SourcePeriodicity::Aperiodic {
                        certificate: AperiodicityCertificate::ThueMorse {
                            block_a: a.to_string(),
                            block_b: b.to_string(),
                        },
                    }
                } else {
                    SourcePeriodicity::Unknown {
                        reason: "Thue-Morse blocks of unequal length carry no certificate".into(),
                    }
                }
            }
            DigitSource::Prefixed { prefix, inner } => match inner.periodicity(window) {
                SourcePeriodicity::Certified {
                    start,
                    period,
                    certificate,
                } => SourcePeriodicity::Certified {
                    start: start + prefix.len(),
                    period,
                    certificate: PeriodCertificate::Derived {
                        from: "prefixed".into(),
                        detail: format!("{certificate:?} shifted by {}", prefix.len()),
                    },
                },
                SourcePeriodicity::Finite { len } => SourcePeriodicity::Finite {
                    len: len + prefix.len(),
                },
                SourcePeriodicity::Aperiodic { certificate } => SourcePeriodicity::Aperiodic {
                    certificate: AperiodicityCertificate::Prefixed {
                        prefix_len: prefix.len(),
                        inner: Box::new(certificate),
                    },
                },
                unknown => unknown,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gw(text: &str) -> GeneralWord {
        text.parse().unwrap()
    }

    #[test]
    fn thue_morse_terms() {
        let src = DigitSource::thue_morse(gw("10"), gw("02")).unwrap();
        let digits: String = src.terms(16).iter().map(|d| d.to_string()).collect();
        assert_eq!(digits, "1002021002101002");
    }

    #[test]
    fn periodic_terms_and_certificate() {
        let src = DigitSource::periodic(gw("3"), gw("12")).unwrap();
        let t: Vec<String> = src.terms(6).iter().map(|d| d.to_string()).collect();
        assert_eq!(t, ["3", "1", "2", "1", "2", "1"]);
        assert!(matches!(
            src.periodicity(10),
            SourcePeriodicity::Certified { start: 1, period: 2, .. }
        ));
    }

    #[test]
    fn prefixed_shifts_start() {
        let src = DigitSource::prefixed(vec![4, 4], DigitSource::periodic(gw("3"), gw("12")).unwrap());
        assert!(matches!(
            src.periodicity(10),
            SourcePeriodicity::Certified { start: 3, period: 2, .. }
        ));
        assert_eq!(src.terms(3)[2], BigInt::from(3));
    }

    #[test]
    fn thue_morse_certificates() {
        let equal = DigitSource::thue_morse(gw("10"), gw("02")).unwrap();
        assert!(matches!(equal.periodicity(10), SourcePeriodicity::Aperiodic { .. }));
        let same = DigitSource::thue_morse(gw("1"), gw("1")).unwrap();
        assert!(matches!(same.periodicity(10), SourcePeriodicity::Certified { period: 1, .. }));
        let uneven = DigitSource::thue_morse(gw("1"), gw("10")).unwrap();
        assert!(matches!(uneven.periodicity(10), SourcePeriodicity::Unknown { .. }));
    }
}
