//! Eventual periodicity of `r_k`: certified through the cycle of `b^k mod p`
//! for rational `α′ = p/q`, structurally refuted for quadratic irrationals.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::r_direct_seq;
use crate::floorlog::NormalizedInstance;

/// Why a periodicity claim holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodCertificate {
    /// `r_k` is a function of `b^k mod modulus`, whose orbit repeats from
    /// `cycle_start` with length `cycle_length`; values were replayed
    /// through `replayed_through` and closed up.
    ModularCycle {
        modulus: String,
        cycle_start: u64,
        cycle_length: u64,
        replayed_through: u64,
    },
    /// The sequence was handed over as preperiod + period words.
    Declared,
    /// Periodicity inherited from another certified sequence.
    Derived { from: String, detail: String },
    /// Repetition observed in a finite window only; not a proof.
    Empirical { window: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodicityVerdict {
    /// `x_i = x_{i+period}` for all `i ≥ preperiod` (0-based term index).
    Periodic {
        preperiod: u64,
        period: u64,
        certificate: PeriodCertificate,
    },
    AperiodicByTheorem { reason: String },
    Inconclusive { window: u64 },
}

impl PeriodicityVerdict {
    pub fn is_certified_periodic(&self) -> bool {
        matches!(
            self,
            PeriodicityVerdict::Periodic { certificate, .. }
                if !matches!(certificate, PeriodCertificate::Empirical { .. })
        )
    }

    pub fn is_aperiodic(&self) -> bool {
        matches!(self, PeriodicityVerdict::AperiodicByTheorem { .. })
    }

    pub fn preperiod_and_period(&self) -> Option<(u64, u64)> {
        match self {
            PeriodicityVerdict::Periodic {
                preperiod, period, ..
            } => Some((*preperiod, *period)),
            _ => None,
        }
    }
}

/// Orbit of `k ↦ b^k mod p` for `k ≥ 1`: the first repeated residue
/// appears at `start` (1-based) and recurs after `length` steps.
///
/// Brent's cycle search, so memory stays constant; `None` once more than
/// `cap` steps would be needed.
pub fn power_cycle(base: u32, modulus: &BigInt, cap: u64) -> Option<(u64, u64)> {
    let b = BigInt::from(base);
    let step = |x: &BigInt| (x * &b) % modulus;
    let first = &b % modulus;
    let mut steps = 0u64;
    // cycle length
    let mut power = 1u64;
    let mut length = 1u64;
    let mut tortoise = first.clone();
    let mut hare = step(&first);
    while tortoise != hare {
        if power == length {
            tortoise = hare.clone();
            power *= 2;
            length = 0;
        }
        hare = step(&hare);
        length += 1;
        steps += 1;
        if steps > cap {
            return None;
        }
    }
    // first index of the cycle
    let mut tortoise = first.clone();
    let mut hare = first;
    for _ in 0..length {
        hare = step(&hare);
    }
    let mut start = 1u64;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        start += 1;
        if start > cap {
            return None;
        }
    }
    Some((start, length))
}

/// Minimal `(preperiod, period)` of `values`, given that `values[i + period]
/// = values[i]` is known to hold for all `i ≥ known_pre` with period
/// `known_period`, and `values` covers `known_pre + 2·known_period` terms.
pub fn minimize_period(values: &[i64], known_pre: usize, known_period: usize) -> (u64, u64) {
    let cyclic = |p: usize| (known_pre..known_pre + known_period).all(|i| values[i] == values[i + p]);
    let period = (1..=known_period)
        .filter(|p| known_period.is_multiple_of(*p))
        .find(|&p| cyclic(p))
        .unwrap_or(known_period);
    let mut pre = known_pre;
    while pre > 0 && values[pre - 1] == values[pre - 1 + period] {
        pre -= 1;
    }
    (pre as u64, period as u64)
}

/// Smallest `(preperiod, period)` consistent with the whole window and
/// observed for at least two full periods. Evidence only.
pub fn find_eventual_period(values: &[i64]) -> Option<(u64, u64)> {
    let n = values.len();
    let mut best: Option<(usize, usize)> = None;
    for period in 1..=n / 2 {
        // longest suffix on which the period holds
        let mut pre = n - period;
        while pre > 0 && values[pre - 1] == values[pre - 1 + period] {
            pre -= 1;
        }
        if n - pre >= 2 * period && best.is_none_or(|(bp, bq)| pre + period < bp + bq) {
            best = Some((pre, period));
        }
    }
    best.map(|(p, q)| (p as u64, q as u64))
}

/// Periodicity of `r_1, r_2, …` (term `i` is `r_{i+1}`).
///
/// `window` caps the orbit search of `b^k mod p`; the search always runs
/// at least a million steps.
pub fn detect_period(norm: &NormalizedInstance, window: u64) -> PeriodicityVerdict {
    let alpha = match norm.alpha().as_rational() {
        Some(a) => a.clone(),
        None => {
            return PeriodicityVerdict::AperiodicByTheorem {
                reason: format!(
                    "alpha' = {} is a quadratic irrational; r_k is ultimately periodic only for rational alpha",
                    norm.alpha()
                ),
            }
        }
    };
    // 1/α′ = q/p: r_k depends on k only through b^k mod p
    let modulus = alpha.numer().clone();
    let cap = window.max(1_000_000);
    let (start, length) = if modulus.is_one() {
        (1, 1)
    } else {
        match power_cycle(norm.base(), &modulus, cap) {
            Some(c) => c,
            None => return PeriodicityVerdict::Inconclusive { window: cap },
        }
    };
    debug_assert!(!modulus.is_zero());
    let known_pre = (start - 1) as usize;
    let span = known_pre + 2 * length as usize;
    let r = r_direct_seq(norm, span as u32);
    // replay: the orbit closes, so the values must too
    let closes = (known_pre..known_pre + length as usize).all(|i| r[i] == r[i + length as usize]);
    if !closes {
        return PeriodicityVerdict::Inconclusive {
            window: span as u64,
        };
    }
    let (preperiod, period) = minimize_period(&r, known_pre, length as usize);
    PeriodicityVerdict::Periodic {
        preperiod,
        period,
        certificate: PeriodCertificate::ModularCycle {
            modulus: modulus.to_string(),
            cycle_start: start,
            cycle_length: length,
            replayed_through: span as u64,
        },
    }
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
    fn three_halves_has_period_two() {
        match detect_period(&norm("3/2", "0", 2), 100) {
            PeriodicityVerdict::Periodic {
                preperiod,
                period,
                certificate: PeriodCertificate::ModularCycle { modulus, .. },
            } => {
                assert!(preperiod <= 1);
                assert_eq!(period, 2);
                assert_eq!(modulus, "3");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sqrt2_is_aperiodic() {
        assert!(detect_period(&norm("sqrt(2)", "0", 2), 100).is_aperiodic());
    }

    #[test]
    fn alpha_one_is_constant() {
        let v = detect_period(&norm("1", "0", 2), 100);
        assert_eq!(v.preperiod_and_period(), Some((0, 1)));
    }

    #[test]
    fn power_cycle_matches_first_repeat() {
        for base in 2..=10u32 {
            for p in 1..=200u32 {
                let mut seen = std::collections::HashMap::new();
                let mut x = base % p;
                let mut k = 1u64;
                let expected = loop {
                    if let Some(&first) = seen.get(&x) {
                        break (first, k - first);
                    }
                    seen.insert(x, k);
                    x = x * base % p;
                    k += 1;
                };
                assert_eq!(power_cycle(base, &BigInt::from(p), 1000), Some(expected), "b={base} p={p}");
            }
        }
        assert_eq!(power_cycle(2, &BigInt::from(1_000_000_007u64), 1000), None);
    }

    #[test]
    fn power_cycle_with_shared_factor() {
        // 10^k mod 22: 10, 12, 10, 12, …
        assert_eq!(power_cycle(10, &BigInt::from(22), 100), Some((1, 2)));
        // 2^k mod 12: 2, 4, 8, 4, 8, …
        assert_eq!(power_cycle(2, &BigInt::from(12), 100), Some((2, 2)));
    }

    #[test]
    fn empirical_period_search() {
        assert_eq!(find_eventual_period(&[5, 1, 2, 1, 2, 1, 2]), Some((1, 2)));
        assert_eq!(find_eventual_period(&[0, 0, 0, 0]), Some((0, 1)));
        assert_eq!(find_eventual_period(&[1, 2, 3]), None);
    }

    #[test]
    fn minimize_period_shrinks_both() {
        let v = [9, 4, 4, 4, 4, 4, 4, 4, 4];
        assert_eq!(minimize_period(&v, 3, 2), (1, 1));
    }
}
