//! Level counts `f_k = #{n : u_n = k}`, the derived sequence
//! `d_k = f_{k+1} − b·f_k`, and their alignment with the jump positions and
//! the digit-like sequence `r`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::ExactReal;
use crate::floorlog::{c_seq, u_seq, JumpData, NormalizedInstance};
use crate::rkseq::{detect_period, minimize_period, r_direct_seq, PeriodCertificate, PeriodicityVerdict};
use crate::serde_big;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FkError {
    #[error("k_max must be at least 1")]
    EmptyRange,
    #[error("no offset m0 aligns f with c on the computed range")]
    NoAlignment,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// `f_k` for `k_min ≤ k ≤ k_max` (levels of the original sequence), with
/// the derived `d_k` and alignment data once computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCounts {
    pub base: u32,
    /// Level of `u_{n_min}`; may be negative.
    pub k_min: i64,
    /// `f[i] = f_{k_min + i}`.
    #[serde(serialize_with = "serde_big::vec")]
    pub f: Vec<BigInt>,
}

impl LevelCounts {
    pub fn k_max(&self) -> i64 {
        self.k_min + self.f.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> Option<&BigInt> {
        usize::try_from(k - self.k_min).ok().and_then(|i| self.f.get(i))
    }
}

/// `b^j` for any integer `j`, exactly.
fn power(base: u32, j: i64) -> ExactReal {
    let b = BigInt::from(base);
    if j >= 0 {
        ExactReal::integer(b.pow(j as u32))
    } else {
        ExactReal::ratio(BigInt::from(1), b.pow((-j) as u32)).expect("nonzero denominator")
    }
}

/// `⌈(b^j − β′)/α′⌉`: the first normalized index at level `≥ j`.
fn level_entry(norm: &NormalizedInstance, j: i64) -> BigInt {
    power(norm.base(), j)
        .checked_sub(norm.beta())
        .and_then(|x| x.checked_div(norm.alpha()))
        .expect("compatible fields")
        .ceil()
}

/// Exact counts for every level from that of `u_{n_min}` up to `k_max`.
///
/// Level `j` of the normalized sequence occupies the indices
/// `⌈x_j⌉ ≤ m < ⌈x_{j+1}⌉`, clipped below at the start index.
pub fn f_counts(norm: &NormalizedInstance, k_max: i64) -> LevelCounts {
    let off = norm.value_offset();
    let start = norm.start_index();
    let j0 = norm.normalized_level(&start);
    let k_min = j0 + off;
    let mut f = Vec::new();
    let mut lo = start.clone();
    for j in j0..=(k_max - off).max(j0) {
        let hi = level_entry(norm, j + 1);
        f.push(if hi > lo { &hi - &lo } else { BigInt::zero() });
        lo = lo.max(hi);
    }
    LevelCounts {
        base: norm.base(),
        k_min,
        f,
    }
}

/// Counts by evaluating `u_n` for `n_min ≤ n ≤ n_max`; only levels that
/// end inside the range are returned.
pub fn f_counts_enumerated(norm: &NormalizedInstance, n_max: &BigInt) -> BTreeMap<i64, BigInt> {
    let values = u_seq(norm, norm.n_min(), n_max).expect("range starts at n_min");
    let mut counts: BTreeMap<i64, BigInt> = BTreeMap::new();
    for &k in &values {
        *counts.entry(k).or_default() += 1u32;
    }
    // the top level may continue past n_max
    if let Some(&last) = values.last() {
        counts.remove(&last);
    }
    counts
}

/// Exact-equality comparison of formula counts against enumeration.
pub fn enumeration_mismatches(lc: &LevelCounts, enumerated: &BTreeMap<i64, BigInt>) -> Vec<i64> {
    let mut bad: Vec<i64> = enumerated
        .iter()
        .filter(|(k, v)| lc.get(**k).is_some_and(|f| f != *v))
        .map(|(k, _)| *k)
        .collect();
    // a level the formula counts but enumeration skipped entirely
    if let (Some(&lo), Some(&hi)) = (enumerated.keys().next(), enumerated.keys().next_back()) {
        for k in lo..=hi {
            if !enumerated.contains_key(&k) && lc.get(k).is_some_and(|f| !f.is_zero()) {
                bad.push(k);
            }
        }
    }
    bad.sort_unstable();
    bad
}

/// `Σ_{k ≤ K} f_k` must equal the number of indices `n_min ≤ n` below the
/// entry of level `K+1`. Returns the failing `K`s.
pub fn conservation_failures(norm: &NormalizedInstance, lc: &LevelCounts) -> Vec<i64> {
    let start = norm.start_index();
    let mut total = BigInt::zero();
    let mut bad = Vec::new();
    for (i, f) in lc.f.iter().enumerate() {
        total += f;
        let k = lc.k_min + i as i64;
        let entry = level_entry(norm, k - norm.value_offset() + 1);
        let expected = if entry > start { entry - &start } else { BigInt::zero() };
        if total != expected {
            bad.push(k);
        }
    }
    bad
}

/// Offset with `f_k = c_{k+m0+1} − c_{k+m0}` on a tail of the computed range.
///
/// `c` here is the jump position `⌈x_k⌉ − 1`, which is `⌊x_k⌋` except where
/// `x_k` is an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub m0: i64,
    /// Least `k` from which the identity holds through the end of the range.
    pub aligned_from: i64,
    /// Every other offset that also validates on the second half of the range.
    pub other_offsets: Vec<i64>,
}

fn jump_at(jd: &JumpData, k: i64) -> Option<BigInt> {
    usize::try_from(k)
        .ok()
        .filter(|&k| k >= 1 && k <= jd.c.len())
        .map(|k| jd.jump_position(k))
}

/// 1 when `x_k` is an integer.
fn hit(jd: &JumpData, k: i64) -> i64 {
    u32::try_from(k).map_or(0, |k| i64::from(jd.integrality_hits.binary_search(&k).is_ok()))
}

/// `r_k` shifted onto jump positions: `r_k − h_{k+1} + b·h_k`.
fn r_corrected(r: &[i64], jd: &JumpData, base: u32, k: i64) -> Option<i64> {
    r_at(r, k).map(|rk| rk - hit(jd, k + 1) + i64::from(base) * hit(jd, k))
}

fn holds_at(lc: &LevelCounts, jd: &JumpData, m0: i64, k: i64) -> bool {
    match (lc.get(k), jump_at(jd, k + m0 + 1), jump_at(jd, k + m0)) {
        (Some(f), Some(hi), Some(lo)) => f == &(hi - lo),
        _ => false,
    }
}

/// Least offset `m0` (searched near `−value_offset`) for which the identity
/// holds on the second half of the computed levels.
pub fn align_m0(lc: &LevelCounts, jd: &JumpData, value_offset: i64) -> Result<Alignment, FkError> {
    let k_hi = lc.k_max();
    let k_tail = lc.k_min.max(0) + (k_hi - lc.k_min.max(0)) / 2;
    let valid: Vec<i64> = (-value_offset - 3..=-value_offset + 3)
        .filter(|&m0| (k_tail..=k_hi).all(|k| holds_at(lc, jd, m0, k)))
        .collect();
    let (&m0, rest) = valid.split_first().ok_or(FkError::NoAlignment)?;
    let mut aligned_from = k_hi;
    while aligned_from > lc.k_min && holds_at(lc, jd, m0, aligned_from - 1) {
        aligned_from -= 1;
    }
    Ok(Alignment {
        m0,
        aligned_from,
        other_offsets: rest.to_vec(),
    })
}

/// `d_k = f_{k+1} − b·f_k` for `k_min ≤ k < k_max` (index `k − k_min`).
pub fn d_seq(lc: &LevelCounts) -> Vec<BigInt> {
    lc.f
        .windows(2)
        .map(|w| &w[1] - &w[0] * lc.base)
        .collect()
}

/// `r_k` looked up with 1-based `k`.
fn r_at(r: &[i64], k: i64) -> Option<i64> {
    usize::try_from(k).ok().filter(|&k| k >= 1).and_then(|k| r.get(k - 1).copied())
}

/// Levels `k ≥ from` where `d_k ≠ r_{k+m0+1} − r_{k+m0}`, with `r`
/// corrected at integral thresholds.
pub fn d_identity_failures(
    lc: &LevelCounts,
    d: &[BigInt],
    r: &[i64],
    jd: &JumpData,
    m0: i64,
    from: i64,
) -> Vec<i64> {
    let rc = |k| r_corrected(r, jd, lc.base, k);
    (0..d.len())
        .map(|i| lc.k_min + i as i64)
        .filter(|&k| k >= from)
        .filter(|&k| match (rc(k + m0 + 1), rc(k + m0)) {
            (Some(hi), Some(lo)) => d[(k - lc.k_min) as usize] != BigInt::from(hi - lo),
            _ => false,
        })
        .collect()
}

/// Levels `k ≥ from` where `r_{k+m0+1} ≠ r_{from+m0} + Σ_{from ≤ i ≤ k} d_i`.
pub fn partial_sum_failures(
    lc: &LevelCounts,
    d: &[BigInt],
    r: &[i64],
    jd: &JumpData,
    m0: i64,
    from: i64,
) -> Vec<i64> {
    let rc = |k| r_corrected(r, jd, lc.base, k);
    let Some(base_r) = rc(from + m0) else {
        return Vec::new();
    };
    let mut sum = BigInt::from(base_r);
    let mut bad = Vec::new();
    for (i, di) in d.iter().enumerate() {
        let k = lc.k_min + i as i64;
        if k < from {
            continue;
        }
        sum += di;
        match rc(k + m0 + 1) {
            Some(rk) if sum != BigInt::from(rk) => bad.push(k),
            Some(_) => {}
            None => break,
        }
    }
    bad
}

/// Everything the module computes for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct FkAnalysis {
    pub counts: LevelCounts,
    pub alignment: Alignment,
    #[serde(serialize_with = "serde_big::vec")]
    pub d: Vec<BigInt>,
    pub verdict: PeriodicityVerdict,
    /// Levels compared against direct enumeration of `u_n`.
    pub enumerated_levels: usize,
}

/// Counts through `k_max`, alignment, `d`, and every cross-check; a failed
/// cross-check is an internal-consistency error.
pub fn analyze_fk(norm: &NormalizedInstance, k_max: i64, n_max: &BigInt, window: u64) -> Result<FkAnalysis, FkError> {
    if k_max < 1 {
        return Err(FkError::EmptyRange);
    }
    let lc = f_counts(norm, k_max);
    let enumerated = f_counts_enumerated(norm, &n_max.max(norm.n_min()).clone());
    let bad = enumeration_mismatches(&lc, &enumerated);
    if !bad.is_empty() {
        return Err(FkError::Internal(format!("formula and enumeration differ at levels {bad:?}")));
    }
    let bad = conservation_failures(norm, &lc);
    if !bad.is_empty() {
        return Err(FkError::Internal(format!("conservation fails at levels {bad:?}")));
    }
    let off = norm.value_offset();
    let c_depth = u32::try_from(k_max - off + 5).unwrap_or(1).max(1);
    let jd = c_seq(norm, c_depth);
    let alignment = align_m0(&lc, &jd, off)?;
    let d = d_seq(&lc);
    let r = r_direct_seq(norm, c_depth);
    let bad = d_identity_failures(&lc, &d, &r, &jd, alignment.m0, alignment.aligned_from);
    if !bad.is_empty() {
        return Err(FkError::Internal(format!("d differs from r-differences at {bad:?}")));
    }
    let bad = partial_sum_failures(&lc, &d, &r, &jd, alignment.m0, alignment.aligned_from);
    if !bad.is_empty() {
        return Err(FkError::Internal(format!("partial sums of d miss r at {bad:?}")));
    }
    let verdict = decide_d_periodicity(norm, window);
    Ok(FkAnalysis {
        enumerated_levels: enumerated.len(),
        counts: lc,
        alignment,
        d,
        verdict,
    })
}

/// Periodicity of `d` (term `i` is `d_{k_min+i}`), inherited from `r`
/// through `d_k = r_{k+m0+1} − r_{k+m0}`.
pub fn decide_d_periodicity(norm: &NormalizedInstance, window: u64) -> PeriodicityVerdict {
    // r_k and the integrality of x_k both depend on k only through b^k mod p,
    // so the raw orbit of that residue bounds where d repeats
    let (orbit_start, orbit_len) = match detect_period(norm, window) {
        PeriodicityVerdict::Periodic {
            certificate:
                PeriodCertificate::ModularCycle {
                    cycle_start,
                    cycle_length,
                    ..
                },
            ..
        } => (cycle_start as i64, cycle_length as i64),
        PeriodicityVerdict::Periodic { preperiod, period, .. } => (preperiod as i64 + 1, period as i64),
        PeriodicityVerdict::AperiodicByTheorem { reason } => {
            return PeriodicityVerdict::AperiodicByTheorem {
                reason: format!(
                    "{reason}; partial sums of d recover r up to a constant, so d is not ultimately periodic either"
                ),
            }
        }
        inconclusive => return inconclusive,
    };
    let off = norm.value_offset();
    let probe_top = off + 2 * orbit_start + 4 * orbit_len + 16;
    let lc = f_counts(norm, probe_top);
    let c_depth = u32::try_from(probe_top - off + 5).unwrap_or(1).max(1);
    let jd = c_seq(norm, c_depth);
    let Ok(al) = align_m0(&lc, &jd, off) else {
        return PeriodicityVerdict::Inconclusive {
            window: probe_top as u64,
        };
    };
    let first_k = al.aligned_from.max(orbit_start - al.m0);
    let known_pre = (first_k - lc.k_min).max(0) as usize;
    let d = d_seq(&lc);
    let span = known_pre + 2 * orbit_len as usize;
    let small: Option<Vec<i64>> = d.get(..span).and_then(|d| d.iter().map(ToPrimitive::to_i64).collect());
    let Some(small) = small else {
        return PeriodicityVerdict::Inconclusive {
            window: d.len() as u64,
        };
    };
    let (preperiod, period) = minimize_period(&small, known_pre, orbit_len as usize);
    PeriodicityVerdict::Periodic {
        preperiod,
        period,
        certificate: PeriodCertificate::Derived {
            from: "r".into(),
            detail: format!(
                "d_k = r_(k+{m0}+1) - r_(k+{m0}) for k >= {first_k}, both sides repeat with b^k mod p from k = {orbit_start} with cycle {orbit_len}",
                m0 = al.m0
            ),
        },
    }
}
