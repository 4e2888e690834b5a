use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AutomataError;

/// Outcome of a truncated kernel exploration.
///
/// Two kernel elements `n ↦ u(b^i·n + j)` count as equal when their first
/// `prefix_len` terms agree, so `closure` is evidence of a finite kernel,
/// not a proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub base: u32,
    pub depth: u32,
    pub prefix_len: usize,
    /// `distinct[i]`: distinct fingerprints among elements with exponent `≤ i`.
    pub distinct: Vec<usize>,
    /// Every child of every newly found element is already represented.
    pub closure: bool,
    /// First exponent at which no new element appeared.
    pub closed_at: Option<u32>,
}

/// Breadth-first exploration of the base-b kernel of `seq` (term `n` at
/// index `n`) through exponent `depth`. Only elements with a new fingerprint
/// are expanded further.
pub fn kernel_explore(
    seq: &[i64],
    base: u32,
    depth: u32,
    prefix_len: usize,
) -> Result<KernelReport, AutomataError> {
    let b = base as u64;
    let span = b
        .checked_pow(depth)
        .and_then(|p| p.checked_mul(prefix_len as u64))
        .unwrap_or(u64::MAX);
    if (seq.len() as u64) < span {
        return Err(AutomataError::SourceTooShort {
            needed: span,
            available: seq.len() as u64,
        });
    }
    let fingerprint = |stride: u64, offset: u64| -> Vec<i64> {
        (0..prefix_len as u64)
            .map(|n| seq[(stride * n + offset) as usize])
            .collect()
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(fingerprint(1, 0));
    // offsets j of the newly found elements at the current exponent
    let mut fresh: Vec<u64> = vec![0];
    let mut distinct = vec![1];
    let mut closed_at = None;
    for i in 1..=depth {
        let stride = b.pow(i);
        let parent_stride = b.pow(i - 1);
        let children: Vec<u64> = fresh
            .iter()
            .flat_map(|&j| (0..b).map(move |c| j + c * parent_stride))
            .collect();
        let prints: Vec<(u64, Vec<i64>)> = children
            .par_iter()
            .map(|&j| (j, fingerprint(stride, j)))
            .collect();
        fresh.clear();
        // insertion order does not change the set, only which offset names it
        for (j, fp) in prints {
            if seen.insert(fp) {
                fresh.push(j);
            }
        }
        distinct.push(seen.len());
        if fresh.is_empty() {
            closed_at = Some(i);
            break;
        }
    }
    // once closed the count is final at every later exponent
    distinct.resize(depth as usize + 1, seen.len());
    Ok(KernelReport {
        base,
        depth,
        prefix_len,
        distinct,
        closure: closed_at.is_some(),
        closed_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers_of_two_indicator(len: usize) -> Vec<i64> {
        (0..len).map(|n| i64::from((n as u64).is_power_of_two())).collect()
    }

    #[test]
    fn constant_sequence() {
        let r = kernel_explore(&vec![0; 64], 2, 3, 8).unwrap();
        assert_eq!(r.distinct, vec![1, 1, 1, 1]);
        assert!(r.closure);
    }

    #[test]
    fn powers_of_two_close() {
        let seq = powers_of_two_indicator(1 << 16);
        let r = kernel_explore(&seq, 2, 8, 256).unwrap();
        assert!(r.closure);
        assert!(*r.distinct.last().unwrap() <= 5);
        assert!(r.distinct.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn short_source_rejected() {
        assert!(matches!(
            kernel_explore(&[0; 10], 2, 3, 4),
            Err(AutomataError::SourceTooShort { needed: 32, .. })
        ));
    }
}
