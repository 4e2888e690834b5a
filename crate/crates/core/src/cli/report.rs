use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automata::{dfao_from_dfa, kernel_explore, KernelReport};
use crate::fk::{analyze_fk, decide_d_periodicity, FkError};
use crate::floorlog::{c_seq, check_jumps, jump_increments, JumpCheck, NormalizationRecord, NormalizedInstance};
use crate::langreg::{decide_regularity, verify_length_claim, words, DigitSource, LangError, RegularityVerdict};
use crate::numeration::characteristic_word;
use crate::rkseq::{check_lemmas, detect_period, r_direct_seq, LemmaReport, PeriodicityVerdict};

use super::scenario::{OutputFormat, Scenario, ScenarioPatch};
use super::{instance, CliError};

/// Bumped whenever a field of [`Report`] changes meaning or shape.
pub const SCHEMA_VERSION: u32 = 1;

const KERNEL_PREFIX: usize = 256;
const KERNEL_MAX_DEPTH: u32 = 8;
// r is dense, so a shorter prefix already separates its kernel elements
const R_KERNEL_PREFIX: usize = 64;
const R_KERNEL_TERMS: u64 = 4096;
const DFAO_CHECK_LIMIT: u64 = 10_000;
const HEAD: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: Scenario,
    pub normalization: NormalizationRecord,
    pub verdicts: Verdicts,
    pub evidence: Evidence,
    /// Wall-clock milliseconds per stage; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub r_periodicity: PeriodicityVerdict,
    /// Summary of the regularity verdict for `L_b(u)`.
    pub l_regularity: Value,
    pub u_regularity: URegularity,
    pub d_periodicity: PeriodicityVerdict,
}

/// The end of the chain: `u` is b-regular exactly when `α` is rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct URegularity {
    /// `b_regular`, `not_b_regular` or `undetermined`.
    pub kind: String,
    pub alpha_rational: bool,
    /// True when some link stopped at a search limit rather than a proof.
    pub resource_limited: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub jumps: JumpEvidence,
    pub rk: RkEvidence,
    pub length_claim: Value,
    pub dfao: Option<DfaoEvidence>,
    pub kernel: Vec<KernelEvidence>,
    pub fk: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpEvidence {
    /// `c_1, c_2, …` (first few) in normalized indices.
    pub c_head: Vec<String>,
    pub integrality_hits: Vec<u32>,
    pub witnesses_rationality: bool,
    pub check: JumpCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RkEvidence {
    pub r_head: Vec<i64>,
    /// Closed form and `c_{k+1} − b·c_k` compared on every computed `k`.
    pub compared: usize,
    pub lemmas: Option<LemmaReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaoEvidence {
    pub states: usize,
    /// Output compared with membership in `{c_k}` for `0 ≤ n ≤ checked_to`.
    pub checked_to: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEvidence {
    /// The sequence explored.
    pub source: String,
    pub report: KernelReport,
}

/// One entry of a batch run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchEntry {
    Completed(Box<Report>),
    Failed {
        name: Option<String>,
        error: String,
        exit_code: i32,
    },
}

impl Report {
    pub fn to_json(&self) -> String {
        let text = match self.scenario.format {
            OutputFormat::Pretty => serde_json::to_string_pretty(self),
            OutputFormat::Json => serde_json::to_string(self),
        };
        text.expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("report: {e}")))
    }

    /// The report with timings cleared, for determinism comparisons.
    pub fn without_timings(&self) -> Report {
        Report {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

struct Clock {
    timings: BTreeMap<String, u64>,
    mark: Instant,
}

impl Clock {
    fn new() -> Self {
        Clock {
            timings: BTreeMap::new(),
            mark: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let ms = self.mark.elapsed().as_millis();
        self.timings.insert(stage.into(), u64::try_from(ms).unwrap_or(u64::MAX));
        self.mark = Instant::now();
    }
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("evidence serializes")
}

fn lang_error(e: LangError) -> CliError {
    CliError::Internal(format!("language stage: {e}"))
}

/// Runs the whole chain on one scenario. Every link records its own verdict
/// so a disagreement localizes; disagreement between exact computations is
/// an internal-consistency error.
pub fn run_analyze(scenario: &Scenario) -> Result<Report, CliError> {
    let mut clock = Clock::new();
    let norm = instance(&scenario.alpha, &scenario.beta, scenario.base)?;
    let base = scenario.base;
    let kmax = scenario.kmax.max(2);
    clock.lap("normalize");

    let jd = c_seq(&norm, kmax);
    let limit = norm.start_index() + BigInt::from(scenario.nmax);
    let check = check_jumps(&norm, &jd, &limit);
    if !check.mismatches.is_empty() {
        return Err(CliError::Internal(format!(
            "increments and jump positions disagree at {:?}",
            check.mismatches
        )));
    }
    let jumps = JumpEvidence {
        c_head: jd.c.iter().take(HEAD).map(ToString::to_string).collect(),
        integrality_hits: jd.integrality_hits.clone(),
        witnesses_rationality: jd.witnesses_rationality(),
        check,
    };
    clock.lap("jumps");

    let r = r_direct_seq(&norm, kmax);
    let recur = jump_increments(&jd, base);
    if let Some(k) = recur.iter().zip(&r).position(|(a, b)| a != b) {
        return Err(CliError::Internal(format!("closed form and recurrence differ at r_{}", k + 1)));
    }
    let lemmas = if scenario.checks.lemmas {
        let (_, report) = check_lemmas(&norm, kmax).map_err(|e| CliError::Internal(e.to_string()))?;
        if !report.is_clean() {
            return Err(CliError::Internal(format!("lemma violations: {report:?}")));
        }
        Some(report)
    } else {
        None
    };
    let rk = RkEvidence {
        r_head: r.iter().take(HEAD).copied().collect(),
        compared: recur.len(),
        lemmas,
    };
    let r_periodicity = detect_period(&norm, scenario.window);
    clock.lap("rk");

    let src = DigitSource::FromRk(norm.clone());
    let verdict = decide_regularity(&src, base, scenario.window as usize).map_err(lang_error)?;
    let claim = verify_length_claim(&words(&src, base, kmax as usize));
    if !claim.holds() {
        return Err(CliError::Internal(format!("word lengths jump by more than one: {claim:?}")));
    }
    clock.lap("language");

    let dfao = match (&verdict, scenario.checks.dfao) {
        (RegularityVerdict::Regular { dfa, .. }, true) => Some(check_dfao(dfa, &jd.c, scenario.nmax)?),
        _ => None,
    };
    clock.lap("dfao");

    let kernel = if scenario.checks.kernel {
        [v_kernel(&norm, scenario.nmax)?, r_kernel(&norm)?]
            .into_iter()
            .flatten()
            .collect()
    } else {
        Vec::new()
    };
    clock.lap("kernel");

    let (d_periodicity, fk) = if scenario.checks.fk {
        match analyze_fk(&norm, i64::from(kmax), &BigInt::from(scenario.nmax), scenario.window) {
            Ok(a) => (a.verdict.clone(), Some(json(&a))),
            Err(FkError::Internal(msg)) => return Err(CliError::Internal(msg)),
            Err(e) => (
                decide_d_periodicity(&norm, scenario.window),
                Some(serde_json::json!({ "error": e.to_string() })),
            ),
        }
    } else {
        (decide_d_periodicity(&norm, scenario.window), None)
    };
    clock.lap("fk");

    let u_regularity = conclude(&norm, &r_periodicity, &verdict, &d_periodicity)?;
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.clone(),
        normalization: norm.record(),
        verdicts: Verdicts {
            r_periodicity,
            l_regularity: json(&verdict.summary(false)),
            u_regularity,
            d_periodicity,
        },
        evidence: Evidence {
            jumps,
            rk,
            length_claim: json(&claim),
            dfao,
            kernel,
            fk,
        },
        timings_ms: clock.timings,
    })
}

/// The automaton for `{(c_k)_b}` read as an indicator must match the jump
/// values themselves.
fn check_dfao(dfa: &crate::automata::Dfa, c: &[BigInt], nmax: u64) -> Result<DfaoEvidence, CliError> {
    let m = dfao_from_dfa(dfa);
    let checked_to = nmax.min(DFAO_CHECK_LIMIT);
    let members: Vec<u64> = c.iter().filter_map(ToPrimitive::to_u64).filter(|&v| v <= checked_to).collect();
    let expected = characteristic_word(&members, checked_to);
    if let Some(n) = (0..=checked_to).find(|&n| m.eval(&BigInt::from(n)) != expected[n as usize]) {
        return Err(CliError::Internal(format!("automaton output wrong at n = {n}")));
    }
    Ok(DfaoEvidence {
        states: m.state_count(),
        checked_to,
    })
}

/// Deepest exponent `d ≤ 8` with `b^d · prefix ≤ limit`.
fn kernel_depth(base: u32, prefix: usize, limit: u64) -> Option<u32> {
    (1..=KERNEL_MAX_DEPTH)
        .take_while(|&d| {
            u64::from(base)
                .checked_pow(d)
                .and_then(|p| p.checked_mul(prefix as u64))
                .is_some_and(|n| n <= limit)
        })
        .last()
}

fn explore(seq: &[i64], base: u32, depth: u32, prefix: usize, source: &str) -> Result<KernelEvidence, CliError> {
    let report =
        kernel_explore(seq, base, depth, prefix).map_err(|e| CliError::Internal(format!("kernel stage: {e}")))?;
    Ok(KernelEvidence {
        source: source.into(),
        report,
    })
}

/// `v_n = u_(n+1) − u_n` as a 0/1 sequence on `0 ≤ n < len` (original
/// indices), taken from the jump positions; indices below `n_min` read 0.
pub fn jump_indicator(norm: &NormalizedInstance, len: u64) -> Vec<i64> {
    let shift = norm.index_shift();
    // c_k > b^(k−1) − 2, so this many levels cover every jump below len
    let reach = BigInt::from(len) + shift.abs() + 2u32;
    let mut k = 1u32;
    while BigInt::from(norm.base()).pow(k - 1) <= reach {
        k += 1;
    }
    let jd = c_seq(norm, k);
    let n_min = norm.n_min().clone().max(BigInt::from(0));
    let mut set: Vec<u64> = (1..=jd.c.len())
        .map(|k| jd.jump_position(k) - shift)
        .filter(|n| n >= &n_min)
        .filter_map(|n| n.to_u64())
        .filter(|&n| n < len)
        .collect();
    set.sort_unstable();
    match len.checked_sub(1) {
        Some(last) => characteristic_word(&set, last).into_iter().map(i64::from).collect(),
        None => Vec::new(),
    }
}

/// Kernel of the jump indicator `v` as deep as `nmax` terms allow.
fn v_kernel(norm: &NormalizedInstance, nmax: u64) -> Result<Option<KernelEvidence>, CliError> {
    let Some(depth) = kernel_depth(norm.base(), KERNEL_PREFIX, nmax) else {
        return Ok(None);
    };
    let len = u64::from(norm.base()).pow(depth) * KERNEL_PREFIX as u64;
    let seq = jump_indicator(norm, len);
    let source = "v: n -> u_(n+1) - u_n for n >= max(n_min, 0)";
    explore(&seq, norm.base(), depth, KERNEL_PREFIX, source).map(Some)
}

/// Kernel of `n ↦ r_(n+1)`.
fn r_kernel(norm: &NormalizedInstance) -> Result<Option<KernelEvidence>, CliError> {
    let Some(depth) = kernel_depth(norm.base(), R_KERNEL_PREFIX, R_KERNEL_TERMS) else {
        return Ok(None);
    };
    let len = u64::from(norm.base()).pow(depth) * R_KERNEL_PREFIX as u64;
    let r = r_direct_seq(norm, len as u32);
    explore(&r, norm.base(), depth, R_KERNEL_PREFIX, "r: n -> r_(n+1)").map(Some)
}

fn conclude(
    norm: &NormalizedInstance,
    r: &PeriodicityVerdict,
    lang: &RegularityVerdict,
    d: &PeriodicityVerdict,
) -> Result<URegularity, CliError> {
    let rational = norm.alpha_is_rational();
    // Some(true) = periodic/regular, Some(false) = proved otherwise
    let links = [
        ("r", link(r)),
        ("L", if lang.is_regular() { Some(true) } else if lang.is_non_regular() { Some(false) } else { None }),
        ("d", link(d)),
    ];
    for (name, l) in links {
        if l.is_some_and(|l| l != rational) {
            return Err(CliError::Internal(format!(
                "link {name} contradicts the rationality of alpha = {}",
                norm.alpha()
            )));
        }
    }
    let settled = links.iter().all(|(_, l)| l.is_some());
    let alpha = norm.original().alpha();
    let (kind, certificate) = match (settled, rational) {
        (true, true) => ("b_regular", format!("alpha = {alpha} is rational")),
        (true, false) => ("not_b_regular", format!("alpha = {alpha} is a quadratic irrational")),
        (false, _) => ("undetermined", "a search limit was reached before every link was certified".into()),
    };
    Ok(URegularity {
        kind: kind.into(),
        alpha_rational: rational,
        resource_limited: !settled,
        certificate,
    })
}

fn link(v: &PeriodicityVerdict) -> Option<bool> {
    match v {
        PeriodicityVerdict::Periodic { .. } => Some(true),
        PeriodicityVerdict::AperiodicByTheorem { .. } => Some(false),
        PeriodicityVerdict::Inconclusive { .. } => None,
    }
}

/// Independent scenarios, run concurrently; `flags` override every entry.
pub fn run_batch(entries: &[ScenarioPatch], flags: &ScenarioPatch) -> Vec<BatchEntry> {
    entries
        .par_iter()
        .map(|patch| {
            let merged = patch.overlay(flags);
            match merged.resolve().and_then(|s| run_analyze(&s)) {
                Ok(report) => BatchEntry::Completed(Box::new(report)),
                Err(e) => BatchEntry::Failed {
                    name: merged.name.clone(),
                    error: e.to_string(),
                    exit_code: e.exit_code(),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(alpha: &str) -> Scenario {
        let mut s = Scenario::new(alpha, "0", 2).unwrap();
        s.kmax = 40;
        s.nmax = 70_000;
        s
    }

    #[test]
    fn headline_cases() {
        let r = run_analyze(&quick("sqrt(2)")).unwrap();
        assert_eq!(r.verdicts.u_regularity.kind, "not_b_regular");
        assert_eq!(r.verdicts.l_regularity["kind"], "non_regular");
        let r_kernel = &r.evidence.kernel[1].report;
        assert!(!r_kernel.closure);
        assert!(r_kernel.distinct.windows(2).all(|w| w[0] < w[1]));

        let r = run_analyze(&quick("3/2")).unwrap();
        assert_eq!(r.verdicts.u_regularity.kind, "b_regular");
        assert!(r.evidence.kernel.iter().all(|k| k.report.closure));
        assert_eq!(r.verdicts.l_regularity["dfa_live_states"], 3);
        assert_eq!(r.verdicts.l_regularity["dfa_states"], 4);

        let r = run_analyze(&quick("1")).unwrap();
        assert_eq!(r.verdicts.u_regularity.kind, "b_regular");
        assert!(r.evidence.rk.r_head.iter().all(|&v| v == 0));
    }

    #[test]
    fn round_trip_and_determinism() {
        let s = quick("5/3");
        let a = run_analyze(&s).unwrap();
        let text = a.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let b = run_analyze(&s).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
    }

    #[test]
    fn tiny_window_is_not_a_verdict() {
        // the order of 2 modulo this prime exceeds the minimum orbit budget
        let mut s = quick("1000000007/1000000000");
        s.window = 1;
        let r = run_analyze(&s).unwrap();
        assert_eq!(r.verdicts.u_regularity.kind, "undetermined");
        assert!(r.verdicts.u_regularity.resource_limited);
    }

    #[test]
    fn batch_reports_failures_per_entry() {
        let entries = vec![
            ScenarioPatch {
                alpha: Some("3/2".into()),
                ..ScenarioPatch::default()
            },
            ScenarioPatch {
                alpha: Some("oops".into()),
                ..ScenarioPatch::default()
            },
        ];
        let flags = ScenarioPatch {
            kmax: Some(30),
            nmax: Some(2_000),
            ..ScenarioPatch::default()
        };
        let out = run_batch(&entries, &flags);
        assert!(matches!(&out[0], BatchEntry::Completed(r) if r.scenario.kmax == 30));
        assert!(matches!(&out[1], BatchEntry::Failed { exit_code: 1, .. }));
    }
}
