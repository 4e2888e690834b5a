mod common;

use bregular::cli::{run_analyze, run_batch, BatchEntry, ScenarioPatch};

fn patch(case: &common::Case) -> ScenarioPatch {
    ScenarioPatch {
        alpha: Some(case.alpha.into()),
        beta: Some(case.beta.into()),
        base: Some(case.base),
        kmax: Some(60),
        nmax: Some(5_000),
        ..ScenarioPatch::default()
    }
}

/// Every link of the chain agrees with "regular iff alpha is rational".
#[test]
fn battery_links_agree() {
    for case in common::battery() {
        let report = run_analyze(&patch(&case).resolve().unwrap()).unwrap();
        let v = &report.verdicts;
        let rational = case.rational();
        let what = format!("{} {} {}", case.alpha, case.beta, case.base);
        assert_eq!(v.u_regularity.alpha_rational, rational, "{what}");
        assert_eq!(v.u_regularity.kind, if rational { "b_regular" } else { "not_b_regular" }, "{what}");
        assert_eq!(v.l_regularity["kind"], if rational { "regular" } else { "non_regular" }, "{what}");
        assert_eq!(v.r_periodicity.is_certified_periodic(), rational, "{what}");
        assert_eq!(v.d_periodicity.is_certified_periodic(), rational, "{what}");
        assert!(report.evidence.jumps.check.mismatches.is_empty(), "{what}");
        let back = bregular::cli::Report::from_json(&report.to_json()).unwrap();
        assert_eq!(back.to_json(), report.to_json(), "{what}");
    }
}

#[test]
fn batch_matches_single_runs() {
    let cases = common::battery();
    let entries: Vec<ScenarioPatch> = cases.iter().take(4).map(patch).collect();
    let reports = run_batch(&entries, &ScenarioPatch::default());
    assert_eq!(reports.len(), 4);
    for (entry, out) in entries.iter().zip(reports) {
        let BatchEntry::Completed(batch) = out else {
            panic!("batch entry failed");
        };
        let single = run_analyze(&entry.resolve().unwrap()).unwrap();
        assert_eq!(batch.without_timings(), single.without_timings());
    }
}
