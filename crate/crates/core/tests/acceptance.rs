//! End-to-end acceptance run. Prints one line per criterion and fails if any
//! criterion fails. The closed-form references below are written out
//! independently of the library's own evaluators.

use std::path::Path;

use rayon::prelude::*;
use semantic_rd::channels::{self, CorrelatedBinaryChannel};
use semantic_rd::figures::{run_figure, Field, FigureId, FigureOptions, FigureOutput, Table};
use semantic_rd::gaussian::{self, GaussianSpec};
use semantic_rd::models;
use semantic_rd::prob::BinarySourceSpec;
use semantic_rd::solver::{semantic_rd, solve_rd_point, RdQuery, SolverOptions};
use semantic_rd::verify::{self, run_suite, Suite};

fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

const P: f64 = 0.25;

fn ds_to_obs(ds: f64, p: f64) -> f64 {
    (ds - p) / (1.0 - 2.0 * p)
}

fn oracle_independent(d1: f64, d2: f64, ds: f64) -> f64 {
    let m = d1.min(ds_to_obs(ds, P));
    let part = |d: f64| if d <= P { h(P) - h(d) } else { 0.0 };
    part(d2) + part(m)
}

fn oracle_correlated(d1: f64, d2: f64, ds: f64) -> f64 {
    2.0 * h(P) - h(d1.min(ds_to_obs(ds, P))) - h(d2)
}

fn oracle_classification(d1: f64, d2: f64, ds: f64) -> f64 {
    h(P) + 2.0 - h(d1.min(ds_to_obs(ds, P))) - d1 * 7f64.log2() + 1.0 - h(d2)
}

fn oracle_semantic(p: f64, ds: f64) -> f64 {
    1.0 - h(ds_to_obs(ds, p))
}

struct Outcome {
    passed: bool,
    line: String,
}

fn outcome(id: usize, passed: bool, line: String) -> Outcome {
    let status = if passed { "PASS" } else { "FAIL" };
    Outcome { passed, line: format!("criterion {id:>2}: {status} {line}") }
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

fn criterion1() -> Outcome {
    let spec = GaussianSpec::symmetric(2.0, 1.0).unwrap();
    let r = gaussian::r_x2_given_y(&spec, 1.0).unwrap();
    let exact = 0.5 * 1.5f64.ln();
    let ok = (r - 0.20).abs() < 0.005 && (r - exact).abs() < 1e-12;
    outcome(1, ok, format!("Gaussian R_X2|Y(1) = {r:.6} nats, reported 0.20, |diff| {:.4} < 0.005", (r - 0.20).abs()))
}

fn criterion2(opts: &SolverOptions) -> Outcome {
    let spec = BinarySourceSpec::conditionally_independent(P, P, P).unwrap();
    let prob = models::binary_independent_problem(&spec).unwrap();
    let pts = verify::theorem2_grid();
    let gap = max_abs(pts.par_iter().map(|q| solve_rd_point(&prob, q, opts).unwrap().rate - oracle_independent(q.d1, q.d2, q.ds)).collect::<Vec<_>>().into_iter());
    outcome(2, gap < 2e-3, format!("conditionally independent, {} points, max |BA - formula| = {gap:.2e} bits < 2e-3", pts.len()))
}

fn criterion3(opts: &SolverOptions) -> Outcome {
    let spec = BinarySourceSpec::correlated(P, P, P).unwrap();
    let prob = models::binary_correlated_problem(&spec).unwrap();
    let gaps = |pts: &[RdQuery]| -> Vec<f64> {
        pts.par_iter().map(|q| solve_rd_point(&prob, q, opts).unwrap().rate - oracle_correlated(q.d1, q.d2, q.ds)).collect()
    };
    let tight = verify::d0_points(20, 3, true).unwrap();
    let off = verify::d0_points(20, 4, false).unwrap();
    let g_tight = max_abs(gaps(&tight).into_iter());
    let g_off = gaps(&off);
    let below = g_off.iter().copied().fold(f64::INFINITY, f64::min);
    let above = g_off.iter().copied().fold(0.0f64, f64::max);
    let ok = g_tight < 2e-3 && below > -2e-3;
    outcome(
        3,
        ok,
        format!(
            "correlated, 20 D0 points with a valid test channel: max |BA - formula| = {g_tight:.2e} bits < 2e-3; \
             20 D0 points without one: formula is a lower bound (min BA - formula = {below:.2e}), BA exceeds it by up to {above:.2e} bits"
        ),
    )
}

fn criterion4(opts: &SolverOptions) -> Outcome {
    let prob = models::classification_problem(P, P, 8).unwrap();
    let run = |pts: &[RdQuery]| -> f64 {
        max_abs(pts.par_iter().map(|q| solve_rd_point(&prob, q, opts).unwrap().rate - oracle_classification(q.d1, q.d2, q.ds)).collect::<Vec<_>>().into_iter())
    };
    let below = run(&verify::d1_points(20, 5, true).unwrap());
    let above = run(&verify::d1_points(20, 6, false).unwrap());
    outcome(
        4,
        below < 5e-3,
        format!("classification N = 8, 20 points with D1 <= Ds0: max |BA - formula| = {below:.2e} bits < 5e-3; 20 points with Ds0 < D1: literal-formula gap {above:.3} bits (reported only)"),
    )
}

fn criterion5() -> Outcome {
    let spec = BinarySourceSpec::correlated(P, P, P).unwrap();
    let prob = models::binary_correlated_problem(&spec).unwrap();
    let mut worst = [0.0f64; 4];
    for q in verify::d0_points(20, 11, true).unwrap() {
        let ch = CorrelatedBinaryChannel::build(P, P, P, q.d1, q.d2, q.ds).unwrap();
        let want = oracle_correlated(q.d1, q.d2, q.ds);
        let rep = channels::verify_achievability(&ch.full_joint, prob.source(), Some(prob.d1()), Some(prob.d2()), Some(prob.ds_mod()), want).unwrap();
        let a = rep.achieved.map(|v| v.unwrap());
        let eds = (1.0 - q.d1) * P + q.d1 * (1.0 - P);
        worst[0] = worst[0].max(rep.marginal_residual);
        worst[1] = worst[1].max((a[0] - q.d1).abs()).max((a[1] - q.d2).abs());
        worst[2] = worst[2].max((a[2] - eds).abs()).max(a[2] - q.ds);
        worst[3] = worst[3].max((rep.rate - want).abs());
    }
    let mut cls = [0.0f64; 4];
    for q in verify::d1_points(20, 12, true).unwrap() {
        let ch = channels::build_classification_channel(P, 8, q.d1).unwrap();
        let rep = channels::verify_classification(&ch, P, q.ds).unwrap();
        let m = q.d1.min(ds_to_obs(q.ds, P));
        let first_bracket = h(P) + 2.0 - h(m) - q.d1 * 7f64.log2();
        cls[0] = cls[0].max(rep.marginal_residual);
        cls[1] = cls[1].max((rep.achieved[0].unwrap() - q.d1).abs());
        cls[2] = cls[2].max(rep.achieved[2].unwrap() - q.ds);
        cls[3] = cls[3].max((rep.rate - first_bracket).abs());
    }
    let ok = worst[0] < 1e-12 && worst[1] < 1e-12 && worst[2] < 1e-12 && worst[3] < 1e-9
        && cls[0] < 1e-12 && cls[1] < 1e-12 && cls[2] <= 1e-12 && cls[3] < 1e-9;
    outcome(
        5,
        ok,
        format!(
            "test channels, 20 + 20 points: marginal {:.1e}/{:.1e}, distortion {:.1e}/{:.1e}, semantic {:.1e}/{:.1e} (< 1e-12), rate {:.1e}/{:.1e} (< 1e-9)",
            worst[0], cls[0], worst[1], cls[1], worst[2].max(0.0), cls[2].max(0.0), worst[3], cls[3]
        ),
    )
}

fn criterion6(opts: &SolverOptions) -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.05, 0.1, 0.25] {
        let joint = models::binary_semantic_joint(p).unwrap();
        let ds = models::semantic_hamming();
        let pts = verify::lemma3_points(p);
        let g = max_abs(pts.par_iter().map(|&d| semantic_rd(&joint, &ds, d, opts).unwrap() - oracle_semantic(p, d)).collect::<Vec<_>>().into_iter());
        worst = worst.max(g);
    }
    let p = 0.1;
    let ordered = (0..100)
        .map(|i| p + 0.01 + (0.49 - p - 0.01) * i as f64 / 99.0)
        .all(|d| {
            let rs = semantic_rd::closed_form::semantic_binary_rd(p, d).unwrap();
            let r = semantic_rd::closed_form::uniform_binary_rd(d).unwrap();
            rs > r && oracle_semantic(p, d) > 1.0 - h(d)
        });
    outcome(
        6,
        worst < 1e-3 && ordered,
        format!("semantic-only, 60 points: max |BA - formula| = {worst:.2e} bits < 1e-3; R_S(D) > R(D) on 100 points for p = 0.1: {ordered}"),
    )
}

fn check<'a>(rep: &'a verify::SuiteReport, name: &str) -> &'a verify::Check {
    rep.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"))
}

fn criterion7_8_9(opts: &SolverOptions) -> Vec<Outcome> {
    let rep = run_suite(Suite::Properties, opts);
    let sep = check(&rep, "separability");
    let eight = ["monotonicity", "midpoint-convexity", "distortion-equivalence", "information-identities"].map(|n| check(&rep, n));
    let mc = check(&rep, "gaussian-monte-carlo");
    let describe = |c: &verify::Check| format!("{} {:.2e} (tol {:.0e})", c.name, c.value, c.tolerance.unwrap_or(f64::NAN));
    vec![
        outcome(7, sep.passed, format!("separability over 5 random sources: {}", describe(sep))),
        outcome(8, eight.iter().all(|c| c.passed), eight.iter().map(|c| describe(c)).collect::<Vec<_>>().join(", ")),
        outcome(9, mc.passed, format!("Gaussian Monte Carlo at {} samples: largest z-score {:.2} < 3", mc.points, mc.value)),
    ]
}

fn num(f: &Field) -> Option<f64> {
    match f {
        Field::Num(v) => Some(*v),
        _ => None,
    }
}

/// Recomputes every closed-form cell of `t` and counts BA cells.
fn audit_table(t: &Table, rate_col: &str, oracle: impl Fn(&[Field]) -> Option<f64>) -> (usize, f64, usize, usize) {
    let rc = t.column(rate_col).unwrap();
    let mc = t.column("method");
    let cc = t.column("converged");
    let (mut cf, mut worst, mut ba, mut conv) = (0, 0.0f64, 0, 0);
    for row in &t.rows {
        let method = mc.map_or("closed_form".to_string(), |m| row[m].to_string());
        match method.as_str() {
            "closed_form" => {
                let want = oracle(row).expect("closed-form cell has an oracle");
                worst = worst.max((num(&row[rc]).unwrap() - want).abs() / want.abs().max(1.0));
                cf += 1;
            }
            "ba" | "failed" => {
                ba += 1;
                conv += usize::from(row[cc.unwrap()] == Field::Bool(true));
            }
            _ => {}
        }
    }
    (cf, worst, ba, conv)
}

fn csv_rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).count()
}

fn criterion10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let opts = FigureOptions::default();
    let start = std::time::Instant::now();
    let outs: Vec<FigureOutput> = FigureId::ALL.iter().map(|&id| run_figure(id, dir.path(), &opts).unwrap()).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let mut complete = true;
    for o in &outs {
        for t in &o.tables {
            let rows = csv_rows(&dir.path().join(format!("{}.csv", t.name)));
            complete &= rows == t.rows.len() && rows > 0;
        }
        complete &= dir.path().join(format!("{}_manifest.json", o.id)).exists();
    }
    let mmse = gaussian::mmse(&GaussianSpec::symmetric(2.0, 1.0).unwrap());
    let gaussian_oracle = |r: &[Field]| {
        let (d1, ds) = (num(&r[0])?, num(&r[1])?);
        let sem = (ds - mmse).max(f64::MIN_POSITIVE);
        let x1 = (1.5 / d1).max(0.25 * 1.5 / sem).max(1.0);
        Some(0.5 * 1.5f64.ln() + 0.5 * x1.ln())
    };
    let mut totals = (0usize, 0.0f64, 0usize, 0usize);
    let mut add = |a: (usize, f64, usize, usize)| {
        totals.0 += a.0;
        totals.1 = totals.1.max(a.1);
        totals.2 += a.2;
        totals.3 += a.3;
    };
    for o in &outs {
        for t in &o.tables {
            match t.name.as_str() {
                "fig4" => {
                    add(audit_table(t, "rate_plain", |r| Some(1.0 - h(num(&r[0])?))));
                    let semantic_rows: Vec<Vec<Field>> = t.rows.iter().filter(|r| num(&r[1]).is_some()).cloned().collect();
                    let st = Table { name: t.name.clone(), columns: t.columns.clone(), rows: semantic_rows };
                    add(audit_table(&st, "rate_semantic", |r| Some(oracle_semantic(0.1, num(&r[0])?))));
                }
                "fig5" => add(audit_table(t, "rate", |r| Some(oracle_correlated(num(&r[0])?, 0.5, num(&r[1])?)))),
                "fig6a" => add(audit_table(t, "rate", |r| Some(oracle_correlated(0.03, 0.5, num(&r[0])?)))),
                "fig6b" => add(audit_table(t, "rate", |r| Some(oracle_correlated(0.05, 0.5, num(&r[0])?)))),
                "fig7" => add(audit_table(t, "rate", |r| Some(oracle_classification(num(&r[0])?, 0.5, num(&r[1])?)))),
                "fig8" | "fig9_surface" | "fig9_locus" => add(audit_table(t, "rate", gaussian_oracle)),
                other => panic!("unexpected table {other}"),
            }
        }
    }
    let (cf, worst, ba, conv) = totals;
    let frac = if ba == 0 { 1.0 } else { conv as f64 / ba as f64 };
    let ok = complete && worst < 1e-12 && frac >= 0.99 && elapsed < 1800.0;
    outcome(
        10,
        ok,
        format!(
            "figures fig4-fig9 complete: {complete}; {cf} closed-form cells, max relative deviation {worst:.1e}; \
             {ba} solver cells, {:.2}% converged (>= 99%); {elapsed:.0} s",
            100.0 * frac
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let opts = SolverOptions::default();
    let mut results = vec![criterion1(), criterion2(&opts), criterion3(&opts), criterion4(&opts), criterion5(), criterion6(&opts)];
    results.extend(criterion7_8_9(&opts));
    results.push(criterion10());
    for r in &results {
        println!("{}", r.line);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.line.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}

#[test]
fn oracles_agree_with_reference_values() {
    // reference values quoted to six decimals
    assert!((oracle_semantic(0.1, 0.2) - 0.456436).abs() < 1e-6);
    assert!((1.0 - h(0.1) - 0.531004).abs() < 1e-6);
    assert!((oracle_correlated(0.05, 0.1, 0.3) - 0.867163).abs() < 1e-6);
}
