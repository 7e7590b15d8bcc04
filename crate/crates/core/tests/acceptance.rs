//! Acceptance suite: one test per acceptance criterion, each driven through
//! the built-in preset of that experiment and printing a single PASS/FAIL
//! line (plus the individual checks that make it up).

use std::time::{Duration, Instant};

use gaplab::lab::{preset, run, Criterion, RunOutcome};
use gaplab::Execution;

struct Outcome {
    outcome: RunOutcome,
    elapsed: Duration,
}

fn run_preset(name: &str) -> Outcome {
    let cfg = preset(name).unwrap_or_else(|| panic!("missing preset {name}"));
    let start = Instant::now();
    let outcome = run(&cfg, Execution::default()).unwrap_or_else(|e| panic!("preset {name} errored: {e}"));
    Outcome {
        outcome,
        elapsed: start.elapsed(),
    }
}

/// Prints every check and the criterion verdict, then asserts it.
fn verdict(id: u32, title: &str, checks: Vec<Criterion>) {
    assert!(!checks.is_empty(), "criterion {id} has no checks");
    for c in &checks {
        println!("    {}", c.line());
    }
    let passed = checks.iter().all(|c| c.passed);
    println!(
        "{} criterion {id:>2}: {title}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {id} ({title}) failed");
}

fn checks(o: &Outcome) -> Vec<Criterion> {
    o.outcome.criteria().cloned().collect()
}

fn runtime(name: &str, elapsed: Duration, limit: Duration) -> Criterion {
    Criterion::new(
        format!("{name} runtime"),
        elapsed <= limit,
        format!("{:.2} s <= {:.0} s", elapsed.as_secs_f64(), limit.as_secs_f64()),
    )
}

#[test]
fn criterion_01_perfect_blowup_rate() {
    let o = run_preset("perfect-blowup");
    let n_eps = preset("perfect-blowup").unwrap().sweep.eps_list.len() as u32;
    let mut c = checks(&o);
    c.push(runtime("per-gap", o.elapsed / n_eps, Duration::from_secs(120)));
    verdict(1, "perfect-case gradient blow-up slope in [-0.6, -0.4]", c);
}

#[test]
fn criterion_02_potential_gap() {
    let o = run_preset("potential-gap");
    verdict(2, "|C1 - C2| slope in [0.4, 0.6] and difference bound dominates", checks(&o));
}

#[test]
fn criterion_03_capacity_asymptotics() {
    let o = run_preset("capacity");
    verdict(3, "a12 slope in [-0.6, -0.4] with capacity structure at every gap", checks(&o));
}

#[test]
fn criterion_04_flat_gap() {
    let mut c = checks(&run_preset("flat-gap-l2"));
    c.extend(checks(&run_preset("flat-gap-l3")));
    verdict(4, "flat-gap slopes for l = 2 and l = 3 inside their windows", c);
}

#[test]
fn criterion_05_cross_check() {
    let o = run_preset("cross-check");
    verdict(5, "decomposed and direct solves agree to 1e-8 on 10 configurations", checks(&o));
}

#[test]
fn criterion_06_matrix_suite() {
    let o = run_preset("matrix-check");
    let mut c = checks(&o);
    let rows = &o.outcome.reports[0].rows;
    let minimum = [200.0, 500.0, 1000.0, 500.0];
    for (row, min) in rows.iter().zip(minimum) {
        c.push(Criterion::new(
            format!("family {} case count", row[0]),
            row[1] >= min,
            format!("{} >= {min}", row[1]),
        ));
    }
    c.push(runtime("suite", o.elapsed, Duration::from_secs(60)));
    verdict(6, "matrix property suite", c);
}

#[test]
fn criterion_07_insulated_bound() {
    let o = run_preset("insulated-bound");
    verdict(7, "insulated normalized gradient bounded and slope >= -0.6", checks(&o));
}

#[test]
fn criterion_08_insulated_oracle() {
    let o = run_preset("insulated-oracle");
    verdict(8, "insulated annulus inner gradient 1.6 within 1e-3", checks(&o));
}

#[test]
fn criterion_09_transforms() {
    let o = run_preset("transforms");
    verdict(9, "flatten, pushforward and flip-extension checks", checks(&o));
}

#[test]
fn criterion_10_transmission() {
    let mut c = checks(&run_preset("transmission"));
    c.extend(checks(&run_preset("stiff-limit")));
    verdict(10, "transmission energy sandwich, closed form and stiff limit", c);
}

#[test]
fn criterion_11_bem_certification() {
    let o = run_preset("bem-certification");
    verdict(11, "annulus flux 2pi/ln2 within 0.1%, refinement and flux balance", checks(&o));
}
