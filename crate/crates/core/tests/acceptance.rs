//! Acceptance criteria, one line each. Runs without the libtest harness so
//! that every line is printed whether or not it passes.

use causal_diamond::cli::selftest::{self, SelftestConfig};
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    label: &'static str,
    passed: bool,
    detail: String,
}

/// A selftest check, optionally under a wall-clock budget.
fn check(label: &'static str, id: &str, budget: Option<Duration>) -> Outcome {
    let res = selftest::run_check(id, &SelftestConfig::default()).expect("known check");
    let over = budget.filter(|b| res.elapsed >= *b);
    let mut detail = format!("{} ({:.2} s)", res.detail, res.elapsed.as_secs_f64());
    if let Some(b) = over {
        detail.push_str(&format!(", over the {} s budget", b.as_secs()));
    }
    Outcome { label, passed: res.passed && over.is_none(), detail }
}

fn whole_selftest() -> Outcome {
    let cfg = SelftestConfig::default();
    let start = Instant::now();
    let first = selftest::run_all(&cfg);
    let elapsed = start.elapsed();
    let second = selftest::run_all(&cfg);
    let key = |v: &[selftest::CheckResult]| v.iter().map(|c| (c.id, c.passed, c.detail.clone())).collect::<Vec<_>>();
    let complete = first.len() == selftest::CHECKS.len();
    let deterministic = key(&first) == key(&second);
    let fast = elapsed < Duration::from_secs(60);
    let failing: Vec<&str> = first.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    Outcome {
        label: "10  selftest",
        passed: complete && deterministic && fast,
        detail: format!(
            "{} checks in {:.2} s, deterministic: {deterministic}, failing checks: {failing:?}",
            first.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let outcomes = [
        check("1   log-negativity curve", "fig3", secs(10)),
        check("2   mutual-information curve", "fig4", secs(10)),
        check("3   PPT spectrum vs dense", "ppt-oracle", secs(30)),
        check("4   negative eigenvalue", "negative-eigenvalue", None),
        check("5   Bogoliubov closed form", "bogoliubov", secs(30)),
        check("6   thermality", "thermality", None),
        check("7   geometry", "geometry", None),
        check("8   state integrity", "state", None),
        check("9a  entropies at r = 0", "entropy-r0", None),
        check("9b  entropies at r = 10", "entropy-large-r", None),
        whole_selftest(),
    ];
    for o in &outcomes {
        println!("{} criterion {} -- {}", if o.passed { "PASS" } else { "FAIL" }, o.label, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} acceptance criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
