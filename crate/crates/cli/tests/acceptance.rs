//! One PASS/FAIL line per acceptance criterion.

use mabuchi_cli::checks::{criterion_count, run, CheckOptions};

#[test]
fn acceptance() {
    let opts = CheckOptions::default();
    let outcomes: Vec<_> = (1..=criterion_count()).map(|i| run(i, &opts)).collect();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
