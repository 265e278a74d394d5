use std::time::Instant;

use tefdyn::reproduce::{run_criterion, CRITERIA};

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(id).expect("known criterion");
        println!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            outcome.id,
            outcome.title,
            outcome.status(),
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
