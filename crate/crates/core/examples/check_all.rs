//! Prints the identity report for the default registry.

use qcal::verify::{run_all, VerifyOptions};

fn main() {
    for r in run_all(&VerifyOptions::default()) {
        println!(
            "{:<24} n={:<4} skipped={:<3} max={:.3e} mean={:.3e} {}",
            r.id.name(),
            r.samples_evaluated,
            r.skipped,
            r.max_residual,
            r.mean_residual,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
}
