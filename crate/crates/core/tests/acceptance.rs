//! One PASS/FAIL line per acceptance criterion, default configuration.
//! Tolerances are the defaults of `validate::Tolerances`.

use plasmonic::validate::{run_check, ValidateConfig, CRITERIA};

fn main() {
    let cfg = ValidateConfig::default();
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let out = run_check(id, &cfg);
        println!("{out}  ({:.2}s)", out.seconds);
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
