//! Runs without the libtest harness so the per-criterion lines are always shown.

use std::process::ExitCode;

use phigamma::robba::Profile;
use phigamma::selftest;

fn main() -> ExitCode {
    let results = selftest::run(Profile::default(), &[]);
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}: {} -- {}", r.id, r.title, r.detail);
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if results.len() == 10 && failed.is_empty() {
        println!("acceptance: 10/10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?} of {}", results.len());
        ExitCode::FAILURE
    }
}
