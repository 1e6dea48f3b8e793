//! The fast restriction scan against the brute-force oracle on random classes.

use teachlab::budget::Budget;
use teachlab::oracles::crosscheck_random;

fn main() -> teachlab::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let report = crosscheck_random(trials, 0, 30, 200, &[1, 2, 3], &Budget::default())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
