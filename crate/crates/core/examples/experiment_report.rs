//! A full run from a config: build, greedy, suites, JSON report.

use teachlab::experiment::{cmd_experiment, ExperimentConfig};

fn main() -> teachlab::Result<()> {
    let config: ExperimentConfig = serde_json::from_str(
        r#"{
            "construction": "rectangles",
            "widths": [8, 64, 512],
            "suites": ["domination", "realizable", "disjoint", "dynamics", "vc-sample"],
            "vc_size": 5,
            "seed": 7
        }"#,
    )?;
    let report = cmd_experiment(&config)?;
    print!("{}", report.to_json());
    println!("all suites passed: {}", report.passed());
    Ok(())
}
