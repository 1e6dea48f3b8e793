//! Greedy with k = 2 on the two-level head/tail class with widths (2, 12).
//! The first iteration zeroes the top level's heads.

use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, validate_ht_widths, HtLayout, HtParams};
use teachlab::{greedy_teach, GreedyConfig};

fn main() -> teachlab::Result<()> {
    let params = HtParams::from_u64s(2, &[2, 12])?;
    validate_ht_widths(&params).map_err(|v| teachlab::Error::Schedule(v.to_string()))?;
    let class = build_headtail(&params, false, &Budget::default())?;
    let layout = HtLayout::from_domain(class.domain())?;
    println!("{} points, {} concepts; H_2 = {:?}", class.domain_size(), class.len(), layout.heads(2));

    let (cert, trace) = greedy_teach(&class, GreedyConfig::new(2)?)?;
    for (i, s) in trace.steps.iter().enumerate() {
        println!("iteration {i}: {} ({} -> {}), |S| = {}", s.restriction, s.size_before, s.size_after, s.cumulative);
    }
    println!("teaching set {:?} for concept {}", cert.set, cert.concept_index);
    Ok(())
}
