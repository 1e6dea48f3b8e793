//! Exact VC dimension on a tiny class and seeded sampling on larger ones.

use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, HtParams};
use teachlab::oracles::{vc_dimension, VcMode};
use teachlab::rectangles::{build_rectangles, RectWidthSchedule};

fn main() -> teachlab::Result<()> {
    let budget = Budget::default();
    let tiny = build_rectangles(&RectWidthSchedule::from_u64s(&[2])?, &budget)?;
    let exact = vc_dimension(&tiny, VcMode::Exact, &budget)?;
    println!("rectangles w=(2): VC = {:?}, witness {:?}", exact.verified_upper, exact.witness);

    let rects = build_rectangles(&RectWidthSchedule::from_u64s(&[4, 16])?, &budget)?;
    let ht = build_headtail(&HtParams::from_u64s(2, &[2, 12])?, false, &budget)?;
    for (name, class, size) in [("rectangles (4,16)", &rects, 5), ("headtail (2,12)", &ht, 10)] {
        let r = vc_dimension(class, VcMode::Sample { size, samples: 1000, seed: 7 }, &budget)?;
        let s = r.sample.expect("sampled");
        println!(
            "{name}: {} of {} random {size}-sets shattered; largest shattered set found has {} points",
            s.shattered_found, s.samples, r.verified_lower
        );
    }
    Ok(())
}
