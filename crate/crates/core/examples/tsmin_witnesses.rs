//! Small teaching sets: the two-point rectangle witness, the structured
//! head/tail search, and capped exhaustive search.

use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, HtParams};
use teachlab::oracles::{ts_min_search, TsMinMode};
use teachlab::rectangles::{build_rectangles, rect_tsmin_witness, RectWidthSchedule};

fn main() -> teachlab::Result<()> {
    let budget = Budget::default();
    let rects = build_rectangles(&RectWidthSchedule::from_u64s(&[8, 64, 512])?, &budget)?;
    let w = rect_tsmin_witness(&rects)?;
    let positives: Vec<usize> = (0..rects.domain_size()).filter(|&p| rects.label(w.concept_index, p)).collect();
    println!("rectangles: {:?} teaches concept {}, positive on {positives:?}", w.set, w.concept_index);

    let ht = build_headtail(&HtParams::from_u64s(2, &[2, 12])?, false, &budget)?;
    let s = ts_min_search(&ht, TsMinMode::Structured, &budget)?;
    println!(
        "headtail structured: {:?} after {} candidates (k rows alone suffice: {:?})",
        s.best, s.candidates_checked, s.k_rows_succeeded
    );

    let small = build_headtail(&HtParams::from_u64s(2, &[2])?, false, &budget)?;
    for cap in 1..=5 {
        let r = ts_min_search(&small, TsMinMode::Exhaustive { cap }, &budget)?;
        println!("headtail w=(2), cap {cap}: {:?}", r.best);
    }
    Ok(())
}
