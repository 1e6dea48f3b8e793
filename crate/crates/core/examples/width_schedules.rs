//! Finding the smallest next width that keeps every level dominating the ones below.

use num_bigint::BigUint;
use teachlab::headtail::{validate_ht_widths, HtParams};
use teachlab::rectangles::{validate_rect_widths, RectWidthSchedule};

fn main() -> teachlab::Result<()> {
    for widths in [vec![4u64, 16], vec![4, 4], vec![8, 64, 512]] {
        let verdict = validate_rect_widths(&RectWidthSchedule::from_u64s(&widths)?);
        println!("rectangles {widths:?}: {}", verdict.map_or_else(|v| v.to_string(), |_| "ok".into()));
    }

    // head/tail: the next width must be a multiple of the last one
    let mut widths = vec![2u64];
    while widths.len() < 3 {
        let last = *widths.last().unwrap();
        let next = (1..)
            .map(|m| last * m)
            .find(|&w| {
                let mut trial = widths.clone();
                trial.push(w);
                validate_ht_widths(&HtParams::from_u64s(2, &trial).unwrap()).is_ok()
            })
            .unwrap();
        widths.push(next);
    }
    println!("smallest head/tail schedule for k=2: {widths:?}");
    let err = validate_ht_widths(&HtParams::new(2, vec![BigUint::from(2u32), BigUint::from(10u32)])?).unwrap_err();
    println!("(2, 10) fails: {err}");
    Ok(())
}
