//! Every head/tail concept's lower-level tails are the AND of the matching
//! batches above; a single flipped bit breaks it.

use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, check_f_and, f, HtLayout, HtParams};

fn main() -> teachlab::Result<()> {
    let widths = [2usize, 12];
    for y in [1, 6, 7, 12] {
        println!("t_(2,a,{y}) contracts to column {} of level 1", f(1, 2, y, &widths)?);
    }
    let class = build_headtail(&HtParams::from_u64s(2, &[2, 12])?, false, &Budget::default())?;
    println!("clean class: {:?}", check_f_and(&class)?);

    let layout = HtLayout::from_domain(class.domain())?;
    let victim = class.len() - 1;
    let broken = class.with_flipped_label(victim, layout.tail_id(1, 1, 1))?;
    match check_f_and(&broken)? {
        Some(v) => println!("mutated class: {v}"),
        None => println!("mutation went unnoticed"),
    }
    Ok(())
}
