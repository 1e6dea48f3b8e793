//! Exact sizes of the default schedules, far beyond anything materializable.

use teachlab::headtail::{ht_analytic_sizes, HtParams};
use teachlab::rectangles::{default_rect_widths, rect_analytic_sizes};

fn main() -> teachlab::Result<()> {
    for n in [1, 4, 8] {
        let a = rect_analytic_sizes(&default_rect_widths(n)?);
        println!("rectangles N={n}: |X| = {}, |F| = {}, failed checks {:?}", a.domain_size, a.class_size, a.failed_checks());
    }
    for k in [2, 3] {
        for n in [1, 3, 6] {
            let a = ht_analytic_sizes(&HtParams::paper(n, k)?);
            let digits = a.class_size.to_string().len();
            println!("headtail k={k} N={n}: |F| has {digits} digits, failed checks {:?}", a.failed_checks());
        }
    }
    let a = ht_analytic_sizes(&HtParams::paper(2, 2)?);
    println!("{}", serde_json::to_string_pretty(&a.checks)?);
    Ok(())
}
