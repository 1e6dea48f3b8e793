//! Greedy with k = 1 on nested rectangle levels: it peels off one level per
//! iteration by excluding the top center, so |S| grows with the number of levels.

use teachlab::budget::Budget;
use teachlab::rectangles::{build_rectangles, validate_rect_widths, RectGeometry, RectWidthSchedule};
use teachlab::{greedy_teach, GreedyConfig};

fn main() -> teachlab::Result<()> {
    let levels = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let schedule = RectWidthSchedule::geometric(8, levels)?;
    validate_rect_widths(&schedule).map_err(|v| teachlab::Error::Schedule(v.to_string()))?;

    let class = build_rectangles(&schedule, &Budget::default())?;
    let geom = RectGeometry::from_domain(class.domain())?;
    println!("{} levels: {} points, {} concepts", levels, class.domain_size(), class.len());
    let centers: Vec<usize> = (1..=levels).map(|l| geom.center(l)).collect();
    println!("centers z_1..z_N: {centers:?}");

    let (cert, trace) = greedy_teach(&class, GreedyConfig::new(1)?)?;
    for (i, s) in trace.steps.iter().enumerate() {
        println!("iteration {i}: {} keeps {} of {}", s.restriction, s.size_after, s.size_before);
    }
    println!("|S| = {} for N = {levels}", cert.set.len());
    Ok(())
}
