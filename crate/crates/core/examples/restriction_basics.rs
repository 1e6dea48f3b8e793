//! Restricting, counting and teaching on a hand-written class.

use teachlab::{class_from_bitstrings, Restriction};

fn main() -> teachlab::Result<()> {
    let class = class_from_bitstrings(&["0011", "0101", "0110", "1001", "1111"])?;
    println!("{} concepts over {} points", class.len(), class.domain_size());

    let r = Restriction::from_pairs(vec![(3, true), (0, false)])?;
    let sub = class.restrict(&r)?;
    println!("{r} keeps {} concepts:", sub.len());
    for i in 0..sub.len() {
        println!("  {}", sub.concept(i));
    }
    assert_eq!(sub.len(), class.count_consistent(&r)?);

    for set in [vec![1, 2], vec![0, 1, 2]] {
        let patterns = class.patterns_on(&set)?;
        println!("{set:?}: {} patterns, shattered = {}", patterns.len(), class.is_shattered(&set)?);
    }

    for i in 0..class.len() {
        let teaches: Vec<_> = (0..4).filter(|&p| class.is_teaching_set(i, &[p]).unwrap()).collect();
        println!("concept {} is taught by single points {teaches:?}", class.concept(i));
    }
    Ok(())
}
