//! Writing and reading CCLS class files.

use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, HtParams};
use teachlab::{load_ccls, save_ccls, to_ccls_string};

fn main() -> teachlab::Result<()> {
    let class = build_headtail(&HtParams::from_u64s(2, &[1])?, false, &Budget::default())?;
    let text = to_ccls_string(&class);
    for line in text.lines().take(10) {
        println!("{line}");
    }
    println!("... {} lines", text.lines().count());

    let path = std::env::temp_dir().join("teachlab-example.ccls");
    save_ccls(&class, &path)?;
    let back = load_ccls(&path)?;
    assert_eq!(back, class);
    println!("round trip through {} ok", path.display());
    std::fs::remove_file(path)?;
    Ok(())
}
