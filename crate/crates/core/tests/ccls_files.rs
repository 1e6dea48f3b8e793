use proptest::prelude::*;
use teachlab::budget::Budget;
use teachlab::headtail::{build_headtail, HtParams};
use teachlab::rectangles::{build_rectangles, RectWidthSchedule};
use teachlab::{build_class, load_ccls, read_ccls, save_ccls, to_ccls_string, Concept, Domain};

proptest! {
    #[test]
    fn arbitrary_classes_round_trip(
        rows in (1usize..140).prop_flat_map(|n| {
            prop::collection::btree_set(prop::collection::vec(any::<bool>(), n), 1..20)
        })
    ) {
        let n = rows.iter().next().unwrap().len();
        let class = build_class(Domain::anonymous(n).unwrap(), rows.iter().map(|r| Concept::from_bools(r))).unwrap();
        let text = to_ccls_string(&class);
        let back = read_ccls(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &class);
        prop_assert_eq!(to_ccls_string(&back), text);
    }
}

#[test]
fn files_are_byte_identical_across_builds() {
    let dir = tempfile::tempdir().unwrap();
    let budget = Budget::default();
    let schedule = RectWidthSchedule::from_u64s(&[4, 16]).unwrap();
    let params = HtParams::from_u64s(2, &[2]).unwrap();
    for (name, make) in [
        ("r", Box::new(|| build_rectangles(&schedule, &budget).unwrap()) as Box<dyn Fn() -> _>),
        ("h", Box::new(|| build_headtail(&params, false, &budget).unwrap())),
    ] {
        let a = dir.path().join(format!("{name}a.ccls"));
        let b = dir.path().join(format!("{name}b.ccls"));
        save_ccls(&make(), &a).unwrap();
        save_ccls(&make(), &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(load_ccls(&a).unwrap(), make());
    }
}

#[test]
fn loading_preserves_point_metadata() {
    let class = build_headtail(&HtParams::from_u64s(2, &[2, 12]).unwrap(), false, &Budget::default()).unwrap();
    let back = read_ccls(to_ccls_string(&class).as_bytes()).unwrap();
    assert_eq!(back.domain(), class.domain());
    assert_eq!(back.origins(171_527), class.origins(171_527));
}
