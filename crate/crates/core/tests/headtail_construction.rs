use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teachlab::analytic::floor_log2;
use teachlab::budget::Budget;
use teachlab::headtail::{
    build_headtail, check_f_and, check_prefix_rows, count_a, default_ht_widths, f, head_labelings,
    ht_analytic_sizes, prefix_contract, prefix_expand, validate_ht_widths, HtLayout, HtParams, HtViolation,
};
use teachlab::oracles::{combinations, vc_dimension, VcMode};
use teachlab::{ConceptClass, PointMeta, Restriction};

/// Head labelings by brute force over `{0..k}^level`: top level one-hot, the
/// rest zero or one-hot, at most `k` changes between consecutive levels.
fn brute_heads(level: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (k + 1).pow(level as u32);
    for code in 0..total {
        let v: Vec<usize> = (0..level).rev().map(|d| code / (k + 1).pow(d as u32) % (k + 1)).collect();
        let changes = v.windows(2).filter(|w| w[0] != w[1]).count();
        if v[level - 1] != 0 && changes <= k {
            out.push(v);
        }
    }
    out
}

/// Full labelings straight from the point-level rules: rows of the own level
/// are prefixes, higher levels copy column `f(i, j, y)`, lower levels take the
/// AND of the batch that maps onto each column.
fn point_level_oracle(k: usize, widths: &[usize]) -> Vec<Vec<bool>> {
    let n = widths.len();
    let mut ids = std::collections::HashMap::new();
    let mut next = 0;
    for (l, &w) in widths.iter().enumerate() {
        for c in 1..=k {
            ids.insert((l + 1, 0, c), next);
            next += 1;
        }
        for a in 1..=2 * k {
            for y in 1..=w {
                ids.insert((l + 1, a, y), next);
                next += 1;
            }
        }
    }
    let mut out = Vec::new();
    for i in 1..=n {
        let wi = widths[i - 1];
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..2 * k {
            tuples = tuples.into_iter().flat_map(|t| (0..=wi).map(move |p| [t.clone(), vec![p]].concat())).collect();
        }
        for heads in brute_heads(i, k) {
            for p in &tuples {
                let mut c = vec![false; next];
                for (j, &v) in heads.iter().enumerate() {
                    if v > 0 {
                        c[ids[&(j + 1, 0, v)]] = true;
                    }
                }
                let own = |a: usize, y: usize| y <= p[a - 1];
                for j in 1..=n {
                    let wj = widths[j - 1];
                    for a in 1..=2 * k {
                        for y in 1..=wj {
                            let label = if j == i {
                                own(a, y)
                            } else if j > i {
                                own(a, f(i, j, y, widths).unwrap())
                            } else {
                                (1..=wi).filter(|&z| f(j, i, z, widths).unwrap() == y).all(|z| own(a, z))
                            };
                            c[ids[&(j, a, y)]] = label;
                        }
                    }
                }
                out.push(c);
            }
        }
    }
    out
}

fn rows_of(class: &ConceptClass) -> Vec<Vec<bool>> {
    (0..class.len()).map(|i| class.concept(i).to_bools()).collect()
}

fn build(k: usize, widths: &[u64]) -> ConceptClass {
    build_headtail(&HtParams::from_u64s(k, widths).unwrap(), false, &Budget::default()).unwrap()
}

fn level_indices(class: &ConceptClass, level: usize) -> Vec<usize> {
    (0..class.len()).filter(|&i| class.origins(i).iter().any(|t| t.level() == level)).collect()
}

#[test]
fn head_labelings_match_brute_force() {
    for k in 2..=3 {
        for level in 1..=6 {
            let brute = brute_heads(level, k);
            assert_eq!(count_a(level, k), BigUint::from(brute.len()), "level {level}, k {k}");
            // emitted lexicographically, as the brute force enumerates them
            assert_eq!(head_labelings(level, k), brute);
        }
    }
    assert_eq!(count_a(1, 2), BigUint::from(2u32));
    assert_eq!(count_a(2, 2), BigUint::from(6u32));
}

#[test]
fn head_labeling_count_respects_the_guarded_bound() {
    for k in 2..=3u32 {
        for level in 1..=6u32 {
            let bound = BigUint::from(level.saturating_sub(1).max(1)).pow(k) * BigUint::from(k + 1).pow(k + 1);
            assert!(count_a(level as usize, k as usize) <= bound);
        }
    }
}

#[test]
fn small_instances_match_the_point_level_oracle() {
    for (k, widths) in [(2, vec![2usize]), (2, vec![1, 2]), (2, vec![1, 3]), (3, vec![1]), (2, vec![2, 4])] {
        let w64: Vec<u64> = widths.iter().map(|&w| w as u64).collect();
        let class = build_headtail(&HtParams::from_u64s(k, &w64).unwrap(), true, &Budget::default()).unwrap();
        let oracle = point_level_oracle(k, &widths);
        let got = rows_of(&class);
        let unique: HashSet<&Vec<bool>> = oracle.iter().collect();
        assert_eq!(unique.len(), oracle.len(), "levels overlap for {widths:?}");
        assert_eq!(got, oracle, "k {k}, widths {widths:?}");
    }
}

#[test]
fn desk_instance_matches_the_point_level_oracle() {
    let class = build(2, &[2, 12]);
    assert_eq!(class.domain_size(), 60);
    let oracle = point_level_oracle(2, &[2, 12]);
    assert_eq!(oracle.len(), 171_528);
    assert_eq!(class.len(), oracle.len());
    for (i, want) in oracle.iter().enumerate() {
        assert_eq!(&class.concept(i).to_bools(), want, "concept {i}");
    }
    assert_eq!(level_indices(&class, 1).len(), 162);
    assert_eq!(level_indices(&class, 2).len(), 171_366);
}

#[test]
fn smallest_instance_sizes() {
    let class = build(2, &[2]);
    assert_eq!((class.domain_size(), class.len()), (10, 162));
    assert_eq!(point_level_oracle(2, &[2]).len(), 162);
}

#[test]
fn f_examples() {
    let w = [2, 12];
    assert_eq!(f(1, 2, 1, &w).unwrap(), 1);
    assert_eq!(f(1, 2, 7, &w).unwrap(), 2);
    assert_eq!(f(1, 2, 12, &w).unwrap(), 2);
    assert!(f(2, 1, 1, &w).is_err());
    assert!(f(1, 2, 13, &w).is_err());
    assert!(f(1, 2, 0, &w).is_err());
}

/// AND over consecutive batches of `ratio` labels.
fn and_batches(row: &[bool], ratio: usize) -> Vec<bool> {
    row.chunks(ratio).map(|c| c.iter().all(|&b| b)).collect()
}

fn prefix_row(p: usize, len: usize) -> Vec<bool> {
    (0..len).map(|y| y < p).collect()
}

#[test]
fn contraction_examples() {
    let row = prefix_row(5, 8);
    assert_eq!(and_batches(&row, 4), prefix_row(1, 2));
    assert_eq!(prefix_contract(5, 4).unwrap(), 1);
    assert_eq!(and_batches(&prefix_row(8, 8), 4), prefix_row(2, 2));
    assert_eq!(prefix_contract(8, 4).unwrap(), 2);
    assert_eq!(prefix_expand(0, 7).unwrap(), 0);
    assert_eq!(prefix_contract(0, 7).unwrap(), 0);
    assert!(prefix_contract(1, 0).is_err());
}

proptest! {
    #[test]
    fn prefix_closed_forms_match_point_rules(width in 1usize..12, ratio in 1usize..6, p in 0usize..12) {
        let p = p.min(width);
        let wide = width * ratio;
        let copied: Vec<bool> = (1..=wide).map(|y| prefix_row(p, width)[y.div_ceil(ratio) - 1]).collect();
        prop_assert_eq!(copied, prefix_row(prefix_expand(p, ratio).unwrap(), wide));
        let q = p * ratio;
        prop_assert_eq!(and_batches(&prefix_row(q.min(wide), wide), ratio), prefix_row(prefix_contract(q, ratio).unwrap(), width));
        for r in 0..=wide {
            prop_assert_eq!(and_batches(&prefix_row(r, wide), ratio), prefix_row(prefix_contract(r, ratio).unwrap(), width));
        }
        prop_assert_eq!(prefix_contract(prefix_expand(p, ratio).unwrap(), ratio).unwrap(), p);
    }
}

#[test]
fn f_and_holds_and_detects_a_flip() {
    let class = build(2, &[2, 12]);
    assert_eq!(check_f_and(&class).unwrap(), None);
    assert_eq!(check_prefix_rows(&class).unwrap(), None);
    let l = HtLayout::from_domain(class.domain()).unwrap();
    // an all-ones tail part is consistent with itself
    let full = (0..class.len())
        .find(|&i| (1..=4).all(|a| class.label(i, l.tail_id(2, a, 12))))
        .unwrap();
    assert!((1..=4).all(|a| class.label(full, l.tail_id(1, a, 2))));
    let target = level_indices(&class, 2)[0];
    let broken = class.with_flipped_label(target, l.tail_id(1, 1, 1)).unwrap();
    let v = check_f_and(&broken).unwrap().expect("flip must be reported");
    assert_eq!(v.concept, target);
}

#[test]
fn levels_are_disjoint() {
    let class = build(2, &[2, 12]);
    let lo: HashSet<Vec<bool>> = level_indices(&class, 1).iter().map(|&i| class.concept(i).to_bools()).collect();
    assert!(level_indices(&class, 2).iter().all(|&i| !lo.contains(&class.concept(i).to_bools())));
    for i in 0..class.len() {
        assert_eq!(class.origins(i).len(), 1);
    }
}

#[test]
fn width_validation() {
    let ok = HtParams::from_u64s(2, &[2, 12]).unwrap();
    assert_eq!(validate_ht_widths(&ok), Ok(()));
    let lower: BigUint = count_a(1, 2) * BigUint::from(3u32).pow(4);
    assert_eq!(lower, BigUint::from(162u32));
    assert!(lower < BigUint::from(13u32).pow(2));
    match validate_ht_widths(&HtParams::from_u64s(2, &[2, 10]).unwrap()) {
        Err(HtViolation::Domination { level: 2, lower_total, bound }) => {
            assert_eq!((lower_total, bound), (BigUint::from(162u32), BigUint::from(121u32)));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        validate_ht_widths(&HtParams::from_u64s(2, &[4, 10]).unwrap()),
        Err(HtViolation::Divisibility { level: 1, .. })
    ));
    for n in 1..=6 {
        assert_eq!(validate_ht_widths(&HtParams::paper(n, 2).unwrap()), Ok(()));
    }
}

#[test]
fn default_widths() {
    assert_eq!(default_ht_widths(1, 2).unwrap(), vec![BigUint::from(65536u32)]);
    assert_eq!(default_ht_widths(2, 2).unwrap()[1], BigUint::from(16u32).pow(16));
    assert_eq!(default_ht_widths(1, 3).unwrap(), vec![BigUint::from(24u32).pow(4)]);
    assert_eq!(default_ht_widths(1, 3).unwrap()[0], BigUint::from(331_776u32));
}

#[test]
fn analytic_sizes() {
    let a = ht_analytic_sizes(&HtParams::paper(1, 2).unwrap());
    assert_eq!(a.class_size, BigUint::from(2u32) * BigUint::from(65537u32).pow(4));
    assert!(a.class_size <= BigUint::from(65536u32).pow(8));
    assert!(a.failed_checks().is_empty(), "{:?}", a.failed_checks());
    let desk = ht_analytic_sizes(&HtParams::from_u64s(2, &[2, 12]).unwrap());
    assert_eq!(desk.class_size, BigUint::from(171_528u32));
    assert_eq!(desk.domain_size, BigUint::from(60u32));
    assert!(desk.class_size <= BigUint::from(12u32).pow(8));
    assert_eq!(BigUint::from(12u32).pow(8), BigUint::from(429_981_696u32));
    for n in 1..=6usize {
        let a = ht_analytic_sizes(&HtParams::paper(n, 2).unwrap());
        // 14 k N >= log2 log2 |F_N|, with log2 |F| < floor + 1
        let loglog_upper = floor_log2(&BigUint::from(floor_log2(&a.class_size) + 1)) + 1;
        assert!(14 * 2 * n as u64 >= loglog_upper, "N = {n}");
    }
}

#[test]
fn paper_scale_is_refused_but_counted() {
    let params = HtParams::paper(3, 2).unwrap();
    let err = build_headtail(&params, false, &Budget::default()).unwrap_err();
    assert!(matches!(err, teachlab::Error::BudgetExceeded { .. }));
    assert!(ht_analytic_sizes(&params).class_size > BigUint::from(u128::MAX));
}

/// Each sampled tail restriction of at most `k` points, read off a level-2
/// concept, keeps at least `|A_2| (w_2 + 1)^k` concepts of that level.
#[test]
fn few_tail_points_leave_many_concepts() {
    let class = build(2, &[2, 12]);
    let l = HtLayout::from_domain(class.domain()).unwrap();
    let top = class.select(&level_indices(&class, 2));
    let tails: Vec<usize> = (0..class.domain_size())
        .filter(|&p| matches!(class.domain().meta(p), Some(PointMeta::Tail { .. })))
        .collect();
    let floor = 6 * 13usize.pow(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let c = rng.gen_range(0..top.len());
        let t = rng.gen_range(1..=l.k());
        let mut pts: Vec<usize> = rand::seq::index::sample(&mut rng, tails.len(), t).into_iter().map(|i| tails[i]).collect();
        pts.sort_unstable();
        let pattern = pts.iter().map(|&p| top.label(c, p)).collect();
        let r = Restriction::new(pts, pattern).unwrap();
        assert!(top.count_consistent(&r).unwrap() >= floor, "{r}");
    }
}

/// Every head restriction of at most `k` points that some concept realizes,
/// other than all of `H_2` set to zero, is met by a level-2 concept.
#[test]
fn head_restrictions_reach_the_top_level() {
    let class = build(2, &[2, 12]);
    let l = HtLayout::from_domain(class.domain()).unwrap();
    let top = class.select(&level_indices(&class, 2));
    let heads: Vec<usize> = (1..=2).flat_map(|lv| l.heads(lv)).collect();
    let excluded = Restriction::new(l.heads(2), vec![false, false]).unwrap();
    let mut checked = 0;
    for t in 1..=l.k() {
        for idx in combinations(heads.len(), t) {
            let pts: Vec<usize> = idx.iter().map(|&i| heads[i]).collect();
            for code in 0..1usize << t {
                let pattern: Vec<bool> = (0..t).map(|j| (code >> j) & 1 == 1).collect();
                let r = Restriction::new(pts.clone(), pattern).unwrap();
                if r == excluded || class.count_consistent(&r).unwrap() == 0 {
                    continue;
                }
                checked += 1;
                assert!(top.count_consistent(&r).unwrap() >= 1, "{r}");
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn sampled_vc_evidence() {
    let class = build(2, &[2, 12]);
    let r = vc_dimension(&class, VcMode::Sample { size: 10, samples: 1000, seed: 7 }, &Budget::default()).unwrap();
    assert_eq!(r.sample.as_ref().unwrap().shattered_found, 0);
    assert!(class.is_shattered(&r.witness).unwrap());

    // five tail points with two sharing a row are never shattered
    let l = HtLayout::from_domain(class.domain()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let level = rng.gen_range(1..=2);
        let row = rng.gen_range(1..=4);
        let w = l.widths()[level - 1];
        let a = rng.gen_range(1..=w);
        let b = loop {
            let b = rng.gen_range(1..=w);
            if b != a {
                break b;
            }
        };
        let mut set = vec![l.tail_id(level, row, a), l.tail_id(level, row, b)];
        while set.len() < 5 {
            let lv = rng.gen_range(1..=2);
            let p = l.tail_id(lv, rng.gen_range(1..=4), rng.gen_range(1..=l.widths()[lv - 1]));
            if !set.contains(&p) {
                set.push(p);
            }
        }
        set.sort_unstable();
        assert!(!class.is_shattered(&set).unwrap(), "{set:?}");
    }
}
