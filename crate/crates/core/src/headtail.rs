//! Head/tail classes that defeat the greedy algorithm for any k >= 2.
//!
//! Level `i` owns `k` head points `h_{i,1..k}` and `2k` rows of `w_i` tail
//! points `t_{i,a,b}`. A concept of level `i` pairs a head labeling from `A_i`
//! with a prefix tuple from `B_i`:
//!
//! * the head labeling is zero above level `i`, one-hot on `H_i`, zero or
//!   one-hot below, with at most `k` changes between consecutive levels;
//! * the prefix tuple gives each of the `2k` rows of `T_i` a run of 1s
//!   followed by 0s. Rows of higher levels copy each label `w_l / w_i` times
//!   (the prefix scales up), rows of lower levels take the AND of batches of
//!   `w_i / w_l` labels (the prefix is divided, rounding down).
//!
//! A head labeling is stored as `(v_1, .., v_i)` with `v_j = 0` for the zero
//! vector and `v_j = c` for the one-hot vector hot at column `c`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::analytic::{loglog2_upper, AnalyticCounts, BoundCheck, LevelCounts};
use crate::bits;
use crate::budget::Budget;
use crate::concept::{ClassBuilder, ConceptClass, Domain, DomainPoint, OriginTag, PointMeta};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtParams {
    k: usize,
    widths: Vec<BigUint>,
}

impl HtParams {
    pub fn new(k: usize, widths: Vec<BigUint>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Schedule(format!("head/tail classes need k >= 2, got {k}")));
        }
        if widths.is_empty() {
            return Err(Error::Schedule("at least one level is required".into()));
        }
        if widths.iter().any(Zero::is_zero) {
            return Err(Error::Schedule("widths must be positive".into()));
        }
        Ok(HtParams { k, widths })
    }

    pub fn from_u64s(k: usize, widths: &[u64]) -> Result<Self> {
        HtParams::new(k, widths.iter().map(|&w| BigUint::from(w)).collect())
    }

    pub fn paper(levels: usize, k: usize) -> Result<Self> {
        HtParams::new(k, default_ht_widths(levels, k)?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[BigUint] {
        &self.widths
    }

    pub fn is_paper_default(&self) -> bool {
        default_ht_widths(self.levels(), self.k).is_ok_and(|d| d == self.widths)
    }
}

/// `w_i = (8k)^{4^i}`.
pub fn default_ht_widths(levels: usize, k: usize) -> Result<Vec<BigUint>> {
    if levels == 0 || k < 2 {
        return Err(Error::Schedule("need at least one level and k >= 2".into()));
    }
    let base = BigUint::from(8 * k);
    let mut w = base.pow(4u32);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        out.push(w.clone());
        w = w.pow(4u32);
    }
    Ok(out)
}

/// Number of head labelings of level `level` (the size of `A_level`),
/// by dynamic programming over levels with a change counter.
pub fn count_a(level: usize, k: usize) -> BigUint {
    if level == 0 || k == 0 {
        return BigUint::zero();
    }
    // ways[v][c]: labelings of levels level..=j with v_j = v and c changes so far
    let mut ways = vec![vec![BigUint::zero(); k + 1]; k + 1];
    for row in ways.iter_mut().skip(1) {
        row[0] = BigUint::one();
    }
    for _ in 1..level {
        let mut next = vec![vec![BigUint::zero(); k + 1]; k + 1];
        for (prev, row) in ways.iter().enumerate() {
            for (changes, n) in row.iter().enumerate().filter(|(_, n)| !n.is_zero()) {
                for (v, slot) in next.iter_mut().enumerate() {
                    let c = changes + usize::from(v != prev);
                    if c <= k {
                        slot[c] += n;
                    }
                }
            }
        }
        ways = next;
    }
    ways.iter().flatten().sum()
}

/// All head labelings `(v_1, .., v_level)` of `A_level`, lexicographic.
pub fn head_labelings(level: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(level: usize, k: usize, cur: &mut Vec<usize>, changes: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == level {
            out.push(cur.clone());
            return;
        }
        let last = cur.len() + 1 == level;
        let lo = usize::from(last);
        for v in lo..=k {
            let c = changes + cur.last().map_or(0, |&p| usize::from(p != v));
            if c <= k {
                cur.push(v);
                go(level, k, cur, c, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if level > 0 {
        go(level, k, &mut Vec::with_capacity(level), 0, &mut out);
    }
    out
}

/// Why a width schedule cannot carry the head/tail argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HtViolation {
    /// `w_level` does not divide `w_{level+1}`.
    Divisibility { level: usize, lower: BigUint, upper: BigUint },
    /// `sum_{j<level} |C_j| >= (w_level + 1)^k`.
    Domination { level: usize, lower_total: BigUint, bound: BigUint },
}

impl fmt::Display for HtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HtViolation::Divisibility { level, lower, upper } => write!(
                f,
                "level {level}: width {lower} does not divide the next width {upper}"
            ),
            HtViolation::Domination { level, lower_total, bound } => write!(
                f,
                "level {level}: lower levels total {lower_total} which is not below {bound}"
            ),
        }
    }
}

fn level_sizes(params: &HtParams) -> Vec<(BigUint, BigUint)> {
    let two_k = 2 * params.k as u32;
    params
        .widths
        .iter()
        .enumerate()
        .map(|(i, w)| (count_a(i + 1, params.k), (w + 1u32).pow(two_k)))
        .collect()
}

/// Divisibility of consecutive widths, then `sum_{j<i} |C_j| < (w_i + 1)^k`
/// with exact level sizes.
pub fn validate_ht_widths(params: &HtParams) -> Result<(), HtViolation> {
    for (i, pair) in params.widths.windows(2).enumerate() {
        if !(&pair[1] % &pair[0]).is_zero() {
            return Err(HtViolation::Divisibility {
                level: i + 1,
                lower: pair[0].clone(),
                upper: pair[1].clone(),
            });
        }
    }
    let mut lower = BigUint::zero();
    for (i, (w, (a, b))) in params.widths.iter().zip(level_sizes(params)).enumerate() {
        if i > 0 {
            let bound = (w + 1u32).pow(params.k as u32);
            if lower >= bound {
                return Err(HtViolation::Domination { level: i + 1, lower_total: lower, bound });
            }
        }
        lower += a * b;
    }
    Ok(())
}

/// Exact `|A_i|`, `|B_i| = (w_i + 1)^{2k}`, `|C_i|`, `|X|`, `|F_N|`. On the
/// default schedule the cumulative bound `sum_{j<=i} |C_j| <= w_i^{4k}`, its
/// continuation `w_{i-1}^{4k} < (w_i + 1)^k`, `|X| <= 6k w_N` and
/// `14 k N >= log2 log2 |F_N|` are checked as well.
pub fn ht_analytic_sizes(params: &HtParams) -> AnalyticCounts {
    let k = params.k;
    let n = params.levels();
    let sizes = level_sizes(params);
    let per_level: Vec<LevelCounts> = params
        .widths
        .iter()
        .zip(&sizes)
        .enumerate()
        .map(|(i, (w, (a, b)))| LevelCounts {
            level: i + 1,
            points: w * (2 * k) + k,
            concepts: a * b,
            head_labelings: Some(a.clone()),
            prefix_tuples: Some(b.clone()),
        })
        .collect();
    let domain_size: BigUint = per_level.iter().map(|l| &l.points).sum();
    let class_size: BigUint = per_level.iter().map(|l| &l.concepts).sum();
    let paper = params.is_paper_default();

    let validation = validate_ht_widths(params);
    let a_bound = (1..=n).all(|i| {
        let base = BigUint::from(i.saturating_sub(1).max(1));
        count_a(i, k) <= base.pow(k as u32) * BigUint::from(k + 1).pow(k as u32 + 1)
    });
    let mut checks = vec![
        BoundCheck {
            name: "divisibility".into(),
            holds: !matches!(validation, Err(HtViolation::Divisibility { .. })),
        },
        BoundCheck { name: "level_domination".into(), holds: validation.is_ok() },
        BoundCheck { name: "head_labeling_bound".into(), holds: a_bound },
    ];
    if paper {
        let four_k = 4 * k as u32;
        let mut cumulative = BigUint::zero();
        let mut cumulative_ok = true;
        for (l, w) in per_level.iter().zip(&params.widths) {
            cumulative += &l.concepts;
            cumulative_ok &= cumulative <= w.pow(four_k);
        }
        let chain_ok = params
            .widths
            .windows(2)
            .all(|p| p[0].pow(four_k) < (&p[1] + 1u32).pow(k as u32));
        let w_n = params.widths.last().unwrap();
        checks.extend([
            BoundCheck { name: "cumulative_bound".into(), holds: cumulative_ok },
            BoundCheck { name: "domination_chain".into(), holds: chain_ok },
            BoundCheck { name: "class_bound".into(), holds: class_size <= w_n.pow(four_k) },
            BoundCheck { name: "domain_bound".into(), holds: domain_size <= w_n * (6 * k) },
            BoundCheck {
                name: "loglog".into(),
                holds: (14 * k * n) as u64 >= loglog2_upper(&class_size),
            },
        ]);
    }

    AnalyticCounts {
        construction: "headtail".into(),
        levels: n,
        k: Some(k),
        widths: params.widths.clone(),
        paper_schedule: paper,
        per_level,
        domain_size,
        class_size,
        checks,
    }
}

/// `ceil(y / (w_j / w_i))`: the column of `T_{i,a}` that `t_{j,a,y}` contracts to.
/// Levels are 1-based.
pub fn f(i: usize, j: usize, y: usize, widths: &[usize]) -> Result<usize> {
    if i == 0 || i >= j || j > widths.len() {
        return Err(Error::Precondition(format!("f needs 1 <= i < j <= N, got i={i}, j={j}")));
    }
    let (wi, wj) = (widths[i - 1], widths[j - 1]);
    if y == 0 || y > wj {
        return Err(Error::Precondition(format!("column {y} outside 1..={wj}")));
    }
    if wj % wi != 0 {
        return Err(Error::Schedule(format!("{wi} does not divide {wj}")));
    }
    Ok(y.div_ceil(wj / wi))
}

/// Prefix length after copying every label `ratio` times.
pub fn prefix_expand(p: usize, ratio: usize) -> Result<usize> {
    if ratio == 0 {
        return Err(Error::Precondition("ratio must be positive".into()));
    }
    p.checked_mul(ratio)
        .ok_or_else(|| Error::Precondition(format!("prefix {p} * {ratio} overflows")))
}

/// Prefix length after taking the AND of every batch of `ratio` labels.
pub fn prefix_contract(p: usize, ratio: usize) -> Result<usize> {
    if ratio == 0 {
        return Err(Error::Precondition("ratio must be positive".into()));
    }
    Ok(p / ratio)
}

/// Point layout of a materialized instance: per level, `k` heads then the
/// tails row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtLayout {
    k: usize,
    widths: Vec<usize>,
    offsets: Vec<usize>,
}

impl HtLayout {
    pub fn new(k: usize, widths: &[usize]) -> Result<Self> {
        if k < 2 || widths.is_empty() || widths.contains(&0) {
            return Err(Error::Schedule("need k >= 2 and positive widths".into()));
        }
        if let Some(p) = widths.windows(2).find(|p| p[1] % p[0] != 0) {
            return Err(Error::Schedule(format!("{} does not divide {}", p[0], p[1])));
        }
        let mut offsets = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for &w in widths {
            offsets.push(acc);
            acc += k + 2 * k * w;
        }
        Ok(HtLayout { k, widths: widths.to_vec(), offsets })
    }

    /// Recovers the layout from point metadata and checks canonical order.
    pub fn from_domain(domain: &Domain) -> Result<Self> {
        let mut k = 0;
        let mut widths: Vec<usize> = Vec::new();
        for p in domain.points() {
            let level = match p.meta {
                Some(PointMeta::Head { level, col }) => {
                    if level == 1 {
                        k = k.max(col);
                    }
                    level
                }
                Some(PointMeta::Tail { level, col, .. }) => {
                    if widths.len() < level {
                        widths.resize(level, 0);
                    }
                    widths[level - 1] = widths[level - 1].max(col);
                    level
                }
                _ => return Err(Error::MissingMeta("headtail")),
            };
            if widths.len() < level {
                widths.resize(level, 0);
            }
        }
        let layout = HtLayout::new(k, &widths)?;
        if layout.domain_size() != domain.len() {
            return Err(Error::Construction("domain does not match a head/tail layout".into()));
        }
        for p in domain.points() {
            let expected = match p.meta {
                Some(PointMeta::Head { level, col }) => layout.head_id(level, col),
                Some(PointMeta::Tail { level, row, col }) => layout.tail_id(level, row, col),
                _ => unreachable!(),
            };
            if expected != p.id {
                return Err(Error::Construction(format!("point {} is out of canonical order", p.id)));
            }
        }
        Ok(layout)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn domain_size(&self) -> usize {
        self.widths.iter().map(|w| self.k + 2 * self.k * w).sum()
    }

    /// Ids of level `level`.
    pub fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        let off = self.offsets[level - 1];
        off..off + self.k + 2 * self.k * self.widths[level - 1]
    }

    /// `h_{level,col}`, `col` in `1..=k`.
    pub fn head_id(&self, level: usize, col: usize) -> usize {
        self.offsets[level - 1] + col - 1
    }

    /// `H_level`, ascending.
    pub fn heads(&self, level: usize) -> Vec<usize> {
        (1..=self.k).map(|c| self.head_id(level, c)).collect()
    }

    /// `t_{level,row,col}`, `row` in `1..=2k`, `col` in `1..=w_level`.
    pub fn tail_id(&self, level: usize, row: usize, col: usize) -> usize {
        let w = self.widths[level - 1];
        self.offsets[level - 1] + self.k + (row - 1) * w + col - 1
    }

    pub fn domain(&self) -> Domain {
        let mut points = Vec::with_capacity(self.domain_size());
        for level in 1..=self.levels() {
            for col in 1..=self.k {
                points.push(DomainPoint { id: points.len(), meta: Some(PointMeta::Head { level, col }) });
            }
            for row in 1..=2 * self.k {
                for col in 1..=self.widths[level - 1] {
                    points.push(DomainPoint {
                        id: points.len(),
                        meta: Some(PointMeta::Tail { level, row, col }),
                    });
                }
            }
        }
        Domain::new(points).expect("layout ids are contiguous")
    }

    /// Prefix length on row `a` of level `target` for a level-`source` prefix `p`.
    pub fn carry_prefix(&self, p: usize, source: usize, target: usize) -> usize {
        let (ws, wt) = (self.widths[source - 1], self.widths[target - 1]);
        if target >= source {
            p * (wt / ws)
        } else {
            p / (ws / wt)
        }
    }

    fn fill_tails(&self, words: &mut [u64], level: usize, prefixes: &[usize]) {
        for target in 1..=self.levels() {
            for (a, &p) in prefixes.iter().enumerate() {
                let q = self.carry_prefix(p, level, target);
                if q > 0 {
                    let start = self.tail_id(target, a + 1, 1);
                    bits::set_range(words, start, start + q);
                }
            }
        }
    }

    fn fill_heads(&self, words: &mut [u64], labeling: &[usize]) {
        for (j, &v) in labeling.iter().enumerate() {
            if v > 0 {
                bits::set(words, self.head_id(j + 1, v));
            }
        }
    }
}

/// Prefix tuples of `B_level` in lexicographic order, first row most significant.
pub fn prefix_tuples(rows: usize, width: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = Some(vec![0usize; rows]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        cur = None;
        for d in (0..rows).rev() {
            if next[d] < width {
                next[d] += 1;
                cur = Some(next);
                break;
            }
            next[d] = 0;
        }
        Some(out)
    })
}

fn to_usize(v: &BigUint, what: &str) -> Result<usize> {
    v.to_usize().ok_or_else(|| Error::Schedule(format!("{what} {v} does not fit in memory")))
}

/// Materializes the class, level by level, head labeling by prefix tuple.
/// Unless `force` is set the schedule must pass [`validate_ht_widths`].
pub fn build_headtail(params: &HtParams, force: bool, budget: &Budget) -> Result<ConceptClass> {
    if !force {
        validate_ht_widths(params).map_err(|v| Error::Schedule(v.to_string()))?;
    }
    let counts = ht_analytic_sizes(params);
    let estimate = &counts.domain_size * &counts.class_size;
    budget.check(estimate.to_u128().unwrap_or(u128::MAX))?;

    let widths = params
        .widths
        .iter()
        .map(|w| to_usize(w, "width"))
        .collect::<Result<Vec<_>>>()?;
    let layout = HtLayout::new(params.k, &widths)?;
    let domain = Arc::new(layout.domain());
    let words = bits::words_for(layout.domain_size());
    let mut builder = ClassBuilder::with_shared(Arc::clone(&domain));
    builder.reserve(to_usize(&counts.class_size, "class size")?);

    let mut row = vec![0u64; words];
    for level in 1..=layout.levels() {
        let tails: Vec<Vec<u64>> = prefix_tuples(2 * params.k, widths[level - 1])
            .collect::<Vec<_>>()
            .par_iter()
            .map(|p| {
                let mut t = vec![0u64; words];
                layout.fill_tails(&mut t, level, p);
                t
            })
            .collect();
        for (head, labeling) in head_labelings(level, params.k).iter().enumerate() {
            let mut heads = vec![0u64; words];
            layout.fill_heads(&mut heads, labeling);
            for (tail, t) in tails.iter().enumerate() {
                for (r, (h, t)) in row.iter_mut().zip(heads.iter().zip(t)) {
                    *r = h | t;
                }
                builder.push_words(&row, Some(OriginTag::HeadTail { level, head, tail }));
            }
        }
    }
    Ok(builder.finish())
}

/// A concept whose lower-level tail label is not the AND of its batch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FAndViolation {
    pub concept: usize,
    pub i: usize,
    pub j: usize,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for FAndViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "concept {}: t_({},{},{}) differs from the AND over level {}",
            self.concept, self.i, self.row, self.col, self.j
        )
    }
}

/// Checks `c(t_{i,a,b}) = AND { c(t_{j,a,y}) : f(i,j,y) = b }` for every
/// concept, every `i < j`, row `a` and column `b`, point by point.
pub fn check_f_and(class: &ConceptClass) -> Result<Option<FAndViolation>> {
    let layout = HtLayout::from_domain(class.domain())?;
    let widths = layout.widths().to_vec();
    let levels = layout.levels();
    // batches[(i, j)][b - 1]: the columns y of level j with f(i, j, y) = b
    let mut batches = Vec::new();
    for i in 1..=levels {
        for j in i + 1..=levels {
            let mut by_col = vec![Vec::new(); widths[i - 1]];
            for y in 1..=widths[j - 1] {
                by_col[f(i, j, y, &widths)? - 1].push(y);
            }
            batches.push((i, j, by_col));
        }
    }
    let violation = (0..class.len()).into_par_iter().find_map_first(|ci| {
        for (i, j, by_col) in &batches {
            for row in 1..=2 * layout.k() {
                for (b, ys) in by_col.iter().enumerate() {
                    let and = ys.iter().all(|&y| class.label(ci, layout.tail_id(*j, row, y)));
                    if class.label(ci, layout.tail_id(*i, row, b + 1)) != and {
                        return Some(FAndViolation { concept: ci, i: *i, j: *j, row, col: b + 1 });
                    }
                }
            }
        }
        None
    });
    Ok(violation)
}

/// First `(concept, level, row)` whose tail row is not a run of 1s followed by 0s.
pub fn check_prefix_rows(class: &ConceptClass) -> Result<Option<(usize, usize, usize)>> {
    let layout = HtLayout::from_domain(class.domain())?;
    Ok((0..class.len()).into_par_iter().find_map_first(|ci| {
        for level in 1..=layout.levels() {
            for row in 1..=2 * layout.k() {
                let labels = (1..=layout.widths()[level - 1])
                    .map(|c| class.label(ci, layout.tail_id(level, row, c)));
                let mut seen_zero = false;
                for l in labels {
                    if l && seen_zero {
                        return Some((ci, level, row));
                    }
                    seen_zero |= !l;
                }
            }
        }
        None
    }))
}
