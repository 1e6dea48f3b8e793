//! Axis-aligned rectangle classes that defeat the greedy algorithm with k = 1.
//!
//! Level `i` is a vertical column `V_i` at `x = i`: a center `z_i` at `y = 0`,
//! `w_i` points above at `y = j * s_i` and `w_i` below at `y = -j * s_i`. The
//! scale `s_i = s_{i-1} * w_{i-1} + 1` places every lower level strictly
//! between `z_i` and its nearest neighbours, so a rectangle can swallow all of
//! `V_1 .. V_{i-1}` without touching `b^{(i)}_1` or `a^{(i)}_1`.
//!
//! Each level contributes four families, each indexed by a prefix length
//! `m in 0..=w_i`:
//!
//! * `up1`: all up-points, the center and the first `m` down-points;
//! * `down1`: the mirror image;
//! * `up2` / `down2`: the same, enlarged to contain every lower level.
//!
//! The shared "whole column" members are removed by deduplication. On level 1
//! there is nothing to enlarge over, so `up2`/`down2` coincide with
//! `up1`/`down1` and the level materializes `2 w_1 + 1` distinct concepts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::analytic::{AnalyticCounts, BoundCheck, LevelCounts};
use crate::bits;
use crate::budget::Budget;
use crate::concept::{
    ClassBuilder, Concept, ConceptClass, Domain, DomainPoint, OriginTag, PointMeta,
    RectRole, Restriction, TeachingCertificate,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RectFamily {
    Up1,
    Down1,
    Up2,
    Down2,
}

impl RectFamily {
    pub const ALL: [RectFamily; 4] = [RectFamily::Up1, RectFamily::Down1, RectFamily::Up2, RectFamily::Down2];

    pub fn enlarged(self) -> bool {
        matches!(self, RectFamily::Up2 | RectFamily::Down2)
    }

    /// Whether the family keeps all up-points (and grows a down-prefix).
    pub fn up(self) -> bool {
        matches!(self, RectFamily::Up1 | RectFamily::Up2)
    }
}

impl fmt::Display for RectFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RectFamily::Up1 => "up1",
            RectFamily::Down1 => "down1",
            RectFamily::Up2 => "up2",
            RectFamily::Down2 => "down2",
        })
    }
}

impl FromStr for RectFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        RectFamily::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| format!("unknown rectangle family {s:?}"))
    }
}

/// Widths `w_1 .. w_N`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectWidthSchedule {
    widths: Vec<BigUint>,
}

impl RectWidthSchedule {
    pub fn new(widths: Vec<BigUint>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::Schedule("at least one level is required".into()));
        }
        if widths.iter().any(Zero::is_zero) {
            return Err(Error::Schedule("widths must be positive".into()));
        }
        Ok(RectWidthSchedule { widths })
    }

    pub fn from_u64s(widths: &[u64]) -> Result<Self> {
        RectWidthSchedule::new(widths.iter().map(|&w| BigUint::from(w)).collect())
    }

    /// `w_i = base^i`.
    pub fn geometric(base: u64, levels: usize) -> Result<Self> {
        let b = BigUint::from(base);
        RectWidthSchedule::new((1..=levels as u32).map(|i| b.pow(i)).collect())
    }

    pub fn levels(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[BigUint] {
        &self.widths
    }

    pub fn is_paper_default(&self) -> bool {
        default_rect_widths(self.levels()).is_ok_and(|d| d == *self)
    }
}

/// `w_i = 2^{10 i}`.
pub fn default_rect_widths(levels: usize) -> Result<RectWidthSchedule> {
    RectWidthSchedule::new((1..=levels).map(|i| BigUint::one() << (10 * i)).collect())
}

fn level_concepts(w: &BigUint) -> BigUint {
    w * 4u32 + 2u32
}

/// First level whose lower levels are not dominated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationViolation {
    pub level: usize,
    /// Left-hand side of the failed strict inequality.
    pub lower_total: BigUint,
    /// Right-hand side it had to stay below.
    pub bound: BigUint,
}

impl fmt::Display for DominationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {}: lower levels total {} which is not below {}",
            self.level, self.lower_total, self.bound
        )
    }
}

/// For every `i >= 2`: `sum_{j<i} (4 w_j + 2) < (4 w_i + 2) / 2 = 2 w_i + 1`.
pub fn validate_rect_widths(schedule: &RectWidthSchedule) -> Result<(), DominationViolation> {
    let mut lower = BigUint::zero();
    for (i, w) in schedule.widths.iter().enumerate() {
        if i > 0 {
            let bound = w * 2u32 + 1u32;
            if lower >= bound {
                return Err(DominationViolation { level: i + 1, lower_total: lower, bound });
            }
        }
        lower += level_concepts(w);
    }
    Ok(())
}

/// Exact sizes `|V_i| = 2 w_i + 1`, `|C_i| = 4 w_i + 2` and totals. On the
/// default schedule the domain and class sandwich bounds are checked too.
pub fn rect_analytic_sizes(schedule: &RectWidthSchedule) -> AnalyticCounts {
    let per_level: Vec<LevelCounts> = schedule
        .widths
        .iter()
        .enumerate()
        .map(|(i, w)| LevelCounts {
            level: i + 1,
            points: w * 2u32 + 1u32,
            concepts: level_concepts(w),
            head_labelings: None,
            prefix_tuples: None,
        })
        .collect();
    let domain_size: BigUint = per_level.iter().map(|l| &l.points).sum();
    let class_size: BigUint = per_level.iter().map(|l| &l.concepts).sum();
    let n = schedule.levels();
    let paper = schedule.is_paper_default();

    let mut checks = vec![BoundCheck {
        name: "level_domination".into(),
        holds: validate_rect_widths(schedule).is_ok(),
    }];
    if paper {
        let pow2 = |e: usize| BigUint::one() << e;
        checks.extend([
            BoundCheck { name: "domain_lower".into(), holds: pow2(10 * n + 1) <= domain_size },
            BoundCheck { name: "domain_upper".into(), holds: domain_size <= pow2(10 * n + 3) },
            BoundCheck { name: "class_lower".into(), holds: pow2(10 * n + 2) <= class_size },
            BoundCheck { name: "class_upper".into(), holds: class_size <= pow2(10 * n + 4) },
        ]);
    }

    AnalyticCounts {
        construction: "rectangles".into(),
        levels: n,
        k: None,
        widths: schedule.widths.clone(),
        paper_schedule: paper,
        per_level,
        domain_size,
        class_size,
        checks,
    }
}

/// Closed box `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_lo: i64,
    pub y_hi: i64,
}

impl Rectangle {
    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.x_lo <= x && x <= self.x_hi && self.y_lo <= y && y <= self.y_hi
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x_lo, self.x_hi, self.y_lo, self.y_hi)
    }
}

/// Point layout and coordinates of a materialized instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectGeometry {
    widths: Vec<usize>,
    offsets: Vec<usize>,
    scales: Vec<i64>,
}

impl RectGeometry {
    pub fn new(widths: &[usize]) -> Result<Self> {
        if widths.is_empty() || widths.contains(&0) {
            return Err(Error::Schedule("widths must be positive and nonempty".into()));
        }
        let overflow = || Error::Schedule("coordinates overflow 64-bit integers".into());
        let mut scales = vec![1i64];
        for i in 1..widths.len() {
            let s = scales[i - 1]
                .checked_mul(widths[i - 1] as i64)
                .and_then(|v| v.checked_add(1))
                .ok_or_else(overflow)?;
            scales.push(s);
        }
        let top = scales.last().unwrap().checked_mul(*widths.last().unwrap() as i64);
        top.ok_or_else(overflow)?;
        let mut offsets = Vec::with_capacity(widths.len());
        let mut acc = 0;
        for &w in widths {
            offsets.push(acc);
            acc += 2 * w + 1;
        }
        Ok(RectGeometry { widths: widths.to_vec(), offsets, scales })
    }

    /// Recovers the layout from point metadata.
    pub fn from_domain(domain: &Domain) -> Result<Self> {
        let mut widths: Vec<usize> = Vec::new();
        for p in domain.points() {
            match p.meta {
                Some(PointMeta::Rect { level, role, .. }) => {
                    if widths.len() < level {
                        widths.resize(level, 0);
                    }
                    if let RectRole::Up(j) = role {
                        widths[level - 1] = widths[level - 1].max(j);
                    }
                }
                _ => return Err(Error::MissingMeta("rectangles")),
            }
        }
        let g = RectGeometry::new(&widths)?;
        if g.domain_size() != domain.len() {
            return Err(Error::Construction("domain does not match a rectangles layout".into()));
        }
        for p in domain.points() {
            if let Some(PointMeta::Rect { level, role, .. }) = p.meta {
                if g.point_id(level, role) != p.id {
                    return Err(Error::Construction(format!(
                        "point {} is out of canonical order",
                        p.id
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn levels(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn scale(&self, level: usize) -> i64 {
        self.scales[level - 1]
    }

    pub fn domain_size(&self) -> usize {
        self.widths.iter().map(|w| 2 * w + 1).sum()
    }

    /// Ids of level `level`, center first.
    pub fn level_range(&self, level: usize) -> std::ops::Range<usize> {
        let off = self.offsets[level - 1];
        off..off + 2 * self.widths[level - 1] + 1
    }

    pub fn point_id(&self, level: usize, role: RectRole) -> usize {
        let off = self.offsets[level - 1];
        match role {
            RectRole::Center => off,
            RectRole::Up(j) => off + j,
            RectRole::Down(j) => off + self.widths[level - 1] + j,
        }
    }

    pub fn center(&self, level: usize) -> usize {
        self.point_id(level, RectRole::Center)
    }

    pub fn coordinates(&self, level: usize, role: RectRole) -> (i64, i64) {
        let s = self.scale(level);
        let y = match role {
            RectRole::Center => 0,
            RectRole::Up(j) => j as i64 * s,
            RectRole::Down(j) => -(j as i64) * s,
        };
        (level as i64, y)
    }

    pub fn domain(&self) -> Domain {
        let mut points = Vec::with_capacity(self.domain_size());
        for level in 1..=self.levels() {
            let w = self.widths[level - 1];
            let roles = std::iter::once(RectRole::Center)
                .chain((1..=w).map(RectRole::Up))
                .chain((1..=w).map(RectRole::Down));
            for role in roles {
                let (x, y) = self.coordinates(level, role);
                points.push(DomainPoint {
                    id: points.len(),
                    meta: Some(PointMeta::Rect { level, role, x, y }),
                });
            }
        }
        Domain::new(points).expect("layout ids are contiguous")
    }

    /// Id range labeled 1 by `family` with prefix `m`, before enlargement.
    fn own_ranges(&self, level: usize, family: RectFamily, m: usize) -> [std::ops::Range<usize>; 2] {
        let off = self.offsets[level - 1];
        let w = self.widths[level - 1];
        if family.up() {
            // center, a_1..a_w, b_1..b_m are contiguous
            [off..off + w + m + 1, 0..0]
        } else {
            [off..off + m + 1, off + w + 1..off + 2 * w + 1]
        }
    }

    /// The concept of `family` with prefix `m` at `level`.
    pub fn family_concept(&self, level: usize, family: RectFamily, m: usize) -> Concept {
        let mut words = vec![0u64; bits::words_for(self.domain_size())];
        self.fill_family(&mut words, level, family, m);
        Concept::from_words(words, self.domain_size())
    }

    fn fill_family(&self, words: &mut [u64], level: usize, family: RectFamily, m: usize) {
        for r in self.own_ranges(level, family, m) {
            bits::set_range(words, r.start, r.end);
        }
        if family.enlarged() {
            bits::set_range(words, 0, self.offsets[level - 1]);
        }
    }

    /// The rectangle drawn for a family member. Enlarged members with an
    /// empty prefix stop one unit short of the first point past the center.
    pub fn family_rectangle(&self, level: usize, family: RectFamily, m: usize) -> Rectangle {
        let s = self.scale(level);
        let w = self.widths[level - 1] as i64;
        let x = level as i64;
        let x_lo = if family.enlarged() { 1 } else { x };
        let reach = |m: usize| -> i64 {
            if m > 0 {
                m as i64 * s
            } else if family.enlarged() {
                s - 1
            } else {
                0
            }
        };
        if family.up() {
            Rectangle { x_lo, x_hi: x, y_lo: -reach(m), y_hi: w * s }
        } else {
            Rectangle { x_lo, x_hi: x, y_lo: -w * s, y_hi: reach(m) }
        }
    }
}

fn to_usize(v: &BigUint, what: &str) -> Result<usize> {
    v.to_usize().ok_or_else(|| Error::Schedule(format!("{what} {v} does not fit in memory")))
}

/// Materializes the class. Refused when `|X| * |F|` exceeds the budget.
pub fn build_rectangles(schedule: &RectWidthSchedule, budget: &Budget) -> Result<ConceptClass> {
    let counts = rect_analytic_sizes(schedule);
    let estimate = &counts.domain_size * &counts.class_size;
    budget.check(estimate.to_u128().unwrap_or(u128::MAX))?;

    let widths = schedule
        .widths
        .iter()
        .map(|w| to_usize(w, "width"))
        .collect::<Result<Vec<_>>>()?;
    let geom = RectGeometry::new(&widths)?;
    let domain = Arc::new(geom.domain());
    let mut builder = ClassBuilder::with_shared(Arc::clone(&domain));
    builder.reserve(to_usize(&counts.class_size, "class size")?);

    let mut row = vec![0u64; bits::words_for(geom.domain_size())];
    for level in 1..=geom.levels() {
        for family in RectFamily::ALL {
            for m in 0..=widths[level - 1] {
                row.fill(0);
                geom.fill_family(&mut row, level, family, m);
                builder.push_words(&row, Some(OriginTag::Rect { level, family, prefix: m }));
            }
        }
    }
    Ok(builder.finish())
}

/// Why a concept is not the indicator of a rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizeError {
    NoPositivePoint,
    MissingCoordinates(usize),
    NegativeInside { point: usize, rect: Rectangle },
}

impl fmt::Display for RealizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizeError::NoPositivePoint => f.write_str("concept has no positive point"),
            RealizeError::MissingCoordinates(p) => write!(f, "point {p} has no coordinates"),
            RealizeError::NegativeInside { point, rect } => {
                write!(f, "negative point {point} lies inside bounding box {rect}")
            }
        }
    }
}

/// Points grouped by x, sorted by y, for box-membership counting.
pub struct PlanarIndex {
    coords: Vec<(i64, i64)>,
    columns: BTreeMap<i64, Vec<(i64, usize)>>,
}

impl PlanarIndex {
    pub fn new(domain: &Domain) -> Result<Self, RealizeError> {
        let mut coords = Vec::with_capacity(domain.len());
        let mut columns: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
        for p in domain.points() {
            match p.meta {
                Some(PointMeta::Rect { x, y, .. }) => {
                    coords.push((x, y));
                    columns.entry(x).or_default().push((y, p.id));
                }
                _ => return Err(RealizeError::MissingCoordinates(p.id)),
            }
        }
        columns.values_mut().for_each(|c| c.sort_unstable());
        Ok(PlanarIndex { coords, columns })
    }

    fn in_box<'a>(&'a self, r: &Rectangle) -> impl Iterator<Item = &'a [(i64, usize)]> + 'a {
        let r = *r;
        self.columns.range(r.x_lo..=r.x_hi).map(move |(_, col)| {
            let lo = col.partition_point(|&(y, _)| y < r.y_lo);
            let hi = col.partition_point(|&(y, _)| y <= r.y_hi);
            &col[lo..hi]
        })
    }

    /// Bounding box of the positive points, provided no negative point is inside it.
    pub fn realize(&self, row: &[u64]) -> Result<Rectangle, RealizeError> {
        let mut positives = 0usize;
        let mut bbox: Option<Rectangle> = None;
        for p in bits::ones(row) {
            let (x, y) = self.coords[p];
            positives += 1;
            bbox = Some(match bbox {
                None => Rectangle { x_lo: x, x_hi: x, y_lo: y, y_hi: y },
                Some(b) => Rectangle {
                    x_lo: b.x_lo.min(x),
                    x_hi: b.x_hi.max(x),
                    y_lo: b.y_lo.min(y),
                    y_hi: b.y_hi.max(y),
                },
            });
        }
        let rect = bbox.ok_or(RealizeError::NoPositivePoint)?;
        let inside: usize = self.in_box(&rect).map(<[_]>::len).sum();
        if inside == positives {
            return Ok(rect);
        }
        let point = self
            .in_box(&rect)
            .flatten()
            .map(|&(_, id)| id)
            .find(|&id| !bits::get(row, id))
            .expect("more points inside than positives");
        Err(RealizeError::NegativeInside { point, rect })
    }
}

/// Certifies that `concept` is a rectangle indicator under the domain's coordinates.
pub fn realize_rectangle(concept: &Concept, domain: &Domain) -> Result<Rectangle, RealizeError> {
    if concept.len() != domain.len() {
        return Err(RealizeError::MissingCoordinates(concept.len().min(domain.len())));
    }
    PlanarIndex::new(domain)?.realize(concept.words())
}

/// Checks every concept; returns the first failure with its concept index.
pub fn realize_all(class: &ConceptClass) -> Result<(), (usize, RealizeError)> {
    let index = PlanarIndex::new(class.domain()).map_err(|e| (0, e))?;
    for (i, row) in class.rows().enumerate() {
        index.realize(row).map_err(|e| (i, e))?;
    }
    Ok(())
}

/// The size-2 teaching set `{z_1, a^{(1)}_1}` labeled `(1, 0)`.
pub fn rect_tsmin_witness(class: &ConceptClass) -> Result<TeachingCertificate> {
    let geom = RectGeometry::from_domain(class.domain())?;
    let z1 = geom.center(1);
    let a1 = geom.point_id(1, RectRole::Up(1));
    let r = Restriction::from_pairs(vec![(z1, true), (a1, false)])?;
    let matches = class.consistent_indices(&r)?;
    let [index] = matches.as_slice() else {
        return Err(Error::Construction(format!(
            "{} concepts label z_1 = 1 and a_1 = 0, expected exactly one",
            matches.len()
        )));
    };
    let cert = TeachingCertificate { concept_index: *index, set: r.points().to_vec() };
    if !cert.verify(class)? {
        return Err(Error::Construction("witness failed verification".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(widths: &[u64]) -> ConceptClass {
        build_rectangles(&RectWidthSchedule::from_u64s(widths).unwrap(), &Budget::default()).unwrap()
    }

    /// Independent description of level `i`'s labelings as point sets.
    fn oracle_level(geom: &RectGeometry, level: usize) -> Vec<Vec<usize>> {
        let w = geom.widths()[level - 1];
        let lower: Vec<usize> = (1..level).flat_map(|l| geom.level_range(l)).collect();
        let mut out = Vec::new();
        for enlarge in [false, true] {
            for up in [true, false] {
                for m in 0..=w {
                    let mut s = vec![geom.center(level)];
                    for j in 1..=w {
                        let (full, partial) = if up {
                            (RectRole::Up(j), RectRole::Down(j))
                        } else {
                            (RectRole::Down(j), RectRole::Up(j))
                        };
                        s.push(geom.point_id(level, full));
                        if j <= m {
                            s.push(geom.point_id(level, partial));
                        }
                    }
                    if enlarge {
                        s.extend(&lower);
                    }
                    s.sort_unstable();
                    out.push(s);
                }
            }
        }
        out
    }

    fn without_rows(class: &ConceptClass, drop: &[usize]) -> ConceptClass {
        let keep: Vec<usize> = (0..class.len()).filter(|i| !drop.contains(i)).collect();
        class.select(&keep)
    }

    #[test]
    fn default_widths() {
        let one = default_rect_widths(1).unwrap();
        assert_eq!(one.widths(), &[BigUint::from(1024u32)]);
        let two = default_rect_widths(2).unwrap();
        assert_eq!(two.widths(), &[BigUint::from(1024u32), BigUint::from(1_048_576u32)]);
        assert_eq!(default_rect_widths(3).unwrap().widths()[2], BigUint::one() << 30u32);
        assert!(default_rect_widths(0).is_err());
    }

    #[test]
    fn validator_examples() {
        assert!(validate_rect_widths(&RectWidthSchedule::from_u64s(&[4, 16]).unwrap()).is_ok());
        let v = validate_rect_widths(&RectWidthSchedule::from_u64s(&[4, 4]).unwrap()).unwrap_err();
        assert_eq!(v.level, 2);
        assert_eq!(v.lower_total, BigUint::from(18u32));
        assert_eq!(v.bound, BigUint::from(9u32));
        assert!(validate_rect_widths(&default_rect_widths(8).unwrap()).is_ok());
        for n in 2..=5 {
            assert!(validate_rect_widths(&RectWidthSchedule::geometric(8, n).unwrap()).is_ok());
        }
    }

    #[test]
    fn generated_levels_match_the_set_oracle() {
        let geom = RectGeometry::new(&[3, 20]).unwrap();
        let class = build(&[3, 20]);
        let mut oracle: Vec<Vec<usize>> = Vec::new();
        for level in 1..=2 {
            for s in oracle_level(&geom, level) {
                if !oracle.contains(&s) {
                    oracle.push(s);
                }
            }
        }
        let got: Vec<Vec<usize>> = (0..class.len())
            .map(|i| bits::ones(class.concept(i).words()).collect())
            .collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn small_instance_sizes() {
        let c = build(&[2]);
        assert_eq!(c.domain_size(), 5);
        // up2/down2 coincide with up1/down1 on the first level
        assert_eq!(c.len(), 5);
        let c = build(&[4, 16]);
        assert_eq!(c.domain_size(), 42);
        assert_eq!(c.len(), 9 + 66);
    }

    #[test]
    fn level_counts_and_origins() {
        let c = build(&[4, 16, 80]);
        let mut per_level = [0usize; 3];
        for i in 0..c.len() {
            let levels: Vec<usize> = c.origins(i).iter().map(OriginTag::level).collect();
            assert!(levels.windows(2).all(|w| w[0] == w[1]), "cross-level duplicate");
            per_level[levels[0] - 1] += 1;
        }
        assert_eq!(per_level, [2 * 4 + 1, 4 * 16 + 2, 4 * 80 + 2]);
    }

    #[test]
    fn structural_properties() {
        let widths = [4usize, 16, 80];
        let c = build(&[4, 16, 80]);
        let geom = RectGeometry::from_domain(c.domain()).unwrap();
        assert_eq!(geom.widths(), &widths);
        for level in 2..=3 {
            let members: Vec<usize> =
                (0..c.len()).filter(|&i| c.origins(i)[0].level() == level).collect();
            let lower: Vec<usize> = (1..level).flat_map(|l| geom.level_range(l)).collect();
            for &i in &members {
                assert!(c.label(i, geom.center(level)));
                let first = c.label(i, lower[0]);
                assert!(lower.iter().all(|&p| c.label(i, p) == first));
            }
            for &p in &lower {
                let ones = members.iter().filter(|&&i| c.label(i, p)).count();
                assert_eq!(2 * ones, members.len(), "half-balance at point {p}");
            }
            let w = widths[level - 1];
            for p in geom.level_range(level).skip(1) {
                let ones = members.iter().filter(|&&i| c.label(i, p)).count();
                assert!(ones >= 2 * w + 2, "center bias at {p}: {ones}");
            }
        }
    }

    #[test]
    fn every_concept_is_realizable_and_matches_its_drawn_rectangle() {
        let c = build(&[8, 64, 512]);
        realize_all(&c).unwrap();
        let geom = RectGeometry::from_domain(c.domain()).unwrap();
        let coords: Vec<(i64, i64)> = c
            .domain()
            .points()
            .iter()
            .map(|p| match p.meta {
                Some(PointMeta::Rect { x, y, .. }) => (x, y),
                _ => unreachable!(),
            })
            .collect();
        for i in 0..c.len() {
            for tag in c.origins(i) {
                let OriginTag::Rect { level, family, prefix } = *tag else { unreachable!() };
                let rect = geom.family_rectangle(level, family, prefix);
                for (p, &(x, y)) in coords.iter().enumerate() {
                    assert_eq!(rect.contains(x, y), c.label(i, p), "{tag} at point {p}");
                }
            }
        }
    }

    #[test]
    fn realize_examples() {
        let c = build(&[2]);
        let domain = c.domain();
        let full = Concept::from_bools(&[true; 5]);
        assert_eq!(
            realize_rectangle(&full, domain).unwrap(),
            Rectangle { x_lo: 1, x_hi: 1, y_lo: -2, y_hi: 2 }
        );
        // ids: z = 0, a_1 = 1, a_2 = 2, b_1 = 3, b_2 = 4
        let broken = Concept::from_bools(&[false, true, false, false, false]);
        assert!(realize_rectangle(&broken, domain).is_ok());
        let gap = Concept::from_bools(&[false, false, false, true, true]);
        assert!(realize_rectangle(&gap, domain).is_ok());
        let straddle = Concept::from_bools(&[false, true, false, true, false]);
        assert_eq!(
            realize_rectangle(&straddle, domain).unwrap_err(),
            RealizeError::NegativeInside { point: 0, rect: Rectangle { x_lo: 1, x_hi: 1, y_lo: -1, y_hi: 1 } }
        );
        assert_eq!(
            realize_rectangle(&Concept::zeros(5), domain).unwrap_err(),
            RealizeError::NoPositivePoint
        );
    }

    #[test]
    fn analytic_sizes() {
        let a = rect_analytic_sizes(&default_rect_widths(1).unwrap());
        assert_eq!(a.domain_size, BigUint::from(2049u32));
        assert_eq!(a.class_size, BigUint::from(4098u32));
        assert!(a.paper_schedule);
        assert!(a.failed_checks().is_empty());
        let a = rect_analytic_sizes(&default_rect_widths(2).unwrap());
        assert_eq!(a.class_size, BigUint::from(4098u32 + 4 * (1u32 << 20) + 2));
        let a = rect_analytic_sizes(&RectWidthSchedule::from_u64s(&[4, 16]).unwrap());
        assert_eq!(a.domain_size, BigUint::from(42u32));
        assert_eq!(a.class_size, BigUint::from(84u32));
        assert!(!a.paper_schedule);
        assert_eq!(a.check("level_domination"), Some(true));
        for n in 1..=8 {
            let a = rect_analytic_sizes(&default_rect_widths(n).unwrap());
            assert!(a.failed_checks().is_empty(), "N={n}: {:?}", a.failed_checks());
        }
    }

    #[test]
    fn analytic_formula_overcounts_only_the_first_level() {
        for widths in [[2u64, 10], [4, 16], [8, 64]] {
            let a = rect_analytic_sizes(&RectWidthSchedule::from_u64s(&widths).unwrap());
            let c = build(&widths);
            let w1 = widths[0] as usize;
            assert_eq!(
                a.class_size.to_usize().unwrap() - c.len(),
                (4 * w1 + 2) - (2 * w1 + 1)
            );
        }
    }

    #[test]
    fn budget_refuses_paper_scale() {
        let err = build_rectangles(&default_rect_widths(2).unwrap(), &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn tsmin_witness_on_small_instances() {
        for widths in [&[2u64][..], &[4, 16], &[8, 64, 512]] {
            let c = build(widths);
            let cert = rect_tsmin_witness(&c).unwrap();
            assert_eq!(cert.set.len(), 2);
            assert!(cert.verify(&c).unwrap());
            let geom = RectGeometry::from_domain(c.domain()).unwrap();
            assert_eq!(cert.set, vec![geom.center(1), geom.point_id(1, RectRole::Up(1))]);
            // the taught concept is the level-1 column minus its up-points
            assert!(c.origins(cert.concept_index).contains(&OriginTag::Rect {
                level: 1,
                family: RectFamily::Down1,
                prefix: 0
            }));
        }
    }

    #[test]
    fn tsmin_witness_rejects_broken_classes() {
        let c = build(&[4, 16]);
        let geom = RectGeometry::from_domain(c.domain()).unwrap();
        let z1 = geom.center(1);
        let a1 = geom.point_id(1, RectRole::Up(1));
        let target = (0..c.len()).find(|&i| c.label(i, z1) && !c.label(i, a1)).unwrap();
        assert!(rect_tsmin_witness(&without_rows(&c, &[target])).is_err());
    }
}
