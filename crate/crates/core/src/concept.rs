//! Finite concept classes over finite, ordered domains.
//!
//! A [`ConceptClass`] is a dense row-major bit matrix: one packed row per
//! concept, one column per domain point. Classes are immutable once built and
//! share their [`Domain`] through an `Arc`, so restricting a class only copies
//! the surviving rows.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::bits;
use crate::error::{Error, Result};
use crate::rectangles::RectFamily;

/// Vertical role of a point in a rectangles level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RectRole {
    Center,
    /// `j`-th point above the center, `1..=w`.
    Up(usize),
    /// `j`-th point below the center, `1..=w`.
    Down(usize),
}

/// Construction-specific tag attached to a domain point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointMeta {
    Rect { level: usize, role: RectRole, x: i64, y: i64 },
    /// Head point `h_{level,col}`; columns are `1..=k`.
    Head { level: usize, col: usize },
    /// Tail point `t_{level,row,col}`; rows are `1..=2k`, columns `1..=w_level`.
    Tail { level: usize, row: usize, col: usize },
}

impl PointMeta {
    pub fn construction(&self) -> &'static str {
        match self {
            PointMeta::Rect { .. } => "rectangles",
            PointMeta::Head { .. } | PointMeta::Tail { .. } => "headtail",
        }
    }

    pub fn level(&self) -> usize {
        match *self {
            PointMeta::Rect { level, .. }
            | PointMeta::Head { level, .. }
            | PointMeta::Tail { level, .. } => level,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainPoint {
    pub id: usize,
    pub meta: Option<PointMeta>,
}

/// Ordered, nonempty list of points with ids `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    points: Vec<DomainPoint>,
}

impl Domain {
    pub fn new(points: Vec<DomainPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("domain must be nonempty".into()));
        }
        if let Some((pos, p)) = points.iter().enumerate().find(|(pos, p)| p.id != *pos) {
            return Err(Error::Precondition(format!(
                "point ids must be contiguous from 0; position {pos} carries id {}",
                p.id
            )));
        }
        Ok(Domain { points })
    }

    /// Domain of `n` points without construction metadata.
    pub fn anonymous(n: usize) -> Result<Self> {
        Domain::new((0..n).map(|id| DomainPoint { id, meta: None }).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DomainPoint] {
        &self.points
    }

    pub fn meta(&self, id: usize) -> Option<&PointMeta> {
        self.points.get(id).and_then(|p| p.meta.as_ref())
    }

    /// Name of the construction the metadata belongs to, if any.
    pub fn construction(&self) -> Option<&'static str> {
        self.points[0].meta.as_ref().map(PointMeta::construction)
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::DomainMismatch { id, domain_len: self.len() })
        }
    }

    /// Validates a list of distinct point ids.
    pub fn check_ids(&self, ids: &[usize]) -> Result<()> {
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in ids {
            self.check_id(id)?;
            if !seen.insert(id) {
                return Err(Error::InvalidRestriction(format!("point {id} listed twice")));
            }
        }
        Ok(())
    }
}

/// A single labeling of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Concept {
    words: Vec<u64>,
    len: usize,
}

impl Concept {
    pub fn zeros(len: usize) -> Self {
        Concept { words: vec![0; bits::words_for(len)], len }
    }

    pub fn from_bools(labels: &[bool]) -> Self {
        let mut c = Concept::zeros(labels.len());
        for (i, _) in labels.iter().enumerate().filter(|(_, &b)| b) {
            bits::set(&mut c.words, i);
        }
        c
    }

    /// Parses a string of `0`/`1` characters, point 0 first.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("bad label character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Concept::from_bools(&labels))
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), bits::words_for(len));
        Concept { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        bits::get(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            bits::flip(&mut self.words, i);
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn to_hex(&self) -> String {
        bits::to_hex(&self.words, self.len)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Which generator family produced a concept. A deduplicated concept keeps
/// every tag that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OriginTag {
    Rect { level: usize, family: RectFamily, prefix: usize },
    /// `head` indexes the level's head labelings, `tail` its prefix tuples,
    /// both in generation order.
    HeadTail { level: usize, head: usize, tail: usize },
}

impl OriginTag {
    pub fn level(&self) -> usize {
        match *self {
            OriginTag::Rect { level, .. } | OriginTag::HeadTail { level, .. } => level,
        }
    }
}

impl fmt::Display for OriginTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OriginTag::Rect { level, family, prefix } => write!(f, "r{level}.{family}.{prefix}"),
            OriginTag::HeadTail { level, head, tail } => write!(f, "h{level}.a{head}.b{tail}"),
        }
    }
}

impl FromStr for OriginTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("unrecognized origin tag {s:?}");
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = s.split('.').collect();
        match (s.chars().next(), parts.as_slice()) {
            (Some('r'), [lvl, fam, prefix]) => Ok(OriginTag::Rect {
                level: num(&lvl[1..])?,
                family: fam.parse().map_err(|_| bad())?,
                prefix: num(prefix)?,
            }),
            (Some('h'), [lvl, a, b]) if a.starts_with('a') && b.starts_with('b') => {
                Ok(OriginTag::HeadTail {
                    level: num(&lvl[1..])?,
                    head: num(&a[1..])?,
                    tail: num(&b[1..])?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// A point set `T` with a pattern `b`; selects the concepts agreeing with `b` on `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Restriction {
    points: Vec<usize>,
    pattern: Vec<bool>,
}

impl Restriction {
    pub fn new(points: Vec<usize>, pattern: Vec<bool>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidRestriction("T must contain at least one point".into()));
        }
        if points.len() != pattern.len() {
            return Err(Error::InvalidRestriction(format!(
                "{} points but {} pattern bits",
                points.len(),
                pattern.len()
            )));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRestriction("points must be strictly increasing".into()));
        }
        Ok(Restriction { points, pattern })
    }

    pub fn single(point: usize, label: bool) -> Self {
        Restriction { points: vec![point], pattern: vec![label] }
    }

    /// Builds a restriction from unordered `(point, label)` pairs.
    pub fn from_pairs(mut pairs: Vec<(usize, bool)>) -> Result<Self> {
        pairs.sort_unstable();
        let (points, pattern) = pairs.into_iter().unzip();
        Restriction::new(points, pattern)
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Merges two restrictions on disjoint point sets.
    pub fn union(&self, other: &Restriction) -> Result<Restriction> {
        let pairs = self
            .points
            .iter()
            .copied()
            .zip(self.pattern.iter().copied())
            .chain(other.points.iter().copied().zip(other.pattern.iter().copied()))
            .collect();
        Restriction::from_pairs(pairs)
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}={}", pts.join(","), self.pattern_string())
    }
}

/// `(word, mask, value)` triples: a row matches iff `row[word] & mask == value` for all.
pub(crate) struct Matcher(Vec<(usize, u64, u64)>);

impl Matcher {
    pub(crate) fn new(points: &[usize], pattern: &[bool]) -> Self {
        let mut by_word: Vec<(usize, u64, u64)> = Vec::new();
        for (&p, &b) in points.iter().zip(pattern) {
            let (wi, bit) = (p / bits::WORD_BITS, 1u64 << (p % bits::WORD_BITS));
            match by_word.iter_mut().find(|e| e.0 == wi) {
                Some(e) => {
                    e.1 |= bit;
                    if b {
                        e.2 |= bit;
                    }
                }
                None => by_word.push((wi, bit, if b { bit } else { 0 })),
            }
        }
        Matcher(by_word)
    }

    #[inline]
    pub(crate) fn matches(&self, row: &[u64]) -> bool {
        self.0.iter().all(|&(wi, m, v)| row[wi] & m == v)
    }
}

/// A concept together with a set on which it differs from every other concept.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TeachingCertificate {
    pub concept_index: usize,
    pub set: Vec<usize>,
}

impl TeachingCertificate {
    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn verify(&self, class: &ConceptClass) -> Result<bool> {
        class.is_teaching_set(self.concept_index, &self.set)
    }
}

/// Deduplicated concepts over a shared domain, in canonical order.
#[derive(Clone, Debug)]
pub struct ConceptClass {
    domain: Arc<Domain>,
    words: usize,
    data: Vec<u64>,
    origins: Vec<Vec<OriginTag>>,
}

impl PartialEq for ConceptClass {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.data == other.data && self.origins == other.origins
    }
}

impl ConceptClass {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub(crate) fn words_per_row(&self) -> usize {
        self.words
    }

    pub(crate) fn row(&self, index: usize) -> &[u64] {
        &self.data[index * self.words..(index + 1) * self.words]
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = &[u64]> + '_ {
        // `max(1)` keeps chunks_exact valid; a domain is never empty.
        self.data.chunks_exact(self.words.max(1))
    }

    pub fn label(&self, index: usize, point: usize) -> bool {
        bits::get(self.row(index), point)
    }

    pub fn concept(&self, index: usize) -> Concept {
        Concept::from_words(self.row(index).to_vec(), self.domain_size())
    }

    pub fn origins(&self, index: usize) -> &[OriginTag] {
        &self.origins[index]
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::ConceptIndex { index, class_len: self.len() })
        }
    }

    fn check_restriction(&self, r: &Restriction) -> Result<()> {
        r.points.iter().try_for_each(|&p| self.domain.check_id(p))
    }

    /// Subclass made of the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> ConceptClass {
        let mut data = Vec::with_capacity(indices.len() * self.words);
        let mut origins = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.row(i));
            origins.push(self.origins[i].clone());
        }
        ConceptClass { domain: Arc::clone(&self.domain), words: self.words, data, origins }
    }

    /// Indices of the concepts consistent with `r`, ascending.
    pub fn consistent_indices(&self, r: &Restriction) -> Result<Vec<usize>> {
        self.check_restriction(r)?;
        let m = Matcher::new(&r.points, &r.pattern);
        Ok(self.rows().enumerate().filter(|(_, row)| m.matches(row)).map(|(i, _)| i).collect())
    }

    /// The subclass `C|_{T,b}`: concepts with `c(t) = b(t)` for all `t` in `T`.
    /// Order is preserved; the result may be empty.
    pub fn restrict(&self, r: &Restriction) -> Result<ConceptClass> {
        Ok(self.select(&self.consistent_indices(r)?))
    }

    /// `|restrict(r)|` without building the subclass.
    pub fn count_consistent(&self, r: &Restriction) -> Result<usize> {
        self.check_restriction(r)?;
        Ok(self.count_matching(&r.points, &r.pattern))
    }

    /// Unchecked counting; `points` may be empty.
    pub(crate) fn count_matching(&self, points: &[usize], pattern: &[bool]) -> usize {
        let m = Matcher::new(points, pattern);
        self.rows().filter(|row| m.matches(row)).count()
    }

    /// The distinct projections of the class onto `set`, in the order of `set`.
    pub fn patterns_on(&self, set: &[usize]) -> Result<BTreeSet<Vec<bool>>> {
        self.domain.check_ids(set)?;
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        for row in self.rows() {
            seen.insert(set.iter().map(|&p| bits::get(row, p)).collect());
        }
        Ok(seen.into_iter().collect())
    }

    /// True iff every one of the `2^|set|` patterns is realized on `set`.
    pub fn is_shattered(&self, set: &[usize]) -> Result<bool> {
        self.domain.check_ids(set)?;
        let m = set.len();
        if m >= usize::BITS as usize || (1usize << m) > self.len() {
            return Ok(false);
        }
        if m > 24 {
            return Ok(self.patterns_on(set)?.len() == 1 << m);
        }
        let target = 1usize << m;
        let mut seen = vec![false; target];
        let mut distinct = 0;
        for row in self.rows() {
            let key = set
                .iter()
                .fold(0usize, |acc, &p| (acc << 1) | bits::get(row, p) as usize);
            if !seen[key] {
                seen[key] = true;
                distinct += 1;
                if distinct == target {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// True iff the concept at `index` is the only one agreeing with its own labels on `set`.
    pub fn is_teaching_set(&self, index: usize, set: &[usize]) -> Result<bool> {
        self.check_index(index)?;
        self.domain.check_ids(set)?;
        let row = self.row(index);
        let pattern: Vec<bool> = set.iter().map(|&p| bits::get(row, p)).collect();
        Ok(self.count_matching(set, &pattern) == 1)
    }

    /// Copy of the class with one label flipped. Duplicates are not re-checked;
    /// this exists for mutation controls.
    pub fn with_flipped_label(&self, index: usize, point: usize) -> Result<ConceptClass> {
        self.check_index(index)?;
        self.domain.check_id(point)?;
        let mut out = self.clone();
        let words = self.words;
        bits::flip(&mut out.data[index * words..(index + 1) * words], point);
        Ok(out)
    }
}

/// Accumulates labelings, dropping exact duplicates and keeping the first
/// occurrence with the union of origin tags.
pub struct ClassBuilder {
    domain: Arc<Domain>,
    words: usize,
    data: Vec<u64>,
    origins: Vec<Vec<OriginTag>>,
    index: HashMap<u64, Vec<usize>>,
}

impl ClassBuilder {
    pub fn new(domain: Domain) -> Self {
        ClassBuilder::with_shared(Arc::new(domain))
    }

    pub(crate) fn with_shared(domain: Arc<Domain>) -> Self {
        let words = bits::words_for(domain.len());
        ClassBuilder { domain, words, data: Vec::new(), origins: Vec::new(), index: HashMap::new() }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn reserve(&mut self, concepts: usize) {
        self.data.reserve(concepts * self.words);
        self.origins.reserve(concepts);
        self.index.reserve(concepts);
    }

    /// Adds a concept; returns whether it was new.
    pub fn push(&mut self, concept: &Concept, origin: Option<OriginTag>) -> Result<bool> {
        if concept.len() != self.domain.len() {
            return Err(Error::LengthMismatch { expected: self.domain.len(), got: concept.len() });
        }
        Ok(self.push_words(concept.words(), origin))
    }

    pub(crate) fn push_words(&mut self, row: &[u64], origin: Option<OriginTag>) -> bool {
        debug_assert_eq!(row.len(), self.words);
        let mut h = DefaultHasher::new();
        row.hash(&mut h);
        let bucket = self.index.entry(h.finish()).or_default();
        let words = self.words;
        if let Some(&dup) = bucket
            .iter()
            .find(|&&i| &self.data[i * words..(i + 1) * words] == row)
        {
            if let Some(tag) = origin {
                if !self.origins[dup].contains(&tag) {
                    self.origins[dup].push(tag);
                }
            }
            return false;
        }
        bucket.push(self.origins.len());
        self.data.extend_from_slice(row);
        self.origins.push(origin.into_iter().collect());
        true
    }

    pub fn finish(self) -> ConceptClass {
        ConceptClass {
            domain: self.domain,
            words: self.words,
            data: self.data,
            origins: self.origins,
        }
    }
}

/// Builds a class from raw labelings, removing duplicates (first one wins).
pub fn build_class<I>(domain: Domain, labelings: I) -> Result<ConceptClass>
where
    I: IntoIterator<Item = Concept>,
{
    let mut b = ClassBuilder::new(domain);
    for c in labelings {
        b.push(&c, None)?;
    }
    Ok(b.finish())
}

/// Ad-hoc class from `0`/`1` strings, e.g. `["00", "01"]`.
pub fn class_from_bitstrings(rows: &[&str]) -> Result<ConceptClass> {
    let len = rows
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::Precondition("at least one concept required".into()))?;
    let concepts = rows.iter().map(|r| Concept::from_bitstring(r)).collect::<Result<Vec<_>>>()?;
    build_class(Domain::anonymous(len)?, concepts)
}
