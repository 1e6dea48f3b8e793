//! Greedy teaching-set construction.
//!
//! Each iteration picks the restriction `(T, b)` with `1 <= |T| <= k` that
//! leaves the fewest (but at least one) consistent concepts, adds `T` to the
//! teaching set and restricts the class to `(T, b)`, until one concept is left.
//!
//! Ties are broken by the total order `(count, |T|, T, b)`: smaller count,
//! then fewer points, then the sorted point ids lexicographically, then the
//! pattern lexicographically with `0 < 1`. The scan visits every candidate and
//! reduces with that order, so the result does not depend on scheduling.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bits;
use crate::columns::{ones_per_point, ColumnIndex};
use crate::concept::{ConceptClass, Restriction, TeachingCertificate};
use crate::error::{Error, Result};

/// The only tie-breaking policy: `(count, |T|, T lexicographic, b lexicographic)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    CountSizeLex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyConfig {
    pub k: usize,
    pub tie_break: TieBreak,
}

impl GreedyConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("greediness parameter k must be at least 1".into()));
        }
        Ok(GreedyConfig { k, tie_break: TieBreak::CountSizeLex })
    }
}

/// Compares two candidates under the tie-break total order.
pub fn candidate_order(a: (&Restriction, usize), b: (&Restriction, usize)) -> Ordering {
    a.1.cmp(&b.1)
        .then(a.0.len().cmp(&b.0.len()))
        .then_with(|| a.0.points().cmp(b.0.points()))
        .then_with(|| a.0.pattern().cmp(b.0.pattern()))
}

#[derive(Default)]
struct Best(Option<(usize, Vec<usize>, Vec<bool>)>);

impl Best {
    fn key(&self) -> Option<(usize, usize, &[usize], &[bool])> {
        self.0.as_ref().map(|(c, t, b)| (*c, t.len(), t.as_slice(), b.as_slice()))
    }

    fn offer(&mut self, count: usize, points: &[usize], pattern: &[bool]) {
        if count == 0 {
            return;
        }
        let better = match self.key() {
            None => true,
            Some(cur) => (count, points.len(), points, pattern) < cur,
        };
        if better {
            self.0 = Some((count, points.to_vec(), pattern.to_vec()));
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if let Some((c, t, b)) = other.0 {
            self.offer(c, &t, &b);
        }
        self
    }
}

fn pattern_of(index: usize, len: usize) -> Vec<bool> {
    (0..len).map(|j| (index >> (len - 1 - j)) & 1 == 1).collect()
}

/// Extends the restrictions on `points` (one mask per pattern, first point as
/// the most significant pattern bit) by every later point, down to size `k`.
fn scan_extensions(
    idx: &ColumnIndex,
    k: usize,
    points: &mut Vec<usize>,
    masks: &[Vec<u64>],
    best: &mut Best,
) {
    let last = *points.last().expect("nonempty prefix");
    let n = idx.point_count();
    for q in last + 1..n {
        let mut next = Vec::with_capacity(masks.len() * 2);
        for m in masks {
            let (zero, one) = idx.split(m, q);
            next.push(zero);
            next.push(one);
        }
        points.push(q);
        for (pi, m) in next.iter().enumerate() {
            best.offer(bits::count_ones(m), points, &pattern_of(pi, points.len()));
        }
        if points.len() < k {
            scan_extensions(idx, k, points, &next, best);
        }
        points.pop();
    }
}

/// The minimum nonempty restriction with at most `k` points, and its count.
pub fn best_restriction(class: &ConceptClass, k: usize) -> Result<(Restriction, usize)> {
    if class.len() < 2 {
        return Err(Error::Precondition(format!(
            "best_restriction needs at least two concepts, class has {}",
            class.len()
        )));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let n = class.domain_size();
    let k = k.min(n);
    let total = class.len();

    let mut best = Best::default();
    for (p, &ones) in ones_per_point(class).iter().enumerate() {
        best.offer(total - ones, &[p], &[false]);
        best.offer(ones, &[p], &[true]);
    }

    if k >= 2 {
        let idx = ColumnIndex::new(class);
        let full = idx.full_mask();
        let multi = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut local = Best::default();
                let (zero, one) = idx.split(&full, p);
                scan_extensions(&idx, k, &mut vec![p], &[zero, one], &mut local);
                local
            })
            .reduce(Best::default, Best::merge);
        best = best.merge(multi);
    }

    let (count, points, pattern) = best.0.ok_or_else(|| {
        Error::Precondition("no nonempty restriction found; concepts are not distinct".into())
    })?;
    if count >= total {
        return Err(Error::Precondition(
            "every restriction keeps the whole class; concepts are not distinct".into(),
        ));
    }
    Ok((Restriction::new(points, pattern)?, count))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub restriction: Restriction,
    pub size_before: usize,
    pub size_after: usize,
    /// `|S|` after this iteration.
    pub cumulative: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace {
    pub steps: Vec<TraceStep>,
    pub final_concept_index: usize,
}

impl GreedyTrace {
    pub fn teaching_set_size(&self) -> usize {
        self.steps.last().map_or(0, |s| s.cumulative)
    }

    /// Number of points the last iteration added to `S`.
    pub fn final_iteration_growth(&self) -> usize {
        match self.steps.as_slice() {
            [] => 0,
            [only] => only.cumulative,
            [.., prev, last] => last.cumulative - prev.cumulative,
        }
    }

    /// CSV export; `class` must be the class the trace was produced on.
    pub fn to_csv(&self, class: &ConceptClass) -> String {
        let mut out = String::from("iter,points,pattern,size_before,size_after,cum_teaching_set_size\n");
        for (i, s) in self.steps.iter().enumerate() {
            let pts: Vec<String> = s.restriction.points().iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{}",
                pts.join(";"),
                s.restriction.pattern_string(),
                s.size_before,
                s.size_after,
                s.cumulative
            );
        }
        let _ = writeln!(
            out,
            "final,{},{}",
            self.final_concept_index,
            class.concept(self.final_concept_index).to_hex()
        );
        out
    }
}

/// Runs the greedy loop to completion. The returned certificate indexes the
/// original class and is re-verified against it.
pub fn greedy_teach(
    class: &ConceptClass,
    config: GreedyConfig,
) -> Result<(TeachingCertificate, GreedyTrace)> {
    if class.is_empty() {
        return Err(Error::Precondition("cannot teach from an empty class".into()));
    }
    // borrowed until the first restriction; classes can be gigabytes
    let mut current = Cow::Borrowed(class);
    let mut original_index: Vec<usize> = (0..class.len()).collect();
    let mut set = BTreeSet::new();
    let mut steps = Vec::new();

    while current.len() > 1 {
        let (r, count) = best_restriction(&current, config.k)?;
        let keep = current.consistent_indices(&r)?;
        debug_assert_eq!(keep.len(), count);
        set.extend(r.points().iter().copied());
        steps.push(TraceStep {
            restriction: r,
            size_before: current.len(),
            size_after: keep.len(),
            cumulative: set.len(),
        });
        original_index = keep.iter().map(|&i| original_index[i]).collect();
        current = Cow::Owned(current.select(&keep));
    }

    let cert = TeachingCertificate {
        concept_index: original_index[0],
        set: set.into_iter().collect(),
    };
    if !cert.verify(class)? {
        return Err(Error::Construction(format!(
            "greedy set {:?} does not teach concept {}",
            cert.set, cert.concept_index
        )));
    }
    let final_concept_index = cert.concept_index;
    Ok((cert, GreedyTrace { steps, final_concept_index }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::class_from_bitstrings;

    #[test]
    fn symmetric_pair_breaks_tie_on_pattern() {
        let c = class_from_bitstrings(&["0", "1"]).unwrap();
        let (r, count) = best_restriction(&c, 1).unwrap();
        assert_eq!((r.points(), r.pattern(), count), (&[0][..], &[false][..], 1));
    }

    #[test]
    fn smaller_t_wins_ties() {
        // point 0 = 1 isolates concept 2 with |T| = 1; so does any pair containing it
        let c = class_from_bitstrings(&["00", "01", "10"]).unwrap();
        let (r, count) = best_restriction(&c, 2).unwrap();
        assert_eq!(count, 1);
        assert_eq!(r.len(), 1);
        assert_eq!(r.points(), &[0]);
        assert_eq!(r.pattern(), &[true]);
    }

    #[test]
    fn pairs_can_beat_singles() {
        // singles all leave 2 of 4; any pair isolates one concept
        let c = class_from_bitstrings(&["00", "01", "10", "11"]).unwrap();
        let (r, count) = best_restriction(&c, 2).unwrap();
        assert_eq!(count, 1);
        assert_eq!(r.points(), &[0, 1]);
        assert_eq!(r.pattern(), &[false, false]);
        let (r1, c1) = best_restriction(&c, 1).unwrap();
        assert_eq!((r1.points(), r1.pattern(), c1), (&[0][..], &[false][..], 2));
    }

    #[test]
    fn precondition_errors() {
        let single = class_from_bitstrings(&["01"]).unwrap();
        assert!(matches!(best_restriction(&single, 1), Err(Error::Precondition(_))));
        let pair = class_from_bitstrings(&["01", "10"]).unwrap();
        assert!(best_restriction(&pair, 0).is_err());
        assert!(GreedyConfig::new(0).is_err());
    }

    #[test]
    fn singleton_class_needs_no_points() {
        let c = class_from_bitstrings(&["0110"]).unwrap();
        let (cert, trace) = greedy_teach(&c, GreedyConfig::new(1).unwrap()).unwrap();
        assert!(cert.set.is_empty());
        assert!(trace.steps.is_empty());
        assert_eq!(trace.teaching_set_size(), 0);
        assert_eq!(trace.to_csv(&c), "iter,points,pattern,size_before,size_after,cum_teaching_set_size\nfinal,0,06\n");
    }

    #[test]
    fn trace_csv_layout() {
        let c = class_from_bitstrings(&["00", "01", "10", "11"]).unwrap();
        let (cert, trace) = greedy_teach(&c, GreedyConfig::new(1).unwrap()).unwrap();
        // 0=0 keeps {00, 01}; then 1=0 keeps {00}
        assert_eq!(cert, TeachingCertificate { concept_index: 0, set: vec![0, 1] });
        assert_eq!(
            trace.to_csv(&c),
            "iter,points,pattern,size_before,size_after,cum_teaching_set_size\n\
             0,0,0,4,2,1\n\
             1,1,0,2,1,2\n\
             final,0,00\n"
        );
        assert_eq!(trace.final_iteration_growth(), 1);
    }

    #[test]
    fn repeated_points_do_not_grow_the_set() {
        let c = class_from_bitstrings(&["000", "001", "011", "111"]).unwrap();
        let (cert, trace) = greedy_teach(&c, GreedyConfig::new(2).unwrap()).unwrap();
        assert!(cert.verify(&c).unwrap());
        assert_eq!(cert.set.len(), trace.teaching_set_size());
    }
}
