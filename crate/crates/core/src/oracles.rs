//! Brute-force cross-checks: an independent best-restriction scan, VC
//! dimension (exact or sampled), minimum teaching-set search, and the
//! predicted greedy dynamics of the two constructions.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits;
use crate::budget::{restriction_scan_ops, subset_scan_ops, Budget};
use crate::columns::ColumnIndex;
use crate::concept::{build_class, Concept, ConceptClass, Domain, Restriction, TeachingCertificate};
use crate::error::{Error, Result};
use crate::greedy::{best_restriction, greedy_teach, GreedyConfig, GreedyTrace};
use crate::headtail::HtLayout;
use crate::rectangles::RectGeometry;

/// Lexicographic `r`-subsets of `0..n`.
pub fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = (r <= n).then(|| (0..r).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = cur.as_mut().unwrap();
        match (0..r).rev().find(|&i| next[i] < n - r + i) {
            Some(i) => {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
            }
            None => cur = None,
        }
        Some(out)
    })
}

fn patterns(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << len).map(move |code| (0..len).map(|j| (code >> (len - 1 - j)) & 1 == 1).collect())
}

/// Same contract as [`best_restriction`], computed by materializing the
/// restricted class for every candidate in tie-break order.
pub fn oracle_best_restriction(
    class: &ConceptClass,
    k: usize,
    budget: &Budget,
) -> Result<(Restriction, usize)> {
    if class.len() < 2 {
        return Err(Error::Precondition("oracle needs at least two concepts".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let n = class.domain_size();
    budget.check(restriction_scan_ops(n, class.len(), k))?;
    let mut best: Option<(Restriction, usize)> = None;
    for t in 1..=k.min(n) {
        for points in combinations(n, t) {
            for b in patterns(t) {
                let r = Restriction::new(points.clone(), b)?;
                let count = class.restrict(&r)?.len();
                if count > 0 && best.as_ref().is_none_or(|(_, c)| count < *c) {
                    best = Some((r, count));
                }
            }
        }
    }
    best.ok_or_else(|| Error::Precondition("no nonempty restriction".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    pub fast: String,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub trials: usize,
    pub seed: u64,
    pub ks: Vec<usize>,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn compare(class: &ConceptClass, k: usize, trial: usize, budget: &Budget) -> Result<Option<Mismatch>> {
    let fast = best_restriction(class, k)?;
    let oracle = oracle_best_restriction(class, k, budget)?;
    Ok((fast != oracle).then(|| Mismatch {
        trial,
        fast: format!("{} count {}", fast.0, fast.1),
        oracle: format!("{} count {}", oracle.0, oracle.1),
    }))
}

/// A random class of distinct concepts with `2..=max_points` points and
/// `2..=max_concepts` concepts (fewer if the domain is too small).
pub fn random_class(rng: &mut impl Rng, max_points: usize, max_concepts: usize) -> ConceptClass {
    let points = rng.gen_range(2..=max_points.max(2));
    let limit = if points >= 63 { max_concepts } else { max_concepts.min(1 << points) };
    let target = rng.gen_range(2..=limit.max(2));
    // biased densities give classes with uneven counts, where ties matter less
    let density: f64 = rng.gen_range(0.1..0.9);
    let mut rows = Vec::with_capacity(target);
    let mut seen = std::collections::HashSet::new();
    while rows.len() < target {
        let labels: Vec<bool> = (0..points).map(|_| rng.gen_bool(density)).collect();
        if seen.insert(labels.clone()) {
            rows.push(Concept::from_bools(&labels));
        }
    }
    build_class(Domain::anonymous(points).expect("points >= 2"), rows).expect("lengths match")
}

/// Fast path against oracle on `trials` random classes; trial `t` uses seed `seed + t`.
pub fn crosscheck_random(
    trials: usize,
    seed: u64,
    max_points: usize,
    max_concepts: usize,
    ks: &[usize],
    budget: &Budget,
) -> Result<CrosscheckReport> {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + t as u64);
        let class = random_class(&mut rng, max_points, max_concepts);
        for &k in ks {
            compared += 1;
            mismatches.extend(compare(&class, k, t, budget)?);
        }
    }
    Ok(CrosscheckReport { trials, seed, ks: ks.to_vec(), compared, mismatches })
}

/// Fast path against oracle on random subclasses of `class` of at most
/// `max_concepts` concepts.
pub fn crosscheck_subclasses(
    class: &ConceptClass,
    k: usize,
    trials: usize,
    seed: u64,
    max_concepts: usize,
    budget: &Budget,
) -> Result<CrosscheckReport> {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    if class.len() >= 2 {
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + t as u64);
            let size = rng.gen_range(2..=max_concepts.clamp(2, class.len()));
            let mut picked = sample(&mut rng, class.len(), size).into_vec();
            picked.sort_unstable();
            compared += 1;
            mismatches.extend(compare(&class.select(&picked), k, t, budget)?);
        }
    }
    Ok(CrosscheckReport { trials, seed, ks: vec![k], compared, mismatches })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VcMode {
    Exact,
    Sample { size: usize, samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleEvidence {
    pub size: usize,
    pub samples: usize,
    pub seed: u64,
    pub shattered_found: usize,
    pub first_shattered: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VcReport {
    pub mode: &'static str,
    /// Size of `witness`, a set verified to be shattered.
    pub verified_lower: usize,
    pub witness: Vec<usize>,
    /// Exact VC dimension; only in exact mode.
    pub verified_upper: Option<usize>,
    pub sample: Option<SampleEvidence>,
}

/// Shattered set built by adding points in id order whenever shattering survives.
fn greedy_shattered(idx: &ColumnIndex) -> Vec<usize> {
    let mut set = Vec::new();
    for p in 0..idx.point_count() {
        set.push(p);
        if !idx.shatters(&set) {
            set.pop();
        }
    }
    set
}

pub fn vc_dimension(class: &ConceptClass, mode: VcMode, budget: &Budget) -> Result<VcReport> {
    let n = class.domain_size();
    match mode {
        VcMode::Exact => {
            let cap = (usize::BITS - class.len().leading_zeros()) as usize;
            budget.check(subset_scan_ops(n, class.len(), cap))?;
            let mut witness = Vec::new();
            for m in 1..=cap.min(n) {
                match combinations(n, m).find(|s| class.is_shattered(s).unwrap_or(false)) {
                    Some(s) => witness = s,
                    None => break,
                }
            }
            Ok(VcReport {
                mode: "exact",
                verified_lower: witness.len(),
                verified_upper: Some(witness.len()),
                witness,
                sample: None,
            })
        }
        VcMode::Sample { size, samples, seed } => {
            if size > n {
                return Err(Error::Usage(format!("sample size {size} exceeds {n} points")));
            }
            let idx = ColumnIndex::new(class);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = 0;
            let mut first = None;
            for _ in 0..samples {
                let mut s = sample(&mut rng, n, size).into_vec();
                s.sort_unstable();
                if idx.shatters(&s) {
                    found += 1;
                    first.get_or_insert(s);
                }
            }
            let witness = match &first {
                Some(s) if s.len() > greedy_shattered(&idx).len() => s.clone(),
                _ => greedy_shattered(&idx),
            };
            Ok(VcReport {
                mode: "sample",
                verified_lower: witness.len(),
                witness,
                verified_upper: None,
                sample: Some(SampleEvidence {
                    size,
                    samples,
                    seed,
                    shattered_found: found,
                    first_shattered: first,
                }),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsMinMode {
    Exhaustive { cap: usize },
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TsMinReport {
    pub mode: &'static str,
    pub cap: Option<usize>,
    /// `None` means no certificate within the cap (or among structured candidates).
    pub best: Option<TeachingCertificate>,
    pub candidates_checked: u64,
    /// Structured mode: whether a candidate pinning only `k` tail rows taught a concept.
    pub k_rows_succeeded: Option<bool>,
}

/// First concept whose labels on `set` are unique in the class.
fn uniquely_taught(class: &ConceptClass, set: &[usize]) -> Option<usize> {
    let mut seen: HashMap<Vec<bool>, (usize, usize)> = HashMap::new();
    for (i, row) in class.rows().enumerate() {
        let key: Vec<bool> = set.iter().map(|&p| bits::get(row, p)).collect();
        seen.entry(key).and_modify(|e| e.0 += 1).or_insert((1, i));
    }
    seen.values().filter(|(count, _)| *count == 1).map(|&(_, i)| i).min()
}

pub fn ts_min_search(class: &ConceptClass, mode: TsMinMode, budget: &Budget) -> Result<TsMinReport> {
    if class.is_empty() {
        return Err(Error::Precondition("class is empty".into()));
    }
    match mode {
        TsMinMode::Exhaustive { cap } => {
            let n = class.domain_size();
            budget.check(subset_scan_ops(n, class.len(), cap))?;
            let mut checked = 0u64;
            let mut best = None;
            'sizes: for s in 0..=cap.min(n) {
                for set in combinations(n, s) {
                    checked += 1;
                    if let Some(i) = uniquely_taught(class, &set) {
                        best = Some(TeachingCertificate { concept_index: i, set });
                        break 'sizes;
                    }
                }
            }
            Ok(TsMinReport {
                mode: "exhaustive",
                cap: Some(cap),
                best,
                candidates_checked: checked,
                k_rows_succeeded: None,
            })
        }
        TsMinMode::Structured => structured_tsmin(class, budget),
    }
}

/// Candidates: the rightmost tail point of each chosen row of `T_N` plus one
/// head point in each of `H_{N-k} .. H_N`, all labeled 1, for row subsets of
/// size `k..=2k` and every choice of head columns.
fn structured_tsmin(class: &ConceptClass, budget: &Budget) -> Result<TsMinReport> {
    let layout = HtLayout::from_domain(class.domain())?;
    let (k, n) = (layout.k(), layout.levels());
    let w_n = layout.widths()[n - 1];
    let head_levels: Vec<usize> = (n.saturating_sub(k).max(1)..=n).collect();
    let assignments = k.pow(head_levels.len() as u32) as u128;
    let row_sets: u128 = (k..=2 * k).map(|r| crate::budget::binomial(2 * k, r)).sum();
    budget.check(row_sets.saturating_mul(assignments).saturating_mul(class.len() as u128))?;

    let mut checked = 0u64;
    let mut best: Option<TeachingCertificate> = None;
    let mut k_rows_succeeded = false;
    for r in k..=2 * k {
        for rows in combinations(2 * k, r) {
            for code in 0..assignments as usize {
                let mut pairs: Vec<(usize, bool)> = Vec::new();
                let mut c = code;
                for &level in head_levels.iter().rev() {
                    pairs.push((layout.head_id(level, c % k + 1), true));
                    c /= k;
                }
                pairs.extend(rows.iter().map(|&a| (layout.tail_id(n, a + 1, w_n), true)));
                let restriction = Restriction::from_pairs(pairs)?;
                checked += 1;
                let matches = class.consistent_indices(&restriction)?;
                if let [only] = matches[..] {
                    k_rows_succeeded |= r == k;
                    if best.as_ref().is_none_or(|b| restriction.len() < b.set.len()) {
                        best = Some(TeachingCertificate {
                            concept_index: only,
                            set: restriction.points().to_vec(),
                        });
                    }
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    if let Some(cert) = &best {
        if !cert.verify(class)? {
            return Err(Error::Construction("structured certificate failed verification".into()));
        }
    }
    Ok(TsMinReport {
        mode: "structured",
        cap: None,
        best,
        candidates_checked: checked,
        k_rows_succeeded: Some(k_rows_succeeded),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub iteration: usize,
    pub expected: String,
    pub got: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub construction: &'static str,
    pub levels: usize,
    pub k: usize,
    pub iterations: usize,
    pub teaching_set_size: usize,
    /// `N` for rectangles, `kN` for head/tail.
    pub required_size: usize,
    pub final_iteration_growth: usize,
    pub divergence: Option<Divergence>,
    #[serde(skip)]
    pub trace: GreedyTrace,
}

impl DynamicsReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none() && self.teaching_set_size >= self.required_size
    }
}

/// Runs greedy and compares iterations `0..N-1` with the construction's
/// predicted choices: `({z_{N-i}}, 0)` for rectangles with `k = 1`,
/// `(H_{N-i}, 0^k)` for head/tail classes.
pub fn verify_greedy_dynamics(class: &ConceptClass, k: usize) -> Result<DynamicsReport> {
    let (construction, levels, required, expected): (_, _, _, Vec<Restriction>) =
        match class.domain().construction() {
            Some("rectangles") => {
                let g = RectGeometry::from_domain(class.domain())?;
                let n = g.levels();
                let steps = (0..n.saturating_sub(1)).map(|i| Restriction::single(g.center(n - i), false));
                ("rectangles", n, n, steps.collect())
            }
            Some("headtail") => {
                let l = HtLayout::from_domain(class.domain())?;
                let n = l.levels();
                let steps = (0..n.saturating_sub(1))
                    .map(|i| Restriction::new(l.heads(n - i), vec![false; l.k()]))
                    .collect::<Result<_>>()?;
                ("headtail", n, l.k() * n, steps)
            }
            _ => return Err(Error::MissingMeta("construction")),
        };
    let (_, trace) = greedy_teach(class, GreedyConfig::new(k)?)?;
    let divergence = expected.iter().enumerate().find_map(|(i, want)| {
        let got = trace.steps.get(i).map(|s| &s.restriction);
        (got != Some(want)).then(|| Divergence {
            iteration: i,
            expected: want.to_string(),
            got: got.map(ToString::to_string),
        })
    });
    Ok(DynamicsReport {
        construction,
        levels,
        k,
        iterations: trace.steps.len(),
        teaching_set_size: trace.teaching_set_size(),
        required_size: required,
        final_iteration_growth: trace.final_iteration_growth(),
        divergence,
        trace,
    })
}
