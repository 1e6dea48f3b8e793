//! Column-oriented views of a concept class.
//!
//! `ones_per_point` counts, for every point, how many concepts label it 1. It
//! runs over the row-major matrix with bit-sliced counters (one bit-plane per
//! binary digit of the count), so no transpose is needed; this is the k = 1
//! path for classes whose transposed copy would not fit in memory.
//!
//! [`ColumnIndex`] is the transposed matrix: one bitset over concepts per
//! point. Multi-point restriction counts become popcounts of ANDed columns.

use rayon::prelude::*;

use crate::bits;
use crate::concept::ConceptClass;

const ROW_BLOCK: usize = 4096;

struct Planes {
    words: usize,
    planes: Vec<Vec<u64>>,
}

impl Planes {
    fn new(words: usize) -> Self {
        Planes { words, planes: Vec::new() }
    }

    fn add(&mut self, row: &[u64]) {
        for (wi, &w) in row.iter().enumerate() {
            let mut carry = w;
            let mut level = 0;
            while carry != 0 {
                if level == self.planes.len() {
                    self.planes.push(vec![0; self.words]);
                }
                let plane = &mut self.planes[level][wi];
                let next = *plane & carry;
                *plane ^= carry;
                carry = next;
                level += 1;
            }
        }
    }

    fn counts(&self, points: usize) -> Vec<usize> {
        (0..points)
            .map(|p| {
                self.planes
                    .iter()
                    .enumerate()
                    .map(|(lvl, plane)| (bits::get(plane, p) as usize) << lvl)
                    .sum()
            })
            .collect()
    }
}

/// Number of concepts labeling each point 1.
pub fn ones_per_point(class: &ConceptClass) -> Vec<usize> {
    let points = class.domain_size();
    let words = class.words_per_row();
    let blocks: Vec<usize> = (0..class.len()).step_by(ROW_BLOCK).collect();
    blocks
        .into_par_iter()
        .map(|start| {
            let mut planes = Planes::new(words);
            for i in start..(start + ROW_BLOCK).min(class.len()) {
                planes.add(class.row(i));
            }
            planes.counts(points)
        })
        .reduce(
            || vec![0; points],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Transposed concept matrix.
pub struct ColumnIndex {
    concepts: usize,
    words: usize,
    columns: Vec<Vec<u64>>,
}

impl ColumnIndex {
    pub fn new(class: &ConceptClass) -> Self {
        let concepts = class.len();
        let words = bits::words_for(concepts);
        let mut columns = vec![vec![0u64; words]; class.domain_size()];
        for (ci, row) in class.rows().enumerate() {
            for p in bits::ones(row) {
                bits::set(&mut columns[p], ci);
            }
        }
        ColumnIndex { concepts, words, columns }
    }

    pub fn point_count(&self) -> usize {
        self.columns.len()
    }

    /// All-ones mask over the concepts.
    pub fn full_mask(&self) -> Vec<u64> {
        let mut m = vec![u64::MAX; self.words];
        if let Some(last) = m.last_mut() {
            *last = bits::tail_mask(self.concepts);
        }
        if self.concepts == 0 {
            m.clear();
        }
        m
    }

    /// Splits `mask` on `point`: `(mask & !col, mask & col)`.
    pub fn split(&self, mask: &[u64], point: usize) -> (Vec<u64>, Vec<u64>) {
        let col = &self.columns[point];
        let zero = mask.iter().zip(col).map(|(m, c)| m & !c).collect();
        let one = mask.iter().zip(col).map(|(m, c)| m & c).collect();
        (zero, one)
    }

    /// Whether every pattern on `set` is realized. Exits at the first empty pattern.
    pub fn shatters(&self, set: &[usize]) -> bool {
        fn go(idx: &ColumnIndex, mask: Vec<u64>, rest: &[usize]) -> bool {
            if bits::count_ones(&mask) == 0 {
                return false;
            }
            match rest.split_first() {
                None => true,
                Some((&p, tail)) => {
                    let (zero, one) = idx.split(&mask, p);
                    go(idx, zero, tail) && go(idx, one, tail)
                }
            }
        }
        go(self, self.full_mask(), set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::class_from_bitstrings;

    #[test]
    fn ones_match_naive_count() {
        let c = class_from_bitstrings(&["1101", "0111", "1001", "0000", "1111"]).unwrap();
        assert_eq!(ones_per_point(&c), vec![3, 3, 2, 4]);
    }

    #[test]
    fn transposed_columns() {
        let c = class_from_bitstrings(&["10", "11", "01"]).unwrap();
        let idx = ColumnIndex::new(&c);
        assert_eq!(idx.split(&[0b111], 0), (vec![0b100], vec![0b011]));
        assert_eq!(idx.split(&[0b111], 1), (vec![0b001], vec![0b110]));
        assert_eq!(idx.full_mask(), vec![0b111]);
        assert!(idx.shatters(&[]));
        assert!(!idx.shatters(&[0, 1]));
        assert!(idx.shatters(&[0]));
    }
}
