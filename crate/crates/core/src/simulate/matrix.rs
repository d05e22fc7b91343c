use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Entry alphabet of a genotype matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ploidy {
    /// Presence/absence, entries in {0, 1}.
    Binary,
    /// Alternate-allele count, entries in {0, 1, 2}.
    Diploid,
}

impl Ploidy {
    pub fn max_entry(self) -> u8 {
        match self {
            Ploidy::Binary => 1,
            Ploidy::Diploid => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ploidy::Binary => "binary",
            Ploidy::Diploid => "diploid",
        }
    }
}

/// How a nonzero entry contributes to a column's carrier count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CarrierRule {
    /// Each individual with a nonzero entry counts once.
    #[default]
    AnyNonzero,
    /// Each individual counts its number of alternate alleles.
    AlleleCount,
}

impl CarrierRule {
    #[inline]
    pub fn weight(self, entry: u8) -> u32 {
        match self {
            CarrierRule::AnyNonzero => u32::from(entry > 0),
            CarrierRule::AlleleCount => u32::from(entry),
        }
    }
}

/// Which carrier counts qualify as a k-ton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KtonMode {
    /// Exactly `k` carriers.
    #[default]
    Exact,
    /// Between 1 and `k` carriers.
    AtMost,
}

impl KtonMode {
    #[inline]
    pub fn matches(self, carriers: u32, k: u32) -> bool {
        match self {
            KtonMode::Exact => carriers == k,
            KtonMode::AtMost => carriers >= 1 && carriers <= k,
        }
    }
}

/// Dense individual-by-variant matrix for one population, stored row-major.
///
/// Columns are variant labels in order of appearance; column `l` of two
/// matrices drawn jointly refers to the same variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenotypeMatrix {
    population: u32,
    ploidy: Ploidy,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl GenotypeMatrix {
    pub fn new(population: u32, ploidy: Ploidy, rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch("entry count differs from rows * cols"));
        }
        if entries.iter().any(|&e| e > ploidy.max_entry()) {
            return Err(Error::ShapeMismatch("entry outside the ploidy alphabet"));
        }
        Ok(GenotypeMatrix {
            population,
            ploidy,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(population: u32, ploidy: Ploidy, rows: usize, cols: usize) -> Self {
        GenotypeMatrix {
            population,
            ploidy,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(population: u32, ploidy: Ploidy, rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows"));
        }
        let entries = rows.iter().flatten().copied().collect();
        GenotypeMatrix::new(population, ploidy, rows.len(), cols, entries)
    }

    pub fn population(&self) -> u32 {
        self.population
    }

    pub fn ploidy(&self) -> Ploidy {
        self.ploidy
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(value <= self.ploidy.max_entry());
        self.entries[row * self.cols + col] = value;
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u8] {
        &mut self.entries
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Carrier count of every column under `rule`.
    pub fn carrier_counts(&self, rule: CarrierRule) -> Vec<u32> {
        let mut counts = vec![0u32; self.cols];
        for r in 0..self.rows {
            for (c, &e) in self.row(r).iter().enumerate() {
                counts[c] += rule.weight(e);
            }
        }
        counts
    }

    /// Same matrix with rows reordered: row `i` of the result is row
    /// `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rows {
            return Err(Error::ShapeMismatch("permutation length differs from row count"));
        }
        let mut seen = vec![false; self.rows];
        let mut entries = Vec::with_capacity(self.entries.len());
        for &r in order {
            if r >= self.rows || seen[r] {
                return Err(Error::ShapeMismatch("not a permutation"));
            }
            seen[r] = true;
            entries.extend_from_slice(self.row(r));
        }
        Ok(GenotypeMatrix {
            entries,
            ..self.clone()
        })
    }
}

/// Number of columns whose carrier count qualifies as a k-ton.
pub fn count_ktons(m: &GenotypeMatrix, k: u32, mode: KtonMode, rule: CarrierRule) -> u64 {
    m.carrier_counts(rule)
        .into_iter()
        .filter(|&c| mode.matches(c, k))
        .count() as u64
}

/// k-tons of `target` that no individual in `others` carries.
pub fn count_exclusive_ktons(
    target: &GenotypeMatrix,
    others: &[&GenotypeMatrix],
    k: u32,
    mode: KtonMode,
    rule: CarrierRule,
) -> Result<u64> {
    if others.iter().any(|o| o.cols() != target.cols()) {
        return Err(Error::ShapeMismatch("matrices do not share a column space"));
    }
    let mut shared = vec![false; target.cols()];
    for o in others {
        for r in 0..o.rows() {
            for (c, &e) in o.row(r).iter().enumerate() {
                shared[c] |= e > 0;
            }
        }
    }
    Ok(target
        .carrier_counts(rule)
        .into_iter()
        .zip(shared)
        .filter(|&(c, s)| !s && mode.matches(c, k))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample() -> GenotypeMatrix {
        GenotypeMatrix::from_rows(
            0,
            Ploidy::Diploid,
            &[vec![1, 0, 2, 0], vec![0, 0, 1, 0], vec![0, 1, 0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(GenotypeMatrix::new(0, Ploidy::Binary, 1, 2, vec![0, 2]).is_err());
        assert!(GenotypeMatrix::new(0, Ploidy::Binary, 2, 2, vec![0, 1]).is_err());
    }

    #[test]
    fn kton_counts() {
        let m = sample();
        assert_eq!(m.carrier_counts(CarrierRule::AnyNonzero), vec![1, 1, 2, 0]);
        assert_eq!(m.carrier_counts(CarrierRule::AlleleCount), vec![1, 1, 3, 0]);
        assert_eq!(count_ktons(&m, 1, KtonMode::Exact, CarrierRule::AnyNonzero), 2);
        assert_eq!(count_ktons(&m, 2, KtonMode::AtMost, CarrierRule::AnyNonzero), 3);
        assert_eq!(count_ktons(&m, 2, KtonMode::Exact, CarrierRule::AlleleCount), 0);
        let z = GenotypeMatrix::zeros(0, Ploidy::Binary, 4, 5);
        assert_eq!(count_ktons(&z, 1, KtonMode::AtMost, CarrierRule::AnyNonzero), 0);
    }

    #[test]
    fn exclusive_counts() {
        let m = sample();
        let other = GenotypeMatrix::from_rows(1, Ploidy::Diploid, &[vec![0, 1, 0, 0]]).unwrap();
        assert_eq!(
            count_exclusive_ktons(&m, &[], 1, KtonMode::Exact, CarrierRule::AnyNonzero).unwrap(),
            count_ktons(&m, 1, KtonMode::Exact, CarrierRule::AnyNonzero)
        );
        assert_eq!(
            count_exclusive_ktons(&m, &[&other], 1, KtonMode::Exact, CarrierRule::AnyNonzero).unwrap(),
            1
        );
        assert_eq!(
            count_exclusive_ktons(&m, &[&m], 1, KtonMode::AtMost, CarrierRule::AnyNonzero).unwrap(),
            0
        );
        let narrow = GenotypeMatrix::zeros(1, Ploidy::Diploid, 1, 3);
        assert!(count_exclusive_ktons(&m, &[&narrow], 1, KtonMode::Exact, CarrierRule::AnyNonzero).is_err());
    }

    #[test]
    fn permutation_preserves_counts() {
        let m = sample();
        let p = m.permute_rows(&[2, 0, 1]).unwrap();
        assert_eq!(p.row(0), m.row(2));
        assert_eq!(
            p.carrier_counts(CarrierRule::AlleleCount),
            m.carrier_counts(CarrierRule::AlleleCount)
        );
        assert!(m.permute_rows(&[0, 0, 1]).is_err());
    }
}
