//! Moment and truncated-correlator tables over a finite label alphabet, and
//! the set-partition recursions converting between them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::{map_indices, Parallelism};
use crate::partition::{enumerate_partitions, SetPartition, MAX_ORDER};
use crate::{Error, Result};

/// Order-1 entries must vanish to this modulus.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Dense storage of values `W(i_1, …, i_k)` for `k = 1..=order`.
/// Index sequences are encoded base `labels`, first index most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    labels: usize,
    entries: Vec<Vec<Option<Complex64>>>,
}

impl CorrelatorTable {
    /// An empty table of the given alphabet size and maximal order.
    pub fn new(labels: usize, order: usize) -> Self {
        let entries = (1..=order).map(|k| vec![None; labels.pow(k as u32)]).collect();
        CorrelatorTable { labels, entries }
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn encode(&self, seq: &[usize]) -> usize {
        seq.iter().fold(0, |acc, &i| acc * self.labels + i)
    }

    pub fn decode(&self, k: usize, mut code: usize) -> Vec<usize> {
        let mut seq = vec![0; k];
        for slot in seq.iter_mut().rev() {
            *slot = code % self.labels;
            code /= self.labels;
        }
        seq
    }

    pub fn get(&self, seq: &[usize]) -> Option<Complex64> {
        let k = seq.len();
        if k == 0 || k > self.order() {
            return None;
        }
        self.entries[k - 1][self.encode(seq)]
    }

    pub fn set(&mut self, seq: &[usize], value: Complex64) {
        let code = self.encode(seq);
        self.entries[seq.len() - 1][code] = Some(value);
    }

    /// Entries of order `k`, indexed by code.
    pub fn order_entries(&self, k: usize) -> &[Option<Complex64>] {
        &self.entries[k - 1]
    }

    fn require_complete(&self, l: usize) -> Result<()> {
        if l > MAX_ORDER {
            return Err(Error::OrderTooLarge(l));
        }
        if l > self.order() {
            return Err(Error::IncompleteTable { order: l, index: Vec::new() });
        }
        for k in 1..=l {
            if let Some(code) = self.entries[k - 1].iter().position(Option::is_none) {
                return Err(Error::IncompleteTable { order: k, index: self.decode(k, code) });
            }
        }
        for (i, v) in self.entries[0].iter().enumerate() {
            let modulus = v.map_or(0.0, |z| z.norm());
            if modulus > NORMALIZATION_TOL {
                return Err(Error::Normalization { index: i, modulus });
            }
        }
        Ok(())
    }

    /// Largest entrywise modulus difference over orders `1..=l`.
    pub fn max_abs_diff(&self, other: &CorrelatorTable, l: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=l.min(self.order()).min(other.order()) {
            for (a, b) in self.entries[k - 1].iter().zip(&other.entries[k - 1]) {
                if let (Some(a), Some(b)) = (a, b) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
        worst
    }
}

/// Ordinary correlators `ω(A_{i_1} ⋯ A_{i_k})` of a normalized state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable(pub CorrelatorTable);

/// Truncated correlators `ω^T(A_{i_1}, …, A_{i_k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTable(pub CorrelatorTable);

/// Product over the blocks of `partition` of the table value on the
/// sub-sequence picked out by each block, keeping the original order.
fn block_product(table: &CorrelatorTable, seq: &[usize], partition: &[Vec<usize>]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut sub = Vec::with_capacity(seq.len());
    for block in partition {
        sub.clear();
        sub.extend(block.iter().map(|&p| seq[p]));
        acc *= table.get(&sub).expect("checked complete");
    }
    acc
}

/// `W(seq) = Σ_π Π_{B∈π} W^T(seq|_B)` for every sequence of length `<= l`.
pub fn moments_from_cumulants(ct: &CumulantTable, l: usize, mode: Parallelism) -> Result<MomentTable> {
    let table = &ct.0;
    table.require_complete(l)?;
    let mut out = CorrelatorTable::new(table.labels(), l);
    for k in 1..=l {
        let partitions: Vec<Vec<Vec<usize>>> =
            enumerate_partitions(k)?.into_iter().map(|p| p.blocks().to_vec()).collect();
        let size = table.labels().pow(k as u32);
        let values = map_indices(mode, size, |code| {
            let seq = table.decode(k, code);
            partitions.iter().map(|p| block_product(table, &seq, p)).sum::<Complex64>()
        });
        out.entries[k - 1] = values.into_iter().map(Some).collect();
    }
    Ok(MomentTable(out))
}

/// Inverse recursion: `W^T(seq) = W(seq) - Σ_{π ≠ {all}} Π_B W^T(seq|_B)`,
/// filled in increasing order.
pub fn cumulants_from_moments(mt: &MomentTable, l: usize, mode: Parallelism) -> Result<CumulantTable> {
    let table = &mt.0;
    table.require_complete(l)?;
    let mut out = CorrelatorTable::new(table.labels(), l);
    for k in 1..=l {
        let partitions: Vec<Vec<Vec<usize>>> = enumerate_partitions(k)?
            .into_iter()
            .filter(|p| p.blocks().len() > 1)
            .map(|p| p.blocks().to_vec())
            .collect();
        let size = table.labels().pow(k as u32);
        let done = &out;
        let values = map_indices(mode, size, |code| {
            let seq = table.decode(k, code);
            let full = table.get(&seq).expect("checked complete");
            full - partitions.iter().map(|p| block_product(done, &seq, p)).sum::<Complex64>()
        });
        out.entries[k - 1] = values.into_iter().map(Some).collect();
    }
    Ok(CumulantTable(out))
}

/// Quasi-free (Gaussian) cumulant table with the given two-point matrix:
/// all truncated correlators except those of order 2 vanish.
pub fn gaussian_cumulants(two_point: &[Vec<Complex64>], order: usize) -> CumulantTable {
    let m = two_point.len();
    let mut table = CorrelatorTable::new(m, order);
    for k in 1..=order {
        for code in 0..m.pow(k as u32) {
            let seq = table.decode(k, code);
            let v = if k == 2 { two_point[seq[0]][seq[1]] } else { Complex64::new(0.0, 0.0) };
            table.entries[k - 1][code] = Some(v);
        }
    }
    CumulantTable(table)
}

/// Sum over perfect matchings of `Π C[seq[a]][seq[b]]`, pairs taken with
/// their original order `a < b`.
pub fn pairing_sum(c: &[Vec<Complex64>], seq: &[usize]) -> Complex64 {
    if seq.len() % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut free: Vec<usize> = seq.to_vec();
    pairing_sum_rec(c, &mut free)
}

fn pairing_sum_rec(c: &[Vec<Complex64>], free: &mut Vec<usize>) -> Complex64 {
    if free.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let first = free.remove(0);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..free.len() {
        let partner = free.remove(k);
        let w = c[first][partner];
        if w != Complex64::new(0.0, 0.0) {
            total += w * pairing_sum_rec(c, free);
        }
        free.insert(k, partner);
    }
    free.insert(0, first);
    total
}

/// Number of partitions contributing to an order-`l` entry, for reporting.
pub fn contributing_partitions(l: usize) -> Result<Vec<SetPartition>> {
    enumerate_partitions(l)
}
