//! Set partitions and perfect matchings of `{0, …, l-1}`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest ground-set size accepted by the enumerators.
pub const MAX_ORDER: usize = 12;

/// A partition of `{0, …, l-1}` into nonempty blocks. Blocks are sorted
/// internally and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from restricted-growth labels (`labels[0] == 0` and
    /// every label at most one more than the running maximum).
    pub fn from_labels(labels: &[usize]) -> Self {
        let count = labels.iter().map(|&b| b + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in labels.iter().enumerate() {
            blocks[b].push(i);
        }
        SetPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Size of the ground set.
    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }
}

fn guard(l: usize) -> Result<()> {
    if l > MAX_ORDER {
        return Err(Error::OrderTooLarge(l));
    }
    Ok(())
}

/// Calls `visit` with the restricted-growth label vector of every partition of
/// `{0, …, l-1}`, in lexicographic order of the labels.
pub fn for_each_partition<F: FnMut(&[usize])>(l: usize, mut visit: F) -> Result<()> {
    guard(l)?;
    if l == 0 {
        visit(&[]);
        return Ok(());
    }
    let mut labels = vec![0usize; l];
    // max_prefix[i] = max(labels[0..i])
    let mut max_prefix = vec![0usize; l];
    loop {
        visit(&labels);
        // rightmost position that can be incremented
        let mut i = l - 1;
        loop {
            if i == 0 {
                return Ok(());
            }
            if labels[i] <= max_prefix[i] {
                break;
            }
            i -= 1;
        }
        labels[i] += 1;
        let m = max_prefix[i].max(labels[i]);
        for j in i + 1..l {
            labels[j] = 0;
            max_prefix[j] = m;
        }
    }
}

/// All set partitions of `{0, …, l-1}`; there are Bell(l) of them.
pub fn enumerate_partitions(l: usize) -> Result<Vec<SetPartition>> {
    let mut out = Vec::new();
    for_each_partition(l, |labels| out.push(SetPartition::from_labels(labels)))?;
    Ok(out)
}

/// All perfect matchings of `{0, …, m-1}`; `(m-1)!!` for even `m`, none for
/// odd `m`, and a single empty pairing for `m = 0`.
pub fn enumerate_pairings(m: usize) -> Result<Vec<SetPartition>> {
    guard(m)?;
    if m % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::with_capacity(m / 2);
    let mut free: Vec<usize> = (0..m).collect();
    pair_up(&mut free, &mut current, &mut out);
    Ok(out)
}

fn pair_up(free: &mut Vec<usize>, current: &mut Vec<Vec<usize>>, out: &mut Vec<SetPartition>) {
    if free.is_empty() {
        out.push(SetPartition { blocks: current.clone() });
        return;
    }
    let first = free.remove(0);
    for k in 0..free.len() {
        let partner = free.remove(k);
        current.push(vec![first, partner]);
        pair_up(free, current, out);
        current.pop();
        free.insert(k, partner);
    }
    free.insert(0, first);
}

/// Bell numbers for `l <= MAX_ORDER`.
pub fn bell(l: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..l {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// `(m-1)!!` for even `m`, zero for odd `m`.
pub fn pairing_count(m: usize) -> u64 {
    if m % 2 == 1 {
        return 0;
    }
    (1..m as u64).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(enumerate_partitions(0).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(1).unwrap().len(), 1);
        assert_eq!(enumerate_pairings(0).unwrap().len(), 1);
        assert!(enumerate_pairings(3).unwrap().is_empty());
        assert_eq!(enumerate_pairings(4).unwrap().len(), 3);
        assert!(matches!(enumerate_partitions(13), Err(Error::OrderTooLarge(13))));
    }

    #[test]
    fn bell_numbers() {
        let expected = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
        for (l, &b) in expected.iter().enumerate() {
            assert_eq!(bell(l), b);
        }
        for l in 0..=8 {
            assert_eq!(enumerate_partitions(l).unwrap().len() as u64, bell(l));
        }
    }

    #[test]
    fn pairings_are_partitions_with_pair_blocks() {
        let filtered: Vec<_> =
            enumerate_partitions(6).unwrap().into_iter().filter(|p| p.is_pairing()).collect();
        let direct = enumerate_pairings(6).unwrap();
        assert_eq!(filtered.len(), 15);
        assert_eq!(direct.len(), 15);
        for p in &direct {
            assert!(filtered.contains(p));
        }
    }
}
