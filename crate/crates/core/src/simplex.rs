//! Interior probability distributions, partitions of `{1, ..., n}`,
//! coarsening and the l1 distance.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, Scalar};

/// Smallest admissible probability mass.
pub const INTERIOR_FLOOR: f64 = 1e-12;
/// Sums within this distance of 1 are accepted as is.
pub const SUM_EXACT_TOL: f64 = 1e-12;
/// Sums within this distance of 1 are renormalized; further off is an error.
pub const SUM_RENORM_TOL: f64 = 1e-9;

/// A point of the open simplex: strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Distribution<T> {
    /// Validates `values` as an interior distribution, renormalizing sums
    /// that are off by more than `1e-12` but at most `1e-9`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape {
                expected: 1,
                got: 0,
            });
        }
        let floor = T::lit(INTERIOR_FLOOR);
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > floor)) {
            return Err(Error::Boundary(format!(
                "entry {} = {v} is not above the interior floor {INTERIOR_FLOOR:e}",
                i + 1
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Boundary(
                "distribution entries must be finite".into(),
            ));
        }
        let sum = kahan_sum(values.iter().copied());
        let off = (sum - T::one()).abs();
        if off > T::lit(SUM_RENORM_TOL) {
            return Err(Error::Normalization {
                sum: sum.to_f64_lossy(),
            });
        }
        let weights = if off > T::lit(SUM_EXACT_TOL) {
            values.into_iter().map(|v| v / sum).collect()
        } else {
            values
        };
        Ok(Self { weights })
    }

    /// Normalizes arbitrary positive weights, then lifts entries below the
    /// interior floor to the floor and renormalizes.
    pub fn from_unnormalized(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Boundary(
                "weights must be non-negative and finite".into(),
            ));
        }
        let sum = kahan_sum(values.iter().copied());
        if !(sum > T::zero()) {
            return Err(Error::Normalization {
                sum: sum.to_f64_lossy(),
            });
        }
        let floor = T::lit(INTERIOR_FLOOR) * T::lit(2.0);
        let lifted: Vec<T> = values.iter().map(|&v| (v / sum).max(floor)).collect();
        let total = kahan_sum(lifted.iter().copied());
        Self::new(lifted.into_iter().map(|v| v / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let w = T::one()
            / T::from_usize(n).ok_or(Error::Shape {
                expected: 1,
                got: 0,
            })?;
        Self::new(vec![w; n])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn into_weights(self) -> Vec<T> {
        self.weights
    }

    /// Pushforward under the partition map: block `j` receives the mass of
    /// the indices in `A_j`.
    pub fn coarsen(&self, partition: &Partition) -> Result<Self> {
        let n = self.len();
        let mut out = Vec::with_capacity(partition.blocks().len());
        for block in partition.blocks() {
            if let Some(&i) = block.iter().find(|&&i| i >= n) {
                return Err(Error::Index(format!(
                    "block index {} exceeds distribution length {n}",
                    i + 1
                )));
            }
            out.push(kahan_sum(block.iter().map(|&i| self.weights[i])));
        }
        if partition.n() != n {
            return Err(Error::Index(format!(
                "partition covers {} indices, distribution has {n}",
                partition.n()
            )));
        }
        Ok(Self { weights: out })
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        check_len(self, other)?;
        let w = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| lambda * a + (T::one() - lambda) * b)
            .collect();
        Self::from_unnormalized(w)
    }
}

pub(crate) fn check_len<T>(p: &Distribution<T>, q: &Distribution<T>) -> Result<()> {
    if p.weights.len() != q.weights.len() {
        Err(Error::Shape {
            expected: p.weights.len(),
            got: q.weights.len(),
        })
    } else {
        Ok(())
    }
}

pub fn make_distribution<T: Scalar>(values: Vec<T>) -> Result<Distribution<T>> {
    Distribution::new(values)
}

pub fn coarsen<T: Scalar>(p: &Distribution<T>, partition: &Partition) -> Result<Distribution<T>> {
    p.coarsen(partition)
}

/// `sum_i |p_i - q_i|`.
pub fn l1_distance<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    check_len(p, q)?;
    Ok(kahan_sum(
        p.weights
            .iter()
            .zip(&q.weights)
            .map(|(&a, &b)| (a - b).abs()),
    ))
}

/// `{i : p_i >= q_i}` and `{i : p_i < q_i}`; a single block when the second
/// set is empty. Ties go to the first block.
pub fn binary_split<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> Result<Partition> {
    check_len(p, q)?;
    let (ge, lt): (Vec<usize>, Vec<usize>) =
        (0..p.len()).partition(|&i| p.weights[i] >= q.weights[i]);
    let blocks = if lt.is_empty() {
        vec![ge]
    } else if ge.is_empty() {
        vec![lt]
    } else {
        vec![ge, lt]
    };
    Partition::new(blocks, p.len())
}

/// A partition of `{0, ..., n-1}` into non-empty, pairwise disjoint blocks.
/// The textual form is 1-based: `1,2;3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Index("partition blocks must be non-empty".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::Index(format!(
                        "index {} is out of range 1..={n}",
                        i + 1
                    )));
                }
                if seen[i] {
                    return Err(Error::Index(format!(
                        "index {} appears in two blocks",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Index(format!("index {} is not covered", i + 1)));
        }
        Ok(Self { blocks, n })
    }

    /// `{{1}, ..., {n}}`.
    pub fn identity(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|i| vec![i]).collect(),
            n,
        }
    }

    /// Builds a partition from a block label per index (labels need not be
    /// contiguous). Blocks are ordered by first occurrence.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match order.iter().position(|&o| o == l) {
                Some(b) => blocks[b].push(i),
                None => {
                    order.push(l);
                    blocks.push(vec![i]);
                }
            }
        }
        Self {
            blocks,
            n: labels.len(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.len() == self.n
    }

    /// 1-based blocks, for reports.
    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Every partition of an `n`-set, in lexicographic order of restricted
    /// growth strings (Bell(n) items).
    pub fn enumerate(n: usize) -> SetPartitions {
        SetPartitions {
            rgs: vec![0; n],
            done: n == 0,
        }
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses semicolon-separated 1-based index groups; `n` is the largest
    /// index mentioned.
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for group in s.split(';') {
            let block = group
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1)
                        .map(|i| i - 1)
                        .ok_or_else(|| Error::Usage(format!("bad partition index `{t}` in `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let n = blocks.iter().flatten().max().map_or(0, |m| m + 1);
        Self::new(blocks, n)
    }
}

/// Iterator over all set partitions via restricted growth strings.
pub struct SetPartitions {
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let item = Partition::from_labels(&self.rgs);
        // Advance: rightmost position that can grow (a[i] <= max(a[..i])).
        let n = self.rgs.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.rgs[i - 1]);
        }
        let mut advanced = false;
        for i in (1..n).rev() {
            if self.rgs[i] <= prefix_max[i] {
                self.rgs[i] += 1;
                for r in &mut self.rgs[i + 1..] {
                    *r = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(item)
    }
}
