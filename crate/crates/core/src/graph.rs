//! Graph and labeling primitives shared by every estimator and algorithm.
//!
//! A [`WeightedDigraph`] is a dense `N x N` matrix of edge weights in
//! `[0, 1]` (self-loops included). A [`LabelVector`] assigns every node a
//! class label in `1..=K`; empty classes are legal, which matters while the
//! iterative algorithms shuffle nodes around.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense weighted directed graph on `n` nodes, weights in `[0, 1]`.
///
/// Node indices are 0-based throughout the in-process API; the text file
/// format and label files are the only 1-based surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedDigraph {
    /// Builds a graph from a row-major weight matrix.
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n} = {} weights, got {}",
                n * n,
                weights.len()
            )));
        }
        for (idx, &w) in weights.iter().enumerate() {
            if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidInput(format!(
                    "weight at ({}, {}) is {w}, expected a finite value in [0, 1]",
                    idx / n,
                    idx % n
                )));
            }
        }
        Ok(Self { n, weights })
    }

    /// Builds a graph by evaluating `f(i, j)` for every ordered pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                weights.push(f(i, j));
            }
        }
        Self::new(n, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Reads the dense text format: a first line holding `N`, then `N` lines
    /// of `N` whitespace-separated weights.
    pub fn read_from(reader: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))??;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid node count line {header:?}")))?;
        let mut weights = Vec::with_capacity(n * n);
        for line in lines {
            let line = line?;
            for tok in line.split_whitespace() {
                let w: f64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid weight {tok:?}")))?;
                weights.push(w);
            }
        }
        Self::new(n, weights)
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    /// Writes the dense text format used by [`Self::read_from`].
    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "{}", self.n).expect("write to string");
        for i in 0..self.n {
            let row = self.row(i);
            for (j, w) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{w}").expect("write to string");
            }
            out.push('\n');
        }
        writer.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }
}

/// Assignment of `N` nodes into classes labeled `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    /// `labels` holds 1-based class labels; every entry must lie in `1..=k`.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("class count k must be positive".into()));
        }
        for (i, &z) in labels.iter().enumerate() {
            if z == 0 || z > k {
                return Err(Error::InvalidInput(format!(
                    "label {z} at node {i} outside 1..={k}"
                )));
            }
        }
        Ok(Self { labels, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 1-based label of node `i`.
    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// 0-based class index of node `i`.
    #[inline]
    pub fn class(&self, i: usize) -> usize {
        self.labels[i] - 1
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of distinct labels actually used.
    pub fn labels_used(&self) -> usize {
        let mut seen = vec![false; self.k];
        let mut count = 0;
        for &z in &self.labels {
            if !seen[z - 1] {
                seen[z - 1] = true;
                count += 1;
            }
        }
        count
    }

    /// True when every label `1..=k` occurs at least once.
    pub fn is_surjective(&self) -> bool {
        self.labels_used() == self.k
    }

    /// Canonical form under injective relabeling: classes renumbered in
    /// first-appearance order. Two vectors are equal up to relabeling iff
    /// their canonical forms are identical.
    pub fn canonical(&self) -> Vec<usize> {
        let mut map = vec![0usize; self.k];
        let mut next = 0usize;
        let mut out = Vec::with_capacity(self.labels.len());
        for &z in &self.labels {
            if map[z - 1] == 0 {
                next += 1;
                map[z - 1] = next;
            }
            out.push(map[z - 1]);
        }
        out
    }

    /// Reads one 1-based integer label per line; `k` is taken as the maximum
    /// label unless a larger `k_min` is supplied.
    pub fn read_from(reader: impl Read, k_min: usize) -> Result<Self> {
        let mut labels = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let z: usize = t
                .parse()
                .map_err(|_| Error::Parse(format!("invalid label {t:?}")))?;
            labels.push(z);
        }
        let k = labels.iter().copied().max().unwrap_or(0).max(k_min).max(1);
        Self::new(labels, k)
    }

    pub fn read_path(path: impl AsRef<Path>, k_min: usize) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?, k_min)
    }

    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        let mut out = String::new();
        for &z in &self.labels {
            writeln!(out, "{z}").expect("write to string");
        }
        writer.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }
}

/// Per-class index sets `I_p` and sizes `N_p` of a labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    index_sets: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl ClassPartition {
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// 0-based node indices of class `p` (0-based class index).
    pub fn index_set(&self, p: usize) -> &[usize] {
        &self.index_sets[p]
    }

    pub fn size(&self, p: usize) -> usize {
        self.sizes[p]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// Splits a labeling into its class index sets and sizes.
pub fn partition(z: &LabelVector) -> ClassPartition {
    let mut index_sets = vec![Vec::new(); z.k()];
    for (i, &label) in z.labels().iter().enumerate() {
        index_sets[label - 1].push(i);
    }
    let sizes = index_sets.iter().map(Vec::len).collect();
    ClassPartition { index_sets, sizes }
}

/// Per-class sizes without materializing the index sets.
pub fn class_sizes(z: &LabelVector) -> Vec<usize> {
    let mut sizes = vec![0usize; z.k()];
    for &label in z.labels() {
        sizes[label - 1] += 1;
    }
    sizes
}

/// Cross-tabulation of two labelings: entry `(p, q)` counts nodes with label
/// `p+1` under the first and `q+1` under the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCounts {
    rows: usize,
    cols: usize,
    counts: Vec<usize>,
}

impl CrossCounts {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn count(&self, p: usize, q: usize) -> usize {
        self.counts[p * self.cols + q]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Cross-tabulates `z` against `z_star`; errors on length mismatch.
pub fn cross_counts(z: &LabelVector, z_star: &LabelVector) -> Result<CrossCounts> {
    if z.len() != z_star.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            z.len(),
            z_star.len()
        )));
    }
    let (rows, cols) = (z.k(), z_star.k());
    let mut counts = vec![0usize; rows * cols];
    for i in 0..z.len() {
        counts[z.class(i) * cols + z_star.class(i)] += 1;
    }
    Ok(CrossCounts { rows, cols, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(labels: &[usize], k: usize) -> LabelVector {
        LabelVector::new(labels.to_vec(), k).unwrap()
    }

    #[test]
    fn partition_basic() {
        let part = partition(&lv(&[1, 1, 2], 2));
        assert_eq!(part.index_set(0), &[0, 1]);
        assert_eq!(part.index_set(1), &[2]);
        assert_eq!(part.sizes(), &[2, 1]);
    }

    #[test]
    fn partition_empty_class() {
        let part = partition(&lv(&[1, 1], 2));
        assert!(part.index_set(1).is_empty());
        assert_eq!(part.size(1), 0);
    }

    #[test]
    fn partition_three_classes() {
        let part = partition(&lv(&[1, 2, 3, 1], 3));
        assert_eq!(part.sizes(), &[2, 1, 1]);
        assert_eq!(part.sizes().iter().sum::<usize>(), 4);
    }

    #[test]
    fn partition_relabeling_permutes_index_sets() {
        // tau = (1 2) swap applied to labels permutes the index sets.
        let z = lv(&[1, 2, 1, 2, 2], 2);
        let swapped = lv(&[2, 1, 2, 1, 1], 2);
        let a = partition(&z);
        let b = partition(&swapped);
        assert_eq!(a.index_set(0), b.index_set(1));
        assert_eq!(a.index_set(1), b.index_set(0));
    }

    #[test]
    fn cross_counts_identity() {
        let z = lv(&[1, 2], 2);
        let c = cross_counts(&z, &z).unwrap();
        assert_eq!(c.counts(), &[1, 0, 0, 1]);
    }

    #[test]
    fn cross_counts_balanced_split() {
        let z = lv(&[1, 1, 2, 2], 2);
        let z2 = lv(&[1, 2, 1, 2], 2);
        let c = cross_counts(&z, &z2).unwrap();
        assert_eq!(c.counts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn cross_counts_off_diagonal() {
        let z = lv(&[1, 1, 1], 2);
        let z2 = lv(&[2, 2, 2], 2);
        let c = cross_counts(&z, &z2).unwrap();
        assert_eq!(c.counts(), &[0, 3, 0, 0]);
    }

    #[test]
    fn cross_counts_diagonal_equals_class_sizes() {
        let z = lv(&[1, 3, 2, 3, 3, 1], 3);
        let c = cross_counts(&z, &z).unwrap();
        let part = partition(&z);
        for p in 0..3 {
            for q in 0..3 {
                let expect = if p == q { part.size(p) } else { 0 };
                assert_eq!(c.count(p, q), expect);
            }
        }
    }

    #[test]
    fn cross_counts_marginals() {
        let z = lv(&[1, 2, 1, 2, 1], 2);
        let z2 = lv(&[2, 2, 1, 1, 1], 2);
        let c = cross_counts(&z, &z2).unwrap();
        assert_eq!(c.total(), 5);
        let pz = partition(&z);
        let pz2 = partition(&z2);
        for p in 0..2 {
            let row: usize = (0..2).map(|q| c.count(p, q)).sum();
            assert_eq!(row, pz.size(p));
        }
        for q in 0..2 {
            let col: usize = (0..2).map(|p| c.count(p, q)).sum();
            assert_eq!(col, pz2.size(q));
        }
    }

    #[test]
    fn cross_counts_length_mismatch() {
        let z = lv(&[1, 2], 2);
        let z2 = lv(&[1, 2, 1], 2);
        assert!(cross_counts(&z, &z2).is_err());
    }

    #[test]
    fn graph_rejects_bad_weights() {
        assert!(WeightedDigraph::new(2, vec![0.0, 0.5, 1.5, 1.0]).is_err());
        assert!(WeightedDigraph::new(2, vec![0.0, 0.5, f64::NAN, 1.0]).is_err());
        assert!(WeightedDigraph::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn graph_file_round_trip() {
        let g =
            WeightedDigraph::new(3, vec![0.0, 0.5, 1.0, 0.25, 0.0, 0.125, 1.0, 0.0, 0.75]).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        let back = WeightedDigraph::read_from(&buf[..]).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn labels_file_round_trip() {
        let z = lv(&[1, 3, 2, 2], 3);
        let mut buf = Vec::new();
        z.write_to(&mut buf).unwrap();
        let back = LabelVector::read_from(&buf[..], 0).unwrap();
        assert_eq!(z, back);
    }

    #[test]
    fn canonical_first_appearance() {
        assert_eq!(lv(&[2, 2, 1, 3], 3).canonical(), vec![1, 1, 2, 3]);
        assert_eq!(lv(&[3, 1, 3], 3).canonical(), vec![1, 2, 1]);
    }

    #[test]
    fn label_vector_rejects_out_of_range() {
        assert!(LabelVector::new(vec![1, 0], 2).is_err());
        assert!(LabelVector::new(vec![1, 3], 2).is_err());
    }
}
