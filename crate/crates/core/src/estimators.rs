//! Empirical block statistics of a labeled graph and their exact expectations.
//!
//! For a labeling `z`, `mu[i][q]` is the mean weight of edges from node `i`
//! into class `q`, `nu[p][j]` the mean weight from class `p` into node `j`,
//! and the block matrix holds the mean weight between ordered class pairs.
//! Classes that are momentarily empty contribute exact zeros instead of
//! errors so the iterative algorithms can walk through drained
//! configurations.

use crate::distances::{distance_unchecked, DistanceKind};
use crate::error::{Error, Result};
use crate::graph::{class_sizes, LabelVector, WeightedDigraph};

/// Square `K x K` matrix of per-block means or probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl BlockMatrix {
    pub fn new(k: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != k * k {
            return Err(Error::DimensionMismatch(format!(
                "expected {k}x{k} entries, got {}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite block entry {e}")));
        }
        Ok(Self { k, entries })
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(k * k);
        for p in 0..k {
            for q in 0..k {
                entries.push(f(p, q));
            }
        }
        Self::new(k, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Entry at 0-based class indices `(p, q)`.
    #[inline]
    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.entries[p * self.k + q]
    }

    #[inline]
    pub fn row(&self, p: usize) -> &[f64] {
        &self.entries[p * self.k..(p + 1) * self.k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// True when all entries lie in `[0, 1]`.
    pub fn is_probability(&self) -> bool {
        self.entries.iter().all(|e| (0.0..=1.0).contains(e))
    }
}

/// Per-node class means: `mu` is `N x K` (outgoing), `nu` is `K x N`
/// (incoming).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMeans {
    n: usize,
    k: usize,
    mu: Vec<f64>,
    nu: Vec<f64>,
}

impl NodeMeans {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Mean weight of edges from node `i` into class `q` (0-based `q`).
    #[inline]
    pub fn mu(&self, i: usize, q: usize) -> f64 {
        self.mu[i * self.k + q]
    }

    /// Mean weight of edges from class `p` (0-based) into node `j`.
    #[inline]
    pub fn nu(&self, p: usize, j: usize) -> f64 {
        self.nu[p * self.n + j]
    }
}

/// Concatenated outgoing/incoming statistics: node rows `pi` (`N x 2K`) and
/// class rows `capital_pi` (`K x 2K`).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    n: usize,
    k: usize,
    pi: Vec<f64>,
    capital_pi: Vec<f64>,
}

impl Profile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 2K-dimensional profile of node `i`.
    #[inline]
    pub fn node_row(&self, i: usize) -> &[f64] {
        &self.pi[i * 2 * self.k..(i + 1) * 2 * self.k]
    }

    /// 2K-dimensional profile of class `p` (0-based).
    #[inline]
    pub fn class_row(&self, p: usize) -> &[f64] {
        &self.capital_pi[p * 2 * self.k..(p + 1) * 2 * self.k]
    }
}

fn check_dims(x: &WeightedDigraph, z: &LabelVector) -> Result<()> {
    if x.n() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes but labeling has {}",
            x.n(),
            z.len()
        )));
    }
    Ok(())
}

/// Raw per-node class sums: `out[i][q] = sum_{j in I_q} X_ij` and
/// `inc[i][q] = sum_{j in I_q} X_ji`, plus class sizes. One pass over the
/// matrix; everything downstream divides these.
pub(crate) struct ClassSums {
    pub sizes: Vec<usize>,
    /// `n x k`, outgoing sums.
    pub out: Vec<f64>,
    /// `n x k`, incoming sums.
    pub inc: Vec<f64>,
}

pub(crate) fn class_sums(x: &WeightedDigraph, z: &LabelVector) -> ClassSums {
    let (n, k) = (x.n(), z.k());
    let sizes = class_sizes(z);
    let mut out = vec![0.0; n * k];
    let mut inc = vec![0.0; n * k];
    for i in 0..n {
        let row = x.row(i);
        let zi = z.class(i);
        let out_row = &mut out[i * k..(i + 1) * k];
        for (j, &w) in row.iter().enumerate() {
            out_row[z.class(j)] += w;
        }
        for (j, &w) in row.iter().enumerate() {
            inc[j * k + zi] += w;
        }
    }
    ClassSums { sizes, out, inc }
}

impl ClassSums {
    pub fn block_sums(&self, z: &LabelVector) -> Vec<f64> {
        let k = self.sizes.len();
        let mut sums = vec![0.0; k * k];
        for i in 0..z.len() {
            let p = z.class(i);
            for q in 0..k {
                sums[p * k + q] += self.out[i * k + q];
            }
        }
        sums
    }
}

/// Mean outgoing (`mu`) and incoming (`nu`) weights of each node toward each
/// class; empty classes yield exact zeros.
pub fn node_means(x: &WeightedDigraph, z: &LabelVector) -> Result<NodeMeans> {
    check_dims(x, z)?;
    let (n, k) = (x.n(), z.k());
    let sums = class_sums(x, z);
    let mut mu = vec![0.0; n * k];
    let mut nu = vec![0.0; k * n];
    for i in 0..n {
        for q in 0..k {
            if sums.sizes[q] > 0 {
                let inv = 1.0 / sums.sizes[q] as f64;
                mu[i * k + q] = sums.out[i * k + q] * inv;
                nu[q * n + i] = sums.inc[i * k + q] * inv;
            }
        }
    }
    Ok(NodeMeans { n, k, mu, nu })
}

/// Mean weight between ordered class pairs; blocks touching an empty class
/// are exact zeros.
pub fn block_means(x: &WeightedDigraph, z: &LabelVector) -> Result<BlockMatrix> {
    check_dims(x, z)?;
    let k = z.k();
    let sums = class_sums(x, z);
    let block = sums.block_sums(z);
    BlockMatrix::from_fn(k, |p, q| {
        let denom = sums.sizes[p] * sums.sizes[q];
        if denom == 0 {
            0.0
        } else {
            block[p * k + q] / denom as f64
        }
    })
}

fn assemble_profiles(means: &NodeMeans, block: &BlockMatrix) -> Profile {
    let (n, k) = (means.n, means.k);
    let mut pi = vec![0.0; n * 2 * k];
    for i in 0..n {
        for q in 0..k {
            pi[i * 2 * k + q] = means.mu(i, q);
            pi[i * 2 * k + k + q] = means.nu(q, i);
        }
    }
    let mut capital_pi = vec![0.0; k * 2 * k];
    for p in 0..k {
        for q in 0..k {
            capital_pi[p * 2 * k + q] = block.get(p, q);
            capital_pi[p * 2 * k + k + q] = block.get(q, p);
        }
    }
    Profile {
        n,
        k,
        pi,
        capital_pi,
    }
}

/// Node and class profiles: the first `K` coordinates are outgoing means,
/// the last `K` incoming means.
pub fn profiles(x: &WeightedDigraph, z: &LabelVector) -> Result<Profile> {
    let means = node_means(x, z)?;
    let block = block_means(x, z)?;
    Ok(assemble_profiles(&means, &block))
}

fn loss_of_profile(prof: &Profile, z: &LabelVector, d: DistanceKind) -> f64 {
    let n = prof.n();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|i| distance_unchecked(prof.node_row(i), prof.class_row(z.class(i)), d))
        .sum();
    total / n as f64
}

/// Mean distance between each node's profile and its class profile; the
/// objective the profile-matching iteration drives down.
pub fn loss(x: &WeightedDigraph, z: &LabelVector, d: DistanceKind) -> Result<f64> {
    let prof = profiles(x, z)?;
    Ok(loss_of_profile(&prof, z, d))
}

/// Identifiability gap: the smallest over unordered class pairs of the
/// largest combined row+column discrepancy. Positive iff every pair of
/// classes is distinguishable by some row or column of the matrix.
pub fn delta_gap(p: &BlockMatrix) -> Result<f64> {
    let k = p.k();
    if k < 2 {
        return Err(Error::InvalidInput(
            "identifiability gap needs at least two classes".into(),
        ));
    }
    let mut min_over_pairs = f64::INFINITY;
    for p1 in 0..k {
        for p2 in (p1 + 1)..k {
            let mut max_over_q = f64::NEG_INFINITY;
            for q in 0..k {
                let v = (p.get(p1, q) - p.get(p2, q)).abs() + (p.get(q, p1) - p.get(q, p2)).abs();
                max_over_q = max_over_q.max(v);
            }
            min_over_pairs = min_over_pairs.min(max_over_q);
        }
    }
    Ok(min_over_pairs)
}

fn check_lengths(z: &LabelVector, z_star: &LabelVector) -> Result<()> {
    if z.len() != z_star.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            z.len(),
            z_star.len()
        )));
    }
    Ok(())
}

/// The graph whose entry `(i, j)` is the expected weight `P*[z*_i, z*_j]`.
/// Running the empirical estimators on it yields their exact expectations
/// under the model, which is what the oracle functions below do.
fn expectation_graph(z_star: &LabelVector, p_star: &BlockMatrix) -> Result<WeightedDigraph> {
    if z_star.k() > p_star.k() {
        return Err(Error::DimensionMismatch(format!(
            "labels use up to {} classes but the block matrix is {}x{}",
            z_star.k(),
            p_star.k(),
            p_star.k()
        )));
    }
    if !p_star.is_probability() {
        return Err(Error::InvalidInput(
            "expected-value oracle requires block entries in [0, 1]".into(),
        ));
    }
    WeightedDigraph::from_fn(z_star.len(), |i, j| p_star.get(z_star.class(i), z_star.class(j)))
}

/// Exact expectation of [`node_means`] for labeling `z` when the graph is
/// drawn with true labels `z_star` and mean matrix `p_star`.
pub fn expected_node_means(
    z: &LabelVector,
    z_star: &LabelVector,
    p_star: &BlockMatrix,
) -> Result<NodeMeans> {
    check_lengths(z, z_star)?;
    node_means(&expectation_graph(z_star, p_star)?, z)
}

/// Exact expectation of [`block_means`] under the same model.
pub fn expected_block_means(
    z: &LabelVector,
    z_star: &LabelVector,
    p_star: &BlockMatrix,
) -> Result<BlockMatrix> {
    check_lengths(z, z_star)?;
    block_means(&expectation_graph(z_star, p_star)?, z)
}

/// Exact expected loss of labeling `z` under the model, defined for the `l1`
/// distance only; other distances are rejected.
pub fn expected_loss(
    z: &LabelVector,
    z_star: &LabelVector,
    p_star: &BlockMatrix,
    d: DistanceKind,
) -> Result<f64> {
    if d != DistanceKind::L1 {
        return Err(Error::UnsupportedDistance(format!(
            "expected loss is defined for l1 only, got {d}"
        )));
    }
    check_lengths(z, z_star)?;
    loss(&expectation_graph(z_star, p_star)?, z, d)
}
