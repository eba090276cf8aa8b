//! Bernoulli log-likelihood of a labeled graph and its per-node score
//! decomposition.
//!
//! The full log-likelihood splits into one score per node, in three
//! algebraically equivalent flavors: outgoing edges only, incoming edges
//! only, or their average. The average is the variant the likelihood-driven
//! iteration uses, because either one-sided score is blind to classes that
//! differ only in the other direction.

use crate::error::{Error, Result};
use crate::estimators::{block_means, BlockMatrix};
use crate::graph::{LabelVector, WeightedDigraph};

/// Probabilities are pushed this far away from {0, 1} before taking logs, so
/// that empirical block matrices with saturated entries keep scores finite
/// and comparable.
pub const PROB_CLAMP_EPS: f64 = 1e-10;

/// Which per-node score decomposition to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreVariant {
    /// Outgoing edges only.
    Forward,
    /// Incoming edges only.
    Backward,
    /// Mean of the two one-sided scores.
    Averaged,
}

impl ScoreVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "forward" | "fwd" => Ok(Self::Forward),
            "backward" | "bwd" => Ok(Self::Backward),
            "averaged" | "avg" => Ok(Self::Averaged),
            _ => Err(Error::Parse(format!("unknown score variant {s:?}"))),
        }
    }
}

impl std::fmt::Display for ScoreVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Forward => write!(f, "forward"),
            Self::Backward => write!(f, "backward"),
            Self::Averaged => write!(f, "averaged"),
        }
    }
}

/// `c * ln(t)` with the exact-zero convention: a zero coefficient kills the
/// term even when `t = 0`.
#[inline]
pub(crate) fn xlg(c: f64, t: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * t.ln()
    }
}

/// Clamps every entry of a block matrix into `[EPS, 1 - EPS]`.
pub fn clamp_probs(p: &BlockMatrix) -> BlockMatrix {
    BlockMatrix::from_fn(p.k(), |i, j| {
        p.get(i, j).clamp(PROB_CLAMP_EPS, 1.0 - PROB_CLAMP_EPS)
    })
    .expect("clamped entries are finite")
}

fn check_dims(x: &WeightedDigraph, z: &LabelVector, p: &BlockMatrix) -> Result<()> {
    if x.n() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes but labeling has {}",
            x.n(),
            z.len()
        )));
    }
    if z.k() > p.k() {
        return Err(Error::DimensionMismatch(format!(
            "labeling uses up to {} classes but block matrix is {}x{}",
            z.k(),
            p.k(),
            p.k()
        )));
    }
    Ok(())
}

/// Log-likelihood of the graph under labeling `z` and edge-probability
/// matrix `p`, summed over all ordered node pairs including self-loops.
///
/// Returns `-inf` exactly when a strictly positive coefficient multiplies a
/// log of zero; zero coefficients never poison the sum.
pub fn bernoulli_loglik(x: &WeightedDigraph, z: &LabelVector, p: &BlockMatrix) -> Result<f64> {
    check_dims(x, z, p)?;
    let n = x.n();
    let mut total = 0.0;
    for i in 0..n {
        let row = x.row(i);
        let pi = z.class(i);
        for (j, &w) in row.iter().enumerate() {
            let t = p.get(pi, z.class(j));
            total += xlg(w, t) + xlg(1.0 - w, 1.0 - t);
        }
    }
    Ok(total)
}

/// Per-node score of assigning node `i` (0-based) to class `class_label`
/// (1-based) given sweep-start labeling `z` and matrix `p`.
pub fn score(
    x: &WeightedDigraph,
    z: &LabelVector,
    p: &BlockMatrix,
    i: usize,
    class_label: usize,
    variant: ScoreVariant,
) -> Result<f64> {
    check_dims(x, z, p)?;
    if i >= x.n() {
        return Err(Error::InvalidInput(format!("node {i} out of range")));
    }
    if class_label == 0 || class_label > p.k() {
        return Err(Error::InvalidInput(format!(
            "class label {class_label} outside 1..={}",
            p.k()
        )));
    }
    let k = z.k();
    let n = x.n();
    let mut sizes = vec![0usize; k];
    let mut out = vec![0.0; k];
    let mut inc = vec![0.0; k];
    for j in 0..n {
        let q = z.class(j);
        sizes[q] += 1;
        out[q] += x.weight(i, j);
        inc[q] += x.weight(j, i);
    }
    let cp = class_label - 1;
    let forward = |out: &[f64]| -> f64 {
        (0..k)
            .map(|q| {
                let t = p.get(cp, q);
                xlg(out[q], t) + xlg(sizes[q] as f64 - out[q], 1.0 - t)
            })
            .sum()
    };
    let backward = |inc: &[f64]| -> f64 {
        (0..k)
            .map(|q| {
                let t = p.get(q, cp);
                xlg(inc[q], t) + xlg(sizes[q] as f64 - inc[q], 1.0 - t)
            })
            .sum()
    };
    Ok(match variant {
        ScoreVariant::Forward => forward(&out),
        ScoreVariant::Backward => backward(&inc),
        ScoreVariant::Averaged => 0.5 * (forward(&out) + backward(&inc)),
    })
}

/// Plug-in log-likelihood: the likelihood of `z` at its own clamped
/// empirical block matrix. The coordinate-ascent baseline maximizes this.
pub fn profile_loglik(x: &WeightedDigraph, z: &LabelVector) -> Result<f64> {
    let p_hat = clamp_probs(&block_means(x, z)?);
    bernoulli_loglik(x, z, &p_hat)
}
