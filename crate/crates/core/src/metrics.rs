//! Pairwise disagreement functionals between two labelings.
//!
//! Both are computed from the cross-tabulation in `O(N + K^2)`; a direct
//! `O(N^2)` pair scan lives in the tests as a cross-check.

use crate::error::{Error, Result};
use crate::graph::{class_sizes, cross_counts, LabelVector};

fn check_pair(z: &LabelVector, z2: &LabelVector) -> Result<usize> {
    if z.len() != z2.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            z.len(),
            z2.len()
        )));
    }
    if z.k() != z2.k() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have class counts {} and {}",
            z.k(),
            z2.k()
        )));
    }
    if z.k() < 2 {
        return Err(Error::InvalidInput(
            "disagreement metrics need at least two classes".into(),
        ));
    }
    Ok(z.k())
}

fn sum_sq(sizes: &[usize]) -> f64 {
    sizes.iter().map(|&s| (s * s) as f64).sum()
}

/// Fraction (suitably normalized) of ordered node pairs co-clustered by `z`
/// but split by `z2`. Asymmetric in its arguments.
pub fn delta_mismatch(z: &LabelVector, z2: &LabelVector) -> Result<f64> {
    let k = check_pair(z, z2)?;
    let n = z.len();
    if n == 0 {
        return Ok(0.0);
    }
    let cross = cross_counts(z, z2)?;
    let same_z = sum_sq(&class_sizes(z));
    let same_both: f64 = cross.counts().iter().map(|&c| (c * c) as f64).sum();
    let split = same_z - same_both;
    Ok(k as f64 / ((n * n) as f64 * (k as f64 - 1.0)) * split)
}

/// Symmetrized disagreement: zero exactly when the two labelings agree up to
/// an injective relabeling. This is the headline estimation-quality score.
pub fn gamma(z: &LabelVector, z2: &LabelVector) -> Result<f64> {
    Ok(0.5 * (delta_mismatch(z, z2)? + delta_mismatch(z2, z)?))
}

/// Literal form with the second indicator negated, kept for audit; note
/// `gamma_raw(z, z) = K / (2(K-1))`, not zero.
pub fn gamma_raw(z: &LabelVector, z2: &LabelVector) -> Result<f64> {
    let k = check_pair(z, z2)?;
    let n = z.len();
    if n == 0 {
        return Ok(0.0);
    }
    let cross = cross_counts(z, z2)?;
    let same_z = sum_sq(&class_sizes(z));
    let same_z2 = sum_sq(&class_sizes(z2));
    let same_both: f64 = cross.counts().iter().map(|&c| (c * c) as f64).sum();
    let diff_both = (n * n) as f64 - same_z - same_z2 + same_both;
    Ok(k as f64 / (2.0 * (n * n) as f64 * (k as f64 - 1.0)) * (same_both + diff_both))
}
