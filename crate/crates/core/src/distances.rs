//! Pluggable profile distances: `l1`, `l2` and the Huber compromise.

use crate::error::{Error, Result};

/// Huber radius used by the benchmarked `lloyd-huber` method when none is
/// given explicitly.
pub const DEFAULT_HUBER_RADIUS: f64 = 0.05;

/// Distance selector for the profile-matching algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceKind {
    L1,
    L2,
    /// Huber distance with radius `r > 0`: quadratic within `r`, linear
    /// beyond, continuously differentiable at the seam.
    Huber(f64),
}

impl DistanceKind {
    pub fn huber(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidInput(format!(
                "huber radius must be positive, got {r}"
            )));
        }
        Ok(Self::Huber(r))
    }

    /// Parses the CLI spelling: `l1`, `l2` or `huber:<r>` (bare `huber`
    /// takes the default radius).
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            "huber" => Self::huber(DEFAULT_HUBER_RADIUS),
            _ => {
                if let Some(r) = s.strip_prefix("huber:") {
                    let r: f64 = r
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid huber radius {r:?}")))?;
                    Self::huber(r)
                } else {
                    Err(Error::UnsupportedDistance(s.to_string()))
                }
            }
        }
    }
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::L1 => write!(f, "l1"),
            Self::L2 => write!(f, "l2"),
            Self::Huber(r) => write!(f, "huber:{r}"),
        }
    }
}

#[inline]
fn huber_term(u: f64, r: f64) -> f64 {
    let a = u.abs();
    if a <= r {
        0.5 * u * u
    } else {
        r * a - 0.5 * r * r
    }
}

/// Distance between two equal-length vectors under the chosen kind.
pub fn distance(x: &[f64], y: &[f64], kind: DistanceKind) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(distance_unchecked(x, y, kind))
}

/// Same as [`distance`] without the length check; used on hot paths where
/// dimensions are guaranteed by construction.
#[inline]
pub(crate) fn distance_unchecked(x: &[f64], y: &[f64], kind: DistanceKind) -> f64 {
    match kind {
        DistanceKind::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        DistanceKind::L2 => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        DistanceKind::Huber(r) => x.iter().zip(y).map(|(a, b)| huber_term(a - b, r)).sum(),
    }
}
