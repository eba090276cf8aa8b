//! Synthetic instance generation for the benchmark protocol: the two 3x3
//! probability-matrix families, heterogeneous label sampling, Bernoulli
//! graph sampling and noisy initial labelings.
//!
//! All randomness flows through seeded ChaCha8 generators. Substreams are
//! derived with [`stream_rng`], which mixes a master seed with a list of
//! salts (grid point, replication, purpose) through SplitMix64, so every
//! (point, replication) pair owns an independent, machine-portable stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::BlockMatrix;
use crate::graph::{LabelVector, WeightedDigraph};

/// The protocol fixes three classes.
pub const PROTOCOL_K: usize = 3;

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 64-bit subseed by folding each salt into the master seed.
pub fn derive_seed(master: u64, salts: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &salt in salts {
        s = splitmix64(s ^ splitmix64(salt));
    }
    s
}

/// Independent, portable generator for the given (master, salts) stream.
pub fn stream_rng(master: u64, salts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, salts))
}

/// Which of the two benchmark probability-matrix shapes to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFamily {
    Sym,
    Asym,
}

impl MatrixFamily {
    pub fn matrix(self, a: f64, b: f64) -> Result<BlockMatrix> {
        match self {
            Self::Sym => p_sym(a, b),
            Self::Asym => p_asym(a, b),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sym" => Ok(Self::Sym),
            "asym" => Ok(Self::Asym),
            _ => Err(Error::Parse(format!("unknown matrix family {s:?}"))),
        }
    }
}

impl std::fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Sym => write!(f, "sym"),
            Self::Asym => write!(f, "asym"),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidInput(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Symmetric family: `a` on the diagonal, `b` everywhere else.
pub fn p_sym(a: f64, b: f64) -> Result<BlockMatrix> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    BlockMatrix::new(3, vec![a, b, b, b, a, b, b, b, a])
}

/// Cyclic asymmetric family with `b' = b + (a - b)/a`, chosen so that
/// `(a - b)/a = (b' - a)/(1 - a)`.
pub fn p_asym(a: f64, b: f64) -> Result<BlockMatrix> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    if a <= 0.0 {
        return Err(Error::InvalidInput(
            "asym family needs a > 0 to define b'".into(),
        ));
    }
    let bp = b + (a - b) / a;
    if !(0.0..=1.0).contains(&bp) {
        return Err(Error::InvalidInput(format!(
            "derived b' = {bp} outside [0, 1] for a = {a}, b = {b}"
        )));
    }
    BlockMatrix::new(3, vec![a, b, bp, bp, a, b, b, bp, a])
}

/// Label distribution with heterogeneity `h`: `((1-h)/3, 1/3, (1+h)/3)`.
pub fn label_distribution(h: f64) -> Result<[f64; 3]> {
    check_unit("h", h)?;
    Ok([(1.0 - h) / 3.0, 1.0 / 3.0, (1.0 + h) / 3.0])
}

/// Draws `n` i.i.d. labels over three classes with heterogeneity `h`.
pub fn sample_labels(n: usize, h: f64, rng: &mut impl Rng) -> Result<LabelVector> {
    let alpha = label_distribution(h)?;
    let labels = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < alpha[0] {
                1
            } else if u < alpha[0] + alpha[1] {
                2
            } else {
                3
            }
        })
        .collect();
    LabelVector::new(labels, PROTOCOL_K)
}

/// Samples a binary graph with independent Bernoulli entries over all
/// ordered pairs, self-loops included; entries are drawn row-major.
pub fn sample_bernoulli_sbm(
    z: &LabelVector,
    p: &BlockMatrix,
    rng: &mut impl Rng,
) -> Result<WeightedDigraph> {
    if z.k() > p.k() {
        return Err(Error::DimensionMismatch(format!(
            "labels use up to {} classes but block matrix is {}x{}",
            z.k(),
            p.k(),
            p.k()
        )));
    }
    if !p.is_probability() {
        return Err(Error::InvalidInput(
            "bernoulli sampling needs probabilities in [0, 1]".into(),
        ));
    }
    let n = z.len();
    WeightedDigraph::from_fn(n, |i, j| {
        let t = p.get(z.class(i), z.class(j));
        if rng.gen::<f64>() < t {
            1.0
        } else {
            0.0
        }
    })
}

/// Replaces each label independently with probability `omega` by a uniform
/// draw from `1..=k` (which may coincide with the original), redrawing the
/// whole vector until every label appears.
pub fn noisy_init(
    z_star: &LabelVector,
    omega: f64,
    k: usize,
    rng: &mut impl Rng,
) -> Result<LabelVector> {
    check_unit("omega", omega)?;
    if k > z_star.len() {
        return Err(Error::InvalidInput(format!(
            "cannot place {k} labels on {} nodes",
            z_star.len()
        )));
    }
    if z_star.k() > k {
        return Err(Error::InvalidInput(format!(
            "true labeling uses up to {} classes, k = {k}",
            z_star.k()
        )));
    }
    if omega == 0.0 {
        let z0 = LabelVector::new(z_star.labels().to_vec(), k)?;
        if !z0.is_surjective() {
            return Err(Error::InvalidInput(
                "omega = 0 but the true labeling does not contain every label".into(),
            ));
        }
        return Ok(z0);
    }
    // Surjectivity has positive probability for omega > 0, so the rejection
    // loop terminates; the cap only guards against degenerate inputs.
    for _ in 0..1_000_000 {
        let labels: Vec<usize> = z_star
            .labels()
            .iter()
            .map(|&z| {
                if rng.gen::<f64>() < omega {
                    rng.gen_range(1..=k)
                } else {
                    z
                }
            })
            .collect();
        let z0 = LabelVector::new(labels, k)?;
        if z0.is_surjective() {
            return Ok(z0);
        }
    }
    Err(Error::InvalidInput(
        "noisy initialization failed to produce a surjective labeling".into(),
    ))
}

/// Uniform i.i.d. labeling over `1..=k`; the random-restart initializer.
pub fn uniform_labels(n: usize, k: usize, rng: &mut impl Rng) -> Result<LabelVector> {
    if k == 0 {
        return Err(Error::InvalidInput("class count k must be positive".into()));
    }
    LabelVector::new((0..n).map(|_| rng.gen_range(1..=k)).collect(), k)
}

/// One cell of the experimental grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPoint {
    pub n: usize,
    pub family: MatrixFamily,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub omega: f64,
    /// Base seed for this point; replication streams are derived from it.
    pub seed: u64,
}

impl ExperimentPoint {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("grid point with n = 0".into()));
        }
        check_unit("a", self.a)?;
        check_unit("b", self.b)?;
        check_unit("h", self.h)?;
        check_unit("omega", self.omega)?;
        // surfaces an out-of-range derived b' at construction time
        self.family.matrix(self.a, self.b)?;
        Ok(())
    }

    pub fn matrix(&self) -> Result<BlockMatrix> {
        self.family.matrix(self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{block_means, delta_gap};

    #[test]
    fn p_sym_boundary_not_identifiable() {
        let p = p_sym(0.9, 0.9).unwrap();
        assert!(p.entries().iter().all(|&e| e == 0.9));
        assert_eq!(delta_gap(&p).unwrap(), 0.0);
    }

    #[test]
    fn p_asym_derived_entry() {
        let p = p_asym(0.9, 0.4).unwrap();
        let bp = 0.4 + 0.5 / 0.9;
        assert!((p.get(0, 2) - bp).abs() < 1e-15);
        assert!((p.get(1, 0) - bp).abs() < 1e-15);
        assert!((p.get(2, 1) - bp).abs() < 1e-15);
    }

    #[test]
    fn symmetry_weighted_equality() {
        let mut rng = stream_rng(77, &[]);
        let mut checked = 0;
        while checked < 50 {
            let a: f64 = rng.gen_range(0.05..1.0);
            let b: f64 = rng.gen();
            let bp = b + (a - b) / a;
            if !(0.0..=1.0).contains(&bp) {
                continue;
            }
            let p = p_asym(a, b).unwrap();
            let lhs = (a - b) / a;
            let rhs = (p.get(0, 2) - a) / (1.0 - a);
            if a < 1.0 {
                assert!((lhs - rhs).abs() < 1e-12, "a={a}, b={b}");
            }
            checked += 1;
        }
    }

    #[test]
    fn p_asym_rejects_out_of_range_bp() {
        // b' = 1 + b(a - 1)/a, so b = 0 always gives b' = 1 (fine) while a
        // small `a` with large `b` pushes b' below zero
        assert!(p_asym(0.5, 0.0).is_ok());
        assert!(p_asym(0.1, 0.9).is_err());
        assert!(p_asym(0.0, 0.5).is_err());
    }

    #[test]
    fn delta_gap_positive_iff_a_ne_b() {
        for (a, b) in [(0.9, 0.4), (0.9, 0.8), (0.3, 0.3)] {
            let p = p_sym(a, b).unwrap();
            let gap = delta_gap(&p).unwrap();
            assert!((gap - 2.0 * (a - b).abs()).abs() < 1e-12);
            if a == b {
                assert_eq!(gap, 0.0);
            } else {
                assert!(gap > 0.0);
            }
        }
    }

    #[test]
    fn label_frequencies_match_alpha() {
        let n = 30_000;
        for h in [0.0f64, 0.7, 1.0] {
            let mut rng = stream_rng(1, &[h.to_bits()]);
            let z = sample_labels(n, h, &mut rng).unwrap();
            let alpha = label_distribution(h).unwrap();
            let sizes = crate::graph::class_sizes(&z);
            for (c, &alpha_c) in alpha.iter().enumerate() {
                let freq = sizes[c] as f64 / n as f64;
                let sigma = (alpha_c * (1.0 - alpha_c) / n as f64).sqrt();
                assert!(
                    (freq - alpha_c).abs() <= 3.0 * sigma + 1e-12,
                    "h={h}, class {c}: freq {freq} vs {alpha_c}"
                );
            }
        }
    }

    #[test]
    fn h_one_never_draws_class_one() {
        let mut rng = stream_rng(2, &[]);
        let z = sample_labels(10_000, 1.0, &mut rng).unwrap();
        assert_eq!(crate::graph::class_sizes(&z)[0], 0);
    }

    #[test]
    fn bernoulli_extremes() {
        let z = LabelVector::new(vec![1, 2, 3, 1], 3).unwrap();
        let ones = BlockMatrix::new(3, vec![1.0; 9]).unwrap();
        let zeros = BlockMatrix::new(3, vec![0.0; 9]).unwrap();
        let mut rng = stream_rng(3, &[]);
        let g1 = sample_bernoulli_sbm(&z, &ones, &mut rng).unwrap();
        assert!(g1.weights().iter().all(|&w| w == 1.0));
        let g0 = sample_bernoulli_sbm(&z, &zeros, &mut rng).unwrap();
        assert!(g0.weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn bernoulli_block_means_concentrate() {
        let n = 300;
        let mut rng = stream_rng(4, &[]);
        let z = sample_labels(n, 0.0, &mut rng).unwrap();
        let p = p_sym(0.8, 0.2).unwrap();
        let x = sample_bernoulli_sbm(&z, &p, &mut rng).unwrap();
        let p_hat = block_means(&x, &z).unwrap();
        let sizes = crate::graph::class_sizes(&z);
        for pp in 0..3 {
            for q in 0..3 {
                let count = (sizes[pp] * sizes[q]) as f64;
                let t = p.get(pp, q);
                let sigma = (t * (1.0 - t) / count).sqrt();
                assert!(
                    (p_hat.get(pp, q) - t).abs() <= 3.5 * sigma,
                    "block ({pp}, {q}): {} vs {t}",
                    p_hat.get(pp, q)
                );
            }
        }
    }

    #[test]
    fn noisy_init_zero_noise_is_identity() {
        let z = LabelVector::new(vec![1, 2, 3, 2], 3).unwrap();
        let mut rng = stream_rng(5, &[]);
        let z0 = noisy_init(&z, 0.0, 3, &mut rng).unwrap();
        assert_eq!(z0.labels(), z.labels());
    }

    #[test]
    fn noisy_init_always_surjective() {
        let mut rng = stream_rng(6, &[]);
        let z = sample_labels(8, 0.7, &mut rng).unwrap();
        for _ in 0..200 {
            let z0 = noisy_init(&z, 0.9, 3, &mut rng).unwrap();
            assert!(z0.is_surjective());
        }
    }

    #[test]
    fn noisy_init_full_noise_agreement_near_uniform() {
        let n = 3000;
        let mut rng = stream_rng(7, &[]);
        let z = sample_labels(n, 0.0, &mut rng).unwrap();
        let z0 = noisy_init(&z, 1.0, 3, &mut rng).unwrap();
        let agree = z
            .labels()
            .iter()
            .zip(z0.labels())
            .filter(|(a, b)| a == b)
            .count() as f64
            / n as f64;
        assert!((agree - 1.0 / 3.0).abs() < 0.02, "agreement {agree}");
    }

    #[test]
    fn noisy_init_rejects_k_above_n() {
        let z = LabelVector::new(vec![1, 2], 3).unwrap();
        let mut rng = stream_rng(8, &[]);
        assert!(noisy_init(&z, 0.5, 3, &mut rng).is_err());
    }

    #[test]
    fn seeded_streams_reproduce_bit_for_bit() {
        let mut a = stream_rng(42, &[3, 1]);
        let mut b = stream_rng(42, &[3, 1]);
        let za = sample_labels(100, 0.7, &mut a).unwrap();
        let zb = sample_labels(100, 0.7, &mut b).unwrap();
        assert_eq!(za, zb);
        let p = p_asym(0.9, 0.4).unwrap();
        let xa = sample_bernoulli_sbm(&za, &p, &mut a).unwrap();
        let xb = sample_bernoulli_sbm(&zb, &p, &mut b).unwrap();
        assert_eq!(xa, xb);
        // distinct salts give distinct streams
        let mut c = stream_rng(42, &[3, 2]);
        let zc = sample_labels(100, 0.7, &mut c).unwrap();
        assert_ne!(za, zc);
    }

    #[test]
    fn entry_covariance_near_zero() {
        // distinct entries are conditionally independent: empirical
        // covariance between two fixed off-diagonal entries across many
        // graphs stays within 3 sigma of zero
        let z = LabelVector::new(vec![1, 2, 3, 1, 2, 3], 3).unwrap();
        let p = p_sym(0.6, 0.3).unwrap();
        let mut rng = stream_rng(9, &[]);
        let reps = 4000;
        let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
        for _ in 0..reps {
            let x = sample_bernoulli_sbm(&z, &p, &mut rng).unwrap();
            let (w1, w2) = (x.weight(0, 1), x.weight(2, 4));
            s1 += w1;
            s2 += w2;
            s12 += w1 * w2;
        }
        let m1 = s1 / reps as f64;
        let m2 = s2 / reps as f64;
        let cov = s12 / reps as f64 - m1 * m2;
        let sigma = (m1 * (1.0 - m1) * m2 * (1.0 - m2) / reps as f64).sqrt();
        assert!(cov.abs() <= 3.5 * sigma, "cov {cov}, sigma {sigma}");
    }

    #[test]
    fn experiment_point_validation() {
        let good = ExperimentPoint {
            n: 50,
            family: MatrixFamily::Asym,
            a: 0.9,
            b: 0.4,
            h: 0.0,
            omega: 0.2,
            seed: 1,
        };
        assert!(good.validate().is_ok());
        let bad = ExperimentPoint {
            a: 0.1,
            b: 0.9,
            ..good
        };
        assert!(bad.validate().is_err());
    }
}
