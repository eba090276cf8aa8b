//! The two Lloyd-style fitting loops: likelihood-score sweeps and
//! profile-distance sweeps.
//!
//! Both alternate the same way: freeze the class statistics of the current
//! labeling, then synchronously reassign every node to its best class under
//! those statistics. Runs stop when the labeling repeats up to relabeling,
//! when a short cycle is detected, or when the iteration/time budget runs
//! out.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::distances::{distance_unchecked, DistanceKind};
use crate::error::{Error, Result};
use crate::estimators::{block_means, class_sums, loss, BlockMatrix, ClassSums};
use crate::graph::{LabelVector, WeightedDigraph};
use crate::likelihood::{profile_loglik, xlg, ScoreVariant, PROB_CLAMP_EPS};

/// Iteration and wall-clock caps for one fitting run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationBudget {
    pub max_iters: usize,
    pub max_wall_time: Duration,
}

impl Default for IterationBudget {
    fn default() -> Self {
        Self {
            max_iters: 100,
            max_wall_time: Duration::from_secs(10),
        }
    }
}

impl IterationBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.max_wall_time.is_zero() {
            return Err(Error::InvalidInput(
                "iteration budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one fitting run.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub labels: LabelVector,
    /// Empirical block matrix of the returned labeling (unclamped).
    pub p_hat: BlockMatrix,
    /// Objective of the returned labeling: profile loss for distance sweeps,
    /// plug-in log-likelihood for score sweeps.
    pub loss: f64,
    /// Number of sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    pub cycle_detected: bool,
}

/// True when `z2` equals `z` after some injective relabeling of the classes
/// `z` actually uses.
pub fn labels_equal_up_to_relabeling(z: &LabelVector, z2: &LabelVector) -> Result<bool> {
    if z.len() != z2.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            z.len(),
            z2.len()
        )));
    }
    Ok(z.canonical() == z2.canonical())
}

/// One sweep of a concrete algorithm: objective of the current labeling plus
/// the synchronously reassigned labels (1-based).
trait SweepEngine {
    fn sweep(&mut self, z: &LabelVector) -> (f64, Vec<usize>);
    /// Whether objective `a` beats objective `b`.
    fn better(&self, a: f64, b: f64) -> bool;
    fn finalize(&self, z: &LabelVector) -> Result<(BlockMatrix, f64)>;
}

fn validate_run(x: &WeightedDigraph, z0: &LabelVector, k: usize) -> Result<()> {
    if x.n() == 0 {
        return Err(Error::InvalidInput("cannot fit an empty graph".into()));
    }
    if k == 0 || k > x.n() {
        return Err(Error::InvalidInput(format!(
            "class count {k} outside 1..={}",
            x.n()
        )));
    }
    if z0.len() != x.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes but initial labeling has {}",
            x.n(),
            z0.len()
        )));
    }
    if z0.k() != k {
        return Err(Error::InvalidInput(format!(
            "initial labeling declares {} classes, expected {k}",
            z0.k()
        )));
    }
    Ok(())
}

/// Canonical-form history depth used for cycle detection.
const CYCLE_WINDOW: usize = 4;

fn drive(
    x: &WeightedDigraph,
    z0: &LabelVector,
    k: usize,
    budget: IterationBudget,
    mut engine: impl SweepEngine,
) -> Result<FitResult> {
    validate_run(x, z0, k)?;
    budget.validate()?;
    let start = Instant::now();
    let mut z = z0.clone();
    let mut history: VecDeque<Vec<usize>> = VecDeque::with_capacity(CYCLE_WINDOW + 1);
    history.push_back(z.canonical());
    let mut best: Option<(f64, LabelVector)> = None;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut cycle_detected = false;

    while iterations < budget.max_iters && start.elapsed() < budget.max_wall_time {
        let (objective, new_labels) = engine.sweep(&z);
        iterations += 1;
        if best
            .as_ref()
            .map_or(true, |(b, _)| engine.better(objective, *b))
        {
            best = Some((objective, z.clone()));
        }
        let new_z = LabelVector::new(new_labels, k)?;
        let canon = new_z.canonical();
        if history.back() == Some(&canon) {
            converged = true;
            z = new_z;
            break;
        }
        if history.contains(&canon) {
            // revisited an earlier labeling without settling: oscillation;
            // hand back the best objective seen so far
            cycle_detected = true;
            z = best.take().expect("at least one iterate evaluated").1;
            break;
        }
        history.push_back(canon);
        if history.len() > CYCLE_WINDOW {
            history.pop_front();
        }
        z = new_z;
    }

    let (p_hat, final_loss) = engine.finalize(&z)?;
    Ok(FitResult {
        labels: z,
        p_hat,
        loss: final_loss,
        iterations,
        converged,
        cycle_detected,
    })
}

// ---------------------------------------------------------------------------
// Likelihood-score sweeps
// ---------------------------------------------------------------------------

struct MleEngine<'a> {
    x: &'a WeightedDigraph,
    k: usize,
    variant: ScoreVariant,
}

#[inline]
fn bern_term(w: f64, t: f64) -> f64 {
    xlg(w, t) + xlg(1.0 - w, 1.0 - t)
}

impl MleEngine<'_> {
    /// Clamped block means and the plug-in log-likelihood of `z`.
    fn stats(&self, sums: &ClassSums, z: &LabelVector) -> (Vec<f64>, f64) {
        let k = self.k;
        let block = sums.block_sums(z);
        let mut t = vec![0.0; k * k];
        let mut objective = 0.0;
        for p in 0..k {
            for q in 0..k {
                let pairs = (sums.sizes[p] * sums.sizes[q]) as f64;
                let raw = if pairs == 0.0 {
                    0.0
                } else {
                    block[p * k + q] / pairs
                };
                let clamped = raw.clamp(PROB_CLAMP_EPS, 1.0 - PROB_CLAMP_EPS);
                t[p * k + q] = clamped;
                let s = block[p * k + q];
                objective += xlg(s, clamped) + xlg(pairs - s, 1.0 - clamped);
            }
        }
        (t, objective)
    }

    /// Candidate value of moving node `i` to class `p` (0-based), measured
    /// against the frozen sweep-start statistics. For the averaged variant
    /// this is the exact change in the plug-in likelihood: the two one-sided
    /// scores double-count every off-diagonal pair, and the self-loop moves
    /// to block `(p, p)` rather than `(p, c)`/`(c, p)`, hence the
    /// correction.
    fn candidate(
        &self,
        sums: &ClassSums,
        t: &[f64],
        i: usize,
        current: usize,
        p: usize,
    ) -> f64 {
        let k = self.k;
        let out = &sums.out[i * k..(i + 1) * k];
        let inc = &sums.inc[i * k..(i + 1) * k];
        let forward = || -> f64 {
            (0..k)
                .map(|q| {
                    let tpq = t[p * k + q];
                    xlg(out[q], tpq) + xlg(sums.sizes[q] as f64 - out[q], 1.0 - tpq)
                })
                .sum()
        };
        let backward = || -> f64 {
            (0..k)
                .map(|q| {
                    let tqp = t[q * k + p];
                    xlg(inc[q], tqp) + xlg(sums.sizes[q] as f64 - inc[q], 1.0 - tqp)
                })
                .sum()
        };
        match self.variant {
            ScoreVariant::Forward => forward(),
            ScoreVariant::Backward => backward(),
            ScoreVariant::Averaged => {
                let w = self.x.weight(i, i);
                let correction = bern_term(w, t[p * k + p])
                    - bern_term(w, t[p * k + current])
                    - bern_term(w, t[current * k + p]);
                forward() + backward() + correction
            }
        }
    }
}

impl SweepEngine for MleEngine<'_> {
    fn sweep(&mut self, z: &LabelVector) -> (f64, Vec<usize>) {
        let (n, k) = (self.x.n(), self.k);
        let sums = class_sums(self.x, z);
        let (t, objective) = self.stats(&sums, z);
        let mut new_labels = Vec::with_capacity(n);
        for i in 0..n {
            let current = z.class(i);
            let mut best_class = current;
            let mut best_value = self.candidate(&sums, &t, i, current, current);
            for p in 0..k {
                if p == current {
                    continue;
                }
                let v = self.candidate(&sums, &t, i, current, p);
                if v > best_value {
                    best_value = v;
                    best_class = p;
                }
            }
            new_labels.push(best_class + 1);
        }
        (objective, new_labels)
    }

    fn better(&self, a: f64, b: f64) -> bool {
        a > b
    }

    fn finalize(&self, z: &LabelVector) -> Result<(BlockMatrix, f64)> {
        Ok((block_means(self.x, z)?, profile_loglik(self.x, z)?))
    }
}

/// Likelihood-driven Lloyd sweeps: recompute the clamped block matrix, then
/// reassign every node to the class with the best per-node score.
pub fn lloyd_mle(
    x: &WeightedDigraph,
    z0: &LabelVector,
    k: usize,
    variant: ScoreVariant,
    budget: IterationBudget,
) -> Result<FitResult> {
    drive(x, z0, k, budget, MleEngine { x, k, variant })
}

// ---------------------------------------------------------------------------
// Profile-distance sweeps
// ---------------------------------------------------------------------------

struct ProfileEngine<'a> {
    x: &'a WeightedDigraph,
    k: usize,
    d: DistanceKind,
}

impl SweepEngine for ProfileEngine<'_> {
    fn sweep(&mut self, z: &LabelVector) -> (f64, Vec<usize>) {
        let (n, k) = (self.x.n(), self.k);
        let sums = class_sums(self.x, z);
        let block = sums.block_sums(z);
        let inv_size: Vec<f64> = sums
            .sizes
            .iter()
            .map(|&s| if s == 0 { 0.0 } else { 1.0 / s as f64 })
            .collect();
        // class profiles, one 2K row per class
        let mut class_rows = vec![0.0; k * 2 * k];
        for p in 0..k {
            for q in 0..k {
                let pairs_pq = inv_size[p] * inv_size[q];
                class_rows[p * 2 * k + q] = block[p * k + q] * pairs_pq;
                class_rows[p * 2 * k + k + q] = block[q * k + p] * pairs_pq;
            }
        }
        let mut node_row = vec![0.0; 2 * k];
        let mut objective = 0.0;
        let mut new_labels = Vec::with_capacity(n);
        for i in 0..n {
            for q in 0..k {
                node_row[q] = sums.out[i * k + q] * inv_size[q];
                node_row[k + q] = sums.inc[i * k + q] * inv_size[q];
            }
            let current = z.class(i);
            let mut best_class = current;
            let mut best_value = distance_unchecked(
                &node_row,
                &class_rows[current * 2 * k..(current + 1) * 2 * k],
                self.d,
            );
            objective += best_value;
            for p in 0..k {
                if p == current {
                    continue;
                }
                let v = distance_unchecked(
                    &node_row,
                    &class_rows[p * 2 * k..(p + 1) * 2 * k],
                    self.d,
                );
                if v < best_value {
                    best_value = v;
                    best_class = p;
                }
            }
            new_labels.push(best_class + 1);
        }
        (objective / n as f64, new_labels)
    }

    fn better(&self, a: f64, b: f64) -> bool {
        a < b
    }

    fn finalize(&self, z: &LabelVector) -> Result<(BlockMatrix, f64)> {
        Ok((block_means(self.x, z)?, loss(self.x, z, self.d)?))
    }
}

/// Profile-matching Lloyd sweeps: recompute node and class profiles, then
/// reassign every node to the class whose profile is nearest under `d`.
pub fn lloyd_sbm(
    x: &WeightedDigraph,
    z0: &LabelVector,
    k: usize,
    d: DistanceKind,
    budget: IterationBudget,
) -> Result<FitResult> {
    drive(x, z0, k, budget, ProfileEngine { x, k, d })
}
