use sbm_core::distances::DistanceKind;
use sbm_core::estimators::loss;
use sbm_core::graph::{LabelVector, WeightedDigraph};
use sbm_core::lloyd::{lloyd_sbm, IterationBudget};
use sbm_core::simulate::stream_rng;
use rand::Rng;

fn main() {
    // binary instances: exhaustive over all 2^25 matrices is too many, so
    // random binary draws x all 32 initial labelings
    let mut rng = stream_rng(4242, &[]);
    let mut violations = 0usize;
    let mut runs = 0usize;
    for _ in 0..2000 {
        let x = WeightedDigraph::from_fn(5, |_, _| if rng.gen::<bool>() { 1.0 } else { 0.0 }).unwrap();
        for code in 0..32usize {
            let labels: Vec<usize> = (0..5).map(|i| ((code >> i) & 1) + 1).collect();
            let z0 = LabelVector::new(labels, 2).unwrap();
            let fit = lloyd_sbm(&x, &z0, 2, DistanceKind::L1, IterationBudget::default()).unwrap();
            if fit.converged && !fit.cycle_detected {
                runs += 1;
                let initial = loss(&x, &z0, DistanceKind::L1).unwrap();
                if fit.loss > initial + 1e-12 {
                    violations += 1;
                    if violations <= 3 {
                        println!("violation: z0={:?} L0={:.6} zhat={:?} L={:.6}",
                            z0.labels(), initial, fit.labels.labels(), fit.loss);
                    }
                }
            }
        }
    }
    println!("binary: {violations} violations / {runs} converged runs");
}
