//! Batch protocol: ψ by 5-fold cross-validation, one epoch over the training
//! set, then accuracy on the test set.
//!
//! Usage: `batch_compare [TRAIN.svm TEST.svm]`, e.g. the public a9a files.

use isokernel::dataset::{load_libsvm, Dataset};
use isokernel::eval::{run_batch, ProtocolConfig};
use isokernel::learner::LearnerKind;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (train, test, grid) = match args.as_slice() {
        [tr, te] => {
            let (train, map) = load_libsvm(tr, None, None)?;
            let (test, _) = load_libsvm(te, None, Some(map))?;
            let dim = train.dim.max(test.dim);
            (
                Dataset::with_dim(train.name, train.points, dim),
                Dataset::with_dim(test.name, test.points, dim),
                ProtocolConfig::default().psi_grid,
            )
        }
        _ => {
            let d = synth::two_gaussians(4000, 10, 2.0, 8);
            let (train, test) = d.split_head(3000)?;
            (train, test, vec![4, 16, 64, 256])
        }
    };
    println!("train {} points, test {} points, d = {}", train.len(), test.len(), train.dim);
    for kind in LearnerKind::ALL {
        let cfg = ProtocolConfig {
            psi_grid: grid.clone(),
            ..ProtocolConfig::for_learner(kind)
        };
        let m = run_batch(&train, &test, &cfg)?;
        println!(
            "{kind:>15}: accuracy {:.4}  psi {:<5} train {:.2}s  test {:.2}s  ops/prediction {:.0}",
            m.final_accuracy, m.selected_psi, m.train_seconds, m.test_seconds, m.ops_per_prediction
        );
    }
    Ok(())
}
