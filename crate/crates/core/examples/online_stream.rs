//! Online test-then-train: each block of the stream is predicted with the
//! current model, then used for updates.
//!
//! Usage: `online_stream [FILE.svm ...]`. Without files a synthetic task is used.

use isokernel::dataset::{load_libsvm, Dataset};
use isokernel::eval::{run_online, ProtocolConfig};
use isokernel::learner::LearnerKind;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let files: Vec<String> = std::env::args().skip(1).collect();
    let mut base = ProtocolConfig {
        block_size: 500,
        psi_grid: vec![4, 16, 64, 256],
        ..ProtocolConfig::default()
    };
    let data = if files.is_empty() {
        base.initial_train = Some(1000);
        synth::disc(6000, 0.3, 0.05, 42)
    } else {
        let mut points = Vec::new();
        let mut map = None;
        for (i, f) in files.iter().enumerate() {
            let (d, m) = load_libsvm(f, None, map.clone())?;
            if i == 0 {
                base.initial_train = Some(d.len());
            }
            map.get_or_insert(m);
            points.extend(d.points);
        }
        Dataset::new("stream", points)
    };

    for kind in LearnerKind::ALL {
        let m = run_online(&data, &ProtocolConfig { learner: kind, ..base.clone() })?;
        let curve: Vec<String> = m.blocks.iter().map(|b| format!("{:.3}", b.cumulative_accuracy)).collect();
        println!(
            "{kind:>15} psi={:<4} updates={:<5} ops/prediction={:<7.0} curve: {}",
            m.selected_psi,
            m.accepted_updates,
            m.ops_per_prediction,
            curve.join(" ")
        );
    }
    Ok(())
}
