//! Vary t, ψ or b with everything else fixed and print the sweep CSV.
//!
//! Usage: `sweep [t|psi|b]` (default t).

use isokernel::eval::{sweep, write_sweep_csv, ProtocolConfig, SweepAxis, SweepData};
use isokernel::learner::LearnerKind;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let axis: SweepAxis = std::env::args().nth(1).as_deref().unwrap_or("t").parse()?;
    let (values, learner): (Vec<usize>, _) = match axis {
        SweepAxis::T => (vec![10, 30, 100, 300, 1000], LearnerKind::IkOgdAnne),
        SweepAxis::Psi => (vec![4, 16, 64, 256, 1024], LearnerKind::IkOgdIForest),
        SweepAxis::B => (vec![25, 50, 100, 200, 400], LearnerKind::Nogd),
    };
    let d = synth::disc(4000, 0.3, 0.05, 12);
    let (train, test) = d.split_head(3000)?;
    let cfg = ProtocolConfig {
        psi: Some(32),
        ..ProtocolConfig::for_learner(learner)
    };
    let rows = sweep(axis, &values, &cfg, SweepData::Batch { train: &train, test: &test })?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
