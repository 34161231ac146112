use isokernel::eval::{run_online, sweep, ProtocolConfig, SweepAxis, SweepData};
use isokernel::learner::LearnerKind;
use isokernel::synth;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn online_curve_does_not_degrade_on_a_stationary_stream() {
    let mut gaps = Vec::new();
    for seed in 0..5 {
        let d = synth::two_gaussians(6000, 4, 2.5, seed);
        let cfg = ProtocolConfig {
            seed,
            initial_train: Some(1000),
            psi_grid: vec![4, 16, 64],
            ..ProtocolConfig::for_learner(LearnerKind::IkOgdIForest)
        };
        let m = run_online(&d, &cfg).unwrap();
        assert_eq!(m.n_predictions, 5000);
        assert_eq!(m.blocks.len(), 5);
        gaps.push(m.final_accuracy - m.blocks[0].cumulative_accuracy);
    }
    assert!(median(gaps.clone()) >= -0.02, "{gaps:?}");
}

#[test]
fn accuracy_does_not_drop_as_t_grows() {
    let values = [10, 100, 1000];
    let mut per_t = vec![Vec::new(); values.len()];
    for seed in 0..5 {
        let d = synth::disc(3000, 0.3, 0.05, 100 + seed);
        let (train, test) = d.split_head(2000).unwrap();
        let cfg = ProtocolConfig {
            seed,
            psi: Some(16),
            ..ProtocolConfig::for_learner(LearnerKind::IkOgdAnne)
        };
        let rows = sweep(SweepAxis::T, &values, &cfg, SweepData::Batch { train: &train, test: &test }).unwrap();
        for (k, row) in rows.iter().enumerate() {
            per_t[k].push(row.metrics.final_accuracy);
        }
    }
    let med: Vec<f64> = per_t.into_iter().map(median).collect();
    for w in med.windows(2) {
        assert!(w[1] >= w[0] - 0.02, "{med:?}");
    }
}

#[test]
fn fairness_every_learner_sees_the_same_head() {
    let d = synth::disc(1500, 0.3, 0.0, 9);
    let mut heads = Vec::new();
    for kind in LearnerKind::ALL {
        let cfg = ProtocolConfig {
            psi: Some(16),
            b: 50,
            r: 10,
            t: 20,
            ..ProtocolConfig::for_learner(kind)
        };
        let m = run_online(&d, &cfg).unwrap();
        heads.push((m.n_train, m.n_predictions));
    }
    assert!(heads.windows(2).all(|w| w[0] == w[1]));
}
