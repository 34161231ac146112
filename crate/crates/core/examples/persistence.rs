//! Save a fitted feature map and a trained model, load them back, and check
//! the loaded copies give identical results.

use isokernel::eval::{train_model, ProtocolConfig};
use isokernel::featuremap::{fit, Mapper};
use isokernel::learner::{Checkpoint, LearnerKind};
use isokernel::partition::Scheme;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let dir = std::env::temp_dir().join(format!("isokernel-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let data = synth::disc(1000, 0.3, 0.0, 5);

    let mapper = fit(&data, 64, 100, Scheme::IForest, 17)?;
    mapper.save(dir.join("map.json"))?;
    let loaded = Mapper::load(dir.join("map.json"))?;
    let same = data.iter().all(|p| mapper.map_point(&p.x) == loaded.map_point(&p.x));
    println!("mapper: {} partitionings, identical after reload: {same}", loaded.t());

    let cfg = ProtocolConfig {
        psi: Some(64),
        ..ProtocolConfig::for_learner(LearnerKind::IkOgdAnne)
    };
    let (model, psi) = train_model(&data, &cfg)?;
    model.save(dir.join("model.json"))?;
    let mut restored = Checkpoint::load(dir.join("model.json"))?.restore();
    let correct = data
        .iter()
        .filter(|p| isokernel::learner::predict_label(restored.score(&p.x).unwrap()) == p.label)
        .count();
    println!(
        "model: psi = {psi}, {} accepted updates, training accuracy after reload {:.3}",
        model.accepted_updates,
        correct as f64 / data.len() as f64
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
