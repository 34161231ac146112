//! ⟨w, Φ(x)⟩ costs t additions through the index map, whatever ψ is; the
//! dense product costs t·ψ.

use isokernel::featuremap::{efficient_dot_counted, naive_dot_counted, IndexedFeature, WeightMatrix};
use isokernel::ops::OpCounter;
use isokernel::seeding::stream_rng;
use rand::Rng;

fn main() -> isokernel::Result<()> {
    let t = 100;
    let mut rng = stream_rng(5, 0);
    println!("{:>6} {:>10} {:>12} {:>14}", "psi", "efficient", "naive", "|difference|");
    for psi in [16usize, 256, 4096, 16384] {
        let w: Vec<f64> = (0..t * psi).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = WeightMatrix::from_rows(t, psi, w)?;
        let f = IndexedFeature::new((0..t).map(|_| rng.gen_range(0..psi as u32)).collect());
        let (mut fast, mut slow) = (OpCounter::default(), OpCounter::default());
        let a = efficient_dot_counted(&w, &f, &mut fast)?;
        let b = naive_dot_counted(&w, &f, &mut slow)?;
        println!("{psi:>6} {:>10} {:>12} {:>14.1e}", fast.total(), slow.total(), (a - b).abs());
    }
    Ok(())
}
