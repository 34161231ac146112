//! Nyström features for the Laplacian kernel: b landmarks, rank r.
//! Shows how well ⟨x̂, ŷ⟩ tracks the exact kernel as r grows.

use isokernel::kernels::{Kernel, Laplacian};
use isokernel::nystrom::fit_nystrom;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let data = synth::two_gaussians(2000, 5, 2.0, 4);
    let kernel = Laplacian::new(32.0, data.dim)?;
    let probe: Vec<_> = data.points[..60].iter().map(|p| p.x.clone()).collect();

    println!("{:>4} {:>4} {:>12}", "b", "r", "gram error");
    for (b, r) in [(100, 5), (100, 20), (100, 50), (100, 100), (200, 40)] {
        let map = fit_nystrom(&data, b, r, kernel, 9)?;
        let feats: Vec<Vec<f64>> = probe.iter().map(|x| map.map(x)).collect();
        let mut err = 0.0;
        for i in 0..probe.len() {
            for j in 0..probe.len() {
                let approx: f64 = feats[i].iter().zip(&feats[j]).map(|(a, b)| a * b).sum();
                err += (approx - kernel.eval(&probe[i], &probe[j])).powi(2);
            }
        }
        println!("{b:>4} {:>4} {:>12.4}", map.r(), err.sqrt());
    }
    Ok(())
}
