//! On uniformly distributed data, iForest-based Isolation Kernel ranks pairs
//! much like the Laplacian kernel with the same ψ.

use isokernel::featuremap::{fit, kernel};
use isokernel::kernels::{Kernel, Laplacian};
use isokernel::partition::Scheme;
use isokernel::seeding::stream_rng;
use isokernel::{synth, SparseVector};
use rand::Rng;

fn main() -> isokernel::Result<()> {
    let psi = 256;
    let data = synth::unlabeled("uniform", synth::uniform(5000, 2, 1), 2);
    let mapper = fit(&data, psi, 5000, Scheme::IForest, 2)?;
    let lap = Laplacian::new(psi as f64, 2)?;
    let mut rng = stream_rng(3, 0);

    println!("{:>8} {:>8} {:>10}", "l1", "IK", "Laplacian");
    for _ in 0..15 {
        let (a, b): (f64, f64) = (rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8));
        let r: f64 = rng.gen_range(0.0..0.2);
        let x = SparseVector::from_dense(&[a, b]).with_dim(2);
        let y = SparseVector::from_dense(&[a + r, b]).with_dim(2);
        let ik = kernel(&mapper.map_point(&x), &mapper.map_point(&y))?;
        println!("{r:>8.3} {ik:>8.3} {:>10.3}", lap.eval(&x, &y));
    }
    Ok(())
}
