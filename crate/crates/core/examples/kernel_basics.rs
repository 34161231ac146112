//! Fit Isolation Kernel on 2-D data and compare kernel values for near and
//! far pairs, in a dense and a sparse region.

use isokernel::featuremap::{fit, kernel};
use isokernel::partition::Scheme;
use isokernel::synth;
use isokernel::SparseVector;

fn main() -> isokernel::Result<()> {
    // dense cluster near the origin, sparse background on [0, 10]²
    let mut pts = synth::uniform(900, 2, 1);
    pts.extend(synth::uniform(100, 2, 2).into_iter().map(|x| {
        let v: Vec<f64> = x.to_dense(2).iter().map(|a| a * 10.0).collect();
        SparseVector::from_dense(&v).with_dim(2)
    }));
    let data = synth::unlabeled("mixed", pts, 2);

    for scheme in [Scheme::IForest, Scheme::Anne] {
        let mapper = fit(&data, 32, 500, scheme, 7)?;
        let k = |a: [f64; 2], b: [f64; 2]| {
            let fa = mapper.map_point(&SparseVector::from_dense(&a).with_dim(2));
            let fb = mapper.map_point(&SparseVector::from_dense(&b).with_dim(2));
            kernel(&fa, &fb).unwrap()
        };
        println!("{scheme}:");
        println!("  K(x, x)                      = {:.3}", k([0.5, 0.5], [0.5, 0.5]));
        println!("  dense region, distance 0.3   = {:.3}", k([0.3, 0.5], [0.6, 0.5]));
        println!("  sparse region, distance 0.3  = {:.3}", k([6.0, 6.0], [6.3, 6.0]));
        println!("  far apart                    = {:.3}", k([0.5, 0.5], [8.0, 8.0]));
    }
    Ok(())
}
