//! The exact feature map: t cell ids per point, equivalently a binary vector
//! of length t·ψ with exactly t ones.

use isokernel::featuremap::{fit, kernel, match_count, write_features_csv};
use isokernel::partition::Scheme;
use isokernel::synth;

fn main() -> isokernel::Result<()> {
    let data = synth::disc(500, 0.3, 0.0, 3);
    let (t, psi) = (8, 16);
    let mapper = fit(&data, psi, t, Scheme::Anne, 11)?;

    let a = mapper.map_point(&data.points[0].x);
    let b = mapper.map_point(&data.points[1].x);
    println!("phi(a) = {:?}", a.as_slice());
    println!("phi(b) = {:?}", b.as_slice());

    let mut dense = vec![0u8; t * psi];
    for (i, &j) in a.as_slice().iter().enumerate() {
        dense[i * psi + j as usize] = 1;
    }
    let ones = dense.iter().filter(|&&v| v == 1).count();
    println!("Phi(a) has {} slots, {ones} ones, norm {:.4} = sqrt(t)", dense.len(), (ones as f64).sqrt());
    println!("matches = {}, K(a, b) = {}", match_count(&a, &b)?, kernel(&a, &b)?);

    let rows = data.points.iter().take(5).map(|p| (p.label, mapper.map_point(&p.x)));
    write_features_csv(std::io::stdout().lock(), rows, t)?;
    Ok(())
}
