//! Loss applied in a rotated mode basis leaves off-diagonal noise; the
//! eigendecomposition of the reconstructed `N̂` recovers the loss values and
//! the rotation.
//!
//! ```bash
//! cargo run --release --example noise_structure
//! ```

use cvchannel::analysis::noise_eigendecomposition;
use cvchannel::channels::{loss_channel, LossSpec, PassiveElement, Rotation};
use cvchannel::characterization::{characterize, ProtocolOptions};
use cvchannel::linalg::subspace_overlap;

fn main() -> cvchannel::Result<()> {
    let rotation = Rotation::beamsplitter(0, 1, 0.5).then(PassiveElement::BeamSplitter {
        a: 1,
        b: 2,
        theta: 0.8,
    });
    let etas = vec![0.9, 0.6, 0.3];
    let spec = LossSpec {
        transmissivities: etas.clone(),
        rotation: Some(rotation.clone()),
    };
    let truth = loss_channel(&spec)?;
    println!("true N:\n{:.3}", truth.noise());

    let res = characterize(&truth, &ProtocolOptions::default().with_shots(100_000))?;
    let eig = noise_eigendecomposition(&res.noise_hat)?;
    println!("N̂ eigenvalues {:.3}", eig.values.transpose());

    // each loss value appears twice (x and p); pair them with the rotated modes
    let r = rotation.matrix(3)?;
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| etas[a].total_cmp(&etas[b]));
    for (k, &m) in order.iter().enumerate() {
        let basis = eig.vectors.columns(2 * k, 2).into_owned();
        let ox = subspace_overlap(&r.column(m).into_owned(), &basis);
        let op = subspace_overlap(&r.column(m + 3).into_owned(), &basis);
        println!(
            "1 - eta = {:.2}: eigenvalues {:.3} {:.3}, overlaps {ox:.4} {op:.4}",
            1.0 - etas[m],
            eig.values[2 * k],
            eig.values[2 * k + 1]
        );
    }
    Ok(())
}
