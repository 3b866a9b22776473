//! Full protocol on a 4-mode DFG array followed by loss in a rotated basis:
//! coherent probes give `Â`, vacuum homodyne data give `N̂` by MLE.
//!
//! ```bash
//! cargo run --release --example characterize_dfg -- 100000 7
//! ```

use std::time::Instant;

use cvchannel::channels::{
    dfg_array, loss_channel, lossy_dfg_array, DfgSpec, LossSpec, PassiveElement, Rotation,
};
use cvchannel::characterization::{characterize, ProtocolOptions};
use cvchannel::linalg::max_abs_diff;
use cvchannel::{compose, physicality_margin};

fn main() -> cvchannel::Result<()> {
    let mut args = std::env::args().skip(1);
    let shots: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let rotation = Rotation::beamsplitter(0, 1, 0.4)
        .then(PassiveElement::BeamSplitter {
            a: 2,
            b: 3,
            theta: 0.9,
        })
        .then(PassiveElement::PhaseShift { mode: 1, phi: 0.3 });
    let loss = loss_channel(&LossSpec {
        transmissivities: vec![0.9, 0.7, 0.8, 0.6],
        rotation: Some(rotation),
    })?;
    let truth = compose(&loss, &dfg_array(&DfgSpec::uniform(4, 0.4))?)?;
    println!("truth margin {:.3e}", physicality_margin(&truth));

    let opts = ProtocolOptions {
        seed,
        ..ProtocolOptions::default().with_shots(shots)
    };
    let start = Instant::now();
    let res = characterize(&truth, &opts)?;
    println!(
        "shots {shots} seed {seed}: {} iterations, converged {}, {:.2?}",
        res.iterations,
        res.converged,
        start.elapsed()
    );
    println!(
        "max |Â - A|  {:.4}",
        max_abs_diff(&res.amp_hat, truth.amp())
    );
    println!(
        "max |N̂ - N|  {:.4}",
        max_abs_diff(&res.noise_hat, truth.noise())
    );
    println!("N̂ margin     {:.3e}", res.margin);

    // uniform loss after the DFG has the same structure without a rotation
    let plain = lossy_dfg_array(&DfgSpec::uniform(4, 0.4), 0.8)?;
    let res = characterize(&plain, &opts)?;
    println!(
        "uniform loss: max |N̂ - N| {:.4}",
        max_abs_diff(&res.noise_hat, plain.noise())
    );
    Ok(())
}
