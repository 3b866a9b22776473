//! Calibrates the quantum noise channel and the 16-mode lossy DFG array to
//! target vacuum-output PPT eigenvalues, then characterizes the DFG and reads
//! the entanglement back off the reconstruction.
//!
//! ```bash
//! cargo run --release --example entanglement_calibration
//! ```

use std::time::Instant;

use cvchannel::calibration::{
    calibrated_dfg_spec, calibrated_lossy_dfg, calibrated_quantum_noise_channel, vacuum_pair_ppt,
    DFG_TARGET_PPT,
};
use cvchannel::characterization::{characterize, ProtocolOptions};
use cvchannel::linalg::max_abs_diff;

fn main() -> cvchannel::Result<()> {
    let qn = calibrated_quantum_noise_channel(2)?;
    println!("quantum noise channel: PPT {:.4}", vacuum_pair_ppt(&qn)?[0]);

    let spec = calibrated_dfg_spec()?;
    let dfg = calibrated_lossy_dfg()?;
    let ppt = vacuum_pair_ppt(&dfg)?;
    println!("pair  squeeze  target  PPT");
    for (k, ((r, t), v)) in spec
        .squeeze
        .iter()
        .zip(DFG_TARGET_PPT)
        .zip(&ppt)
        .enumerate()
    {
        println!("{:>4}  {r:.4}   {t:+.2}   {v:+.4}", k + 1);
    }

    let start = Instant::now();
    let res = characterize(&dfg, &ProtocolOptions::default().with_shots(10_000))?;
    println!(
        "16-mode reconstruction: {} iterations, converged {}, {:.2?}",
        res.iterations,
        res.converged,
        start.elapsed()
    );
    println!(
        "max |Â - A| {:.4}  max |N̂ - N| {:.4}",
        max_abs_diff(&res.amp_hat, dfg.amp()),
        max_abs_diff(&res.noise_hat, dfg.noise())
    );
    let rebuilt = vacuum_pair_ppt(&res.channel()?)?;
    let shown: Vec<String> = rebuilt.iter().map(|v| format!("{v:+.3}")).collect();
    println!("PPT from reconstruction: {}", shown.join(" "));
    Ok(())
}
