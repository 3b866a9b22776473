//! The measurement side of the protocol: coherent probes along each
//! quadrature, the vacuum-stage homodyne catalog, and the raw estimates.
//!
//! ```bash
//! cargo run --example probe_protocol
//! ```

use cvchannel::channels::two_mode_squeezer;
use cvchannel::characterization::{assemble_covariance, estimate_amp, estimate_disp};
use cvchannel::linalg::max_abs_diff;
use cvchannel::measurement::{
    measure_output_means, measure_zero_input, probe_sequence, sample_catalog, setting_catalog,
};
use cvchannel::symplectic::vacuum_state;
use cvchannel::{apply_channel, QuadratureVector};

fn main() -> cvchannel::Result<()> {
    let ch = two_mode_squeezer(0.4, 0, 1, 2)?
        .with_disp(QuadratureVector::new(vec![0.5, 0.0, 0.0, -0.2])?)?;
    let (q, shots, seed) = (10.0, 10_000, 3);

    let probes = probe_sequence(2, q)?;
    let zero = measure_zero_input(&ch, Some(shots), seed)?;
    let d_hat = estimate_disp(&zero);
    let records = measure_output_means(&ch, &probes, shots, seed)?
        .iter()
        .map(|r| r.offset_by(&d_hat))
        .collect::<cvchannel::Result<Vec<_>>>()?;
    let a_hat = estimate_amp(&records, q)?;
    println!("d̂ = {:?}", d_hat.as_slice());
    println!("max |Â - A| = {:.4}", max_abs_diff(&a_hat, ch.amp()));

    let catalog = setting_catalog(2);
    let labels: Vec<String> = catalog.iter().map(|s| s.label()).collect();
    println!("{} settings: {}", catalog.len(), labels.join(" "));
    let out = apply_channel(&ch, &vacuum_state(2)?)?;
    let samples = sample_catalog(&out, &catalog, shots, seed)?;
    let v_hat = assemble_covariance(&samples)?;
    println!(
        "max |V̂ - V| = {:.4}",
        max_abs_diff(v_hat.as_matrix(), out.cov().as_matrix())
    );
    Ok(())
}
