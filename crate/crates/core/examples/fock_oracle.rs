//! Cross-check of the phase-space formulas against a truncated Fock-space
//! computation for a two-mode squeezer followed by loss.
//!
//! ```bash
//! cargo run --release --example fock_oracle
//! ```

use cvchannel::channels::{loss_channel, two_mode_squeezer, LossSpec};
use cvchannel::fock::{apply_loss_fock, build_two_mode_squeezer_state, DEFAULT_CUTOFF};
use cvchannel::linalg::max_abs_diff;
use cvchannel::symplectic::{ppt_min_eigenvalue, vacuum_state, CovarianceMatrix};
use cvchannel::{apply_channel, compose};

fn main() -> cvchannel::Result<()> {
    println!("   r    eta   max|ΔV|    PPT (Fock)");
    for r in [0.0, 0.25, 0.5] {
        for eta in [0.3, 0.7, 1.0] {
            let st = build_two_mode_squeezer_state(r, DEFAULT_CUTOFF)?;
            let fock = apply_loss_fock(&st, eta, 1)?;
            let ch = compose(
                &loss_channel(&LossSpec {
                    transmissivities: vec![1.0, eta],
                    rotation: None,
                })?,
                &two_mode_squeezer(r, 0, 1, 2)?,
            )?;
            let gauss = apply_channel(&ch, &vacuum_state(2)?)?;
            let diff = max_abs_diff(&fock.cov, gauss.cov().as_matrix());
            let ppt = ppt_min_eigenvalue(&CovarianceMatrix::new(fock.cov.clone())?, &[1])?;
            println!("{r:5.2} {eta:5.2}   {diff:.1e}   {ppt:+.4}");
        }
    }
    Ok(())
}
