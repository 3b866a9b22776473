//! States, channels, physicality and composition.
//!
//! ```bash
//! cargo run --example channel_basics
//! ```

use cvchannel::channels::{loss_channel, two_mode_squeezer, LossSpec};
use cvchannel::linalg::Mat;
use cvchannel::symplectic::{
    coherent_state, from_amp_matrix, ppt_min_eigenvalue, symplectic_eigenvalues, to_amp_matrix,
    vacuum_state, Physicality,
};
use cvchannel::{apply_channel, compose, physicality_margin, GaussianChannel, QuadratureVector};

fn main() -> cvchannel::Result<()> {
    // x1 displaced by 2, i.e. alpha = 1
    let st = coherent_state(QuadratureVector::new(vec![2.0, 0.0, 0.0, 0.0])?);
    let sq = two_mode_squeezer(0.5, 0, 1, 2)?;
    let out = apply_channel(&sq, &st)?;
    println!("output mean {:?}", out.mean().as_slice());
    println!("output covariance {}", out.cov().as_matrix());
    println!(
        "symplectic eigenvalues {:?}",
        symplectic_eigenvalues(out.cov())?
    );
    println!(
        "PPT min eigenvalue {:.6} (e^-1 - 1 = {:.6})",
        ppt_min_eigenvalue(out.cov(), &[1])?,
        (-1.0f64).exp() - 1.0
    );

    let loss = loss_channel(&LossSpec::uniform(2, 0.7))?;
    let both = compose(&loss, &sq)?;
    for (name, ch) in [
        ("squeezer", &sq),
        ("loss", &loss),
        ("loss after squeezer", &both),
    ] {
        let m = physicality_margin(ch);
        println!("{name:>20}: margin {m:+.3e} {:?}", Physicality::classify(m));
    }

    // amplification without added noise violates the uncertainty principle
    let bad = GaussianChannel::from_amp_noise(Mat::identity(2, 2) * 2.0, Mat::zeros(2, 2))?;
    println!(
        "noiseless amplifier margin {:+.3}",
        physicality_margin(&bad)
    );

    let pair = from_amp_matrix(sq.amp())?;
    println!("G = {}H = {}", pair.g, pair.h);
    let back = to_amp_matrix(&pair);
    println!("round trip error {:.1e}", (back - sq.amp()).amax());

    let vac = apply_channel(&both, &vacuum_state(2)?)?;
    println!("lossy TMSV PPT {:.4}", ppt_min_eigenvalue(vac.cov(), &[1])?);
    Ok(())
}
