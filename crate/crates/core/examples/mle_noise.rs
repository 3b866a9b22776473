//! Noise-matrix reconstruction: least-squares seed versus constrained MLE,
//! on exact data and on a small-sample data set that makes the
//! least-squares estimate unphysical.
//!
//! ```bash
//! cargo run --release --example mle_noise
//! ```

use cvchannel::channels::{loss_channel, LossSpec};
use cvchannel::characterization::{
    exact_observations, least_squares_seed, log_likelihood, mle_noise, observations_from_samples,
    MleOptions,
};
use cvchannel::linalg::max_abs_diff;
use cvchannel::measurement::{sample_catalog, setting_catalog};
use cvchannel::symplectic::vacuum_state;
use cvchannel::{apply_channel, physicality_margin, GaussianChannel};

fn main() -> cvchannel::Result<()> {
    // a pure-loss channel sits on the physicality boundary
    let truth = loss_channel(&LossSpec::uniform(2, 0.6))?;
    let out = apply_channel(&truth, &vacuum_state(2)?)?;
    let amp = truth.amp().clone();

    let exact = exact_observations(out.cov().as_matrix(), 10_000);
    let res = mle_noise(&amp, &exact, &MleOptions::default())?;
    println!(
        "exact data: |N̂ - N|_F = {:.2e} after {} iterations",
        (&res.noise_hat - truth.noise()).norm(),
        res.iterations
    );

    for seed in 0..5 {
        let samples = sample_catalog(&out, &setting_catalog(2), 200, seed)?;
        let obs = observations_from_samples(&samples)?;
        let ls = least_squares_seed(&amp, &obs)?;
        let ls_margin =
            physicality_margin(&GaussianChannel::from_amp_noise(amp.clone(), ls.clone())?);
        let res = mle_noise(&amp, &obs, &MleOptions::default())?;
        let monotone = res.loglik_trace.windows(2).all(|w| w[1] >= w[0]);
        println!(
            "seed {seed}: LS margin {ls_margin:+.3} (loglik {:.2})  projected seed loglik {:.2}  \
             MLE loglik {:.2} margin {:+.1e}  |N̂ - N| {:.3}  monotone {monotone}",
            log_likelihood(&amp, &obs, &ls),
            res.loglik_trace[0],
            res.loglik,
            res.margin,
            max_abs_diff(&res.noise_hat, truth.noise()),
        );
    }
    Ok(())
}
