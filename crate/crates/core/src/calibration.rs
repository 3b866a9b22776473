//! Scalar calibration of channel parameters against target vacuum-output
//! partial-transposition eigenvalues.

use crate::channels::{conjugate_pairs, lossy_dfg_array, quantum_noise_channel, DfgSpec};
use crate::error::{Error, Result};
use crate::symplectic::{apply_channel, ppt_min_eigenvalue, vacuum_state, GaussianChannel};

/// Target PPT eigenvalue for the quantum noise channel.
pub const QUANTUM_NOISE_TARGET_PPT: f64 = -0.37;
/// Transmissivity used for the quantum noise channel ("largely attenuated").
pub const QUANTUM_NOISE_ETA: f64 = 0.1;
/// Target PPT eigenvalues of the eight conjugate pairs of the 16-mode DFG.
pub const DFG_TARGET_PPT: [f64; 8] = [-0.27, -0.26, -0.24, -0.25, -0.26, -0.27, -0.25, -0.28];
/// Uniform transmissivity following the 16-mode DFG.
pub const DFG_ETA: f64 = 0.75;

/// Bisection for a root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Calibration(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < tol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// PPT eigenvalue of the vacuum output of `ch` across each conjugate pair.
pub fn vacuum_pair_ppt(ch: &GaussianChannel) -> Result<Vec<f64>> {
    let out = apply_channel(ch, &vacuum_state(ch.modes())?)?;
    crate::analysis::pair_ppt_eigenvalues(out.cov(), &conjugate_pairs(ch.modes()))
}

fn first_pair_ppt(ch: &GaussianChannel) -> Result<f64> {
    let out = apply_channel(ch, &vacuum_state(ch.modes())?)?;
    let (a, b) = conjugate_pairs(ch.modes())[0];
    ppt_min_eigenvalue(&out.cov().reduced(&[a, b])?, &[1])
}

/// Environment squeezing that gives the quantum noise channel a vacuum-output
/// PPT eigenvalue of `target`.
pub fn calibrate_noise_squeeze(eta: f64, target: f64, modes: usize) -> Result<f64> {
    let ppt = |s: f64| {
        quantum_noise_channel(eta, s, modes)
            .and_then(|ch| first_pair_ppt(&ch))
            .map_or(f64::NAN, |v| v - target)
    };
    bisect(ppt, 0.0, 10.0, 1e-13)
}

/// Calibrated quantum noise channel on `modes` modes.
pub fn calibrated_quantum_noise_channel(modes: usize) -> Result<GaussianChannel> {
    let s = calibrate_noise_squeeze(QUANTUM_NOISE_ETA, QUANTUM_NOISE_TARGET_PPT, modes)?;
    quantum_noise_channel(QUANTUM_NOISE_ETA, s, modes)
}

/// Per-pair DFG squeezing such that, after uniform loss `eta`, each pair's
/// vacuum-output PPT eigenvalue equals the matching entry of `targets`.
pub fn calibrate_dfg_squeeze(targets: &[f64], eta: f64) -> Result<Vec<f64>> {
    targets
        .iter()
        .map(|&target| {
            let ppt = |r: f64| {
                lossy_dfg_array(&DfgSpec::uniform(2, r), eta)
                    .and_then(|ch| first_pair_ppt(&ch))
                    .map_or(f64::NAN, |v| v - target)
            };
            bisect(ppt, 0.0, 10.0, 1e-13)
        })
        .collect()
}

/// The calibrated 16-mode lossy DFG array.
pub fn calibrated_dfg_spec() -> Result<DfgSpec> {
    Ok(DfgSpec {
        modes: 2 * DFG_TARGET_PPT.len(),
        squeeze: calibrate_dfg_squeeze(&DFG_TARGET_PPT, DFG_ETA)?,
    })
}

pub fn calibrated_lossy_dfg() -> Result<GaussianChannel> {
    lossy_dfg_array(&calibrated_dfg_spec()?, DFG_ETA)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn noise_squeeze_matches_closed_form() {
        // vacuum-output PPT is (1 - eta)(e^{-2s} - 1)
        let s = calibrate_noise_squeeze(0.1, -0.37, 2).unwrap();
        let expected = -0.5 * (1.0 - 0.37 / 0.9_f64).ln();
        assert!((s - expected).abs() < 1e-10);
    }

    #[test]
    fn dfg_squeeze_matches_closed_form() {
        // vacuum-output PPT is eta (e^{-2r} - 1)
        let rs = calibrate_dfg_squeeze(&[-0.27], 0.75).unwrap();
        let expected = -0.5 * (1.0 - 0.27 / 0.75_f64).ln();
        assert!((rs[0] - expected).abs() < 1e-10);
    }
}
