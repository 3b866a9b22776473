//! Decompositions of a (reconstructed) channel.
//!
//! The SVD `A = U D Vᵀ` splits the process into independent phase-sensitive
//! amplifiers: column `m` of `V` is an input eigenquadrature, column `m` of
//! `U` the corresponding output eigenquadrature and `d_m` its gain. Columns of
//! `V` (and noise eigenvectors) are signed so their largest-magnitude entry is
//! positive; `U` follows `V`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::measurement::{eigen_stage_stream, measure_mean, substream};
use crate::symplectic::{
    apply_channel, coherent_state, ppt_min_eigenvalue, CovarianceMatrix, GaussianChannel,
    GaussianState, QuadratureVector, SYMMETRY_TOL,
};

/// `A = U diag(d) Vᵀ` with `d` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenAnalysis {
    pub u: Mat,
    pub d: Vector,
    pub v: Mat,
}

impl EigenAnalysis {
    pub fn input_eigenquadrature(&self, m: usize) -> Vector {
        self.v.column(m).into_owned()
    }

    pub fn output_eigenquadrature(&self, m: usize) -> Vector {
        self.u.column(m).into_owned()
    }

    pub fn reconstruct(&self) -> Mat {
        &self.u * Mat::from_diagonal(&self.d) * self.v.transpose()
    }

    /// Index ranges of singular values equal within `rel_tol` (relative).
    pub fn degenerate_blocks(&self, rel_tol: f64) -> Vec<std::ops::Range<usize>> {
        group_close(self.d.as_slice(), rel_tol)
    }
}

fn group_close(values: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        let split = k == values.len() || {
            let scale = values[start].abs().max(values[k].abs()).max(1e-300);
            (values[start] - values[k]).abs() > rel_tol * scale
        };
        if split {
            blocks.push(start..k);
            start = k;
        }
    }
    blocks
}

pub fn svd_channel(amp: &Mat) -> Result<EigenAnalysis> {
    if amp.nrows() != amp.ncols() || amp.iter().any(|x| !x.is_finite()) {
        return Err(Error::dim("SVD needs a finite square matrix"));
    }
    let n = amp.nrows();
    let svd = amp.clone().svd(true, true);
    let (u_raw, vt_raw) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut u = Mat::zeros(n, n);
    let mut v = Mat::zeros(n, n);
    let mut d = Vector::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        u.set_column(col, &u_raw.column(k));
        v.set_column(col, &vt_raw.row(k).transpose());
        d[col] = svd.singular_values[k];
    }
    let signs = linalg::canonical_column_signs(&mut v);
    for (j, s) in signs.into_iter().enumerate() {
        if s < 0.0 {
            u.column_mut(j).neg_mut();
        }
    }
    Ok(EigenAnalysis { u, d, v })
}

/// Per-mode amplitude `√(x_m² + p_m²)` and phase `atan2(p_m, x_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudePhase {
    pub amplitudes: Vec<f64>,
    /// In `(-π, π]`; zero for zero-amplitude modes.
    pub phases: Vec<f64>,
}

pub fn to_amplitude_phase(vec: &[f64]) -> Result<ModeAmplitudePhase> {
    if vec.is_empty() || !vec.len().is_multiple_of(2) {
        return Err(Error::dim("quadrature vector length must be even"));
    }
    let m = vec.len() / 2;
    let (amplitudes, phases) = (0..m)
        .map(|k| {
            let (x, p) = (vec[k], vec[k + m]);
            let amp = x.hypot(p);
            let phase = if amp == 0.0 {
                0.0
            } else {
                let a = p.atan2(x);
                if a <= -PI {
                    PI
                } else {
                    a
                }
            };
            (amp, phase)
        })
        .unzip();
    Ok(ModeAmplitudePhase { amplitudes, phases })
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a noise matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseEigen {
    pub values: Vector,
    pub vectors: Mat,
}

impl NoiseEigen {
    pub fn degenerate_blocks(&self, abs_tol: f64) -> Vec<std::ops::Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 0;
        let vals = self.values.as_slice();
        for k in 1..=vals.len() {
            if k == vals.len() || (vals[start] - vals[k]).abs() > abs_tol {
                blocks.push(start..k);
                start = k;
            }
        }
        blocks
    }
}

pub fn noise_eigendecomposition(noise: &Mat) -> Result<NoiseEigen> {
    if noise.nrows() != noise.ncols() {
        return Err(Error::dim("noise matrix must be square"));
    }
    if linalg::asymmetry(noise) > SYMMETRY_TOL {
        return Err(Error::dim("noise matrix must be symmetric"));
    }
    let (values, mut vectors) = linalg::sym_eigen_desc(noise);
    linalg::canonical_column_signs(&mut vectors);
    Ok(NoiseEigen { values, vectors })
}

/// Output state predicted by the channel model.
pub fn predict_output(ch: &GaussianChannel, input: &GaussianState) -> Result<GaussianState> {
    apply_channel(ch, input)
}

/// PPT minimum eigenvalue of each listed two-mode reduced state, with the
/// second mode of each pair transposed.
pub fn pair_ppt_eigenvalues(cov: &CovarianceMatrix, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    pairs
        .iter()
        .map(|&(a, b)| ppt_min_eigenvalue(&cov.reduced(&[a, b])?, &[1]))
        .collect()
}

/// Direct-probe check of one eigenquadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenquadratureCheck {
    pub predicted_gain: f64,
    pub measured_gain: f64,
    /// `(û · u_m)²` with `û` the normalized measured output mean.
    pub overlap: f64,
    /// Squared norm of `û` projected onto the output eigenspace of the
    /// (possibly degenerate) singular value `d_m`.
    pub subspace_overlap: f64,
    pub measured_output: Vector,
}

/// Injects `q·v_m` for every input eigenquadrature and compares the measured
/// output with `d_m u_m`. `shots = None` gives the noiseless limit. The
/// channel displacement is removed from the measured means.
pub fn verify_eigenquadratures(
    ch: &GaussianChannel,
    analysis: &EigenAnalysis,
    q_amplitude: f64,
    shots: Option<usize>,
    seed: u64,
) -> Result<Vec<EigenquadratureCheck>> {
    let n = 2 * ch.modes();
    if analysis.v.nrows() != n || analysis.u.nrows() != n {
        return Err(Error::dim("analysis does not match channel dimension"));
    }
    if q_amplitude.is_nan() || q_amplitude <= 0.0 {
        return Err(Error::param("q_amplitude", "must be positive"));
    }
    if shots == Some(0) {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let blocks = analysis.degenerate_blocks(1e-8);
    (0..n)
        .map(|m| {
            let probe = coherent_state(QuadratureVector::from_vector(
                analysis.input_eigenquadrature(m) * q_amplitude,
            )?);
            let out = apply_channel(ch, &probe)?;
            let measured = match shots {
                Some(s) => measure_mean(&out, s, &mut substream(seed, eigen_stage_stream(m))),
                None => out.mean().clone(),
            };
            let measured = measured.as_vector() - ch.disp().as_vector();
            let norm = measured.norm();
            let unit = &measured / norm.max(f64::MIN_POSITIVE);
            let block = blocks
                .iter()
                .find(|b| b.contains(&m))
                .expect("m is covered");
            let basis = analysis.u.columns(block.start, block.len()).into_owned();
            Ok(EigenquadratureCheck {
                predicted_gain: analysis.d[m],
                measured_gain: norm / q_amplitude,
                overlap: unit.dot(&analysis.output_eigenquadrature(m)).powi(2),
                subspace_overlap: linalg::subspace_overlap(&unit, &basis),
                measured_output: measured,
            })
        })
        .collect()
}
