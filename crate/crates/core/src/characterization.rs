//! Two-stage reconstruction of an unknown channel.
//!
//! Stage one injects coherent probes `q·e_n` and reads the amplification
//! matrix column by column. Stage two sends vacuum, measures the homodyne
//! catalog, and fits the noise matrix by maximum likelihood under the channel
//! physicality constraint `N + i(Ω - ÂΩÂᵀ) ⪰ 0`.
//!
//! The likelihood is the Gaussian one for per-setting sample variances:
//!
//! ```text
//! L(N) = Σ_k n_k/2 · [ -ln σ_k²(N) - s_k²/σ_k²(N) ],   σ_k²(N) = w_kᵀ (ÂÂᵀ + N) w_k
//! ```
//!
//! It is maximized by projected gradient ascent with an Armijo backtracking
//! line search. The projection onto the feasible set is computed with
//! Dykstra's alternating projections between the PSD cone of Hermitian
//! matrices and the affine set of Hermitian matrices whose imaginary part is
//! `Ω - ÂΩÂᵀ`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::measurement::{
    exact_output_means, measure_output_means, measure_zero_input, probe_sequence, sample_catalog,
    setting_catalog, MeasurementSetting, ProbeRecord, SampleSet, SettingKind,
};
use crate::symplectic::{
    apply_channel, channel_defect, raw_channel_margin, vacuum_state, CovarianceMatrix,
    GaussianChannel, QuadratureVector,
};

/// Floor applied to model variances so the likelihood stays finite.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// `Â_mn = q'^(n)_m / q` from one record per probe `n = 1..2M`.
pub fn estimate_amp(records: &[ProbeRecord], q_amplitude: f64) -> Result<Mat> {
    if !(q_amplitude.is_finite() && q_amplitude != 0.0) {
        return Err(Error::param("q_amplitude", "must be finite and non-zero"));
    }
    let dim = records
        .first()
        .map(|r| r.measured_output_mean.len())
        .ok_or_else(|| Error::InvalidProbes("no records".into()))?;
    let mut amp = Mat::zeros(dim, dim);
    let mut seen = vec![false; dim];
    for rec in records {
        let n = rec.probe_index;
        if n == 0 || n > dim {
            return Err(Error::InvalidProbes(format!(
                "probe index {n} outside 1..={dim}"
            )));
        }
        if rec.measured_output_mean.len() != dim {
            return Err(Error::InvalidProbes("records disagree on dimension".into()));
        }
        if std::mem::replace(&mut seen[n - 1], true) {
            return Err(Error::InvalidProbes(format!("duplicate probe index {n}")));
        }
        amp.set_column(n - 1, &(rec.measured_output_mean.as_vector() / q_amplitude));
    }
    let missing: Vec<String> = (0..dim)
        .filter(|&k| !seen[k])
        .map(|k| (k + 1).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::InvalidProbes(format!(
            "missing probe indices {}",
            missing.join(", ")
        )));
    }
    Ok(amp)
}

/// `d̂` is the output mean measured for zero input.
pub fn estimate_disp(zero_input_record: &ProbeRecord) -> QuadratureVector {
    zero_input_record.measured_output_mean.clone()
}

/// Sample variance of one homodyne setting together with its shot count.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceObservation {
    pub kind: SettingKind,
    pub quadratures: Vec<usize>,
    pub variance: f64,
    pub shots: usize,
}

impl VarianceObservation {
    pub fn from_samples(set: &SampleSet) -> Result<Self> {
        if set.len() < 2 {
            return Err(Error::InvalidSetting(format!(
                "{} has {} samples, need at least 2",
                set.setting.label(),
                set.len()
            )));
        }
        Ok(Self {
            kind: set.setting.kind,
            quadratures: nonzero(&set.setting),
            variance: set.variance(),
            shots: set.len(),
        })
    }

    /// Exact variance `wᵀVw` weighted as if measured with `shots` samples.
    pub fn exact(setting: &MeasurementSetting, cov: &Mat, shots: usize) -> Self {
        Self {
            kind: setting.kind,
            quadratures: nonzero(setting),
            variance: setting.variance(cov),
            shots,
        }
    }

    fn model_variance(&self, m: &Mat) -> f64 {
        match self.quadratures[..] {
            [i] => m[(i, i)],
            [i, j] => m[(i, i)] + m[(j, j)] + 2.0 * m[(i, j)],
            _ => {
                let q = &self.quadratures;
                q.iter()
                    .flat_map(|&i| q.iter().map(move |&j| (i, j)))
                    .map(|ij| m[ij])
                    .sum()
            }
        }
    }

    /// Adds `c · w wᵀ` to `acc`.
    fn add_outer(&self, acc: &mut Mat, c: f64) {
        for &i in &self.quadratures {
            for &j in &self.quadratures {
                acc[(i, j)] += c;
            }
        }
    }
}

fn nonzero(setting: &MeasurementSetting) -> Vec<usize> {
    setting
        .direction
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(k, _)| k)
        .collect()
}

pub fn observations_from_samples(samples: &[SampleSet]) -> Result<Vec<VarianceObservation>> {
    samples
        .iter()
        .map(VarianceObservation::from_samples)
        .collect()
}

/// Noise-free observations of covariance `cov` over the full catalog.
pub fn exact_observations(cov: &Mat, shots: usize) -> Vec<VarianceObservation> {
    setting_catalog(cov.nrows() / 2)
        .iter()
        .map(|s| VarianceObservation::exact(s, cov, shots))
        .collect()
}

/// Inverts the catalog: `V_ii` from single quadratures and
/// `V_ij = [Var(q_i + q_j) - Var(q_i) - Var(q_j)] / 2` for the sums.
pub fn covariance_from_observations(obs: &[VarianceObservation]) -> Result<CovarianceMatrix> {
    let dim = obs
        .iter()
        .flat_map(|o| o.quadratures.iter().copied())
        .max()
        .map(|k| k + 1)
        .ok_or_else(|| Error::MissingSettings(vec!["<all>".into()]))?;
    let modes = dim.div_ceil(2);
    let table: HashMap<SettingKind, f64> = obs.iter().map(|o| (o.kind, o.variance)).collect();
    let missing: Vec<String> = setting_catalog(modes)
        .iter()
        .filter(|s| !table.contains_key(&s.kind))
        .map(|s| s.label())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSettings(missing));
    }
    let n = 2 * modes;
    let mut v = Mat::zeros(n, n);
    for i in 0..modes {
        v[(i, i)] = table[&SettingKind::X(i)];
        v[(i + modes, i + modes)] = table[&SettingKind::P(i)];
    }
    for (&kind, &var) in &table {
        let (a, b) = match kind {
            SettingKind::XX(i, j) => (i, j),
            SettingKind::PP(i, j) => (i + modes, j + modes),
            SettingKind::XP(i, j) => (i, j + modes),
            _ => continue,
        };
        let c = 0.5 * (var - v[(a, a)] - v[(b, b)]);
        v[(a, b)] = c;
        v[(b, a)] = c;
    }
    CovarianceMatrix::new(v)
}

/// Covariance estimate from a complete catalog of homodyne samples.
pub fn assemble_covariance(samples: &[SampleSet]) -> Result<CovarianceMatrix> {
    covariance_from_observations(&observations_from_samples(samples)?)
}

/// Gaussian log-likelihood of the vacuum-stage data for noise `noise`.
pub fn log_likelihood(amp_hat: &Mat, obs: &[VarianceObservation], noise: &Mat) -> f64 {
    let total = amp_hat * amp_hat.transpose() + noise;
    loglik_with_base(&total, obs)
}

fn loglik_with_base(total: &Mat, obs: &[VarianceObservation]) -> f64 {
    obs.iter()
        .map(|o| {
            let s2 = o.model_variance(total).max(VARIANCE_FLOOR);
            0.5 * o.shots as f64 * (-s2.ln() - o.variance / s2)
        })
        .sum()
}

fn gradient(total: &Mat, obs: &[VarianceObservation]) -> Mat {
    let n = total.nrows();
    let mut g = Mat::zeros(n, n);
    for o in obs {
        let s2 = o.model_variance(total).max(VARIANCE_FLOOR);
        let c = 0.5 * o.shots as f64 * (o.variance / (s2 * s2) - 1.0 / s2);
        o.add_outer(&mut g, c);
    }
    g
}

/// Largest eigenvalue of the Gauss-Newton curvature `E ↦ Σ h_k (wᵀEw) w wᵀ`
/// at `total`, by power iteration.
fn curvature_scale(total: &Mat, obs: &[VarianceObservation]) -> f64 {
    let n = total.nrows();
    let weights: Vec<f64> = obs
        .iter()
        .map(|o| {
            let s2 = o.model_variance(total).max(VARIANCE_FLOOR);
            0.5 * o.shots as f64 / (s2 * s2)
        })
        .collect();
    let apply = |e: &Mat| {
        let mut out = Mat::zeros(n, n);
        for (o, &h) in obs.iter().zip(&weights) {
            o.add_outer(&mut out, h * o.model_variance(e));
        }
        out
    };
    let mut e = Mat::from_element(n, n, 1.0);
    let mut lambda = 0.0;
    for _ in 0..50 {
        let next = apply(&e);
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        let prev = lambda;
        lambda = norm / e.norm();
        e = next / norm;
        if (lambda - prev).abs() <= 1e-6 * lambda {
            break;
        }
    }
    lambda.max(f64::MIN_POSITIVE)
}

/// Settings of the alternating projection onto the feasible noise set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Extra eigenvalue headroom added by the terminal feasibility shift.
    pub shift_eps: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-12,
            shift_eps: 1e-12,
        }
    }
}

/// Nearest (Frobenius) `N'` to `noise` with `N' + i·defect ⪰ 0`.
///
/// Dykstra iterations alternate between the PSD cone and the affine set
/// `{Im H = defect}`; the last iterate is pushed into the cone by a multiple of
/// the identity if the iteration stopped short.
pub fn project_feasible(noise: &Mat, defect: &Mat, opts: &ProjectionOptions) -> Mat {
    let noise = linalg::symmetrize(noise);
    if linalg::hermitian_min_eigenvalue(&noise, defect) >= 0.0 {
        return noise;
    }
    let n = noise.nrows();
    // x lives in the affine set, so only its real part needs tracking
    let mut x = noise.clone();
    let (mut p_re, mut p_im) = (Mat::zeros(n, n), Mat::zeros(n, n));
    let mut q_re = Mat::zeros(n, n);
    for _ in 0..opts.max_iter {
        let (y_re, y_im) = linalg::hermitian_psd_projection(&(&x + &p_re), &(defect + &p_im));
        p_re = &x + &p_re - &y_re;
        p_im = defect + &p_im - &y_im;
        let x_next = linalg::symmetrize(&(&y_re + &q_re));
        q_re = &y_re + &q_re - &x_next;
        let step = (&x_next - &x).norm();
        x = x_next;
        if step <= opts.tol * (1.0 + x.norm()) {
            break;
        }
    }
    let margin = linalg::hermitian_min_eigenvalue(&x, defect);
    if margin < 0.0 {
        x += Mat::identity(n, n) * (-margin + opts.shift_eps);
    }
    x
}

/// Optimizer settings for [`mle_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Stop when the relative log-likelihood change falls below this.
    pub rel_tol: f64,
    pub armijo: f64,
    /// Smallest step tried by the line search before giving up.
    pub min_step: f64,
    pub projection: ProjectionOptions,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            rel_tol: 1e-10,
            armijo: 1e-4,
            min_step: 1e-10,
            projection: ProjectionOptions::default(),
        }
    }
}

/// Output of the reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationResult {
    pub amp_hat: Mat,
    pub noise_hat: Mat,
    pub disp_hat: QuadratureVector,
    pub loglik: f64,
    /// Physicality margin of `(Â, N̂)` (raw minimum eigenvalue).
    pub margin: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood of the seed followed by every accepted iterate.
    pub loglik_trace: Vec<f64>,
}

impl CharacterizationResult {
    pub fn modes(&self) -> usize {
        self.amp_hat.nrows() / 2
    }

    pub fn channel(&self) -> Result<GaussianChannel> {
        GaussianChannel::new(
            self.amp_hat.clone(),
            self.noise_hat.clone(),
            self.disp_hat.clone(),
        )
    }
}

/// Least-squares noise seed `V̂ - ÂÂᵀ` (the catalog determines `V̂` exactly).
pub fn least_squares_seed(amp_hat: &Mat, obs: &[VarianceObservation]) -> Result<Mat> {
    let v_hat = covariance_from_observations(obs)?;
    if v_hat.as_matrix().nrows() != amp_hat.nrows() {
        return Err(Error::dim(format!(
            "observations describe {} quadratures, Â has {}",
            v_hat.as_matrix().nrows(),
            amp_hat.nrows()
        )));
    }
    Ok(linalg::symmetrize(
        &(v_hat.as_matrix() - amp_hat * amp_hat.transpose()),
    ))
}

/// Maximum-likelihood noise matrix subject to `N + i(Ω - ÂΩÂᵀ) ⪰ 0`.
///
/// Starts from the projected least-squares seed and only ever accepts
/// iterates that increase the likelihood, so `loglik_trace` is monotone.
pub fn mle_noise(
    amp_hat: &Mat,
    obs: &[VarianceObservation],
    opts: &MleOptions,
) -> Result<CharacterizationResult> {
    if amp_hat.nrows() != amp_hat.ncols()
        || !amp_hat.nrows().is_multiple_of(2)
        || amp_hat.nrows() == 0
    {
        return Err(Error::dim("Â must be square with even dimension"));
    }
    let dim = amp_hat.nrows();
    let base = amp_hat * amp_hat.transpose();
    let defect = channel_defect(amp_hat);

    let mut noise = project_feasible(
        &least_squares_seed(amp_hat, obs)?,
        &defect,
        &opts.projection,
    );
    let mut ll = loglik_with_base(&(&base + &noise), obs);
    let mut trace = vec![ll];
    let scale = curvature_scale(&(&base + &noise), obs);

    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let grad = gradient(&(&base + &noise), obs) / scale;
        let mut step = 1.0;
        let mut accepted = None;
        while step >= opts.min_step {
            let trial = project_feasible(&(&noise + &grad * step), &defect, &opts.projection);
            let trial_ll = loglik_with_base(&(&base + &trial), obs);
            let ascent = (&trial - &noise).dot(&grad) * scale;
            if trial_ll > ll && trial_ll - ll >= opts.armijo * ascent {
                accepted = Some((trial, trial_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            // no ascent direction left within the feasible set
            converged = true;
            break;
        };
        let change = (next_ll - ll).abs() / ll.abs().max(1.0);
        noise = next;
        ll = next_ll;
        trace.push(ll);
        if change < opts.rel_tol {
            converged = true;
            break;
        }
    }
    debug_assert_eq!(noise.nrows(), dim);

    Ok(CharacterizationResult {
        margin: raw_channel_margin(amp_hat, &noise),
        amp_hat: amp_hat.clone(),
        noise_hat: noise,
        disp_hat: QuadratureVector::zeros(dim / 2),
        loglik: ll,
        iterations,
        converged,
        loglik_trace: trace,
    })
}

/// Probe and reconstruction settings for [`characterize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOptions {
    pub q_amplitude: f64,
    /// Shots per output quadrature for each coherent probe; `None` uses exact
    /// expectations.
    pub shots_mean_stage: Option<usize>,
    /// Shots per homodyne setting in the vacuum stage; `None` uses exact
    /// variances (weighted as `exact_weight` shots).
    pub shots_vacuum_stage: Option<usize>,
    pub exact_weight: usize,
    pub seed: u64,
    pub mle: MleOptions,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            q_amplitude: 10.0,
            shots_mean_stage: Some(10_000),
            shots_vacuum_stage: Some(10_000),
            exact_weight: 10_000,
            seed: 0,
            mle: MleOptions::default(),
        }
    }
}

impl ProtocolOptions {
    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots_mean_stage = Some(shots);
        self.shots_vacuum_stage = Some(shots);
        self
    }

    pub fn noiseless() -> Self {
        Self {
            shots_mean_stage: None,
            shots_vacuum_stage: None,
            ..Self::default()
        }
    }
}

/// Coherent-probe stage: `(d̂, Â)`.
pub fn characterize_amp(
    ch: &GaussianChannel,
    opts: &ProtocolOptions,
) -> Result<(QuadratureVector, Mat)> {
    let probes = probe_sequence(ch.modes(), opts.q_amplitude)?;
    let zero = measure_zero_input(ch, opts.shots_mean_stage, opts.seed)?;
    let disp = estimate_disp(&zero);
    let records = match opts.shots_mean_stage {
        Some(shots) => measure_output_means(ch, &probes, shots, opts.seed)?,
        None => exact_output_means(ch, &probes)?,
    };
    let records = records
        .iter()
        .map(|r| r.offset_by(&disp))
        .collect::<Result<Vec<_>>>()?;
    Ok((disp, estimate_amp(&records, opts.q_amplitude)?))
}

/// Vacuum stage: variance observations over the full catalog.
pub fn vacuum_stage(
    ch: &GaussianChannel,
    opts: &ProtocolOptions,
) -> Result<Vec<VarianceObservation>> {
    let out = apply_channel(ch, &vacuum_state(ch.modes())?)?;
    match opts.shots_vacuum_stage {
        Some(shots) => {
            let samples = sample_catalog(&out, &setting_catalog(ch.modes()), shots, opts.seed)?;
            observations_from_samples(&samples)
        }
        None => Ok(exact_observations(out.cov().as_matrix(), opts.exact_weight)),
    }
}

/// The full protocol against a simulated channel under test.
pub fn characterize(
    ch: &GaussianChannel,
    opts: &ProtocolOptions,
) -> Result<CharacterizationResult> {
    let (disp, amp_hat) = characterize_amp(ch, opts)?;
    let obs = vacuum_stage(ch, opts)?;
    let mut result = mle_noise(&amp_hat, &obs, &opts.mle)?;
    result.disp_hat = disp;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{loss_channel, two_mode_squeezer, LossSpec};
    use crate::linalg::max_abs_diff;
    use crate::measurement::ProbeRecord;

    fn noiseless_records(ch: &GaussianChannel, q: f64) -> Vec<ProbeRecord> {
        exact_output_means(ch, &probe_sequence(ch.modes(), q).unwrap()).unwrap()
    }

    #[test]
    fn identity_amp_estimate() {
        let recs = noiseless_records(&GaussianChannel::identity(2), 10.0);
        assert_eq!(estimate_amp(&recs, 10.0).unwrap(), Mat::identity(4, 4));
    }

    #[test]
    fn squeezer_amp_estimate() {
        let ch = two_mode_squeezer(0.5, 0, 1, 2).unwrap();
        let a = estimate_amp(&noiseless_records(&ch, 10.0), 10.0).unwrap();
        assert!(max_abs_diff(&a, ch.amp()) < 1e-12);
    }

    #[test]
    fn amp_estimate_errors() {
        let recs = noiseless_records(&GaussianChannel::identity(1), 1.0);
        assert!(estimate_amp(&recs, 0.0).is_err());
        assert!(estimate_amp(&recs[..1], 1.0).is_err());
        let dup = vec![recs[0].clone(), recs[0].clone()];
        assert!(estimate_amp(&dup, 1.0).is_err());
    }

    #[test]
    fn displacement_is_recovered_and_removed() {
        let d = QuadratureVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let ch = two_mode_squeezer(0.3, 0, 1, 2)
            .unwrap()
            .with_disp(d.clone())
            .unwrap();
        let opts = ProtocolOptions {
            shots_mean_stage: Some(10_000),
            ..ProtocolOptions::default()
        };
        let (d_hat, a_hat) = characterize_amp(&ch, &opts).unwrap();
        // 5σ with σ = sqrt(V'_mm / shots) ≤ sqrt(cosh 0.6 / 10⁴)
        let bound = 5.0 * (0.6_f64.cosh() / 1e4).sqrt();
        let err = d_hat.as_vector() - d.as_vector();
        assert!(err.amax() < bound);
        // each column is a difference of two independent means, divided by q
        assert!(max_abs_diff(&a_hat, ch.amp()) < 2.0_f64.sqrt() * bound / opts.q_amplitude);

        let sym = two_mode_squeezer(0.3, 0, 1, 2).unwrap();
        let zero = measure_zero_input(&sym, None, 0).unwrap();
        assert_eq!(estimate_disp(&zero).as_slice(), &[0.0; 4]);
    }

    #[test]
    fn assemble_vacuum_and_tmsv_exactly() {
        let v = Mat::identity(4, 4);
        let cov = covariance_from_observations(&exact_observations(&v, 100)).unwrap();
        assert!(max_abs_diff(cov.as_matrix(), &v) < 1e-15);

        let r: f64 = 0.4;
        let ch = two_mode_squeezer(r, 0, 1, 2).unwrap();
        let v = ch.amp() * ch.amp().transpose();
        let obs = exact_observations(&v, 100);
        let xx = obs
            .iter()
            .find(|o| o.kind == SettingKind::XX(0, 1))
            .unwrap();
        assert!((xx.variance - 2.0 * ((2.0 * r).cosh() + (2.0 * r).sinh())).abs() < 1e-12);
        let cov = covariance_from_observations(&obs).unwrap();
        assert!((cov.as_matrix()[(0, 1)] - (2.0 * r).sinh()).abs() < 1e-12);
        let xp = obs
            .iter()
            .find(|o| o.kind == SettingKind::XP(0, 0))
            .unwrap();
        assert!((xp.variance - 2.0 * (2.0 * r).cosh()).abs() < 1e-12);
        assert!(cov.as_matrix()[(0, 2)].abs() < 1e-12);
    }

    #[test]
    fn incomplete_catalog_lists_missing_labels() {
        let obs = exact_observations(&Mat::identity(4, 4), 10);
        let partial: Vec<_> = obs
            .into_iter()
            .filter(|o| o.kind != SettingKind::XP(1, 0))
            .collect();
        match covariance_from_observations(&partial) {
            Err(Error::MissingSettings(labels)) => assert_eq!(labels, vec!["x2+p1".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projection_lands_in_feasible_set() {
        let amp = Mat::identity(2, 2) * 0.5_f64.sqrt();
        let defect = channel_defect(&amp);
        let bad = Mat::identity(2, 2) * 0.2;
        let proj = project_feasible(&bad, &defect, &ProjectionOptions::default());
        assert!(raw_channel_margin(&amp, &proj) >= -1e-12);
        // nearest feasible point for a scalar multiple of I is 0.5·I
        assert!(max_abs_diff(&proj, &(Mat::identity(2, 2) * 0.5)) < 1e-6);
        let ok = Mat::identity(2, 2) * 0.7;
        assert_eq!(
            project_feasible(&ok, &defect, &ProjectionOptions::default()),
            ok
        );
    }

    #[test]
    fn mle_recovers_interior_truth_exactly() {
        let ch = loss_channel(&LossSpec::uniform(2, 0.6)).unwrap();
        let noise = ch.noise() + Mat::identity(4, 4) * 0.1;
        let v = ch.amp() * ch.amp().transpose() + &noise;
        let res = mle_noise(
            ch.amp(),
            &exact_observations(&v, 10_000),
            &MleOptions::default(),
        )
        .unwrap();
        assert!((&res.noise_hat - &noise).norm() < 1e-6);
        assert!(res.converged);
    }

    #[test]
    fn mle_boundary_truth_stays_near_boundary() {
        let ch = loss_channel(&LossSpec::uniform(2, 0.3)).unwrap();
        let v = ch.amp() * ch.amp().transpose() + ch.noise();
        let res = mle_noise(
            ch.amp(),
            &exact_observations(&v, 10_000),
            &MleOptions::default(),
        )
        .unwrap();
        assert!(
            res.margin >= -1e-8 && res.margin <= 1e-3,
            "margin {}",
            res.margin
        );
        assert!((&res.noise_hat - ch.noise()).norm() < 1e-6);
    }
}
