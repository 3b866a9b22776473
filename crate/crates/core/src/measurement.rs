//! Probe sequences and shot-limited homodyne sampling.
//!
//! Every unit of work (one probe, one setting) draws from its own ChaCha
//! stream derived from `(seed, stage, index)`, so results do not depend on
//! how rayon schedules the work.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::symplectic::{
    apply_channel, coherent_state, GaussianChannel, GaussianState, QuadratureVector,
};

const STAGE_MEANS: u64 = 1 << 40;
const STAGE_VACUUM: u64 = 2 << 40;
const STAGE_EIGEN: u64 = 3 << 40;

pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn mean_stage_stream(index: usize) -> u64 {
    STAGE_MEANS | index as u64
}

pub(crate) fn eigen_stage_stream(index: usize) -> u64 {
    STAGE_EIGEN | index as u64
}

/// Which quadrature combination a setting measures (zero-based modes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SettingKind {
    X(usize),
    P(usize),
    XX(usize, usize),
    PP(usize, usize),
    XP(usize, usize),
}

impl fmt::Display for SettingKind {
    /// One-based labels: `x1`, `p2`, `x1+x3`, `p1+p2`, `x2+p2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SettingKind::X(i) => write!(f, "x{}", i + 1),
            SettingKind::P(i) => write!(f, "p{}", i + 1),
            SettingKind::XX(i, j) => write!(f, "x{}+x{}", i + 1, j + 1),
            SettingKind::PP(i, j) => write!(f, "p{}+p{}", i + 1, j + 1),
            SettingKind::XP(i, j) => write!(f, "x{}+p{}", i + 1, j + 1),
        }
    }
}

impl SettingKind {
    /// Quadrature indices (into the `xxpp` vector) summed by this setting.
    pub fn quadratures(&self, modes: usize) -> Vec<usize> {
        match *self {
            SettingKind::X(i) => vec![i],
            SettingKind::P(i) => vec![i + modes],
            SettingKind::XX(i, j) => vec![i, j],
            SettingKind::PP(i, j) => vec![i + modes, j + modes],
            SettingKind::XP(i, j) => vec![i, j + modes],
        }
    }
}

/// A homodyne setting: unnormalized direction `w` with 0/1 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub kind: SettingKind,
    pub direction: Vector,
}

impl MeasurementSetting {
    pub fn new(kind: SettingKind, modes: usize) -> Result<Self> {
        let idx = kind.quadratures(modes);
        if idx.iter().any(|&k| k >= 2 * modes) {
            return Err(Error::InvalidSetting(format!(
                "{kind} out of range for {modes} modes"
            )));
        }
        let mut direction = Vector::zeros(2 * modes);
        for k in idx {
            direction[k] = 1.0;
        }
        Ok(Self { kind, direction })
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }

    /// Model variance `wᵀ V w`.
    pub fn variance(&self, cov: &crate::linalg::Mat) -> f64 {
        (self.direction.transpose() * cov * &self.direction)[(0, 0)]
    }
}

/// Homodyne outcomes recorded for one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub setting: MeasurementSetting,
    pub samples: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Unbiased (n - 1) sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.samples.len();
        if n < 2 {
            return f64::NAN;
        }
        let mu = self.mean();
        self.samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1) as f64
    }
}

/// Output of one coherent probe: averaged output quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub input_mean: QuadratureVector,
    /// One-based probe number `n` for `q·e_n`; `0` marks the zero-input
    /// (displacement) reference.
    pub probe_index: usize,
    pub measured_output_mean: QuadratureVector,
    /// Shots averaged per output quadrature; `None` for exact expectations.
    pub shots_per_quadrature: Option<usize>,
}

impl ProbeRecord {
    /// Record with `offset` subtracted from the measured mean.
    pub fn offset_by(&self, offset: &QuadratureVector) -> Result<Self> {
        if offset.len() != self.measured_output_mean.len() {
            return Err(Error::dim("offset length does not match record"));
        }
        let shifted = self.measured_output_mean.as_vector() - offset.as_vector();
        Ok(Self {
            measured_output_mean: QuadratureVector::from_vector(shifted)?,
            ..self.clone()
        })
    }
}

/// Coherent probes `q·e_n`, `n = 1..2M`, each with vacuum covariance.
pub fn probe_sequence(modes: usize, q_amplitude: f64) -> Result<Vec<GaussianState>> {
    if !(q_amplitude > 0.0 && q_amplitude.is_finite()) {
        return Err(Error::param("q_amplitude", "must be positive and finite"));
    }
    if modes == 0 {
        return Err(Error::dim("probe sequence needs at least one mode"));
    }
    Ok((0..2 * modes)
        .map(|n| coherent_state(QuadratureVector::basis(modes, n, q_amplitude)))
        .collect())
}

/// `x_i`, `p_i`, `x_i+x_j`, `p_i+p_j` (`i < j`) and `x_i+p_j` (all `i, j`):
/// `2M + M(M-1) + M²` settings.
pub fn setting_catalog(modes: usize) -> Vec<MeasurementSetting> {
    let mut kinds = Vec::new();
    kinds.extend((0..modes).map(SettingKind::X));
    kinds.extend((0..modes).map(SettingKind::P));
    for i in 0..modes {
        for j in i + 1..modes {
            kinds.push(SettingKind::XX(i, j));
        }
    }
    for i in 0..modes {
        for j in i + 1..modes {
            kinds.push(SettingKind::PP(i, j));
        }
    }
    for i in 0..modes {
        for j in 0..modes {
            kinds.push(SettingKind::XP(i, j));
        }
    }
    kinds
        .into_iter()
        .map(|k| MeasurementSetting::new(k, modes).expect("catalog indices are in range"))
        .collect()
}

fn check_direction(st: &GaussianState, w: &Vector) -> Result<()> {
    if w.len() != 2 * st.modes() {
        return Err(Error::InvalidSetting(format!(
            "direction length {} does not match {} modes",
            w.len(),
            st.modes()
        )));
    }
    if w.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidSetting("zero direction".into()));
    }
    Ok(())
}

fn draw(
    st: &GaussianState,
    setting: &MeasurementSetting,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> SampleSet {
    let mean = setting.direction.dot(st.mean().as_vector());
    let sd = setting.variance(st.cov().as_matrix()).max(0.0).sqrt();
    let samples = (0..n)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    SampleSet {
        setting: setting.clone(),
        samples,
    }
}

/// `n` draws of `w·q̂` from `N(wᵀq, wᵀVw)`, reproducible from `seed`.
pub fn sample_quadrature(
    st: &GaussianState,
    setting: &MeasurementSetting,
    n: usize,
    seed: u64,
) -> Result<SampleSet> {
    check_direction(st, &setting.direction)?;
    if n == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    Ok(draw(st, setting, n, &mut substream(seed, 0)))
}

/// Samples every setting of `catalog` on `st`, `shots` each.
pub fn sample_catalog(
    st: &GaussianState,
    catalog: &[MeasurementSetting],
    shots: usize,
    seed: u64,
) -> Result<Vec<SampleSet>> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    for s in catalog {
        check_direction(st, &s.direction)?;
    }
    Ok(catalog
        .par_iter()
        .enumerate()
        .map(|(k, s)| draw(st, s, shots, &mut substream(seed, STAGE_VACUUM | k as u64)))
        .collect())
}

/// Averages `shots` samples of output quadrature `k` for each `k`.
pub(crate) fn measure_mean(
    output: &GaussianState,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> QuadratureVector {
    let mean = output.mean().as_vector();
    let cov = output.cov().as_matrix();
    let v = Vector::from_iterator(
        mean.len(),
        (0..mean.len()).map(|k| {
            let sd = cov[(k, k)].max(0.0).sqrt();
            let sum: f64 = (0..shots)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .sum();
            mean[k] + sd * sum / shots as f64
        }),
    );
    QuadratureVector::from_vector(v).expect("finite output mean")
}

fn record(
    input: &GaussianState,
    index: usize,
    measured: QuadratureVector,
    shots: Option<usize>,
) -> ProbeRecord {
    ProbeRecord {
        input_mean: input.mean().clone(),
        probe_index: index,
        measured_output_mean: measured,
        shots_per_quadrature: shots,
    }
}

/// Runs each probe through `ch` and measures its output mean with `shots`
/// samples per quadrature. Probe `k` of `probes` gets `probe_index = k + 1`.
pub fn measure_output_means(
    ch: &GaussianChannel,
    probes: &[GaussianState],
    shots: usize,
    seed: u64,
) -> Result<Vec<ProbeRecord>> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    probes
        .par_iter()
        .enumerate()
        .map(|(k, probe)| {
            let out = apply_channel(ch, probe)?;
            let mut rng = substream(seed, mean_stage_stream(k + 1));
            Ok(record(
                probe,
                k + 1,
                measure_mean(&out, shots, &mut rng),
                Some(shots),
            ))
        })
        .collect()
}

/// Infinite-shot limit of [`measure_output_means`].
pub fn exact_output_means(
    ch: &GaussianChannel,
    probes: &[GaussianState],
) -> Result<Vec<ProbeRecord>> {
    probes
        .iter()
        .enumerate()
        .map(|(k, probe)| {
            let out = apply_channel(ch, probe)?;
            Ok(record(probe, k + 1, out.mean().clone(), None))
        })
        .collect()
}

/// Zero-input reference record (`probe_index = 0`), used to estimate `d`.
pub fn measure_zero_input(
    ch: &GaussianChannel,
    shots: Option<usize>,
    seed: u64,
) -> Result<ProbeRecord> {
    let vac = crate::symplectic::vacuum_state(ch.modes())?;
    let out = apply_channel(ch, &vac)?;
    let measured = match shots {
        Some(0) => return Err(Error::param("shots", "must be at least 1")),
        Some(n) => measure_mean(&out, n, &mut substream(seed, mean_stage_stream(0))),
        None => out.mean().clone(),
    };
    Ok(record(&vac, 0, measured, shots))
}
