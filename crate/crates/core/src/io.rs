//! JSON exchange formats for channels, reconstruction results and
//! experiment configs, plus CSV figure tables.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces every matrix entry bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    noise_eigendecomposition, pair_ppt_eigenvalues, svd_channel, to_amplitude_phase,
};
use crate::calibration;
use crate::channels::{self, DfgSpec, GraphSpec, LossSpec};
use crate::characterization::{CharacterizationResult, MleOptions, ProtocolOptions};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::symplectic::{
    apply_channel, compose, physicality_margin, ppt_min_eigenvalue, vacuum_state, GaussianChannel,
    QuadratureVector,
};

pub const ORDERING: &str = "xxpp";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, reason: impl ToString) -> Error {
    Error::Format {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], field: &str) -> Result<Mat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::param(
            field,
            format!("must be a square {n}x{n} array"),
        ));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Reconstruction diagnostics stored alongside a result channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub loglik: f64,
    pub margin: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    pub shots: ShotCounts,
    pub q_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub mean_stage: Option<usize>,
    pub vacuum_stage: Option<usize>,
}

/// On-disk channel: `{modes, ordering, amp, noise, disp}` with row-major
/// nested arrays, plus optional diagnostics for reconstruction results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub modes: usize,
    pub ordering: String,
    pub amp: Vec<Vec<f64>>,
    pub noise: Vec<Vec<f64>>,
    pub disp: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl ChannelFile {
    pub fn from_channel(ch: &GaussianChannel) -> Self {
        Self {
            modes: ch.modes(),
            ordering: ORDERING.into(),
            amp: rows(ch.amp()),
            noise: rows(ch.noise()),
            disp: ch.disp().as_slice().to_vec(),
            diagnostics: None,
        }
    }

    pub fn from_result(res: &CharacterizationResult, opts: &ProtocolOptions) -> Result<Self> {
        let mut file = Self::from_channel(&res.channel()?);
        file.diagnostics = Some(Diagnostics {
            loglik: res.loglik,
            margin: res.margin,
            iterations: res.iterations,
            converged: res.converged,
            seed: opts.seed,
            shots: ShotCounts {
                mean_stage: opts.shots_mean_stage,
                vacuum_stage: opts.shots_vacuum_stage,
            },
            q_amplitude: opts.q_amplitude,
        });
        Ok(file)
    }

    pub fn to_channel(&self) -> Result<GaussianChannel> {
        if self.ordering != ORDERING {
            return Err(Error::param(
                "ordering",
                format!("expected \"{ORDERING}\", got \"{}\"", self.ordering),
            ));
        }
        let amp = from_rows(&self.amp, "amp")?;
        let noise = from_rows(&self.noise, "noise")?;
        if amp.nrows() != 2 * self.modes {
            return Err(Error::param(
                "amp",
                format!("expected {0}x{0} for {1} modes", 2 * self.modes, self.modes),
            ));
        }
        let disp = QuadratureVector::new(self.disp.clone())
            .map_err(|e| Error::param("disp", e.to_string()))?;
        GaussianChannel::new(amp, noise, disp)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("channel file serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        fs::write(path, self.to_json()).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| format_err(path, e))
    }
}

/// Uniform or per-pair squeezing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Squeeze {
    Uniform(f64),
    PerPair(Vec<f64>),
}

impl Squeeze {
    fn spec(&self, modes: usize) -> DfgSpec {
        match self {
            Squeeze::Uniform(r) => DfgSpec::uniform(modes, *r),
            Squeeze::PerPair(v) => DfgSpec {
                modes,
                squeeze: v.clone(),
            },
        }
    }
}

/// A named constructor with parameters. Mode indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constructor", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity {
        modes: usize,
    },
    TwoModeSqueezer {
        r: f64,
        mode_a: usize,
        mode_b: usize,
        modes: usize,
    },
    Dfg {
        modes: usize,
        squeeze: Squeeze,
    },
    LossyDfg {
        modes: usize,
        squeeze: Squeeze,
        eta: f64,
    },
    Loss(LossSpec),
    Cluster {
        adjacency: Vec<Vec<f64>>,
        squeeze: f64,
    },
    QuantumNoise {
        eta: f64,
        noise_squeeze: f64,
        modes: usize,
    },
    ClassicalNoise {
        noise: Vec<Vec<f64>>,
    },
    Explicit {
        amp: Vec<Vec<f64>>,
        noise: Vec<Vec<f64>>,
        #[serde(default)]
        disp: Option<Vec<f64>>,
    },
    /// Channel file on disk, relative to the config's directory.
    File {
        path: PathBuf,
    },
    /// Stages applied first to last.
    Sequence {
        stages: Vec<ChannelSpec>,
    },
    CalibratedQuantumNoise {
        modes: usize,
    },
    CalibratedLossyDfg,
}

impl ChannelSpec {
    pub fn build(&self, base_dir: &Path) -> Result<GaussianChannel> {
        match self {
            ChannelSpec::Identity { modes } => {
                if *modes == 0 {
                    return Err(Error::param("modes", "must be at least 1"));
                }
                Ok(GaussianChannel::identity(*modes))
            }
            ChannelSpec::TwoModeSqueezer {
                r,
                mode_a,
                mode_b,
                modes,
            } => channels::two_mode_squeezer(*r, *mode_a, *mode_b, *modes),
            ChannelSpec::Dfg { modes, squeeze } => channels::dfg_array(&squeeze.spec(*modes)),
            ChannelSpec::LossyDfg {
                modes,
                squeeze,
                eta,
            } => channels::lossy_dfg_array(&squeeze.spec(*modes), *eta),
            ChannelSpec::Loss(spec) => channels::loss_channel(spec),
            ChannelSpec::Cluster { adjacency, squeeze } => channels::cluster_channel(&GraphSpec {
                adjacency: from_rows(adjacency, "adjacency")?,
                squeeze: *squeeze,
            }),
            ChannelSpec::QuantumNoise {
                eta,
                noise_squeeze,
                modes,
            } => channels::quantum_noise_channel(*eta, *noise_squeeze, *modes),
            ChannelSpec::ClassicalNoise { noise } => {
                channels::classical_noise_channel(from_rows(noise, "noise")?)
            }
            ChannelSpec::Explicit { amp, noise, disp } => {
                let amp = from_rows(amp, "amp")?;
                let noise = from_rows(noise, "noise")?;
                let disp = match disp {
                    Some(d) => QuadratureVector::new(d.clone())
                        .map_err(|e| Error::param("disp", e.to_string()))?,
                    None => QuadratureVector::zeros((amp.nrows() / 2).max(1)),
                };
                GaussianChannel::new(amp, noise, disp)
            }
            ChannelSpec::File { path } => ChannelFile::read(&base_dir.join(path))?.to_channel(),
            ChannelSpec::Sequence { stages } => {
                let mut iter = stages.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::param("stages", "needs at least one stage"))?
                    .build(base_dir)?;
                iter.try_fold(first, |acc, s| compose(&s.build(base_dir)?, &acc))
            }
            ChannelSpec::CalibratedQuantumNoise { modes } => {
                calibration::calibrated_quantum_noise_channel(*modes)
            }
            ChannelSpec::CalibratedLossyDfg => calibration::calibrated_lossy_dfg(),
        }
    }
}

fn default_q() -> f64 {
    10.0
}

fn default_shots() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_q")]
    pub q_amplitude: f64,
    #[serde(default = "default_shots")]
    pub shots_mean_stage: usize,
    #[serde(default = "default_shots")]
    pub shots_vacuum_stage: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            q_amplitude: default_q(),
            shots_mean_stage: default_shots(),
            shots_vacuum_stage: default_shots(),
            seed: 0,
            max_iter: None,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_amplitude > 0.0 && self.q_amplitude.is_finite()) {
            return Err(Error::param("protocol.q_amplitude", "must be positive"));
        }
        if self.shots_mean_stage < 1 {
            return Err(Error::param(
                "protocol.shots_mean_stage",
                "must be at least 1",
            ));
        }
        if self.shots_vacuum_stage < 2 {
            return Err(Error::param(
                "protocol.shots_vacuum_stage",
                "must be at least 2 to form a sample variance",
            ));
        }
        Ok(())
    }

    pub fn options(&self) -> ProtocolOptions {
        let mut mle = MleOptions::default();
        if let Some(it) = self.max_iter {
            mle.max_iter = it;
        }
        ProtocolOptions {
            q_amplitude: self.q_amplitude,
            shots_mean_stage: Some(self.shots_mean_stage),
            shots_vacuum_stage: Some(self.shots_vacuum_stage),
            seed: self.seed,
            mle,
            ..ProtocolOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_figures: bool,
}

fn default_amp_tol() -> f64 {
    0.02
}

fn default_noise_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_amp_tol")]
    pub amp: f64,
    #[serde(default = "default_noise_tol")]
    pub noise: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            amp: default_amp_tol(),
            noise: default_noise_tol(),
        }
    }
}

/// A reproducible experiment: channel under test, protocol, outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| format_err(path, e))?;
        cfg.protocol.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Per-figure CSV tables for external plotting.
pub struct FigureWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

fn quad_labels(modes: usize) -> Vec<String> {
    (1..=modes)
        .map(|m| format!("x{m}"))
        .chain((1..=modes).map(|m| format!("p{m}")))
        .collect()
}

impl FigureWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn table(&mut self, name: &str, header: &[String], body: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| format_err(&path, e))?;
        w.write_record(header).map_err(|e| format_err(&path, e))?;
        for row in body {
            w.write_record(&row).map_err(|e| format_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Heat-map values of a `2M × 2M` matrix with quadrature labels.
    pub fn matrix(&mut self, name: &str, m: &Mat) -> Result<()> {
        let labels = quad_labels(m.nrows() / 2);
        let header: Vec<String> = std::iter::once(String::new())
            .chain(labels.clone())
            .collect();
        let body = m
            .row_iter()
            .zip(&labels)
            .map(|(r, l)| {
                std::iter::once(l.clone())
                    .chain(r.iter().map(|x| x.to_string()))
                    .collect()
            })
            .collect();
        self.table(name, &header, body)
    }

    fn eigenquadratures(&mut self, name: &str, vectors: &Mat) -> Result<()> {
        let header = ["eigenquadrature", "mode", "amplitude", "phase"].map(String::from);
        let mut body = Vec::new();
        for k in 0..vectors.ncols() {
            let col: Vec<f64> = vectors.column(k).iter().copied().collect();
            let ap = to_amplitude_phase(&col)?;
            for (m, (a, p)) in ap.amplitudes.iter().zip(&ap.phases).enumerate() {
                body.push(vec![
                    (k + 1).to_string(),
                    (m + 1).to_string(),
                    a.to_string(),
                    p.to_string(),
                ]);
            }
        }
        self.table(name, &header, body)
    }

    fn list(&mut self, name: &str, column: &str, values: &[f64]) -> Result<()> {
        let header = ["index".to_string(), column.to_string()];
        let body = values
            .iter()
            .enumerate()
            .map(|(k, v)| vec![(k + 1).to_string(), v.to_string()])
            .collect();
        self.table(name, &header, body)
    }
}

/// Summary written by the `analyze` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub modes: usize,
    pub margin: f64,
    pub singular_values: Vec<f64>,
    pub noise_eigenvalues: Vec<f64>,
    pub pair_ppt: Vec<PairPpt>,
    pub partitions: Vec<PartitionPpt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPpt {
    pub modes: (usize, usize),
    pub ppt_min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPpt {
    pub transposed: Vec<usize>,
    pub ppt_min_eigenvalue: f64,
}

/// Decomposes `ch`, writes every figure table into `dir`, and returns the
/// summary. `partitions` are zero-based transposed-mode subsets evaluated on
/// the full vacuum output.
pub fn analyze_channel(
    ch: &GaussianChannel,
    partitions: &[Vec<usize>],
    dir: &Path,
) -> Result<(AnalysisReport, Vec<PathBuf>)> {
    let svd = svd_channel(ch.amp())?;
    let noise = noise_eigendecomposition(ch.noise())?;
    let out = apply_channel(ch, &vacuum_state(ch.modes())?)?;
    let pairs = channels::conjugate_pairs(ch.modes());
    let pair_values = pair_ppt_eigenvalues(out.cov(), &pairs)?;
    let partitions = partitions
        .iter()
        .map(|p| {
            Ok(PartitionPpt {
                transposed: p.clone(),
                ppt_min_eigenvalue: ppt_min_eigenvalue(out.cov(), p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fig = FigureWriter::new(dir)?;
    fig.matrix("amp_matrix.csv", ch.amp())?;
    fig.matrix("noise_matrix.csv", ch.noise())?;
    fig.list("singular_values.csv", "singular_value", svd.d.as_slice())?;
    fig.eigenquadratures("input_eigenquadratures.csv", &svd.v)?;
    fig.eigenquadratures("output_eigenquadratures.csv", &svd.u)?;
    fig.list(
        "noise_eigenvalues.csv",
        "eigenvalue",
        noise.values.as_slice(),
    )?;
    fig.eigenquadratures("noise_eigenquadratures.csv", &noise.vectors)?;
    let header = ["mode_a", "mode_b", "ppt_min_eigenvalue"].map(String::from);
    let body = pairs
        .iter()
        .zip(&pair_values)
        .map(|(&(a, b), v)| vec![a.to_string(), b.to_string(), v.to_string()])
        .collect();
    fig.table("pair_ppt.csv", &header, body)?;

    let report = AnalysisReport {
        modes: ch.modes(),
        margin: physicality_margin(ch),
        singular_values: svd.d.iter().copied().collect(),
        noise_eigenvalues: noise.values.iter().copied().collect(),
        pair_ppt: pairs
            .into_iter()
            .zip(pair_values)
            .map(|(modes, v)| PairPpt {
                modes,
                ppt_min_eigenvalue: v,
            })
            .collect(),
        partitions,
    };
    let path = dir.join("analysis.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    let mut written = fig.written;
    written.push(path);
    Ok((report, written))
}

/// Heat-map tables of a channel's `A` and `N`.
pub fn write_matrix_figures(
    ch: &GaussianChannel,
    dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>> {
    let mut fig = FigureWriter::new(dir)?;
    fig.matrix(&format!("{prefix}amp_matrix.csv"), ch.amp())?;
    fig.matrix(&format!("{prefix}noise_matrix.csv"), ch.noise())?;
    Ok(fig.written)
}
