//! Constructors for the channels characterized in practice: difference
//! frequency generation (DFG) amplifier arrays, cluster-state generators,
//! mode-dependent loss and noise channels, plus their building blocks.
//!
//! Conjugate mode pairing throughout is `m ↔ M - 1 - m` (zero-based).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::symplectic::{compose, GaussianChannel};

/// Zero-based conjugate partner of `mode` among `modes`.
pub fn conjugate_mode(mode: usize, modes: usize) -> usize {
    modes - 1 - mode
}

/// The `M/2` conjugate pairs `(m, M-1-m)` with `m < M/2`.
pub fn conjugate_pairs(modes: usize) -> Vec<(usize, usize)> {
    (0..modes / 2)
        .map(|m| (m, conjugate_mode(m, modes)))
        .collect()
}

fn check_mode(mode: usize, modes: usize, name: &str) -> Result<()> {
    if mode >= modes {
        return Err(Error::param(
            name,
            format!("mode {mode} out of range for {modes} modes"),
        ));
    }
    Ok(())
}

fn check_finite(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::param(name, "must be finite"));
    }
    Ok(())
}

/// Symplectic channel with amplification matrix `amp` and no noise.
pub fn unitary_channel(amp: Mat) -> Result<GaussianChannel> {
    let n = amp.nrows();
    GaussianChannel::from_amp_noise(amp, Mat::zeros(n, n))
}

fn tms_matrix(r: f64, a: usize, b: usize, modes: usize) -> Mat {
    let (c, s) = (r.cosh(), r.sinh());
    let mut m = Mat::identity(2 * modes, 2 * modes);
    let (pa, pb) = (a + modes, b + modes);
    m[(a, a)] = c;
    m[(b, b)] = c;
    m[(a, b)] = s;
    m[(b, a)] = s;
    m[(pa, pa)] = c;
    m[(pb, pb)] = c;
    m[(pa, pb)] = -s;
    m[(pb, pa)] = -s;
    m
}

/// Phase-insensitive two-mode amplifier: `x_a' = cosh r x_a + sinh r x_b`,
/// `p_a' = cosh r p_a - sinh r p_b` (and symmetrically for `b`).
pub fn two_mode_squeezer(
    r: f64,
    mode_a: usize,
    mode_b: usize,
    total_modes: usize,
) -> Result<GaussianChannel> {
    check_finite(r, "r")?;
    check_mode(mode_a, total_modes, "mode_a")?;
    check_mode(mode_b, total_modes, "mode_b")?;
    if mode_a == mode_b {
        return Err(Error::param("mode_b", "must differ from mode_a"));
    }
    unitary_channel(tms_matrix(r, mode_a, mode_b, total_modes))
}

/// Single-mode squeezer: `x' = e^r x`, `p' = e^-r p`.
pub fn single_mode_squeezer(r: f64, mode: usize, total_modes: usize) -> Result<GaussianChannel> {
    check_finite(r, "r")?;
    check_mode(mode, total_modes, "mode")?;
    let mut m = Mat::identity(2 * total_modes, 2 * total_modes);
    m[(mode, mode)] = r.exp();
    m[(mode + total_modes, mode + total_modes)] = (-r).exp();
    unitary_channel(m)
}

/// An array of two-mode amplifiers on the conjugate pairs `(m, M-1-m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfgSpec {
    pub modes: usize,
    /// Squeezing parameter for each pair, indexed by the lower mode.
    pub squeeze: Vec<f64>,
}

impl DfgSpec {
    pub fn uniform(modes: usize, r: f64) -> Self {
        Self {
            modes,
            squeeze: vec![r; modes / 2],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.modes == 0 || !self.modes.is_multiple_of(2) {
            return Err(Error::param(
                "modes",
                format!(
                    "DFG array needs a positive even mode count, got {}",
                    self.modes
                ),
            ));
        }
        if self.squeeze.len() != self.modes / 2 {
            return Err(Error::param(
                "squeeze",
                format!(
                    "expected {} pair parameters, got {}",
                    self.modes / 2,
                    self.squeeze.len()
                ),
            ));
        }
        self.squeeze
            .iter()
            .try_for_each(|&r| check_finite(r, "squeeze"))
    }
}

pub fn dfg_array(spec: &DfgSpec) -> Result<GaussianChannel> {
    spec.validate()?;
    let m = spec.modes;
    // the pairs are disjoint, so the product of the pair matrices is just
    // their superposition on the identity
    let mut amp = Mat::identity(2 * m, 2 * m);
    for ((a, b), &r) in conjugate_pairs(m).into_iter().zip(&spec.squeeze) {
        amp = tms_matrix(r, a, b, m) * amp;
    }
    unitary_channel(amp)
}

/// DFG array followed by uniform loss `eta` on every mode.
pub fn lossy_dfg_array(spec: &DfgSpec, eta: f64) -> Result<GaussianChannel> {
    let loss = loss_channel(&LossSpec::uniform(spec.modes, eta))?;
    compose(&loss, &dfg_array(spec)?)
}

/// Elementary passive (orthogonal symplectic) transformations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PassiveElement {
    /// Real beamsplitter mixing `a` and `b` by angle `theta`.
    BeamSplitter { a: usize, b: usize, theta: f64 },
    /// Phase rotation of a single mode.
    PhaseShift { mode: usize, phi: f64 },
}

/// A passive interferometer, applied element by element in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Rotation {
    pub elements: Vec<PassiveElement>,
}

impl Rotation {
    pub fn beamsplitter(a: usize, b: usize, theta: f64) -> Self {
        Self {
            elements: vec![PassiveElement::BeamSplitter { a, b, theta }],
        }
    }

    pub fn then(mut self, element: PassiveElement) -> Self {
        self.elements.push(element);
        self
    }

    /// The `2M × 2M` orthogonal symplectic matrix of the interferometer.
    pub fn matrix(&self, modes: usize) -> Result<Mat> {
        let n = 2 * modes;
        let mut total = Mat::identity(n, n);
        for el in &self.elements {
            let mut m = Mat::identity(n, n);
            match *el {
                PassiveElement::BeamSplitter { a, b, theta } => {
                    check_mode(a, modes, "rotation.a")?;
                    check_mode(b, modes, "rotation.b")?;
                    check_finite(theta, "rotation.theta")?;
                    if a == b {
                        return Err(Error::param("rotation.b", "beamsplitter needs two modes"));
                    }
                    let (c, s) = (theta.cos(), theta.sin());
                    for off in [0, modes] {
                        m[(a + off, a + off)] = c;
                        m[(a + off, b + off)] = s;
                        m[(b + off, a + off)] = -s;
                        m[(b + off, b + off)] = c;
                    }
                }
                PassiveElement::PhaseShift { mode, phi } => {
                    check_mode(mode, modes, "rotation.mode")?;
                    check_finite(phi, "rotation.phi")?;
                    let (c, s) = (phi.cos(), phi.sin());
                    let p = mode + modes;
                    m[(mode, mode)] = c;
                    m[(mode, p)] = -s;
                    m[(p, mode)] = s;
                    m[(p, p)] = c;
                }
            }
            total = m * total;
        }
        Ok(total)
    }
}

/// Mode-dependent loss, optionally acting in a rotated mode basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub transmissivities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Rotation>,
}

impl LossSpec {
    pub fn uniform(modes: usize, eta: f64) -> Self {
        Self {
            transmissivities: vec![eta; modes],
            rotation: None,
        }
    }

    pub fn modes(&self) -> usize {
        self.transmissivities.len()
    }
}

/// `A = R diag(√η) Rᵀ`, `N = R diag(1-η) Rᵀ` with `R` the optional rotation.
pub fn loss_channel(spec: &LossSpec) -> Result<GaussianChannel> {
    let m = spec.modes();
    if m == 0 {
        return Err(Error::param("transmissivities", "needs at least one mode"));
    }
    if let Some(bad) = spec
        .transmissivities
        .iter()
        .find(|&&e| !(0.0..=1.0).contains(&e))
    {
        return Err(Error::param(
            "transmissivities",
            format!("{bad} is outside [0, 1]"),
        ));
    }
    let diag = |f: &dyn Fn(f64) -> f64| {
        let d: Vec<f64> = spec
            .transmissivities
            .iter()
            .chain(spec.transmissivities.iter())
            .map(|&e| f(e))
            .collect();
        Mat::from_diagonal(&nalgebra::DVector::from_vec(d))
    };
    let mut amp = diag(&|e| e.sqrt());
    let mut noise = diag(&|e| 1.0 - e);
    if let Some(rot) = &spec.rotation {
        let r = rot.matrix(m)?;
        amp = &r * amp * r.transpose();
        noise = linalg::symmetrize(&(&r * noise * r.transpose()));
    }
    GaussianChannel::from_amp_noise(amp, noise)
}

/// Weighted graph defining a Gaussian cluster state.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub adjacency: Mat,
    pub squeeze: f64,
}

impl GraphSpec {
    /// Unit-weight path graph on `modes` nodes.
    pub fn linear(modes: usize, squeeze: f64) -> Self {
        let mut adjacency = Mat::zeros(modes, modes);
        for k in 1..modes {
            adjacency[(k - 1, k)] = 1.0;
            adjacency[(k, k - 1)] = 1.0;
        }
        Self { adjacency, squeeze }
    }

    pub fn modes(&self) -> usize {
        self.adjacency.nrows()
    }
}

/// Symplectic map taking vacuum to the Gaussian cluster state of `spec`:
/// every mode is squeezed in `p` by `r`, then `p → p + G x` entangles
/// neighbours. The nullifiers `p_i - Σ_j G_ij x_j` of the output have
/// variance `e^{-2r}`.
pub fn cluster_channel(spec: &GraphSpec) -> Result<GaussianChannel> {
    let g = &spec.adjacency;
    let m = g.nrows();
    if m == 0 || g.ncols() != m {
        return Err(Error::param(
            "adjacency",
            "must be a non-empty square matrix",
        ));
    }
    if linalg::asymmetry(g) > 1e-12 {
        return Err(Error::param("adjacency", "must be symmetric"));
    }
    if (0..m).any(|k| g[(k, k)] != 0.0) || g.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(
            "adjacency",
            "must be finite with zero diagonal",
        ));
    }
    check_finite(spec.squeeze, "squeeze")?;
    let mut shear = Mat::identity(2 * m, 2 * m);
    shear.view_mut((m, 0), (m, m)).copy_from(g);
    let mut squeeze = Mat::identity(2 * m, 2 * m);
    for k in 0..m {
        squeeze[(k, k)] = spec.squeeze.exp();
        squeeze[(k + m, k + m)] = (-spec.squeeze).exp();
    }
    unitary_channel(shear * squeeze)
}

/// Variances of the graph nullifiers `p_i - Σ_j G_ij x_j` for covariance `v`.
pub fn nullifier_variances(adjacency: &Mat, v: &Mat) -> Vec<f64> {
    let m = adjacency.nrows();
    (0..m)
        .map(|i| {
            let mut w = nalgebra::DVector::zeros(2 * m);
            w[i + m] = 1.0;
            for j in 0..m {
                w[j] = -adjacency[(i, j)];
            }
            (w.transpose() * v * &w)[(0, 0)]
        })
        .collect()
}

/// Two-mode-squeezed-vacuum covariance of parameter `r` on every conjugate pair.
pub fn paired_tmsv_covariance(r: f64, modes: usize) -> Mat {
    let mut amp = Mat::identity(2 * modes, 2 * modes);
    for (a, b) in conjugate_pairs(modes) {
        amp = tms_matrix(r, a, b, modes) * amp;
    }
    &amp * amp.transpose()
}

/// Attenuation `√eta` on every mode while mixing in a two-mode-squeezed
/// environment: `A = √eta I`, `N = (1 - eta) V_env` where `V_env` is the
/// covariance of two-mode squeezed vacua of parameter `noise_squeeze` on the
/// conjugate pairs.
pub fn quantum_noise_channel(
    eta: f64,
    noise_squeeze: f64,
    modes: usize,
) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("{eta} is outside [0, 1]")));
    }
    check_finite(noise_squeeze, "noise_squeeze")?;
    if modes == 0 || !modes.is_multiple_of(2) {
        return Err(Error::param(
            "modes",
            format!("needs a positive even mode count, got {modes}"),
        ));
    }
    let n = 2 * modes;
    let env = paired_tmsv_covariance(noise_squeeze, modes);
    GaussianChannel::from_amp_noise(
        Mat::identity(n, n) * eta.sqrt(),
        linalg::symmetrize(&(env * (1.0 - eta))),
    )
}

/// `A = I`, `N = n_cl`: classical additive noise.
pub fn classical_noise_channel(n_cl: Mat) -> Result<GaussianChannel> {
    let n = n_cl.nrows();
    GaussianChannel::from_amp_noise(Mat::identity(n, n), n_cl)
}
