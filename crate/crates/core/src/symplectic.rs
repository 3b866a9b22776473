//! Gaussian states and channels in `xxpp` quadrature ordering.
//!
//! Units: `x = a + a†`, `p = (a - a†)/i`, so `[x, p] = 2i` and the vacuum
//! covariance is the identity. A quadrature vector of `M` modes is laid out as
//! `(x_1, .., x_M, p_1, .., p_M)`. Mode indices in this API are zero-based.
//!
//! A channel `(A, N, d)` maps a state `(q, V)` to `(A q + d, A V Aᵀ + N)`; it
//! is physical when the Hermitian matrix `N + iΩ - iAΩAᵀ` is positive
//! semi-definite.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};

/// Margins within this distance of zero are reported as exactly zero.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Maximum absolute asymmetry accepted for covariance and noise matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;

type CMat = nalgebra::DMatrix<Complex<f64>>;

fn snap(margin: f64) -> f64 {
    if margin.abs() <= BOUNDARY_TOL {
        0.0
    } else {
        margin
    }
}

fn check_even_square(m: &Mat, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dim(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::dim(format!(
            "{what} must have even positive dimension, got {}",
            m.nrows()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::dim(format!("{what} has non-finite entries")));
    }
    Ok(m.nrows() / 2)
}

/// Mean quadrature vector `(x_1..x_M, p_1..p_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureVector(Vector);

impl QuadratureVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::from_vector(Vector::from_vec(entries))
    }

    pub fn from_vector(v: Vector) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(Error::dim(format!(
                "quadrature vector length must be even and positive, got {}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::dim("quadrature vector has non-finite entries"));
        }
        Ok(Self(v))
    }

    pub fn zeros(modes: usize) -> Self {
        Self(Vector::zeros(2 * modes))
    }

    /// `amplitude · e_index` (zero-based quadrature index).
    pub fn basis(modes: usize, index: usize, amplitude: f64) -> Self {
        let mut v = Vector::zeros(2 * modes);
        v[index] = amplitude;
        Self(v)
    }

    pub fn modes(&self) -> usize {
        self.0.len() / 2
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn x(&self, mode: usize) -> f64 {
        self.0[mode]
    }

    pub fn p(&self, mode: usize) -> f64 {
        self.0[self.modes() + mode]
    }
}

/// Real symmetric `2M × 2M` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(Mat);

impl CovarianceMatrix {
    /// Validates shape and symmetry (within [`SYMMETRY_TOL`]) and stores the
    /// exactly symmetrized matrix. Physicality is not enforced here; see
    /// [`state_physicality`].
    pub fn new(m: Mat) -> Result<Self> {
        check_even_square(&m, "covariance matrix")?;
        let asym = linalg::asymmetry(&m);
        if asym > SYMMETRY_TOL {
            return Err(Error::dim(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(Self(linalg::symmetrize(&m)))
    }

    pub fn identity(modes: usize) -> Self {
        Self(Mat::identity(2 * modes, 2 * modes))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn as_matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }

    /// Covariance of the listed modes (zero-based), in `xxpp` order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let m = self.modes();
        if modes.is_empty() {
            return Err(Error::dim("reduced state needs at least one mode"));
        }
        if let Some(&bad) = modes.iter().find(|&&k| k >= m) {
            return Err(Error::dim(format!("mode {bad} out of range for {m} modes")));
        }
        let idx: Vec<usize> = modes
            .iter()
            .copied()
            .chain(modes.iter().map(|&k| k + m))
            .collect();
        let k = idx.len();
        Ok(Self(Mat::from_fn(k, k, |i, j| self.0[(idx[i], idx[j])])))
    }
}

/// A Gaussian state: mean quadratures plus covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: QuadratureVector,
    cov: CovarianceMatrix,
}

impl GaussianState {
    /// Builds a state, rejecting mismatched dimensions and covariances that
    /// violate `V + iΩ ⪰ 0` by more than [`BOUNDARY_TOL`].
    pub fn new(mean: QuadratureVector, cov: CovarianceMatrix) -> Result<Self> {
        let st = Self::from_parts(mean, cov)?;
        let margin = state_physicality(&st.cov);
        if margin < 0.0 {
            return Err(Error::param(
                "covariance",
                format!("violates the uncertainty relation (margin {margin:e})"),
            ));
        }
        Ok(st)
    }

    /// Like [`GaussianState::new`] without the physicality check.
    pub fn from_parts(mean: QuadratureVector, cov: CovarianceMatrix) -> Result<Self> {
        if mean.len() != cov.as_matrix().nrows() {
            return Err(Error::dim(format!(
                "mean length {} does not match covariance dimension {}",
                mean.len(),
                cov.as_matrix().nrows()
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn modes(&self) -> usize {
        self.mean.modes()
    }

    pub fn mean(&self) -> &QuadratureVector {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }
}

/// The symplectic form `Ω = [[0, I], [-I, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm(Mat);

impl SymplecticForm {
    pub fn as_matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }
}

pub fn omega(modes: usize) -> Result<SymplecticForm> {
    if modes == 0 {
        return Err(Error::dim("symplectic form needs at least one mode"));
    }
    Ok(SymplecticForm(omega_matrix(modes)))
}

pub(crate) fn omega_matrix(modes: usize) -> Mat {
    let n = 2 * modes;
    let mut m = Mat::zeros(n, n);
    for k in 0..modes {
        m[(k, k + modes)] = 1.0;
        m[(k + modes, k)] = -1.0;
    }
    m
}

/// A bosonic Gaussian channel `(A, N, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    amp: Mat,
    noise: Mat,
    disp: QuadratureVector,
}

impl GaussianChannel {
    pub fn new(amp: Mat, noise: Mat, disp: QuadratureVector) -> Result<Self> {
        let m = check_even_square(&amp, "amplification matrix")?;
        let mn = check_even_square(&noise, "noise matrix")?;
        if m != mn || disp.modes() != m {
            return Err(Error::dim(format!(
                "channel parts disagree: A is {}x{}, N is {}x{}, d has length {}",
                amp.nrows(),
                amp.ncols(),
                noise.nrows(),
                noise.ncols(),
                disp.len()
            )));
        }
        let asym = linalg::asymmetry(&noise);
        if asym > SYMMETRY_TOL {
            return Err(Error::dim(format!(
                "noise matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(Self {
            amp,
            noise: linalg::symmetrize(&noise),
            disp,
        })
    }

    /// Channel with `d = 0`.
    pub fn from_amp_noise(amp: Mat, noise: Mat) -> Result<Self> {
        let m = amp.nrows() / 2;
        Self::new(amp, noise, QuadratureVector::zeros(m.max(1)))
    }

    pub fn identity(modes: usize) -> Self {
        let n = 2 * modes;
        Self {
            amp: Mat::identity(n, n),
            noise: Mat::zeros(n, n),
            disp: QuadratureVector::zeros(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.amp.nrows() / 2
    }

    pub fn amp(&self) -> &Mat {
        &self.amp
    }

    pub fn noise(&self) -> &Mat {
        &self.noise
    }

    pub fn disp(&self) -> &QuadratureVector {
        &self.disp
    }

    pub fn with_disp(mut self, disp: QuadratureVector) -> Result<Self> {
        if disp.modes() != self.modes() {
            return Err(Error::dim("displacement length does not match channel"));
        }
        self.disp = disp;
        Ok(self)
    }

    pub fn margin(&self) -> f64 {
        physicality_margin(self)
    }

    pub fn is_physical(&self) -> bool {
        self.margin() >= 0.0
    }
}

/// `q' = A q + d`, `V' = A V Aᵀ + N` (output symmetrized).
pub fn apply_channel(ch: &GaussianChannel, st: &GaussianState) -> Result<GaussianState> {
    if ch.modes() != st.modes() {
        return Err(Error::dim(format!(
            "channel acts on {} modes, state has {}",
            ch.modes(),
            st.modes()
        )));
    }
    let mean = &ch.amp * st.mean.as_vector() + ch.disp.as_vector();
    let cov = &ch.amp * st.cov.as_matrix() * ch.amp.transpose() + &ch.noise;
    Ok(GaussianState {
        mean: QuadratureVector(mean),
        cov: CovarianceMatrix(linalg::symmetrize(&cov)),
    })
}

/// The channel `second ∘ first`.
pub fn compose(second: &GaussianChannel, first: &GaussianChannel) -> Result<GaussianChannel> {
    if second.modes() != first.modes() {
        return Err(Error::dim(format!(
            "cannot compose channels on {} and {} modes",
            second.modes(),
            first.modes()
        )));
    }
    let a2 = &second.amp;
    let amp = a2 * &first.amp;
    let noise = linalg::symmetrize(&(a2 * &first.noise * a2.transpose() + &second.noise));
    let disp = a2 * first.disp.as_vector() + second.disp.as_vector();
    Ok(GaussianChannel {
        amp,
        noise,
        disp: QuadratureVector(disp),
    })
}

/// Minimum eigenvalue of `N + i(Ω - AΩAᵀ)`; non-negative means physical.
/// Values within [`BOUNDARY_TOL`] of zero are returned as `0.0`.
pub fn physicality_margin(ch: &GaussianChannel) -> f64 {
    snap(raw_channel_margin(&ch.amp, &ch.noise))
}

pub(crate) fn channel_defect(amp: &Mat) -> Mat {
    let om = omega_matrix(amp.nrows() / 2);
    &om - amp * &om * amp.transpose()
}

pub(crate) fn raw_channel_margin(amp: &Mat, noise: &Mat) -> f64 {
    linalg::hermitian_min_eigenvalue(noise, &channel_defect(amp))
}

/// Minimum eigenvalue of `V + iΩ` (snapped to zero within [`BOUNDARY_TOL`]).
pub fn state_physicality(v: &CovarianceMatrix) -> f64 {
    snap(linalg::hermitian_min_eigenvalue(
        &v.0,
        &omega_matrix(v.modes()),
    ))
}

/// Complex matrices `G`, `H` of the field relation `E' = G E + H E*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexChannelPair {
    pub g: CMat,
    pub h: CMat,
}

impl ComplexChannelPair {
    pub fn new(g: CMat, h: CMat) -> Result<Self> {
        if g.shape() != h.shape() || g.nrows() != g.ncols() || g.nrows() == 0 {
            return Err(Error::dim(format!(
                "G {:?} and H {:?} must be equal square shapes",
                g.shape(),
                h.shape()
            )));
        }
        Ok(Self { g, h })
    }

    pub fn modes(&self) -> usize {
        self.g.nrows()
    }
}

/// `A = [[Re(G+H), Im(H-G)], [Im(G+H), Re(G-H)]]`.
pub fn to_amp_matrix(pair: &ComplexChannelPair) -> Mat {
    let m = pair.modes();
    let sum = &pair.g + &pair.h;
    let diff = &pair.g - &pair.h;
    let mut a = Mat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = sum[(i, j)].re;
            a[(i, j + m)] = -diff[(i, j)].im;
            a[(i + m, j)] = sum[(i, j)].im;
            a[(i + m, j + m)] = diff[(i, j)].re;
        }
    }
    a
}

/// Inverse of [`to_amp_matrix`].
pub fn from_amp_matrix(a: &Mat) -> Result<ComplexChannelPair> {
    let m = check_even_square(a, "amplification matrix")?;
    let mut g = CMat::zeros(m, m);
    let mut h = CMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let xx = a[(i, j)];
            let xp = a[(i, j + m)];
            let px = a[(i + m, j)];
            let pp = a[(i + m, j + m)];
            g[(i, j)] = Complex::new((xx + pp) / 2.0, (px - xp) / 2.0);
            h[(i, j)] = Complex::new((xx - pp) / 2.0, (px + xp) / 2.0);
        }
    }
    Ok(ComplexChannelPair { g, h })
}

pub fn vacuum_state(modes: usize) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::dim("vacuum needs at least one mode"));
    }
    Ok(GaussianState {
        mean: QuadratureVector::zeros(modes),
        cov: CovarianceMatrix::identity(modes),
    })
}

pub fn coherent_state(mean: QuadratureVector) -> GaussianState {
    let m = mean.modes();
    GaussianState {
        mean,
        cov: CovarianceMatrix::identity(m),
    }
}

/// Symplectic eigenvalues of a positive-definite covariance, descending.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    let min = linalg::sym_min_eigenvalue(&v.0);
    let scale = linalg::max_abs(&v.0).max(1.0);
    if min <= 1e-12 * scale {
        return Err(Error::DegenerateMatrix(format!(
            "covariance is not positive definite (min eigenvalue {min:e})"
        )));
    }
    // |eig(iΩV)| are the singular values of V^½ Ω V^½, each appearing twice.
    let root = linalg::sym_sqrt(&v.0);
    let k = &root * omega_matrix(v.modes()) * &root;
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv.into_iter().step_by(2).collect())
}

/// Partial transpose over the given (zero-based) modes: `p_m → -p_m`.
pub fn partial_transpose(v: &CovarianceMatrix, transposed: &[usize]) -> Result<CovarianceMatrix> {
    let m = v.modes();
    check_partition(m, transposed)?;
    let mut sign = vec![1.0; 2 * m];
    for &k in transposed {
        sign[m + k] = -1.0;
    }
    Ok(CovarianceMatrix(Mat::from_fn(2 * m, 2 * m, |i, j| {
        sign[i] * sign[j] * v.0[(i, j)]
    })))
}

fn check_partition(modes: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidPartition("transposed subset is empty".into()));
    }
    let mut seen = vec![false; modes];
    for &k in subset {
        if k >= modes {
            return Err(Error::InvalidPartition(format!(
                "mode {k} out of range for {modes} modes"
            )));
        }
        if seen[k] {
            return Err(Error::InvalidPartition(format!("mode {k} listed twice")));
        }
        seen[k] = true;
    }
    if seen.iter().all(|&s| s) {
        return Err(Error::InvalidPartition(
            "transposed subset covers every mode".into(),
        ));
    }
    Ok(())
}

/// Minimum eigenvalue of `Ṽ + iΩ` where `Ṽ` is the partial transpose over
/// `transposed`. Negative values certify entanglement across the cut.
pub fn ppt_min_eigenvalue(v: &CovarianceMatrix, transposed: &[usize]) -> Result<f64> {
    let pt = partial_transpose(v, transposed)?;
    Ok(linalg::hermitian_min_eigenvalue(
        &pt.0,
        &omega_matrix(v.modes()),
    ))
}

/// Classification of a physicality margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Physicality {
    Physical,
    Boundary,
    Unphysical,
}

impl Physicality {
    pub fn classify(margin: f64) -> Self {
        if margin.abs() <= BOUNDARY_TOL {
            Physicality::Boundary
        } else if margin > 0.0 {
            Physicality::Physical
        } else {
            Physicality::Unphysical
        }
    }
}
