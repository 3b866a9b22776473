//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's own eigen-solvers or physicality code:
//! Hermitian spectra come from nalgebra's complex eigensolver, and random
//! physical channels are built by dilation, which makes them physical by
//! construction.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = DMatrix<f64>;

/// `Ω` for `xxpp` ordering.
pub fn omega(modes: usize) -> Mat {
    let mut o = Mat::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(k, k + modes)] = 1.0;
        o[(k + modes, k)] = -1.0;
    }
    o
}

/// Smallest eigenvalue of the Hermitian matrix `re + i·im`.
pub fn hermitian_min_eig(re: &Mat, im: &Mat) -> f64 {
    let h = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex::new(re[(i, j)], im[(i, j)])
    });
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `min eig(V + iΩ)`.
pub fn state_margin(v: &Mat) -> f64 {
    hermitian_min_eig(v, &omega(v.nrows() / 2))
}

/// `min eig(N + i(Ω - AΩAᵀ))`.
pub fn channel_margin(a: &Mat, n: &Mat) -> f64 {
    let o = omega(a.nrows() / 2);
    hermitian_min_eig(n, &(&o - a * &o * a.transpose()))
}

/// Partial transposition by flipping the sign of each listed mode's `p`.
pub fn ppt(v: &Mat, transposed: &[usize]) -> f64 {
    let modes = v.nrows() / 2;
    let mut f = Mat::identity(2 * modes, 2 * modes);
    for &m in transposed {
        f[(m + modes, m + modes)] = -1.0;
    }
    state_margin(&(&f * v * &f))
}

/// Vacuum-output covariance of the pair `(a, b)` of a channel.
pub fn pair_block(v: &Mat, a: usize, b: usize) -> Mat {
    let modes = v.nrows() / 2;
    let idx = [a, b, a + modes, b + modes];
    Mat::from_fn(4, 4, |i, j| v[(idx[i], idx[j])])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> Mat {
    let g = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0) * scale);
    (&g + g.transpose()) * 0.5
}

/// `exp(Ω H)` with `H` symmetric is symplectic.
pub fn random_symplectic(rng: &mut impl Rng, modes: usize, scale: f64) -> Mat {
    let h = random_symmetric(rng, 2 * modes, scale);
    (omega(modes) * h).exp()
}

/// Thermal covariance transformed by a random symplectic; pure half the
/// time so that boundary cases are exercised.
pub fn random_state_cov(rng: &mut impl Rng, modes: usize) -> Mat {
    let s = random_symplectic(rng, modes, 0.6);
    let pure = rng.random_bool(0.5);
    let nu: Vec<f64> = (0..modes)
        .map(|_| {
            if pure {
                1.0
            } else {
                1.0 + rng.random_range(0.0..1.5)
            }
        })
        .collect();
    let d = Mat::from_fn(2 * modes, 2 * modes, |i, j| {
        if i == j {
            nu[i % modes]
        } else {
            0.0
        }
    });
    let v = &s * d * s.transpose();
    (&v + v.transpose()) * 0.5
}

/// `(A, N)` from a random symplectic on system ⊕ environment with the
/// environment in a random physical state.
pub fn random_physical_channel(rng: &mut impl Rng, modes: usize) -> (Mat, Mat) {
    let env = rng.random_range(1..=modes);
    let total = modes + env;
    let s = random_symplectic(rng, total, 0.5);
    let v_env = random_state_cov(rng, env);
    // system quadratures of the joint xxpp vector
    let sys: Vec<usize> = (0..modes).chain(total..total + modes).collect();
    let envi: Vec<usize> = (modes..total).chain(total + modes..2 * total).collect();
    let a = Mat::from_fn(2 * modes, 2 * modes, |i, j| s[(sys[i], sys[j])]);
    let b = Mat::from_fn(2 * modes, 2 * env, |i, j| s[(sys[i], envi[j])]);
    let n = &b * v_env * b.transpose();
    (a, (&n + n.transpose()) * 0.5)
}
