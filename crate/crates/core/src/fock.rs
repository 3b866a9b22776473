//! Truncated Fock-space reference for one or two modes.
//!
//! States are stored as amplitude arrays over photon numbers `0..=cutoff` per
//! mode and moments are evaluated from ladder-operator matrix elements, with
//! no reference to the phase-space formalism. Loss is applied through its
//! purification: a beamsplitter against a vacuum ancilla whose photon number
//! is then traced out, leaving an ensemble of pure components.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};

type C64 = Complex<f64>;

/// Maximum tolerated norm lost to truncation.
pub const LEAKAGE_LIMIT: f64 = 1e-6;
pub const DEFAULT_CUTOFF: usize = 40;

/// A pure state of one or two truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    amplitudes: Vec<C64>,
}

/// Quadrature moments in `xxpp` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMoments {
    pub mean: Vector,
    pub cov: Mat,
}

impl FockState {
    fn dim(&self) -> usize {
        self.cutoff + 1
    }

    fn index(&self, n: &[usize]) -> usize {
        n.iter().fold(0, |acc, &k| acc * self.dim() + k)
    }

    fn occupation(&self, idx: usize) -> [usize; 2] {
        let d = self.dim();
        if self.modes == 1 {
            [idx, 0]
        } else {
            [idx / d, idx % d]
        }
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        check_shape(modes, cutoff)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); (cutoff + 1).pow(modes as u32)];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, n: &[usize]) -> C64 {
        self.amplitudes[self.index(n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability weight lost to truncation.
    pub fn leakage(&self) -> f64 {
        (1.0 - self.norm_sqr()).max(0.0)
    }

    fn checked(self) -> Result<Self> {
        let leakage = self.leakage();
        if leakage > LEAKAGE_LIMIT {
            return Err(Error::LeakageExceeded {
                leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        Ok(self)
    }

    /// `a_mode |ψ⟩` in the same truncated basis.
    fn lower(&self, mode: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.amplitudes.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let n = self.occupation(idx);
            if n[mode] == 0 {
                continue;
            }
            let mut m = n;
            m[mode] -= 1;
            out[self.index(&m[..self.modes])] += amp * (n[mode] as f64).sqrt();
        }
        out
    }
}

fn check_shape(modes: usize, cutoff: usize) -> Result<()> {
    if !(1..=2).contains(&modes) {
        return Err(Error::param(
            "modes",
            "Fock oracle supports one or two modes",
        ));
    }
    if cutoff == 0 {
        return Err(Error::param("cutoff", "must be positive"));
    }
    Ok(())
}

/// `Σ_n tanh(r)^n / cosh(r) |n, n⟩`, truncated at `cutoff`.
pub fn build_two_mode_squeezer_state(r: f64, cutoff: usize) -> Result<FockState> {
    check_shape(2, cutoff)?;
    if !r.is_finite() {
        return Err(Error::param("r", "must be finite"));
    }
    let mut st = FockState::vacuum(2, cutoff)?;
    st.amplitudes[0] = C64::new(0.0, 0.0);
    let (t, c) = (r.tanh(), r.cosh());
    for n in 0..=cutoff {
        let idx = st.index(&[n, n]);
        st.amplitudes[idx] = C64::new(t.powi(n as i32) / c, 0.0);
    }
    st.checked()
}

/// Single-mode coherent state `|α⟩`, truncated at `cutoff`.
pub fn coherent_fock_state(alpha: C64, cutoff: usize) -> Result<FockState> {
    check_shape(1, cutoff)?;
    let mut st = FockState::vacuum(1, cutoff)?;
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..=cutoff {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        st.amplitudes[n] = term;
    }
    st.checked()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Moments of a mixture given as unnormalized pure components.
fn ensemble_moments(components: &[FockState]) -> FockMoments {
    let modes = components[0].modes;
    let total: f64 = components.iter().map(FockState::norm_sqr).sum();
    let mut a = vec![C64::new(0.0, 0.0); modes];
    let mut aa = vec![vec![C64::new(0.0, 0.0); modes]; modes];
    let mut ada = vec![vec![C64::new(0.0, 0.0); modes]; modes];
    for st in components {
        let lowered: Vec<Vec<C64>> = (0..modes).map(|m| st.lower(m)).collect();
        for i in 0..modes {
            a[i] += inner(&st.amplitudes, &lowered[i]);
            for j in 0..modes {
                let both = FockState {
                    amplitudes: lowered[j].clone(),
                    ..st.clone()
                }
                .lower(i);
                aa[i][j] += inner(&st.amplitudes, &both);
                ada[i][j] += inner(&lowered[i], &lowered[j]);
            }
        }
    }
    let norm = |z: C64| z / total;
    // q_k = α a + ᾱ a†, α = 1 for x and -i for p
    let alpha = |k: usize| {
        if k < modes {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, -1.0)
        }
    };
    let mode_of = |k: usize| k % modes;
    let n = 2 * modes;
    let mean = Vector::from_fn(n, |k, _| 2.0 * (alpha(k) * norm(a[mode_of(k)])).re);
    let cov = Mat::from_fn(n, n, |k, l| {
        let (i, j) = (mode_of(k), mode_of(l));
        let (ak, al) = (alpha(k), alpha(l));
        let a_ij = norm(aa[i][j]);
        let ad_ij = norm(ada[i][j]); // ⟨a_i† a_j⟩
        let a_adj = norm(ada[j][i]) + if i == j { 1.0 } else { 0.0 }; // ⟨a_i a_j†⟩
        let qq = ak * al * a_ij
            + ak * al.conj() * a_adj
            + ak.conj() * al * ad_ij
            + ak.conj() * al.conj() * a_ij.conj();
        qq.re - mean[k] * mean[l]
    });
    FockMoments { mean, cov }
}

/// Means `⟨q̂_k⟩` and symmetrized covariances of a truncated state.
pub fn quadrature_moments(st: &FockState) -> Result<FockMoments> {
    let leakage = st.leakage();
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::LeakageExceeded {
            leakage,
            limit: LEAKAGE_LIMIT,
        });
    }
    Ok(ensemble_moments(std::slice::from_ref(st)))
}

/// Moments after mode `mode` passes a beamsplitter of transmissivity `eta`
/// with a vacuum ancilla, the ancilla being discarded.
pub fn apply_loss_fock(st: &FockState, eta: f64, mode: usize) -> Result<FockMoments> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("{eta} is outside [0, 1]")));
    }
    if mode >= st.modes {
        return Err(Error::param("mode", "out of range"));
    }
    quadrature_moments(st)?;
    let c = st.cutoff;
    // |n⟩|0⟩ → Σ_l √C(n,l) η^{(n-l)/2} (1-η)^{l/2} |n-l⟩|l⟩
    let components: Vec<FockState> = (0..=c)
        .map(|l| {
            let mut comp = FockState {
                amplitudes: vec![C64::new(0.0, 0.0); st.amplitudes.len()],
                ..st.clone()
            };
            for (idx, amp) in st.amplitudes.iter().enumerate() {
                let n = st.occupation(idx);
                if n[mode] < l {
                    continue;
                }
                let kept = n[mode] - l;
                let weight =
                    (binomial(n[mode], l) * eta.powi(kept as i32) * (1.0 - eta).powi(l as i32))
                        .sqrt();
                let mut m = n;
                m[mode] = kept;
                let target = comp.index(&m[..st.modes]);
                comp.amplitudes[target] += amp * weight;
            }
            comp
        })
        .collect();
    Ok(ensemble_moments(&components))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn zero_squeezing_is_vacuum() {
        let st = build_two_mode_squeezer_state(0.0, 10).unwrap();
        assert_eq!(st.amplitude(&[0, 0]), C64::new(1.0, 0.0));
        let m = quadrature_moments(&st).unwrap();
        assert!(max_abs_diff(&m.cov, &Mat::identity(4, 4)) < 1e-14);
        assert!(m.mean.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn leakage_is_tiny_at_cutoff_40() {
        let st = build_two_mode_squeezer_state(0.5, 40).unwrap();
        assert!(st.leakage() < 1e-10);
        assert!(st.norm_sqr() <= 1.0 + 1e-15);
    }

    #[test]
    fn small_cutoff_reports_leakage() {
        assert!(matches!(
            build_two_mode_squeezer_state(1.5, 5),
            Err(Error::LeakageExceeded { .. })
        ));
    }

    #[test]
    fn tmsv_moments_from_ladder_elements() {
        let m = quadrature_moments(&build_two_mode_squeezer_state(0.5, 40).unwrap()).unwrap();
        let (c, s) = (1.0_f64.cosh(), 1.0_f64.sinh());
        for k in 0..4 {
            assert!((m.cov[(k, k)] - c).abs() < 1e-10);
        }
        assert!((m.cov[(0, 1)] - s).abs() < 1e-10);
        assert!((m.cov[(2, 3)] + s).abs() < 1e-10);
        assert!(m.cov[(0, 2)].abs() < 1e-12);
    }

    #[test]
    fn coherent_state_moments() {
        let m = quadrature_moments(&coherent_fock_state(C64::new(1.5, 0.0), 40).unwrap()).unwrap();
        assert!((m.mean[0] - 3.0).abs() < 1e-10);
        assert!(m.mean[1].abs() < 1e-12);
        assert!(max_abs_diff(&m.cov, &Mat::identity(2, 2)) < 1e-9);
    }

    #[test]
    fn loss_limits() {
        let st = build_two_mode_squeezer_state(0.5, 30).unwrap();
        let full = apply_loss_fock(&st, 1.0, 1).unwrap();
        let orig = quadrature_moments(&st).unwrap();
        assert!(max_abs_diff(&full.cov, &orig.cov) < 1e-12);
        let dead = apply_loss_fock(
            &coherent_fock_state(C64::new(1.0, 0.5), 30).unwrap(),
            0.0,
            0,
        )
        .unwrap();
        assert!(max_abs_diff(&dead.cov, &Mat::identity(2, 2)) < 1e-12);
        assert!(dead.mean.iter().all(|x| x.abs() < 1e-12));
        assert!(apply_loss_fock(&st, 1.1, 0).is_err());
    }
}
