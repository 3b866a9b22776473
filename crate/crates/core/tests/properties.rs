mod common;

use common::{
    channel_margin, random_physical_channel, random_state_cov, random_symplectic, rng, state_margin,
};
use cvchannel::analysis::{
    noise_eigendecomposition, pair_ppt_eigenvalues, svd_channel, to_amplitude_phase,
};
use cvchannel::channels::{
    cluster_channel, conjugate_pairs, dfg_array, loss_channel, nullifier_variances, DfgSpec,
    GraphSpec, LossSpec, PassiveElement, Rotation,
};
use cvchannel::linalg::{asymmetry, max_abs_diff, Mat};
use cvchannel::symplectic::{
    from_amp_matrix, ppt_min_eigenvalue, state_physicality, symplectic_eigenvalues, to_amp_matrix,
    vacuum_state, GaussianState,
};
use cvchannel::{
    apply_channel, compose, physicality_margin, CovarianceMatrix, GaussianChannel, QuadratureVector,
};
use proptest::prelude::*;

fn state(v: Mat) -> GaussianState {
    let modes = v.nrows() / 2;
    GaussianState::new(
        QuadratureVector::zeros(modes),
        CovarianceMatrix::new(v).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn physical_channels_map_states_to_states(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let (a, n) = random_physical_channel(&mut r, modes);
        let ch = GaussianChannel::from_amp_noise(a.clone(), n.clone()).unwrap();
        prop_assert!(physicality_margin(&ch) >= -1e-9);
        let out = apply_channel(&ch, &state(random_state_cov(&mut r, modes))).unwrap();
        prop_assert_eq!(asymmetry(out.cov().as_matrix()), 0.0);
        prop_assert!(state_physicality(out.cov()) >= -1e-9);
        prop_assert!(state_margin(out.cov().as_matrix()) >= -1e-9);
    }

    #[test]
    fn margin_agrees_with_complex_eigensolver(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let (a, n) = random_physical_channel(&mut r, modes);
        // push some channels outside the physical set
        let shift = r_shift(seed);
        let n = n + Mat::identity(2 * modes, 2 * modes) * shift;
        let ch = GaussianChannel::from_amp_noise(a.clone(), n.clone()).unwrap();
        let oracle = channel_margin(&a, &n);
        let m = physicality_margin(&ch);
        if oracle.abs() > 1e-9 {
            prop_assert!((m - oracle).abs() < 1e-8 * (1.0 + oracle.abs()), "{m} vs {oracle}");
        } else {
            prop_assert!(m.abs() <= 1e-8);
        }
    }

    #[test]
    fn symplectic_channels_sit_on_the_boundary(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let s = random_symplectic(&mut r, modes, 0.5);
        let ch = GaussianChannel::from_amp_noise(s, Mat::zeros(2 * modes, 2 * modes)).unwrap();
        prop_assert!(physicality_margin(&ch).abs() <= 1e-10);
        let v = CovarianceMatrix::new(random_state_cov(&mut r, modes)).unwrap();
        let out = apply_channel(&ch, &state(v.as_matrix().clone())).unwrap();
        let before = symplectic_eigenvalues(&v).unwrap();
        let after = symplectic_eigenvalues(out.cov()).unwrap();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let chans: Vec<GaussianChannel> = (0..3)
            .map(|_| {
                let (a, n) = random_physical_channel(&mut r, modes);
                GaussianChannel::from_amp_noise(a, n).unwrap()
            })
            .collect();
        let left = compose(&chans[2], &compose(&chans[1], &chans[0]).unwrap()).unwrap();
        let right = compose(&compose(&chans[2], &chans[1]).unwrap(), &chans[0]).unwrap();
        let scale = 1.0 + left.noise().amax();
        prop_assert!(max_abs_diff(left.amp(), right.amp()) < 1e-10 * (1.0 + left.amp().amax()));
        prop_assert!(max_abs_diff(left.noise(), right.noise()) < 1e-10 * scale);
    }

    #[test]
    fn complex_form_round_trips(seed in any::<u64>(), modes in 1usize..5) {
        let mut r = rng(seed);
        let a = common::random_symmetric(&mut r, 2 * modes, 3.0) + random_symplectic(&mut r, modes, 0.4);
        let back = to_amp_matrix(&from_amp_matrix(&a).unwrap());
        prop_assert!(max_abs_diff(&back, &a) < 1e-12);
    }

    #[test]
    fn channel_margin_bounds_vacuum_output_margin(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let a = common::random_symmetric(&mut r, 2 * modes, 1.0) + Mat::identity(2 * modes, 2 * modes);
        let n = common::random_symmetric(&mut r, 2 * modes, 1.0);
        let ch = GaussianChannel::from_amp_noise(a.clone(), n.clone()).unwrap();
        let vac_out = &a * a.transpose() + &n;
        prop_assert!(physicality_margin(&ch) <= state_margin(&vac_out) + 1e-9);
    }

    #[test]
    fn ppt_subset_and_complement_agree(seed in any::<u64>(), modes in 2usize..5, mask in 1u32..15) {
        let mut r = rng(seed);
        let v = CovarianceMatrix::new(random_state_cov(&mut r, modes)).unwrap();
        let subset: Vec<usize> = (0..modes).filter(|m| mask >> m & 1 == 1).collect();
        let complement: Vec<usize> = (0..modes).filter(|m| mask >> m & 1 == 0).collect();
        prop_assume!(!subset.is_empty() && !complement.is_empty());
        let a = ppt_min_eigenvalue(&v, &subset).unwrap();
        let b = ppt_min_eigenvalue(&v, &complement).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        prop_assert!((a - common::ppt(v.as_matrix(), &subset)).abs() < 1e-8 * (1.0 + a.abs()));
    }

    #[test]
    fn svd_reconstructs_and_pairs_reciprocally(seed in any::<u64>(), modes in 1usize..5) {
        let mut r = rng(seed);
        let s = random_symplectic(&mut r, modes, 0.5);
        let e = svd_channel(&s).unwrap();
        prop_assert!(max_abs_diff(&e.reconstruct(), &s) < 1e-10 * (1.0 + s.amax()));
        let n = e.d.len();
        for m in 0..n / 2 {
            prop_assert!((e.d[m] * e.d[n - 1 - m] - 1.0).abs() < 1e-8);
        }
        let g = common::random_symmetric(&mut r, 2 * modes, 2.0);
        let eg = svd_channel(&g).unwrap();
        prop_assert!(max_abs_diff(&eg.reconstruct(), &g) < 1e-10 * (1.0 + g.amax()));
    }

    #[test]
    fn noise_spectrum_is_rotation_invariant(seed in any::<u64>(), modes in 1usize..4) {
        let mut r = rng(seed);
        let n = common::random_symmetric(&mut r, 2 * modes, 1.0);
        // any orthogonal matrix, not only passive symplectic ones
        let q = common::random_symmetric(&mut r, 2 * modes, 1.0).symmetric_eigen().eigenvectors;
        let a = noise_eigendecomposition(&n).unwrap().values;
        let b = noise_eigendecomposition(&(&q * &n * q.transpose())).unwrap().values;
        prop_assert!((a - b).amax() < 1e-10);
    }

    #[test]
    fn amplitude_phase_preserves_norm(v in proptest::collection::vec(-5.0f64..5.0, 2..17)) {
        prop_assume!(v.len() % 2 == 0);
        let ap = to_amplitude_phase(&v).unwrap();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        let amp2: f64 = ap.amplitudes.iter().map(|x| x * x).sum();
        prop_assert!((norm2 - amp2).abs() < 1e-12 * (1.0 + norm2));
        prop_assert!(ap.phases.iter().all(|p| *p > -std::f64::consts::PI && *p <= std::f64::consts::PI));
    }

    #[test]
    fn rotated_loss_spectrum_ignores_rotation(
        etas in proptest::collection::vec(0.0f64..=1.0, 3),
        t1 in -3.0f64..3.0, t2 in -3.0f64..3.0, phi in -3.0f64..3.0,
    ) {
        let rotation = Rotation::beamsplitter(0, 1, t1)
            .then(PassiveElement::BeamSplitter { a: 1, b: 2, theta: t2 })
            .then(PassiveElement::PhaseShift { mode: 2, phi });
        let ch = loss_channel(&LossSpec { transmissivities: etas.clone(), rotation: Some(rotation) }).unwrap();
        let mut expected: Vec<f64> = etas.iter().flat_map(|e| [1.0 - e, 1.0 - e]).collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        let got = noise_eigendecomposition(ch.noise()).unwrap().values;
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).abs() < 1e-12);
        }
        prop_assert!(physicality_margin(&ch) >= -1e-10);
    }

    #[test]
    fn epr_pair_ppt_ignores_which_mode_is_transposed(r in 0.0f64..1.5, eta in 0.0f64..=1.0) {
        let ch = cvchannel::channels::lossy_dfg_array(&DfgSpec::uniform(2, r), eta).unwrap();
        let out = apply_channel(&ch, &vacuum_state(2).unwrap()).unwrap();
        let a = ppt_min_eigenvalue(out.cov(), &[0]).unwrap();
        let b = ppt_min_eigenvalue(out.cov(), &[1]).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!((a - eta * ((-2.0 * r).exp() - 1.0)).abs() < 1e-10);
    }
}

fn r_shift(seed: u64) -> f64 {
    // deterministic spread of shifts in [-0.5, 0.5)
    (seed % 1000) as f64 / 1000.0 - 0.5
}

#[test]
fn lossless_constructors_are_symplectic() {
    for ch in [
        dfg_array(&DfgSpec::uniform(6, 0.7)).unwrap(),
        cluster_channel(&GraphSpec::linear(5, 0.8)).unwrap(),
        loss_channel(&LossSpec::uniform(3, 1.0)).unwrap(),
    ] {
        assert!(physicality_margin(&ch).abs() <= 1e-10);
        assert!(channel_margin(ch.amp(), ch.noise()).abs() <= 1e-10);
    }
}

#[test]
fn dfg_vacuum_output_has_conjugation_signature() {
    let modes = 8;
    let ch = dfg_array(&DfgSpec::uniform(modes, 0.5)).unwrap();
    let out = apply_channel(&ch, &vacuum_state(modes).unwrap()).unwrap();
    let v = out.cov().as_matrix();
    for (a, b) in conjugate_pairs(modes) {
        assert!(v[(a, b)] > 0.0, "x correlation of ({a},{b})");
        assert!(
            v[(a + modes, b + modes)] < 0.0,
            "p correlation of ({a},{b})"
        );
        assert!((v[(a, b)] - 1.0f64.sinh()).abs() < 1e-12);
    }
    let ppt = pair_ppt_eigenvalues(out.cov(), &conjugate_pairs(modes)).unwrap();
    assert!(ppt
        .iter()
        .all(|&p| (p - ((-1.0f64).exp() - 1.0)).abs() < 1e-10));
}

#[test]
fn cluster_nullifiers_shrink_with_squeezing() {
    let graph = |r| GraphSpec::linear(5, r);
    let mut prev = vec![1.0; 5];
    for r in [0.2, 0.5, 0.9, 1.4] {
        let g = graph(r);
        let out = apply_channel(&cluster_channel(&g).unwrap(), &vacuum_state(5).unwrap()).unwrap();
        let nv = nullifier_variances(&g.adjacency, out.cov().as_matrix());
        for (k, (&now, &before)) in nv.iter().zip(&prev).enumerate() {
            assert!(now < 1.0 && now < before, "nullifier {k} at r={r}");
        }
        prev = nv;
    }
}
