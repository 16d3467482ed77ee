use bmcap::asymptotics::asymptotic_rate;
use bmcap::channel::{
    beamsplitter_joint_transform, classical_k, output_covariance, r_bounds, r_for_theta, theta_n,
};
use bmcap::oracle::{heterodyne_info_dense, holevo_chi_dense, homodyne_info_dense, output_pair};
use bmcap::rates::{finite_rate, FiniteModel};
use bmcap::spectral::exp_omega_covariance;
use bmcap::*;
use proptest::prelude::*;

fn params(eta: f64, photons: f64, s: f64) -> ChannelParams {
    ChannelParams::new(eta, photons, s).unwrap()
}

// (n, eta, N, s, r, y) with theta_n <= 0.9.
fn valid_point(max_n: usize) -> impl Strategy<Value = (usize, f64, f64, f64, f64, f64)> {
    (2..=max_n, 0.0..=1.0f64, 0.5..10.0f64, -2.0..2.0f64, -1.0..1.0f64, -1.5..1.5f64).prop_map(
        |(n, eta, photons, s, r_frac, y)| {
            let r90 = r_for_theta(Modes::Finite(n), photons, 0.9).unwrap();
            (n, eta, photons, s, r_frac * r90, y)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_chi_matches_dense((n, eta, photons, s, r, y) in valid_point(32)) {
        let p = params(eta, photons, s);
        let enc = EncodingParams::symmetric(r, y);
        let fast = rates::holevo_chi(n, &p, &enc).unwrap();
        let dense = holevo_chi_dense(n, &p, &enc).unwrap();
        prop_assert!((fast - dense).abs() <= 1e-9 * dense.abs().max(1.0), "{fast} vs {dense}");
    }

    #[test]
    fn determinant_forms_match_mode_sums((n, eta, photons, s, r, y) in valid_point(16)) {
        let p = params(eta, photons, s);
        let sym = EncodingParams::symmetric(r, y);
        let single = EncodingParams::single_quadrature(r, y);
        let het = rates::heterodyne_info(n, &p, &sym).unwrap();
        let het_dense = heterodyne_info_dense(n, &p, &sym).unwrap();
        prop_assert!((het - het_dense).abs() <= 1e-10 * het_dense.abs().max(1.0));
        let hom = rates::homodyne_info(n, &p, &single).unwrap();
        let hom_dense = homodyne_info_dense(n, &p, &single).unwrap();
        prop_assert!((hom - hom_dense).abs() <= 1e-10 * hom_dense.abs().max(1.0));
    }

    // Homodyne reads one quadrature only, so its terms are not even in the
    // mode cosine.
    #[test]
    fn paired_modes_contribute_equally((n, eta, photons, s, r, y) in valid_point(40)) {
        let p = params(eta, photons, s);
        for kind in [RateKind::Holevo, RateKind::Heterodyne] {
            let model = FiniteModel::new(n, &p, &EncodingParams::symmetric(r, y)).unwrap();
            let terms = model.terms(kind).unwrap();
            for k in 0..n / 2 {
                let (a, b) = (terms[k], terms[n - 1 - k]);
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{kind} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sign_flip_leaves_rates_unchanged((n, eta, photons, s, r, y) in valid_point(40)) {
        let p = params(eta, photons, s);
        let q = params(eta, photons, -s);
        for kind in RateKind::ALL {
            let a = finite_rate(kind, n, &p, &EncodingParams::symmetric(r, y)).unwrap();
            let b = finite_rate(kind, n, &q, &EncodingParams::symmetric(-r, -y)).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{kind}: {a} vs {b}");
        }
    }

    #[test]
    fn rates_are_nonnegative((n, eta, photons, s, r, y) in valid_point(64)) {
        let p = params(eta, photons, s);
        for kind in RateKind::ALL {
            let v = finite_rate(kind, n, &p, &kind.encoding(r, y)).unwrap();
            prop_assert!(v >= 0.0, "{kind}: {v}");
        }
    }

    #[test]
    fn averaged_output_dominates_output((n, eta, photons, s, r, y) in valid_point(16)) {
        let (out, avg) = output_pair(n, &params(eta, photons, s), &EncodingParams::symmetric(r, y)).unwrap();
        let diff = avg.as_matrix() - out.as_matrix();
        let min = diff.symmetric_eigen().eigenvalues.min();
        prop_assert!(min >= -1e-10 * avg.as_matrix().amax().max(1.0), "{min}");
    }

    #[test]
    fn energy_split_is_even((n, photons, r, y) in (1..64usize, 0.5..10.0f64, -1.5..1.5f64, -2.0..2.0f64)) {
        prop_assert_eq!(theta_n(r, n, photons), theta_n(-r, n, photons));
        let theta = theta_n(r, n, photons).min(1.0);
        let a = classical_k(y, n, photons, theta, Scheme::Symmetric);
        let b = classical_k(-y, n, photons, theta, Scheme::Symmetric);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn splitter_marginal_is_linear_mix(
        n in 1..=32usize,
        eta_i in 0..4usize,
        s in -2.0..2.0f64,
        r in -2.0..2.0f64,
    ) {
        let eta = [0.0, 0.3, 0.7, 1.0][eta_i];
        let v_in = exp_omega_covariance(n, r).unwrap();
        let v_env = exp_omega_covariance(n, s).unwrap();
        let (joint, _) = beamsplitter_joint_transform(&v_in, &v_env, eta).unwrap();
        let direct = output_covariance(&v_in, &v_env, eta).unwrap();
        prop_assert!(joint.max_abs_diff(&direct).unwrap() <= 1e-12);
    }

    #[test]
    fn asymptotic_sign_flip(eta in 0.0..=1.0f64, s in -2.0..2.0f64, r in -1.5..1.5f64, y in -1.0..1.0f64) {
        let quad = QuadratureSpec::default();
        for kind in RateKind::ALL {
            let a = asymptotic_rate(kind, &params(eta, 8.0, s), &EncodingParams::symmetric(r, y), &quad).unwrap();
            let b = asymptotic_rate(kind, &params(eta, 8.0, -s), &EncodingParams::symmetric(-r, -y), &quad).unwrap();
            prop_assert!((a - b).abs() <= 1e-8, "{kind}: {a} vs {b}");
        }
    }
}

#[test]
fn homodyne_terms_are_not_paired() {
    let model = FiniteModel::new(2, &params(0.7, 8.0, 0.0), &EncodingParams::single_quadrature(0.0, 0.9)).unwrap();
    let terms = model.terms(RateKind::Homodyne).unwrap();
    assert!((terms[0] - terms[1]).abs() > 1e-3);
}

#[test]
fn allowed_interval_grows_with_photons() {
    for n in [2, 5, 30] {
        let small = r_bounds(Modes::Finite(n), 1.0).unwrap();
        let large = r_bounds(Modes::Finite(n), 8.0).unwrap();
        assert!(small.max < large.max);
        assert_eq!(small.min, -small.max);
    }
    let small = r_bounds(Modes::Infinite, 1.0).unwrap();
    let large = r_bounds(Modes::Infinite, 8.0).unwrap();
    assert!(small.max < large.max);
}

#[test]
fn tighter_quadrature_agrees_within_tolerance() {
    let loose = QuadratureSpec { abs_tol: 1e-8, rel_tol: 1e-8, ..QuadratureSpec::default() };
    let tight = QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-13, ..QuadratureSpec::default() };
    let p = params(0.7, 8.0, 1.6);
    for kind in RateKind::ALL {
        let enc = kind.encoding(1.2, -0.3);
        let a = asymptotic_rate(kind, &p, &enc, &loose).unwrap();
        let b = asymptotic_rate(kind, &p, &enc, &tight).unwrap();
        assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{kind}: {a} vs {b}");
    }
}

#[test]
fn restarts_agree() {
    let p = params(0.7, 8.0, 1.6);
    for (kind, modes) in [
        (RateKind::Holevo, Modes::Infinite),
        (RateKind::Heterodyne, Modes::Infinite),
        (RateKind::Homodyne, Modes::Infinite),
        (RateKind::Holevo, Modes::Finite(12)),
    ] {
        let values: Vec<f64> = [0.0, 0.17, 0.33, 0.61, 0.89]
            .iter()
            .map(|&shift| {
                let settings = OptimizerSettings { grid_shift: shift, ..OptimizerSettings::default() };
                maximize_over_r_y(kind, modes, &p, &settings).unwrap().value
            })
            .collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-6, "{kind} {modes}: {values:?}");
    }
}
