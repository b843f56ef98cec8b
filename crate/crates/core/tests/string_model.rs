use std::f64::consts::PI;

use lqrdecay::linalg::{hermitian_eig, spectral_norm, ComplexMatrix};
use lqrdecay::search::config_gamma;
use lqrdecay::spectral::decompose;
use lqrdecay::string_model::{build_string, closed_form_lambdas, gram, raw_a, StringBase, StringConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = StringConfig> {
    (2usize..25, 0.5f64..40.0, 0.5f64..80.0)
        .prop_flat_map(|(n, t, mass)| {
            (Just((n, t, mass)), proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 1..=n.min(5)))
        })
        .prop_map(|((n, t, mass), j)| StringConfig::new(n, j.len(), t, mass).with_positions(j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The energy inner product makes the transformed `A` skew-Hermitian and
    /// the numeric spectrum matches the closed forms.
    #[test]
    fn closed_forms_match_numerics(cfg in config()) {
        let ga = &gram(&cfg) * &raw_a(&cfg);
        prop_assert!((&ga + &ga.adjoint()).frobenius_norm() <= 1e-12);

        let s = build_string(&cfg).unwrap();
        prop_assert!(s.sys.a.skew_hermitian_defect() <= 1e-10 * s.sys.a.frobenius_norm());
        let data = decompose(&s.sys.a, &s.sys.b).unwrap();
        for (x, y) in data.lambdas.iter().zip(&s.closed_form.lambdas) {
            prop_assert!((x - y).abs() <= 1e-9 * y.abs());
        }
        for (x, y) in data.b_norms.iter().zip(&s.closed_form.b_norms) {
            prop_assert!((x - y).abs() <= 1e-9 * s.closed_form.b_norm);
        }
        prop_assert!((spectral_norm(&s.sys.b) - s.closed_form.b_norm).abs() <= 1e-12 * s.closed_form.b_norm);
    }

    /// Mirroring the actuators about the middle of the string leaves the
    /// mode strengths unchanged.
    #[test]
    fn mirror_symmetry(cfg in config()) {
        let base = StringBase::new(&cfg).unwrap();
        let j = cfg.positions.clone().unwrap();
        let mut mirrored: Vec<usize> = j.iter().map(|&x| cfg.n_masses + 1 - x).collect();
        mirrored.sort_unstable();
        let a = base.spectral(&j).unwrap();
        let b = base.spectral(&mirrored).unwrap();
        for (x, y) in a.b_norms.iter().zip(&b.b_norms) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
    }
}

#[test]
fn eigenvalues_follow_the_sine_law() {
    let cfg = StringConfig::new(7, 1, 3.0, 2.0);
    let c: f64 = 3.0 / 2.0;
    let got = closed_form_lambdas(&cfg);
    assert_eq!(got.len(), 14);
    assert!(got.windows(2).all(|w| w[0].1 < w[1].1));
    for (k, l) in got {
        let want = -2.0 * c.sqrt() * (k as f64 * PI / 16.0).sin();
        assert!((l - want).abs() < 1e-14);
    }
    // Independent check: the frequencies are square roots of the
    // eigenvalues of the stiffness matrix c·tridiag(−1, 2, −1).
    let n = 7;
    let k = ComplexMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => Complex64::new(2.0 * c, 0.0),
        1 => Complex64::new(-c, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let omega2 = hermitian_eig(&k).unwrap().values;
    let mut positive: Vec<f64> = closed_form_lambdas(&cfg).into_iter().map(|(_, l)| l).filter(|l| *l > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    for (w2, l) in omega2.iter().zip(&positive) {
        assert!((w2.sqrt() - l).abs() < 1e-12);
    }
}

/// Actuators only at nodes of some mode leave it uncontrolled.
#[test]
fn node_placement_is_uncontrollable() {
    let cfg = StringConfig::new(8, 2, 10.0, 50.0);
    let base = StringBase::new(&cfg).unwrap();
    let data = base.spectral(&[3, 6]).unwrap();
    assert_eq!(data.b_norms.iter().filter(|&&b| b == 0.0).count(), 4);
    assert_eq!(config_gamma(&base, &[3, 6]).unwrap(), 0.0);
    assert!(config_gamma(&base, &[3, 5]).unwrap() > 0.0);
}

#[test]
fn invalid_positions_are_rejected() {
    let base = StringBase::new(&StringConfig::new(5, 2, 1.0, 1.0)).unwrap();
    assert!(base.spectral(&[0, 2]).is_err());
    assert!(base.spectral(&[2, 6]).is_err());
    assert!(base.spectral(&[3, 3]).is_err());
    assert!(base.spectral(&[4, 2]).is_err());
    assert!(StringConfig::new(0, 1, 1.0, 1.0).validate_template().is_err());
    assert!(StringConfig::new(4, 1, -1.0, 1.0).validate_template().is_err());
}
