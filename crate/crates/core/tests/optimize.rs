use std::f64::consts::{PI, SQRT_2};

use catbell::bell::*;
use catbell::optimize::*;
use catbell::states::{Family, Mode, StateSpec, TwoModeState};
use catbell::{Complex64, Error};

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        n_starts: 16,
        screen_factor: 4,
        ..OptimizerConfig::default()
    }
}

/// `|α⟩ ⊗ |β⟩`, a product state with no Bell violation.
struct ProductCoherent {
    alpha: Complex64,
    beta: Complex64,
}

fn w1(z: Complex64, c: Complex64) -> f64 {
    2.0 / PI * (-2.0 * (z - c).norm_sqr()).exp()
}

fn q1(z: Complex64, c: Complex64) -> f64 {
    (-(z - c).norm_sqr()).exp() / PI
}

impl TwoModeQuasi for ProductCoherent {
    fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        w1(a, self.alpha) * w1(b, self.beta)
    }

    fn husimi(&self, a: Complex64, b: Complex64) -> f64 {
        q1(a, self.alpha) * q1(b, self.beta)
    }

    fn husimi_marginal(&self, mode: Mode, z: Complex64) -> f64 {
        match mode {
            Mode::A => q1(z, self.alpha),
            Mode::B => q1(z, self.beta),
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let spec = StateSpec::new(Family::EcsPsiMinus, 0.8, 0.0).unwrap();
    let a = maximize_bell(&spec, Scheme::ParityChsh, &quick()).unwrap();
    let b = maximize_bell(&spec, Scheme::ParityChsh, &quick()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.settings.to_params(), b.settings.to_params());
    assert_eq!(a.best_start_index, b.best_start_index);
}

#[test]
fn doubling_starts_changes_little() {
    let cases = [
        (Family::EcsPsiMinus, 1.0, 0.0, Scheme::ParityChsh),
        (Family::EssPlus, 2.6f64.sqrt() / 2.0, 0.4, Scheme::OnOffChsh),
        (Family::SecsPhiMinus, 1.0, 0.3, Scheme::OnOffChsh),
    ];
    let base = OptimizerConfig::default();
    let doubled = OptimizerConfig {
        n_starts: 2 * base.n_starts,
        ..base.clone()
    };
    for (f, g, s, scheme) in cases {
        let spec = StateSpec::new(f, g, s).unwrap();
        let v1 = maximize_bell(&spec, scheme, &base).unwrap().value;
        let v2 = maximize_bell(&spec, scheme, &doubled).unwrap().value;
        println!("{f} {scheme}: {v1:.8} -> {v2:.8}");
        assert!(v2 - v1 <= 1e-4, "{f} {scheme}: {v1} vs {v2}");
    }
}

#[test]
fn refinement_never_lowers_the_start_value() {
    let spec = StateSpec::new(Family::EssMinus, 1.0, -0.3).unwrap();
    let st = TwoModeState::new(&spec).unwrap();
    let cfg = OptimizerConfig::default();
    for (i, p) in start_points(12, 7, 2.5).iter().enumerate() {
        let start = DisplacementSettings::from_params(p);
        for scheme in Scheme::ALL {
            let before = bell_value(&st, scheme, &start).abs();
            let (set, after, _) = refine_from(&st, scheme, &start, &cfg).unwrap();
            assert!(after >= before, "start {i} {scheme}: {before} -> {after}");
            assert!((bell_value(&st, scheme, &set).abs() - after).abs() < 1e-12);
        }
    }
}

#[test]
fn product_states_do_not_violate() {
    let st = ProductCoherent {
        alpha: Complex64::new(0.7, -0.2),
        beta: Complex64::new(-0.4, 1.1),
    };
    for scheme in [Scheme::ParityChsh, Scheme::OnOffChsh] {
        let out = maximize_state(&st, scheme, &quick(), 3.0, &[]).unwrap();
        assert!(out.value <= 2.0 + 1e-6, "{scheme}: {}", out.value);
    }
    let vac = StateSpec::new(Family::EssPlus, 0.0, 0.0).unwrap();
    let out = maximize_bell(&vac, Scheme::ParityChsh, &quick()).unwrap();
    assert!(out.value <= 2.0 + 1e-6);
}

#[test]
fn optimum_respects_cirelson_and_schemes_agree() {
    for (f, g, s) in [
        (Family::EcsPsiMinus, 1.5, 0.0),
        (Family::EcsPhiMinus, 2.0, 0.0),
        (Family::SecsPhiMinus, 0.5, 0.0),
    ] {
        let spec = StateSpec::new(f, g, s).unwrap();
        for scheme in Scheme::ALL {
            let out = maximize_bell(&spec, scheme, &quick()).unwrap();
            assert!(out.value <= 2.0 * SQRT_2 + 1e-9, "{f} {scheme}: {}", out.value);
            assert!((out.value - out.signed_value.abs()).abs() < 1e-15);
        }
        let onoff = maximize_bell(&spec, Scheme::OnOffChsh, &quick()).unwrap();
        let ch = ch_value(&spec, &onoff.settings.negated()).unwrap();
        assert!((onoff.signed_value - (4.0 * ch + 2.0)).abs() < 1e-10);
    }
}

#[test]
fn swapped_settings_give_the_same_maximum() {
    let spec = StateSpec::new(Family::EcsPsiMinus, 1.0, 0.0).unwrap();
    let st = TwoModeState::new(&spec).unwrap();
    let out = maximize_bell(&spec, Scheme::ParityChsh, &quick()).unwrap();
    // swapping one pair moves the minus sign; the optimizer finds the same |B|
    let swapped = out.settings.swap_a();
    let seeded = maximize_state(&st, Scheme::ParityChsh, &quick(), 3.0, &[swapped]).unwrap();
    assert!((seeded.value - out.value).abs() < 1e-6);
}

#[test]
fn ecs_psi_minus_reference_value() {
    let spec = StateSpec::new(Family::EcsPsiMinus, 0.806, 0.0).unwrap();
    let out = maximize_bell(&spec, Scheme::ParityChsh, &OptimizerConfig::default()).unwrap();
    assert!((out.value - 2.41424).abs() < 1e-4, "{}", out.value);
}

#[test]
fn exhausted_iterations_are_reported() {
    let spec = StateSpec::new(Family::EcsPsiMinus, 1.0, 0.0).unwrap();
    let cfg = OptimizerConfig {
        max_iter: 2,
        screen_iter: 2,
        local_tol: 1e-300,
        ..quick()
    };
    match maximize_bell(&spec, Scheme::ParityChsh, &cfg) {
        Err(Error::NonConvergent { starts, best, .. }) => {
            assert_eq!(starts, cfg.n_starts);
            assert!(best > 0.0);
        }
        other => panic!("expected NonConvergent, got {other:?}"),
    }
}

#[test]
fn wrong_family_is_rejected() {
    let spec = StateSpec::new(Family::SscsEven, 1.0, 0.2).unwrap();
    assert!(matches!(
        maximize_bell(&spec, Scheme::ParityChsh, &quick()),
        Err(Error::WrongFamily { .. })
    ));
}

#[test]
fn sweep_layout_and_determinism() {
    let gammas = [0.5, 1.0];
    let ss = [-0.3, 0.0, 0.3];
    let rows = sweep(Family::EssPlus, &gammas, &ss, Scheme::ParityChsh, &quick()).unwrap();
    assert_eq!(rows.len(), 6);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.gamma, gammas[i / 3]);
        assert_eq!(row.s, ss[i % 3]);
        assert_eq!(row.scheme, Scheme::ParityChsh);
    }
    let again = sweep(Family::EssPlus, &gammas, &ss, Scheme::ParityChsh, &quick()).unwrap();
    for (a, b) in rows.iter().zip(&again) {
        let (a, b) = (a.outcome.as_ref().unwrap(), b.outcome.as_ref().unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
    // a sweep point is never worse than the cold optimum at the same point
    for row in &rows {
        let spec = StateSpec::new(row.family, row.gamma, row.s).unwrap();
        let cold = maximize_bell(&spec, row.scheme, &quick()).unwrap();
        assert!(row.outcome.as_ref().unwrap().value >= cold.value - 1e-9);
    }
}

#[test]
fn sweep_rejects_bad_grids() {
    for (g, s) in [
        (vec![], vec![0.0]),
        (vec![0.5, 1.0, 0.7], vec![0.0]),
        (vec![0.5, 0.5], vec![0.0]),
        (vec![0.5], vec![f64::NAN]),
    ] {
        let res = sweep(Family::EssPlus, &g, &s, Scheme::ParityChsh, &quick());
        assert!(matches!(res, Err(Error::InvalidParameter { .. })), "{g:?} {s:?}");
    }
}
