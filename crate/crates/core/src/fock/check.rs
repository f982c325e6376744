//! Lock-step comparison of the closed forms against the Fock oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use num_complex::Complex64;

use super::{build_state_adaptive, TruncationPolicy};
use crate::error::Result;
use crate::states::{Family, Mode, SqueezedCat, StateSpec, TwoModeState};

/// Grid of states and phase-space points to compare on.
#[derive(Debug, Clone)]
pub struct OracleCheckConfig {
    pub gammas: Vec<f64>,
    /// Squeeze values used for squeezed families; unsqueezed families use 0.
    pub squeezes: Vec<f64>,
    /// Number of random coordinates per axis; the points form a `k × k` grid.
    pub points_per_axis: usize,
    /// Points are drawn from the disk of this radius.
    pub radius: f64,
    pub seed: u64,
    pub tolerance: f64,
    pub policy: TruncationPolicy,
    /// Ceiling for raising `n_max` when a state's tail needs more levels.
    pub n_max_limit: usize,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        OracleCheckConfig {
            gammas: vec![0.5, 1.0, 2.6f64.sqrt() / 2.0],
            squeezes: vec![-0.5, 0.0, 0.5],
            points_per_axis: 5,
            radius: 2.5,
            seed: 0x5eed_0bc1,
            tolerance: 1e-8,
            // amplitude errors scale with the square root of the tail mass
            policy: TruncationPolicy {
                n_max: 48,
                tail_bound: 1e-18,
            },
            n_max_limit: 160,
        }
    }
}

/// Deliberate offset added to one family's analytic values, used to prove the
/// check can fail.
#[derive(Debug, Clone, Copy)]
pub struct Perturbation {
    pub family: Family,
    pub offset: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleMismatch {
    pub family: String,
    pub gamma: f64,
    pub s: f64,
    pub quantity: &'static str,
    pub a: [f64; 2],
    pub b: Option<[f64; 2]>,
    pub analytic: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub family: String,
    pub comparisons: usize,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub tolerance: f64,
    pub n_max: usize,
    pub comparisons: usize,
    pub max_error: f64,
    pub passed: bool,
    pub families: Vec<FamilySummary>,
    pub mismatches: Vec<OracleMismatch>,
}

fn random_points(rng: &mut ChaCha8Rng, k: usize, radius: f64) -> Vec<Complex64> {
    (0..k)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            Complex64::from_polar(r, phi)
        })
        .collect()
}

/// Every state spec on the declared grid, in a fixed order.
pub fn declared_specs(config: &OracleCheckConfig) -> Result<Vec<StateSpec>> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for &gamma in &config.gammas {
            if family.is_squeezed() {
                for &s in &config.squeezes {
                    out.push(StateSpec::new(family, gamma, s)?);
                }
            } else {
                out.push(StateSpec::new(family, gamma, 0.0)?);
            }
        }
    }
    Ok(out)
}

struct Comparison {
    quantity: &'static str,
    a: Complex64,
    b: Option<Complex64>,
    analytic: f64,
    oracle: f64,
}

fn compare_spec(
    spec: &StateSpec,
    xs: &[Complex64],
    ys: &[Complex64],
    config: &OracleCheckConfig,
    offset: f64,
) -> Result<Vec<Comparison>> {
    let fock = build_state_adaptive(spec, &config.policy, config.n_max_limit)?;
    let mut out = Vec::new();
    if spec.family.is_two_mode() {
        let st = TwoModeState::new(spec)?;
        let rho_a = fock.reduced(Mode::A)?;
        let rho_b = fock.reduced(Mode::B)?;
        for &a in xs {
            for &b in ys {
                out.push(Comparison {
                    quantity: "W",
                    a,
                    b: Some(b),
                    analytic: st.wigner(a, b) + offset,
                    oracle: fock.wigner_two_mode(a, b)?,
                });
                out.push(Comparison {
                    quantity: "Q",
                    a,
                    b: Some(b),
                    analytic: st.husimi(a, b) + offset,
                    oracle: fock.husimi_two_mode(a, b)?,
                });
            }
        }
        for &z in xs.iter().chain(ys) {
            out.push(Comparison {
                quantity: "Q_a",
                a: z,
                b: None,
                analytic: st.husimi_marginal(Mode::A, z) + offset,
                oracle: rho_a.husimi(z)?,
            });
            out.push(Comparison {
                quantity: "Q_b",
                a: z,
                b: None,
                analytic: st.husimi_marginal(Mode::B, z) + offset,
                oracle: rho_b.husimi(z)?,
            });
        }
    } else {
        let st = SqueezedCat::from_spec(spec)?;
        for &x in xs {
            for &y in ys {
                let z = Complex64::new(x.re, y.im);
                out.push(Comparison {
                    quantity: "W",
                    a: z,
                    b: None,
                    analytic: st.wigner(z) + offset,
                    oracle: fock.wigner(z)?,
                });
                out.push(Comparison {
                    quantity: "Q",
                    a: z,
                    b: None,
                    analytic: st.husimi(z) + offset,
                    oracle: fock.husimi(z)?,
                });
            }
        }
    }
    Ok(out)
}

/// Compare analytic W, Q and Q marginals with the oracle on the declared grid.
pub fn run_oracle_check(
    config: &OracleCheckConfig,
    perturbation: Option<Perturbation>,
) -> Result<OracleReport> {
    let specs = declared_specs(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = config.points_per_axis;
    let xs = random_points(&mut rng, k, config.radius);
    let ys = random_points(&mut rng, k, config.radius);

    let results: Vec<Result<Vec<Comparison>>> = specs
        .par_iter()
        .map(|spec| {
            let offset = match perturbation {
                Some(p) if p.family == spec.family => p.offset,
                _ => 0.0,
            };
            compare_spec(spec, &xs, &ys, config, offset)
        })
        .collect();

    let mut families: Vec<FamilySummary> = Family::ALL
        .iter()
        .map(|f| FamilySummary {
            family: f.name().to_string(),
            comparisons: 0,
            max_error: 0.0,
            passed: true,
        })
        .collect();
    let mut mismatches = Vec::new();
    let mut comparisons = 0;
    let mut max_error: f64 = 0.0;
    for (spec, res) in specs.iter().zip(results) {
        let idx = Family::ALL.iter().position(|f| *f == spec.family).unwrap_or(0);
        for c in res? {
            let err = (c.analytic - c.oracle).abs();
            comparisons += 1;
            max_error = max_error.max(err);
            let fam = &mut families[idx];
            fam.comparisons += 1;
            fam.max_error = fam.max_error.max(err);
            if !(err <= config.tolerance) {
                fam.passed = false;
                mismatches.push(OracleMismatch {
                    family: spec.family.name().to_string(),
                    gamma: spec.gamma,
                    s: spec.s,
                    quantity: c.quantity,
                    a: [c.a.re, c.a.im],
                    b: c.b.map(|b| [b.re, b.im]),
                    analytic: c.analytic,
                    oracle: c.oracle,
                });
            }
        }
    }
    Ok(OracleReport {
        tolerance: config.tolerance,
        n_max: config.policy.n_max,
        comparisons,
        max_error,
        passed: mismatches.is_empty(),
        families,
        mismatches,
    })
}
