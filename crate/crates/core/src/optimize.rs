//! Multistart maximization of `|B|` over the four displacement settings.
//!
//! Candidate points come from an 8-dimensional Halton sequence with a seeded
//! Cranley–Patterson shift, cycling through the full search box and boxes of
//! one half, one quarter and one eighth of its width. Half of them are
//! mirrored so that both modes start at the same settings. Every candidate gets a
//! short Nelder–Mead run on `−|B|`; the best `n_starts` of them are refined
//! with restarted Nelder–Mead until a restart no longer improves.
//! Starts may run in parallel; the best is picked by an ordered fold, so the
//! result does not depend on scheduling.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{bell_value, DisplacementSettings, Scheme, TwoModeQuasi};
use crate::error::{Error, Result};
use crate::states::{Family, StateSpec, TwoModeState};

const HALTON_BASES: [u8; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
const RADIUS_CYCLE: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
const MAX_RESTARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub n_starts: usize,
    pub seed: u64,
    /// Half-width of the search box per real parameter; `None` picks
    /// `max(3, 2γe^{|s|})` from the state.
    pub box_halfwidth: Option<f64>,
    /// Convergence tolerance on the spread of simplex function values.
    pub local_tol: f64,
    /// Iteration cap per local run.
    pub max_iter: u64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Candidates screened per start; the best `n_starts` after a short
    /// simplex run are refined fully.
    pub screen_factor: usize,
    /// Iteration cap of the screening runs.
    pub screen_iter: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            n_starts: 64,
            seed: 0x00c4_7be1,
            box_halfwidth: None,
            local_tol: 1e-8,
            max_iter: 2000,
            initial_step: 0.25,
            screen_factor: 16,
            screen_iter: 300,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.n_starts == 0 {
            return bad("n_starts", "must be positive");
        }
        if self.screen_factor == 0 {
            return bad("screen_factor", "must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter", "must be positive");
        }
        if !(self.local_tol > 0.0 && self.local_tol.is_finite()) {
            return bad("local_tol", "must be positive and finite");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step", "must be positive and finite");
        }
        if let Some(h) = self.box_halfwidth {
            if !(h > 0.0 && h.is_finite()) {
                return bad("box_halfwidth", "must be positive and finite");
            }
        }
        Ok(())
    }

    pub fn halfwidth_for(&self, gamma: f64, s: f64) -> f64 {
        self.box_halfwidth
            .unwrap_or_else(|| (2.0 * gamma * s.abs().exp()).max(3.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellOutcome {
    /// Optimized `|B|`.
    pub value: f64,
    /// Signed functional value at the arg max.
    pub signed_value: f64,
    pub settings: DisplacementSettings,
    pub starts_converged: usize,
    pub best_start_index: usize,
}

/// Low-discrepancy start points in `[−h, h]^8`.
///
/// Points cycle through the radius classes and, within each, alternate
/// between free points and mode-mirrored ones with `(b, b′) = (a, a′)`.
pub fn start_points(n: usize, seed: u64, halfwidth: f64) -> Vec<[f64; 8]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 8] = std::array::from_fn(|_| rng.gen::<f64>());
    let k = RADIUS_CYCLE.len();
    (0..n)
        .map(|i| {
            let r = halfwidth * RADIUS_CYCLE[i % k];
            let mirrored = (i / k) % 2 == 1;
            // each class walks its own copy of the sequence
            let j = i / (2 * k) + 1;
            let mut p: [f64; 8] = std::array::from_fn(|d| {
                let u = (halton::number(HALTON_BASES[d], j) + shift[d]).fract();
                r * (2.0 * u - 1.0)
            });
            if mirrored {
                for d in 0..4 {
                    p[d + 4] = p[d];
                }
            }
            p
        })
        .collect()
}

struct Objective<'a, S: ?Sized> {
    state: &'a S,
    scheme: Scheme,
}

impl<S: TwoModeQuasi + ?Sized> CostFunction for Objective<'_, S> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let arr: [f64; 8] = std::array::from_fn(|i| p[i]);
        let v = bell_value(self.state, self.scheme, &DisplacementSettings::from_params(&arr));
        Ok(-v.abs())
    }
}

struct LocalResult {
    params: [f64; 8],
    value: f64,
    converged: bool,
}

fn simplex_run<S: TwoModeQuasi + ?Sized>(
    state: &S,
    scheme: Scheme,
    x0: &[f64; 8],
    step: f64,
    max_iter: u64,
    config: &OptimizerConfig,
) -> (Vec<f64>, f64, bool) {
    let mut vertices = vec![x0.to_vec()];
    for i in 0..8 {
        let mut v = x0.to_vec();
        v[i] += step;
        vertices.push(v);
    }
    let objective = Objective { state, scheme };
    let start_cost = objective.cost(&x0.to_vec()).unwrap_or(0.0);
    let solver = NelderMead::new(vertices)
        .with_sd_tolerance(config.local_tol)
        .expect("tolerance validated");
    let run = Executor::new(objective, solver)
        .configure(|st| st.max_iters(max_iter))
        .run();
    match run {
        Ok(res) => {
            let st = res.state();
            let best = st.get_best_param().cloned().unwrap_or_else(|| x0.to_vec());
            let cost = st.get_best_cost();
            let converged = matches!(
                st.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            if cost <= start_cost {
                (best, cost, converged)
            } else {
                (x0.to_vec(), start_cost, converged)
            }
        }
        Err(_) => (x0.to_vec(), start_cost, false),
    }
}

fn refine<S: TwoModeQuasi + ?Sized>(
    state: &S,
    scheme: Scheme,
    x0: &[f64; 8],
    config: &OptimizerConfig,
) -> LocalResult {
    // Restart the simplex at its best vertex until a restart stops paying off;
    // a collapsed simplex in 8 dimensions often sits beside a ridge.
    let mut x = *x0;
    let mut value = f64::NEG_INFINITY;
    let mut converged = false;
    for round in 0..MAX_RESTARTS {
        let step = if round == 0 {
            config.initial_step
        } else {
            0.5 * config.initial_step
        };
        let (p, cost, conv) = simplex_run(state, scheme, &x, step, config.max_iter, config);
        let improved = -cost > value + config.local_tol;
        x = std::array::from_fn(|i| p[i]);
        value = value.max(-cost);
        converged = conv;
        if !improved && round > 0 {
            break;
        }
    }
    LocalResult {
        params: x,
        value,
        converged,
    }
}

/// Locally refine one setting; returns the refined settings, their `|B|` and
/// whether the final simplex met the tolerance.
pub fn refine_from<S: TwoModeQuasi + ?Sized>(
    state: &S,
    scheme: Scheme,
    start: &DisplacementSettings,
    config: &OptimizerConfig,
) -> Result<(DisplacementSettings, f64, bool)> {
    config.validate()?;
    let r = refine(state, scheme, &start.to_params(), config);
    Ok((DisplacementSettings::from_params(&r.params), r.value, r.converged))
}

/// Maximize `|B|` for an arbitrary two-mode quasiprobability.
///
/// `extra_starts` are refined after the low-discrepancy starts.
pub fn maximize_state<S: TwoModeQuasi + ?Sized>(
    state: &S,
    scheme: Scheme,
    config: &OptimizerConfig,
    halfwidth: f64,
    extra_starts: &[DisplacementSettings],
) -> Result<BellOutcome> {
    config.validate()?;
    let candidates = start_points(config.n_starts * config.screen_factor, config.seed, halfwidth);
    let mut screened: Vec<(usize, [f64; 8], f64)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let (p, cost, _) =
                simplex_run(state, scheme, x0, config.initial_step, config.screen_iter, config);
            (i, std::array::from_fn(|k| p[k]), -cost)
        })
        .collect();
    // stable order: value descending, then candidate index
    screened.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    let mut starts: Vec<[f64; 8]> = screened
        .iter()
        .take(config.n_starts)
        .map(|(_, p, _)| *p)
        .collect();
    starts.extend(extra_starts.iter().map(|s| s.to_params()));
    let results: Vec<LocalResult> = starts
        .par_iter()
        .map(|x0| refine(state, scheme, x0, config))
        .collect();

    let starts_converged = results.iter().filter(|r| r.converged).count();
    let mut best_index = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best_index].value {
            best_index = i;
        }
    }
    let best = &results[best_index];
    if starts_converged == 0 {
        return Err(Error::NonConvergent {
            starts: results.len(),
            max_iter: config.max_iter as usize,
            tol: config.local_tol,
            best: best.value,
        });
    }
    let settings = DisplacementSettings::from_params(&best.params);
    Ok(BellOutcome {
        value: best.value,
        signed_value: bell_value(state, scheme, &settings),
        settings,
        starts_converged,
        best_start_index: best_index,
    })
}

/// Maximize `|B|` for a two-mode family.
pub fn maximize_bell(spec: &StateSpec, scheme: Scheme, config: &OptimizerConfig) -> Result<BellOutcome> {
    maximize_bell_from(spec, scheme, config, &[])
}

pub fn maximize_bell_from(
    spec: &StateSpec,
    scheme: Scheme,
    config: &OptimizerConfig,
    extra_starts: &[DisplacementSettings],
) -> Result<BellOutcome> {
    if !spec.family.is_two_mode() {
        return Err(Error::WrongFamily {
            family: spec.family,
            expected: "two-mode",
        });
    }
    let state = TwoModeState::new(spec)?;
    let h = config.halfwidth_for(spec.gamma, spec.s);
    maximize_state(&state, scheme, config, h, extra_starts)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub family: Family,
    pub gamma: f64,
    pub s: f64,
    pub scheme: Scheme,
    pub outcome: Result<BellOutcome>,
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid is empty".into(),
        });
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid contains a non-finite value".into(),
        });
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid must be strictly monotone".into(),
        });
    }
    Ok(())
}

/// Optimize every `(gamma, s)` grid point, gamma-major.
///
/// Along each gamma row the previous point's arg max is appended to the start
/// list of the next point. Rows run in parallel; per-point failures are kept in
/// the row rather than aborting the sweep.
pub fn sweep(
    family: Family,
    gamma_grid: &[f64],
    s_grid: &[f64],
    scheme: Scheme,
    config: &OptimizerConfig,
) -> Result<Vec<SweepRow>> {
    check_grid("gamma_grid", gamma_grid)?;
    check_grid("s_grid", s_grid)?;
    config.validate()?;
    if !family.is_two_mode() {
        return Err(Error::WrongFamily {
            family,
            expected: "two-mode",
        });
    }
    let rows: Vec<Vec<SweepRow>> = gamma_grid
        .par_iter()
        .map(|&gamma| {
            let mut out = Vec::with_capacity(s_grid.len());
            let mut warm: Option<DisplacementSettings> = None;
            for &s in s_grid {
                let s = if family.is_squeezed() { s } else { 0.0 };
                let outcome = StateSpec::new(family, gamma, s).and_then(|spec| {
                    let extra: Vec<_> = warm.into_iter().collect();
                    maximize_bell_from(&spec, scheme, config, &extra)
                });
                if let Ok(o) = &outcome {
                    warm = Some(o.settings);
                }
                out.push(SweepRow {
                    family,
                    gamma,
                    s,
                    scheme,
                    outcome,
                });
            }
            out
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_fill_the_box_deterministically() {
        let a = start_points(30, 7, 3.0);
        let b = start_points(30, 7, 3.0);
        assert_eq!(a, b);
        assert_ne!(a, start_points(30, 8, 3.0));
        for (i, p) in a.iter().enumerate() {
            let r = 3.0 * RADIUS_CYCLE[i % RADIUS_CYCLE.len()];
            assert!(p.iter().all(|v| v.abs() <= r));
        }
    }

    #[test]
    fn halfwidth_default() {
        let c = OptimizerConfig::default();
        assert_eq!(c.halfwidth_for(0.5, 0.0), 3.0);
        assert!((c.halfwidth_for(2.0, -0.5) - 4.0 * 0.5f64.exp()).abs() < 1e-15);
        let fixed = OptimizerConfig {
            box_halfwidth: Some(1.5),
            ..c
        };
        assert_eq!(fixed.halfwidth_for(2.0, 1.0), 1.5);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        for bad in [
            OptimizerConfig {
                n_starts: 0,
                ..Default::default()
            },
            OptimizerConfig {
                local_tol: 0.0,
                ..Default::default()
            },
            OptimizerConfig {
                box_halfwidth: Some(f64::NAN),
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn grid_checks() {
        assert!(check_grid("g", &[]).is_err());
        assert!(check_grid("g", &[0.1, 0.1]).is_err());
        assert!(check_grid("g", &[0.3, 0.1, 0.2]).is_err());
        assert!(check_grid("g", &[0.3, 0.2, 0.1]).is_ok());
    }
}
