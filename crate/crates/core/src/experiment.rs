//! The experimentally generated squeezed cat and its Bell violation after a
//! 50:50 beam splitter.
//!
//! Quadratures are `x = √2 Re α`, `p = √2 Im α`. Functions suffixed `_xp` are
//! densities in `(x, p)`; the rest are densities in the complex plane, related
//! by `f_α(α) = 2 f_xp(√2 Re α, √2 Im α)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use log::warn;
use num_complex::Complex64;
use serde::Serialize;

use crate::bell::{DisplacementSettings, Scheme, TwoModeQuasi};
use crate::error::{ensure_finite, Error, Result};
use crate::fock::{from_amplitudes, FockState, TruncationPolicy};
use crate::optimize::{maximize_state, BellOutcome, OptimizerConfig};
use crate::states::{Family, Mode, StateSpec, TwoModeState};

/// Parameters of the experimental Wigner function.
///
/// `a_w`, `b_w`, `nu`, `delta` are the Gaussian widths along `x` and `p`, the
/// gain ratio and the photon-subtraction weight. They are renamed from the
/// usual Greek letters to keep `α`, `β` free for displacements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentModel {
    pub a_w: f64,
    pub b_w: f64,
    pub nu: f64,
    pub delta: f64,
}

impl ExperimentModel {
    pub fn new(a_w: f64, b_w: f64, nu: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("a_w", a_w), ("b_w", b_w), ("nu", nu), ("delta", delta)] {
            ensure_finite(name, v)?;
        }
        if a_w <= 0.0 || b_w <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "b_w",
                reason: format!("Gaussian widths must be positive, got a_w = {a_w}, b_w = {b_w}"),
            });
        }
        if a_w == b_w {
            return Err(Error::InvalidParameter {
                name: "b_w",
                reason: "a_w and b_w must differ".into(),
            });
        }
        Ok(ExperimentModel { a_w, b_w, nu, delta })
    }

    /// The Wigner function as an exact polynomial-times-Gaussian.
    pub fn wigner_poly(&self) -> PolyGauss {
        let (a, b, nu, d) = (self.a_w, self.b_w, self.nu, self.delta);
        let k = (a * nu - b).powi(2) / (2.0 * b * (a - b));
        let l = 1.0 - d * (1.0 + k);
        let kp = a * nu * nu / (b * b);
        let dd = d * a * (1.0 - nu).powi(2) / (2.0 * (a - b));
        let pref = 1.0 / (PI * (a * b).sqrt() * ((1.0 - dd).powi(2) + 0.5 * dd * dd));
        let mut c = [[0.0; 3]; 3];
        c[0][0] = l * l + 0.5 * d * d * k * k;
        c[1][0] = (2.0 * d * l + d * d * k) / a;
        c[0][1] = (2.0 * d * l - d * d * k) * kp;
        c[2][0] = 0.5 * d * d / (a * a);
        c[1][1] = d * d * kp / a;
        c[0][2] = 0.5 * d * d * kp * kp;
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v *= pref;
            }
        }
        PolyGauss { a, b, c }
    }
}

/// Parameters for ideal detection at amplifier gain `g > 1`.
pub fn reduce_params(g: f64) -> Result<ExperimentModel> {
    ensure_finite("g", g)?;
    if g <= 1.0 {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: format!("gain must exceed 1, got {g}"),
        });
    }
    ExperimentModel::new(g, g - (g - 1.0).powi(2) / g, 1.0 / g, 1.0)
}

/// The experimental Wigner function in quadrature coordinates.
pub fn w_exp(x: f64, p: f64, model: &ExperimentModel) -> f64 {
    model.wigner_poly().eval(x, p)
}

/// Parameters for which the same functional form gives the Husimi function.
pub fn to_q_params(model: &ExperimentModel) -> ExperimentModel {
    ExperimentModel {
        a_w: model.a_w + 1.0,
        b_w: model.b_w + 1.0,
        nu: model.nu,
        delta: model.delta * model.a_w / (model.a_w + 1.0),
    }
}

/// `exp(−x²/a − p²/b) Σ c[i][j] x^{2i} p^{2j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGauss {
    pub a: f64,
    pub b: f64,
    pub c: [[f64; 3]; 3],
}

/// Coefficients of `x^{2n} e^{−x²/w}` convolved with `e^{−x²/t}/√(πt)`.
fn smear_1d(c: [f64; 3], w: f64, t: f64) -> [f64; 3] {
    let r = w / (w + t);
    let s2 = w * t / (2.0 * (w + t));
    let k = r.sqrt();
    [
        k * (c[0] + c[1] * s2 + 3.0 * c[2] * s2 * s2),
        k * (c[1] * r * r + 6.0 * c[2] * r * r * s2),
        k * c[2] * r.powi(4),
    ]
}

/// `∫ x^{2n} e^{−x²/w} dx`.
fn moment(n: usize, w: f64) -> f64 {
    let base = (PI * w).sqrt();
    match n {
        0 => base,
        1 => base * w / 2.0,
        _ => base * 3.0 * w * w / 4.0,
    }
}

impl PolyGauss {
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        let (x2, p2) = (x * x, p * p);
        let xs = [1.0, x2, x2 * x2];
        let ps = [1.0, p2, p2 * p2];
        let mut poly = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                poly += self.c[i][j] * xs[i] * ps[j];
            }
        }
        (-x2 / self.a - p2 / self.b).exp() * poly
    }

    /// Density in the complex plane.
    pub fn eval_alpha(&self, z: Complex64) -> f64 {
        2.0 * self.eval(SQRT_2 * z.re, SQRT_2 * z.im)
    }

    /// Convolution with the normalized Gaussian `e^{−(x²+p²)/t}/(πt)`.
    pub fn smear(&self, t: f64) -> PolyGauss {
        let mut c = [[0.0; 3]; 3];
        for j in 0..3 {
            let col = smear_1d([self.c[0][j], self.c[1][j], self.c[2][j]], self.a, t);
            for i in 0..3 {
                c[i][j] = col[i];
            }
        }
        for row in c.iter_mut() {
            *row = smear_1d(*row, self.b, t);
        }
        PolyGauss {
            a: self.a + t,
            b: self.b + t,
            c,
        }
    }

    /// Exact `∫∫ f dx dp`.
    pub fn integral(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.c[i][j] * moment(i, self.a) * moment(j, self.b);
            }
        }
        s
    }

    /// Half-width of a square that holds all but a negligible tail.
    pub fn extent(&self) -> f64 {
        6.0 * (self.a.max(self.b) / 2.0).sqrt() + 1.0
    }

    pub fn scaled(&self, k: f64) -> PolyGauss {
        let mut out = self.clone();
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        out
    }
}

/// `√(1/3)|0⟩ + √(2/3)|2⟩`.
pub struct Phi2;

impl Phi2 {
    pub const C0: f64 = 0.577_350_269_189_625_8;
    pub const C2: f64 = 0.816_496_580_927_726;

    pub fn wigner_poly() -> PolyGauss {
        let mut c = [[0.0; 3]; 3];
        c[0][0] = 1.0;
        c[1][0] = -4.0 / 3.0;
        c[0][1] = -4.0;
        c[2][0] = 4.0 / 3.0;
        c[1][1] = 8.0 / 3.0;
        c[0][2] = 4.0 / 3.0;
        PolyGauss { a: 1.0, b: 1.0, c }.scaled(1.0 / PI)
    }

    pub fn fock(policy: &TruncationPolicy) -> Result<FockState> {
        let z = Complex64::new(0.0, 0.0);
        let amps = [Complex64::new(Self::C0, 0.0), z, Complex64::new(Self::C2, 0.0)];
        from_amplitudes(&amps, policy)
    }
}

/// Trapezoidal `∫∫ f dx dp` over `[−extent, extent]²`, halving the step until
/// two passes agree to `1e-8`.
pub fn phase_space_integral(f: impl Fn(f64, f64) -> f64, extent: f64) -> Result<f64> {
    const TOL: f64 = 1e-8;
    let pass = |n: usize| {
        let h = 2.0 * extent / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
            let x = -extent + i as f64 * h;
            for j in 0..=n {
                let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += wi * wj * f(x, -extent + j as f64 * h);
            }
        }
        s * h * h
    };
    let mut n = (2.0 * extent / 0.05).ceil() as usize;
    let mut prev = pass(n);
    let mut delta = f64::INFINITY;
    for _ in 0..4 {
        n *= 2;
        let next = pass(n);
        delta = (next - prev).abs();
        if delta < TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { delta })
}

/// The constant `K` in `Tr(ρσ) = K ∫∫ W_ρ W_σ dx dp`, fixed by the vacuum
/// self-overlap.
pub fn overlap_constant() -> Result<f64> {
    let vac = |x: f64, p: f64| (-(x * x) - p * p).exp() / PI;
    Ok(1.0 / phase_space_integral(|x, p| vac(x, p) * vac(x, p), 6.0)?)
}

/// `Tr(ρσ)` from two Wigner functions in quadrature coordinates.
pub fn wigner_overlap(
    w1: impl Fn(f64, f64) -> f64,
    w2: impl Fn(f64, f64) -> f64,
    extent: f64,
) -> Result<f64> {
    Ok(overlap_constant()? * phase_space_integral(|x, p| w1(x, p) * w2(x, p), extent)?)
}

/// Single-mode state with a polynomial-times-Gaussian Wigner function.
#[derive(Debug, Clone)]
pub struct PolyGaussState {
    pub wigner: PolyGauss,
    husimi: PolyGauss,
    /// `W` smeared by the vacuum W and the vacuum Q, which gives the split-state
    /// marginals.
    twice_smeared: PolyGauss,
    /// `1 − ∫∫W` before renormalization.
    pub norm_deficit: f64,
}

impl PolyGaussState {
    pub fn new(wigner: PolyGauss) -> Result<Self> {
        let extent = wigner.extent();
        let w = wigner.clone();
        let norm = phase_space_integral(|x, p| w.eval(x, p), extent)?;
        let deficit = 1.0 - norm;
        let wigner = if deficit.abs() > 1e-3 {
            warn!("Wigner function integrates to {norm:.6}; renormalizing");
            wigner.scaled(1.0 / norm)
        } else {
            wigner
        };
        Ok(PolyGaussState {
            husimi: wigner.smear(1.0),
            twice_smeared: wigner.smear(3.0),
            wigner,
            norm_deficit: deficit,
        })
    }

    pub fn experimental(g: f64) -> Result<Self> {
        Self::new(reduce_params(g)?.wigner_poly())
    }

    pub fn phi2() -> Result<Self> {
        Self::new(Phi2::wigner_poly())
    }

    pub fn wigner_xp(&self, x: f64, p: f64) -> f64 {
        self.wigner.eval(x, p)
    }

    pub fn wigner_alpha(&self, z: Complex64) -> f64 {
        self.wigner.eval_alpha(z)
    }

    pub fn husimi_alpha(&self, z: Complex64) -> f64 {
        self.husimi.eval_alpha(z)
    }
}

/// A single-mode state mixed with vacuum on a 50:50 beam splitter, which maps
/// `|γ⟩|0⟩` to `|γ/√2⟩|−γ/√2⟩`.
#[derive(Debug, Clone)]
pub struct SplitState {
    input: PolyGaussState,
}

impl SplitState {
    pub fn new(input: PolyGaussState) -> Self {
        SplitState { input }
    }

    pub fn input(&self) -> &PolyGaussState {
        &self.input
    }
}

impl TwoModeQuasi for SplitState {
    fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        let u = (a - b) * FRAC_1_SQRT_2;
        let v = (a + b) * FRAC_1_SQRT_2;
        self.input.wigner_alpha(u) * 2.0 / PI * (-2.0 * v.norm_sqr()).exp()
    }

    fn husimi(&self, a: Complex64, b: Complex64) -> f64 {
        let u = (a - b) * FRAC_1_SQRT_2;
        let v = (a + b) * FRAC_1_SQRT_2;
        self.input.husimi_alpha(u) * (-v.norm_sqr()).exp() / PI
    }

    fn husimi_marginal(&self, mode: Mode, z: Complex64) -> f64 {
        let w = match mode {
            Mode::A => 2.0 * z,
            Mode::B => -2.0 * z,
        };
        4.0 * self.input.twice_smeared.eval(w.re, w.im)
    }
}

/// The single-mode state injected into the beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// The experimental model at gain `g`.
    Experimental(f64),
    Phi2,
    /// `S(s)(|A⟩ + |−A⟩)`, normalized, with cat amplitude `A`.
    Sscs {
        amplitude: f64,
        s: f64,
    },
}

/// Split the source on a beam splitter and maximize the Bell functional.
pub fn split_and_bell(source: Source, scheme: Scheme, config: &OptimizerConfig) -> Result<BellOutcome> {
    let h = config.halfwidth_for(0.0, 0.0);
    match source {
        Source::Experimental(g) => bell_at(g, scheme, config, &[]),
        Source::Phi2 => {
            let st = SplitState::new(PolyGaussState::phi2()?);
            maximize_state(&st, scheme, config, h, &[])
        }
        Source::Sscs { amplitude, s } => {
            let spec = StateSpec::new(Family::EssPlus, amplitude / SQRT_2, s)?;
            let st = TwoModeState::new(&spec)?;
            maximize_state(&st, scheme, config, config.halfwidth_for(spec.gamma, s), &[])
        }
    }
}

/// `⟨φ₂|ρ_exp|φ₂⟩` at gain `g`.
pub fn fidelity_phi2(g: f64) -> Result<f64> {
    let model = PolyGaussState::experimental(g)?;
    let phi = Phi2::wigner_poly();
    let extent = model.wigner.extent();
    wigner_overlap(|x, p| model.wigner_xp(x, p), |x, p| phi.eval(x, p), extent)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub g: f64,
    pub fidelity: f64,
    pub norm_deficit: f64,
    pub outcome: BellOutcome,
}

/// Violations smaller than this count as none; the on/off value tends to
/// exactly 2 at far settings for every state.
pub const VIOLATION_TOL: f64 = 1e-9;

const BISECTION_STEPS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Crossing {
    /// The violation vanishes at gain `g`, fidelity `fidelity`; `bracket` holds
    /// the fidelities of the grid points around it.
    Found {
        fidelity: f64,
        g: f64,
        bracket: [f64; 2],
    },
    /// `B − 2` keeps one sign over the sweep.
    NoCrossing { b_min: f64, b_max: f64 },
    /// Search refused: `quantity` breaks monotonicity at `index`.
    NonMonotone { quantity: &'static str, index: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSweep {
    pub scheme: Scheme,
    pub rows: Vec<ThresholdRow>,
    pub crossing: Crossing,
}

/// Index of the first step that breaks monotonicity by more than `tol`.
fn monotone_violation(v: &[f64], tol: f64) -> Option<usize> {
    let up = v.windows(2).position(|w| w[1] < w[0] - tol);
    let down = v.windows(2).position(|w| w[1] > w[0] + tol);
    match (up, down) {
        (Some(i), Some(j)) => Some(i.max(j) + 1),
        _ => None,
    }
}

fn violates(b: f64) -> bool {
    b > 2.0 + VIOLATION_TOL
}

/// The grid step where violation switches on or off, or the reason there is none.
fn locate_bracket(rows: &[ThresholdRow]) -> std::result::Result<usize, Crossing> {
    let f: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let b: Vec<f64> = rows.iter().map(|r| r.outcome.value).collect();
    if let Some(index) = monotone_violation(&f, 0.0) {
        return Err(Crossing::NonMonotone {
            quantity: "fidelity",
            index,
        });
    }
    if let Some(index) = monotone_violation(&b, 1e-7) {
        return Err(Crossing::NonMonotone { quantity: "B", index });
    }
    (0..rows.len().saturating_sub(1))
        .find(|&i| violates(b[i]) != violates(b[i + 1]))
        .ok_or_else(|| Crossing::NoCrossing {
            b_min: b.iter().cloned().fold(f64::INFINITY, f64::min),
            b_max: b.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
}

fn bell_at(
    g: f64,
    scheme: Scheme,
    config: &OptimizerConfig,
    warm: &[DisplacementSettings],
) -> Result<BellOutcome> {
    let state = SplitState::new(PolyGaussState::experimental(g)?);
    maximize_state(&state, scheme, config, config.halfwidth_for(0.0, 0.0), warm)
}

/// Bisect in `g` between rows `i` and `i + 1` for the edge of the violation region.
fn refine_crossing(
    rows: &[ThresholdRow],
    i: usize,
    scheme: Scheme,
    config: &OptimizerConfig,
) -> Result<Crossing> {
    let (lo, hi) = (&rows[i], &rows[i + 1]);
    let lo_violates = violates(lo.outcome.value);
    let warm = if lo_violates {
        lo.outcome.settings
    } else {
        hi.outcome.settings
    };
    let (mut g_lo, mut g_hi) = (lo.g, hi.g);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (g_lo + g_hi);
        let b = bell_at(mid, scheme, config, &[warm])?.value;
        if violates(b) == lo_violates {
            g_lo = mid;
        } else {
            g_hi = mid;
        }
    }
    let g = 0.5 * (g_lo + g_hi);
    Ok(Crossing::Found {
        fidelity: fidelity_phi2(g)?,
        g,
        bracket: [lo.fidelity, hi.fidelity],
    })
}

/// Fidelity and optimized Bell value along a gain grid, and the fidelity at
/// which the violation vanishes. Each point is warm-started from the previous
/// arg max; the crossing is bisected in `g` inside the bracketing grid step.
pub fn threshold_sweep(g_grid: &[f64], scheme: Scheme, config: &OptimizerConfig) -> Result<ThresholdSweep> {
    if g_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "g_grid",
            reason: "grid is empty".into(),
        });
    }
    let up = g_grid.windows(2).all(|w| w[1] > w[0]);
    let down = g_grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::InvalidParameter {
            name: "g_grid",
            reason: "grid must be strictly monotone".into(),
        });
    }
    let mut rows: Vec<ThresholdRow> = Vec::with_capacity(g_grid.len());
    for &g in g_grid {
        let state = PolyGaussState::experimental(g)?;
        let fidelity = fidelity_phi2(g)?;
        let warm: Vec<_> = rows.last().map(|r| r.outcome.settings).into_iter().collect();
        let norm_deficit = state.norm_deficit;
        let outcome = maximize_state(
            &SplitState::new(state),
            scheme,
            config,
            config.halfwidth_for(0.0, 0.0),
            &warm,
        )?;
        rows.push(ThresholdRow {
            g,
            fidelity,
            norm_deficit,
            outcome,
        });
    }
    let crossing = match locate_bracket(&rows) {
        Ok(i) => refine_crossing(&rows, i, scheme, config)?,
        Err(c) => c,
    };
    Ok(ThresholdSweep {
        scheme,
        rows,
        crossing,
    })
}

/// `n` gains from `g_min` to `g_max`, evenly spaced in `log(g − 1)`.
pub fn log_gain_grid(g_min: f64, g_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(g_min > 1.0 && g_max > g_min && n >= 2) {
        return Err(Error::InvalidParameter {
            name: "g_grid",
            reason: format!("need 1 < g_min < g_max and n >= 2, got {g_min}, {g_max}, {n}"),
        });
    }
    let (l0, l1) = ((g_min - 1.0).ln(), (g_max - 1.0).ln());
    Ok((0..n)
        .map(|i| 1.0 + (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect())
}
