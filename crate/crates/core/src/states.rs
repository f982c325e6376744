//! Wigner and Husimi functions of cat states, their squeezed variants and the
//! two-mode states obtained from them.
//!
//! Amplitude convention: `gamma` is always the state's own coherent amplitude.
//! For single-mode families that is the amplitude of `|γ⟩ ± |−γ⟩`. For two-mode
//! families it is the per-arm amplitude of `|γ⟩|±γ⟩ ± |−γ⟩|∓γ⟩`, so the
//! single-mode cat that is split on the beam splitter has amplitude `√2·γ`.

use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::gauss::{GaussTerm, Lin};
use crate::phasespace::{
    q_coherent_kernel, scs_norm, squeeze_coord, two_mode_squeeze_coords, w_coherent_kernel, x_kernel,
    y_kernel, Parity, SqueezeFrame,
};

/// The fourteen state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    ScsEven,
    ScsOdd,
    SscsEven,
    SscsOdd,
    EssPlus,
    EssMinus,
    EcsPhiPlus,
    EcsPhiMinus,
    EcsPsiPlus,
    EcsPsiMinus,
    SecsPhiPlus,
    SecsPhiMinus,
    SecsPsiPlus,
    SecsPsiMinus,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::ScsEven,
        Family::ScsOdd,
        Family::SscsEven,
        Family::SscsOdd,
        Family::EssPlus,
        Family::EssMinus,
        Family::EcsPhiPlus,
        Family::EcsPhiMinus,
        Family::EcsPsiPlus,
        Family::EcsPsiMinus,
        Family::SecsPhiPlus,
        Family::SecsPhiMinus,
        Family::SecsPsiPlus,
        Family::SecsPsiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ScsEven => "scs-even",
            Family::ScsOdd => "scs-odd",
            Family::SscsEven => "sscs-even",
            Family::SscsOdd => "sscs-odd",
            Family::EssPlus => "ess-plus",
            Family::EssMinus => "ess-minus",
            Family::EcsPhiPlus => "ecs-phi-plus",
            Family::EcsPhiMinus => "ecs-phi-minus",
            Family::EcsPsiPlus => "ecs-psi-plus",
            Family::EcsPsiMinus => "ecs-psi-minus",
            Family::SecsPhiPlus => "secs-phi-plus",
            Family::SecsPhiMinus => "secs-phi-minus",
            Family::SecsPsiPlus => "secs-psi-plus",
            Family::SecsPsiMinus => "secs-psi-minus",
        }
    }

    /// The `±` of the superposition.
    pub fn parity(self) -> Parity {
        use Family::*;
        match self {
            ScsEven | SscsEven | EssPlus | EcsPhiPlus | EcsPsiPlus | SecsPhiPlus | SecsPsiPlus => {
                Parity::Even
            }
            _ => Parity::Odd,
        }
    }

    pub fn is_two_mode(self) -> bool {
        !matches!(
            self,
            Family::ScsEven | Family::ScsOdd | Family::SscsEven | Family::SscsOdd
        )
    }

    /// Whether the family carries a squeeze parameter.
    pub fn is_squeezed(self) -> bool {
        use Family::*;
        matches!(
            self,
            SscsEven | SscsOdd | EssPlus | EssMinus | SecsPhiPlus | SecsPhiMinus | SecsPsiPlus | SecsPsiMinus
        )
    }

    /// Photon-number parity of the state: `+1` or `-1`. For two-mode states
    /// this is the joint parity; beam splitting and squeezing preserve it.
    pub fn photon_parity(self) -> f64 {
        self.parity().sign()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                format!("unknown family `{s}`; valid names: {}", names.join(", "))
            })
    }
}

/// Which mode of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// A validated choice of family, amplitude and squeeze parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    pub family: Family,
    pub gamma: f64,
    pub s: f64,
}

impl StateSpec {
    pub fn new(family: Family, gamma: f64, s: f64) -> Result<Self> {
        ensure_finite("gamma", gamma)?;
        ensure_finite("s", s)?;
        if gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be non-negative, got {gamma}"),
            });
        }
        if !family.is_squeezed() && s != 0.0 {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("family `{family}` is unsqueezed; s must be 0, got {s}"),
            });
        }
        if family.parity() == Parity::Odd && gamma == 0.0 {
            return Err(Error::OddAtZeroAmplitude);
        }
        Ok(StateSpec { family, gamma, s })
    }

    /// Amplitude of the single-mode cat the state is built from: the state's
    /// own amplitude for single-mode families, `√2·γ` for two-mode families.
    pub fn cat_amplitude(&self) -> f64 {
        if self.family.is_two_mode() {
            SQRT_2 * self.gamma
        } else {
            self.gamma
        }
    }

    fn require_single(&self) -> Result<()> {
        if self.family.is_two_mode() {
            Err(Error::WrongFamily {
                family: self.family,
                expected: "single-mode",
            })
        } else {
            Ok(())
        }
    }

    fn require_two_mode(&self) -> Result<()> {
        if self.family.is_two_mode() {
            Ok(())
        } else {
            Err(Error::WrongFamily {
                family: self.family,
                expected: "two-mode",
            })
        }
    }
}

/// A single-mode (squeezed) cat `S(s) N±(|A⟩ ± |−A⟩)` with real amplitude `A`,
/// with everything needed for fast evaluation precomputed.
#[derive(Debug, Clone)]
pub struct SqueezedCat {
    parity: Parity,
    amplitude: f64,
    s: f64,
    norm2: f64,
    frame: SqueezeFrame,
}

impl SqueezedCat {
    pub fn new(parity: Parity, amplitude: f64, s: f64) -> Result<Self> {
        ensure_finite("s", s)?;
        let n = scs_norm(amplitude, parity)?;
        Ok(SqueezedCat {
            parity,
            amplitude,
            s,
            norm2: n * n,
            frame: SqueezeFrame::new(s),
        })
    }

    pub fn from_spec(spec: &StateSpec) -> Result<Self> {
        spec.require_single()?;
        Self::new(spec.family.parity(), spec.gamma, spec.s)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn squeeze(&self) -> f64 {
        self.s
    }

    /// Wigner function of the unsqueezed cat.
    fn wigner_unsqueezed(&self, z: Complex64) -> f64 {
        let g = Complex64::new(self.amplitude, 0.0);
        self.norm2
            * (w_coherent_kernel(z, g) + w_coherent_kernel(z, -g) + 2.0 * self.parity.sign() * x_kernel(z, g))
    }

    pub fn wigner(&self, z: Complex64) -> f64 {
        self.wigner_unsqueezed(squeeze_coord(z, self.s))
    }

    pub fn husimi(&self, z: Complex64) -> f64 {
        let f = &self.frame;
        let g = Complex64::new(self.amplitude, 0.0);
        let (cm, cp) = (f.center_minus(g), f.center_plus(g));
        let zs = f.coord(z);
        let cross = q_coherent_kernel(zs, Complex64::new(0.0, 0.0))
            * (-cm.norm_sqr()).exp()
            * (2.0 * (zs.conj() * cp).im).cos();
        self.norm2
            * f.cos_theta
            * (q_coherent_kernel(zs, cm) + q_coherent_kernel(zs, -cm) + 2.0 * self.parity.sign() * cross)
    }

    /// The three Husimi terms as Gaussian terms in the coordinate `w`
    /// (a linear functional of some larger coordinate vector).
    pub(crate) fn husimi_terms<const N: usize>(&self, w: Lin<N>) -> [GaussTerm<N>; 3] {
        let f = &self.frame;
        let (hc, hs) = f.half_angle();
        let ws = w.scale(hc).add(w.conj().scale(hs));
        let g = Complex64::new(self.amplitude, 0.0);
        let (cm, cp) = (f.center_minus(g), f.center_plus(g));
        let pre = self.norm2 * f.cos_theta * FRAC_1_PI;
        let zero = Complex64::new(0.0, 0.0);
        [
            GaussTerm::constant(pre).gaussian(ws, cm),
            GaussTerm::constant(pre).gaussian(ws, -cm),
            GaussTerm::constant(2.0 * self.parity.sign() * pre * (-cm.norm_sqr()).exp())
                .gaussian(ws, zero)
                .fringe(ws, cp, 2.0),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
enum TwoModeKind {
    /// Squeeze, then split: `B (S(s)|cat(√2γ)⟩ ⊗ |0⟩)`.
    Ess,
    /// Split, then two-mode squeeze; `phi` selects `|γ,γ⟩` versus `|γ,−γ⟩`
    /// branches.
    Secs { phi: bool },
}

/// A two-mode state ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct TwoModeState {
    spec: StateSpec,
    kind: TwoModeKind,
    parity: Parity,
    /// `N±(√2γ)^2`
    norm2: f64,
    frame: SqueezeFrame,
    /// The split cat, only for ESS.
    cat: Option<SqueezedCat>,
    marginal_a: Vec<GaussTerm<2>>,
    marginal_b: Vec<GaussTerm<2>>,
}

fn vacuum_w(z: Complex64) -> f64 {
    w_coherent_kernel(z, Complex64::new(0.0, 0.0))
}

fn vacuum_q(z: Complex64) -> f64 {
    q_coherent_kernel(z, Complex64::new(0.0, 0.0))
}

impl TwoModeState {
    pub fn new(spec: &StateSpec) -> Result<Self> {
        spec.require_two_mode()?;
        use Family::*;
        let kind = match spec.family {
            EssPlus | EssMinus => TwoModeKind::Ess,
            EcsPhiPlus | EcsPhiMinus | SecsPhiPlus | SecsPhiMinus => TwoModeKind::Secs { phi: true },
            _ => TwoModeKind::Secs { phi: false },
        };
        let parity = spec.family.parity();
        let n = scs_norm(spec.cat_amplitude(), parity)?;
        let cat = match kind {
            TwoModeKind::Ess => Some(SqueezedCat::new(parity, spec.cat_amplitude(), spec.s)?),
            TwoModeKind::Secs { .. } => None,
        };
        let mut state = TwoModeState {
            spec: *spec,
            kind,
            parity,
            norm2: n * n,
            frame: SqueezeFrame::new(spec.s),
            cat,
            marginal_a: Vec::new(),
            marginal_b: Vec::new(),
        };
        let terms = state.husimi_terms();
        state.marginal_a = terms.iter().map(|t| t.marginal(1)).collect();
        state.marginal_b = terms.iter().map(|t| t.marginal(0)).collect();
        Ok(state)
    }

    pub fn spec(&self) -> &StateSpec {
        &self.spec
    }

    pub fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        match self.kind {
            TwoModeKind::Ess => {
                let cat = self.cat.as_ref().expect("ESS carries its cat");
                let s = self.spec.s;
                let rel = (squeeze_coord(a, s) - squeeze_coord(b, s)) * FRAC_1_SQRT_2;
                cat.wigner_unsqueezed(rel) * vacuum_w((a + b) * FRAC_1_SQRT_2)
            }
            TwoModeKind::Secs { phi } => {
                let (ta, tb) = two_mode_squeeze_coords(a, b, self.spec.s);
                self.ecs_wigner(phi, ta, tb)
            }
        }
    }

    fn ecs_wigner(&self, phi: bool, a: Complex64, b: Complex64) -> f64 {
        let g = Complex64::new(self.spec.gamma, 0.0);
        let sign = self.parity.sign();
        let xx = x_kernel(a, g) * x_kernel(b, g);
        let yy = y_kernel(a, g) * y_kernel(b, g);
        if phi {
            self.norm2
                * (w_coherent_kernel(a, g) * w_coherent_kernel(b, g)
                    + w_coherent_kernel(a, -g) * w_coherent_kernel(b, -g)
                    + 2.0 * sign * xx
                    - 2.0 * sign * yy)
        } else {
            self.norm2
                * (w_coherent_kernel(a, g) * w_coherent_kernel(b, -g)
                    + w_coherent_kernel(a, -g) * w_coherent_kernel(b, g)
                    + 2.0 * sign * xx
                    + 2.0 * sign * yy)
        }
    }

    pub fn husimi(&self, a: Complex64, b: Complex64) -> f64 {
        match self.kind {
            TwoModeKind::Ess => {
                let cat = self.cat.as_ref().expect("ESS carries its cat");
                cat.husimi((a - b) * FRAC_1_SQRT_2) * vacuum_q((a + b) * FRAC_1_SQRT_2)
            }
            TwoModeKind::Secs { phi } => {
                let f = &self.frame;
                let g = Complex64::new(self.spec.gamma, 0.0);
                let (cm, cp) = (f.center_minus(g), f.center_plus(g));
                let (ta, tb) = f.tilde_coords(a, b);
                let sign = self.parity.sign();
                let envelope = vacuum_q(ta) * vacuum_q(tb);
                let body = if phi {
                    // branches |γ,γ⟩ and |−γ,−γ⟩ sit at ±γ_{-s} in both modes
                    q_coherent_kernel(ta, cm) * q_coherent_kernel(tb, cm)
                        + q_coherent_kernel(ta, -cm) * q_coherent_kernel(tb, -cm)
                        + 2.0
                            * sign
                            * envelope
                            * (-2.0 * cm.norm_sqr()).exp()
                            * (2.0 * (ta.conj() * cp + tb.conj() * cp).im).cos()
                } else {
                    // branches |γ,−γ⟩ and |−γ,γ⟩ sit at ±(γ_s, −γ_s)
                    q_coherent_kernel(ta, cp) * q_coherent_kernel(tb, -cp)
                        + q_coherent_kernel(ta, -cp) * q_coherent_kernel(tb, cp)
                        + 2.0
                            * sign
                            * envelope
                            * (-2.0 * cp.norm_sqr()).exp()
                            * (2.0 * (ta.conj() * cm - tb.conj() * cm).im).cos()
                };
                self.norm2 * f.cos_theta * f.cos_theta * body
            }
        }
    }

    /// Marginal Husimi function of one mode, in closed form.
    pub fn husimi_marginal(&self, mode: Mode, z: Complex64) -> f64 {
        let terms = match mode {
            Mode::A => &self.marginal_a,
            Mode::B => &self.marginal_b,
        };
        let p = [z.re, z.im];
        terms.iter().map(|t| t.eval(&p)).sum()
    }

    /// `Q(a, b)` as Gaussian terms over `(Re a, Im a, Re b, Im b)`.
    pub(crate) fn husimi_terms(&self) -> Vec<GaussTerm<4>> {
        let a = Lin::<4>::coord(0);
        let b = Lin::<4>::coord(1);
        match self.kind {
            TwoModeKind::Ess => {
                let cat = self.cat.as_ref().expect("ESS carries its cat");
                let rel = a.add(b.scale(-1.0)).scale(FRAC_1_SQRT_2);
                let com = a.add(b).scale(FRAC_1_SQRT_2);
                let zero = Complex64::new(0.0, 0.0);
                cat.husimi_terms(rel)
                    .into_iter()
                    .map(|t| t.gaussian(com, zero).scaled(FRAC_1_PI))
                    .collect()
            }
            TwoModeKind::Secs { phi } => {
                let f = &self.frame;
                let (hc, hs) = f.half_angle();
                let ta = a.scale(hc).add(b.conj().scale(hs));
                let tb = b.scale(hc).add(a.conj().scale(hs));
                let g = Complex64::new(self.spec.gamma, 0.0);
                let (cm, cp) = (f.center_minus(g), f.center_plus(g));
                let pre = self.norm2 * f.cos_theta * f.cos_theta * FRAC_1_PI * FRAC_1_PI;
                let sign = self.parity.sign();
                let zero = Complex64::new(0.0, 0.0);
                if phi {
                    vec![
                        GaussTerm::constant(pre).gaussian(ta, cm).gaussian(tb, cm),
                        GaussTerm::constant(pre).gaussian(ta, -cm).gaussian(tb, -cm),
                        GaussTerm::constant(2.0 * sign * pre * (-2.0 * cm.norm_sqr()).exp())
                            .gaussian(ta, zero)
                            .gaussian(tb, zero)
                            .fringe(ta, cp, 2.0)
                            .fringe(tb, cp, 2.0),
                    ]
                } else {
                    vec![
                        GaussTerm::constant(pre).gaussian(ta, cp).gaussian(tb, -cp),
                        GaussTerm::constant(pre).gaussian(ta, -cp).gaussian(tb, cp),
                        GaussTerm::constant(2.0 * sign * pre * (-2.0 * cp.norm_sqr()).exp())
                            .gaussian(ta, zero)
                            .gaussian(tb, zero)
                            .fringe(ta, cm, 2.0)
                            .fringe(tb, cm, -2.0),
                    ]
                }
            }
        }
    }
}

/// Wigner function of a single-mode family.
pub fn wigner_scs(spec: &StateSpec, point: Complex64) -> Result<f64> {
    Ok(SqueezedCat::from_spec(spec)?.wigner(point))
}

/// Two-mode Wigner function of a two-mode family.
pub fn wigner_two_mode(spec: &StateSpec, a: Complex64, b: Complex64) -> Result<f64> {
    Ok(TwoModeState::new(spec)?.wigner(a, b))
}

pub fn husimi_single(spec: &StateSpec, point: Complex64) -> Result<f64> {
    Ok(SqueezedCat::from_spec(spec)?.husimi(point))
}

pub fn husimi_two_mode(spec: &StateSpec, a: Complex64, b: Complex64) -> Result<f64> {
    Ok(TwoModeState::new(spec)?.husimi(a, b))
}

pub fn husimi_marginal(spec: &StateSpec, mode: Mode, point: Complex64) -> Result<f64> {
    Ok(TwoModeState::new(spec)?.husimi_marginal(mode, point))
}
