//! Bell functionals over displacement settings.
//!
//! * Parity CHSH: `(π/2)²[W(a,b) + W(a′,b) + W(a,b′) − W(a′,b′)]`.
//! * CH: `π²[Q(a,b) + Q(a′,b) + Q(a,b′) − Q(a′,b′)] − π[Q_a(a) + Q_b(b)]`.
//! * On/off CHSH: the same four-term combination of
//!   `A(x,y) = 1 − 2πQ_a(−x) − 2πQ_b(−y) + 4π²Q(−x,−y)`.
//!
//! The on/off value at some settings equals `4·CH + 2` at the negated settings.
//! All functionals return signed values.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::states::{Mode, StateSpec, TwoModeState};

/// A two-mode state seen through its Wigner and Husimi functions.
pub trait TwoModeQuasi: Sync {
    fn wigner(&self, a: Complex64, b: Complex64) -> f64;
    fn husimi(&self, a: Complex64, b: Complex64) -> f64;
    fn husimi_marginal(&self, mode: Mode, z: Complex64) -> f64;
}

impl TwoModeQuasi for TwoModeState {
    fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        TwoModeState::wigner(self, a, b)
    }

    fn husimi(&self, a: Complex64, b: Complex64) -> f64 {
        TwoModeState::husimi(self, a, b)
    }

    fn husimi_marginal(&self, mode: Mode, z: Complex64) -> f64 {
        TwoModeState::husimi_marginal(self, mode, z)
    }
}

/// The four displacements `(a, a′, b, b′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSettings {
    pub a: Complex64,
    pub a_prime: Complex64,
    pub b: Complex64,
    pub b_prime: Complex64,
}

impl DisplacementSettings {
    pub fn new(a: Complex64, a_prime: Complex64, b: Complex64, b_prime: Complex64) -> Result<Self> {
        for z in [a, a_prime, b, b_prime] {
            ensure_finite("setting", z.re)?;
            ensure_finite("setting", z.im)?;
        }
        Ok(DisplacementSettings {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// Unpack `[Re a, Im a, Re a′, Im a′, Re b, Im b, Re b′, Im b′]`.
    pub fn from_params(p: &[f64; 8]) -> Self {
        DisplacementSettings {
            a: Complex64::new(p[0], p[1]),
            a_prime: Complex64::new(p[2], p[3]),
            b: Complex64::new(p[4], p[5]),
            b_prime: Complex64::new(p[6], p[7]),
        }
    }

    pub fn to_params(&self) -> [f64; 8] {
        [
            self.a.re,
            self.a.im,
            self.a_prime.re,
            self.a_prime.im,
            self.b.re,
            self.b.im,
            self.b_prime.re,
            self.b_prime.im,
        ]
    }

    pub fn negated(&self) -> Self {
        DisplacementSettings {
            a: -self.a,
            a_prime: -self.a_prime,
            b: -self.b,
            b_prime: -self.b_prime,
        }
    }

    /// Swap `a ↔ a′`.
    pub fn swap_a(&self) -> Self {
        DisplacementSettings {
            a: self.a_prime,
            a_prime: self.a,
            ..*self
        }
    }

    /// Swap `b ↔ b′`.
    pub fn swap_b(&self) -> Self {
        DisplacementSettings {
            b: self.b_prime,
            b_prime: self.b,
            ..*self
        }
    }

    /// The four `(x, y, sign)` pairs of the CHSH combination.
    fn pairs(&self) -> [(Complex64, Complex64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a_prime, self.b, 1.0),
            (self.a, self.b_prime, 1.0),
            (self.a_prime, self.b_prime, -1.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    ParityChsh,
    Ch,
    OnOffChsh,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::ParityChsh, Scheme::Ch, Scheme::OnOffChsh];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ParityChsh => "parity",
            Scheme::Ch => "ch",
            Scheme::OnOffChsh => "onoff",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Scheme::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Scheme::ALL.iter().map(|k| k.name()).collect();
            format!("unknown scheme `{s}`; valid schemes: {}", names.join(", "))
        })
    }
}

/// `(π/2)² W(x, y)`, the displaced joint-parity correlation.
pub fn parity_correlation<S: TwoModeQuasi + ?Sized>(state: &S, x: Complex64, y: Complex64) -> f64 {
    FRAC_PI_2 * FRAC_PI_2 * state.wigner(x, y)
}

/// `A(x, y)`, the joint on/off correlation.
pub fn onoff_correlation<S: TwoModeQuasi + ?Sized>(state: &S, x: Complex64, y: Complex64) -> f64 {
    1.0 - 2.0 * PI * state.husimi_marginal(Mode::A, -x) - 2.0 * PI * state.husimi_marginal(Mode::B, -y)
        + 4.0 * PI * PI * state.husimi(-x, -y)
}

pub fn parity_chsh_of<S: TwoModeQuasi + ?Sized>(state: &S, settings: &DisplacementSettings) -> f64 {
    settings
        .pairs()
        .iter()
        .map(|&(x, y, sign)| sign * parity_correlation(state, x, y))
        .sum()
}

pub fn ch_of<S: TwoModeQuasi + ?Sized>(state: &S, settings: &DisplacementSettings) -> f64 {
    let joint: f64 = settings
        .pairs()
        .iter()
        .map(|&(x, y, sign)| sign * state.husimi(x, y))
        .sum();
    PI * PI * joint
        - PI * (state.husimi_marginal(Mode::A, settings.a) + state.husimi_marginal(Mode::B, settings.b))
}

pub fn onoff_chsh_of<S: TwoModeQuasi + ?Sized>(state: &S, settings: &DisplacementSettings) -> f64 {
    settings
        .pairs()
        .iter()
        .map(|&(x, y, sign)| sign * onoff_correlation(state, x, y))
        .sum()
}

/// Evaluate the functional of `scheme`.
pub fn bell_value<S: TwoModeQuasi + ?Sized>(
    state: &S,
    scheme: Scheme,
    settings: &DisplacementSettings,
) -> f64 {
    match scheme {
        Scheme::ParityChsh => parity_chsh_of(state, settings),
        Scheme::Ch => ch_of(state, settings),
        Scheme::OnOffChsh => onoff_chsh_of(state, settings),
    }
}

fn two_mode(spec: &StateSpec) -> Result<TwoModeState> {
    if !spec.family.is_two_mode() {
        return Err(Error::WrongFamily {
            family: spec.family,
            expected: "two-mode",
        });
    }
    TwoModeState::new(spec)
}

pub fn chsh_parity(spec: &StateSpec, settings: &DisplacementSettings) -> Result<f64> {
    Ok(parity_chsh_of(&two_mode(spec)?, settings))
}

pub fn ch_value(spec: &StateSpec, settings: &DisplacementSettings) -> Result<f64> {
    Ok(ch_of(&two_mode(spec)?, settings))
}

pub fn chsh_onoff(spec: &StateSpec, settings: &DisplacementSettings) -> Result<f64> {
    Ok(onoff_chsh_of(&two_mode(spec)?, settings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Family;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degenerate_settings_cannot_violate() {
        let spec = StateSpec::new(Family::EcsPsiMinus, 1.0, 0.0).unwrap();
        let st = TwoModeState::new(&spec).unwrap();
        let set = DisplacementSettings::new(c(0.1, 0.2), c(0.1, 0.2), c(-0.3, 0.0), c(-0.3, 0.0)).unwrap();
        let v = chsh_parity(&spec, &set).unwrap();
        assert!((v - 2.0 * parity_correlation(&st, set.a, set.b)).abs() < 1e-15);
        assert!(v.abs() <= 2.0);
    }

    #[test]
    fn far_settings() {
        let spec = StateSpec::new(Family::EcsPhiMinus, 1.0, 0.0).unwrap();
        let far = c(12.0, -9.0);
        let set = DisplacementSettings::new(far, far, far, far).unwrap();
        assert!(ch_value(&spec, &set).unwrap().abs() < 1e-12);
        let b = chsh_onoff(&spec, &set).unwrap();
        assert!((b - 2.0).abs() < 1e-12 && b <= 2.0);
    }

    #[test]
    fn single_mode_is_rejected() {
        let spec = StateSpec::new(Family::ScsEven, 1.0, 0.0).unwrap();
        let set = DisplacementSettings::from_params(&[0.0; 8]);
        for f in [chsh_parity, ch_value, chsh_onoff] {
            assert!(matches!(f(&spec, &set), Err(Error::WrongFamily { .. })));
        }
    }

    #[test]
    fn params_round_trip() {
        let p = [0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8];
        assert_eq!(DisplacementSettings::from_params(&p).to_params(), p);
        assert!(DisplacementSettings::new(c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn scheme_names() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        let err = "bogus".parse::<Scheme>().unwrap_err();
        assert!(err.contains("parity") && err.contains("onoff"));
    }
}
