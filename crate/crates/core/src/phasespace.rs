//! Real-valued phase-space kernels and the squeezed-frame coordinate maps.
//!
//! Conventions used throughout the crate:
//!
//! * A phase-space point is a complex amplitude `alpha = Re + i Im` in
//!   dimensionless quadrature units, so that the vacuum Wigner function is
//!   `(2/pi) exp(-2|alpha|^2)` and the vacuum Husimi function is
//!   `exp(-|alpha|^2) / pi`.
//! * The squeeze parameter `s` is real. `s > 0` narrows the distribution along
//!   the real axis, `s < 0` along the imaginary axis.
//!
//! Every kernel returns a plain `f64`; complex arithmetic only ever appears in
//! the coordinates.

use std::f64::consts::{FRAC_1_PI, FRAC_2_PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Photon-number parity of a cat state, i.e. the `±` in `|γ⟩ ± |−γ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Wigner function of the coherent state `|center⟩`.
#[inline]
pub fn w_coherent_kernel(point: Complex64, center: Complex64) -> f64 {
    FRAC_2_PI * (-2.0 * (point - center).norm_sqr()).exp()
}

#[inline]
fn fringe_phase(point: Complex64, center: Complex64) -> f64 {
    4.0 * (point.conj() * center).im
}

/// Cosine interference kernel between `|center⟩` and `|−center⟩`.
#[inline]
pub fn x_kernel(point: Complex64, center: Complex64) -> f64 {
    FRAC_2_PI * (-2.0 * point.norm_sqr()).exp() * fringe_phase(point, center).cos()
}

/// Sine partner of [`x_kernel`]; appears only in two-mode interference terms.
#[inline]
pub fn y_kernel(point: Complex64, center: Complex64) -> f64 {
    FRAC_2_PI * (-2.0 * point.norm_sqr()).exp() * fringe_phase(point, center).sin()
}

/// `alpha^s = e^s Re(alpha) + i e^-s Im(alpha)`.
///
/// The Wigner function of `S(s) rho S(s)^dagger` at `alpha` equals the Wigner
/// function of `rho` at `squeeze_coord(alpha, s)`.
#[inline]
pub fn squeeze_coord(point: Complex64, s: f64) -> Complex64 {
    Complex64::new(s.exp() * point.re, (-s).exp() * point.im)
}

/// Two-mode analogue of [`squeeze_coord`]:
/// `(a cosh s + b* sinh s, b cosh s + a* sinh s)`.
#[inline]
pub fn two_mode_squeeze_coords(a: Complex64, b: Complex64, s: f64) -> (Complex64, Complex64) {
    let (ch, sh) = (s.cosh(), s.sinh());
    (a * ch + b.conj() * sh, b * ch + a.conj() * sh)
}

/// Husimi function of the coherent state `|center⟩`: `exp(-|point - center|^2) / pi`.
#[inline]
pub fn q_coherent_kernel(point: Complex64, center: Complex64) -> f64 {
    FRAC_1_PI * (-(point - center).norm_sqr()).exp()
}

/// Rotated frame in which the Husimi function of a squeezed state separates.
///
/// The angle obeys `theta/2 = atan(tanh(s/2))`, which is the same as
/// `sin(theta) = tanh(s)` and `cos(theta) = 1/cosh(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeFrame {
    pub s: f64,
    pub theta: f64,
    pub cos_theta: f64,
    half_cos: f64,
    half_sin: f64,
}

impl SqueezeFrame {
    pub fn new(s: f64) -> Self {
        let half = (0.5 * s).tanh().atan();
        let theta = 2.0 * half;
        SqueezeFrame {
            s,
            theta,
            // 1/cosh(s) is the exact value; cos(theta) agrees to rounding.
            cos_theta: 1.0 / s.cosh(),
            half_cos: half.cos(),
            half_sin: half.sin(),
        }
    }

    /// `alpha_s = alpha cos(theta/2) + alpha* sin(theta/2)`.
    #[inline]
    pub fn coord(&self, point: Complex64) -> Complex64 {
        point * self.half_cos + point.conj() * self.half_sin
    }

    /// `gamma_{-s} = gamma cos(theta/2) - gamma* sin(theta/2)`: the coherent
    /// centre of `S(s)|gamma⟩` expressed in frame coordinates.
    #[inline]
    pub fn center_minus(&self, gamma: Complex64) -> Complex64 {
        gamma * self.half_cos - gamma.conj() * self.half_sin
    }

    /// `gamma_s = gamma cos(theta/2) + gamma* sin(theta/2)`.
    #[inline]
    pub fn center_plus(&self, gamma: Complex64) -> Complex64 {
        gamma * self.half_cos + gamma.conj() * self.half_sin
    }

    /// Mixed two-mode frame coordinates
    /// `(a cos(theta/2) + b* sin(theta/2), b cos(theta/2) + a* sin(theta/2))`.
    #[inline]
    pub fn tilde_coords(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (
            a * self.half_cos + b.conj() * self.half_sin,
            b * self.half_cos + a.conj() * self.half_sin,
        )
    }

    pub(crate) fn half_angle(&self) -> (f64, f64) {
        (self.half_cos, self.half_sin)
    }
}

/// Frame constructor under its operational name.
pub fn q_squeeze_frame(s: f64) -> SqueezeFrame {
    SqueezeFrame::new(s)
}

pub fn q_frame_coord(point: Complex64, frame: &SqueezeFrame) -> Complex64 {
    frame.coord(point)
}

/// Normalization `N±` of `N±(|γ⟩ ± |−γ⟩)` for real `γ`, from `⟨γ|−γ⟩ = exp(-2γ²)`.
pub fn scs_norm(gamma: f64, parity: Parity) -> Result<f64> {
    crate::error::ensure_finite("gamma", gamma)?;
    if gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be non-negative, got {gamma}"),
        });
    }
    if parity == Parity::Odd && gamma == 0.0 {
        return Err(Error::OddAtZeroAmplitude);
    }
    let overlap = (-2.0 * gamma * gamma).exp();
    let denom = match parity {
        Parity::Even => 2.0 * (1.0 + overlap),
        // 1 - exp(-x) without cancellation for small gamma
        Parity::Odd => -2.0 * (-2.0 * gamma * gamma).exp_m1(),
    };
    Ok(1.0 / denom.sqrt())
}
