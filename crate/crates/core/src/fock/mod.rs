//! Truncated Fock-space simulation used as ground truth for the closed forms.
//!
//! States are rebuilt operator by operator (coherent superposition, squeezing,
//! beam splitting) on a photon-number basis cut at `n_max`. Every operator is
//! applied in a padded space and the probability that leaks above `n_max` is
//! checked against the policy's tail bound, so a state either comes back
//! certified or as a [`Error::Truncation`].
//!
//! Quadrature convention: `x = (a + a†)/√2`. With `S(s) = exp[(s/2)(a² − a†²)]`
//! the vacuum variance of `x` becomes `e^{-2s}/2`, i.e. `s > 0` narrows the
//! state along the real axis.

pub mod check;
mod expm;

use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::phasespace::Parity;
use crate::states::{Family, Mode, StateSpec};

use self::expm::expm;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where to cut the photon-number basis and how much probability may be lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub n_max: usize,
    pub tail_bound: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            n_max: 48,
            tail_bound: 1e-12,
        }
    }
}

impl TruncationPolicy {
    pub fn with_n_max(n_max: usize) -> Self {
        TruncationPolicy {
            n_max,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    fn padded_dim(&self) -> usize {
        self.dim() + self.n_max.max(32)
    }

    /// Largest displacement `|alpha|` for which displaced-parity matrix
    /// elements are evaluated.
    pub fn headroom(&self) -> f64 {
        0.5 * (self.n_max as f64).sqrt() + 1.0
    }

    fn check_headroom(&self, alpha: Complex64) -> Result<()> {
        ensure_finite("alpha", alpha.re)?;
        ensure_finite("alpha", alpha.im)?;
        let limit = self.headroom();
        if alpha.norm() > limit {
            Err(Error::Headroom {
                magnitude: alpha.norm(),
                limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Amplitudes or density matrix on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub enum FockData {
    /// Single-mode pure state.
    Pure(DVector<Complex64>),
    /// Single-mode density matrix.
    Mixed(DMatrix<Complex64>),
    /// Two-mode pure state, `psi[(m, n)] = ⟨m|_a ⟨n|_b |psi⟩`.
    TwoMode(DMatrix<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_max: usize,
    pub data: FockData,
}

/// `⟨m|alpha⟩` for `m = 0..dim`.
fn coherent_coeffs(alpha: Complex64, dim: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(dim, ZERO);
    v[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 1..dim {
        v[m] = v[m - 1] * alpha / (m as f64).sqrt();
    }
    v
}

/// Poisson probability mass above `n_max` for mean `mean`.
fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // log p(n) accumulated incrementally from n = 0
    let mut logp = -mean;
    for n in 1..=n_max + 1 {
        logp += mean.ln() - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = logp.exp();
        tail += p;
        if p < 1e-30 * tail.max(1e-300) && n as f64 > mean {
            break;
        }
        n += 1;
        logp += mean.ln() - (n as f64).ln();
        if n > n_max + 100_000 {
            break;
        }
    }
    tail
}

fn truncation_error(mass: f64, policy: &TruncationPolicy) -> Error {
    Error::Truncation {
        mass,
        n_max: policy.n_max,
        bound: policy.tail_bound,
    }
}

/// Coherent state `|gamma⟩`, renormalized after truncation.
pub fn coherent(gamma: Complex64, policy: &TruncationPolicy) -> Result<FockState> {
    ensure_finite("gamma", gamma.re)?;
    ensure_finite("gamma", gamma.im)?;
    let tail = poisson_tail(gamma.norm_sqr(), policy.n_max);
    if tail > policy.tail_bound {
        return Err(truncation_error(tail, policy));
    }
    let mut v = coherent_coeffs(gamma, policy.dim());
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::Pure(v),
    })
}

/// Cat state `N±(|A⟩ ± |−A⟩)` for real `A`.
pub fn cat(amplitude: f64, parity: Parity, policy: &TruncationPolicy) -> Result<FockState> {
    if parity == Parity::Odd && amplitude == 0.0 {
        return Err(Error::OddAtZeroAmplitude);
    }
    let g = Complex64::new(amplitude, 0.0);
    let plus = coherent_coeffs(g, policy.dim());
    let minus = coherent_coeffs(-g, policy.dim());
    let tail = poisson_tail(amplitude * amplitude, policy.n_max);
    if tail > policy.tail_bound {
        return Err(truncation_error(tail, policy));
    }
    let mut v = plus + minus * Complex64::new(parity.sign(), 0.0);
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::Pure(v),
    })
}

pub fn number_state(n: usize, policy: &TruncationPolicy) -> Result<FockState> {
    if n > policy.n_max {
        return Err(Error::Dimension(format!(
            "|{n}⟩ does not fit under n_max = {}",
            policy.n_max
        )));
    }
    let mut v = DVector::from_element(policy.dim(), ZERO);
    v[n] = Complex64::new(1.0, 0.0);
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::Pure(v),
    })
}

/// Pure single-mode state from amplitudes on `|0⟩, |1⟩, ...`.
pub fn from_amplitudes(amps: &[Complex64], policy: &TruncationPolicy) -> Result<FockState> {
    if amps.len() > policy.dim() {
        return Err(Error::Dimension(format!(
            "{} amplitudes exceed dimension {}",
            amps.len(),
            policy.dim()
        )));
    }
    let mut v = DVector::from_element(policy.dim(), ZERO);
    for (i, a) in amps.iter().enumerate() {
        v[i] = *a;
    }
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::Pure(v),
    })
}

fn pad_vector(v: &DVector<Complex64>, dim: usize) -> DVector<Complex64> {
    let mut out = DVector::from_element(dim, ZERO);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

fn apply_real(u: &DMatrix<f64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let re = u * v.map(|z| z.re);
    let im = u * v.map(|z| z.im);
    DVector::from_fn(v.len(), |i, _| Complex64::new(re[i], im[i]))
}

fn apply_real_mat(u: &DMatrix<f64>, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let re = u * m.map(|z| z.re);
    let im = u * m.map(|z| z.im);
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}

/// Truncate a padded vector back to `dim`, failing if too much mass leaks.
fn cut_vector(v: DVector<Complex64>, policy: &TruncationPolicy) -> Result<DVector<Complex64>> {
    let dim = policy.dim();
    let leaked: f64 = v.iter().skip(dim).map(|z| z.norm_sqr()).sum();
    if leaked > policy.tail_bound {
        return Err(truncation_error(leaked, policy));
    }
    let mut out = v.rows(0, dim).into_owned();
    let norm = out.norm();
    out /= Complex64::new(norm, 0.0);
    Ok(out)
}

fn cut_two_mode(m: DMatrix<Complex64>, policy: &TruncationPolicy) -> Result<DMatrix<Complex64>> {
    let dim = policy.dim();
    let total: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let kept = m.view((0, 0), (dim, dim)).into_owned();
    let kept_mass: f64 = kept.iter().map(|z| z.norm_sqr()).sum();
    let leaked = total - kept_mass;
    if leaked > policy.tail_bound {
        return Err(truncation_error(leaked, policy));
    }
    let norm = kept_mass.sqrt();
    Ok(kept / Complex64::new(norm, 0.0))
}

fn single_squeeze_generator(s: f64, dim: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(dim, dim);
    for n in 2..dim {
        let v = 0.5 * s * ((n * (n - 1)) as f64).sqrt();
        // a² lowers by two, a†² raises by two
        g[(n - 2, n)] += v;
        g[(n, n - 2)] -= v;
    }
    g
}

/// Apply `S(s) = exp[(s/2)(a² − a†²)]` to a single-mode state.
pub fn apply_single_squeeze(state: &FockState, s: f64, policy: &TruncationPolicy) -> Result<FockState> {
    ensure_finite("s", s)?;
    check_dim(state, policy)?;
    let pd = policy.padded_dim();
    let u = expm(&single_squeeze_generator(s, pd));
    let data = match &state.data {
        FockData::Pure(v) => FockData::Pure(cut_vector(apply_real(&u, &pad_vector(v, pd)), policy)?),
        FockData::Mixed(rho) => {
            let mut big = DMatrix::from_element(pd, pd, ZERO);
            big.view_mut((0, 0), (rho.nrows(), rho.ncols())).copy_from(rho);
            let left = apply_real_mat(&u, &big);
            let out = apply_real_mat(&u, &left.adjoint()).adjoint();
            let dim = policy.dim();
            let leaked = 1.0 - (0..dim).map(|i| out[(i, i)].re).sum::<f64>();
            if leaked > policy.tail_bound {
                return Err(truncation_error(leaked, policy));
            }
            let kept = out.view((0, 0), (dim, dim)).into_owned();
            let tr = kept.trace().re;
            FockData::Mixed(kept / Complex64::new(tr, 0.0))
        }
        FockData::TwoMode(_) => {
            return Err(Error::Dimension("single-mode squeeze on a two-mode state".into()))
        }
    };
    Ok(FockState {
        n_max: policy.n_max,
        data,
    })
}

fn check_dim(state: &FockState, policy: &TruncationPolicy) -> Result<()> {
    if state.n_max != policy.n_max {
        Err(Error::Dimension(format!(
            "state has n_max = {} but the policy says {}",
            state.n_max, policy.n_max
        )))
    } else {
        Ok(())
    }
}

/// Apply a two-mode generator that conserves some quantum number block by
/// block. `blocks` lists the basis states `(m, n)` of each invariant subspace
/// and `generator` fills the block matrix.
fn apply_blockwise(
    psi: &DMatrix<Complex64>,
    pd: usize,
    blocks: Vec<Vec<(usize, usize)>>,
    generator: impl Fn(&[(usize, usize)]) -> DMatrix<f64>,
) -> DMatrix<Complex64> {
    let mut big = DMatrix::from_element(pd, pd, ZERO);
    big.view_mut((0, 0), (psi.nrows(), psi.ncols())).copy_from(psi);
    let mut out = DMatrix::from_element(pd, pd, ZERO);
    for basis in blocks {
        let v = DVector::from_iterator(basis.len(), basis.iter().map(|&(m, n)| big[(m, n)]));
        if v.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let u = expm(&generator(&basis));
        let w = apply_real(&u, &v);
        for (k, &(m, n)) in basis.iter().enumerate() {
            out[(m, n)] = w[k];
        }
    }
    out
}

/// 50:50 beam splitter `exp[(π/4)(a†b − a b†)]`; maps `|γ⟩|0⟩` to
/// `|γ/√2⟩|−γ/√2⟩`.
pub fn apply_beam_splitter(state: &FockState, policy: &TruncationPolicy) -> Result<FockState> {
    check_dim(state, policy)?;
    let FockData::TwoMode(psi) = &state.data else {
        return Err(Error::Dimension("beam splitter needs a two-mode state".into()));
    };
    let pd = policy.padded_dim();
    // Blocks of fixed total photon number; only complete ones (N < pd) are
    // exact, and the input never reaches beyond N = 2 n_max < pd + n_max.
    let max_total = 2 * (pd - 1);
    let blocks: Vec<Vec<(usize, usize)>> = (0..=max_total)
        .map(|total| {
            let lo = total.saturating_sub(pd - 1);
            let hi = total.min(pd - 1);
            (lo..=hi).map(|m| (m, total - m)).collect()
        })
        .collect();
    let theta = PI / 4.0;
    let out = apply_blockwise(psi, pd, blocks, |basis| {
        let k = basis.len();
        let mut g = DMatrix::zeros(k, k);
        for (j, &(m, n)) in basis.iter().enumerate() {
            for (i, &(m2, n2)) in basis.iter().enumerate() {
                // a†b: (m, n) -> (m + 1, n - 1)
                if m2 == m + 1 && n2 + 1 == n {
                    g[(i, j)] += theta * (((m + 1) * n) as f64).sqrt();
                }
                // a b†: (m, n) -> (m - 1, n + 1)
                if m2 + 1 == m && n2 == n + 1 {
                    g[(i, j)] -= theta * ((m * (n + 1)) as f64).sqrt();
                }
            }
        }
        g
    });
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::TwoMode(cut_two_mode(out, policy)?),
    })
}

/// Two-mode squeezer `exp[s(ab − a†b†)]`.
pub fn apply_two_mode_squeeze(state: &FockState, s: f64, policy: &TruncationPolicy) -> Result<FockState> {
    ensure_finite("s", s)?;
    check_dim(state, policy)?;
    let FockData::TwoMode(psi) = &state.data else {
        return Err(Error::Dimension("two-mode squeeze needs a two-mode state".into()));
    };
    let pd = policy.padded_dim();
    // Blocks of fixed photon-number difference m - n.
    let mut blocks = Vec::new();
    for d in -(pd as isize - 1)..=(pd as isize - 1) {
        let basis: Vec<(usize, usize)> = (0..pd)
            .filter_map(|n| {
                let m = n as isize + d;
                (m >= 0 && (m as usize) < pd).then_some((m as usize, n))
            })
            .collect();
        blocks.push(basis);
    }
    let out = apply_blockwise(psi, pd, blocks, |basis| {
        let k = basis.len();
        let mut g = DMatrix::zeros(k, k);
        // consecutive basis entries differ by one photon in each mode
        for j in 0..k - 1 {
            let (m, n) = basis[j + 1];
            // ab: (m, n) -> (m - 1, n - 1)
            let v = s * ((m * n) as f64).sqrt();
            g[(j, j + 1)] += v;
            // −a†b†: (m - 1, n - 1) -> (m, n)
            g[(j + 1, j)] -= v;
        }
        g
    });
    Ok(FockState {
        n_max: policy.n_max,
        data: FockData::TwoMode(cut_two_mode(out, policy)?),
    })
}

/// `|psi⟩ ⊗ |0⟩`.
pub fn with_vacuum(state: &FockState) -> Result<FockState> {
    let FockData::Pure(v) = &state.data else {
        return Err(Error::Dimension("needs a single-mode pure state".into()));
    };
    let dim = v.len();
    let mut psi = DMatrix::from_element(dim, dim, ZERO);
    psi.column_mut(0).copy_from(v);
    Ok(FockState {
        n_max: state.n_max,
        data: FockData::TwoMode(psi),
    })
}

/// Phase shift `exp(iπ b†b)` on mode b, which maps `|−γ⟩_b` to `|γ⟩_b`.
pub fn flip_mode_b(state: &FockState) -> Result<FockState> {
    let FockData::TwoMode(psi) = &state.data else {
        return Err(Error::Dimension("needs a two-mode state".into()));
    };
    let mut out = psi.clone();
    for n in (1..out.ncols()).step_by(2) {
        out.column_mut(n).neg_mut();
    }
    Ok(FockState {
        n_max: state.n_max,
        data: FockData::TwoMode(out),
    })
}

/// Rebuild a state of the given family operator by operator.
///
/// * SCS: `N±(|γ⟩ ± |−γ⟩)`; SSCS: `S(s)` applied to it.
/// * ESS: `B (S(s)|SCS±(√2γ)⟩ ⊗ |0⟩)`.
/// * ECS Ψ±: `B (|SCS±(√2γ)⟩ ⊗ |0⟩)`; Φ± additionally flips the phase of mode b.
/// * SECS: `S_ab(s)` applied to the matching ECS.
pub fn build_state(spec: &StateSpec, policy: &TruncationPolicy) -> Result<FockState> {
    use Family::*;
    let parity = spec.family.parity();
    let amp = spec.cat_amplitude();
    let single = cat(amp, parity, policy)?;
    match spec.family {
        ScsEven | ScsOdd => Ok(single),
        SscsEven | SscsOdd => apply_single_squeeze(&single, spec.s, policy),
        EssPlus | EssMinus => {
            let sq = apply_single_squeeze(&single, spec.s, policy)?;
            apply_beam_splitter(&with_vacuum(&sq)?, policy)
        }
        _ => {
            let psi = apply_beam_splitter(&with_vacuum(&single)?, policy)?;
            let ecs = match spec.family {
                EcsPhiPlus | EcsPhiMinus | SecsPhiPlus | SecsPhiMinus => flip_mode_b(&psi)?,
                _ => psi,
            };
            if spec.s == 0.0 {
                Ok(ecs)
            } else {
                apply_two_mode_squeeze(&ecs, spec.s, policy)
            }
        }
    }
}

/// [`build_state`] with `n_max` raised by half again after each truncation
/// error, up to `n_max_limit`.
pub fn build_state_adaptive(
    spec: &StateSpec,
    policy: &TruncationPolicy,
    n_max_limit: usize,
) -> Result<FockState> {
    let mut p = *policy;
    loop {
        match build_state(spec, &p) {
            Err(Error::Truncation { .. }) if p.n_max < n_max_limit => {
                p.n_max = (p.n_max + p.n_max / 2).min(n_max_limit);
            }
            other => return other,
        }
    }
}

/// Generalized Laguerre polynomials `L_n^{(k)}(x)` for `n = 0..=n_top`.
fn laguerre_column(k: usize, x: f64, n_top: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_top + 1);
    out.push(1.0);
    if n_top >= 1 {
        out.push(1.0 + k as f64 - x);
    }
    for n in 1..n_top {
        let nf = n as f64;
        let kf = k as f64;
        let next = ((2.0 * nf + 1.0 + kf - x) * out[n] - (nf + kf) * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Matrix elements `⟨m|D(beta)|n⟩` for `m, n < dim`.
pub(crate) fn displacement_matrix(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let x = beta.norm_sqr();
    let mut d = DMatrix::from_element(dim, dim, ZERO);
    let ln_fact: Vec<f64> = {
        let mut v = vec![0.0; dim];
        for i in 1..dim {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    };
    let (r, phi) = (beta.norm(), beta.arg());
    for k in 0..dim {
        let lag = laguerre_column(k, x, dim - 1 - k);
        for n in 0..dim - k {
            let m = n + k;
            // sqrt(n!/m!) r^k exp(-x/2), assembled in log space
            let log_mag =
                0.5 * (ln_fact[n] - ln_fact[m]) - 0.5 * x + if k > 0 { k as f64 * r.ln() } else { 0.0 };
            let mag = log_mag.exp() * lag[n];
            // ⟨m|D(β)|n⟩ = sqrt(n!/m!) β^k e^{-|β|²/2} L_n^k(|β|²) for m >= n
            let phase = Complex64::from_polar(1.0, k as f64 * phi);
            d[(m, n)] = phase * mag;
            if k > 0 {
                // ⟨n|D(β)|m⟩ = sqrt(n!/m!) (−β*)^k e^{-|β|²/2} L_n^k(|β|²)
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                d[(n, m)] = phase.conj() * (sign * mag);
            }
        }
    }
    d
}

fn parity_sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl FockState {
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn is_two_mode(&self) -> bool {
        matches!(self.data, FockData::TwoMode(_))
    }

    /// Norm of a pure state, trace of a density matrix.
    pub fn norm(&self) -> f64 {
        match &self.data {
            FockData::Pure(v) => v.norm_squared(),
            FockData::Mixed(rho) => rho.trace().re,
            FockData::TwoMode(psi) => psi.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Density matrix of a single-mode state.
    pub fn density(&self) -> Result<DMatrix<Complex64>> {
        match &self.data {
            FockData::Pure(v) => Ok(v * v.adjoint()),
            FockData::Mixed(rho) => Ok(rho.clone()),
            FockData::TwoMode(_) => Err(Error::Dimension("density of a two-mode state".into())),
        }
    }

    /// Reduced single-mode density matrix of a two-mode state.
    pub fn reduced(&self, mode: Mode) -> Result<FockState> {
        let FockData::TwoMode(psi) = &self.data else {
            return Err(Error::Dimension("partial trace needs a two-mode state".into()));
        };
        let rho = match mode {
            Mode::A => psi * psi.adjoint(),
            Mode::B => psi.transpose() * psi.map(|z| z.conj()),
        };
        Ok(FockState {
            n_max: self.n_max,
            data: FockData::Mixed(rho),
        })
    }

    /// Photon-number parity `⟨(−1)^n⟩`, joint for two-mode states.
    pub fn parity(&self) -> f64 {
        match &self.data {
            FockData::Pure(v) => v
                .iter()
                .enumerate()
                .map(|(n, z)| parity_sign(n) * z.norm_sqr())
                .sum(),
            FockData::Mixed(rho) => (0..rho.nrows()).map(|n| parity_sign(n) * rho[(n, n)].re).sum(),
            FockData::TwoMode(psi) => {
                let mut acc = 0.0;
                for m in 0..psi.nrows() {
                    for n in 0..psi.ncols() {
                        acc += parity_sign(m + n) * psi[(m, n)].norm_sqr();
                    }
                }
                acc
            }
        }
    }

    /// Mean photon number of one mode (mode is ignored for single-mode states).
    pub fn mean_photons(&self, mode: Mode) -> f64 {
        match &self.data {
            FockData::Pure(v) => v.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum(),
            FockData::Mixed(rho) => (0..rho.nrows()).map(|n| n as f64 * rho[(n, n)].re).sum(),
            FockData::TwoMode(psi) => {
                let mut acc = 0.0;
                for m in 0..psi.nrows() {
                    for n in 0..psi.ncols() {
                        let k = if mode == Mode::A { m } else { n };
                        acc += k as f64 * psi[(m, n)].norm_sqr();
                    }
                }
                acc
            }
        }
    }

    /// `⟨x²⟩` with `x = (a + a†)/√2` for a single-mode state.
    pub fn x_variance(&self) -> Result<f64> {
        let rho = self.density()?;
        let dim = rho.nrows();
        let mut x = DMatrix::<Complex64>::zeros(dim, dim);
        for n in 1..dim {
            let v = Complex64::new((n as f64).sqrt() * FRAC_1_SQRT_2, 0.0);
            x[(n - 1, n)] = v;
            x[(n, n - 1)] = v;
        }
        Ok((&rho * &x * &x).trace().re)
    }

    /// `⟨P(alpha)⟩ = Tr[rho D(alpha) Π D†(alpha)]`, using `D(α) Π D†(α) = D(2α) Π`.
    pub fn displaced_parity(&self, alpha: Complex64) -> Result<f64> {
        let policy = TruncationPolicy::with_n_max(self.n_max);
        policy.check_headroom(alpha)?;
        let rho = self.density()?;
        let d = displacement_matrix(2.0 * alpha, self.dim());
        let mut acc = ZERO;
        for m in 0..self.dim() {
            for n in 0..self.dim() {
                acc += rho[(n, m)] * d[(m, n)] * parity_sign(n);
            }
        }
        Ok(acc.re)
    }

    /// Joint displaced parity `⟨P_a(alpha) ⊗ P_b(beta)⟩` of a two-mode state.
    pub fn displaced_parity_two_mode(&self, alpha: Complex64, beta: Complex64) -> Result<f64> {
        let FockData::TwoMode(psi) = &self.data else {
            return Err(Error::Dimension("needs a two-mode state".into()));
        };
        let policy = TruncationPolicy::with_n_max(self.n_max);
        policy.check_headroom(alpha)?;
        policy.check_headroom(beta)?;
        let dim = self.dim();
        let da = displacement_matrix(2.0 * alpha, dim);
        let db = displacement_matrix(2.0 * beta, dim);
        let flipped = DMatrix::from_fn(dim, dim, |m, n| psi[(m, n)] * parity_sign(m + n));
        let moved = da * flipped * db.transpose();
        Ok(psi.iter().zip(moved.iter()).map(|(p, q)| (p.conj() * q).re).sum())
    }

    /// Wigner function `(2/π)⟨P(alpha)⟩`.
    pub fn wigner(&self, alpha: Complex64) -> Result<f64> {
        Ok(FRAC_2_PI * self.displaced_parity(alpha)?)
    }

    pub fn wigner_two_mode(&self, alpha: Complex64, beta: Complex64) -> Result<f64> {
        Ok(FRAC_2_PI * FRAC_2_PI * self.displaced_parity_two_mode(alpha, beta)?)
    }

    /// `⟨alpha|rho|alpha⟩ / π`.
    pub fn husimi(&self, alpha: Complex64) -> Result<f64> {
        let c = coherent_coeffs(alpha, self.dim());
        let val = match &self.data {
            FockData::Pure(v) => c.dotc(v).norm_sqr(),
            FockData::Mixed(rho) => c.dotc(&(rho * &c)).re,
            FockData::TwoMode(_) => {
                return Err(Error::Dimension("single-mode Husimi of a two-mode state".into()))
            }
        };
        Ok(FRAC_1_PI * val)
    }

    /// `|⟨alpha, beta|psi⟩|² / π²`.
    pub fn husimi_two_mode(&self, alpha: Complex64, beta: Complex64) -> Result<f64> {
        let FockData::TwoMode(psi) = &self.data else {
            return Err(Error::Dimension("needs a two-mode state".into()));
        };
        let ca = coherent_coeffs(alpha, self.dim());
        let cb = coherent_coeffs(beta, self.dim());
        let amp = ca.dotc(&(psi * cb.map(|z| z.conj())));
        Ok(FRAC_1_PI * FRAC_1_PI * amp.norm_sqr())
    }

    /// `⟨O(alpha)⟩` for the on/off observable `D†(α)(Σ_{n≥1}|n⟩⟨n| − |0⟩⟨0|)D(α)`,
    /// which equals `1 − 2 |−α⟩⟨−α|`.
    pub fn onoff_expectation(&self, alpha: Complex64) -> Result<f64> {
        let c = coherent_coeffs(-alpha, self.dim());
        let off = match &self.data {
            FockData::Pure(v) => c.dotc(v).norm_sqr(),
            FockData::Mixed(rho) => c.dotc(&(rho * &c)).re,
            FockData::TwoMode(_) => {
                return Err(Error::Dimension("single-mode on/off of a two-mode state".into()))
            }
        };
        Ok(self.norm() - 2.0 * off)
    }

    /// Joint on/off correlation `⟨O_a(alpha) ⊗ O_b(beta)⟩`, expanded directly on
    /// the state vector.
    pub fn onoff_two_mode(&self, alpha: Complex64, beta: Complex64) -> Result<f64> {
        let FockData::TwoMode(psi) = &self.data else {
            return Err(Error::Dimension("needs a two-mode state".into()));
        };
        let ca = coherent_coeffs(-alpha, self.dim());
        let cb = coherent_coeffs(-beta, self.dim());
        // ⟨−α|_a psi is a vector on mode b, and vice versa
        let proj_a = psi.adjoint() * &ca;
        let proj_b = psi * cb.map(|z| z.conj());
        let both = ca.dotc(&proj_b).norm_sqr();
        let off_a = proj_a.norm_squared();
        let off_b = proj_b.norm_squared();
        Ok(self.norm() - 2.0 * off_a - 2.0 * off_b + 4.0 * both)
    }

    /// `|⟨phi|psi⟩|²` or `⟨phi|rho|phi⟩` against a single-mode pure state.
    pub fn fidelity_with(&self, pure: &FockState) -> Result<f64> {
        let FockData::Pure(phi) = &pure.data else {
            return Err(Error::Dimension("fidelity reference must be pure".into()));
        };
        if phi.len() != self.dim() {
            return Err(Error::Dimension("fidelity between different truncations".into()));
        }
        match &self.data {
            FockData::Pure(v) => Ok(phi.dotc(v).norm_sqr()),
            FockData::Mixed(rho) => Ok(phi.dotc(&(rho * phi)).re),
            FockData::TwoMode(_) => Err(Error::Dimension("fidelity of a two-mode state".into())),
        }
    }

    /// `|⟨self|other⟩|²` between two-mode pure states.
    pub fn two_mode_overlap(&self, other: &FockState) -> Result<f64> {
        match (&self.data, &other.data) {
            (FockData::TwoMode(a), FockData::TwoMode(b)) if a.shape() == b.shape() => {
                let s: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                Ok(s.norm_sqr())
            }
            _ => Err(Error::Dimension(
                "two-mode overlap needs matching two-mode states".into(),
            )),
        }
    }
}

/// Density matrix of a single-mode state from its Wigner function,
/// `rho_mn = π ∫ W(alpha) W_{|n⟩⟨m|}(alpha) d²alpha`, by midpoint quadrature
/// over `[-extent, extent]²` with `points²` nodes.
pub fn density_from_wigner(
    wigner: impl Fn(Complex64) -> f64,
    policy: &TruncationPolicy,
    extent: f64,
    points: usize,
) -> FockState {
    let dim = policy.dim();
    let h = 2.0 * extent / points as f64;
    let mut rho = DMatrix::from_element(dim, dim, ZERO);
    for i in 0..points {
        for j in 0..points {
            let alpha = Complex64::new(-extent + (i as f64 + 0.5) * h, -extent + (j as f64 + 0.5) * h);
            let w = wigner(alpha);
            if w == 0.0 {
                continue;
            }
            let d = displacement_matrix(2.0 * alpha, dim);
            // W of |n⟩⟨m| at alpha is (2/π)(−1)^n ⟨m|D(2α)|n⟩; ρ_mn takes its conjugate
            for m in 0..dim {
                for n in 0..dim {
                    rho[(m, n)] += d[(m, n)].conj() * (w * parity_sign(n));
                }
            }
        }
    }
    rho *= Complex64::new(2.0 * h * h, 0.0);
    FockState {
        n_max: policy.n_max,
        data: FockData::Mixed(rho),
    }
}
