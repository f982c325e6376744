//! Complex Gaussian terms `Re[c exp(-zᵀAz + bᵀz)]` over real coordinates.
//!
//! Every Husimi function in this crate is a short sum of such terms: the
//! coherent kernels contribute real quadratic forms and the interference
//! fringes contribute imaginary linear parts. Integrating out one mode is then
//! a Schur complement, which is how the closed-form marginals are obtained.

use std::f64::consts::PI;

use num_complex::Complex64;

/// A complex-valued real-linear functional `w(z) = re·z + i im·z`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Lin<const N: usize> {
    pub re: [f64; N],
    pub im: [f64; N],
}

impl<const N: usize> Lin<N> {
    /// Functional picking the complex coordinate stored at `(2k, 2k + 1)`.
    pub fn coord(k: usize) -> Self {
        let mut re = [0.0; N];
        let mut im = [0.0; N];
        re[2 * k] = 1.0;
        im[2 * k + 1] = 1.0;
        Lin { re, im }
    }

    pub fn conj(self) -> Self {
        Lin {
            re: self.re,
            im: self.im.map(|v| -v),
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Lin {
            re: self.re.map(|v| v * k),
            im: self.im.map(|v| v * k),
        }
    }

    pub fn add(self, other: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            out.re[i] += other.re[i];
            out.im[i] += other.im[i];
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GaussTerm<const N: usize> {
    coef: Complex64,
    quad: [[f64; N]; N],
    lin: [Complex64; N],
}

impl<const N: usize> GaussTerm<N> {
    pub fn constant(coef: f64) -> Self {
        GaussTerm {
            coef: Complex64::new(coef, 0.0),
            quad: [[0.0; N]; N],
            lin: [Complex64::new(0.0, 0.0); N],
        }
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.coef *= k;
        self
    }

    /// Multiply by `exp(-|w(z) - center|^2)`.
    pub fn gaussian(mut self, w: Lin<N>, center: Complex64) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.quad[i][j] += w.re[i] * w.re[j] + w.im[i] * w.im[j];
            }
            self.lin[i] += 2.0 * (center.re * w.re[i] + center.im * w.im[i]);
        }
        self.coef *= (-center.norm_sqr()).exp();
        self
    }

    /// Multiply by `exp(i k Im(w(z)* c))`, the complex form of `cos(k Im(w* c))`.
    pub fn fringe(mut self, w: Lin<N>, c: Complex64, k: f64) -> Self {
        for i in 0..N {
            self.lin[i] += Complex64::new(0.0, k * (c.im * w.re[i] - c.re * w.im[i]));
        }
        self
    }

    pub fn eval(&self, z: &[f64; N]) -> f64 {
        let mut expo = Complex64::new(0.0, 0.0);
        for i in 0..N {
            let mut row = 0.0;
            for j in 0..N {
                row += self.quad[i][j] * z[j];
            }
            expo += self.lin[i] * z[i] - row * z[i];
        }
        (self.coef * expo.exp()).re
    }
}

impl GaussTerm<4> {
    /// Integrate over the complex coordinate at slot `drop` (0 or 1), keeping
    /// the other one.
    pub fn marginal(&self, drop: usize) -> GaussTerm<2> {
        let (u, v) = if drop == 0 {
            ([2, 3], [0, 1])
        } else {
            ([0, 1], [2, 3])
        };
        let avv = [
            [self.quad[v[0]][v[0]], self.quad[v[0]][v[1]]],
            [self.quad[v[1]][v[0]], self.quad[v[1]][v[1]]],
        ];
        let det = avv[0][0] * avv[1][1] - avv[0][1] * avv[1][0];
        let inv = [
            [avv[1][1] / det, -avv[0][1] / det],
            [-avv[1][0] / det, avv[0][0] / det],
        ];
        let auv = [
            [self.quad[u[0]][v[0]], self.quad[u[0]][v[1]]],
            [self.quad[u[1]][v[0]], self.quad[u[1]][v[1]]],
        ];
        // M = A_uv A_vv^-1
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = auv[i][0] * inv[0][j] + auv[i][1] * inv[1][j];
            }
        }
        let mut quad = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                // A_vu = A_uv^T
                quad[i][j] = self.quad[u[i]][u[j]] - (m[i][0] * auv[j][0] + m[i][1] * auv[j][1]);
            }
        }
        let bv = [self.lin[v[0]], self.lin[v[1]]];
        let lin = [
            self.lin[u[0]] - (bv[0] * m[0][0] + bv[1] * m[0][1]),
            self.lin[u[1]] - (bv[0] * m[1][0] + bv[1] * m[1][1]),
        ];
        let mut form = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                form += bv[i] * inv[i][j] * bv[j];
            }
        }
        let coef = self.coef * (PI / det.sqrt()) * (0.25 * form).exp();
        GaussTerm { coef, quad, lin }
    }
}
