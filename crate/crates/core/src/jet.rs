//! Truncated Taylor series.
//!
//! A [`Jet`] holds the Taylor coefficients of a function about a point up to
//! order [`ORDER`]. Arithmetic on jets applies the product, quotient and chain
//! rules exactly, so quantities built from symbolically differentiated curve
//! data (frames, curvature, bending-field integrands) get exact derivatives
//! without finite differences. A coefficient of order `k` is only meaningful
//! if every input was known to order `k`; callers track that budget.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Vector3;

/// Highest Taylor order carried.
pub const ORDER: usize = 5;
const LEN: usize = ORDER + 1;
const FACTORIAL: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub coeffs: [f64; LEN],
}

impl Jet {
    pub const ZERO: Jet = Jet { coeffs: [0.0; LEN] };

    pub fn constant(value: f64) -> Jet {
        let mut coeffs = [0.0; LEN];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The identity map `x0 + w`, as a series in `w`.
    pub fn identity(x0: f64) -> Jet {
        let mut j = Jet::constant(x0);
        j.coeffs[1] = 1.0;
        j
    }

    /// Builds the jet from derivative values `f, f', f'', ...` (missing orders are zero).
    pub fn from_derivatives(derivs: &[f64]) -> Jet {
        let mut coeffs = [0.0; LEN];
        for (k, d) in derivs.iter().take(LEN).enumerate() {
            coeffs[k] = d / FACTORIAL[k];
        }
        Jet { coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn d(&self, k: usize) -> f64 {
        self.coeffs[k] * FACTORIAL[k]
    }

    pub fn derivative(&self) -> Jet {
        let mut out = [0.0; LEN];
        for k in 0..ORDER {
            out[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Jet { coeffs: out }
    }

    /// Antiderivative with value `at_origin` at the expansion point.
    pub fn integral(&self, at_origin: f64) -> Jet {
        let mut out = [0.0; LEN];
        out[0] = at_origin;
        for k in 1..LEN {
            out[k] = self.coeffs[k - 1] / k as f64;
        }
        Jet { coeffs: out }
    }

    pub fn recip(&self) -> Jet {
        let a = &self.coeffs;
        let inv = 1.0 / a[0];
        let mut b = [0.0; LEN];
        b[0] = inv;
        for k in 1..LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += a[j] * b[k - j];
            }
            b[k] = -acc * inv;
        }
        Jet { coeffs: b }
    }

    pub fn sqrt(&self) -> Jet {
        let a = &self.coeffs;
        let mut b = [0.0; LEN];
        b[0] = a[0].sqrt();
        for k in 1..LEN {
            let mut acc = 0.0;
            for j in 1..k {
                acc += b[j] * b[k - j];
            }
            b[k] = (a[k] - acc) / (2.0 * b[0]);
        }
        Jet { coeffs: b }
    }

    pub fn square(&self) -> Jet {
        *self * *self
    }

    /// `self(x0 + inner)` where `inner` has zero constant term.
    pub fn compose(&self, inner: &Jet) -> Jet {
        debug_assert!(inner.coeffs[0] == 0.0);
        let mut acc = Jet::constant(self.coeffs[ORDER]);
        for k in (0..ORDER).rev() {
            acc = acc * *inner;
            acc.coeffs[0] += self.coeffs[k];
        }
        acc
    }

    /// Series inverse: for `s = self(w) - self(0)` returns `w(s)`.
    /// Requires a nonzero first coefficient.
    pub fn revert(&self) -> Jet {
        let a1 = self.coeffs[1];
        let mut shifted = *self;
        shifted.coeffs[0] = 0.0;
        let s = Jet::identity(0.0);
        let mut w = s * (1.0 / a1);
        for _ in 0..ORDER {
            let higher = shifted.compose(&w) - w * a1;
            w = (s - higher) * (1.0 / a1);
        }
        w
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = self;
        for (a, b) in out.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        out
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [0.0; LEN];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().take(LEN - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut out = self;
        for a in out.coeffs.iter_mut() {
            *a *= rhs;
        }
        out
    }
}

/// Jet of a 3-vector valued function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VJet(pub [Jet; 3]);

impl VJet {
    pub const ZERO: VJet = VJet([Jet::ZERO; 3]);

    pub fn constant(v: Vector3<f64>) -> VJet {
        VJet([Jet::constant(v.x), Jet::constant(v.y), Jet::constant(v.z)])
    }

    /// From derivative vectors `r, r', r'', ...`.
    pub fn from_derivatives(derivs: &[Vector3<f64>]) -> VJet {
        let comp = |c: usize| Jet::from_derivatives(&derivs.iter().map(|v| v[c]).collect::<Vec<_>>());
        VJet([comp(0), comp(1), comp(2)])
    }

    pub fn value(&self) -> Vector3<f64> {
        self.d(0)
    }

    pub fn d(&self, k: usize) -> Vector3<f64> {
        Vector3::new(self.0[0].d(k), self.0[1].d(k), self.0[2].d(k))
    }

    pub fn derivative(&self) -> VJet {
        VJet(self.0.map(|j| j.derivative()))
    }

    pub fn integral(&self, at_origin: Vector3<f64>) -> VJet {
        VJet([
            self.0[0].integral(at_origin.x),
            self.0[1].integral(at_origin.y),
            self.0[2].integral(at_origin.z),
        ])
    }

    pub fn dot(&self, rhs: &VJet) -> Jet {
        self.0[0] * rhs.0[0] + self.0[1] * rhs.0[1] + self.0[2] * rhs.0[2]
    }

    pub fn cross(&self, rhs: &VJet) -> VJet {
        let (a, b) = (&self.0, &rhs.0);
        VJet([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn norm(&self) -> Jet {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: &Jet) -> VJet {
        VJet(self.0.map(|c| c * *s))
    }

    pub fn compose(&self, inner: &Jet) -> VJet {
        VJet(self.0.map(|c| c.compose(inner)))
    }

    /// Projection onto a constant direction.
    pub fn dot_const(&self, v: &Vector3<f64>) -> Jet {
        self.0[0] * v.x + self.0[1] * v.y + self.0[2] * v.z
    }
}

impl Add for VJet {
    type Output = VJet;
    fn add(self, rhs: VJet) -> VJet {
        VJet([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for VJet {
    type Output = VJet;
    fn sub(self, rhs: VJet) -> VJet {
        VJet([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Mul<f64> for VJet {
    type Output = VJet;
    fn mul(self, rhs: f64) -> VJet {
        VJet(self.0.map(|c| c * rhs))
    }
}
