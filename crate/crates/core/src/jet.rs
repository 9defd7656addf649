//! Truncated Taylor series in one variable, for exact derivatives of the
//! analytic profiles used as initial data.

use core::ops::{Add, Mul, Neg, Sub};

/// Number of Taylor coefficients carried (derivatives of order 0..=5).
pub const JET_LEN: usize = 6;

/// `Σ c_k (s - s₀)^k` truncated after `JET_LEN` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    coeffs: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut coeffs = [0.0; JET_LEN];
        coeffs[0] = c;
        Jet { coeffs }
    }

    /// The independent variable at `s`.
    pub fn variable(s: f64) -> Self {
        let mut coeffs = [0.0; JET_LEN];
        coeffs[0] = s;
        coeffs[1] = 1.0;
        Jet { coeffs }
    }

    pub fn coefficients(&self) -> [f64; JET_LEN] {
        self.coeffs
    }

    /// Derivatives `f^(k)(s₀) = k! c_k`.
    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let mut out = self.coeffs;
        let mut factorial = 1.0;
        for (k, d) in out.iter_mut().enumerate().skip(1) {
            factorial *= k as f64;
            *d *= factorial;
        }
        out
    }

    pub fn scale(self, a: f64) -> Self {
        Jet { coeffs: self.coeffs.map(|c| a * c) }
    }

    pub fn exp(self) -> Self {
        let a = &self.coeffs;
        let mut b = [0.0; JET_LEN];
        b[0] = libm::exp(a[0]);
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Jet { coeffs: b }
    }

    /// `(sin, cos)` of the series.
    pub fn sin_cos(self) -> (Self, Self) {
        let a = &self.coeffs;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = libm::sin(a[0]);
        c[0] = libm::cos(a[0]);
        for k in 1..JET_LEN {
            let (mut ds, mut dc) = (0.0, 0.0);
            for j in 1..=k {
                ds += j as f64 * a[j] * c[k - j];
                dc -= j as f64 * a[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Jet::constant(1.0), |acc, _| acc * self)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c += r;
        }
        Jet { coeffs }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut coeffs = [0.0; JET_LEN];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum();
        }
        Jet { coeffs }
    }
}
