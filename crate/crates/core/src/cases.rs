//! Built-in analytic data: the manufactured solution used for convergence
//! studies and the Gaussian-bump plate scenario with a stiffness jump.

use core::f64::consts::PI;

use crate::bfs::CoefficientField;
use crate::jet::{Jet, JET_LEN};
use crate::mesh::Rect;
use crate::sensor::SensorRegion;
use crate::time::{Forcing, InitialData};

/// A function of one variable with derivatives of order 0..=5.
pub trait Profile {
    fn derivatives(&self, s: f64) -> [f64; JET_LEN];
}

/// `sin²(π s)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SineSquared;

impl Profile for SineSquared {
    fn derivatives(&self, s: f64) -> [f64; JET_LEN] {
        let (sin2, cos2) = (libm::sin(2.0 * PI * s), libm::cos(2.0 * PI * s));
        let p = libm::sin(PI * s);
        let pi2 = PI * PI;
        [
            p * p,
            PI * sin2,
            2.0 * pi2 * cos2,
            -4.0 * pi2 * PI * sin2,
            -8.0 * pi2 * pi2 * cos2,
            16.0 * pi2 * pi2 * PI * sin2,
        ]
    }
}

/// `e^{-α (s - s₀)²} (1 - s²)²`, a bump that also vanishes with its slope
/// at `s = ±1`.
#[derive(Debug, Clone, Copy)]
pub struct DampedGaussian {
    pub center: f64,
    pub alpha: f64,
}

impl Profile for DampedGaussian {
    fn derivatives(&self, s: f64) -> [f64; JET_LEN] {
        let x = Jet::variable(s);
        let d = x - Jet::constant(self.center);
        let envelope = (Jet::constant(1.0) - x * x).powi(2);
        ((d * d).scale(-self.alpha).exp() * envelope).derivatives()
    }
}

/// `amplitude · p(x) q(y)`.
#[derive(Debug, Clone, Copy)]
pub struct ProductField<P, Q> {
    pub amplitude: f64,
    pub px: P,
    pub qy: Q,
}

impl<P: Profile, Q: Profile> ProductField<P, Q> {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.amplitude * self.px.derivatives(x)[0] * self.qy.derivatives(y)[0]
    }

    /// `(u, ∂x u, ∂y u, ∂xy u)`.
    pub fn nodal(&self, x: f64, y: f64) -> [f64; 4] {
        let (p, q) = (self.px.derivatives(x), self.qy.derivatives(y));
        let a = self.amplitude;
        [a * p[0] * q[0], a * p[1] * q[0], a * p[0] * q[1], a * p[1] * q[1]]
    }

    /// `Δ²u`.
    pub fn bilaplacian(&self, x: f64, y: f64) -> f64 {
        self.bilaplacian_nodal(x, y)[0]
    }

    /// Nodal data of `Δ²u = p⁗q + 2p″q″ + pq⁗`.
    pub fn bilaplacian_nodal(&self, x: f64, y: f64) -> [f64; 4] {
        let (p, q) = (self.px.derivatives(x), self.qy.derivatives(y));
        let b = |i: usize, j: usize| p[4 + i] * q[j] + 2.0 * p[2 + i] * q[2 + j] + p[i] * q[4 + j];
        let a = self.amplitude;
        [a * b(0, 0), a * b(1, 0), a * b(0, 1), a * b(1, 1)]
    }
}

/// A problem with known exact solution `u(x, t) = g(t) s(x)`.
pub trait ManufacturedCase: Forcing + InitialData {
    fn domain(&self) -> Rect;
    fn final_time(&self) -> f64;
    /// `g` (`deriv = 0`) or one of its derivatives.
    fn time_factor(&self, t: f64, deriv: usize) -> f64;
    fn space_factor(&self, x: f64, y: f64) -> f64;

    fn exact(&self, x: f64, y: f64, t: f64) -> f64 {
        self.time_factor(t, 0) * self.space_factor(x, y)
    }
}

/// `u = sin(2πt) sin²(πx) sin²(πy)` on the unit square up to `T = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SinSquaredCase {
    field: ProductField<SineSquared, SineSquared>,
}

impl Default for SinSquaredCase {
    fn default() -> Self {
        SinSquaredCase { field: ProductField { amplitude: 1.0, px: SineSquared, qy: SineSquared } }
    }
}

impl SinSquaredCase {
    pub fn field(&self) -> &ProductField<SineSquared, SineSquared> {
        &self.field
    }
}

impl Forcing for SinSquaredCase {
    /// `g″ s + g Δ²s`.
    fn eval(&self, x: f64, y: f64, t: f64, deriv: usize) -> f64 {
        let s = self.field.value(x, y);
        let b = self.field.bilaplacian(x, y);
        self.time_factor(t, deriv + 2) * s + self.time_factor(t, deriv) * b
    }
}

impl InitialData for SinSquaredCase {
    fn displacement(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }

    fn velocity(&self, x: f64, y: f64) -> [f64; 4] {
        self.field.nodal(x, y).map(|v| 2.0 * PI * v)
    }

    /// `f(·, 0) - Δ²u₀` vanishes since `g(0) = g″(0) = 0`.
    fn acceleration(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }
}

impl ManufacturedCase for SinSquaredCase {
    fn domain(&self) -> Rect {
        Rect::unit_square()
    }

    fn final_time(&self) -> f64 {
        1.0
    }

    fn time_factor(&self, t: f64, deriv: usize) -> f64 {
        let w = 2.0 * PI;
        let phase = libm::sin(w * t + deriv as f64 * PI / 2.0);
        libm::pow(w, deriv as f64) * phase
    }

    fn space_factor(&self, x: f64, y: f64) -> f64 {
        self.field.value(x, y)
    }
}

/// The plate with a Gaussian bump released from rest and a stiffness jump
/// across a horizontal line.
#[derive(Debug)]
pub struct BumpScenario {
    pub domain: Rect,
    pub final_time: f64,
    pub displacement: ProductField<DampedGaussian, DampedGaussian>,
    pub coefficient: CoefficientField,
    pub sensor: SensorRegion,
}

impl BumpScenario {
    /// `(-1, 1)²`, `T = 0.03`, `u₀ = 0.2 p(x) p(y)` with
    /// `p(s) = e^{-100 s²}(1 - s²)²`, `c = 1` below `y = 0.2` and `9` above,
    /// sensor of half-width `1/32` centered at `(0.75, 0)`.
    pub fn standard() -> Self {
        let p = DampedGaussian { center: 0.0, alpha: 100.0 };
        BumpScenario {
            domain: Rect::new(-1.0, 1.0, -1.0, 1.0),
            final_time: 0.03,
            displacement: ProductField { amplitude: 0.2, px: p, qy: p },
            coefficient: CoefficientField::jump_in_y(0.2, 1.0, 9.0),
            sensor: SensorRegion::centered(0.75, 0.0, 1.0 / 32.0),
        }
    }
}

impl InitialData for BumpScenario {
    fn displacement(&self, x: f64, y: f64) -> [f64; 4] {
        self.displacement.nodal(x, y)
    }

    fn velocity(&self, _: f64, _: f64) -> [f64; 4] {
        [0.0; 4]
    }

    /// `-c Δ²u₀` with `c` frozen at the node; the coefficient is piecewise
    /// constant and no node lies on its jump for the meshes used.
    fn acceleration(&self, x: f64, y: f64) -> [f64; 4] {
        let c = self.coefficient.eval(x, y);
        self.displacement.bilaplacian_nodal(x, y).map(|v| -c * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn sine_squared_derivatives_by_finite_differences() {
        let p = SineSquared;
        let h = 1e-5;
        for s in [0.1, 0.37, 0.8] {
            let (a, b, c) = (p.derivatives(s - h), p.derivatives(s), p.derivatives(s + h));
            for k in 0..JET_LEN - 1 {
                let fd = (c[k] - a[k]) / (2.0 * h);
                assert!((fd - b[k + 1]).abs() <= 1e-6 * b[k + 1].abs().max(1.0), "order {k}");
            }
        }
    }

    #[test]
    fn forcing_matches_closed_form() {
        // f = sin(2πt) [ -4π² S(x)S(y) + π⁴(16S(x) - 8)S(y)
        //      + 2π⁴(2 - 4S(x))(2 - 4S(y)) + π⁴ S(x)(16S(y) - 8) ],  S = sin²(π·)
        let case = SinSquaredCase::default();
        let mut rng = Lcg(3);
        let pi4 = PI * PI * PI * PI;
        for _ in 0..20 {
            let (x, y, t) = (rng.next(), rng.next(), rng.next());
            let sx = libm::sin(PI * x) * libm::sin(PI * x);
            let sy = libm::sin(PI * y) * libm::sin(PI * y);
            let f = libm::sin(2.0 * PI * t)
                * (-4.0 * PI * PI * sx * sy
                    + pi4 * (16.0 * sx - 8.0) * sy
                    + 2.0 * pi4 * (2.0 - 4.0 * sx) * (2.0 - 4.0 * sy)
                    + pi4 * sx * (16.0 * sy - 8.0));
            assert!((case.eval(x, y, t, 0) - f).abs() < 1e-11 * pi4);
        }
    }

    #[test]
    fn manufactured_solution_is_consistent() {
        // ∂ₜₜu + Δ²u - f = 0, with a sixth-order difference quotient in time
        let case = SinSquaredCase::default();
        let mut rng = Lcg(11);
        let h = 1e-2;
        let w = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
        for _ in 0..20 {
            let (x, y, t) = (rng.next(), rng.next(), 0.1 + 0.8 * rng.next());
            let utt: f64 = w.iter().enumerate().map(|(k, wk)| wk * case.exact(x, y, t + (k as f64 - 3.0) * h)).sum::<f64>() / (h * h);
            let lap2 = case.time_factor(t, 0) * case.field().bilaplacian(x, y);
            let r = utt + lap2 - case.eval(x, y, t, 0);
            assert!(r.abs() < 1e-8 * PI.powi(4), "{r}");
            // ∂ₜf against a central difference
            let e = 1e-6;
            let ft = (case.eval(x, y, t + e, 0) - case.eval(x, y, t - e, 0)) / (2.0 * e);
            assert!((ft - case.eval(x, y, t, 1)).abs() < 1e-6 * PI.powi(5));
        }
    }

    #[test]
    fn initial_data_of_the_manufactured_case() {
        let case = SinSquaredCase::default();
        assert_eq!(case.displacement(0.3, 0.6), [0.0; 4]);
        let v = case.velocity(0.5, 0.5);
        assert!((v[0] - 2.0 * PI).abs() < 1e-14);
        assert!(v[1].abs() < 1e-14 && v[3].abs() < 1e-14);
        assert_eq!(case.exact(0.5, 0.5, 0.25), 1.0);
    }

    #[test]
    fn bump_bilaplacian_by_finite_differences() {
        let s = BumpScenario::standard();
        let h = 1e-3;
        let u = |x: f64, y: f64| s.displacement.value(x, y);
        let lap = |x: f64, y: f64| (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h);
        let (x, y) = (0.05, -0.08);
        let fd = (lap(x + h, y) + lap(x - h, y) + lap(x, y + h) + lap(x, y - h) - 4.0 * lap(x, y)) / (h * h);
        let exact = s.displacement.bilaplacian(x, y);
        assert!((fd - exact).abs() < 1e-3 * exact.abs(), "{fd} vs {exact}");
    }

    #[test]
    fn bump_acceleration_uses_local_stiffness() {
        let s = BumpScenario::standard();
        let below = s.acceleration(0.05, 0.1);
        let b = s.displacement.bilaplacian_nodal(0.05, 0.1);
        assert_eq!(below[0], -b[0]);
        let above = s.acceleration(0.05, 0.25);
        let b = s.displacement.bilaplacian_nodal(0.05, 0.25);
        assert_eq!(above[0], -9.0 * b[0]);
        // the bump and its slope vanish on the boundary
        let edge = s.displacement(1.0, 0.3);
        assert!(edge.iter().all(|v| v.abs() < 1e-30));
    }
}
