//! Time discretizations of the first-order system
//! `∂ₜu⁰ = u¹`, `M ∂ₜu¹ + A u⁰ = F`.
//!
//! * [`SchemeKind::Cgp1`]: continuous Galerkin–Petrov with piecewise linear
//!   trial functions, algebraically the Crank–Nicolson method.
//! * [`SchemeKind::Cgp2`]: piecewise quadratic trial functions, test functions
//!   `{1, 1 - t̂}`, Gauss–Lobatto (Simpson) quadrature in time.
//! * [`SchemeKind::Gc3`]: Galerkin–collocation with piecewise cubic Hermite
//!   trial functions; the discrete solution is C¹ in time.
//!
//! The Hermite coefficients of a cubic segment on `[t_{n-1}, t_n]` are
//! `(w(t_{n-1}), τ ∂ₜw(t_{n-1}), w(t_n), τ ∂ₜw(t_n))`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bfs::HermiteCubic;
use crate::{Error, Result};

mod stepper;

pub use stepper::{
    energy, initial_state, integrate, report_counts, solve, step_matrix, DataSlope, Forcing, InitialData, LoadAssembler, Problem,
    State, StepCounts, ZeroForcing, RESIDUAL_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Cgp1,
    Cgp2,
    Gc3,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Cgp1, SchemeKind::Cgp2, SchemeKind::Gc3];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Cgp1 => "cgp1",
            SchemeKind::Cgp2 => "cgp2",
            SchemeKind::Gc3 => "gc3",
        }
    }

    /// Unknown coefficient vectors per time step.
    pub fn unknowns_per_step(self) -> usize {
        match self {
            SchemeKind::Cgp1 => 2,
            SchemeKind::Cgp2 | SchemeKind::Gc3 => 4,
        }
    }

    /// Polynomial degree of the trial space in time.
    pub fn degree(self) -> usize {
        match self {
            SchemeKind::Cgp1 => 1,
            SchemeKind::Cgp2 => 2,
            SchemeKind::Gc3 => 3,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cgp1" => Ok(SchemeKind::Cgp1),
            "cgp2" => Ok(SchemeKind::Cgp2),
            "gc3" => Ok(SchemeKind::Gc3),
            _ => Err(Error::Config("scheme must be one of cgp1, cgp2, gc3")),
        }
    }
}

/// Partition `0 = t_0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    nodes: Vec<f64>,
    /// Exact step length of a uniform partition, so that `τ_n` does not pick
    /// up rounding from `t_n - t_{n-1}`.
    uniform: Option<f64>,
}

impl TimePartition {
    pub fn uniform(final_time: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::Config("time partition needs T > 0 and at least one step"));
        }
        let tau = final_time / steps as f64;
        let mut nodes: Vec<f64> = (0..=steps).map(|n| n as f64 * tau).collect();
        nodes[steps] = final_time;
        Ok(TimePartition { nodes, uniform: Some(tau) })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time nodes must start at 0 and increase strictly"));
        }
        Ok(TimePartition { nodes, uniform: None })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Length of interval `n` (1-based).
    pub fn tau(&self, n: usize) -> f64 {
        self.uniform.unwrap_or_else(|| self.nodes[n] - self.nodes[n - 1])
    }

    pub fn max_tau(&self) -> f64 {
        (1..=self.num_intervals()).map(|n| self.tau(n)).fold(0.0, f64::max)
    }

    /// Interval `n` (1-based) containing `t` and the local coordinate in it.
    /// Interior nodes belong to the interval on their left.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let end = self.final_time();
        if !(t >= 0.0 && t <= end) {
            return Err(Error::TimeOutOfRange { t, start: 0.0, end });
        }
        let n = self.nodes.partition_point(|&s| s < t).max(1);
        let local = ((t - self.nodes[n - 1]) / self.tau(n)).clamp(0.0, 1.0);
        Ok((n, local))
    }
}

/// Hermite reference basis `ξ̂_k` on `[0, 1]`.
pub struct HermiteTimeBasis;

impl HermiteTimeBasis {
    /// `∫ ξ_k dt / τ`.
    pub const INTEGRALS: [f64; 4] = [0.5, 1.0 / 12.0, 0.5, -1.0 / 12.0];
    /// `∫ ∂ₜξ_k dt`.
    pub const DERIVATIVE_INTEGRALS: [f64; 4] = [-1.0, 0.0, 1.0, 0.0];

    pub fn values(s: f64) -> [f64; 4] {
        HermiteCubic::all(s, 0)
    }

    /// Derivatives with respect to the reference coordinate.
    pub fn derivatives(s: f64) -> [f64; 4] {
        HermiteCubic::all(s, 1)
    }
}

/// Which component of the first-order system to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// `u⁰ ≈ u`.
    Displacement,
    /// `u¹ ≈ ∂ₜu`.
    Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBasis {
    /// Cubic Hermite, coefficients `(w_0, τ w'_0, w_1, τ w'_1)`.
    Hermite,
    /// Lagrange at the equispaced (Gauss–Lobatto) points of degree 1 or 2.
    Lagrange(usize),
}

impl TimeBasis {
    /// Number of coefficient vectors per segment.
    pub fn len(self) -> usize {
        match self {
            TimeBasis::Hermite => 4,
            TimeBasis::Lagrange(k) => k + 1,
        }
    }

    /// Basis values (`deriv = 0`) or reference derivatives (`deriv = 1`).
    pub fn weights(self, s: f64, deriv: usize) -> [f64; 4] {
        match (self, deriv) {
            (TimeBasis::Hermite, 0) => HermiteTimeBasis::values(s),
            (TimeBasis::Hermite, _) => HermiteTimeBasis::derivatives(s),
            (TimeBasis::Lagrange(1), 0) => [1.0 - s, s, 0.0, 0.0],
            (TimeBasis::Lagrange(1), _) => [-1.0, 1.0, 0.0, 0.0],
            (TimeBasis::Lagrange(_), 0) => {
                [2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0), 2.0 * s * (s - 0.5), 0.0]
            }
            (TimeBasis::Lagrange(_), _) => [4.0 * s - 3.0, 4.0 - 8.0 * s, 4.0 * s - 1.0, 0.0],
        }
    }
}

/// The discrete solution on one interval.
#[derive(Debug, Clone)]
pub struct Segment {
    /// 1-based interval index.
    pub index: usize,
    pub start: f64,
    pub tau: f64,
    pub basis: TimeBasis,
    pub displacement: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
    /// Largest relative residual of the step equations after the solve.
    pub residual: f64,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.tau
    }

    pub fn coefficients(&self, which: Component) -> &[Vec<f64>] {
        match which {
            Component::Displacement => &self.displacement,
            Component::Velocity => &self.velocity,
        }
    }

    /// Value (`deriv = 0`) or time derivative (`deriv = 1`) at reference
    /// coordinate `s ∈ [0, 1]`.
    pub fn evaluate_into(&self, s: f64, which: Component, deriv: usize, out: &mut [f64]) -> Result<()> {
        if deriv > 1 {
            return Err(Error::UnsupportedDerivative { order: deriv });
        }
        let coeffs = self.coefficients(which);
        let mut w = self.basis.weights(s, deriv);
        if deriv == 1 {
            for v in &mut w {
                *v /= self.tau;
            }
        }
        out.fill(0.0);
        for (c, &wk) in coeffs.iter().zip(&w[..self.basis.len()]) {
            if wk != 0.0 {
                for (o, v) in out.iter_mut().zip(c) {
                    *o += wk * v;
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, s: f64, which: Component, deriv: usize) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.displacement[0].len()];
        self.evaluate_into(s, which, deriv, &mut out)?;
        Ok(out)
    }
}

/// All segments of a completed run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: SchemeKind,
    pub partition: TimePartition,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    /// Evaluates at time `t`; an interior node is taken from the interval on
    /// its left.
    pub fn evaluate(&self, t: f64, which: Component, deriv: usize) -> Result<Vec<f64>> {
        let (n, s) = self.partition.locate(t)?;
        self.segments[n - 1].evaluate(s, which, deriv)
    }
}
