use alloc::vec::Vec;

use super::{Component, SchemeKind, Segment, TimeBasis, TimePartition, Trajectory};
use crate::assembly::{assemble_load, AssembledOperators, ASSEMBLY_POINTS};
use crate::bfs::{interpolate_free, ShapeTable};
use crate::lu::{factorize, factorize_ordered, Factorization};
use crate::ordering::{interleave_blocks, nested_dissection};
use crate::mesh::TensorMesh;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Diagonal preference of the step factorization. The ordering keeps the
/// unknowns of one spatial DOF together, and off-diagonal pivots from other
/// groups would add fill.
const STEP_PIVOT_THRESHOLD: f64 = 1e-3;

/// Steps are rejected when a relative residual exceeds this bound.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Right-hand side `f(x, y, t)` of the wave equation.
pub trait Forcing {
    /// `f` for `deriv = 0`, `∂ₜf` for `deriv = 1`.
    fn eval(&self, x: f64, y: f64, t: f64, deriv: usize) -> f64;

    /// Lets the stepper skip load assembly entirely.
    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForcing;

impl Forcing for ZeroForcing {
    fn eval(&self, _: f64, _: f64, _: f64, _: usize) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// Nodal data `(w, ∂x w, ∂y w, ∂xy w)` of the initial fields.
pub trait InitialData {
    fn displacement(&self, x: f64, y: f64) -> [f64; 4];
    fn velocity(&self, x: f64, y: f64) -> [f64; 4];
    /// `f(·, 0) - c Δ²u₀`, the initial acceleration.
    fn acceleration(&self, x: f64, y: f64) -> [f64; 4];
}

/// How the initial slope of `u¹` (needed by the collocation scheme) is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataSlope {
    /// Interpolant of the analytic initial acceleration.
    #[default]
    Interpolated,
    /// `M⁻¹ (F(0) - A u⁰(0))`, so the semi-discrete equation holds at `t = 0`.
    Discrete,
}

pub struct Problem<'a> {
    pub mesh: &'a TensorMesh,
    pub ops: &'a AssembledOperators,
    pub forcing: &'a dyn Forcing,
}

/// Load vectors `(∫ f(·, t) φ_i)_i` on the free DOFs.
pub struct LoadAssembler {
    table: ShapeTable,
}

impl LoadAssembler {
    pub fn new(mesh: &TensorMesh) -> Result<Self> {
        Ok(LoadAssembler { table: ShapeTable::gauss(mesh, ASSEMBLY_POINTS)? })
    }

    pub fn load(&self, problem: &Problem<'_>, t: f64, deriv: usize, out: &mut [f64]) {
        if problem.forcing.is_zero() {
            out.fill(0.0);
            return;
        }
        let f = problem.forcing;
        assemble_load(problem.mesh, &problem.ops.cell_dofs, &self.table, |x, y| f.eval(x, y, t, deriv), out);
    }
}

/// Discrete state at a time node. The slopes carry the factor `tau`, the
/// length of the interval they were computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub time: f64,
    pub tau: f64,
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
    pub displacement_slope: Vec<f64>,
    pub velocity_slope: Vec<f64>,
}

impl State {
    pub fn zeros(n: usize, tau: f64) -> Self {
        let z = alloc::vec![0.0; n];
        State {
            time: 0.0,
            tau,
            displacement: z.clone(),
            velocity: z.clone(),
            displacement_slope: z.clone(),
            velocity_slope: z,
        }
    }
}

/// `½ (u⁰ᵀ A u⁰ + u¹ᵀ M u¹)`.
pub fn energy(ops: &AssembledOperators, displacement: &[f64], velocity: &[f64]) -> f64 {
    0.5 * (ops.stiffness.bilinear(displacement, displacement) + ops.mass.bilinear(velocity, velocity))
}

/// Interpolated initial data with slopes scaled by `tau`, the first step.
pub fn initial_state(problem: &Problem<'_>, data: &dyn InitialData, tau: f64, slope: DataSlope) -> Result<State> {
    let mesh = problem.mesh;
    let dofs = &problem.ops.dofs;
    let displacement = interpolate_free(mesh, dofs, &|x: f64, y: f64| data.displacement(x, y));
    let velocity = interpolate_free(mesh, dofs, &|x: f64, y: f64| data.velocity(x, y));
    let acceleration = match slope {
        DataSlope::Interpolated => interpolate_free(mesh, dofs, &|x: f64, y: f64| data.acceleration(x, y)),
        DataSlope::Discrete => {
            let n = dofs.num_free();
            let mut rhs = alloc::vec![0.0; n];
            LoadAssembler::new(mesh)?.load(problem, 0.0, 0, &mut rhs);
            problem.ops.stiffness.mul_vec_add(-1.0, &displacement, &mut rhs);
            if n == 0 {
                rhs
            } else {
                factorize(&problem.ops.mass)?.solve(&rhs)?
            }
        }
    };
    Ok(State {
        time: 0.0,
        tau,
        displacement_slope: velocity.iter().map(|v| tau * v).collect(),
        velocity_slope: acceleration.iter().map(|v| tau * v).collect(),
        displacement,
        velocity,
    })
}

/// Block matrix of one step of `scheme` with step length `tau`.
pub fn step_matrix(scheme: SchemeKind, m: &CsrMatrix, a: &CsrMatrix, tau: f64) -> Result<CsrMatrix> {
    fn b(s: f64, x: &CsrMatrix) -> Option<(f64, &CsrMatrix)> {
        Some((s, x))
    }
    let s = match scheme {
        // unknowns (u⁰_n, u¹_n)
        SchemeKind::Cgp1 => CsrMatrix::from_blocks(&[
            alloc::vec![b(1.0, m), b(-tau / 2.0, m)],
            alloc::vec![b(tau / 2.0, a), b(1.0, m)],
        ])?,
        // unknowns (u⁰_mid, u⁰_end, u¹_mid, u¹_end); rows: velocity and
        // momentum equations tested with 1 - t̂ and with 1
        SchemeKind::Cgp2 => CsrMatrix::from_blocks(&[
            alloc::vec![b(2.0 / 3.0, m), b(1.0 / 6.0, m), b(-tau / 3.0, m), None],
            alloc::vec![None, b(1.0, m), b(-2.0 * tau / 3.0, m), b(-tau / 6.0, m)],
            alloc::vec![b(tau / 3.0, a), None, b(2.0 / 3.0, m), b(1.0 / 6.0, m)],
            alloc::vec![b(2.0 * tau / 3.0, a), b(tau / 6.0, a), None, b(1.0, m)],
        ])?,
        // unknowns (u⁰_2, u⁰_3, u¹_2, u¹_3)
        SchemeKind::Gc3 => CsrMatrix::from_blocks(&[
            alloc::vec![b(1.0, m), None, b(-tau / 2.0, m), b(tau / 12.0, m)],
            alloc::vec![b(tau / 2.0, a), b(-tau / 12.0, a), b(1.0, m), None],
            alloc::vec![None, b(1.0 / tau, m), b(-1.0, m), None],
            alloc::vec![b(1.0, a), None, None, b(1.0 / tau, m)],
        ])?,
    };
    Ok(s)
}

/// Size of the linear system solved in every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCounts {
    pub scheme: SchemeKind,
    /// Unknown vectors per step times all spatial DOFs, boundary included.
    pub dof_total: usize,
    /// Unknown vectors per step times the free spatial DOFs.
    pub dof_free: usize,
    /// Stored entries of the step matrix on the free DOFs.
    pub nnz: usize,
}

pub fn report_counts(ops: &AssembledOperators, scheme: SchemeKind) -> Result<StepCounts> {
    let k = scheme.unknowns_per_step();
    let matrix = step_matrix(scheme, &ops.mass, &ops.stiffness, 1.0)?;
    Ok(StepCounts { scheme, dof_total: k * ops.dofs.num_total(), dof_free: k * ops.dofs.num_free(), nnz: matrix.nnz() })
}

struct StepSystem {
    tau: f64,
    matrix: CsrMatrix,
    lu: Factorization,
}

/// Loads at the current interval's left end, reused from the previous step.
struct Loads {
    start: Vec<f64>,
    start_dt: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn relative(residual: &[f64], scale: f64) -> f64 {
    let r = norm(residual);
    if r == 0.0 {
        0.0
    } else {
        r / scale
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct Stepper<'p, 'a> {
    problem: &'p Problem<'a>,
    scheme: SchemeKind,
    loads: LoadAssembler,
    system: Option<StepSystem>,
    /// Nested dissection of the spatial pattern, computed on first use.
    spatial_order: Option<Vec<usize>>,
    n: usize,
}

impl Stepper<'_, '_> {
    fn system(&mut self, tau: f64) -> Result<&StepSystem> {
        let stale = match &self.system {
            Some(s) => (s.tau - tau).abs() > 1e-12 * tau,
            None => true,
        };
        if stale {
            let ops = self.problem.ops;
            let matrix = step_matrix(self.scheme, &ops.mass, &ops.stiffness, tau)?;
            let spatial = self.spatial_order.get_or_insert_with(|| nested_dissection(&ops.mass));
            let order = interleave_blocks(spatial, self.scheme.unknowns_per_step());
            let lu = factorize_ordered(&matrix, order, STEP_PIVOT_THRESHOLD)?;
            self.system = Some(StepSystem { tau, matrix, lu });
        }
        Ok(self.system.as_ref().expect("system built above"))
    }

    fn load(&self, t: f64, deriv: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n];
        self.loads.load(self.problem, t, deriv, &mut out);
        out
    }

    /// Solves `S x = b` and returns `x` with the relative system residual.
    fn solve(&mut self, tau: f64, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
        let system = self.system(tau)?;
        let mut x = system.lu.solve(rhs)?;
        let mut r = system.matrix.mul_vec(&x);
        axpy(-1.0, rhs, &mut r);
        // one step of iterative refinement
        let dx = system.lu.solve(&r)?;
        axpy(-1.0, &dx, &mut x);
        system.matrix.mul_vec_into(&x, &mut r);
        axpy(-1.0, rhs, &mut r);
        Ok((x, relative(&r, norm(rhs))))
    }

    fn split(&self, x: Vec<f64>, parts: usize) -> Vec<Vec<f64>> {
        (0..parts).map(|k| x[k * self.n..(k + 1) * self.n].to_vec()).collect()
    }

    fn step(&mut self, index: usize, t0: f64, tau: f64, state: &State, loads: &mut Loads) -> Result<(Segment, State)> {
        let ops = self.problem.ops;
        let (m, a) = (&ops.mass, &ops.stiffness);
        let n = self.n;
        let t1 = t0 + tau;
        let (u0, u1) = (&state.displacement, &state.velocity);
        match self.scheme {
            SchemeKind::Cgp1 => {
                let f1 = self.load(t1, 0);
                let mut rhs = alloc::vec![0.0; 2 * n];
                let (b1, b2) = rhs.split_at_mut(n);
                m.mul_vec_into(u0, b1);
                m.mul_vec_add(tau / 2.0, u1, b1);
                m.mul_vec_into(u1, b2);
                a.mul_vec_add(-tau / 2.0, u0, b2);
                axpy(tau / 2.0, &loads.start, b2);
                axpy(tau / 2.0, &f1, b2);
                let (x, residual) = self.solve(tau, &rhs)?;
                let mut parts = self.split(x, 2).into_iter();
                let (e0, e1) = (parts.next().unwrap_or_default(), parts.next().unwrap_or_default());
                loads.start = f1;
                let seg = Segment {
                    index,
                    start: t0,
                    tau,
                    basis: TimeBasis::Lagrange(1),
                    displacement: alloc::vec![u0.clone(), e0],
                    velocity: alloc::vec![u1.clone(), e1],
                    residual,
                };
                let next = end_state(&seg);
                Ok((seg, next))
            }
            SchemeKind::Cgp2 => {
                let fm = self.load(t0 + 0.5 * tau, 0);
                let fe = self.load(t1, 0);
                let fs = &loads.start;
                let mu0 = m.mul_vec(u0);
                let mu1 = m.mul_vec(u1);
                let au0 = a.mul_vec(u0);
                let mut rhs = alloc::vec![0.0; 4 * n];
                for i in 0..n {
                    rhs[i] = 5.0 / 6.0 * mu0[i] + tau / 6.0 * mu1[i];
                    rhs[n + i] = mu0[i] + tau / 6.0 * mu1[i];
                    rhs[2 * n + i] = 5.0 / 6.0 * mu1[i] - tau / 6.0 * au0[i] + tau * (fs[i] / 6.0 + fm[i] / 3.0);
                    rhs[3 * n + i] =
                        mu1[i] - tau / 6.0 * au0[i] + tau * (fs[i] / 6.0 + 2.0 * fm[i] / 3.0 + fe[i] / 6.0);
                }
                let (x, residual) = self.solve(tau, &rhs)?;
                let mut p = self.split(x, 4).into_iter();
                let mut next = || p.next().unwrap_or_default();
                let (u0m, u0e, u1m, u1e) = (next(), next(), next(), next());
                loads.start = fe;
                let seg = Segment {
                    index,
                    start: t0,
                    tau,
                    basis: TimeBasis::Lagrange(2),
                    displacement: alloc::vec![u0.clone(), u0m, u0e],
                    velocity: alloc::vec![u1.clone(), u1m, u1e],
                    residual,
                };
                let next = end_state(&seg);
                Ok((seg, next))
            }
            SchemeKind::Gc3 => {
                // slopes of the previous interval rescaled to this one
                let ratio = tau / state.tau;
                let rescale = |v: &[f64]| -> Vec<f64> {
                    if ratio == 1.0 {
                        v.to_vec()
                    } else {
                        v.iter().map(|x| x * ratio).collect()
                    }
                };
                let s0 = rescale(&state.displacement_slope);
                let s1 = rescale(&state.velocity_slope);
                let f2 = self.load(t1, 0);
                let f3 = self.load(t1, 1);
                let mut rhs = alloc::vec![0.0; 4 * n];
                {
                    let (b1, rest) = rhs.split_at_mut(n);
                    let (b2, rest) = rest.split_at_mut(n);
                    let (_b3, b4) = rest.split_at_mut(n);
                    let mut w = u0.clone();
                    axpy(tau / 2.0, u1, &mut w);
                    axpy(tau / 12.0, &s1, &mut w);
                    m.mul_vec_into(&w, b1);
                    m.mul_vec_into(u1, b2);
                    let mut v = alloc::vec![0.0; n];
                    axpy(tau / 2.0, u0, &mut v);
                    axpy(tau / 12.0, &s0, &mut v);
                    a.mul_vec_add(-1.0, &v, b2);
                    axpy(tau / 2.0, &loads.start, b2);
                    axpy(tau * tau / 12.0, &loads.start_dt, b2);
                    axpy(tau / 2.0, &f2, b2);
                    axpy(-tau * tau / 12.0, &f3, b2);
                    b4.copy_from_slice(&f2);
                }
                let (x, system_residual) = self.solve(tau, &rhs)?;
                let mut p = self.split(x, 4).into_iter();
                let mut next = || p.next().unwrap_or_default();
                let (u02, u03, u12, u13) = (next(), next(), next(), next());
                let residual = system_residual.max(collocation_residual(m, a, tau, &u02, &u03, &u12, &u13, &f2));
                loads.start = f2;
                loads.start_dt = f3;
                let seg = Segment {
                    index,
                    start: t0,
                    tau,
                    basis: TimeBasis::Hermite,
                    displacement: alloc::vec![u0.clone(), s0, u02.clone(), u03.clone()],
                    velocity: alloc::vec![u1.clone(), s1, u12.clone(), u13.clone()],
                    residual,
                };
                let next_state = State {
                    time: t1,
                    tau,
                    displacement: u02,
                    velocity: u12,
                    displacement_slope: u03,
                    velocity_slope: u13,
                };
                Ok((seg, next_state))
            }
        }
    }
}

/// Relative residuals of the two collocation conditions at the right end.
#[allow(clippy::too_many_arguments)]
fn collocation_residual(
    m: &CsrMatrix,
    a: &CsrMatrix,
    tau: f64,
    u02: &[f64],
    u03: &[f64],
    u12: &[f64],
    u13: &[f64],
    f2: &[f64],
) -> f64 {
    // M ∂ₜu⁰ = M u¹
    let lhs = m.mul_vec(&u03.iter().map(|v| v / tau).collect::<Vec<_>>());
    let rhs = m.mul_vec(u12);
    let r: Vec<f64> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
    let velocity = relative(&r, norm(&lhs).max(norm(&rhs)));
    // M ∂ₜu¹ + A u⁰ = F
    let inertia = m.mul_vec(&u13.iter().map(|v| v / tau).collect::<Vec<_>>());
    let elastic = a.mul_vec(u02);
    let r: Vec<f64> = inertia.iter().zip(&elastic).zip(f2).map(|((x, y), f)| x + y - f).collect();
    let scale = norm(&inertia).max(norm(&elastic)).max(norm(f2));
    velocity.max(relative(&r, scale))
}

/// Node state at the right end of a Lagrange segment.
fn end_state(seg: &Segment) -> State {
    let n = seg.displacement[0].len();
    let mut s0 = alloc::vec![0.0; n];
    let mut s1 = alloc::vec![0.0; n];
    seg.evaluate_into(1.0, Component::Displacement, 1, &mut s0).expect("first derivative");
    seg.evaluate_into(1.0, Component::Velocity, 1, &mut s1).expect("first derivative");
    for v in s0.iter_mut().chain(s1.iter_mut()) {
        *v *= seg.tau;
    }
    State {
        time: seg.end(),
        tau: seg.tau,
        displacement: seg.displacement.last().cloned().unwrap_or_default(),
        velocity: seg.velocity.last().cloned().unwrap_or_default(),
        displacement_slope: s0,
        velocity_slope: s1,
    }
}

/// Runs `scheme` over `partition`, handing every segment to `observer`, and
/// returns the final state. The step matrix is factorized once per distinct
/// step length.
pub fn integrate(
    problem: &Problem<'_>,
    scheme: SchemeKind,
    partition: &TimePartition,
    initial: &State,
    mut observer: impl FnMut(&Segment) -> Result<()>,
) -> Result<State> {
    let n = problem.ops.dofs.num_free();
    if initial.displacement.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.displacement.len() });
    }
    let mut stepper = Stepper { problem, scheme, loads: LoadAssembler::new(problem.mesh)?, system: None, spatial_order: None, n };
    let mut loads = Loads { start: stepper.load(0.0, 0), start_dt: Vec::new() };
    if scheme == SchemeKind::Gc3 {
        loads.start_dt = stepper.load(0.0, 1);
    }
    let mut state = initial.clone();
    let nodes = partition.nodes();
    for index in 1..=partition.num_intervals() {
        let tau = partition.tau(index);
        let wrap = |e: Error| Error::Step { interval: index, source: alloc::boxed::Box::new(e) };
        let (seg, mut next) = stepper.step(index, nodes[index - 1], tau, &state, &mut loads).map_err(wrap)?;
        if seg.residual > RESIDUAL_TOLERANCE {
            return Err(wrap(Error::Inaccurate { residual: seg.residual }));
        }
        next.time = nodes[index];
        observer(&seg)?;
        state = next;
    }
    Ok(state)
}

/// Like [`integrate`] but keeps every segment.
pub fn solve(problem: &Problem<'_>, scheme: SchemeKind, partition: &TimePartition, initial: &State) -> Result<Trajectory> {
    let mut segments = Vec::with_capacity(partition.num_intervals());
    integrate(problem, scheme, partition, initial, |seg| {
        segments.push(seg.clone());
        Ok(())
    })?;
    Ok(Trajectory { scheme, partition: partition.clone(), segments })
}
