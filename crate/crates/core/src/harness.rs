//! Error norms against manufactured solutions and convergence studies.
//!
//! For an exact solution `u = g(t) s(x)` and a discrete solution `u_h`:
//!
//! * `L∞_τ(L²)`: maximum of `‖u - u_h‖_{L²}` over the time nodes `t_n`;
//! * `L∞(L²)`: the same maximum, additionally over `t_{n-1} + jτ/100`,
//!   `j = 1..99`;
//! * `L²(L²)`: 5-point Gauss in time on every interval.
//!
//! Spatial integrals use the 6-point tensor Gauss rule on every cell.

use alloc::vec::Vec;

use crate::assembly::{assemble, AssembledOperators};
use crate::bfs::{sample_cells, CellDofs, CoefficientField, ShapeTable};
use crate::cases::ManufacturedCase;
use crate::mesh::TensorMesh;
use crate::quadrature::gauss_legendre;
use crate::time::{initial_state, integrate, Component, DataSlope, Problem, SchemeKind, Segment, TimePartition};
use crate::Result;

/// Points per direction of the spatial rule for error integrals.
pub const NORM_POINTS: usize = 6;
/// Gauss points per interval for the `L²(L²)` norm.
pub const TIME_POINTS: usize = 5;
/// Subdivisions of each interval for the fine `L∞(L²)` sample.
pub const FINE_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormReport {
    pub linf_tau: f64,
    pub linf: f64,
    pub l2l2: f64,
}

impl NormReport {
    pub fn as_array(&self) -> [f64; 3] {
        [self.linf_tau, self.linf, self.l2l2]
    }
}

/// `log₂(e_coarse / e_fine)`, or `None` unless both errors are positive.
pub fn compute_eoc(e_coarse: f64, e_fine: f64) -> Option<f64> {
    (e_coarse > 0.0 && e_fine > 0.0).then(|| libm::log2(e_coarse / e_fine))
}

/// Spatial `L²` errors of discrete fields against `g · s` on one mesh.
pub struct ErrorEvaluator<'m> {
    cell_dofs: &'m CellDofs,
    table: ShapeTable,
    /// `s` at every quadrature point, cell-major.
    exact: Vec<f64>,
    /// Quadrature weight times cell area, per point of one cell.
    weights: Vec<f64>,
}

impl<'m> ErrorEvaluator<'m> {
    pub fn new(mesh: &TensorMesh, cell_dofs: &'m CellDofs, space: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let table = ShapeTable::gauss(mesh, NORM_POINTS)?;
        let mut exact = Vec::with_capacity(mesh.num_cells() * table.rule().len());
        for cell in 0..mesh.num_cells() {
            let (x0, y0) = mesh.cell_origin(cell);
            for &(xr, yr) in table.rule().points() {
                exact.push(space(x0 + xr * mesh.hx(), y0 + yr * mesh.hy()));
            }
        }
        let weights = table.rule().weights().iter().map(|w| w * table.cell_area()).collect();
        Ok(ErrorEvaluator { cell_dofs, table, exact, weights })
    }

    /// Values of `free` at all quadrature points, cell-major.
    pub fn sample(&self, free: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        sample_cells(&self.table, self.cell_dofs, free, &mut out);
        out
    }

    /// `‖g s - u_h‖²` from sampled `u_h` values.
    pub fn squared_error(&self, g: f64, samples: &[f64]) -> f64 {
        let nq = self.weights.len();
        samples
            .chunks(nq)
            .zip(self.exact.chunks(nq))
            .map(|(uh, s)| uh.iter().zip(s).zip(&self.weights).map(|((u, s), w)| w * (g * s - u) * (g * s - u)).sum::<f64>())
            .sum()
    }

    pub fn l2_error(&self, g: f64, free: &[f64]) -> f64 {
        libm::sqrt(self.squared_error(g, &self.sample(free)))
    }
}

/// `‖u(·, t) - u_h‖_{L²}` for a free-DOF vector `u_h` at time `t`.
pub fn spatial_l2_error(
    mesh: &TensorMesh,
    cell_dofs: &CellDofs,
    case: &dyn ManufacturedCase,
    t: f64,
    free: &[f64],
) -> Result<f64> {
    let eval = ErrorEvaluator::new(mesh, cell_dofs, |x, y| case.space_factor(x, y))?;
    Ok(eval.l2_error(case.time_factor(t, 0), free))
}

/// Accumulates the three norms one segment at a time.
pub struct NormAccumulator<'e, 'm> {
    eval: &'e ErrorEvaluator<'m>,
    time: &'e dyn Fn(f64) -> f64,
    report: NormReport,
    l2_sum: f64,
    gauss: crate::quadrature::QuadratureRule1D,
    started: bool,
}

impl<'e, 'm> NormAccumulator<'e, 'm> {
    pub fn new(eval: &'e ErrorEvaluator<'m>, time: &'e dyn Fn(f64) -> f64) -> Result<Self> {
        Ok(NormAccumulator {
            eval,
            time,
            report: NormReport::default(),
            l2_sum: 0.0,
            gauss: gauss_legendre(TIME_POINTS)?,
            started: false,
        })
    }

    /// Adds the displacement of one segment.
    pub fn push(&mut self, seg: &Segment) -> Result<()> {
        let coeffs = seg.coefficients(Component::Displacement);
        // every time sample is a combination of the sampled coefficient vectors
        let sampled: Vec<Vec<f64>> = coeffs.iter().map(|c| self.eval.sample(c)).collect();
        let mut buf = alloc::vec![0.0; sampled[0].len()];
        let error_at = |s: f64, buf: &mut [f64]| {
            let w = seg.basis.weights(s, 0);
            buf.fill(0.0);
            for (wk, samp) in w.iter().zip(&sampled) {
                if *wk != 0.0 {
                    for (b, v) in buf.iter_mut().zip(samp) {
                        *b += wk * v;
                    }
                }
            }
            let g = (self.time)(seg.start + s * seg.tau);
            libm::sqrt(self.eval.squared_error(g, buf))
        };
        if !self.started {
            let e0 = error_at(0.0, &mut buf);
            self.report.linf_tau = self.report.linf_tau.max(e0);
            self.report.linf = self.report.linf.max(e0);
            self.started = true;
        }
        let end = error_at(1.0, &mut buf);
        self.report.linf_tau = self.report.linf_tau.max(end);
        self.report.linf = self.report.linf.max(end);
        for j in 1..FINE_SAMPLES {
            let e = error_at(j as f64 / FINE_SAMPLES as f64, &mut buf);
            self.report.linf = self.report.linf.max(e);
        }
        for (s, w) in self.gauss.iter() {
            let e = error_at(s, &mut buf);
            self.l2_sum += seg.tau * w * e * e;
        }
        Ok(())
    }

    pub fn finish(&self) -> NormReport {
        NormReport { l2l2: libm::sqrt(self.l2_sum), ..self.report }
    }
}

/// One run of `scheme` on the manufactured case, reporting the three norms.
pub fn compute_norms(
    mesh: &TensorMesh,
    ops: &AssembledOperators,
    case: &dyn ManufacturedCase,
    scheme: SchemeKind,
    partition: &TimePartition,
) -> Result<NormReport> {
    let problem = Problem { mesh, ops, forcing: case };
    let init = initial_state(&problem, case, partition.tau(1), DataSlope::Interpolated)?;
    let eval = ErrorEvaluator::new(mesh, &ops.cell_dofs, |x, y| case.space_factor(x, y))?;
    let time = |t: f64| case.time_factor(t, 0);
    let mut acc = NormAccumulator::new(&eval, &time)?;
    integrate(&problem, scheme, partition, &init, |seg| acc.push(seg))?;
    Ok(acc.finish())
}

/// Level `j` of a study: `τ = τ₀ / 2ʲ` on an `(n₀ 2ʲ)²` mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPlan {
    pub tau0: f64,
    pub cells0: usize,
    pub levels: usize,
}

impl Default for StudyPlan {
    fn default() -> Self {
        StudyPlan { tau0: 0.1, cells0: 5, levels: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocRow {
    pub level: usize,
    pub tau: f64,
    pub h: f64,
    pub errors: NormReport,
    /// EOCs of `linf_tau`, `linf`, `l2l2` against the previous level.
    pub eoc: [Option<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EocTable {
    pub scheme: SchemeKind,
    pub rows: Vec<EocRow>,
}

impl EocTable {
    pub fn from_levels(scheme: SchemeKind, levels: Vec<(f64, f64, NormReport)>) -> Self {
        let mut rows: Vec<EocRow> = Vec::with_capacity(levels.len());
        for (level, (tau, h, errors)) in levels.into_iter().enumerate() {
            let eoc = match rows.last() {
                Some(prev) => {
                    let (a, b) = (prev.errors.as_array(), errors.as_array());
                    [compute_eoc(a[0], b[0]), compute_eoc(a[1], b[1]), compute_eoc(a[2], b[2])]
                }
                None => [None; 3],
            };
            rows.push(EocRow { level, tau, h, errors, eoc });
        }
        EocTable { scheme, rows }
    }

    pub fn last_eoc(&self) -> [Option<f64>; 3] {
        self.rows.last().map(|r| r.eoc).unwrap_or([None; 3])
    }
}

/// Errors on one level of a study.
pub fn run_level(scheme: SchemeKind, case: &dyn ManufacturedCase, plan: &StudyPlan, level: usize) -> Result<(f64, f64, NormReport)> {
    let factor = 1usize << level;
    let mesh = TensorMesh::new(case.domain(), plan.cells0 * factor, plan.cells0 * factor)?;
    let ops = assemble(&mesh, &CoefficientField::Constant(1.0))?;
    let steps = libm::round(case.final_time() / plan.tau0) as usize * factor;
    let partition = TimePartition::uniform(case.final_time(), steps)?;
    let errors = compute_norms(&mesh, &ops, case, scheme, &partition)?;
    Ok((partition.tau(1), mesh.diameter(), errors))
}

/// Runs levels `0..plan.levels` in sequence.
pub fn run_study(scheme: SchemeKind, case: &dyn ManufacturedCase, plan: &StudyPlan) -> Result<EocTable> {
    let levels = (0..plan.levels).map(|l| run_level(scheme, case, plan, l)).collect::<Result<Vec<_>>>()?;
    Ok(EocTable::from_levels(scheme, levels))
}
