//! The Bogner–Fox–Schmit element: bicubic Hermite shape functions on
//! rectangles, local mass and biharmonic matrices, nodal interpolation and
//! evaluation of discrete functions.
//!
//! Local DOF `l = 4 * corner + kind`, with corners counterclockwise from the
//! lower-left and kinds ordered value, ∂x, ∂y, ∂xy. On a physical cell the
//! derivative-kind shape functions are scaled by `hx`, `hy` and `hx * hy`, so
//! global coefficients are true physical derivatives.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::mesh::{DofMap, TensorMesh};
use crate::quadrature::{gauss_legendre, tensorize, QuadratureRule2D};
use crate::{Error, Result};

/// The four cubic Hermite functions on [0, 1]:
/// `H0 = 1 - 3t² + 2t³`, `H1 = t - 2t² + t³`, `H2 = 3t² - 2t³`, `H3 = -t² + t³`.
///
/// `H0`/`H2` carry the values at 0/1 and `H1`/`H3` the slopes.
pub struct HermiteCubic;

impl HermiteCubic {
    /// `deriv`-th derivative of `H_k` at `t`.
    pub fn eval(k: usize, t: f64, deriv: usize) -> f64 {
        let t2 = t * t;
        match (k, deriv) {
            (0, 0) => 1.0 - 3.0 * t2 + 2.0 * t2 * t,
            (0, 1) => -6.0 * t + 6.0 * t2,
            (0, 2) => -6.0 + 12.0 * t,
            (0, 3) => 12.0,
            (1, 0) => t - 2.0 * t2 + t2 * t,
            (1, 1) => 1.0 - 4.0 * t + 3.0 * t2,
            (1, 2) => -4.0 + 6.0 * t,
            (1, 3) => 6.0,
            (2, 0) => 3.0 * t2 - 2.0 * t2 * t,
            (2, 1) => 6.0 * t - 6.0 * t2,
            (2, 2) => 6.0 - 12.0 * t,
            (2, 3) => -12.0,
            (3, 0) => -t2 + t2 * t,
            (3, 1) => -2.0 * t + 3.0 * t2,
            (3, 2) => -2.0 + 6.0 * t,
            (3, 3) => 6.0,
            (_, d) if d > 3 && k < 4 => 0.0,
            _ => panic!("Hermite index {k} out of range"),
        }
    }

    pub fn value(k: usize, t: f64) -> f64 {
        Self::eval(k, t, 0)
    }

    /// All four functions at once.
    pub fn all(t: f64, deriv: usize) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| Self::eval(k, t, deriv))
    }
}

pub const LOCAL_DOFS: usize = 16;
pub type LocalMatrix = [[f64; LOCAL_DOFS]; LOCAL_DOFS];

const CORNERS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Which 1D Hermite functions make up local shape function `l`, and whether
/// it carries an x- and/or y-derivative scaling.
fn factors(l: usize) -> (usize, usize, bool, bool) {
    let (cx, cy) = CORNERS[l / 4];
    let kind = l % 4;
    let x_slope = kind == 1 || kind == 3;
    let y_slope = kind == 2 || kind == 3;
    let hx_index = if x_slope { 1 + 2 * cx } else { 2 * cx };
    let hy_index = if y_slope { 1 + 2 * cy } else { 2 * cy };
    (hx_index, hy_index, x_slope, y_slope)
}

/// Reference shape function `l` (or its `(dx, dy)` derivative) at `(x̂, ŷ)`.
pub fn shape_eval(l: usize, point: (f64, f64), deriv: (usize, usize)) -> Result<f64> {
    if l >= LOCAL_DOFS {
        return Err(Error::IndexOutOfRange { index: l, len: LOCAL_DOFS });
    }
    if deriv.0 + deriv.1 > 2 {
        return Err(Error::UnsupportedDerivative { order: deriv.0 + deriv.1 });
    }
    let (ix, iy, _, _) = factors(l);
    Ok(HermiteCubic::eval(ix, point.0, deriv.0) * HermiteCubic::eval(iy, point.1, deriv.1))
}

/// DOF scaling of local shape function `l` on a `hx × hy` cell.
pub fn dof_scale(l: usize, hx: f64, hy: f64) -> f64 {
    let (_, _, sx, sy) = factors(l);
    let mut s = 1.0;
    if sx {
        s *= hx;
    }
    if sy {
        s *= hy;
    }
    s
}

/// Physical shape data tabulated at the points of a reference rule.
#[derive(Debug, Clone)]
pub struct ShapeTable {
    rule: QuadratureRule2D,
    values: Vec<[f64; LOCAL_DOFS]>,
    laplacians: Vec<[f64; LOCAL_DOFS]>,
    hx: f64,
    hy: f64,
}

impl ShapeTable {
    pub fn new(rule: QuadratureRule2D, hx: f64, hy: f64) -> Self {
        let mut values = Vec::with_capacity(rule.len());
        let mut laplacians = Vec::with_capacity(rule.len());
        for &(x, y) in rule.points() {
            let (v, lap) = physical_shapes(x, y, hx, hy);
            values.push(v);
            laplacians.push(lap);
        }
        ShapeTable { rule, values, laplacians, hx, hy }
    }

    /// Tensor Gauss rule with `n` points per direction.
    pub fn gauss(mesh: &TensorMesh, n: usize) -> Result<Self> {
        Ok(ShapeTable::new(tensorize(&gauss_legendre(n)?), mesh.hx(), mesh.hy()))
    }

    pub fn rule(&self) -> &QuadratureRule2D {
        &self.rule
    }

    pub fn values(&self) -> &[[f64; LOCAL_DOFS]] {
        &self.values
    }

    pub fn laplacians(&self) -> &[[f64; LOCAL_DOFS]] {
        &self.laplacians
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }
}

/// Scaled shape values and physical Laplacians at reference point `(x, y)`.
fn physical_shapes(x: f64, y: f64, hx: f64, hy: f64) -> ([f64; 16], [f64; 16]) {
    let hxv = HermiteCubic::all(x, 0);
    let hxd2 = HermiteCubic::all(x, 2);
    let hyv = HermiteCubic::all(y, 0);
    let hyd2 = HermiteCubic::all(y, 2);
    let mut v = [0.0; 16];
    let mut lap = [0.0; 16];
    for l in 0..LOCAL_DOFS {
        let (ix, iy, _, _) = factors(l);
        let s = dof_scale(l, hx, hy);
        v[l] = s * hxv[ix] * hyv[iy];
        lap[l] = s * (hxd2[ix] * hyv[iy] / (hx * hx) + hxv[ix] * hyd2[iy] / (hy * hy));
    }
    (v, lap)
}

/// Stiffness coefficient `c(x) > 0` of the plate operator `Δ(c Δu)`.
pub enum CoefficientField {
    Constant(f64),
    /// `inside` where the predicate holds, `outside` elsewhere.
    Piecewise {
        predicate: Box<dyn Fn(f64, f64) -> bool + Send + Sync>,
        inside: f64,
        outside: f64,
    },
    Analytic(Box<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl CoefficientField {
    /// `below` for `y < threshold`, `above` otherwise.
    pub fn jump_in_y(threshold: f64, below: f64, above: f64) -> Self {
        CoefficientField::Piecewise {
            predicate: Box::new(move |_, y| y >= threshold),
            inside: above,
            outside: below,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            CoefficientField::Constant(c) => *c,
            CoefficientField::Piecewise { predicate, inside, outside } => {
                if predicate(x, y) {
                    *inside
                } else {
                    *outside
                }
            }
            CoefficientField::Analytic(f) => f(x, y),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientField::Constant(_))
    }

    fn checked(&self, x: f64, y: f64) -> Result<f64> {
        let value = self.eval(x, y);
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonPositiveCoefficient { x, y, value })
        }
    }
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Constant(c) => write!(f, "Constant({c})"),
            CoefficientField::Piecewise { inside, outside, .. } => {
                write!(f, "Piecewise {{ inside: {inside}, outside: {outside} }}")
            }
            CoefficientField::Analytic(_) => f.write_str("Analytic(..)"),
        }
    }
}

fn symmetric_gram(table: &ShapeTable, rows: &[[f64; 16]], weight: impl Fn(usize) -> f64) -> LocalMatrix {
    let mut m = [[0.0; 16]; 16];
    let area = table.cell_area();
    for (q, (row, &w)) in rows.iter().zip(table.rule().weights()).enumerate() {
        let wq = area * w * weight(q);
        for i in 0..16 {
            let a = wq * row[i];
            for j in i..16 {
                m[i][j] += a * row[j];
            }
        }
    }
    for i in 0..16 {
        for j in 0..i {
            m[i][j] = m[j][i];
        }
    }
    m
}

/// Local mass matrix `∫ φ_i φ_j` of a cell of `mesh`; every cell of a uniform
/// mesh shares it. The 4-point tensor Gauss rule is exact for these products.
pub fn local_mass(mesh: &TensorMesh) -> LocalMatrix {
    let table = ShapeTable::gauss(mesh, 4).expect("4-point rule is tabulated");
    local_mass_with(&table)
}

pub fn local_mass_with(table: &ShapeTable) -> LocalMatrix {
    symmetric_gram(table, table.values(), |_| 1.0)
}

/// Local biharmonic matrix `∫ c Δφ_i Δφ_j` of `cell`, with `c` sampled at the
/// quadrature points.
pub fn local_biharmonic(mesh: &TensorMesh, c: &CoefficientField, cell: usize) -> Result<LocalMatrix> {
    let table = ShapeTable::gauss(mesh, 4)?;
    local_biharmonic_with(mesh, &table, c, cell)
}

pub fn local_biharmonic_with(
    mesh: &TensorMesh,
    table: &ShapeTable,
    c: &CoefficientField,
    cell: usize,
) -> Result<LocalMatrix> {
    mesh.cell_nodes(cell)?;
    let (x0, y0) = mesh.cell_origin(cell);
    let samples = table
        .rule()
        .points()
        .iter()
        .map(|&(xr, yr)| c.checked(x0 + xr * mesh.hx(), y0 + yr * mesh.hy()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(symmetric_gram(table, table.laplacians(), |q| samples[q]))
}

/// Nodal data `(u, ∂x u, ∂y u, ∂xy u)` of a smooth function.
pub trait NodalField {
    fn nodal(&self, x: f64, y: f64) -> [f64; 4];
}

impl<F: Fn(f64, f64) -> [f64; 4]> NodalField for F {
    fn nodal(&self, x: f64, y: f64) -> [f64; 4] {
        self(x, y)
    }
}

/// Global DOF vector of the BFS interpolant (boundary DOFs included).
pub fn interpolate_nodal(mesh: &TensorMesh, field: &dyn NodalField) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * mesh.num_nodes());
    for node in 0..mesh.num_nodes() {
        let (x, y) = mesh.node_coords(node);
        out.extend_from_slice(&field.nodal(x, y));
    }
    out
}

/// Interpolant restricted to the free DOFs (clamped entries dropped).
pub fn interpolate_free(mesh: &TensorMesh, dofs: &DofMap, field: &dyn NodalField) -> Vec<f64> {
    dofs.restrict(&interpolate_nodal(mesh, field))
}

const NO_DOF: u32 = u32::MAX;

/// Free-DOF index of each local DOF of each cell (`u32::MAX` for clamped).
#[derive(Debug, Clone)]
pub struct CellDofs {
    table: Vec<[u32; LOCAL_DOFS]>,
}

impl CellDofs {
    pub fn new(mesh: &TensorMesh, dofs: &DofMap) -> Self {
        let table = (0..mesh.num_cells())
            .map(|cell| {
                let nodes = mesh.cell_nodes(cell).expect("cell in range");
                let mut ids = [NO_DOF; LOCAL_DOFS];
                for (l, id) in ids.iter_mut().enumerate() {
                    let g = 4 * nodes[l / 4] + l % 4;
                    if let Some(k) = dofs.free_index(g) {
                        *id = k as u32;
                    }
                }
                ids
            })
            .collect();
        CellDofs { table }
    }

    /// Free indices of the local DOFs of `cell`, `None` for clamped ones.
    pub fn local(&self, cell: usize) -> impl Iterator<Item = Option<usize>> + '_ {
        self.table[cell].iter().map(|&k| (k != NO_DOF).then_some(k as usize))
    }

    /// Local coefficient vector of `cell` from a free-DOF vector.
    pub fn gather(&self, cell: usize, free: &[f64]) -> [f64; LOCAL_DOFS] {
        let mut out = [0.0; LOCAL_DOFS];
        for (o, &k) in out.iter_mut().zip(&self.table[cell]) {
            if k != NO_DOF {
                *o = free[k as usize];
            }
        }
        out
    }
}

/// Evaluates a free-DOF vector at a point of the domain.
pub fn evaluate(mesh: &TensorMesh, cell_dofs: &CellDofs, free: &[f64], x: f64, y: f64) -> f64 {
    let (cell, xr, yr) = mesh.locate(x, y);
    evaluate_local(mesh, cell_dofs, free, cell, xr, yr)
}

/// Evaluates a free-DOF vector at reference point `(xr, yr)` of `cell`.
pub fn evaluate_local(mesh: &TensorMesh, cell_dofs: &CellDofs, free: &[f64], cell: usize, xr: f64, yr: f64) -> f64 {
    let coeffs = cell_dofs.gather(cell, free);
    let hxv = HermiteCubic::all(xr, 0);
    let hyv = HermiteCubic::all(yr, 0);
    (0..LOCAL_DOFS)
        .map(|l| {
            let (ix, iy, _, _) = factors(l);
            coeffs[l] * dof_scale(l, mesh.hx(), mesh.hy()) * hxv[ix] * hyv[iy]
        })
        .sum()
}

/// Values of a discrete function at the points of `table` in every cell,
/// cell-major: `out[cell * nq + q]`.
pub fn sample_cells(table: &ShapeTable, cell_dofs: &CellDofs, free: &[f64], out: &mut Vec<f64>) {
    let nq = table.values().len();
    out.clear();
    out.reserve(cell_dofs.table.len() * nq);
    for cell in 0..cell_dofs.table.len() {
        let coeffs = cell_dofs.gather(cell, free);
        for row in table.values() {
            out.push(row.iter().zip(&coeffs).map(|(a, b)| a * b).sum());
        }
    }
}
