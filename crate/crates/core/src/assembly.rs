//! Global mass and biharmonic stiffness matrices on the free DOFs.
//!
//! Clamped boundary DOFs are eliminated, so both matrices are symmetric
//! positive definite. The sparsity pattern couples two DOFs whenever their
//! nodes share a cell; `M` and `A` share it exactly.

use alloc::vec::Vec;

use crate::bfs::{local_biharmonic_with, local_mass_with, CellDofs, CoefficientField, LocalMatrix, ShapeTable, LOCAL_DOFS};
use crate::mesh::{classify_boundary, DofMap, TensorMesh};
use crate::sparse::CsrMatrix;
use crate::Result;

/// Points per direction of the tensor Gauss rule used for matrices and loads.
pub const ASSEMBLY_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofReport {
    /// All DOFs including the clamped ones (`J_total`).
    pub total: usize,
    pub free: usize,
    pub nnz_mass: usize,
    pub nnz_stiffness: usize,
}

#[derive(Debug, Clone)]
pub struct AssembledOperators {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
    pub dofs: DofMap,
    pub cell_dofs: CellDofs,
    pub report: DofReport,
}

pub fn assemble(mesh: &TensorMesh, c: &CoefficientField) -> Result<AssembledOperators> {
    assemble_in_order(mesh, c, &(0..mesh.num_cells()).collect::<Vec<_>>())
}

/// Assembles with the cells visited in `order`; any permutation yields the
/// same matrices up to rounding.
pub fn assemble_in_order(mesh: &TensorMesh, c: &CoefficientField, order: &[usize]) -> Result<AssembledOperators> {
    let dofs = classify_boundary(mesh);
    let cell_dofs = CellDofs::new(mesh, &dofs);
    let pattern = pattern(mesh, &dofs);
    let table = ShapeTable::gauss(mesh, ASSEMBLY_POINTS)?;

    let local_m = local_mass_with(&table);
    // a constant coefficient gives the same local matrix on every cell
    let uniform_a = match c {
        CoefficientField::Constant(_) => Some(local_biharmonic_with(mesh, &table, c, 0)?),
        _ => None,
    };

    let mut mass = pattern.clone();
    let mut stiffness = pattern;
    for &cell in order {
        let ids: Vec<Option<usize>> = cell_dofs.local(cell).collect();
        let local_a = match &uniform_a {
            Some(a) => *a,
            None => local_biharmonic_with(mesh, &table, c, cell)?,
        };
        scatter(&mut mass, &ids, &local_m);
        scatter(&mut stiffness, &ids, &local_a);
    }
    let report = DofReport {
        total: dofs.num_total(),
        free: dofs.num_free(),
        nnz_mass: mass.nnz(),
        nnz_stiffness: stiffness.nnz(),
    };
    Ok(AssembledOperators { mass, stiffness, dofs, cell_dofs, report })
}

fn scatter(matrix: &mut CsrMatrix, ids: &[Option<usize>], local: &LocalMatrix) {
    for i in 0..LOCAL_DOFS {
        let Some(r) = ids[i] else { continue };
        for j in 0..LOCAL_DOFS {
            let Some(c) = ids[j] else { continue };
            let p = matrix.position(r, c).expect("entry in mesh pattern");
            matrix.values_mut()[p] += local[i][j];
        }
    }
}

/// Zero-valued matrix with the free-DOF connectivity pattern.
fn pattern(mesh: &TensorMesh, dofs: &DofMap) -> CsrMatrix {
    let n = dofs.num_free();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for &g in dofs.free_to_global() {
        let (i, j) = mesh.node_ij(g / 4);
        // free indices increase with the global index, and neighbor nodes are
        // visited in increasing node order, so each row comes out sorted
        for nj in j.saturating_sub(1)..=(j + 1).min(mesh.ny()) {
            for ni in i.saturating_sub(1)..=(i + 1).min(mesh.nx()) {
                let node = mesh.node_index(ni, nj);
                for k in 0..4 {
                    if let Some(col) = dofs.free_index(4 * node + k) {
                        col_idx.push(col);
                    }
                }
            }
        }
        row_ptr.push(col_idx.len());
    }
    let nnz = col_idx.len();
    CsrMatrix::new(n, n, row_ptr, col_idx, alloc::vec![0.0; nnz]).expect("sorted pattern")
}

/// Load vector `(∫ g φ_i)_i` over the free DOFs.
pub fn assemble_load(mesh: &TensorMesh, cell_dofs: &CellDofs, table: &ShapeTable, g: impl Fn(f64, f64) -> f64, out: &mut [f64]) {
    out.fill(0.0);
    let area = table.cell_area();
    let points = table.rule().points();
    let weights = table.rule().weights();
    for cell in 0..mesh.num_cells() {
        let (x0, y0) = mesh.cell_origin(cell);
        let mut local = [0.0; LOCAL_DOFS];
        for (q, (&(xr, yr), &w)) in points.iter().zip(weights).enumerate() {
            let gq = area * w * g(x0 + xr * mesh.hx(), y0 + yr * mesh.hy());
            if gq == 0.0 {
                continue;
            }
            for (l, phi) in local.iter_mut().zip(&table.values()[q]) {
                *l += gq * phi;
            }
        }
        for (id, v) in cell_dofs.local(cell).zip(local) {
            if let Some(k) = id {
                out[k] += v;
            }
        }
    }
}
