//! Uniform tensor-product meshes and the Bogner–Fox–Schmit DOF numbering.
//!
//! Nodes are numbered row-major (`node = j * (nx + 1) + i`), cells likewise
//! (`cell = j * nx + i`). Each node carries four DOFs in the order
//! value, ∂x, ∂y, ∂xy, so the global index of `(node, kind)` is
//! `4 * node + kind`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Axis-aligned rectangle `(x_min, x_max) × (y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    pub const fn unit_square() -> Self {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    fn is_valid(&self) -> bool {
        self.x_min.is_finite()
            && self.x_max.is_finite()
            && self.y_min.is_finite()
            && self.y_max.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorMesh {
    rect: Rect,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl TensorMesh {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config("cell counts must be positive"));
        }
        if !rect.is_valid() {
            return Err(Error::Config("domain rectangle is empty or inverted"));
        }
        Ok(TensorMesh {
            rect,
            nx,
            ny,
            hx: rect.width() / nx as f64,
            hy: rect.height() / ny as f64,
        })
    }

    /// `n × n` cells on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        TensorMesh::new(Rect::unit_square(), n, n)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    /// Cell diagonal, the mesh size `h` used in convergence tables.
    pub fn diameter(&self) -> f64 {
        libm::sqrt(self.hx * self.hx + self.hy * self.hy)
    }

    pub fn num_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// Grid position `(i, j)` of a node.
    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        (node % (self.nx + 1), node / (self.nx + 1))
    }

    pub fn node_x(&self, i: usize) -> f64 {
        self.rect.x_min + i as f64 * self.hx
    }

    pub fn node_y(&self, j: usize) -> f64 {
        self.rect.y_min + j as f64 * self.hy
    }

    pub fn node_coords(&self, node: usize) -> (f64, f64) {
        let (i, j) = self.node_ij(node);
        (self.node_x(i), self.node_y(j))
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        let (i, j) = self.node_ij(node);
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// Corner nodes of a cell, counterclockwise from the lower-left corner.
    pub fn cell_nodes(&self, cell: usize) -> Result<[usize; 4]> {
        if cell >= self.num_cells() {
            return Err(Error::IndexOutOfRange { index: cell, len: self.num_cells() });
        }
        let (i, j) = (cell % self.nx, cell / self.nx);
        Ok([
            self.node_index(i, j),
            self.node_index(i + 1, j),
            self.node_index(i + 1, j + 1),
            self.node_index(i, j + 1),
        ])
    }

    /// Lower-left corner of a cell. The caller guarantees `cell < num_cells()`.
    pub fn cell_origin(&self, cell: usize) -> (f64, f64) {
        (self.node_x(cell % self.nx), self.node_y(cell / self.nx))
    }

    /// Cell containing `(x, y)` and the reference coordinates inside it.
    /// Points on interior grid lines belong to the upper/right cell; points
    /// outside the domain are clamped onto it.
    pub fn locate(&self, x: f64, y: f64) -> (usize, f64, f64) {
        let (i, xr) = locate_axis(x, self.rect.x_min, self.hx, self.nx);
        let (j, yr) = locate_axis(y, self.rect.y_min, self.hy, self.ny);
        (j * self.nx + i, xr, yr)
    }
}

fn locate_axis(x: f64, origin: f64, h: f64, n: usize) -> (usize, f64) {
    let s = (x - origin) / h;
    let i = if s <= 0.0 {
        0
    } else {
        let f = libm::floor(s) as usize;
        f.min(n - 1)
    };
    let r = (s - i as f64).clamp(0.0, 1.0);
    (i, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum DofKind {
    Value = 0,
    Dx = 1,
    Dy = 2,
    Dxy = 3,
}

impl DofKind {
    pub const ALL: [DofKind; 4] = [DofKind::Value, DofKind::Dx, DofKind::Dy, DofKind::Dxy];

    pub fn from_index(k: usize) -> DofKind {
        DofKind::ALL[k]
    }
}

const CONSTRAINED: usize = usize::MAX;

/// Global DOF numbering with the clamped-boundary classification and a
/// dense renumbering of the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    total: usize,
    free_index: Vec<usize>,
    free_to_global: Vec<usize>,
}

impl DofMap {
    pub fn global_index(node: usize, kind: DofKind) -> usize {
        4 * node + kind as usize
    }

    pub fn node_and_kind(global: usize) -> (usize, DofKind) {
        (global / 4, DofKind::from_index(global % 4))
    }

    /// Numbering without boundary constraints, for functions that do not
    /// satisfy the clamped conditions.
    pub fn unconstrained(mesh: &TensorMesh) -> Self {
        let total = 4 * mesh.num_nodes();
        DofMap { total, free_index: (0..total).collect(), free_to_global: (0..total).collect() }
    }

    pub fn num_total(&self) -> usize {
        self.total
    }

    pub fn num_free(&self) -> usize {
        self.free_to_global.len()
    }

    pub fn num_constrained(&self) -> usize {
        self.total - self.num_free()
    }

    pub fn is_constrained(&self, global: usize) -> bool {
        self.free_index[global] == CONSTRAINED
    }

    /// Dense index of a free DOF, `None` for clamped DOFs.
    pub fn free_index(&self, global: usize) -> Option<usize> {
        match self.free_index[global] {
            CONSTRAINED => None,
            k => Some(k),
        }
    }

    pub fn free_to_global(&self) -> &[usize] {
        &self.free_to_global
    }

    /// Boundary mask over all global DOFs.
    pub fn boundary_mask(&self) -> Vec<bool> {
        self.free_index.iter().map(|&k| k == CONSTRAINED).collect()
    }

    /// Restricts a global DOF vector to the free DOFs.
    pub fn restrict(&self, global: &[f64]) -> Vec<f64> {
        self.free_to_global.iter().map(|&g| global[g]).collect()
    }

    /// Extends a free-DOF vector by zeros on the clamped DOFs.
    pub fn extend(&self, free: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.total];
        for (&g, &v) in self.free_to_global.iter().zip(free) {
            out[g] = v;
        }
        out
    }
}

/// Flags every DOF of every boundary node: the clamped conditions fix the
/// value, both first derivatives and, along the edges, the mixed derivative.
pub fn classify_boundary(mesh: &TensorMesh) -> DofMap {
    let total = 4 * mesh.num_nodes();
    let mut free_index = alloc::vec![CONSTRAINED; total];
    let mut free_to_global = Vec::with_capacity(4 * (mesh.nx() - 1) * (mesh.ny() - 1));
    for node in 0..mesh.num_nodes() {
        if mesh.is_boundary_node(node) {
            continue;
        }
        for kind in DofKind::ALL {
            let g = DofMap::global_index(node, kind);
            free_index[g] = free_to_global.len();
            free_to_global.push(g);
        }
    }
    DofMap { total, free_index, free_to_global }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_five_cells() {
        let m = TensorMesh::unit_square(5).unwrap();
        assert_eq!(m.num_cells(), 25);
        assert_eq!(m.num_nodes(), 36);
        assert!((m.diameter() - libm::sqrt(2.0) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn sensor_domain_mesh_spacing() {
        let m = TensorMesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0), 32, 32).unwrap();
        assert_eq!(m.hx(), 0.0625);
        assert_eq!(m.hy(), 0.0625);
    }

    #[test]
    fn single_cell_has_no_free_dofs() {
        let m = TensorMesh::unit_square(1).unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_nodes(), 4);
        assert!((0..4).all(|n| m.is_boundary_node(n)));
        assert_eq!(classify_boundary(&m).num_free(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TensorMesh::unit_square(0).is_err());
        assert!(TensorMesh::new(Rect::new(1.0, 0.0, 0.0, 1.0), 2, 2).is_err());
        assert!(TensorMesh::new(Rect::new(0.0, 1.0, 0.0, 0.0), 2, 2).is_err());
    }

    #[test]
    fn node_coordinates_are_reproducible() {
        let m = TensorMesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0), 32, 32).unwrap();
        for i in 0..=32 {
            assert_eq!(m.node_x(i), -1.0 + i as f64 * 0.0625);
        }
    }

    #[test]
    fn cell_corner_ordering() {
        let m = TensorMesh::unit_square(2).unwrap();
        assert_eq!(m.cell_nodes(0).unwrap(), [0, 1, 4, 3]);
        let m = TensorMesh::unit_square(1).unwrap();
        assert_eq!(m.cell_nodes(0).unwrap(), [0, 1, 3, 2]);
        let m = TensorMesh::unit_square(3).unwrap();
        // first cell of the second row starts at node (0, 1)
        assert_eq!(m.cell_nodes(3).unwrap()[0], m.node_index(0, 1));
        assert!(m.cell_nodes(9).is_err());
    }

    #[test]
    fn free_dof_counts() {
        let m = TensorMesh::unit_square(16).unwrap();
        let d = classify_boundary(&m);
        assert_eq!(d.num_total(), 1156);
        assert_eq!(d.num_free(), 900);
        let m = TensorMesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0), 32, 32).unwrap();
        assert_eq!(classify_boundary(&m).num_free(), 3844);
        for (nx, ny) in [(2, 2), (3, 7), (9, 4)] {
            let m = TensorMesh::new(Rect::unit_square(), nx, ny).unwrap();
            let d = classify_boundary(&m);
            assert_eq!(d.num_free(), 4 * (nx - 1) * (ny - 1));
            assert_eq!(d.num_free() + d.num_constrained(), d.num_total());
        }
    }

    #[test]
    fn boundary_nodes_have_all_kinds_constrained() {
        let m = TensorMesh::new(Rect::unit_square(), 4, 3).unwrap();
        let d = classify_boundary(&m);
        for node in 0..m.num_nodes() {
            for kind in DofKind::ALL {
                let g = DofMap::global_index(node, kind);
                assert_eq!(d.is_constrained(g), m.is_boundary_node(node));
                assert_eq!(DofMap::node_and_kind(g), (node, kind));
            }
        }
    }

    #[test]
    fn boundary_mask_is_reflection_symmetric() {
        let m = TensorMesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0), 6, 6).unwrap();
        let mask = classify_boundary(&m).boundary_mask();
        for node in 0..m.num_nodes() {
            let (i, j) = m.node_ij(node);
            let mirrored_x = m.node_index(6 - i, j);
            let mirrored_y = m.node_index(i, 6 - j);
            assert_eq!(mask[4 * node], mask[4 * mirrored_x]);
            assert_eq!(mask[4 * node], mask[4 * mirrored_y]);
        }
    }

    #[test]
    fn restrict_extend_roundtrip() {
        let m = TensorMesh::unit_square(3).unwrap();
        let d = classify_boundary(&m);
        let free: Vec<f64> = (0..d.num_free()).map(|k| k as f64 + 1.0).collect();
        assert_eq!(d.restrict(&d.extend(&free)), free);
        for (k, &g) in d.free_to_global().iter().enumerate() {
            assert_eq!(d.free_index(g), Some(k));
        }
    }

    #[test]
    fn locate_points() {
        let m = TensorMesh::unit_square(4).unwrap();
        let (c, xr, yr) = m.locate(0.3, 0.6);
        assert_eq!(c, 2 * 4 + 1);
        assert!((xr - 0.2).abs() < 1e-12 && (yr - 0.4).abs() < 1e-12);
        assert_eq!(m.locate(1.0, 1.0), (15, 1.0, 1.0));
        assert_eq!(m.locate(0.0, 0.0), (0, 0.0, 0.0));
    }
}
