//! Averaged point sensor: the integral of a discrete field over a small
//! rectangle that need not be aligned with the mesh.

use alloc::vec::Vec;

use crate::bfs::{evaluate_local, CellDofs};
use crate::mesh::{Rect, TensorMesh};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Gauss points per direction on each clipped piece.
const SENSOR_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorRegion {
    rect: Rect,
}

impl SensorRegion {
    pub fn new(rect: Rect) -> Self {
        SensorRegion { rect }
    }

    /// `(cx - half, cx + half) × (cy - half, cy + half)`.
    pub fn centered(cx: f64, cy: f64, half: f64) -> Self {
        SensorRegion { rect: Rect::new(cx - half, cx + half, cy - half, cy + half) }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }
}

/// Quadrature for `∫_region v dx` precomputed on a mesh: the region is
/// clipped against the grid lines and every piece gets a tensor Gauss rule.
#[derive(Debug, Clone)]
pub struct Sensor {
    /// `(cell, x̂, ŷ, weight)` with the physical area folded into the weight.
    points: Vec<(usize, f64, f64, f64)>,
}

impl Sensor {
    pub fn new(mesh: &TensorMesh, region: &SensorRegion) -> Result<Self> {
        let r = region.rect;
        let valid = r.x_max > r.x_min && r.y_max > r.y_min;
        if !valid || !mesh.rect().contains(&r) {
            return Err(Error::SensorOutsideDomain);
        }
        let rule = gauss_legendre(SENSOR_POINTS)?;
        let dom = mesh.rect();
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let range = |lo: f64, hi: f64, origin: f64, h: f64, n: usize| {
            let first = libm::floor((lo - origin) / h).max(0.0) as usize;
            let last = (libm::ceil((hi - origin) / h) as usize).min(n);
            first.min(n - 1)..last.max(first + 1)
        };
        let mut points = Vec::new();
        for j in range(r.y_min, r.y_max, dom.y_min, hy, mesh.ny()) {
            let (cy0, cy1) = (dom.y_min + j as f64 * hy, dom.y_min + (j + 1) as f64 * hy);
            let (y0, y1) = (r.y_min.max(cy0), r.y_max.min(cy1));
            if y1 <= y0 {
                continue;
            }
            for i in range(r.x_min, r.x_max, dom.x_min, hx, mesh.nx()) {
                let (cx0, cx1) = (dom.x_min + i as f64 * hx, dom.x_min + (i + 1) as f64 * hx);
                let (x0, x1) = (r.x_min.max(cx0), r.x_max.min(cx1));
                if x1 <= x0 {
                    continue;
                }
                let cell = j * mesh.nx() + i;
                let area = (x1 - x0) * (y1 - y0);
                for (qy, wy) in rule.iter() {
                    let y = y0 + qy * (y1 - y0);
                    for (qx, wx) in rule.iter() {
                        let x = x0 + qx * (x1 - x0);
                        points.push((cell, (x - cx0) / hx, (y - cy0) / hy, area * wx * wy));
                    }
                }
            }
        }
        Ok(Sensor { points })
    }

    pub fn value(&self, mesh: &TensorMesh, cell_dofs: &CellDofs, free: &[f64]) -> f64 {
        self.points.iter().map(|&(cell, xr, yr, w)| w * evaluate_local(mesh, cell_dofs, free, cell, xr, yr)).sum()
    }
}

/// `∫_region v dx` for the free-DOF vector `free`.
pub fn sensor_value(mesh: &TensorMesh, cell_dofs: &CellDofs, free: &[f64], region: &SensorRegion) -> Result<f64> {
    Ok(Sensor::new(mesh, region)?.value(mesh, cell_dofs, free))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfs::interpolate_free;
    use crate::mesh::DofMap;

    fn setup() -> (TensorMesh, DofMap, CellDofs) {
        let mesh = TensorMesh::new(Rect::new(-1.0, 1.0, -1.0, 1.0), 32, 32).unwrap();
        let dofs = DofMap::unconstrained(&mesh);
        let cd = CellDofs::new(&mesh, &dofs);
        (mesh, dofs, cd)
    }

    #[test]
    fn integrates_constants_and_linears() {
        let (mesh, dofs, cd) = setup();
        let region = SensorRegion::centered(0.75, 0.0, 1.0 / 32.0);
        let one = interpolate_free(&mesh, &dofs, &|_: f64, _: f64| [1.0, 0.0, 0.0, 0.0]);
        let v = sensor_value(&mesh, &cd, &one, &region).unwrap();
        assert!((v - 1.0 / 256.0).abs() < 1e-16);
        let x = interpolate_free(&mesh, &dofs, &|x: f64, _: f64| [x, 1.0, 0.0, 0.0]);
        let v = sensor_value(&mesh, &cd, &x, &region).unwrap();
        assert!((v - 0.75 / 256.0).abs() < 1e-16);
        let zero = alloc::vec![0.0; dofs.num_free()];
        assert_eq!(sensor_value(&mesh, &cd, &zero, &region).unwrap(), 0.0);
    }

    #[test]
    fn additive_over_a_partition() {
        let (mesh, dofs, cd) = setup();
        let f = interpolate_free(&mesh, &dofs, &|x: f64, y: f64| {
            let e = libm::exp(x + 2.0 * y);
            [e * x * y, e * (x * y + y), e * (2.0 * x * y + x), e * (2.0 * x * y + x + 2.0 * y + 1.0)]
        });
        let whole = SensorRegion::new(Rect::new(0.71875, 0.78125, -0.03125, 0.03125));
        let left = SensorRegion::new(Rect::new(0.71875, 0.7431, -0.03125, 0.03125));
        let right = SensorRegion::new(Rect::new(0.7431, 0.78125, -0.03125, 0.03125));
        let sum = sensor_value(&mesh, &cd, &f, &left).unwrap() + sensor_value(&mesh, &cd, &f, &right).unwrap();
        let total = sensor_value(&mesh, &cd, &f, &whole).unwrap();
        assert!((sum - total).abs() < 1e-15 * total.abs().max(1e-3));
    }

    #[test]
    fn rejects_regions_outside_the_domain() {
        let (mesh, _, cd) = setup();
        let free = alloc::vec![0.0; 4 * mesh.num_nodes()];
        let region = SensorRegion::centered(0.99, 0.0, 0.05);
        assert_eq!(sensor_value(&mesh, &cd, &free, &region), Err(Error::SensorOutsideDomain));
        let empty = SensorRegion::centered(0.5, 0.0, 0.0);
        assert_eq!(sensor_value(&mesh, &cd, &free, &empty), Err(Error::SensorOutsideDomain));
    }
}
