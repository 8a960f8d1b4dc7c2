//! Grids and grid functions on a rectangular product of time scales.
//!
//! Values are stored for the closed product grid in row-major order (the
//! last axis varies fastest). Interior data, where the Dirichlet problem
//! lives, is handled as a separate dense array of shape `interior_shape()`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::DirichletOperator1D;
use crate::timescale::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    axes: Vec<Arc<Grid>>,
    shape: Vec<usize>,
    interior_shape: Vec<usize>,
}

impl ProductGrid {
    pub fn new(axes: Vec<Arc<Grid>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Precondition(
                "a product grid needs at least one axis".into(),
            ));
        }
        if axes.iter().any(|g| g.interior_len() == 0) {
            return Err(Error::EmptyInterior);
        }
        let shape = axes.iter().map(|g| g.len()).collect();
        let interior_shape = axes.iter().map(|g| g.interior_len()).collect();
        Ok(ProductGrid {
            axes,
            shape,
            interior_shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Arc<Grid>] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn interior_shape(&self) -> &[usize] {
        &self.interior_shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_len(&self) -> usize {
        self.interior_shape.iter().product()
    }

    /// `Π (b_i - a_i)`.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|g| g.width()).product()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        flat(&self.shape, idx)
    }

    pub fn multi_index(&self, flat_idx: usize) -> Vec<usize> {
        unflatten(&self.shape, flat_idx)
    }

    pub fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, g)| g.point(i))
            .collect()
    }

    pub fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.shape)
            .any(|(&i, &n)| i == 0 || i + 1 == n)
    }

    pub fn weight(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, g)| g.weights()[i])
            .product()
    }

    /// Product weights of all interior points, in interior row-major order.
    pub fn interior_weights(&self) -> Vec<f64> {
        let lanes: Vec<&[f64]> = self
            .axes
            .iter()
            .map(|g| &g.weights()[1..g.len() - 1])
            .collect();
        outer_product(&lanes)
    }

    /// Coordinates of every interior point, in interior row-major order.
    pub fn interior_coords(&self) -> Vec<Vec<f64>> {
        (0..self.interior_len())
            .map(|k| {
                unflatten(&self.interior_shape, k)
                    .iter()
                    .zip(&self.axes)
                    .map(|(&i, g)| g.point(i + 1))
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn flat(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

pub(crate) fn unflatten(shape: &[usize], mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, &n) in idx.iter_mut().zip(shape).rev() {
        *slot = k % n;
        k /= n;
    }
    idx
}

fn outer_product(lanes: &[&[f64]]) -> Vec<f64> {
    lanes.iter().fold(vec![1.0], |acc, lane| {
        acc.iter()
            .flat_map(|&a| lane.iter().map(move |&b| a * b))
            .collect()
    })
}

/// Values on every point of a [`ProductGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFunction {
    grid: Arc<ProductGrid>,
    values: Vec<f64>,
}

impl ProductFunction {
    pub fn new(grid: Arc<ProductGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} values for a product grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(ProductFunction { grid, values })
    }

    pub fn zeros(grid: Arc<ProductGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        ProductFunction { grid, values }
    }

    pub fn from_fn(grid: Arc<ProductGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| f(&grid.coords(&grid.multi_index(k))))
            .collect();
        ProductFunction { grid, values }
    }

    /// Zero on the boundary, `interior` (row-major, interior shape) inside.
    pub fn from_interior(grid: Arc<ProductGrid>, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.interior_len() {
            return Err(Error::Precondition(format!(
                "{} interior values for {} interior points",
                interior.len(),
                grid.interior_len()
            )));
        }
        let mut values = vec![0.0; grid.len()];
        for (k, &v) in interior.iter().enumerate() {
            let idx: Vec<usize> = unflatten(grid.interior_shape(), k)
                .iter()
                .map(|i| i + 1)
                .collect();
            values[grid.flat_index(&idx)] = v;
        }
        Ok(ProductFunction { grid, values })
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flat_index(idx)]
    }

    pub fn interior_values(&self) -> Vec<f64> {
        (0..self.grid.interior_len())
            .map(|k| {
                let idx: Vec<usize> = unflatten(self.grid.interior_shape(), k)
                    .iter()
                    .map(|i| i + 1)
                    .collect();
                self.get(&idx)
            })
            .collect()
    }

    pub fn max_boundary_abs(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&k| self.grid.is_boundary(&self.grid.multi_index(k)))
            .map(|k| self.values[k].abs())
            .fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &ProductFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

/// Weighted inner product over the closed product grid.
pub fn product_inner(u: &ProductFunction, v: &ProductFunction) -> Result<f64> {
    if !u.same_grid(v) {
        return Err(Error::GridMismatch);
    }
    let g = u.grid();
    Ok((0..g.len())
        .map(|k| u.values[k] * v.values[k] * g.weight(&g.multi_index(k)))
        .sum())
}

pub fn product_norm(u: &ProductFunction) -> f64 {
    product_inner(u, u).expect("same grid").sqrt()
}

/// Weighted norm of an interior vector.
pub fn interior_norm(weights: &[f64], x: &[f64]) -> f64 {
    x.iter()
        .zip(weights)
        .map(|(v, w)| v * v * w)
        .sum::<f64>()
        .sqrt()
}

pub fn interior_inner(weights: &[f64], x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(weights)
        .map(|((a, b), w)| a * b * w)
        .sum()
}

/// Applies `lane_map` to every lane of `data` along `axis`. The lane map
/// may change the lane length, so the output shape replaces `shape[axis]`
/// with `out_len`.
pub(crate) fn map_axis(
    data: &[f64],
    shape: &[usize],
    axis: usize,
    out_len: usize,
    mut lane_map: impl FnMut(&[f64], &mut [f64]),
) -> Vec<f64> {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![0.0; outer * out_len * inner];
    let mut lane = vec![0.0; n];
    let mut result = vec![0.0; out_len];
    for o in 0..outer {
        for i in 0..inner {
            for (j, slot) in lane.iter_mut().enumerate() {
                *slot = data[(o * n + j) * inner + i];
            }
            lane_map(&lane, &mut result);
            for (j, &v) in result.iter().enumerate() {
                out[(o * out_len + j) * inner + i] = v;
            }
        }
    }
    out
}

/// The n-dimensional Dirichlet operator `-Δ_T` as a Kronecker sum of
/// one-dimensional operators, acting on interior vectors.
#[derive(Debug, Clone)]
pub struct ProductOperator {
    axes: Vec<DirichletOperator1D>,
    grid: Arc<ProductGrid>,
}

impl ProductOperator {
    pub fn new(grid: Arc<ProductGrid>) -> Result<Self> {
        let axes = grid
            .axes()
            .iter()
            .map(|g| crate::operator::assemble(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductOperator { axes, grid })
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn axes(&self) -> &[DirichletOperator1D] {
        &self.axes
    }

    pub fn apply_interior(&self, x: &[f64]) -> Vec<f64> {
        let shape = self.grid.interior_shape();
        let mut out = vec![0.0; x.len()];
        for (axis, op) in self.axes.iter().enumerate() {
            let part = map_axis(x, shape, axis, shape[axis], |lane, res| {
                res.copy_from_slice(&op.apply_interior(lane));
            });
            out.iter_mut().zip(part).for_each(|(o, p)| *o += p);
        }
        out
    }

    pub fn apply(&self, u: &ProductFunction) -> Result<ProductFunction> {
        if **u.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        let scale = u.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if u.max_boundary_abs() > 1e-12 * scale {
            return Err(Error::Precondition("boundary values must vanish".into()));
        }
        let y = self.apply_interior(&u.interior_values());
        ProductFunction::from_interior(self.grid.clone(), &y)
    }

    /// Diagonal coefficient at an interior multi-index (full-grid indices).
    pub fn diagonal_at(&self, idx: &[usize]) -> f64 {
        idx.iter()
            .zip(&self.axes)
            .map(|(&i, op)| op.diag()[i - 1])
            .sum()
    }

    /// Dense interior matrix; only sensible for small problems.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.grid.interior_len();
        let mut cols = Vec::with_capacity(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            cols.push(self.apply_interior(&e));
            e[j] = 0.0;
        }
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i]).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discrete(points: &[f64]) -> Arc<Grid> {
        Arc::new(Grid::from_points(points.to_vec()).unwrap())
    }

    #[test]
    fn indexing_round_trip() {
        let shape = [3, 4, 5];
        for k in 0..60 {
            assert_eq!(flat(&shape, &unflatten(&shape, k)), k);
        }
        assert_eq!(unflatten(&shape, 7), vec![0, 1, 2]);
    }

    #[test]
    fn coefficient_of_three_axis_example() {
        let g = Arc::new(
            ProductGrid::new(vec![
                discrete(&[0.0, 1.0, 2.0, 3.0]),
                discrete(&[5.0, 7.0, 10.0]),
                discrete(&[4.0, 6.0, 7.0]),
            ])
            .unwrap(),
        );
        let op = ProductOperator::new(g.clone()).unwrap();
        assert!((op.diagonal_at(&[1, 1, 1]) - 34.0 / 9.0).abs() < 1e-12);
        let dense = op.dense();
        assert_eq!(dense.len(), 2);
        assert!((dense[0][1] + 1.0).abs() < 1e-15);
        assert_eq!(
            g.interior_coords(),
            vec![vec![1.0, 7.0, 6.0], vec![2.0, 7.0, 6.0]]
        );
        assert_eq!(g.volume(), 3.0 * 5.0 * 3.0);
    }

    #[test]
    fn two_axis_laplacian_rows() {
        let d = discrete(&[0.0, 1.0, 2.0, 3.0]);
        let g = Arc::new(ProductGrid::new(vec![d.clone(), d]).unwrap());
        let op = ProductOperator::new(g.clone()).unwrap();
        let dense = op.dense();
        // interior order (1,1),(1,2),(2,1),(2,2)
        assert_eq!(dense[0], vec![4.0, -1.0, -1.0, 0.0]);
        assert_eq!(dense[3], vec![0.0, -1.0, -1.0, 4.0]);
        let u = ProductFunction::from_interior(g.clone(), &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(u.get(&[2, 1]), 3.0);
        assert_eq!(u.interior_values(), vec![1.0, 2.0, 3.0, 4.0]);
        let au = op.apply(&u).unwrap();
        assert_eq!(au.get(&[1, 1]), 4.0 - 2.0 - 3.0);
        assert_eq!(g.interior_weights(), vec![1.0; 4]);
    }

    #[test]
    fn map_axis_changes_lane_length() {
        let data: Vec<f64> = (0..6).map(|v| v as f64).collect(); // shape [2,3]
        let summed = map_axis(&data, &[2, 3], 1, 1, |lane, out| out[0] = lane.iter().sum());
        assert_eq!(summed, vec![3.0, 12.0]);
        let summed = map_axis(&data, &[2, 3], 0, 1, |lane, out| out[0] = lane.iter().sum());
        assert_eq!(summed, vec![3.0, 5.0, 7.0]);
    }
}
