//! Spectra of the product domain from per-axis spectra.
//!
//! Eigenvalues of the n-dimensional operator are sums of per-axis
//! eigenvalues and eigenfunctions are products of per-axis eigenfunctions.
//! The smallest sums are enumerated best-first over the multi-index lattice.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;

use super::Spectrum1D;
use crate::error::{Error, Result};
use crate::product::{map_axis, ProductFunction, ProductGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    /// 1-based mode number per axis.
    pub index: Vec<usize>,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpectrum {
    axes: Vec<Spectrum1D>,
    entries: Vec<TensorEntry>,
    truncated: bool,
}

impl TensorSpectrum {
    pub fn axes(&self) -> &[Spectrum1D] {
        &self.axes
    }

    pub fn entries(&self) -> &[TensorEntry] {
        &self.entries
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eigenvalue).collect()
    }

    /// Set when more entries were requested than the lattice holds.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn product_grid(&self) -> Result<ProductGrid> {
        ProductGrid::new(self.axes.iter().map(|s| s.grid().clone()).collect())
    }

    /// Product eigenfunction of entry `k` on the closed product grid.
    pub fn eigenfunction(&self, grid: Arc<ProductGrid>, k: usize) -> Result<ProductFunction> {
        let index = &self.entries[k].index;
        let values = (0..grid.len())
            .map(|flat| {
                grid.multi_index(flat)
                    .iter()
                    .zip(index)
                    .zip(&self.axes)
                    .map(|((&i, &p), s)| s.eigenfunctions()[p - 1].values()[i])
                    .product()
            })
            .collect();
        ProductFunction::new(grid, values)
    }
}

#[derive(PartialEq)]
struct Candidate {
    eigenvalue: f64,
    index: Vec<usize>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Reversed: BinaryHeap pops the smallest eigenvalue, ties by lexicographic index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .eigenvalue
            .total_cmp(&self.eigenvalue)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn sum_of(axes: &[Spectrum1D], index: &[usize]) -> f64 {
    index
        .iter()
        .zip(axes)
        .map(|(&p, s)| s.eigenvalues()[p - 1])
        .sum()
}

/// The `count` smallest product eigenvalues, multiplicity preserved.
pub fn tensor_spectrum(axes: Vec<Spectrum1D>, count: usize) -> Result<TensorSpectrum> {
    if axes.is_empty() || axes.iter().any(Spectrum1D::is_empty) {
        return Err(Error::Precondition(
            "every axis needs at least one mode".into(),
        ));
    }
    if count == 0 {
        return Err(Error::Precondition(
            "at least one eigenvalue must be requested".into(),
        ));
    }
    let total: usize = axes.iter().map(Spectrum1D::len).product();
    let truncated = count > total;
    let wanted = count.min(total);

    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    let start = vec![1; axes.len()];
    seen.insert(start.clone());
    heap.push(Candidate {
        eigenvalue: sum_of(&axes, &start),
        index: start,
    });
    let mut entries = Vec::with_capacity(wanted);
    while entries.len() < wanted {
        let Some(Candidate { eigenvalue, index }) = heap.pop() else {
            break;
        };
        for axis in 0..axes.len() {
            if index[axis] < axes[axis].len() {
                let mut next = index.clone();
                next[axis] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Candidate {
                        eigenvalue: sum_of(&axes, &next),
                        index: next,
                    });
                }
            }
        }
        entries.push(TensorEntry { index, eigenvalue });
    }
    Ok(TensorSpectrum {
        axes,
        entries,
        truncated,
    })
}

/// Interior coefficient array over all available per-axis modes:
/// `c[p] = ⟨f, Π φ_{p_i}⟩`, computed one axis at a time.
pub(crate) fn forward_transform(
    axes: &[Spectrum1D],
    interior: &[f64],
    shape: &[usize],
) -> Vec<f64> {
    let mut data = interior.to_vec();
    let mut shape = shape.to_vec();
    for (axis, spec) in axes.iter().enumerate() {
        let w = &spec.grid().weights()[1..spec.grid().len() - 1];
        let modes = spec.len();
        data = map_axis(&data, &shape, axis, modes, |lane, out| {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = spec
                    .mode_interior(k)
                    .iter()
                    .zip(lane)
                    .zip(w)
                    .map(|((p, x), wi)| p * x * wi)
                    .sum();
            }
        });
        shape[axis] = modes;
    }
    data
}

/// Inverse of [`forward_transform`]: interior values from coefficients.
pub(crate) fn inverse_transform(
    axes: &[Spectrum1D],
    coeffs: &[f64],
    mode_shape: &[usize],
) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    let mut shape = mode_shape.to_vec();
    for (axis, spec) in axes.iter().enumerate() {
        let n = spec.grid().interior_len();
        data = map_axis(&data, &shape, axis, n, |lane, out| {
            out.iter_mut().for_each(|v| *v = 0.0);
            for (k, &c) in lane.iter().enumerate() {
                for (o, p) in out.iter_mut().zip(spec.mode_interior(k)) {
                    *o += c * p;
                }
            }
        });
        shape[axis] = n;
    }
    data
}

/// Coefficients of `f` against the entries of `spec`, in entry order.
pub fn expand_tensor(spec: &TensorSpectrum, f: &ProductFunction) -> Result<Vec<f64>> {
    let grid = spec.product_grid()?;
    if *f.grid().as_ref() != grid {
        return Err(Error::GridMismatch);
    }
    let mode_shape: Vec<usize> = spec.axes.iter().map(Spectrum1D::len).collect();
    let full = forward_transform(&spec.axes, &f.interior_values(), grid.interior_shape());
    Ok(spec
        .entries
        .iter()
        .map(|e| {
            let zero_based: Vec<usize> = e.index.iter().map(|p| p - 1).collect();
            full[crate::product::flat(&mode_shape, &zero_based)]
        })
        .collect())
}

/// `Σ c_k u_k` over the entries of `spec`.
pub fn reconstruct_tensor(spec: &TensorSpectrum, coeffs: &[f64]) -> Result<ProductFunction> {
    if coeffs.len() != spec.entries.len() {
        return Err(Error::Precondition(format!(
            "{} coefficients for {} entries",
            coeffs.len(),
            spec.entries.len()
        )));
    }
    let grid = Arc::new(spec.product_grid()?);
    let mode_shape: Vec<usize> = spec.axes.iter().map(Spectrum1D::len).collect();
    let mut full = vec![0.0; mode_shape.iter().product()];
    for (e, &c) in spec.entries.iter().zip(coeffs) {
        let zero_based: Vec<usize> = e.index.iter().map(|p| p - 1).collect();
        full[crate::product::flat(&mode_shape, &zero_based)] = c;
    }
    let interior = inverse_transform(&spec.axes, &full, &mode_shape);
    ProductFunction::from_interior(grid, &interior)
}
