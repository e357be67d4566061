//! Dense row-major `f64` planes and the mirror-reflection border rule shared
//! by every stencil in the crate.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Whole-sample mirror reflection of `idx` into `0..n`.
///
/// `-k` maps to `k` and `(n - 1) + k` maps to `(n - 1) - k`. Both moves are
/// even offsets, so a reflected pixel keeps its 2-periodic lattice phase.
/// Returns `None` when a single reflection is not enough to land in range.
#[inline]
pub fn reflect_index(idx: isize, n: usize) -> Option<usize> {
    let last = n as isize - 1;
    let r = if idx < 0 {
        -idx
    } else if idx > last {
        2 * last - idx
    } else {
        idx
    };
    (0..=last).contains(&r).then_some(r as usize)
}

/// A full-resolution scalar plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "plane must be non-empty",
            });
        }
        if data.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "sample count does not match width * height",
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Builds a plane by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let mut data = vec![0.0; width * height];
        data.par_chunks_mut(width.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    /// Sample with mirror reflection for indices up to `apron` pixels outside.
    pub fn mirrored(&self, row: isize, col: isize, apron: usize) -> Result<f64> {
        let a = apron as isize;
        let out = Error::OutsideApron { row, col, apron };
        if row < -a
            || col < -a
            || row > self.height as isize - 1 + a
            || col > self.width as isize - 1 + a
        {
            return Err(out);
        }
        match (
            reflect_index(row, self.height),
            reflect_index(col, self.width),
        ) {
            (Some(r), Some(c)) => Ok(self.get(r, c)),
            _ => Err(out),
        }
    }

    pub fn ensure_same_dims(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    /// Elementwise combination of two equally sized planes.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Plane> {
        self.ensure_same_dims(other)?;
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Plane {
            width: self.width,
            height: self.height,
            data,
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.par_iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// First non-finite sample, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|k| (k / self.width, k % self.width))
    }

    /// Copy of the plane with an `apron`-pixel mirror-reflected border.
    pub(crate) fn padded(&self, apron: usize) -> Padded {
        let stride = self.width + 2 * apron;
        let rows = self.height + 2 * apron;
        let mut data = vec![0.0; stride * rows];
        for pi in 0..rows {
            let r = reflect_index(pi as isize - apron as isize, self.height)
                .expect("apron larger than plane");
            let src = self.row(r);
            let dst = &mut data[pi * stride..(pi + 1) * stride];
            for (pj, d) in dst.iter_mut().enumerate() {
                let c = reflect_index(pj as isize - apron as isize, self.width)
                    .expect("apron larger than plane");
                *d = src[c];
            }
        }
        Padded {
            stride,
            apron,
            data,
        }
    }
}

/// Mirror-padded copy of a plane, addressed in the original coordinates via
/// a flat offset. Used by the stencil kernels for branch-free tap access.
pub(crate) struct Padded {
    pub stride: usize,
    pub apron: usize,
    pub data: Vec<f64>,
}

impl Padded {
    /// Flat index of original pixel `(row, col)`.
    #[inline(always)]
    pub fn index(&self, row: usize, col: usize) -> usize {
        (row + self.apron) * self.stride + col + self.apron
    }
}
