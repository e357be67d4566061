//! Low-cost edge-aware directional interpolation.
//!
//! Stage one estimates, at every pixel, the channel orthogonal to the one
//! the pixel samples, from its diagonal and anti-diagonal neighbors.
//! Stage two estimates the two remaining channels from the mosaic, the
//! orthogonal plane, and the gradients of the orthogonal difference map.
//! Both stages blend two gradient-corrected directional means with weights
//! that sum to one.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pfa::{MosaicImage, APRON};
use crate::plane::Plane;

/// `|k * delta_v|` beyond this saturates the logistic weight.
const LOGISTIC_CLAMP: f64 = 700.0;

/// How the direction weight is derived from the variation difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecisionRule {
    /// Continuous logistic weight (the default).
    Logistic,
    /// Three-level classifier with dead zone `threshold`; ablation only.
    Ternary { threshold: f64 },
}

/// Which dynamic range feeds the logistic steepness `k = k0 * DR / 255`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangeMode {
    /// `max - min` of the mosaic samples, native units.
    #[default]
    SampleRange,
    /// Full container range `2^bit_depth - 1`, native units.
    BitDepth,
    /// Sample range with the mosaic first rescaled to an 8-bit scale.
    SampleRangeAt8Bit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeightParams {
    /// Logistic steepness at a dynamic range of 255.
    pub k0: f64,
    pub rule: DecisionRule,
    pub range: RangeMode,
}

impl Default for EdgeWeightParams {
    fn default() -> Self {
        Self {
            k0: 1.0,
            rule: DecisionRule::Logistic,
            range: RangeMode::SampleRange,
        }
    }
}

impl EdgeWeightParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k0.is_finite() && self.k0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "k0 must be positive and finite, got {}",
                self.k0
            )));
        }
        if let DecisionRule::Ternary { threshold } = self.rule {
            if !(threshold.is_finite() && threshold >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "ternary threshold must be >= 0, got {threshold}"
                )));
            }
        }
        Ok(())
    }

    /// Logistic steepness `k` for this mosaic.
    pub fn steepness(&self, img: &MosaicImage) -> f64 {
        let dr = dynamic_range(img);
        match self.range {
            RangeMode::SampleRange => self.k0 * dr / 255.0,
            RangeMode::BitDepth => self.k0 * img.max_value() / 255.0,
            RangeMode::SampleRangeAt8Bit => {
                // Both DR and the variations it multiplies scale by s.
                let s = 255.0 / img.max_value();
                self.k0 * dr * s * s / 255.0
            }
        }
    }

    /// Resolves the parameters against a mosaic.
    pub fn resolve(&self, img: &MosaicImage) -> Result<EdgeWeights> {
        self.validate()?;
        Ok(EdgeWeights {
            k: self.steepness(img),
            rule: self.rule,
        })
    }
}

/// Direction weighting with the steepness already fixed for one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeights {
    pub k: f64,
    pub rule: DecisionRule,
}

impl EdgeWeights {
    /// Weight of the first direction given `delta_v = v_first - v_second`.
    /// The second direction gets `1 - weight`.
    #[inline]
    pub fn weight(&self, delta_v: f64) -> f64 {
        match self.rule {
            DecisionRule::Logistic => logistic_weight(delta_v, self.k),
            // The classifier is oriented so that, like the logistic rule,
            // the smoother direction gets the full weight.
            DecisionRule::Ternary { threshold } => ternary_weight(-delta_v, threshold),
        }
    }
}

/// `max - min` over the mosaic samples.
pub fn dynamic_range(img: &MosaicImage) -> f64 {
    let (lo, hi) = img.plane().min_max();
    hi - lo
}

/// `1 / (1 + e^(k * delta_v))`, saturating instead of overflowing.
#[inline]
pub fn logistic_weight(delta_v: f64, k: f64) -> f64 {
    let x = (k * delta_v).clamp(-LOGISTIC_CLAMP, LOGISTIC_CLAMP);
    1.0 / (1.0 + x.exp())
}

/// Three-level classifier: 0 below `-t`, 1 above `t`, 0.5 in between.
#[inline]
pub fn ternary_weight(delta_v: f64, t: f64) -> f64 {
    if delta_v < -t {
        0.0
    } else if delta_v > t {
        1.0
    } else {
        0.5
    }
}

/// Local variations `(v_d, v_a)` along the diagonal and anti-diagonal.
pub fn diagonal_variations(img: &MosaicImage, row: usize, col: usize) -> Result<(f64, f64)> {
    let (i, j) = (row as isize, col as isize);
    let m = |di: isize, dj: isize| img.padded_sample(i + di, j + dj);
    let c = m(0, 0)?;
    let grad_d = (m(1, 1)? - m(-1, -1)?) / (2.0 * SQRT_2);
    let curv_d = (m(2, 2)? + m(-2, -2)? - 2.0 * c) / 8.0;
    let grad_a = (m(-1, 1)? - m(1, -1)?) / (2.0 * SQRT_2);
    let curv_a = (m(-2, 2)? + m(2, -2)? - 2.0 * c) / 8.0;
    Ok((
        grad_d.abs() + (2.0 * SQRT_2 * curv_d).abs(),
        grad_a.abs() + (2.0 * SQRT_2 * curv_a).abs(),
    ))
}

/// Horizontal and vertical variations `(v_h, v_v)` of a difference plane.
pub fn hv_variations(delta: &Plane, row: usize, col: usize) -> Result<(f64, f64)> {
    let (i, j) = (row as isize, col as isize);
    let d = |di: isize, dj: isize| delta.mirrored(i + di, j + dj, APRON);
    let c = d(0, 0)?;
    let grad_h = (d(0, 1)? - d(0, -1)?) / 2.0;
    let curv_h = (d(0, 2)? + d(0, -2)? - 2.0 * c) / 4.0;
    let grad_v = (d(1, 0)? - d(-1, 0)?) / 2.0;
    let curv_v = (d(2, 0)? + d(-2, 0)? - 2.0 * c) / 4.0;
    Ok((
        grad_h.abs() + (2.0 * curv_h).abs(),
        grad_v.abs() + (2.0 * curv_v).abs(),
    ))
}

/// Per-pixel estimate of the channel orthogonal to each pixel's own channel.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthPlane(Plane);

impl OrthPlane {
    /// Wraps an externally computed plane, e.g. an exact ground truth.
    pub fn from_plane(plane: Plane) -> Self {
        Self(plane)
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }
}

/// Estimates of the channels found at each pixel's horizontal and vertical
/// neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct HvPlanes {
    pub horizontal: Plane,
    pub vertical: Plane,
}

pub fn estimate_orth_plane(img: &MosaicImage, params: &EdgeWeightParams) -> Result<OrthPlane> {
    let weights = params.resolve(img)?;
    let (w, h) = (img.width(), img.height());
    let pad = img.plane().padded(APRON);
    let x = &pad.data;
    let s = pad.stride;
    let (d1, a1) = (s + 1, s - 1);

    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        let base = pad.index(i, 0);
        for (j, o) in row.iter_mut().enumerate() {
            let p = base + j;
            let c = x[p];
            let (dn, dp) = (x[p - d1], x[p + d1]);
            let (an, ap) = (x[p - a1], x[p + a1]);
            let grad_d = (dp - dn) / (2.0 * SQRT_2);
            let curv_d = (x[p + 2 * d1] + x[p - 2 * d1] - 2.0 * c) / 8.0;
            let grad_a = (an - ap) / (2.0 * SQRT_2);
            let curv_a = (x[p - 2 * a1] + x[p + 2 * a1] - 2.0 * c) / 8.0;
            let v_d = grad_d.abs() + (2.0 * SQRT_2 * curv_d).abs();
            let v_a = grad_a.abs() + (2.0 * SQRT_2 * curv_a).abs();
            let w_d = weights.weight(v_d - v_a);
            let w_a = 1.0 - w_d;
            *o = w_d * (0.5 * (dp + dn) - curv_d) + w_a * (0.5 * (ap + an) - curv_a);
        }
    });
    Ok(OrthPlane(Plane::new(w, h, out)?))
}

/// `M - I_orth`, elementwise.
pub fn orth_difference_map(img: &MosaicImage, orth: &OrthPlane) -> Result<Plane> {
    img.plane().zip_map(orth.plane(), |m, o| m - o)
}

pub fn estimate_hv_planes(
    img: &MosaicImage,
    orth: &OrthPlane,
    params: &EdgeWeightParams,
) -> Result<HvPlanes> {
    let weights = params.resolve(img)?;
    let delta = orth_difference_map(img, orth)?;
    let (w, h) = (img.width(), img.height());

    let pm = img.plane().padded(APRON);
    let po = orth.plane().padded(APRON);
    let pd = delta.padded(APRON);
    let (m, o, d) = (&pm.data, &po.data, &pd.data);
    let s = pm.stride;

    let mut hor = vec![0.0; w * h];
    let mut ver = vec![0.0; w * h];
    hor.par_chunks_mut(w)
        .zip(ver.par_chunks_mut(w))
        .enumerate()
        .for_each(|(i, (hrow, vrow))| {
            let base = pm.index(i, 0);
            for j in 0..w {
                let p = base + j;
                let dc = d[p];
                let grad_h = (d[p + 1] - d[p - 1]) / 2.0;
                let curv_h = (d[p + 2] + d[p - 2] - 2.0 * dc) / 4.0;
                let grad_v = (d[p + s] - d[p - s]) / 2.0;
                let curv_v = (d[p + 2 * s] + d[p - 2 * s] - 2.0 * dc) / 4.0;
                let v_h = grad_h.abs() + (2.0 * curv_h).abs();
                let v_v = grad_v.abs() + (2.0 * curv_v).abs();
                let w_h = weights.weight(v_h - v_v);
                let w_v = 1.0 - w_h;

                let mc = m[p];
                let m_curv_h = (m[p + 2] + m[p - 2] - 2.0 * mc) / 4.0;
                let m_curv_v = (m[p + 2 * s] + m[p - 2 * s] - 2.0 * mc) / 4.0;
                let h_along_h = 0.5 * (m[p + 1] + m[p - 1]);
                let h_along_v = 0.5 * (o[p + s] + o[p - s]);
                let v_along_h = 0.5 * (o[p + 1] + o[p - 1]);
                let v_along_v = 0.5 * (m[p + s] + m[p - s]);
                hrow[j] = w_h * (h_along_h - m_curv_h) + w_v * (h_along_v - m_curv_v);
                vrow[j] = w_h * (v_along_h - m_curv_h) + w_v * (v_along_v - m_curv_v);
            }
        });
    Ok(HvPlanes {
        horizontal: Plane::new(w, h, hor)?,
        vertical: Plane::new(w, h, ver)?,
    })
}
