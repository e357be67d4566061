//! Calibration with inter-channel correlation.
//!
//! For a target channel `x`, every other estimate `I_c` is compared with the
//! raw mosaic at the pixels that sample `x`. The sparse differences are
//! filled in bilinearly, added back onto `I_c`, and the three corrected
//! planes are fused with fixed global weights.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pfa::{make_masks, Angle, ChannelMask, ChannelStack, MosaicImage, PfaPattern};
use crate::plane::Plane;

/// A plane that is nonzero only on one channel's lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePlane {
    plane: Plane,
    angle: Angle,
    phase: (usize, usize),
}

impl SparsePlane {
    /// `plane ⊙ mask`, keeping the lattice phase for later interpolation.
    pub fn from_masked(plane: &Plane, mask: &ChannelMask, pattern: &PfaPattern) -> Result<Self> {
        Ok(Self {
            plane: mask.apply(plane)?,
            angle: mask.angle(),
            phase: pattern.phase_of(mask.angle()),
        })
    }

    /// The raw samples of one channel, zero elsewhere.
    pub fn from_mosaic(img: &MosaicImage, angle: Angle) -> Self {
        let pattern = img.pattern();
        let plane = Plane::from_fn(img.width(), img.height(), |i, j| {
            if pattern.channel_at(i, j) == angle {
                img.get(i, j)
            } else {
                0.0
            }
        });
        Self {
            plane,
            angle,
            phase: pattern.phase_of(angle),
        }
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// `(row, col)` parity of the populated lattice.
    pub fn phase(&self) -> (usize, usize) {
        self.phase
    }

    #[inline]
    pub fn on_lattice(&self, row: usize, col: usize) -> bool {
        (row & 1) == self.phase.0 && (col & 1) == self.phase.1
    }
}

/// A dense interpolated difference `I_x - I_c` in the frame of target `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencePlane {
    pub plane: Plane,
    pub source: Angle,
    pub target: Angle,
}

/// Relative weight of the two non-orthogonal and the orthogonal correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalWeights {
    w_hv: f64,
    w_orth: f64,
}

impl Default for GlobalWeights {
    fn default() -> Self {
        default_global_weights()
    }
}

impl GlobalWeights {
    /// Requires `2 * w_hv + w_orth == 1` and `w_hv > w_orth > 0`.
    pub fn new(w_hv: f64, w_orth: f64) -> Result<Self> {
        if (2.0 * w_hv + w_orth - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "global weights must satisfy 2*w_hv + w_orth = 1, got {w_hv}, {w_orth}"
            )));
        }
        if !(w_hv > w_orth && w_orth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "global weights must satisfy w_hv > w_orth > 0, got {w_hv}, {w_orth}"
            )));
        }
        Ok(Self { w_hv, w_orth })
    }

    /// Builds the pair from `w_hv` alone, `w_orth = 1 - 2 * w_hv`.
    pub fn from_hv(w_hv: f64) -> Result<Self> {
        Self::new(w_hv, 1.0 - 2.0 * w_hv)
    }

    pub fn w_hv(&self) -> f64 {
        self.w_hv
    }

    pub fn w_orth(&self) -> f64 {
        self.w_orth
    }
}

/// `w_hv = √2 / (1 + 2√2)`, `w_orth = 1 / (1 + 2√2)`.
pub fn default_global_weights() -> GlobalWeights {
    let denom = 1.0 + 2.0 * std::f64::consts::SQRT_2;
    GlobalWeights {
        w_hv: std::f64::consts::SQRT_2 / denom,
        w_orth: 1.0 / denom,
    }
}

/// `(M - I_c)` on the lattice of `mask`, zero elsewhere.
pub fn sparse_difference(
    img: &MosaicImage,
    estimate: &Plane,
    source: Angle,
    mask: &ChannelMask,
) -> Result<SparsePlane> {
    if source == mask.angle() {
        return Err(Error::InvalidParameter(format!(
            "source and target channel are both {source}"
        )));
    }
    let diff = img.plane().zip_map(estimate, |m, e| m - e)?;
    SparsePlane::from_masked(&diff, mask, &img.pattern())
}

/// Convolution with `[[1,2,1],[2,4,2],[1,2,1]] / 4` under mirror padding.
///
/// Only lattice taps are nonzero, so each output pixel reduces to one of
/// four cases by parity; lattice pixels are returned unchanged.
pub fn bilinear_fill(sparse: &SparsePlane) -> Plane {
    let src = sparse.plane();
    let (w, h) = src.dims();
    let pad = src.padded(1);
    let x = &pad.data;
    let s = pad.stride;
    let (pr, pc) = sparse.phase;

    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        let base = pad.index(i, 0);
        let on_row = (i & 1) == pr;
        for (j, o) in row.iter_mut().enumerate() {
            let q = base + j;
            let on_col = (j & 1) == pc;
            *o = match (on_row, on_col) {
                (true, true) => x[q],
                (true, false) => 0.5 * (x[q - 1] + x[q + 1]),
                (false, true) => 0.5 * (x[q - s] + x[q + s]),
                (false, false) => {
                    0.25 * (x[q - s - 1] + x[q - s + 1] + x[q + s - 1] + x[q + s + 1])
                }
            };
        }
    });
    Plane::new(w, h, out).expect("dimensions preserved")
}

/// Dense difference plane between target `mask.angle()` and `source`.
pub fn difference_plane(
    img: &MosaicImage,
    estimate: &Plane,
    source: Angle,
    mask: &ChannelMask,
) -> Result<DifferencePlane> {
    let sparse = sparse_difference(img, estimate, source, mask)?;
    Ok(DifferencePlane {
        plane: bilinear_fill(&sparse),
        source,
        target: mask.angle(),
    })
}

/// Calibrated plane for channel `target` from the stage-two estimates.
pub fn calibrate_channel(
    target: Angle,
    estimates: &ChannelStack,
    img: &MosaicImage,
    weights: &GlobalWeights,
) -> Result<Plane> {
    if estimates.dims() != img.plane().dims() {
        return Err(Error::DimensionMismatch {
            expected: img.plane().dims(),
            actual: estimates.dims(),
        });
    }
    let masks = make_masks(&img.pattern(), img.width(), img.height());
    calibrate_with_masks(target, estimates, img, weights, &masks[target.index()])
}

fn calibrate_with_masks(
    target: Angle,
    estimates: &ChannelStack,
    img: &MosaicImage,
    weights: &GlobalWeights,
    mask: &ChannelMask,
) -> Result<Plane> {
    let orth = target.orthogonal();
    let mut acc: Option<Plane> = None;
    for source in Angle::ALL.into_iter().filter(|&c| c != target) {
        let est = estimates.get(source);
        let diff = difference_plane(img, est, source, mask)?;
        let w = if source == orth {
            weights.w_orth
        } else {
            weights.w_hv
        };
        let term = est.zip_map(&diff.plane, |e, d| w * (e + d))?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.zip_map(&term, |a, t| a + t)?,
        });
    }
    Ok(acc.expect("three source channels"))
}

/// Calibrates all four channels from the same stage-two stack.
pub fn calibrate(
    estimates: &ChannelStack,
    img: &MosaicImage,
    weights: &GlobalWeights,
) -> Result<ChannelStack> {
    if estimates.dims() != img.plane().dims() {
        return Err(Error::DimensionMismatch {
            expected: img.plane().dims(),
            actual: estimates.dims(),
        });
    }
    let masks = make_masks(&img.pattern(), img.width(), img.height());
    let planes: Vec<Plane> = Angle::ALL
        .par_iter()
        .map(|&x| calibrate_with_masks(x, estimates, img, weights, &masks[x.index()]))
        .collect::<Result<_>>()?;
    let planes: [Plane; 4] = planes.try_into().expect("four channels");
    ChannelStack::new(planes)
}
