//! End-to-end demosaicking: the edge-aware pipeline in its lightweight
//! (`Lepd`) and calibrated (`Leic`) forms, plus per-channel baselines.

use std::fmt;
use std::str::FromStr;

use crate::dle::{estimate_hv_planes, estimate_orth_plane, EdgeWeightParams, HvPlanes, OrthPlane};
use crate::error::{Error, Result};
use crate::iccc::{bilinear_fill, calibrate, GlobalWeights, SparsePlane};
use crate::pfa::{Angle, ChannelStack, MosaicImage};
use crate::plane::{reflect_index, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lepd,
    Leic,
    Nn,
    Bi,
    Bcb,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Nn,
        Method::Bi,
        Method::Bcb,
        Method::Lepd,
        Method::Leic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lepd => "lepd",
            Method::Leic => "leic",
            Method::Nn => "nn",
            Method::Bi => "bi",
            Method::Bcb => "bcb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lepd" => Ok(Method::Lepd),
            "leic" => Ok(Method::Leic),
            "nn" => Ok(Method::Nn),
            "bi" | "bilinear" => Ok(Method::Bi),
            "bcb" | "bicubic" => Ok(Method::Bcb),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Single-channel interpolators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Nn,
    Bi,
    Bcb,
}

/// A method together with exactly the parameters it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Lepd(EdgeWeightParams),
    Leic(EdgeWeightParams, GlobalWeights),
    Baseline(Baseline),
}

impl MethodSpec {
    /// The method with default parameters.
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Lepd => MethodSpec::Lepd(EdgeWeightParams::default()),
            Method::Leic => MethodSpec::Leic(EdgeWeightParams::default(), GlobalWeights::default()),
            Method::Nn => MethodSpec::Baseline(Baseline::Nn),
            Method::Bi => MethodSpec::Baseline(Baseline::Bi),
            Method::Bcb => MethodSpec::Baseline(Baseline::Bcb),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            MethodSpec::Lepd(_) => Method::Lepd,
            MethodSpec::Leic(..) => Method::Leic,
            MethodSpec::Baseline(Baseline::Nn) => Method::Nn,
            MethodSpec::Baseline(Baseline::Bi) => Method::Bi,
            MethodSpec::Baseline(Baseline::Bcb) => Method::Bcb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MethodSpec::Lepd(p) => p.validate(),
            MethodSpec::Leic(p, w) => {
                p.validate()?;
                GlobalWeights::new(w.w_hv(), w.w_orth()).map(|_| ())
            }
            MethodSpec::Baseline(_) => Ok(()),
        }
    }
}

/// Routes the mosaic and the three estimate planes into four channel planes.
pub fn assemble_stack(img: &MosaicImage, orth: &OrthPlane, hv: &HvPlanes) -> Result<ChannelStack> {
    let dims = img.plane().dims();
    for p in [orth.plane(), &hv.horizontal, &hv.vertical] {
        if p.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: p.dims(),
            });
        }
    }
    let pattern = img.pattern();
    let (w, h) = dims;
    let planes = Angle::ALL.map(|a| {
        Plane::from_fn(w, h, |i, j| {
            let (si, sj) = (i as isize, j as isize);
            let own = pattern.channel_at(i, j);
            if a == own {
                img.get(i, j)
            } else if a == own.orthogonal() {
                orth.plane().get(i, j)
            } else if a == pattern.channel_of(si, sj + 1) {
                hv.horizontal.get(i, j)
            } else {
                hv.vertical.get(i, j)
            }
        })
    });
    ChannelStack::new(planes)
}

/// Lightweight pipeline: orthogonal plane, then horizontal/vertical planes.
pub fn lepd(img: &MosaicImage, params: &EdgeWeightParams) -> Result<ChannelStack> {
    let orth = estimate_orth_plane(img, params)?;
    let hv = estimate_hv_planes(img, &orth, params)?;
    assemble_stack(img, &orth, &hv)
}

/// Full pipeline: `lepd` followed by inter-channel calibration.
pub fn leic(
    img: &MosaicImage,
    params: &EdgeWeightParams,
    weights: &GlobalWeights,
) -> Result<ChannelStack> {
    let initial = lepd(img, params)?;
    calibrate(&initial, img, weights)
}

pub fn demosaic(img: &MosaicImage, spec: &MethodSpec) -> Result<ChannelStack> {
    spec.validate()?;
    match spec {
        MethodSpec::Lepd(p) => lepd(img, p),
        MethodSpec::Leic(p, w) => leic(img, p, w),
        MethodSpec::Baseline(b) => {
            let planes =
                Angle::ALL.map(|a| baseline_interpolate(&SparsePlane::from_mosaic(img, a), *b));
            ChannelStack::new(planes)
        }
    }
}

/// Interpolates one sparse channel on its own.
pub fn baseline_interpolate(sparse: &SparsePlane, method: Baseline) -> Plane {
    match method {
        Baseline::Nn => nearest(sparse),
        Baseline::Bi => bilinear_fill(sparse),
        Baseline::Bcb => bicubic(sparse),
    }
}

/// Nearest lattice sample; ties go to the smaller row, then smaller column.
fn nearest(sparse: &SparsePlane) -> Plane {
    let src = sparse.plane();
    let (w, h) = src.dims();
    let (pr, pc) = sparse.phase();
    let pick = |idx: usize, phase: usize| {
        if idx & 1 == phase {
            idx
        } else if idx >= 1 {
            idx - 1
        } else {
            idx + 1
        }
    };
    Plane::from_fn(w, h, |i, j| src.get(pick(i, pr), pick(j, pc)))
}

/// Catmull-Rom weights at the midpoint between two lattice samples.
const CUBIC_MID: [f64; 4] = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];

/// Separable Catmull-Rom on the stride-2 lattice, mirror padded.
fn bicubic(sparse: &SparsePlane) -> Plane {
    let src = sparse.plane();
    let (w, h) = src.dims();
    let (pr, pc) = sparse.phase();
    let cubic = |get: &dyn Fn(usize) -> f64, idx: usize, n: usize| -> f64 {
        let at = |off: isize| get(reflect_index(idx as isize + off, n).expect("plane too small"));
        CUBIC_MID[0] * at(-3) + CUBIC_MID[1] * at(-1) + CUBIC_MID[2] * at(1) + CUBIC_MID[3] * at(3)
    };
    // Pass 1: complete the lattice rows.
    let rows = Plane::from_fn(w, h, |i, j| {
        if i & 1 != pr {
            0.0
        } else if j & 1 == pc {
            src.get(i, j)
        } else {
            cubic(&|c| src.get(i, c), j, w)
        }
    });
    // Pass 2: fill the remaining rows column-wise.
    Plane::from_fn(w, h, |i, j| {
        if i & 1 == pr {
            rows.get(i, j)
        } else {
            cubic(&|r| rows.get(r, j), i, h)
        }
    })
}
