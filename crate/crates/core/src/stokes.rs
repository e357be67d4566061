//! Linear Stokes parameters, degree and angle of linear polarization, and
//! 8-bit pseudo-color renders.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::pfa::{Angle, ChannelStack};
use crate::plane::Plane;

/// Default zero-intensity guard for DoLP.
pub const DEFAULT_EPS: f64 = 1e-12;

/// First three Stokes components; S3 is not observable with linear
/// polarizers.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesImage {
    pub s0: Plane,
    pub s1: Plane,
    pub s2: Plane,
}

/// DoLP (dimensionless) and AoLP (radians, `|aolp| <= π/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationView {
    pub dolp: Plane,
    pub aolp: Plane,
}

pub fn stokes_from_stack(stack: &ChannelStack) -> StokesImage {
    let i0 = stack.get(Angle::Deg0);
    let i45 = stack.get(Angle::Deg45);
    let i90 = stack.get(Angle::Deg90);
    let i135 = stack.get(Angle::Deg135);
    let (w, h) = stack.dims();
    let s0 = Plane::from_fn(w, h, |i, j| {
        0.5 * (i0.get(i, j) + i45.get(i, j) + i90.get(i, j) + i135.get(i, j))
    });
    let s1 = i0
        .zip_map(i90, |a, b| a - b)
        .expect("stack planes share dimensions");
    let s2 = i45
        .zip_map(i135, |a, b| a - b)
        .expect("stack planes share dimensions");
    StokesImage { s0, s1, s2 }
}

/// Pixel-level DoLP: zero when `s0 <= eps`.
#[inline]
pub fn dolp_at(s0: f64, s1: f64, s2: f64, eps: f64) -> f64 {
    if s0 <= eps {
        0.0
    } else {
        s1.hypot(s2) / s0
    }
}

/// Pixel-level AoLP, `0.5 * atan2(s2, s1)` in `(-π/2, π/2]`.
#[inline]
pub fn aolp_at(s1: f64, s2: f64) -> f64 {
    0.5 * s2.atan2(s1)
}

pub fn dolp_aolp(st: &StokesImage, eps: f64) -> PolarizationView {
    let (w, h) = st.s0.dims();
    let dolp = Plane::from_fn(w, h, |i, j| {
        dolp_at(st.s0.get(i, j), st.s1.get(i, j), st.s2.get(i, j), eps)
    });
    let aolp = st
        .s1
        .zip_map(&st.s2, aolp_at)
        .expect("stokes planes share dimensions");
    PolarizationView { dolp, aolp }
}

/// Convenience: stack straight to DoLP/AoLP with the default guard.
pub fn polarization_view(stack: &ChannelStack) -> PolarizationView {
    dolp_aolp(&stokes_from_stack(stack), DEFAULT_EPS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colormap {
    /// Embedded 256-entry parula-like gradient.
    Parula,
    /// AoLP hue wheel, saturation and value 1.
    HsvAngle,
    Gray,
}

/// How scalar values reach `[0, 1]` for the parula and gray maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    Clamp01,
    MinMax,
}

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let k = 3 * (row * self.width + col);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }
}

static PARULA_CSV: &str = include_str!("data/parula256.csv");

/// The embedded parula-like table.
pub fn parula_table() -> &'static [[u8; 3]; 256] {
    static TABLE: OnceLock<[[u8; 3]; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[0u8; 3]; 256];
        let rows = PARULA_CSV
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let mut n = 0;
        for (entry, line) in table.iter_mut().zip(rows) {
            for (c, field) in entry.iter_mut().zip(line.split(',')) {
                *c = field.trim().parse().expect("malformed parula table");
            }
            n += 1;
        }
        assert_eq!(n, 256, "parula table must have 256 rows");
        table
    })
}

/// Hue in degrees for an AoLP value. The cycle spans π/2, so the wheel
/// repeats once across the full AoLP range.
pub fn aolp_hue(aolp: f64) -> f64 {
    ((aolp + FRAC_PI_4) / FRAC_PI_2 * 360.0).rem_euclid(360.0)
}

/// HSV to RGB with saturation = value = 1.
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let hp = hue.rem_euclid(360.0) / 60.0;
    let x = 1.0 - (hp % 2.0 - 1.0).abs();
    let (r, g, b) = match hp as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |v: f64| (v * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

pub fn render_pseudocolor(plane: &Plane, map: Colormap, scaling: Scaling) -> RgbImage {
    let (lo, hi) = plane
        .data()
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let unit = |v: f64| match scaling {
        Scaling::Clamp01 => v.clamp(0.0, 1.0),
        Scaling::MinMax if hi > lo => (v - lo) / (hi - lo),
        Scaling::MinMax => 0.0,
    };
    let table = parula_table();
    let data = plane
        .data()
        .par_iter()
        .flat_map_iter(|&v| {
            let rgb = if !v.is_finite() {
                [0, 0, 0]
            } else {
                match map {
                    Colormap::HsvAngle => hue_to_rgb(aolp_hue(v)),
                    Colormap::Parula => table[(unit(v) * 255.0).round() as usize],
                    Colormap::Gray => {
                        let g = (unit(v) * 255.0).round() as u8;
                        [g, g, g]
                    }
                }
            };
            rgb.into_iter()
        })
        .collect();
    RgbImage {
        width: plane.width(),
        height: plane.height(),
        data,
    }
}
