//! DoFP simulation: sampling a full four-channel stack through a PFA, and a
//! seeded generator of synthetic polarized scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pfa::{Angle, ChannelStack, MosaicImage, PfaPattern};
use crate::plane::Plane;

/// `M(i, j) = gt[channel_of(i, j)](i, j)`.
pub fn mosaic_from_stack(
    gt: &ChannelStack,
    pattern: PfaPattern,
    bit_depth: u8,
) -> Result<MosaicImage> {
    let (w, h) = gt.dims();
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::InvalidDimensions {
            width: w,
            height: h,
            reason: "stack dimensions must be even",
        });
    }
    let plane = Plane::from_fn(w, h, |i, j| gt.get(pattern.channel_at(i, j)).get(i, j));
    MosaicImage::new(plane, bit_depth, pattern)
}

/// Intensity behind an ideal linear polarizer at `theta`:
/// `0.5 * s0 * (1 + dolp * cos(2 (theta - aolp)))`.
#[inline]
pub fn malus_intensity(s0: f64, dolp: f64, aolp: f64, theta: f64) -> f64 {
    0.5 * s0 * (1.0 + dolp * (2.0 * (theta - aolp)).cos())
}

/// Four-channel stack for constant-per-pixel Stokes fields.
pub fn stack_from_polarization(s0: &Plane, dolp: &Plane, aolp: &Plane) -> Result<ChannelStack> {
    s0.ensure_same_dims(dolp)?;
    s0.ensure_same_dims(aolp)?;
    let (w, h) = s0.dims();
    ChannelStack::new(Angle::ALL.map(|a| {
        let theta = a.radians();
        Plane::from_fn(w, h, |i, j| {
            malus_intensity(s0.get(i, j), dolp.get(i, j), aolp.get(i, j), theta)
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    /// Number of polarized foreground objects.
    pub objects: usize,
    /// Additive Gaussian noise, 8-bit units.
    pub noise_sigma: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            objects: 8,
            noise_sigma: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Rect { r0: f64, c0: f64, r1: f64, c1: f64 },
    Disk { r: f64, c: f64, radius: f64 },
}

impl Shape {
    fn contains(&self, r: f64, c: f64) -> bool {
        match *self {
            Shape::Rect { r0, c0, r1, c1 } => r >= r0 && r < r1 && c >= c0 && c < c1,
            Shape::Disk {
                r: cr,
                c: cc,
                radius,
            } => (r - cr).powi(2) + (c - cc).powi(2) < radius * radius,
        }
    }

    /// Area fraction of pixel `(i, j)` covered, 4×4 supersampled.
    fn coverage(&self, i: usize, j: usize) -> f64 {
        let mut hit = 0;
        for a in 0..4 {
            for b in 0..4 {
                let r = i as f64 + (a as f64 + 0.5) / 4.0;
                let c = j as f64 + (b as f64 + 0.5) / 4.0;
                hit += self.contains(r, c) as u32;
            }
        }
        hit as f64 / 16.0
    }
}

struct Object {
    shape: Shape,
    s0: f64,
    dolp: f64,
    aolp: f64,
}

/// A synthetic polarized scene on an 8-bit scale.
///
/// Smoothly varying background intensity and polarization, overlaid with
/// rectangles and disks of constant intensity, DoLP and AoLP. Edges are
/// anti-aliased and blended in intensity space, then Gaussian noise is
/// added and the result clamped to `[0, 255]`.
pub fn synthetic_scene(seed: u64, params: &SceneParams) -> ChannelStack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (params.width, params.height);
    let (wf, hf) = (w as f64, h as f64);

    let bg_base = rng.random_range(60.0..120.0);
    let bg_gx = rng.random_range(-40.0..40.0);
    let bg_gy = rng.random_range(-40.0..40.0);
    let bg_wave = rng.random_range(5.0..20.0);
    let bg_freq = rng.random_range(1.0..3.0);
    let d_base = rng.random_range(0.05..0.2);
    let d_grad = rng.random_range(0.0..0.2);
    let a_base = rng.random_range(-1.2..1.2);
    let a_grad = rng.random_range(-0.6..0.6);

    let objects: Vec<Object> = (0..params.objects)
        .map(|_| {
            let shape = if rng.random_bool(0.5) {
                let r0 = rng.random_range(0.0..hf * 0.8);
                let c0 = rng.random_range(0.0..wf * 0.8);
                Shape::Rect {
                    r0,
                    c0,
                    r1: r0 + rng.random_range(hf * 0.1..hf * 0.4),
                    c1: c0 + rng.random_range(wf * 0.1..wf * 0.4),
                }
            } else {
                Shape::Disk {
                    r: rng.random_range(0.0..hf),
                    c: rng.random_range(0.0..wf),
                    radius: rng.random_range(wf.min(hf) * 0.05..wf.min(hf) * 0.25),
                }
            };
            Object {
                shape,
                s0: rng.random_range(30.0..220.0),
                dolp: rng.random_range(0.0..0.8),
                aolp: rng.random_range(-1.5..1.5),
            }
        })
        .collect();

    let angles = Angle::ALL.map(Angle::radians);
    let mut planes = Angle::ALL.map(|_| Plane::zeros(w, h));
    for i in 0..h {
        for j in 0..w {
            let (y, x) = (i as f64 / hf, j as f64 / wf);
            let s0 = bg_base
                + bg_gx * x
                + bg_gy * y
                + bg_wave * (std::f64::consts::TAU * bg_freq * (x + 0.5 * y)).sin();
            let d = d_base + d_grad * x;
            let a = a_base + a_grad * y;
            let mut px = angles.map(|t| malus_intensity(s0, d, a, t));
            for obj in &objects {
                let alpha = obj.shape.coverage(i, j);
                if alpha > 0.0 {
                    for (v, &t) in px.iter_mut().zip(&angles) {
                        let inside = malus_intensity(obj.s0, obj.dolp, obj.aolp, t);
                        *v = (1.0 - alpha) * *v + alpha * inside;
                    }
                }
            }
            for (p, v) in planes.iter_mut().zip(px) {
                p.set(i, j, v);
            }
        }
    }

    if params.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, params.noise_sigma).expect("finite sigma");
        for p in planes.iter_mut() {
            for v in p.data_mut() {
                *v += noise.sample(&mut rng);
            }
        }
    }
    for p in planes.iter_mut() {
        for v in p.data_mut() {
            *v = v.clamp(0.0, 255.0);
        }
    }
    ChannelStack::new(planes).expect("synthetic planes are finite and equal-sized")
}
