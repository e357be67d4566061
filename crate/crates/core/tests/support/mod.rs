#![allow(dead_code)]

pub mod oracle;

use polardm::{MosaicImage, PfaPattern, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random 8-bit mosaic with the given pattern.
pub fn random_mosaic(seed: u64, w: usize, h: usize, pattern: PfaPattern) -> MosaicImage {
    let mut r = rng(seed);
    let data = (0..w * h).map(|_| r.random_range(0.0..255.0)).collect();
    MosaicImage::new(Plane::new(w, h, data).unwrap(), 8, pattern).unwrap()
}

/// Piecewise-smooth mosaic: a few random edges over a ramp, so the edge
/// weights actually swing between directions.
pub fn edgy_mosaic(seed: u64, w: usize, h: usize, pattern: PfaPattern) -> MosaicImage {
    let mut r = rng(seed);
    let (a, b, c): (f64, f64, f64) = (
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(0.0..1.0),
    );
    let jump: f64 = r.random_range(20.0..120.0);
    let gain: [f64; 4] = std::array::from_fn(|_| r.random_range(0.6..1.0));
    let plane = Plane::from_fn(w, h, |i, j| {
        let (x, y) = (j as f64 / w as f64, i as f64 / h as f64);
        let side = if a * x + b * y > c * 0.5 { jump } else { 0.0 };
        let idx = pattern.channel_at(i, j).index();
        (gain[idx] * (60.0 + 80.0 * x + side)).clamp(0.0, 255.0)
    });
    MosaicImage::new(plane, 8, pattern).unwrap()
}

/// Every valid tile: 4 phases of the default layout and the transposed one.
pub fn all_patterns() -> Vec<PfaPattern> {
    let base = PfaPattern::default();
    let t = base.tile();
    let transposed = PfaPattern::new([[t[0][0], t[1][0]], [t[0][1], t[1][1]]]).unwrap();
    let mut out = Vec::new();
    for p in [base, transposed] {
        for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            out.push(p.shifted(dr, dc));
        }
    }
    out
}
