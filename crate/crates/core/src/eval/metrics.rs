//! Full-reference quality metrics on scalar planes.

use crate::error::{Error, Result};
use crate::pfa::ChannelMask;
use crate::plane::Plane;

/// SSIM window edge length.
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Mean of `diff(ref, test)^2` over all pixels.
pub fn mse_by(reference: &Plane, test: &Plane, diff: impl Fn(f64, f64) -> f64) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    let sum: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| {
            let d = diff(a, b);
            d * d
        })
        .sum();
    Ok(sum / reference.data().len() as f64)
}

pub fn mse(reference: &Plane, test: &Plane) -> Result<f64> {
    mse_by(reference, test, |a, b| a - b)
}

/// PSNR from an MSE; `+inf` when the MSE is zero.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// `10 log10(peak² / MSE)` in dB; identical planes give `+inf`.
pub fn psnr(reference: &Plane, test: &Plane, peak: f64) -> Result<f64> {
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "PSNR peak must be positive, got {peak}"
        )));
    }
    Ok(psnr_from_mse(mse(reference, test)?, peak))
}

pub fn rmse(reference: &Plane, test: &Plane) -> Result<f64> {
    Ok(mse(reference, test)?.sqrt())
}

/// RMSE restricted to the pixels selected by `mask`.
pub fn masked_rmse(reference: &Plane, test: &Plane, mask: &ChannelMask) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    if mask.dims() != reference.dims() {
        return Err(Error::DimensionMismatch {
            expected: reference.dims(),
            actual: mask.dims(),
        });
    }
    let (sum, n) = reference
        .data()
        .iter()
        .zip(test.data())
        .zip(mask.grid())
        .filter(|(_, &m)| m != 0)
        .fold((0.0, 0usize), |(s, n), ((&a, &b), _)| {
            (s + (a - b) * (a - b), n + 1)
        });
    if n == 0 {
        return Ok(0.0);
    }
    Ok((sum / n as f64).sqrt())
}

fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut g = [0.0; SSIM_WINDOW];
    for (k, v) in g.iter_mut().enumerate() {
        let x = k as f64 - half;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = g.iter().sum();
    g.map(|v| v / s)
}

/// Valid-region separable Gaussian filtering of `f(x, y)` for all five
/// SSIM moments at once.
fn filtered_moments(x: &Plane, y: &Plane, g: &[f64; SSIM_WINDOW]) -> [Vec<f64>; 5] {
    let (w, h) = x.dims();
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut horiz: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; ow * h]);
    for i in 0..h {
        let (xr, yr) = (x.row(i), y.row(i));
        for j in 0..ow {
            let mut acc = [0.0; 5];
            for (k, &gk) in g.iter().enumerate() {
                let (a, b) = (xr[j + k], yr[j + k]);
                acc[0] += gk * a;
                acc[1] += gk * b;
                acc[2] += gk * a * a;
                acc[3] += gk * b * b;
                acc[4] += gk * a * b;
            }
            for (m, v) in horiz.iter_mut().zip(acc) {
                m[i * ow + j] = v;
            }
        }
    }
    let mut out: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; ow * oh]);
    for (src, dst) in horiz.iter().zip(out.iter_mut()) {
        for i in 0..oh {
            for j in 0..ow {
                let mut acc = 0.0;
                for (k, &gk) in g.iter().enumerate() {
                    acc += gk * src[(i + k) * ow + j];
                }
                dst[i * ow + j] = acc;
            }
        }
    }
    out
}

/// Mean single-scale SSIM over all windows that fit inside the image.
pub fn ssim(reference: &Plane, test: &Plane, dynamic_range: f64) -> Result<f64> {
    reference.ensure_same_dims(test)?;
    let (w, h) = reference.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::InvalidDimensions {
            width: w,
            height: h,
            reason: "SSIM needs at least an 11x11 image",
        });
    }
    let c1 = (SSIM_K1 * dynamic_range).powi(2);
    let c2 = (SSIM_K2 * dynamic_range).powi(2);
    let g = gaussian_taps();
    let [mx, my, mxx, myy, mxy] = filtered_moments(reference, test, &g);
    let n = mx.len();
    let total: f64 = (0..n)
        .map(|k| {
            let (ux, uy) = (mx[k], my[k]);
            let vx = mxx[k] - ux * ux;
            let vy = myy[k] - uy * uy;
            let cxy = mxy[k] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfa::{make_masks, PfaPattern};

    #[test]
    fn psnr_identities() {
        let a = Plane::from_fn(12, 12, |i, j| (i * j) as f64);
        assert_eq!(psnr(&a, &a, 255.0).unwrap(), f64::INFINITY);
        let b = a.map(|v| v + 1.0);
        let p = psnr(&a, &b, 255.0).unwrap();
        assert!((p - 48.1308).abs() < 5e-5);
        assert!((p - 20.0 * 255f64.log10()).abs() < 1e-12);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        assert_eq!(rmse(&a, &b).unwrap(), 1.0);
        assert!(psnr(&a, &b, 0.0).is_err());
        assert!(rmse(&a, &Plane::zeros(12, 13)).is_err());
    }

    #[test]
    fn ssim_identity_and_size_guard() {
        let a = Plane::from_fn(16, 14, |i, j| ((i * 7 + j * 3) % 11) as f64);
        assert!((ssim(&a, &a, 255.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(ssim(&Plane::zeros(10, 20), &Plane::zeros(10, 20), 255.0).is_err());
    }

    #[test]
    fn ssim_constant_offset_closed_form() {
        let l = 255.0;
        let a = Plane::filled(20, 20, 100.0);
        let b = a.map(|v| v + l / 2.0);
        let (ux, uy) = (100.0, 100.0 + l / 2.0);
        let c1 = (0.01 * l) * (0.01 * l);
        let expect = (2.0 * ux * uy + c1) / (ux * ux + uy * uy + c1);
        assert!((ssim(&a, &b, l).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn masked_rmse_counts_only_mask() {
        let p = PfaPattern::default();
        let masks = make_masks(&p, 6, 6);
        let a = Plane::zeros(6, 6);
        let b = Plane::from_fn(6, 6, |i, j| if masks[0].get(i, j) { 0.0 } else { 5.0 });
        assert_eq!(masked_rmse(&a, &b, &masks[0]).unwrap(), 0.0);
        assert_eq!(masked_rmse(&a, &b, &masks[1]).unwrap(), 5.0);
    }
}
