//! Per-quantity evaluation of a demosaicked stack against ground truth, and
//! the two report serializations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pfa::{Angle, ChannelStack};
use crate::plane::Plane;
use crate::stokes::{dolp_aolp, stokes_from_stack, DEFAULT_EPS};

use super::metrics::{mse_by, psnr_from_mse, ssim};

/// Peak and SSIM range of the 0–255 intensity scale.
pub const INTENSITY_PEAK: f64 = 255.0;
pub const DOLP_PEAK: f64 = 1.0;
pub const AOLP_PEAK: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    I0,
    I45,
    I90,
    I135,
    S0,
    Dolp,
    Aolp,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::I0,
        Quantity::I45,
        Quantity::I90,
        Quantity::I135,
        Quantity::S0,
        Quantity::Dolp,
        Quantity::Aolp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::I0 => "I0",
            Quantity::I45 => "I45",
            Quantity::I90 => "I90",
            Quantity::I135 => "I135",
            Quantity::S0 => "S0",
            Quantity::Dolp => "DoLP",
            Quantity::Aolp => "AoLP",
        }
    }

    pub fn channel(angle: Angle) -> Self {
        Quantity::ALL[angle.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityMetrics {
    /// dB; `+inf` for identical planes.
    pub psnr: f64,
    pub rmse: f64,
    pub ssim: f64,
}

impl QualityMetrics {
    pub fn identical(&self) -> bool {
        self.psnr.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Bit depth of the ground truth; `2^b - 1` maps to 255.
    pub bit_depth: u8,
    /// Use `min(|δ|, π - |δ|)` as the AoLP error instead of the raw difference.
    pub aolp_wrap: bool,
    pub eps: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            bit_depth: 8,
            aolp_wrap: false,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub width: usize,
    pub height: usize,
    /// Indexed like `Quantity::ALL`.
    pub metrics: [QualityMetrics; 7],
    pub timing: Option<Timing>,
}

impl EvalReport {
    pub fn get(&self, q: Quantity) -> &QualityMetrics {
        &self.metrics[Quantity::ALL
            .iter()
            .position(|&x| x == q)
            .expect("known quantity")]
    }

    /// Key/value text, one metric per line. The output is valid TOML.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method = {:?}", self.method);
        let _ = writeln!(s, "width = {}", self.width);
        let _ = writeln!(s, "height = {}", self.height);
        if let Some(t) = self.timing {
            let _ = writeln!(s, "threads = {}", t.threads);
            let _ = writeln!(s, "seconds = {:?}", t.seconds);
        }
        for (q, m) in Quantity::ALL.iter().zip(&self.metrics) {
            let l = q.label();
            let _ = writeln!(s, "{l}.psnr_db = {:?}", m.psnr);
            let _ = writeln!(s, "{l}.rmse = {:?}", m.rmse);
            let _ = writeln!(s, "{l}.ssim = {:?}", m.ssim);
            let _ = writeln!(s, "{l}.identical = {}", m.identical());
        }
        s
    }

    /// Comma-separated table with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,quantity,psnr_db,rmse,ssim\n");
        for (q, m) in Quantity::ALL.iter().zip(&self.metrics) {
            let _ = writeln!(
                s,
                "{},{},{:?},{:?},{:?}",
                self.method,
                q.label(),
                m.psnr,
                m.rmse,
                m.ssim
            );
        }
        s
    }
}

fn metrics_for(
    reference: &Plane,
    test: &Plane,
    peak: f64,
    diff: impl Fn(f64, f64) -> f64,
) -> Result<QualityMetrics> {
    let mse = mse_by(reference, test, diff)?;
    Ok(QualityMetrics {
        psnr: psnr_from_mse(mse, peak),
        rmse: mse.sqrt(),
        ssim: ssim(reference, test, peak)?,
    })
}

/// Wrap-aware AoLP error `min(|δ|, π - |δ|)` for angles of period π.
#[inline]
pub fn wrapped_aolp_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(PI);
    d.min(PI - d)
}

pub fn evaluate(gt: &ChannelStack, out: &ChannelStack, config: &EvalConfig) -> Result<EvalReport> {
    if gt.dims() != out.dims() {
        return Err(Error::DimensionMismatch {
            expected: gt.dims(),
            actual: out.dims(),
        });
    }
    if !(1..=16).contains(&config.bit_depth) {
        return Err(Error::InvalidBitDepth(config.bit_depth));
    }
    let scale = INTENSITY_PEAK / ((1u32 << config.bit_depth) - 1) as f64;
    let (gt, out) = if scale == 1.0 {
        (gt.clone(), out.clone())
    } else {
        (gt.map(|v| v * scale), out.map(|v| v * scale))
    };

    let sub = |a: f64, b: f64| a - b;
    let mut metrics = Vec::with_capacity(7);
    for a in Angle::ALL {
        metrics.push(metrics_for(gt.get(a), out.get(a), INTENSITY_PEAK, sub)?);
    }
    let (st_gt, st_out) = (stokes_from_stack(&gt), stokes_from_stack(&out));
    metrics.push(metrics_for(&st_gt.s0, &st_out.s0, INTENSITY_PEAK, sub)?);
    let (pv_gt, pv_out) = (
        dolp_aolp(&st_gt, config.eps),
        dolp_aolp(&st_out, config.eps),
    );
    metrics.push(metrics_for(&pv_gt.dolp, &pv_out.dolp, DOLP_PEAK, sub)?);
    metrics.push(if config.aolp_wrap {
        metrics_for(&pv_gt.aolp, &pv_out.aolp, AOLP_PEAK, wrapped_aolp_diff)?
    } else {
        metrics_for(&pv_gt.aolp, &pv_out.aolp, AOLP_PEAK, sub)?
    });

    Ok(EvalReport {
        method: String::new(),
        width: gt.width(),
        height: gt.height(),
        metrics: metrics.try_into().expect("seven quantities"),
        timing: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::simulate::{synthetic_scene, SceneParams};

    fn scene() -> ChannelStack {
        synthetic_scene(
            1,
            &SceneParams {
                width: 24,
                height: 24,
                ..Default::default()
            },
        )
    }

    #[test]
    fn identical_stacks() {
        let gt = scene();
        let r = evaluate(&gt, &gt, &EvalConfig::default()).unwrap();
        for m in &r.metrics {
            assert_eq!(m.rmse, 0.0);
            assert!((m.ssim - 1.0).abs() < 1e-12);
            assert!(m.identical());
        }
    }

    #[test]
    fn unit_offset_on_8_bit_scale() {
        let gt = scene();
        let out = gt.map(|v| v + 1.0);
        let r = evaluate(&gt, &out, &EvalConfig::default()).unwrap();
        for a in Angle::ALL {
            let m = r.get(Quantity::channel(a));
            assert!((m.rmse - 1.0).abs() < 1e-12);
            assert!((m.psnr - 48.1308).abs() < 5e-5);
        }
    }

    #[test]
    fn sixteen_bit_scale_maps_to_255() {
        let gt = scene().map(|v| v * 257.0);
        let out = gt.map(|v| v + 257.0);
        let cfg = EvalConfig {
            bit_depth: 16,
            ..Default::default()
        };
        let r = evaluate(&gt, &out, &cfg).unwrap();
        assert!((r.get(Quantity::I0).rmse - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wrapped_diff() {
        assert!((wrapped_aolp_diff(1.5, -1.5) - (PI - 3.0)).abs() < 1e-12);
        assert_eq!(wrapped_aolp_diff(0.2, 0.1), 0.2 - 0.1);
    }

    #[test]
    fn text_report_is_complete_toml() {
        let gt = scene();
        let mut r = evaluate(&gt, &gt.map(|v| v + 0.5), &EvalConfig::default()).unwrap();
        r.method = "leic".into();
        r.timing = Some(Timing {
            seconds: 0.25,
            threads: 1,
        });
        let text = r.to_text();
        let table: toml::Table = text.parse().unwrap();
        assert_eq!(table["method"].as_str(), Some("leic"));
        for q in Quantity::ALL {
            let sub = table[q.label()].as_table().unwrap();
            for key in ["psnr_db", "rmse", "ssim", "identical"] {
                assert!(sub.contains_key(key), "{} {key}", q.label());
            }
        }
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.starts_with("method,quantity,psnr_db,rmse,ssim"));
    }
}
