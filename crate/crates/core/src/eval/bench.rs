//! Wall-clock timing of single-image demosaicking.

use std::time::Instant;

use crate::demosaic::{demosaic, MethodSpec};
use crate::error::{Error, Result};
use crate::pfa::MosaicImage;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub method: String,
    pub width: usize,
    pub height: usize,
    pub threads: usize,
    pub timings: Vec<f64>,
    pub median_seconds: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Median of `repetitions` timed runs after one untimed warm-up.
pub fn bench(
    img: &MosaicImage,
    spec: &MethodSpec,
    repetitions: usize,
    threads: usize,
) -> Result<BenchResult> {
    if repetitions < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 repetitions, got {repetitions}"
        )));
    }
    spec.validate()?;
    with_threads(threads, || -> Result<BenchResult> {
        demosaic(img, spec)?;
        let mut timings = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let t = Instant::now();
            let out = demosaic(img, spec)?;
            timings.push(t.elapsed().as_secs_f64());
            drop(out);
        }
        Ok(BenchResult {
            method: spec.method().to_string(),
            width: img.width(),
            height: img.height(),
            threads: rayon::current_num_threads(),
            median_seconds: median(&timings),
            timings,
        })
    })?
}
