//! Evaluation harness: DoFP simulation, quality metrics, reports, timing.

pub mod bench;
pub mod metrics;
pub mod report;
pub mod simulate;

pub use bench::{bench, with_threads, BenchResult};
pub use metrics::{masked_rmse, mse, psnr, rmse, ssim};
pub use report::{evaluate, EvalConfig, EvalReport, QualityMetrics, Quantity, Timing};
pub use simulate::{mosaic_from_stack, stack_from_polarization, synthetic_scene, SceneParams};
