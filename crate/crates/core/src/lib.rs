//! Edge-aware demosaicking for division-of-focal-plane polarization mosaics.
//!
//! A 2×2 polarizer tile (0°, 45°, 90°, 135°) repeats over the sensor. The
//! pipeline reconstructs the orthogonal channel at every pixel from the two
//! diagonals ([`dle::estimate_orth_plane`]), then the horizontal and vertical
//! neighbor channels ([`dle::estimate_hv_planes`]). The optional calibration
//! pass ([`iccc::calibrate`]) blends per-channel corrections from the other
//! three estimates.
//!
//! ```no_run
//! use polardm::{demosaic, pfa::MosaicImage, Method, MethodSpec};
//! # fn run(img: &MosaicImage) -> polardm::Result<()> {
//! let stack = demosaic(img, &MethodSpec::default_for(Method::Leic))?;
//! let view = polardm::stokes::polarization_view(&stack);
//! # Ok(()) }
//! ```

pub mod demosaic;
pub mod dle;
pub mod error;
pub mod eval;
pub mod iccc;
pub mod io;
pub mod pfa;
pub mod plane;
pub mod stokes;

pub use demosaic::{demosaic, Method, MethodSpec};
pub use error::{Error, Result};
pub use pfa::{make_masks, Angle, ChannelMask, ChannelStack, MosaicImage, PfaPattern};
pub use plane::Plane;
