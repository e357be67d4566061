//! Polarization filter array data model: polarizer angles, the 2×2 tile
//! layout, raw mosaics, four-channel stacks and per-channel masks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Stencil reach of the 5×5 kernels.
pub const APRON: usize = 2;

/// Smallest accepted mosaic edge length.
pub const MIN_DIM: usize = 6;

/// One of the four micro-polarizer orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Angle {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Angle {
    /// All angles in stack order 0, 45, 90, 135.
    pub const ALL: [Angle; 4] = [Angle::Deg0, Angle::Deg45, Angle::Deg90, Angle::Deg135];

    pub fn from_degrees(deg: i64) -> Result<Self> {
        match deg {
            0 => Ok(Angle::Deg0),
            45 => Ok(Angle::Deg45),
            90 => Ok(Angle::Deg90),
            135 => Ok(Angle::Deg135),
            other => Err(Error::InvalidAngle(other)),
        }
    }

    pub fn degrees(self) -> u32 {
        self.index() as u32 * 45
    }

    pub fn radians(self) -> f64 {
        (self.degrees() as f64).to_radians()
    }

    /// Position in the 0, 45, 90, 135 ordering.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Angle::Deg0 => 0,
            Angle::Deg45 => 1,
            Angle::Deg90 => 2,
            Angle::Deg135 => 3,
        }
    }

    /// The angle 90° away (0↔90, 45↔135).
    #[inline]
    pub fn orthogonal(self) -> Self {
        Angle::ALL[(self.index() + 2) % 4]
    }

    /// Label used in reports and file names, e.g. `I45`.
    pub fn label(self) -> &'static str {
        ["I0", "I45", "I90", "I135"][self.index()]
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degrees())
    }
}

/// Orthogonal partner of an angle given in degrees.
pub fn orthogonal_angle(deg: i64) -> Result<i64> {
    Ok(Angle::from_degrees(deg)?.orthogonal().degrees() as i64)
}

/// The 2×2 polarizer tile, row-major with the origin at the top-left pixel.
///
/// Every pixel's horizontal neighbors share one channel, its vertical
/// neighbors share another, and its diagonal neighbors carry the orthogonal
/// channel. Construction rejects tiles that break this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PfaPattern {
    tile: [[Angle; 2]; 2],
}

impl Default for PfaPattern {
    /// `[[90, 45], [135, 0]]`, the usual commercial quad-polarizer layout.
    fn default() -> Self {
        Self {
            tile: [[Angle::Deg90, Angle::Deg45], [Angle::Deg135, Angle::Deg0]],
        }
    }
}

impl PfaPattern {
    pub fn new(tile: [[Angle; 2]; 2]) -> Result<Self> {
        let flat = [tile[0][0], tile[0][1], tile[1][0], tile[1][1]];
        for a in 0..4 {
            for b in a + 1..4 {
                if flat[a] == flat[b] {
                    return Err(Error::InvalidPattern(format!(
                        "angle {} appears more than once",
                        flat[a]
                    )));
                }
            }
        }
        if tile[1][1] != tile[0][0].orthogonal() || tile[1][0] != tile[0][1].orthogonal() {
            return Err(Error::InvalidPattern(
                "diagonal neighbors must carry the orthogonal channel".into(),
            ));
        }
        Ok(Self { tile })
    }

    pub fn from_degrees(tile: [[i64; 2]; 2]) -> Result<Self> {
        Self::new([
            [
                Angle::from_degrees(tile[0][0])?,
                Angle::from_degrees(tile[0][1])?,
            ],
            [
                Angle::from_degrees(tile[1][0])?,
                Angle::from_degrees(tile[1][1])?,
            ],
        ])
    }

    pub fn tile(&self) -> [[Angle; 2]; 2] {
        self.tile
    }

    /// Channel sampled at pixel `(row, col)`; indices may be any integers.
    #[inline]
    pub fn channel_of(&self, row: isize, col: isize) -> Angle {
        self.tile[row.rem_euclid(2) as usize][col.rem_euclid(2) as usize]
    }

    #[inline]
    pub fn channel_at(&self, row: usize, col: usize) -> Angle {
        self.tile[row & 1][col & 1]
    }

    /// Phase `(row, col)` of the lattice that carries `angle`, each in {0, 1}.
    pub fn phase_of(&self, angle: Angle) -> (usize, usize) {
        for r in 0..2 {
            for c in 0..2 {
                if self.tile[r][c] == angle {
                    return (r, c);
                }
            }
        }
        unreachable!("validated tile contains every angle")
    }

    /// Pattern seen by a sensor whose origin is moved by `(dr, dc)` pixels:
    /// `shifted.channel_of(i, j) == self.channel_of(i + dr, j + dc)`.
    pub fn shifted(&self, dr: isize, dc: isize) -> Self {
        let mut tile = self.tile;
        for (r, row) in tile.iter_mut().enumerate() {
            for (c, a) in row.iter_mut().enumerate() {
                *a = self.channel_of(r as isize + dr, c as isize + dc);
            }
        }
        Self { tile }
    }
}

impl fmt::Display for PfaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tile;
        write!(f, "{},{};{},{}", t[0][0], t[0][1], t[1][0], t[1][1])
    }
}

impl FromStr for PfaPattern {
    type Err = Error;

    /// Parses `"90,45;135,0"`: rows separated by `;`, angles by `,`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("expected \"a,b;c,d\", got {s:?}"));
        let rows: Vec<&str> = s.trim().split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut tile = [[0i64; 2]; 2];
        for (r, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 {
                return Err(bad());
            }
            for (c, cell) in cells.iter().enumerate() {
                tile[r][c] = cell.trim().parse().map_err(|_| bad())?;
            }
        }
        Self::from_degrees(tile)
    }
}

impl Serialize for PfaPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PfaPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A raw single-plane DoFP frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MosaicImage {
    plane: Plane,
    bit_depth: u8,
    pattern: PfaPattern,
}

impl MosaicImage {
    pub fn new(plane: Plane, bit_depth: u8, pattern: PfaPattern) -> Result<Self> {
        let (width, height) = plane.dims();
        if width < MIN_DIM || height < MIN_DIM {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "mosaic must be at least 6x6",
            });
        }
        if width % 2 != 0 || height % 2 != 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "mosaic dimensions must be even",
            });
        }
        if !(1..=16).contains(&bit_depth) {
            return Err(Error::InvalidBitDepth(bit_depth));
        }
        for (k, &v) in plane.data().iter().enumerate() {
            let (row, col) = (k / width, k % width);
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if v < 0.0 {
                return Err(Error::NegativeSample { row, col, value: v });
            }
        }
        Ok(Self {
            plane,
            bit_depth,
            pattern,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.plane.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.plane.height()
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Largest representable sample, `2^bit_depth - 1`.
    pub fn max_value(&self) -> f64 {
        ((1u32 << self.bit_depth) - 1) as f64
    }

    pub fn pattern(&self) -> PfaPattern {
        self.pattern
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.plane.get(row, col)
    }

    /// Sample lookup with mirror reflection inside the 2-pixel apron.
    pub fn padded_sample(&self, row: isize, col: isize) -> Result<f64> {
        self.plane.mirrored(row, col, APRON)
    }

    /// Same frame under a different tile layout.
    pub fn with_pattern(&self, pattern: PfaPattern) -> Self {
        Self {
            pattern,
            ..self.clone()
        }
    }

    /// Adds a constant to every sample. The result may hold negative values,
    /// which the pipeline accepts even though `new` would not.
    pub fn offset(&self, c: f64) -> Self {
        Self {
            plane: self.plane.map(|v| v + c),
            ..self.clone()
        }
    }
}

/// Four full-resolution planes ordered 0, 45, 90, 135.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStack {
    planes: [Plane; 4],
}

impl ChannelStack {
    pub fn new(planes: [Plane; 4]) -> Result<Self> {
        let dims = planes[0].dims();
        for p in &planes[1..] {
            if p.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    actual: p.dims(),
                });
            }
        }
        for p in &planes {
            if let Some((row, col)) = p.find_non_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(Self { planes })
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.planes[0].dims()
    }

    #[inline]
    pub fn get(&self, angle: Angle) -> &Plane {
        &self.planes[angle.index()]
    }

    pub fn planes(&self) -> &[Plane; 4] {
        &self.planes
    }

    pub fn into_planes(self) -> [Plane; 4] {
        self.planes
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self {
            planes: self.planes.clone().map(|p| p.map(&f)),
        }
    }
}

/// Binary indicator of the pixels sampled by one polarizer angle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelMask {
    angle: Angle,
    width: usize,
    height: usize,
    grid: Vec<u8>,
}

impl ChannelMask {
    pub fn angle(&self) -> Angle {
        self.angle
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.grid[row * self.width + col] != 0
    }

    pub fn grid(&self) -> &[u8] {
        &self.grid
    }

    pub fn count(&self) -> usize {
        self.grid.iter().map(|&b| b as usize).sum()
    }

    /// Hadamard product `plane ⊙ mask`.
    pub fn apply(&self, plane: &Plane) -> Result<Plane> {
        if plane.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: plane.dims(),
            });
        }
        let data = plane
            .data()
            .iter()
            .zip(&self.grid)
            .map(|(&v, &m)| if m != 0 { v } else { 0.0 })
            .collect();
        Plane::new(self.width, self.height, data)
    }
}

/// Masks for all four channels, in stack order.
pub fn make_masks(pattern: &PfaPattern, width: usize, height: usize) -> [ChannelMask; 4] {
    Angle::ALL.map(|angle| {
        let mut grid = vec![0u8; width * height];
        for i in 0..height {
            for j in 0..width {
                grid[i * width + j] = (pattern.channel_at(i, j) == angle) as u8;
            }
        }
        ChannelMask {
            angle,
            width,
            height,
            grid,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(deg: i64) -> Angle {
        Angle::from_degrees(deg).unwrap()
    }

    #[test]
    fn channel_lookup_on_default_tile() {
        let p = PfaPattern::default();
        assert_eq!(p.channel_of(0, 0), d(90));
        assert_eq!(p.channel_of(3, 2), d(135));
        assert_eq!(p.channel_of(-2, -2), d(90));
        assert_eq!(p.channel_of(-1, 0), d(135));
    }

    #[test]
    fn orthogonal_pairs() {
        assert_eq!(orthogonal_angle(0).unwrap(), 90);
        assert_eq!(orthogonal_angle(45).unwrap(), 135);
        assert_eq!(orthogonal_angle(135).unwrap(), 45);
        assert_eq!(orthogonal_angle(30), Err(Error::InvalidAngle(30)));
        for a in Angle::ALL {
            assert_ne!(a.orthogonal(), a);
            assert_eq!(a.orthogonal().orthogonal(), a);
        }
    }

    #[test]
    fn neighbor_structure_holds_for_every_phase() {
        let base = PfaPattern::default();
        for dr in 0..2 {
            for dc in 0..2 {
                let p = base.shifted(dr, dc);
                assert!(PfaPattern::new(p.tile()).is_ok());
                for i in -3..4isize {
                    for j in -3..4isize {
                        let own = p.channel_of(i, j);
                        assert_eq!(p.channel_of(i, j - 1), p.channel_of(i, j + 1));
                        assert_eq!(p.channel_of(i - 1, j), p.channel_of(i + 1, j));
                        for (di, dj) in [(-1, -1), (-1, 1), (1, -1), (1, 1)] {
                            assert_eq!(p.channel_of(i + di, j + dj), own.orthogonal());
                        }
                        assert_ne!(p.channel_of(i, j + 1), p.channel_of(i + 1, j));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_broken_tiles() {
        assert!(PfaPattern::from_degrees([[0, 0], [90, 45]]).is_err());
        // 0 and 45 on a diagonal.
        assert!(PfaPattern::from_degrees([[0, 90], [135, 45]]).is_err());
        assert!(PfaPattern::from_degrees([[0, 45], [10, 90]]).is_err());
    }

    #[test]
    fn pattern_string_round_trip() {
        let p: PfaPattern = "90,45;135,0".parse().unwrap();
        assert_eq!(p, PfaPattern::default());
        assert_eq!(p.to_string(), "90,45;135,0");
        assert!(" 0, 45 ; 135 , 90 ".parse::<PfaPattern>().is_ok());
        assert!("90,45,135,0".parse::<PfaPattern>().is_err());
        assert!("90,45;135".parse::<PfaPattern>().is_err());
        assert!("90,x;135,0".parse::<PfaPattern>().is_err());
    }

    #[test]
    fn shifted_pattern_relation() {
        let p = PfaPattern::default();
        let s = p.shifted(1, 0);
        for i in -2..4 {
            for j in -2..4 {
                assert_eq!(s.channel_of(i, j), p.channel_of(i + 1, j));
            }
        }
    }

    #[test]
    fn padded_sample_mirrors() {
        let plane = Plane::from_fn(6, 6, |i, j| (i * 6 + j) as f64);
        let m = MosaicImage::new(plane, 8, PfaPattern::default()).unwrap();
        assert_eq!(m.padded_sample(-1, 3).unwrap(), m.get(1, 3));
        assert_eq!(m.padded_sample(-2, 3).unwrap(), m.get(2, 3));
        assert_eq!(m.padded_sample(3, 4).unwrap(), m.get(3, 4));
        assert_eq!(m.padded_sample(6, 7).unwrap(), m.get(4, 3));
        assert!(m.padded_sample(-3, 0).is_err());
        assert!(m.padded_sample(0, 8).is_err());
        let p = m.pattern();
        for i in -2..8isize {
            for j in -2..8isize {
                let ri = crate::plane::reflect_index(i, 6).unwrap() as isize;
                let rj = crate::plane::reflect_index(j, 6).unwrap() as isize;
                assert_eq!(p.channel_of(ri, rj), p.channel_of(i, j));
            }
        }
    }

    #[test]
    fn mosaic_validation() {
        let p = PfaPattern::default();
        assert!(MosaicImage::new(Plane::zeros(4, 6), 8, p).is_err());
        assert!(MosaicImage::new(Plane::zeros(7, 6), 8, p).is_err());
        assert!(MosaicImage::new(Plane::zeros(6, 6), 0, p).is_err());
        assert!(MosaicImage::new(Plane::filled(6, 6, -1.0), 8, p).is_err());
        assert!(MosaicImage::new(Plane::filled(6, 6, f64::NAN), 8, p).is_err());
        assert!(MosaicImage::new(Plane::zeros(6, 8), 14, p).is_ok());
    }

    #[test]
    fn masks_partition_the_grid() {
        let p = PfaPattern::default();
        let m = make_masks(&p, 2, 2);
        assert!(m.iter().all(|mask| mask.count() == 1));
        let m = make_masks(&p, 4, 4);
        assert!(m.iter().all(|mask| mask.count() == 4));
        let m = make_masks(&p, 10, 8);
        for i in 0..8 {
            for j in 0..10 {
                let total: u8 = m.iter().map(|mask| mask.get(i, j) as u8).sum();
                assert_eq!(total, 1);
                assert!(!(m[0].get(i, j) && m[2].get(i, j)));
                if i + 2 < 8 && j + 2 < 10 {
                    for mask in &m {
                        assert_eq!(mask.get(i, j), mask.get(i + 2, j));
                        assert_eq!(mask.get(i, j), mask.get(i, j + 2));
                    }
                }
            }
        }
    }

    #[test]
    fn stack_rejects_mismatched_planes() {
        let a = Plane::zeros(6, 6);
        let b = Plane::zeros(6, 8);
        assert!(ChannelStack::new([a.clone(), a.clone(), a.clone(), b]).is_err());
        let mut bad = a.clone();
        bad.set(1, 1, f64::INFINITY);
        assert!(ChannelStack::new([a.clone(), a.clone(), a, bad]).is_err());
    }
}
