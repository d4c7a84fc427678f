//! Domain types shared by every stage: sample planes, 4:2:0 frames, block
//! geometry, reference pairs and the linear model.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_BIT_DEPTH: u8 = 8;
pub const MAX_BIT_DEPTH: u8 = 14;
pub const DEFAULT_BIT_DEPTH: u8 = 10;

/// Saturate `v` into `[0, 2^bit_depth - 1]`.
pub fn clamp_sample(v: i64, bit_depth: u8) -> u16 {
    let max = (1i64 << bit_depth) - 1;
    v.clamp(0, max) as u16
}

fn check_bit_depth(bit_depth: u8) -> Result<()> {
    if (MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&bit_depth) {
        Ok(())
    } else {
        Err(Error::InvalidPlane(format!(
            "bit depth {bit_depth} outside {MIN_BIT_DEPTH}..={MAX_BIT_DEPTH}"
        )))
    }
}

/// One color channel: a row-major grid of unsigned samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    bit_depth: u8,
    data: Vec<u16>,
}

impl Plane {
    pub fn new(width: usize, height: usize, bit_depth: u8, data: Vec<u16>) -> Result<Self> {
        check_bit_depth(bit_depth)?;
        if data.len() != width * height {
            return Err(Error::InvalidPlane(format!(
                "{} samples for a {width}x{height} plane",
                data.len()
            )));
        }
        if let Some(&v) = data.iter().find(|&&v| u32::from(v) >> bit_depth != 0) {
            return Err(Error::SampleRange {
                value: u32::from(v),
                bit_depth,
            });
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, bit_depth: u8, value: u16) -> Result<Self> {
        Self::new(width, height, bit_depth, vec![value; width * height])
    }

    /// Build a plane by evaluating `f(x, y)` at every position.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u8,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, bit_depth, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    /// Sample at column `x`, row `y`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        assert!(
            x < self.width && y < self.height,
            "({x}, {y}) outside plane"
        );
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u16] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Copy the `w`x`h` block at (`x`, `y`).
    pub fn block(&self, geom: &BlockGeom) -> Result<Block> {
        if !geom.fits(self.width, self.height) {
            return Err(Error::InvalidGeometry(format!(
                "{geom} outside {}x{} plane",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(geom.w * geom.h);
        for y in geom.y..geom.y + geom.h {
            data.extend_from_slice(&self.row(y)[geom.x..geom.x + geom.w]);
        }
        Ok(Block {
            w: geom.w,
            h: geom.h,
            bit_depth: self.bit_depth,
            data,
        })
    }
}

/// A rectangular block of samples, used for predictions and for the
/// co-located original chroma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub w: usize,
    pub h: usize,
    pub bit_depth: u8,
    pub data: Vec<u16>,
}

impl Block {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.data[y * self.w + x]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ChromaFormat {
    #[default]
    Yuv420,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChromaComponent {
    Cb,
    Cr,
}

impl ChromaComponent {
    pub const ALL: [ChromaComponent; 2] = [ChromaComponent::Cb, ChromaComponent::Cr];

    pub fn name(self) -> &'static str {
        match self {
            ChromaComponent::Cb => "cb",
            ChromaComponent::Cr => "cr",
        }
    }
}

/// A 4:2:0 frame: full-resolution luma and two half-resolution chroma planes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    luma: Plane,
    cb: Plane,
    cr: Plane,
    format: ChromaFormat,
}

impl Frame {
    pub fn new(luma: Plane, cb: Plane, cr: Plane) -> Result<Self> {
        if !luma.width.is_multiple_of(2) || !luma.height.is_multiple_of(2) {
            return Err(Error::BadSpec(format!(
                "luma dimensions {}x{} must be even",
                luma.width, luma.height
            )));
        }
        for (name, p) in [("cb", &cb), ("cr", &cr)] {
            if p.width != luma.width / 2 || p.height != luma.height / 2 {
                return Err(Error::BadSpec(format!(
                    "{name} plane is {}x{}, expected {}x{}",
                    p.width,
                    p.height,
                    luma.width / 2,
                    luma.height / 2
                )));
            }
            if p.bit_depth != luma.bit_depth {
                return Err(Error::BadSpec(format!(
                    "{name} bit depth differs from luma"
                )));
            }
        }
        Ok(Self {
            luma,
            cb,
            cr,
            format: ChromaFormat::Yuv420,
        })
    }

    pub fn luma(&self) -> &Plane {
        &self.luma
    }

    pub fn cb(&self) -> &Plane {
        &self.cb
    }

    pub fn cr(&self) -> &Plane {
        &self.cr
    }

    pub fn chroma(&self, component: ChromaComponent) -> &Plane {
        match component {
            ChromaComponent::Cb => &self.cb,
            ChromaComponent::Cr => &self.cr,
        }
    }

    pub fn format(&self) -> ChromaFormat {
        self.format
    }

    pub fn bit_depth(&self) -> u8 {
        self.luma.bit_depth
    }

    pub fn chroma_width(&self) -> usize {
        self.cb.width
    }

    pub fn chroma_height(&self) -> usize {
        self.cb.height
    }
}

/// Position and size of a chroma coding block, in chroma samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockGeom {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BlockGeom {
    /// Sizes must be powers of two no smaller than 2.
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Result<Self> {
        for (name, v) in [("width", w), ("height", h)] {
            if v < 2 || !v.is_power_of_two() {
                return Err(Error::InvalidGeometry(format!(
                    "block {name} {v} is not a power of two >= 2"
                )));
            }
        }
        Ok(Self { x, y, w, h })
    }

    /// Like [`BlockGeom::new`], additionally requiring the block to lie
    /// inside the chroma planes of `frame`.
    pub fn within(frame: &Frame, x: usize, y: usize, w: usize, h: usize) -> Result<Self> {
        let geom = Self::new(x, y, w, h)?;
        if !geom.fits(frame.chroma_width(), frame.chroma_height()) {
            return Err(Error::InvalidGeometry(format!(
                "{geom} outside {}x{} chroma plane",
                frame.chroma_width(),
                frame.chroma_height()
            )));
        }
        Ok(geom)
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x + self.w <= width && self.y + self.h <= height
    }

    /// The co-located luma region for 4:2:0.
    pub fn colocated_luma_region(&self) -> LumaRect {
        LumaRect {
            x: 2 * self.x,
            y: 2 * self.y,
            w: 2 * self.w,
            h: 2 * self.h,
        }
    }
}

impl fmt::Display for BlockGeom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} block at ({}, {})", self.w, self.h, self.x, self.y)
    }
}

/// Rectangle on the luma grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LumaRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Above,
    Left,
}

/// Where a reference pair came from: the side and the index along it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefPos {
    pub side: Side,
    pub index: usize,
}

impl RefPos {
    pub fn above(index: usize) -> Self {
        Self {
            side: Side::Above,
            index,
        }
    }

    pub fn left(index: usize) -> Self {
        Self {
            side: Side::Left,
            index,
        }
    }
}

/// A (down-sampled luma, chroma) reference sample couple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RefPair {
    pub luma: u16,
    pub chroma: u16,
    pub pos: RefPos,
}

impl RefPair {
    pub fn new(luma: u16, chroma: u16, pos: RefPos) -> Self {
        Self { luma, chroma, pos }
    }
}

/// Fractional bits of the fixed-point slope.
pub const ALPHA_SHIFT: u32 = 32;
/// Slopes are capped to `[-ALPHA_CAP, ALPHA_CAP]`.
pub const ALPHA_CAP: f64 = 8.0;
pub(crate) const ALPHA_FX_CAP: i64 = 8 << ALPHA_SHIFT;

/// Chroma = alpha * luma + beta, in real and fixed-point form.
///
/// The fixed-point form predicts `((s * alpha_fx) >> alpha_shift) + beta_fx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearModel {
    pub alpha_f: f64,
    pub beta_f: f64,
    pub alpha_fx: i64,
    pub alpha_shift: u32,
    pub beta_fx: i64,
}

impl LinearModel {
    /// Model from real parameters; the fixed-point slope is rounded to
    /// `ALPHA_SHIFT` fractional bits and the offset to the nearest integer.
    pub fn from_params(alpha: f64, beta: f64) -> Self {
        let alpha = alpha.clamp(-ALPHA_CAP, ALPHA_CAP);
        Self {
            alpha_f: alpha,
            beta_f: beta,
            alpha_fx: (alpha * (1u64 << ALPHA_SHIFT) as f64).round() as i64,
            alpha_shift: ALPHA_SHIFT,
            beta_fx: beta.round() as i64,
        }
    }

    /// The flat model used when the luma spread is zero.
    pub fn flat(beta_f: f64, beta_fx: i64) -> Self {
        Self {
            alpha_f: 0.0,
            beta_f,
            alpha_fx: 0,
            alpha_shift: ALPHA_SHIFT,
            beta_fx,
        }
    }

    #[inline]
    pub fn predict_fixed(&self, s: i64) -> i64 {
        ((s * self.alpha_fx) >> self.alpha_shift) + self.beta_fx
    }

    #[inline]
    pub fn predict_float(&self, s: f64) -> f64 {
        self.alpha_f * s + self.beta_f
    }

    /// The fixed-point slope as a real number.
    pub fn alpha_fixed_as_f64(&self) -> f64 {
        self.alpha_fx as f64 / (1u64 << self.alpha_shift) as f64
    }

    pub fn is_finite(&self) -> bool {
        self.alpha_f.is_finite() && self.beta_f.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredictionMode {
    Lm,
    LmAbove,
    LmLeft,
}

impl PredictionMode {
    pub const ALL: [PredictionMode; 3] = [
        PredictionMode::Lm,
        PredictionMode::LmAbove,
        PredictionMode::LmLeft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictionMode::Lm => "LM",
            PredictionMode::LmAbove => "LM-Above",
            PredictionMode::LmLeft => "LM-Left",
        }
    }
}

impl fmt::Display for PredictionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "lm" => Ok(PredictionMode::Lm),
            "lmabove" | "lma" | "lmt" => Ok(PredictionMode::LmAbove),
            "lmleft" | "lml" => Ok(PredictionMode::LmLeft),
            _ => Err(Error::InvalidArgument(format!("unknown mode '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn colocated_region_doubles() {
        let cases = [
            ((4, 2, 8, 4), (8, 4, 16, 8)),
            ((0, 0, 2, 2), (0, 0, 4, 4)),
            ((16, 16, 32, 32), (32, 32, 64, 64)),
        ];
        for ((x, y, w, h), (lx, ly, lw, lh)) in cases {
            let r = BlockGeom::new(x, y, w, h).unwrap().colocated_luma_region();
            assert_eq!((r.x, r.y, r.w, r.h), (lx, ly, lw, lh));
        }
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_sample(300, 8), 255);
        assert_eq!(clamp_sample(-5, 10), 0);
        assert_eq!(clamp_sample(512, 10), 512);
    }

    #[test]
    fn plane_rejects_bad_input() {
        assert!(Plane::new(2, 2, 8, vec![0; 3]).is_err());
        assert!(matches!(
            Plane::new(1, 1, 8, vec![256]),
            Err(Error::SampleRange { value: 256, .. })
        ));
        assert!(Plane::new(1, 1, 7, vec![0]).is_err());
        assert!(Plane::new(1, 1, 15, vec![0]).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(BlockGeom::new(0, 0, 3, 4).is_err());
        assert!(BlockGeom::new(0, 0, 1, 4).is_err());
        let luma = Plane::filled(16, 16, 8, 0).unwrap();
        let c = Plane::filled(8, 8, 8, 0).unwrap();
        let frame = Frame::new(luma, c.clone(), c).unwrap();
        assert!(BlockGeom::within(&frame, 4, 4, 4, 4).is_ok());
        assert!(BlockGeom::within(&frame, 6, 4, 4, 4).is_err());
    }

    #[test]
    fn frame_requires_420_layout() {
        let luma = Plane::filled(8, 8, 8, 0).unwrap();
        let bad = Plane::filled(8, 4, 8, 0).unwrap();
        let good = Plane::filled(4, 4, 8, 0).unwrap();
        assert!(Frame::new(luma.clone(), bad, good.clone()).is_err());
        assert!(Frame::new(luma, good.clone(), good).is_ok());
    }

    #[test]
    fn model_from_params() {
        let m = LinearModel::from_params(2.0, 10.0);
        assert_eq!(m.predict_fixed(50), 110);
        let m = LinearModel::from_params(100.0, 0.0);
        assert_eq!(m.alpha_f, ALPHA_CAP);
    }

    #[test]
    fn mode_parse() {
        assert_eq!(
            "lm-above".parse::<PredictionMode>().unwrap(),
            PredictionMode::LmAbove
        );
        assert_eq!(
            "LM_LEFT".parse::<PredictionMode>().unwrap(),
            PredictionMode::LmLeft
        );
        assert!("foo".parse::<PredictionMode>().is_err());
    }

    proptest! {
        #[test]
        fn plane_round_trip(w in 1usize..16, h in 1usize..16, bd in 8u8..=14, seed in any::<u64>()) {
            let max = 1u64 << bd;
            let data: Vec<u16> = (0..w * h)
                .map(|i| ((seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407)) >> 17) % max) as u16)
                .collect();
            let plane = Plane::new(w, h, bd, data.clone()).unwrap();
            let mut back = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    back.push(plane.get(x, y));
                }
            }
            prop_assert_eq!(back, data);
        }

        #[test]
        fn colocated_region_inside_luma(cw in 1usize..40, ch in 1usize..40, lw in 1u32..6, lh in 1u32..6, fx in 0.0f64..1.0, fy in 0.0f64..1.0) {
            let (w, h) = (1usize << lw, 1usize << lh);
            prop_assume!(w <= cw && h <= ch);
            let x = ((cw - w) as f64 * fx) as usize;
            let y = ((ch - h) as f64 * fy) as usize;
            let r = BlockGeom::new(x, y, w, h).unwrap().colocated_luma_region();
            prop_assert!(r.x + r.w <= 2 * cw && r.y + r.h <= 2 * ch);
        }
    }
}
