//! Synthetic 4:2:0 frames for tests and fixtures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::reference::downsample_luma_at;
use crate::types::{clamp_sample, Frame, Plane};

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::BadSpec(format!(
            "synthetic frame {width}x{height} needs positive even dimensions"
        )));
    }
    Ok(())
}

/// Chroma plane `f(down-sampled luma at (x, y))`.
fn chroma_from_luma(luma: &Plane, f: impl FnMut(u16) -> i64) -> Result<Plane> {
    let mut f = f;
    let (w, h) = (luma.width() / 2, luma.height() / 2);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let s = downsample_luma_at(luma, x, y)?;
            data.push(clamp_sample(f(s), luma.bit_depth()));
        }
    }
    Plane::new(w, h, luma.bit_depth(), data)
}

/// Every sample of each plane set to one value.
pub fn constant(
    width: usize,
    height: usize,
    bit_depth: u8,
    y: u16,
    cb: u16,
    cr: u16,
) -> Result<Frame> {
    check_dims(width, height)?;
    Frame::new(
        Plane::filled(width, height, bit_depth, y)?,
        Plane::filled(width / 2, height / 2, bit_depth, cb)?,
        Plane::filled(width / 2, height / 2, bit_depth, cr)?,
    )
}

/// A textured frame whose chroma is exactly half the down-sampled luma,
/// for both the direct and the two-step prediction.
///
/// Luma is piecewise constant on 4-wide column groups offset by one sample,
/// so every luma block boundary at a multiple of 4 falls inside a group and
/// edge replication at the block border sees the same value as the frame.
/// All luma values are multiples of 16 (scaled by the bit depth), which
/// keeps every filter output even.
pub fn exact_linear(width: usize, height: usize, bit_depth: u8) -> Result<Frame> {
    check_dims(width, height)?;
    if !width.is_multiple_of(4) {
        return Err(Error::BadSpec(format!(
            "linear frame width {width} must be a multiple of 4"
        )));
    }
    let scale = 16u16 << (bit_depth.saturating_sub(8));
    let luma = Plane::from_fn(width, height, bit_depth, |x, y| {
        let (gx, gy) = ((x + 1) / 4, y / 2);
        scale * (1 + ((gx * 3 + gy * 5) % 15) as u16)
    })?;
    let cb = chroma_from_luma(&luma, |s| i64::from(s) / 2)?;
    Frame::new(luma, cb.clone(), cb)
}

/// Parameters of [`ar1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ar1Params {
    pub rho_x: f64,
    pub rho_y: f64,
    /// Luma standard deviation in sample steps.
    pub luma_sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Standard deviation of the chroma noise in sample steps.
    pub noise: f64,
}

impl Default for Ar1Params {
    fn default() -> Self {
        Self {
            rho_x: 0.9,
            rho_y: 0.9,
            luma_sigma: 0.15,
            alpha: 0.6,
            beta: 0.0,
            noise: 24.0,
        }
    }
}

/// Separable first-order autoregressive luma field with unit-variance
/// correlation `rho_x^|dx| * rho_y^|dy|`, scaled around mid-range by
/// `luma_sigma` of the full range. Chroma is affine in the down-sampled
/// luma plus Gaussian noise; Cb and Cr draw independent noise.
pub fn ar1(
    width: usize,
    height: usize,
    bit_depth: u8,
    params: Ar1Params,
    seed: u64,
) -> Result<Frame> {
    check_dims(width, height)?;
    for (name, r) in [("rho_x", params.rho_x), ("rho_y", params.rho_y)] {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {r} not in (0, 1)"
            )));
        }
    }
    let normal = |sd: f64| {
        Normal::new(0.0, sd).map_err(|e| Error::InvalidArgument(format!("noise sigma {sd}: {e}")))
    };
    let unit = normal(1.0)?;
    let chroma_noise = normal(params.noise.max(0.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (rx, ry) = (params.rho_x, params.rho_y);
    let (gx, gy, gxy) = (
        (1.0 - rx * rx).sqrt(),
        (1.0 - ry * ry).sqrt(),
        ((1.0 - rx * rx) * (1.0 - ry * ry)).sqrt(),
    );
    let mut field = vec![0.0f64; width * height];
    for y in 0..height {
        for x in 0..width {
            let e = unit.sample(&mut rng);
            let v = match (x, y) {
                (0, 0) => e,
                (_, 0) => rx * field[x - 1] + gx * e,
                (0, _) => ry * field[(y - 1) * width] + gy * e,
                _ => {
                    rx * field[y * width + x - 1] + ry * field[(y - 1) * width + x]
                        - rx * ry * field[(y - 1) * width + x - 1]
                        + gxy * e
                }
            };
            field[y * width + x] = v;
        }
    }

    let max = f64::from((1u32 << bit_depth) - 1);
    let mid = (max + 1.0) / 2.0;
    let spread = params.luma_sigma * max;
    let data = field
        .iter()
        .map(|v| clamp_sample((mid + spread * v).round() as i64, bit_depth))
        .collect();
    let luma = Plane::new(width, height, bit_depth, data)?;
    let mut chroma = || {
        chroma_from_luma(&luma, |s| {
            (params.alpha * f64::from(s) + params.beta + chroma_noise.sample(&mut rng)).round()
                as i64
        })
    };
    let cb = chroma()?;
    let cr = chroma()?;
    Frame::new(luma, cb, cr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_frame() {
        let f = constant(8, 4, 10, 512, 300, 700).unwrap();
        assert!(f.luma().data().iter().all(|&v| v == 512));
        assert!(f.cr().data().iter().all(|&v| v == 700));
        assert!(constant(7, 4, 8, 0, 0, 0).is_err());
    }

    #[test]
    fn linear_chroma_is_half_luma() {
        let f = exact_linear(32, 16, 8).unwrap();
        for y in 0..8 {
            for x in 0..16 {
                let s = downsample_luma_at(f.luma(), x, y).unwrap();
                assert_eq!(s % 2, 0);
                assert_eq!(f.cb().get(x, y) * 2, s);
            }
        }
        assert!(exact_linear(30, 16, 8).is_err());
        assert!(exact_linear(32, 16, 10)
            .unwrap()
            .luma()
            .data()
            .iter()
            .all(|&v| v % 64 == 0));
    }

    #[test]
    fn ar1_is_seeded() {
        let p = Ar1Params::default();
        let a = ar1(32, 32, 10, p, 7).unwrap();
        assert_eq!(a, ar1(32, 32, 10, p, 7).unwrap());
        assert_ne!(a, ar1(32, 32, 10, p, 8).unwrap());
        assert_ne!(a.cb(), a.cr());
        let bad = Ar1Params { rho_x: 1.0, ..p };
        assert!(ar1(32, 32, 10, bad, 7).is_err());
    }
}
