//! Chroma prediction from a linear model: direct prediction on
//! down-sampled luma, and the two-step variant that applies the model at
//! luma resolution before down-sampling.

use crate::error::{Error, Result};
use crate::reference::downsample_luma_at;
use crate::types::{clamp_sample, Block, BlockGeom, LinearModel, Plane};

pub type PredBlock = Block;

fn check_region(luma: &Plane, geom: &BlockGeom) -> Result<()> {
    let r = geom.colocated_luma_region();
    if r.x + r.w > luma.width() || r.y + r.h > luma.height() {
        return Err(Error::OutOfPlane(format!(
            "luma region {}x{} at ({}, {}) outside {}x{} plane",
            r.w,
            r.h,
            r.x,
            r.y,
            luma.width(),
            luma.height()
        )));
    }
    Ok(())
}

/// Apply the fixed-point model to the down-sampled co-located luma.
pub fn predict_cclm(model: &LinearModel, luma: &Plane, geom: &BlockGeom) -> Result<PredBlock> {
    check_region(luma, geom)?;
    let bd = luma.bit_depth();
    let mut data = Vec::with_capacity(geom.w * geom.h);
    for j in 0..geom.h {
        for i in 0..geom.w {
            let s = downsample_luma_at(luma, geom.x + i, geom.y + j)?;
            data.push(clamp_sample(model.predict_fixed(i64::from(s)), bd));
        }
    }
    Ok(Block {
        w: geom.w,
        h: geom.h,
        bit_depth: bd,
        data,
    })
}

/// Real-valued, unclamped direct prediction.
pub fn predict_cclm_float(model: &LinearModel, luma: &Plane, geom: &BlockGeom) -> Result<Vec<f64>> {
    check_region(luma, geom)?;
    let mut out = Vec::with_capacity(geom.w * geom.h);
    for j in 0..geom.h {
        for i in 0..geom.w {
            let s = downsample_luma_at(luma, geom.x + i, geom.y + j)?;
            out.push(model.predict_float(f64::from(s)));
        }
    }
    Ok(out)
}

/// Two-step prediction: the model maps every luma sample of the 2w x 2h
/// region to a clamped temporary block, which the `[1, 2, 1; 1, 2, 1] / 8`
/// filter then reduces to w x h. Filter columns outside the temporary
/// block repeat its edge column.
pub fn predict_tscpm(model: &LinearModel, luma: &Plane, geom: &BlockGeom) -> Result<PredBlock> {
    check_region(luma, geom)?;
    let bd = luma.bit_depth();
    let r = geom.colocated_luma_region();
    let mut temp = Vec::with_capacity(r.w * r.h);
    for y in r.y..r.y + r.h {
        for &s in &luma.row(y)[r.x..r.x + r.w] {
            temp.push(u32::from(clamp_sample(
                model.predict_fixed(i64::from(s)),
                bd,
            )));
        }
    }
    let at = |x: usize, y: usize| temp[y * r.w + x];
    let mut data = Vec::with_capacity(geom.w * geom.h);
    for j in 0..geom.h {
        for i in 0..geom.w {
            let c = 2 * i;
            let (l, rr) = (c.saturating_sub(1), (c + 1).min(r.w - 1));
            let mut sum = 4;
            for y in [2 * j, 2 * j + 1] {
                sum += at(l, y) + 2 * at(c, y) + at(rr, y);
            }
            data.push((sum >> 3) as u16);
        }
    }
    Ok(Block {
        w: geom.w,
        h: geom.h,
        bit_depth: bd,
        data,
    })
}

/// Sum of squared differences.
pub fn sse(pred: &PredBlock, actual: &Block) -> Result<u64> {
    if (pred.w, pred.h) != (actual.w, actual.h) || pred.data.len() != actual.data.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} against {}x{}",
            pred.w, pred.h, actual.w, actual.h
        )));
    }
    Ok(pred
        .data
        .iter()
        .zip(&actual.data)
        .map(|(&a, &b)| {
            let d = i64::from(a) - i64::from(b);
            (d * d) as u64
        })
        .sum())
}
