//! Division-free fixed-point model parameters.
//!
//! The slope division is a multiplication by a reciprocal table entry
//! followed by a shift. Denominators wider than the table are normalized
//! (shifted right) first, so the table only needs `2^LUT_BITS` entries.

use std::sync::OnceLock;

use crate::complexity::OpCounts;
use crate::types::{ALPHA_FX_CAP, ALPHA_SHIFT};

/// Table covers denominators `1..2^LUT_BITS`.
pub const LUT_BITS: u32 = 15;
pub const LUT_SIZE: usize = 1 << LUT_BITS;

static RECIPROCALS: OnceLock<Vec<u64>> = OnceLock::new();

/// `LUT[d] = round(2^ALPHA_SHIFT / d)`, `LUT[0] = 0`.
pub fn reciprocal_lut() -> &'static [u64] {
    RECIPROCALS.get_or_init(|| {
        let one = 1u64 << ALPHA_SHIFT;
        let mut lut = vec![0u64; LUT_SIZE];
        for (d, e) in lut.iter_mut().enumerate().skip(1) {
            let d = d as u64;
            *e = (one + d / 2) / d;
        }
        lut
    })
}

/// Table index and extra right shift for a positive denominator.
fn normalize(den: u128) -> (usize, u32) {
    debug_assert!(den > 0);
    let bits = 128 - den.leading_zeros();
    if bits <= LUT_BITS {
        return (den as usize, 0);
    }
    let mut k = bits - LUT_BITS;
    let mut idx = (den + (1u128 << (k - 1))) >> k;
    if idx as usize >= LUT_SIZE {
        idx >>= 1;
        k += 1;
    }
    (idx as usize, k)
}

/// The point a model line is anchored at, stored as sums over `count`
/// samples so averages keep their fractional part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub luma_sum: i64,
    pub chroma_sum: i64,
    pub count: u32,
}

impl Anchor {
    pub fn point(luma: i64, chroma: i64) -> Self {
        Self {
            luma_sum: luma,
            chroma_sum: chroma,
            count: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedParams {
    pub alpha_fx: i64,
    pub alpha_shift: u32,
    pub beta_fx: i64,
}

fn ceil_div(x: i128, d: i128) -> i128 {
    -(-x).div_euclid(d)
}

/// Fixed-point slope `numerator / denominator` and the offset that puts
/// the line through `anchor`.
///
/// With a single-point anchor the offset is
/// `chroma - ((luma * alpha_fx) >> alpha_shift)`; with a `count`-sample
/// anchor the same expression over the sums is divided by `count`,
/// rounding up. A zero denominator gives the flat model through the
/// anchor's mean chroma, rounded half up.
pub fn fixed_point_model(numerator: i128, denominator: i128, anchor: Anchor) -> FixedParams {
    fixed_point_model_counted(numerator, denominator, anchor, &mut OpCounts::default())
}

pub(crate) fn fixed_point_model_counted(
    numerator: i128,
    denominator: i128,
    anchor: Anchor,
    ops: &mut OpCounts,
) -> FixedParams {
    let count = i128::from(anchor.count.max(1));
    if denominator == 0 {
        return FixedParams {
            alpha_fx: 0,
            alpha_shift: ALPHA_SHIFT,
            beta_fx: (i128::from(anchor.chroma_sum) * 2 + count).div_euclid(2 * count) as i64,
        };
    }
    let negative = (numerator < 0) != (denominator < 0);
    let (idx, k) = normalize(denominator.unsigned_abs());
    let magnitude = numerator.unsigned_abs() * u128::from(reciprocal_lut()[idx]);
    let magnitude = if k == 0 {
        magnitude
    } else {
        (magnitude + (1u128 << (k - 1))) >> k
    };
    // division by table lookup
    ops.shift += 1;
    let magnitude = magnitude.min(ALPHA_FX_CAP as u128) as i64;
    let alpha_fx = if negative { -magnitude } else { magnitude };

    ops.mult += 1;
    ops.shift += 1;
    ops.add += 1;
    let scaled = (i128::from(anchor.luma_sum) * i128::from(alpha_fx)) >> ALPHA_SHIFT;
    let numer = i128::from(anchor.chroma_sum) - scaled;
    let beta_fx = match anchor.count {
        0 | 1 => numer,
        c if c.is_power_of_two() => {
            ops.shift += 1;
            let s = c.trailing_zeros();
            (numer + i128::from(c) - 1) >> s
        }
        _ => {
            ops.shift += 1;
            ceil_div(numer, count)
        }
    };
    FixedParams {
        alpha_fx,
        alpha_shift: ALPHA_SHIFT,
        beta_fx: beta_fx as i64,
    }
}
