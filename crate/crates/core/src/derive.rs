//! Linear model derivation from reference pairs: least squares, Max-Min,
//! and the sub-sampled four-point scheme.
//!
//! Every method produces a real-valued model and a fixed-point model.
//! The real path is the analysis reference; the fixed-point path is
//! division-free (see [`crate::fixed`]).

use std::fmt;
use std::str::FromStr;

use crate::complexity::OpCounts;
use crate::error::{Error, Result};
use crate::fixed::{fixed_point_model_counted, Anchor};
use crate::reference::RefSet;
use crate::types::{LinearModel, RefPair, ALPHA_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivationMethod {
    Lsr,
    MaxMin,
    Subsampled4,
}

impl DerivationMethod {
    pub const ALL: [DerivationMethod; 3] = [
        DerivationMethod::Lsr,
        DerivationMethod::MaxMin,
        DerivationMethod::Subsampled4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivationMethod::Lsr => "LSR",
            DerivationMethod::MaxMin => "MaxMin",
            DerivationMethod::Subsampled4 => "Subsampled4",
        }
    }
}

impl fmt::Display for DerivationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DerivationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "lsr" => Ok(DerivationMethod::Lsr),
            "maxmin" => Ok(DerivationMethod::MaxMin),
            "subsampled4" | "subsampled" | "proposed" => Ok(DerivationMethod::Subsampled4),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// Four selected pairs grouped by luma into the two smaller and the two
/// larger couples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairSplit {
    pub smaller: [RefPair; 2],
    pub larger: [RefPair; 2],
}

fn cap(alpha: f64) -> f64 {
    alpha.clamp(-ALPHA_CAP, ALPHA_CAP)
}

fn degenerate(fallback: LinearModel) -> Error {
    Error::DegenerateLuma { fallback }
}

/// Least-squares fit over all pairs.
pub fn derive_lsr(pairs: &[RefPair]) -> Result<LinearModel> {
    lsr_counted(pairs, &mut OpCounts::default())
}

pub(crate) fn lsr_counted(pairs: &[RefPair], ops: &mut OpCounts) -> Result<LinearModel> {
    if pairs.len() < 2 {
        return Err(Error::TooFewPairs(format!(
            "LSR needs 2 pairs, got {}",
            pairs.len()
        )));
    }
    let m = pairs.len() as i128;
    let (mut sl, mut sc, mut slc, mut sll) = (0i128, 0i128, 0i128, 0i128);
    for p in pairs {
        ops.downsample += 1;
        let (l, c) = (i128::from(p.luma), i128::from(p.chroma));
        ops.mult += 2;
        ops.add += 4;
        sl += l;
        sc += c;
        slc += l * c;
        sll += l * l;
    }
    ops.mult += 4;
    ops.add += 2;
    let num = m * slc - sl * sc;
    let den = m * sll - sl * sl;

    let anchor = Anchor {
        luma_sum: sl as i64,
        chroma_sum: sc as i64,
        count: pairs.len() as u32,
    };
    let fixed = fixed_point_model_counted(num, den, anchor, ops);
    if den == 0 {
        return Err(degenerate(LinearModel::flat(
            sc as f64 / m as f64,
            fixed.beta_fx,
        )));
    }
    let alpha = cap(num as f64 / den as f64);
    let beta = (sc as f64 - alpha * sl as f64) / m as f64;
    Ok(LinearModel {
        alpha_f: alpha,
        beta_f: beta,
        alpha_fx: fixed.alpha_fx,
        alpha_shift: fixed.alpha_shift,
        beta_fx: fixed.beta_fx,
    })
}

/// Line through the pairs with the smallest and largest luma. Ties keep
/// the first occurrence.
pub fn derive_max_min(pairs: &[RefPair]) -> Result<LinearModel> {
    max_min_counted(pairs, &mut OpCounts::default())
}

pub(crate) fn max_min_counted(pairs: &[RefPair], ops: &mut OpCounts) -> Result<LinearModel> {
    if pairs.len() < 2 {
        return Err(Error::TooFewPairs(format!(
            "Max-Min needs 2 pairs, got {}",
            pairs.len()
        )));
    }
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, p) in pairs.iter().enumerate() {
        ops.downsample += 1;
        ops.cmp += 2;
        if p.luma < pairs[lo].luma {
            lo = i;
        }
        if p.luma > pairs[hi].luma {
            hi = i;
        }
    }
    let (a, b) = (pairs[lo], pairs[hi]);
    two_point_model(
        i64::from(a.luma),
        i64::from(a.chroma),
        i64::from(b.luma),
        i64::from(b.chroma),
        1,
        ops,
    )
}

/// Model through anchor sums `(la, ca)` and `(lb, cb)`, each a sum over
/// `count` samples.
fn two_point_model(
    la: i64,
    ca: i64,
    lb: i64,
    cb: i64,
    count: u32,
    ops: &mut OpCounts,
) -> Result<LinearModel> {
    ops.add += 2;
    let num = cb - ca;
    let den = lb - la;
    let n = f64::from(count);
    let fixed = fixed_point_model_counted(
        i128::from(num),
        i128::from(den),
        Anchor {
            luma_sum: la,
            chroma_sum: ca,
            count,
        },
        ops,
    );
    if den == 0 {
        return Err(degenerate(LinearModel::flat(ca as f64 / n, fixed.beta_fx)));
    }
    let alpha = cap(num as f64 / den as f64);
    let beta = ca as f64 / n - alpha * (la as f64 / n);
    Ok(LinearModel {
        alpha_f: alpha,
        beta_f: beta,
        alpha_fx: fixed.alpha_fx,
        alpha_shift: fixed.alpha_shift,
        beta_fx: fixed.beta_fx,
    })
}

/// Group four pairs into the two with the smallest luma and the two with
/// the largest, using exactly four comparisons. On ties the earlier pair
/// goes to `smaller`.
pub fn split_two_two(selected: &[RefPair; 4]) -> PairSplit {
    split_counted(selected, &mut OpCounts::default())
}

pub(crate) fn split_counted(s: &[RefPair; 4], ops: &mut OpCounts) -> PairSplit {
    let mut lo = [0usize, 1];
    let mut hi = [2usize, 3];
    ops.cmp += 4;
    if s[lo[0]].luma > s[lo[1]].luma {
        lo.swap(0, 1);
    }
    if s[hi[0]].luma > s[hi[1]].luma {
        hi.swap(0, 1);
    }
    if s[lo[0]].luma > s[hi[1]].luma {
        std::mem::swap(&mut lo, &mut hi);
    }
    if s[lo[1]].luma > s[hi[0]].luma {
        std::mem::swap(&mut lo[1], &mut hi[0]);
    }
    PairSplit {
        smaller: [s[lo[0]], s[lo[1]]],
        larger: [s[hi[0]], s[hi[1]]],
    }
}

/// Four-point derivation: split into smaller and larger couples, average
/// each couple, fit the line through the two averages. Two pairs are
/// used directly.
pub fn derive_subsampled(selected: &[RefPair]) -> Result<LinearModel> {
    subsampled_counted(selected, &mut OpCounts::default())
}

pub(crate) fn subsampled_counted(selected: &[RefPair], ops: &mut OpCounts) -> Result<LinearModel> {
    ops.downsample += selected.len() as u64;
    match selected {
        [a, b] => {
            ops.cmp += 1;
            let (a, b) = if a.luma <= b.luma { (a, b) } else { (b, a) };
            two_point_model(
                i64::from(a.luma),
                i64::from(a.chroma),
                i64::from(b.luma),
                i64::from(b.chroma),
                1,
                ops,
            )
        }
        [a, b, c, d] => {
            let split = split_counted(&[*a, *b, *c, *d], ops);
            let [a0, a1] = split.smaller;
            let [b0, b1] = split.larger;
            // averages are kept as sums; the halving folds into the
            // slope ratio and the offset's final shift
            ops.add += 4;
            two_point_model(
                i64::from(a0.luma) + i64::from(a1.luma),
                i64::from(a0.chroma) + i64::from(a1.chroma),
                i64::from(b0.luma) + i64::from(b1.luma),
                i64::from(b0.chroma) + i64::from(b1.chroma),
                2,
                ops,
            )
        }
        _ => Err(Error::TooFewPairs(format!(
            "sub-sampled derivation takes 2 or 4 pairs, got {}",
            selected.len()
        ))),
    }
}

/// Derive a model from a block's reference set. The sub-sampled method
/// reads only the pairs at its fixed positions.
pub fn derive(method: DerivationMethod, refs: &RefSet) -> Result<LinearModel> {
    derive_counted(method, refs, &mut OpCounts::default())
}

pub fn derive_counted(
    method: DerivationMethod,
    refs: &RefSet,
    ops: &mut OpCounts,
) -> Result<LinearModel> {
    match method {
        DerivationMethod::Lsr => lsr_counted(&refs.to_vec(), ops),
        DerivationMethod::MaxMin => max_min_counted(&refs.to_vec(), ops),
        DerivationMethod::Subsampled4 => subsampled_counted(&refs.subsampled()?, ops),
    }
}

/// Like [`derive`], but returns the flat fallback model on degenerate
/// luma. The flag reports whether the fallback was taken.
pub fn derive_or_fallback(method: DerivationMethod, refs: &RefSet) -> Result<(LinearModel, bool)> {
    match derive(method, refs) {
        Ok(m) => Ok((m, false)),
        Err(Error::DegenerateLuma { fallback }) => Ok((fallback, true)),
        Err(e) => Err(e),
    }
}

/// Run a method directly on a pair list (all pairs for LSR and Max-Min,
/// 2 or 4 pre-selected pairs for the sub-sampled method).
pub fn derive_pairs(method: DerivationMethod, pairs: &[RefPair]) -> Result<LinearModel> {
    match method {
        DerivationMethod::Lsr => derive_lsr(pairs),
        DerivationMethod::MaxMin => derive_max_min(pairs),
        DerivationMethod::Subsampled4 => derive_subsampled(pairs),
    }
}
