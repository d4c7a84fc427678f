//! Operation counts for model derivation.
//!
//! [`static_counts`] gives the closed-form tallies per method.
//! [`measured_counts`] runs the derivation with a counter threaded through
//! it. Comparisons and down-samplings are counted exactly as the static
//! formulas define them. Arithmetic follows these accounting rules:
//!
//! - each down-sampled luma sample read by a method counts once;
//! - a division through the reciprocal table counts as one shift, the
//!   table multiply is not a multiplication;
//! - additions of rounding constants are not counted;
//! - the sub-sampled method keeps its couple averages as sums, so the four
//!   halving shifts of the closed form collapse into the offset's final
//!   shift (measured 3 shifts against 5);
//! - least squares counts its four accumulations and two products per
//!   pair, which is fewer additions than the closed form (that also covers
//!   the filter taps) and one more multiplication for the offset.

use std::ops::AddAssign;

use crate::derive::{derive_counted, DerivationMethod};
use crate::error::{Error, Result};
use crate::reference::RefSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounts {
    pub mult: u64,
    pub add: u64,
    pub shift: u64,
    pub cmp: u64,
    pub downsample: u64,
}

impl OpCounts {
    pub const fn new(mult: u64, add: u64, shift: u64, cmp: u64, downsample: u64) -> Self {
        Self {
            mult,
            add,
            shift,
            cmp,
            downsample,
        }
    }

    /// True when every field of `self` is at most the matching field of
    /// `other`.
    pub fn le_all(&self, other: &OpCounts) -> bool {
        self.mult <= other.mult
            && self.add <= other.add
            && self.shift <= other.shift
            && self.cmp <= other.cmp
            && self.downsample <= other.downsample
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.mult += o.mult;
        self.add += o.add;
        self.shift += o.shift;
        self.cmp += o.cmp;
        self.downsample += o.downsample;
    }
}

/// Closed-form operation counts for deriving one model from `m` pairs.
pub fn static_counts(method: DerivationMethod, m: u64) -> Result<OpCounts> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "pair count must be at least 2, got {m}"
        )));
    }
    Ok(match method {
        DerivationMethod::Lsr => OpCounts::new(2 * m + 4, 7 * m + 3, 2, 0, m),
        DerivationMethod::MaxMin => OpCounts::new(1, 3, 1, 2 * m, m),
        DerivationMethod::Subsampled4 => OpCounts::new(1, 7, 5, 4, 4),
    })
}

/// Counts recorded while deriving a model from `refs`. A degenerate luma
/// spread still yields counts.
pub fn measured_counts(method: DerivationMethod, refs: &RefSet) -> Result<OpCounts> {
    let mut ops = OpCounts::default();
    match derive_counted(method, refs, &mut ops) {
        Ok(_) | Err(Error::DegenerateLuma { .. }) => Ok(ops),
        Err(e) => Err(e),
    }
}

/// `(1 - reduced / base) * 100`, rounded half up to an integer percent.
pub fn reduction(base: u64, reduced: u64) -> Result<i64> {
    if base == 0 {
        return Err(Error::ZeroBase);
    }
    let (a, b) = (i128::from(base), i128::from(reduced));
    Ok((200 * (a - b) + a).div_euclid(2 * a) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PredictionMode;

    #[test]
    fn static_examples() {
        assert_eq!(
            static_counts(DerivationMethod::Lsr, 64).unwrap(),
            OpCounts::new(132, 451, 2, 0, 64)
        );
        assert_eq!(
            static_counts(DerivationMethod::MaxMin, 64).unwrap(),
            OpCounts::new(1, 3, 1, 128, 64)
        );
        for m in [2, 7, 64, 1000] {
            assert_eq!(
                static_counts(DerivationMethod::Subsampled4, m).unwrap(),
                OpCounts::new(1, 7, 5, 4, 4)
            );
        }
        assert!(static_counts(DerivationMethod::Lsr, 1).is_err());
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduction(128, 4).unwrap(), 97);
        assert_eq!(reduction(64, 4).unwrap(), 94);
        assert_eq!(reduction(10, 10).unwrap(), 0);
        assert_eq!(reduction(8, 1).unwrap(), 88);
        assert_eq!(reduction(4, 8).unwrap(), -100);
        assert!(matches!(reduction(0, 1), Err(Error::ZeroBase)));
    }

    fn refset(n: usize) -> RefSet {
        let v: Vec<(u16, u16)> = (0..n)
            .map(|i| ((i * 37 % 101) as u16, (i * 11 % 53) as u16))
            .collect();
        RefSet::from_pairs(PredictionMode::LmAbove, &v, &[])
    }

    #[test]
    fn measured_subsampled_on_wide_block() {
        // 32x32 block, LM: 32 above + 32 left
        let v: Vec<(u16, u16)> = (0..32).map(|i| (i as u16 * 3, i as u16)).collect();
        let refs = RefSet::from_pairs(PredictionMode::Lm, &v, &v);
        let c = measured_counts(DerivationMethod::Subsampled4, &refs).unwrap();
        assert_eq!((c.cmp, c.downsample), (4, 4));
        assert_eq!((c.mult, c.add, c.shift), (1, 7, 3));
    }

    #[test]
    fn measured_max_min() {
        for m in [2, 4, 17, 64] {
            let c = measured_counts(DerivationMethod::MaxMin, &refset(m)).unwrap();
            let s = static_counts(DerivationMethod::MaxMin, m as u64).unwrap();
            assert_eq!((c.cmp, c.downsample), (s.cmp, s.downsample));
            assert_eq!((c.mult, c.add), (1, 3));
        }
    }

    #[test]
    fn measured_two_pair_path() {
        let c = measured_counts(DerivationMethod::Subsampled4, &refset(2)).unwrap();
        assert_eq!(c.downsample, 2);
    }

    #[test]
    fn measured_lsr() {
        let c = measured_counts(DerivationMethod::Lsr, &refset(16)).unwrap();
        assert_eq!((c.cmp, c.downsample), (0, 16));
        assert_eq!(c.mult, 2 * 16 + 5);
    }

    #[test]
    fn max_min_dominates_subsampled_comparisons() {
        for m in 2..=256u64 {
            let a = static_counts(DerivationMethod::MaxMin, m).unwrap().cmp;
            let b = static_counts(DerivationMethod::Subsampled4, m).unwrap().cmp;
            assert!(a >= b);
            assert_eq!(a == b, m == 2);
        }
    }
}
