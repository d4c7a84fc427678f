//! Neighboring reference samples for a chroma block: luma down-sampling to
//! the chroma grid, mode-dependent reference ranges, and the fixed
//! sub-sample positions used by the four-point derivation.

use crate::error::{Error, Result};
use crate::types::{
    BlockGeom, ChromaComponent, Frame, Plane, PredictionMode, RefPair, RefPos, Side,
};

/// Which neighbors of a block are reconstructed, and how far the above row
/// and left column extend past the block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Availability {
    pub above: bool,
    pub left: bool,
    /// Available samples to the right of the block on the above row.
    pub above_right: usize,
    /// Available samples below the block on the left column.
    pub below_left: usize,
}

impl Availability {
    /// Availability from frame bounds. Extension runs are rounded down to a
    /// multiple of two chroma samples (the minimum block size).
    pub fn from_frame(frame: &Frame, geom: &BlockGeom) -> Self {
        let above = geom.y > 0;
        let left = geom.x > 0;
        let above_right = if above {
            frame.chroma_width().saturating_sub(geom.x + geom.w) & !1
        } else {
            0
        };
        let below_left = if left {
            frame.chroma_height().saturating_sub(geom.y + geom.h) & !1
        } else {
            0
        };
        Self {
            above,
            left,
            above_right,
            below_left,
        }
    }

    /// Only the exact above row and exact left column.
    pub fn exact(frame: &Frame, geom: &BlockGeom) -> Self {
        Self {
            above_right: 0,
            below_left: 0,
            ..Self::from_frame(frame, geom)
        }
    }
}

/// Number of above (`w'`) and left (`h'`) reference samples a mode may use.
pub fn available_counts(
    mode: PredictionMode,
    w: usize,
    h: usize,
    n_ar: usize,
    n_bl: usize,
    above_ok: bool,
    left_ok: bool,
) -> Result<(usize, usize)> {
    if w < 2 || h < 2 {
        return Err(Error::InvalidGeometry(format!(
            "block {w}x{h} smaller than 2x2"
        )));
    }
    let counts = match mode {
        PredictionMode::Lm => (if above_ok { w } else { 0 }, if left_ok { h } else { 0 }),
        PredictionMode::LmAbove => (if above_ok { w + n_ar.min(h) } else { 0 }, 0),
        PredictionMode::LmLeft => (0, if left_ok { h + n_bl.min(h) } else { 0 }),
    };
    if counts == (0, 0) {
        return Err(Error::NoReference);
    }
    Ok(counts)
}

/// Down-sampled luma at chroma position (`cx`, `cy`) using the
/// `[1, 2, 1; 1, 2, 1] / 8` filter over luma rows `2cy` and `2cy + 1`.
/// Horizontal taps outside the plane repeat the nearest column.
pub fn downsample_luma_at(luma: &Plane, cx: usize, cy: usize) -> Result<u16> {
    let (row0, row1) = (2 * cy, 2 * cy + 1);
    if row1 >= luma.height() {
        return Err(Error::OutOfPlane(format!(
            "luma rows {row0}..={row1} outside plane of height {}",
            luma.height()
        )));
    }
    let col = 2 * cx;
    if col >= luma.width() {
        return Err(Error::OutOfPlane(format!(
            "luma column {col} outside plane of width {}",
            luma.width()
        )));
    }
    let left = col.saturating_sub(1);
    let right = (col + 1).min(luma.width() - 1);
    let tap = |row: &[u16]| u32::from(row[left]) + 2 * u32::from(row[col]) + u32::from(row[right]);
    let sum = tap(luma.row(row0)) + tap(luma.row(row1));
    Ok(((sum + 4) >> 3) as u16)
}

/// Reference pairs of one block for one mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefSet {
    pub above: Vec<RefPair>,
    pub left: Vec<RefPair>,
    pub mode: PredictionMode,
    pub availability: Availability,
}

impl RefSet {
    /// Build a set from already-formed pairs. Positions are renumbered to
    /// match their place in each list.
    pub fn from_pairs(mode: PredictionMode, above: &[(u16, u16)], left: &[(u16, u16)]) -> Self {
        let mk = |side, v: &[(u16, u16)]| -> Vec<RefPair> {
            v.iter()
                .enumerate()
                .map(|(index, &(l, c))| RefPair::new(l, c, RefPos { side, index }))
                .collect()
        };
        Self {
            above: mk(Side::Above, above),
            left: mk(Side::Left, left),
            mode,
            availability: Availability {
                above: !above.is_empty(),
                left: !left.is_empty(),
                above_right: 0,
                below_left: 0,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.above.len() + self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All pairs, above row first, then left column.
    pub fn pairs(&self) -> impl Iterator<Item = &RefPair> + '_ {
        self.above.iter().chain(self.left.iter())
    }

    pub fn to_vec(&self) -> Vec<RefPair> {
        self.pairs().copied().collect()
    }

    pub fn get(&self, pos: RefPos) -> Option<&RefPair> {
        match pos.side {
            Side::Above => self.above.get(pos.index),
            Side::Left => self.left.get(pos.index),
        }
    }

    /// Pairs at the positions chosen by [`select_subsample_positions`].
    pub fn subsampled(&self) -> Result<Vec<RefPair>> {
        select_subsample_positions(self.mode, self.above.len(), self.left.len())?
            .into_iter()
            .map(|p| self.get(p).copied().ok_or(Error::NoReference))
            .collect()
    }
}

/// Reference pairs for `geom`, with availability taken from frame bounds.
pub fn extract_refset(
    frame: &Frame,
    geom: &BlockGeom,
    mode: PredictionMode,
    component: ChromaComponent,
) -> Result<RefSet> {
    extract_refset_with(
        frame,
        geom,
        mode,
        component,
        Availability::from_frame(frame, geom),
    )
}

pub fn extract_refset_with(
    frame: &Frame,
    geom: &BlockGeom,
    mode: PredictionMode,
    component: ChromaComponent,
    availability: Availability,
) -> Result<RefSet> {
    if !geom.fits(frame.chroma_width(), frame.chroma_height()) {
        return Err(Error::InvalidGeometry(format!(
            "{geom} outside chroma plane"
        )));
    }
    let (w_ref, h_ref) = available_counts(
        mode,
        geom.w,
        geom.h,
        availability.above_right,
        availability.below_left,
        availability.above && geom.y > 0,
        availability.left && geom.x > 0,
    )?;
    let chroma = frame.chroma(component);
    if geom.x + w_ref > chroma.width() || geom.y + h_ref > chroma.height() {
        return Err(Error::OutOfPlane(format!(
            "reference run {w_ref}x{h_ref} for {geom} leaves the chroma plane"
        )));
    }
    let luma = frame.luma();

    let mut above = Vec::with_capacity(w_ref);
    for i in 0..w_ref {
        let (cx, cy) = (geom.x + i, geom.y - 1);
        above.push(RefPair::new(
            downsample_luma_at(luma, cx, cy)?,
            chroma.get(cx, cy),
            RefPos::above(i),
        ));
    }
    let mut left = Vec::with_capacity(h_ref);
    for j in 0..h_ref {
        let (cx, cy) = (geom.x - 1, geom.y + j);
        left.push(RefPair::new(
            downsample_luma_at(luma, cx, cy)?,
            chroma.get(cx, cy),
            RefPos::left(j),
        ));
    }
    Ok(RefSet {
        above,
        left,
        mode,
        availability,
    })
}

fn four_point(side: Side, n: usize) -> Vec<RefPos> {
    [n / 8, 3 * n / 8, 5 * n / 8, 7 * n / 8]
        .into_iter()
        .map(|index| RefPos { side, index })
        .collect()
}

fn two_point(side: Side, n: usize) -> Vec<RefPos> {
    [n / 4, 3 * n / 4]
        .into_iter()
        .map(|index| RefPos { side, index })
        .collect()
}

fn single_side(side: Side, n: usize) -> Result<Vec<RefPos>> {
    match n {
        0 | 1 => Err(Error::NoReference),
        2 | 3 => Ok(two_point(side, n)),
        _ => Ok(four_point(side, n)),
    }
}

/// Fixed reference positions used by the four-point derivation.
///
/// A single side (LM-Above, LM-Left, or LM with one side missing) is split
/// into four parts and the middle of each is taken. LM with both sides takes
/// the middle of each half of each side. Sides with fewer than four samples
/// yield two positions.
pub fn select_subsample_positions(
    mode: PredictionMode,
    w_ref: usize,
    h_ref: usize,
) -> Result<Vec<RefPos>> {
    match mode {
        PredictionMode::LmAbove => single_side(Side::Above, w_ref),
        PredictionMode::LmLeft => single_side(Side::Left, h_ref),
        PredictionMode::Lm => match (w_ref >= 2, h_ref >= 2) {
            (true, true) => {
                let mut v = two_point(Side::Above, w_ref);
                v.extend(two_point(Side::Left, h_ref));
                Ok(v)
            }
            (true, false) => single_side(Side::Above, w_ref),
            (false, true) => single_side(Side::Left, h_ref),
            (false, false) => Err(Error::NoReference),
        },
    }
}
