//! Cross-component linear-model chroma prediction: reference extraction,
//! model derivation (least squares, max-min, four-point sub-sampled), fixed
//! point arithmetic, prediction, operation counting, and the statistical
//! analyses behind the sub-sampled design.

pub mod analysis;
pub mod complexity;
pub mod derive;
pub mod error;
pub mod fixed;
pub mod predict;
pub mod reference;
pub mod report;
pub mod synth;
pub mod types;
pub mod yuv;

pub use complexity::{measured_counts, reduction, static_counts, OpCounts};
pub use derive::{
    derive, derive_lsr, derive_max_min, derive_or_fallback, derive_pairs, derive_subsampled,
    split_two_two, DerivationMethod, PairSplit,
};
pub use error::{Error, Result};
pub use fixed::{fixed_point_model, Anchor, FixedParams};
pub use predict::{predict_cclm, predict_tscpm, sse, PredBlock};
pub use reference::{
    downsample_luma_at, extract_refset, extract_refset_with, select_subsample_positions,
    Availability, RefSet,
};
pub use types::{
    Block, BlockGeom, ChromaComponent, ChromaFormat, Frame, LinearModel, Plane, PredictionMode,
    RefPair, RefPos, Side,
};
pub use yuv::{read_frame, write_csv, write_frame, CsvRecord, CsvTable, YuvSpec};
