//! Per-block reports over a sequence of frames. Blocks are visited as
//! non-overlapping square tiles in raster order; partial tiles at the right
//! and bottom edges are skipped, as are blocks without references.

use crate::analysis::{pair_correlation, sensitivity, subsample_refs, SensitivityRecord};
use crate::complexity::{reduction, static_counts};
use crate::derive::{derive_or_fallback, DerivationMethod};
use crate::error::{Error, Result};
use crate::predict::{predict_cclm, predict_tscpm, sse};
use crate::reference::{extract_refset, extract_refset_with, Availability};
use crate::types::{BlockGeom, ChromaComponent, Frame, PredictionMode, RefPair};
use crate::yuv::{CsvRecord, CsvTable};

/// What to evaluate for each block.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    /// Square chroma block sizes.
    pub block_sizes: Vec<usize>,
    pub modes: Vec<PredictionMode>,
    pub methods: Vec<DerivationMethod>,
    pub s_max: u32,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            block_sizes: vec![4, 8, 16, 32],
            modes: PredictionMode::ALL.to_vec(),
            methods: DerivationMethod::ALL.to_vec(),
            s_max: 5,
        }
    }
}

impl ReportConfig {
    pub fn validate(&self) -> Result<()> {
        for &n in &self.block_sizes {
            BlockGeom::new(0, 0, n, n)?;
        }
        // ratios leaving too few pairs for a size just produce no row
        if self.s_max >= usize::BITS {
            return Err(Error::InvalidArgument(format!(
                "s-max {} too large",
                self.s_max
            )));
        }
        Ok(())
    }
}

/// Frames under a name used in the report rows.
#[derive(Clone, Debug)]
pub struct Sequence {
    pub name: String,
    pub frames: Vec<Frame>,
}

/// Full `size x size` chroma tiles of `frame`, raster order.
pub fn tiles(frame: &Frame, size: usize) -> Vec<BlockGeom> {
    let (cols, rows) = (frame.chroma_width() / size, frame.chroma_height() / size);
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (c * size, r * size)))
        .filter_map(|(x, y)| BlockGeom::new(x, y, size, size).ok())
        .collect()
}

pub const DERIVE_COLUMNS: &[&str] = &[
    "sequence",
    "frame",
    "component",
    "block_x",
    "block_y",
    "w",
    "h",
    "mode",
    "method",
    "alpha",
    "beta",
    "alpha_fx",
    "alpha_shift",
    "beta_fx",
    "fallback",
    "sse_cclm",
    "sse_tscpm",
];

/// One row per (block, component, mode, method): derived model in float
/// and fixed point, and the SSE of both prediction paths against the
/// actual chroma. The two-step path derives its model from the exact above
/// row and left column only.
pub fn derive_report(seq: &Sequence, cfg: &ReportConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let mut table = CsvTable::new(DERIVE_COLUMNS);
    for (fi, frame) in seq.frames.iter().enumerate() {
        for &size in &cfg.block_sizes {
            for geom in tiles(frame, size) {
                for component in ChromaComponent::ALL {
                    let actual = frame.chroma(component).block(&geom)?;
                    for &mode in &cfg.modes {
                        let refs = match extract_refset(frame, &geom, mode, component) {
                            Ok(r) => r,
                            Err(Error::NoReference) => continue,
                            Err(e) => return Err(e),
                        };
                        let exact = extract_refset_with(
                            frame,
                            &geom,
                            mode,
                            component,
                            Availability::exact(frame, &geom),
                        )?;
                        for &method in &cfg.methods {
                            let (model, fallback) = derive_or_fallback(method, &refs)?;
                            let (two_step, _) = derive_or_fallback(method, &exact)?;
                            let sse_cclm =
                                sse(&predict_cclm(&model, frame.luma(), &geom)?, &actual)?;
                            let sse_tscpm =
                                sse(&predict_tscpm(&two_step, frame.luma(), &geom)?, &actual)?;
                            table.records.push(
                                CsvRecord::new()
                                    .with("sequence", &seq.name)
                                    .with("frame", fi)
                                    .with("component", component.name())
                                    .with("block_x", geom.x)
                                    .with("block_y", geom.y)
                                    .with("w", geom.w)
                                    .with("h", geom.h)
                                    .with("mode", mode.name())
                                    .with("method", method.name())
                                    .with("alpha", model.alpha_f)
                                    .with("beta", model.beta_f)
                                    .with("alpha_fx", model.alpha_fx)
                                    .with("alpha_shift", model.alpha_shift)
                                    .with("beta_fx", model.beta_fx)
                                    .with("fallback", u8::from(fallback))
                                    .with("sse_cclm", sse_cclm)
                                    .with("sse_tscpm", sse_tscpm),
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(table)
}

pub const CORRELATION_COLUMNS: &[&str] = &[
    "sequence",
    "component",
    "w",
    "h",
    "s",
    "pairs",
    "blocks",
    "mean_delta_rho",
];

/// Mean squared correlation change per (component, block size, s) over
/// blocks with both exact neighbors. Blocks where either correlation is
/// undefined are left out of the mean; rows with no blocks are omitted.
pub fn correlation_report(seq: &Sequence, cfg: &ReportConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let mut table = CsvTable::new(CORRELATION_COLUMNS);
    for component in ChromaComponent::ALL {
        for &size in &cfg.block_sizes {
            let mut sets: Vec<Vec<RefPair>> = Vec::new();
            for frame in &seq.frames {
                for geom in tiles(frame, size) {
                    if geom.x == 0 || geom.y == 0 {
                        continue;
                    }
                    let refs = extract_refset_with(
                        frame,
                        &geom,
                        PredictionMode::Lm,
                        component,
                        Availability::exact(frame, &geom),
                    )?;
                    sets.push(refs.to_vec());
                }
            }
            for s in 0..=cfg.s_max {
                let mut sum = 0.0;
                let mut blocks = 0usize;
                let mut pairs = 0usize;
                for set in &sets {
                    let Ok(sub) = subsample_refs(set, s) else {
                        continue;
                    };
                    let (Ok(full), Ok(part)) = (pair_correlation(set), pair_correlation(&sub))
                    else {
                        continue;
                    };
                    pairs = sub.len();
                    sum += (part.rho - full.rho).powi(2);
                    blocks += 1;
                }
                if blocks == 0 {
                    continue;
                }
                table.records.push(
                    CsvRecord::new()
                        .with("sequence", &seq.name)
                        .with("component", component.name())
                        .with("w", size)
                        .with("h", size)
                        .with("s", s)
                        .with("pairs", pairs)
                        .with("blocks", blocks)
                        .with("mean_delta_rho", sum / blocks as f64),
                );
            }
        }
    }
    Ok(table)
}

pub const COMPLEXITY_COLUMNS: &[&str] = &[
    "method",
    "m",
    "mult",
    "add",
    "shift",
    "cmp",
    "downsample",
    "cmp_reduction_pct",
    "downsample_reduction_pct",
];

/// Static operation counts for every method at each pair count, with the
/// comparison and down-sampling reductions relative to Max-Min.
pub fn complexity_report(pair_counts: &[u64]) -> Result<CsvTable> {
    let mut table = CsvTable::new(COMPLEXITY_COLUMNS);
    for &m in pair_counts {
        let base = static_counts(DerivationMethod::MaxMin, m)?;
        for method in DerivationMethod::ALL {
            let c = static_counts(method, m)?;
            table.records.push(
                CsvRecord::new()
                    .with("method", method.name())
                    .with("m", m)
                    .with("mult", c.mult)
                    .with("add", c.add)
                    .with("shift", c.shift)
                    .with("cmp", c.cmp)
                    .with("downsample", c.downsample)
                    .with("cmp_reduction_pct", reduction(base.cmp, c.cmp)?)
                    .with(
                        "downsample_reduction_pct",
                        reduction(base.downsample, c.downsample)?,
                    ),
            );
        }
    }
    Ok(table)
}

pub const SENSITIVITY_COLUMNS: &[&str] = &[
    "sequence",
    "frame",
    "component",
    "block_x",
    "block_y",
    "w",
    "h",
    "mode",
    "method",
    "alpha_lsr",
    "beta_lsr",
    "alpha",
    "beta",
    "delta_alpha_sq",
    "sigma_l_sq",
    "delta_e_pred",
    "delta_e_meas",
];

/// Upper edges of the delta-e histogram bins; the last bin is open.
pub const DELTA_E_BINS: &[f64] = &[1.0, 4.0, 16.0, 64.0, 256.0];

pub const SUMMARY_COLUMNS: &[&str] = &[
    "method",
    "records",
    "mean_delta_alpha_sq",
    "mean_delta_e_pred",
    "mean_delta_e_meas",
    "bin_lt_1",
    "bin_lt_4",
    "bin_lt_16",
    "bin_lt_64",
    "bin_lt_256",
    "bin_ge_256",
    "below_max_min",
];

/// Per-block sensitivity of the Max-Min and sub-sampled models against the
/// least-squares model of all references, plus a per-method summary.
pub struct SensitivityReport {
    pub records: CsvTable,
    pub summary: CsvTable,
}

const SENSITIVITY_METHODS: [DerivationMethod; 2] =
    [DerivationMethod::MaxMin, DerivationMethod::Subsampled4];

pub fn sensitivity_report(seq: &Sequence, cfg: &ReportConfig) -> Result<SensitivityReport> {
    cfg.validate()?;
    let mut records = CsvTable::new(SENSITIVITY_COLUMNS);
    let mut per_method: Vec<Vec<SensitivityRecord>> = vec![Vec::new(); SENSITIVITY_METHODS.len()];
    for (fi, frame) in seq.frames.iter().enumerate() {
        for &size in &cfg.block_sizes {
            for geom in tiles(frame, size) {
                for component in ChromaComponent::ALL {
                    for &mode in &cfg.modes {
                        let refs = match extract_refset(frame, &geom, mode, component) {
                            Ok(r) => r,
                            Err(Error::NoReference) => continue,
                            Err(e) => return Err(e),
                        };
                        let population = refs.to_vec();
                        if population.len() < 4 {
                            continue;
                        }
                        for (k, method) in SENSITIVITY_METHODS.into_iter().enumerate() {
                            let selected = match method {
                                DerivationMethod::Subsampled4 => refs.subsampled()?,
                                _ => population.clone(),
                            };
                            let r = match sensitivity(&selected, &population, method) {
                                Ok(r) => r,
                                Err(Error::ZeroVariance) => continue,
                                Err(e) => return Err(e),
                            };
                            records.records.push(
                                CsvRecord::new()
                                    .with("sequence", &seq.name)
                                    .with("frame", fi)
                                    .with("component", component.name())
                                    .with("block_x", geom.x)
                                    .with("block_y", geom.y)
                                    .with("w", geom.w)
                                    .with("h", geom.h)
                                    .with("mode", mode.name())
                                    .with("method", method.name())
                                    .with("alpha_lsr", r.alpha_lsr)
                                    .with("beta_lsr", r.beta_lsr)
                                    .with("alpha", r.alpha_hat)
                                    .with("beta", r.beta_hat)
                                    .with("delta_alpha_sq", r.delta_alpha_sq)
                                    .with("sigma_l_sq", r.sigma_l_sq)
                                    .with("delta_e_pred", r.delta_e_pred)
                                    .with("delta_e_meas", r.delta_e_meas),
                            );
                            per_method[k].push(r);
                        }
                    }
                }
            }
        }
    }

    let mean = |v: &[SensitivityRecord], f: fn(&SensitivityRecord) -> f64| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().map(f).sum::<f64>() / v.len() as f64
        }
    };
    let max_min_mean = mean(&per_method[0], |r| r.delta_alpha_sq);
    let mut summary = CsvTable::new(SUMMARY_COLUMNS);
    for (k, method) in SENSITIVITY_METHODS.into_iter().enumerate() {
        let v = &per_method[k];
        let mut bins = vec![0usize; DELTA_E_BINS.len() + 1];
        for r in v {
            let b = DELTA_E_BINS
                .iter()
                .position(|&hi| r.delta_e_pred < hi)
                .unwrap_or(DELTA_E_BINS.len());
            bins[b] += 1;
        }
        let mean_da = mean(v, |r| r.delta_alpha_sq);
        let mut row = CsvRecord::new()
            .with("method", method.name())
            .with("records", v.len())
            .with("mean_delta_alpha_sq", mean_da)
            .with("mean_delta_e_pred", mean(v, |r| r.delta_e_pred))
            .with("mean_delta_e_meas", mean(v, |r| r.delta_e_meas));
        for (name, count) in SUMMARY_COLUMNS[5..11].iter().zip(&bins) {
            row.push(name, count);
        }
        let flag = match method {
            DerivationMethod::MaxMin => "-".to_string(),
            _ => (mean_da <= max_min_mean).to_string(),
        };
        summary.records.push(row.with("below_max_min", flag));
    }
    Ok(SensitivityReport { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn seq(frames: Vec<Frame>) -> Sequence {
        Sequence {
            name: "t".into(),
            frames,
        }
    }

    #[test]
    fn tiles_skip_partial() {
        let f = synth::constant(40, 24, 8, 1, 1, 1).unwrap();
        let t = tiles(&f, 8);
        assert_eq!(t.len(), 2);
        assert_eq!((t[1].x, t[1].y), (8, 0));
        assert!(tiles(&f, 16).is_empty());
    }

    #[test]
    fn derive_small_frame_has_header_only() {
        let f = synth::constant(8, 8, 8, 1, 1, 1).unwrap();
        let cfg = ReportConfig {
            block_sizes: vec![8],
            s_max: 3,
            ..ReportConfig::default()
        };
        let t = derive_report(&seq(vec![f]), &cfg).unwrap();
        assert!(t.records.is_empty());
        assert_eq!(
            t.to_bytes().unwrap(),
            format!("{}\n", DERIVE_COLUMNS.join(",")).into_bytes()
        );
    }

    #[test]
    fn linear_frame_reports() {
        let f = synth::exact_linear(64, 64, 8).unwrap();
        let cfg = ReportConfig::default();
        let s = seq(vec![f]);
        let t = derive_report(&s, &cfg).unwrap();
        assert!(!t.records.is_empty());
        for r in &t.records {
            assert_eq!(r.get("sse_cclm"), Some("0"), "{r:?}");
            assert_eq!(r.get("sse_tscpm"), Some("0"), "{r:?}");
        }
        let c = correlation_report(&s, &cfg).unwrap();
        for r in &c.records {
            let v: f64 = r.get("mean_delta_rho").unwrap().parse().unwrap();
            assert!(v < 1e-20);
        }
        let sens = sensitivity_report(&s, &cfg).unwrap();
        for r in &sens.records.records {
            let v: f64 = r.get("delta_alpha_sq").unwrap().parse().unwrap();
            assert!(v < 1e-20);
        }
    }

    #[test]
    fn complexity_rows() {
        let t = complexity_report(&[64]).unwrap();
        let sub = &t.records[2];
        assert_eq!(sub.get("cmp_reduction_pct"), Some("97"));
        assert_eq!(sub.get("downsample_reduction_pct"), Some("94"));
        assert!(complexity_report(&[1]).is_err());
    }

    #[test]
    fn config_validated() {
        let bad = |cfg: ReportConfig| cfg.validate().is_err();
        assert!(bad(ReportConfig {
            block_sizes: vec![6],
            ..ReportConfig::default()
        }));
        assert!(bad(ReportConfig {
            s_max: 64,
            ..ReportConfig::default()
        }));
        assert!(!bad(ReportConfig {
            block_sizes: vec![2, 4],
            ..ReportConfig::default()
        }));
    }
}
