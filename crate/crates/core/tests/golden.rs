use std::fs;
use std::path::PathBuf;

use cclm::report::{correlation_report, ReportConfig, Sequence};
use cclm::synth::{ar1, Ar1Params};
use cclm::{
    extract_refset_with, Availability, ChromaComponent, Frame, PredictionMode, RefPair, Side,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn ar1_sequence() -> Sequence {
    let frame = ar1(128, 128, 10, Ar1Params::default(), 2024).unwrap();
    Sequence {
        name: "ar1_128x128_10bit".into(),
        frames: vec![frame],
    }
}

#[test]
fn ar1_generator_matches_fixture() {
    let mut bytes = Vec::new();
    cclm::write_frame(&ar1_sequence().frames[0], &mut bytes).unwrap();
    assert_eq!(bytes, fs::read(fixture("ar1_128x128_10bit.yuv")).unwrap());
}

#[test]
fn ar1_correlation_report_matches_golden() {
    let got = correlation_report(&ar1_sequence(), &ReportConfig::default())
        .unwrap()
        .to_bytes()
        .unwrap();
    let want = fs::read(fixture("ar1_correlation.csv")).unwrap();
    assert_eq!(
        String::from_utf8(got).unwrap(),
        String::from_utf8(want).unwrap()
    );
}

fn naive_rho(p: &[(f64, f64)]) -> Option<f64> {
    let n = p.len() as f64;
    let ml = p.iter().map(|x| x.0).sum::<f64>() / n;
    let mc = p.iter().map(|x| x.1).sum::<f64>() / n;
    let cov = p.iter().map(|x| (x.0 - ml) * (x.1 - mc)).sum::<f64>() / n;
    let vl = p.iter().map(|x| (x.0 - ml).powi(2)).sum::<f64>() / n;
    let vc = p.iter().map(|x| (x.1 - mc).powi(2)).sum::<f64>() / n;
    (vl > 0.0 && vc > 0.0).then(|| cov / (vl * vc).sqrt())
}

/// Mean squared correlation change recomputed from the raw frame with
/// explicit index arithmetic.
fn brute_force(frame: &Frame, component: ChromaComponent, n: usize, s: u32) -> (usize, f64) {
    let (mut blocks, mut sum) = (0, 0.0);
    for by in 1..frame.chroma_height() / n {
        for bx in 1..frame.chroma_width() / n {
            let geom = cclm::BlockGeom::new(bx * n, by * n, n, n).unwrap();
            let refs = extract_refset_with(
                frame,
                &geom,
                PredictionMode::Lm,
                component,
                Availability::exact(frame, &geom),
            )
            .unwrap();
            let all: Vec<RefPair> = refs.to_vec();
            let step = 1usize << s;
            let offset = if s == 0 { 0 } else { step / 2 };
            let keep =
                |p: &&RefPair| p.pos.index >= offset && (p.pos.index - offset).is_multiple_of(step);
            let sub: Vec<RefPair> = all
                .iter()
                .filter(|p| p.pos.side == Side::Above)
                .filter(keep)
                .chain(all.iter().filter(|p| p.pos.side == Side::Left).filter(keep))
                .copied()
                .collect();
            let f = |v: &[RefPair]| -> Vec<(f64, f64)> {
                v.iter()
                    .map(|p| (f64::from(p.luma), f64::from(p.chroma)))
                    .collect()
            };
            if sub.len() < 2 {
                continue;
            }
            if let (Some(r0), Some(rs)) = (naive_rho(&f(&all)), naive_rho(&f(&sub))) {
                sum += (rs - r0).powi(2);
                blocks += 1;
            }
        }
    }
    (blocks, sum / blocks as f64)
}

#[test]
fn golden_rows_agree_with_brute_force() {
    let seq = ar1_sequence();
    let text = fs::read_to_string(fixture("ar1_correlation.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let component = if f[1] == "cb" {
            ChromaComponent::Cb
        } else {
            ChromaComponent::Cr
        };
        let n: usize = f[2].parse().unwrap();
        let s: u32 = f[4].parse().unwrap();
        let blocks: usize = f[6].parse().unwrap();
        let mean: f64 = f[7].parse().unwrap();
        let (b, m) = brute_force(&seq.frames[0], component, n, s);
        assert_eq!(b, blocks, "{line}");
        assert!((m - mean).abs() <= 1e-12 * mean.max(1e-3), "{line}: {m}");
        rows += 1;
    }
    assert!(rows >= 30);
}
