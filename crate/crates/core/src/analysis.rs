//! Statistical studies: luma/chroma correlation under reference
//! sub-sampling, the separable inter-pixel correlation model and the
//! optimal reference position, model-parameter sensitivity against the
//! least-squares baseline, and residual energy.
//!
//! All moments use the population form (divide by n).

use crate::derive::{derive_pairs, DerivationMethod};
use crate::error::{Error, Result};
use crate::types::{RefPair, Side};

/// Moments and correlation coefficient of two equally long samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrStats {
    pub rho: f64,
    pub sigma_l: f64,
    pub sigma_c: f64,
    pub mu_l: f64,
    pub mu_c: f64,
    pub n: usize,
}

struct Moments {
    mu_l: f64,
    mu_c: f64,
    var_l: f64,
    var_c: f64,
    cov: f64,
}

fn moments(l: &[f64], c: &[f64]) -> Result<Moments> {
    if l.len() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} luma against {} chroma values",
            l.len(),
            c.len()
        )));
    }
    if l.len() < 2 {
        return Err(Error::TooFewPairs(format!(
            "need 2 values, got {}",
            l.len()
        )));
    }
    let n = l.len() as f64;
    let mu_l = l.iter().sum::<f64>() / n;
    let mu_c = c.iter().sum::<f64>() / n;
    let (mut var_l, mut var_c, mut cov) = (0.0, 0.0, 0.0);
    for (&x, &y) in l.iter().zip(c) {
        let (dx, dy) = (x - mu_l, y - mu_c);
        var_l += dx * dx;
        var_c += dy * dy;
        cov += dx * dy;
    }
    Ok(Moments {
        mu_l,
        mu_c,
        var_l: var_l / n,
        var_c: var_c / n,
        cov: cov / n,
    })
}

/// Pearson correlation of `l` and `c`.
pub fn correlation(l: &[f64], c: &[f64]) -> Result<CorrStats> {
    let m = moments(l, c)?;
    if m.var_l == 0.0 || m.var_c == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (sigma_l, sigma_c) = (m.var_l.sqrt(), m.var_c.sqrt());
    Ok(CorrStats {
        rho: m.cov / (sigma_l * sigma_c),
        sigma_l,
        sigma_c,
        mu_l: m.mu_l,
        mu_c: m.mu_c,
        n: l.len(),
    })
}

fn split_values(pairs: &[RefPair]) -> (Vec<f64>, Vec<f64>) {
    pairs
        .iter()
        .map(|p| (f64::from(p.luma), f64::from(p.chroma)))
        .unzip()
}

pub fn pair_correlation(pairs: &[RefPair]) -> Result<CorrStats> {
    let (l, c) = split_values(pairs);
    correlation(&l, &c)
}

/// Keep every `2^s`-th pair of each side, starting at offset `2^(s-1)`.
pub fn subsample_refs(pairs: &[RefPair], s: u32) -> Result<Vec<RefPair>> {
    if s >= usize::BITS || (1usize << s) > pairs.len() {
        return Err(Error::TooFewSamples { s });
    }
    if s == 0 {
        return Ok(pairs.to_vec());
    }
    let step = 1usize << s;
    let offset = step / 2;
    let mut out = Vec::new();
    for side in [Side::Above, Side::Left] {
        out.extend(
            pairs
                .iter()
                .filter(|p| p.pos.side == side)
                .skip(offset)
                .step_by(step)
                .copied(),
        );
    }
    if out.len() < 2 {
        return Err(Error::TooFewSamples { s });
    }
    Ok(out)
}

/// Squared change of the luma/chroma correlation caused by sub-sampling.
pub fn delta_rho(pairs: &[RefPair], s: u32) -> Result<f64> {
    let full = pair_correlation(pairs)?.rho;
    let sub = pair_correlation(&subsample_refs(pairs, s)?)?.rho;
    Ok((sub - full).powi(2))
}

/// Correlation of pixels (i, j) and (p, q) under the separable model with
/// horizontal and vertical neighbor correlations `rho_x`, `rho_y`.
pub fn pixel_correlation(rho_x: f64, rho_y: f64, i: i64, j: i64, p: i64, q: i64) -> f64 {
    rho_x.powi((j - q).unsigned_abs() as i32) * rho_y.powi((i - p).unsigned_abs() as i32)
}

/// Variance of the error when pixel (i, j) is predicted by the reference
/// above the block at horizontal offset `dx`.
pub fn pred_error_variance(rho_x: f64, rho_y: f64, i: u32, dx: i64) -> f64 {
    2.0 - 2.0 * rho_y.powi(i as i32 + 1) * rho_x.powi(dx.unsigned_abs() as i32)
}

/// Sum over a row of `n` samples of the correlation with the reference at
/// position `t`, in closed form.
pub fn position_gain(rho_x: f64, n: u32, t: u32) -> f64 {
    debug_assert!(t < n);
    let (n, t) = (n as i32, t as i32);
    (1.0 + rho_x - rho_x.powi(t + 1) - rho_x.powi(n - t)) / (1.0 - rho_x)
}

/// Total prediction-error variance of row `i` (length `n`) predicted from
/// the single reference at position `t`.
pub fn row_total_variance(rho_x: f64, rho_y: f64, i: u32, n: u32, t: u32) -> f64 {
    2.0 * f64::from(n) - 2.0 * rho_y.powi(i as i32 + 1) * position_gain(rho_x, n, t)
}

/// Reference position maximizing [`position_gain`] over a row of `n`.
pub fn optimal_position(n: u32) -> f64 {
    (f64::from(n) - 1.0) / 2.0
}

/// Model deviation from the least-squares baseline and the resulting
/// change in prediction-error variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityRecord {
    pub alpha_lsr: f64,
    pub beta_lsr: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub delta_alpha_sq: f64,
    pub sigma_l_sq: f64,
    pub delta_e_pred: f64,
    pub delta_e_meas: f64,
}

/// Least-squares parameters from population moments: cov / var and the
/// matching intercept.
pub fn lsr_from_moments(population: &[RefPair]) -> Result<(f64, f64)> {
    let (l, c) = split_values(population);
    let m = moments(&l, &c)?;
    if m.var_l == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let alpha = m.cov / m.var_l;
    Ok((alpha, m.mu_c - m.mu_l * alpha))
}

/// Mean squared prediction error of `C ≈ alpha * L + beta` over the
/// population (residual mean taken as zero).
pub fn prediction_error(population: &[RefPair], alpha: f64, beta: f64) -> f64 {
    let n = population.len() as f64;
    population
        .iter()
        .map(|p| {
            let r = f64::from(p.chroma) - alpha * f64::from(p.luma) - beta;
            r * r
        })
        .sum::<f64>()
        / n
}

/// The two correction terms relating the error of a perturbed model to the
/// baseline error: `gamma = E[(dα L + dβ)^2]` and
/// `eta = E[(α L + β - C)(dα L + dβ)]`, so that
/// `e(hat) = e(baseline) + gamma + 2 eta`.
pub fn error_terms(
    population: &[RefPair],
    baseline: (f64, f64),
    perturbed: (f64, f64),
) -> (f64, f64) {
    let (da, db) = (perturbed.0 - baseline.0, perturbed.1 - baseline.1);
    let n = population.len() as f64;
    let (mut gamma, mut eta) = (0.0, 0.0);
    for p in population {
        let (l, c) = (f64::from(p.luma), f64::from(p.chroma));
        let d = da * l + db;
        gamma += d * d;
        eta += (baseline.0 * l + baseline.1 - c) * d;
    }
    (gamma / n, eta / n)
}

/// Sensitivity record for an arbitrary model `(alpha_hat, beta_hat)`.
pub fn sensitivity_of_model(
    population: &[RefPair],
    alpha_hat: f64,
    beta_hat: f64,
) -> Result<SensitivityRecord> {
    let (l, c) = split_values(population);
    let m = moments(&l, &c)?;
    if m.var_l == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let alpha_lsr = m.cov / m.var_l;
    let beta_lsr = m.mu_c - m.mu_l * alpha_lsr;
    let delta_alpha_sq = (alpha_hat - alpha_lsr).powi(2);
    Ok(SensitivityRecord {
        alpha_lsr,
        beta_lsr,
        alpha_hat,
        beta_hat,
        delta_alpha_sq,
        sigma_l_sq: m.var_l,
        delta_e_pred: delta_alpha_sq * m.var_l,
        delta_e_meas: prediction_error(population, alpha_hat, beta_hat)
            - prediction_error(population, alpha_lsr, beta_lsr),
    })
}

/// Derive a model with `method` from `selected` and compare it with the
/// least-squares model of `population`.
pub fn sensitivity(
    selected: &[RefPair],
    population: &[RefPair],
    method: DerivationMethod,
) -> Result<SensitivityRecord> {
    if population.len() < 4 {
        return Err(Error::TooFewPairs(format!(
            "population needs 4 pairs, got {}",
            population.len()
        )));
    }
    let model = match derive_pairs(method, selected) {
        Ok(m) => m,
        Err(Error::DegenerateLuma { fallback }) => fallback,
        Err(e) => return Err(e),
    };
    sensitivity_of_model(population, model.alpha_f, model.beta_f)
}

/// Sum of squared residuals.
pub fn residual_energy(residuals: &[f64]) -> f64 {
    residuals.iter().map(|r| r * r).sum()
}

/// Relative residual-energy reduction in percent; positive is a reduction.
pub fn delta_residual_energy(e_anchor: f64, e_proposed: f64) -> Result<f64> {
    if e_anchor <= 0.0 {
        return Err(Error::ZeroAnchor);
    }
    Ok((e_anchor - e_proposed) / e_anchor * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::RefPos;

    fn lm_pairs(w: usize, h: usize) -> Vec<RefPair> {
        let mut v: Vec<RefPair> = (0..w)
            .map(|i| RefPair::new((i * 13 % 97) as u16, (i * 7 % 31) as u16, RefPos::above(i)))
            .collect();
        v.extend(
            (0..h)
                .map(|j| RefPair::new((j * 29 % 89) as u16, (j * 5 % 43) as u16, RefPos::left(j))),
        );
        v
    }

    #[test]
    fn correlation_examples() {
        let l = [1.0, 4.0, 2.0, 9.0];
        let c: Vec<f64> = l.iter().map(|x| 2.0 * x + 3.0).collect();
        assert!((correlation(&l, &c).unwrap().rho - 1.0).abs() < 1e-15);
        let c: Vec<f64> = l.iter().map(|x| -x).collect();
        assert!((correlation(&l, &c).unwrap().rho + 1.0).abs() < 1e-15);
        let s = correlation(&[0.0, 1.0, 0.0, 1.0], &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.rho, 0.0);
        assert_eq!((s.mu_l, s.sigma_l, s.n), (0.5, 0.5, 4));
        assert!(matches!(
            correlation(&[1.0, 1.0], &[0.0, 2.0]),
            Err(Error::ZeroVariance)
        ));
        assert!(correlation(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn subsample_counts() {
        assert_eq!(subsample_refs(&lm_pairs(32, 32), 4).unwrap().len(), 4);
        assert_eq!(subsample_refs(&lm_pairs(4, 4), 1).unwrap().len(), 4);
        let p = lm_pairs(8, 8);
        assert_eq!(subsample_refs(&p, 0).unwrap(), p);
        assert!(matches!(
            subsample_refs(&p, 4),
            Err(Error::TooFewSamples { s: 4 })
        ));
    }

    #[test]
    fn subsample_is_centered() {
        let p = lm_pairs(16, 16);
        let idx: Vec<(Side, usize)> = subsample_refs(&p, 2)
            .unwrap()
            .iter()
            .map(|p| (p.pos.side, p.pos.index))
            .collect();
        assert_eq!(
            idx,
            vec![
                (Side::Above, 2),
                (Side::Above, 6),
                (Side::Above, 10),
                (Side::Above, 14),
                (Side::Left, 2),
                (Side::Left, 6),
                (Side::Left, 10),
                (Side::Left, 14)
            ]
        );
    }

    #[test]
    fn delta_rho_basics() {
        let p = lm_pairs(16, 16);
        assert_eq!(delta_rho(&p, 0).unwrap(), 0.0);
        for s in 1..=3 {
            assert!(delta_rho(&p, s).unwrap() >= 0.0);
        }
        let linear: Vec<RefPair> = (0..16)
            .map(|i| {
                RefPair::new(
                    i * 3 + 1,
                    i * 6 + 9,
                    if i < 8 {
                        RefPos::above(i as usize)
                    } else {
                        RefPos::left(i as usize - 8)
                    },
                )
            })
            .collect();
        for s in 0..=2 {
            assert!(delta_rho(&linear, s).unwrap() < 1e-20);
        }
    }

    #[test]
    fn pixel_model_examples() {
        assert_eq!(pixel_correlation(0.7, 0.3, 5, 4, 5, 4), 1.0);
        assert_eq!(pixel_correlation(0.5, 0.9, 0, 0, 0, 2), 0.25);
        assert!((pixel_correlation(0.9, 0.8, 0, 0, 1, 1) - 0.72).abs() < 1e-15);
        assert!((pred_error_variance(0.4, 0.6, 0, 0) - (2.0 - 2.0 * 0.6)).abs() < 1e-15);
        assert!((pred_error_variance(0.5, 0.5, 0, 1) - 1.5).abs() < 1e-15);
        assert!((pred_error_variance(0.5, 0.5, 0, 200) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_sample_row() {
        assert!((position_gain(0.8, 1, 0) - 1.0).abs() < 1e-15);
        let v = row_total_variance(0.8, 0.6, 2, 1, 0);
        assert!((v - (2.0 - 2.0 * 0.6f64.powi(3))).abs() < 1e-15);
    }

    #[test]
    fn optimal_position_examples() {
        assert_eq!(optimal_position(9), 4.0);
        assert_eq!(optimal_position(16), 7.5);
        assert_eq!(optimal_position(1), 0.0);
    }

    #[test]
    fn sensitivity_identity_model() {
        let pop = lm_pairs(8, 8);
        let (a, b) = lsr_from_moments(&pop).unwrap();
        let r = sensitivity_of_model(&pop, a, b).unwrap();
        assert_eq!(r.delta_alpha_sq, 0.0);
        assert_eq!(r.delta_e_pred, 0.0);
        assert_eq!(r.delta_e_meas, 0.0);
    }

    #[test]
    fn sensitivity_unit_offset() {
        // luma {2,6,2,6}: mean 4, population variance 4
        let pop: Vec<RefPair> = [(2u16, 10u16), (6, 13), (2, 11), (6, 20)]
            .iter()
            .enumerate()
            .map(|(i, &(l, c))| RefPair::new(l, c, RefPos::above(i)))
            .collect();
        let (a, b) = lsr_from_moments(&pop).unwrap();
        let r = sensitivity_of_model(&pop, a + 1.0, b - 4.0).unwrap();
        assert!((r.sigma_l_sq - 4.0).abs() < 1e-12);
        assert!((r.delta_e_pred - 4.0).abs() < 1e-12);
        assert!((r.delta_e_meas - 4.0).abs() < 1e-9);
    }

    #[test]
    fn sensitivity_linear_population() {
        let pop: Vec<RefPair> = (0..8)
            .map(|i| RefPair::new(i * 10, i * 20 + 5, RefPos::above(i as usize)))
            .collect();
        let (a, b) = lsr_from_moments(&pop).unwrap();
        assert!(prediction_error(&pop, a, b) < 1e-20);
        let r = sensitivity(&pop[..4], &pop, DerivationMethod::Subsampled4).unwrap();
        assert!(r.delta_alpha_sq < 1e-20);
        let r = sensitivity(&pop, &pop, DerivationMethod::MaxMin).unwrap();
        assert!(r.delta_alpha_sq < 1e-20);
        assert!(sensitivity(&pop[..2], &pop[..3], DerivationMethod::MaxMin).is_err());
    }

    #[test]
    fn row_total_matches_direct_sum() {
        for (rx, ry, n, t, i) in [
            (0.9, 0.8, 8u32, 3u32, 0u32),
            (0.5, 0.3, 5, 0, 2),
            (0.95, 0.9, 16, 15, 1),
        ] {
            let direct: f64 = (0..n)
                .map(|j| pred_error_variance(rx, ry, i, i64::from(j) - i64::from(t)))
                .sum();
            assert!((row_total_variance(rx, ry, i, n, t) - direct).abs() < 1e-12);
            assert!((position_gain(rx, n, t) - position_gain(rx, n, n - 1 - t)).abs() < 1e-12);
        }
        let direct: f64 = (0..8).map(|j: i32| 0.9f64.powi((j - 3).abs())).sum();
        assert!((position_gain(0.9, 8, 3) - direct).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn error_variance_decreasing(rx in 0.3f64..0.99, ry in 0.3f64..0.99, i in 0u32..8, dx in 0i64..8) {
            let v = pred_error_variance(rx, ry, i, dx);
            proptest::prop_assert!(pred_error_variance(rx, ry, i, dx + 1) > v);
            proptest::prop_assert!(pred_error_variance(rx, ry, i, -dx - 1) > v);
            proptest::prop_assert!(pred_error_variance(rx, ry, i + 1, dx) > v);
        }

        #[test]
        fn delta_rho_non_negative(vals in proptest::collection::vec((0u16..1024, 0u16..1024), 16), s in 0u32..3) {
            let pairs: Vec<RefPair> = vals
                .iter()
                .enumerate()
                .map(|(k, &(l, c))| RefPair::new(l, c, if k < 8 { RefPos::above(k) } else { RefPos::left(k - 8) }))
                .collect();
            if let Ok(d) = delta_rho(&pairs, s) {
                proptest::prop_assert!(d >= 0.0);
                if s == 0 {
                    proptest::prop_assert_eq!(d, 0.0);
                }
            }
        }
    }

    #[test]
    fn residual_energy_examples() {
        assert_eq!(residual_energy(&[]), 0.0);
        assert_eq!(residual_energy(&[3.0, -4.0]), 25.0);
        assert_eq!(residual_energy(&[1.0; 4]), 4.0);
        assert_eq!(delta_residual_energy(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(delta_residual_energy(100.0, 80.0).unwrap(), 20.0);
        assert_eq!(delta_residual_energy(100.0, 120.0).unwrap(), -20.0);
        assert!(matches!(
            delta_residual_energy(0.0, 1.0),
            Err(Error::ZeroAnchor)
        ));
    }
}
