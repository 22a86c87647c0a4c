//! Agreement statistics between predicted and reference measurements.
//!
//! Standard deviations use the sample (n − 1) denominator throughout.
//! Differences are `predicted − truth`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::features::{Feature, GlobalFeature, MeasurementSet, SideFeature, Units, N_FEATURES};
use crate::mask::EyeSide;

/// LOA half-width in standard deviations.
pub const LOA_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    pub feature: String,
    pub units: Units,
    pub ids: Vec<String>,
    pub predicted: Vec<f64>,
    pub truth: Vec<f64>,
}

impl PairedSeries {
    pub fn new(
        feature: impl Into<String>,
        units: Units,
        ids: Vec<String>,
        predicted: Vec<f64>,
        truth: Vec<f64>,
    ) -> Result<Self> {
        if ids.len() != predicted.len() || ids.len() != truth.len() {
            return Err(Error::Invalid("paired series lengths differ".into()));
        }
        if ids.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self {
            feature: feature.into(),
            units,
            ids,
            predicted,
            truth,
        })
    }

    /// Pair up `(id, predicted, truth)` triples, keeping entries valid in both.
    pub fn from_pairs<'a>(
        feature: impl Into<String>,
        units: Units,
        rows: impl IntoIterator<Item = (&'a str, Option<f64>, Option<f64>)>,
    ) -> Result<Self> {
        let (mut ids, mut p, mut t) = (Vec::new(), Vec::new(), Vec::new());
        for (id, a, b) in rows {
            if let (Some(a), Some(b)) = (a, b) {
                ids.push(id.to_string());
                p.push(a);
                t.push(b);
            }
        }
        Self::new(feature, units, ids, p, t)
    }

    /// Series for registry feature `index`, matching rows by id.
    pub fn from_sets(
        predicted: &[MeasurementSet],
        truth: &[MeasurementSet],
        index: usize,
    ) -> Result<Self> {
        let units = predicted.first().ok_or(Error::EmptySeries)?.units;
        let by_id: HashMap<&str, &MeasurementSet> =
            truth.iter().map(|s| (s.id.as_str(), s)).collect();
        let name = Feature::from_index(index)
            .ok_or_else(|| Error::Invalid(format!("feature index {index}")))?
            .name();
        Self::from_pairs(
            name,
            units,
            predicted.iter().filter_map(|p| {
                by_id
                    .get(p.id.as_str())
                    .map(|t| (p.id.as_str(), p.get(index), t.get(index)))
            }),
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn differences(&self) -> Vec<f64> {
        self.predicted
            .iter()
            .zip(&self.truth)
            .map(|(p, t)| p - t)
            .collect()
    }

    pub fn abs_errors(&self) -> Vec<f64> {
        self.differences().into_iter().map(f64::abs).collect()
    }

    /// Keep only entries whose index satisfies `keep`.
    pub fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> Result<PairedSeries> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        PairedSeries::new(
            self.feature.clone(),
            self.units,
            idx.iter().map(|&i| self.ids[i].clone()).collect(),
            idx.iter().map(|&i| self.predicted[i]).collect(),
            idx.iter().map(|&i| self.truth[i]).collect(),
        )
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of a sorted slice, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaeReport {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

pub fn mae_of_errors(abs_errors: &[f64]) -> Result<MaeReport> {
    if abs_errors.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(MaeReport {
        mean: mean(abs_errors),
        sd: sample_sd(abs_errors),
        n: abs_errors.len(),
    })
}

/// Mean absolute error and the sample SD of the absolute errors.
pub fn mae(series: &PairedSeries) -> Result<MaeReport> {
    mae_of_errors(&series.abs_errors())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub loa_low: f64,
    pub loa_high: f64,
    pub pct_outside: f64,
    pub n: usize,
    /// `(mean of pair, difference)` for plotting.
    pub points: Vec<(f64, f64)>,
}

/// Bland-Altman agreement; points strictly beyond a limit count as outside.
pub fn bland_altman(series: &PairedSeries) -> Result<AgreementReport> {
    let n = series.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let d = series.differences();
    let mean_diff = mean(&d);
    let sd_diff = sample_sd(&d);
    let loa_low = mean_diff - LOA_Z * sd_diff;
    let loa_high = mean_diff + LOA_Z * sd_diff;
    let outside = d.iter().filter(|&&x| x < loa_low || x > loa_high).count();
    let points = series
        .predicted
        .iter()
        .zip(&series.truth)
        .map(|(p, t)| (0.5 * (p + t), p - t))
        .collect();
    Ok(AgreementReport {
        mean_diff,
        sd_diff,
        loa_low,
        loa_high,
        pct_outside: 100.0 * outside as f64 / n as f64,
        n,
        points,
    })
}

/// Names of the bilateral-averaged feature list (16 per-side + 4 global).
pub fn bilateral_names() -> Vec<&'static str> {
    SideFeature::ALL
        .iter()
        .map(|f| f.name())
        .chain(GlobalFeature::ALL.iter().map(|g| g.name()))
        .collect()
}

/// Average each left/right pair (or take the single valid side); globals
/// pass through. Order matches [`bilateral_names`].
pub fn bilateral_average(set: &MeasurementSet) -> Vec<(&'static str, Option<f64>)> {
    let mut out: Vec<(&'static str, Option<f64>)> = SideFeature::ALL
        .iter()
        .map(|&f| {
            let v = match (set.side(EyeSide::Right, f), set.side(EyeSide::Left, f)) {
                (Some(r), Some(l)) => Some(0.5 * (r + l)),
                (r, l) => r.or(l),
            };
            (f.name(), v)
        })
        .collect();
    out.extend(
        GlobalFeature::ALL
            .iter()
            .map(|&g| (g.name(), set.global(g))),
    );
    debug_assert_eq!(out.len(), N_FEATURES - SideFeature::ALL.len());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierFilter {
    /// Indices (into the input) that were kept, ascending.
    pub kept: Vec<usize>,
    pub removed: usize,
    pub threshold: f64,
}

/// Drop errors more than one sample SD above the mean (single pass).
/// With fewer than two values nothing is removed.
pub fn filter_outliers_1sd(abs_errors: &[f64]) -> OutlierFilter {
    if abs_errors.len() < 2 {
        return OutlierFilter {
            kept: (0..abs_errors.len()).collect(),
            removed: 0,
            threshold: f64::INFINITY,
        };
    }
    let threshold = mean(abs_errors) + sample_sd(abs_errors);
    let kept: Vec<usize> = (0..abs_errors.len())
        .filter(|&i| abs_errors[i] <= threshold)
        .collect();
    OutlierFilter {
        removed: abs_errors.len() - kept.len(),
        kept,
        threshold,
    }
}

/// Series with outlying absolute errors removed, plus the removal count.
pub fn filter_series_outliers(series: &PairedSeries) -> Result<(PairedSeries, usize)> {
    let f = filter_outliers_1sd(&series.abs_errors());
    let keep: HashSet<usize> = f.kept.iter().copied().collect();
    Ok((series.retain_indices(|i| keep.contains(&i))?, f.removed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetComparison {
    pub ours: MaeReport,
    pub baseline: MaeReport,
    pub retained: usize,
    pub total: usize,
    pub coverage: f64,
}

/// Compare two methods on the ids the baseline analysed successfully.
///
/// An id the baseline failed on is dropped from both series; so is any id
/// missing from either series. Coverage is retained / ids in `ours`.
pub fn subset_compare(
    ours: &PairedSeries,
    baseline: &PairedSeries,
    baseline_failures: &HashSet<String>,
) -> Result<SubsetComparison> {
    let base_ids: HashSet<&str> = baseline.ids.iter().map(String::as_str).collect();
    let our_ids: HashSet<&str> = ours.ids.iter().map(String::as_str).collect();
    let keep =
        |id: &str, other: &HashSet<&str>| !baseline_failures.contains(id) && other.contains(id);
    let ours_kept = ours.retain_indices(|i| keep(&ours.ids[i], &base_ids));
    let base_kept = baseline.retain_indices(|i| keep(&baseline.ids[i], &our_ids));
    let (ours_kept, base_kept) = match (ours_kept, base_kept) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(Error::EmptySeries),
    };
    let total = ours.len();
    Ok(SubsetComparison {
        ours: mae(&ours_kept)?,
        baseline: mae(&base_kept)?,
        retained: ours_kept.len(),
        total,
        coverage: ours_kept.len() as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(pred: &[f64], truth: &[f64]) -> PairedSeries {
        let ids = (0..pred.len()).map(|i| format!("f{i}")).collect();
        PairedSeries::new("x", Units::Px, ids, pred.to_vec(), truth.to_vec()).unwrap()
    }

    #[test]
    fn mae_examples() {
        let s = series(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(
            mae(&s).unwrap(),
            MaeReport {
                mean: 0.0,
                sd: 0.0,
                n: 3
            }
        );
        let s = series(&[2.0, 3.0, 5.0], &[1.0, 2.0, 3.0]);
        assert!((mae(&s).unwrap().mean - 4.0 / 3.0).abs() < 1e-12);
        let s = series(&[7.0], &[5.0]);
        assert_eq!(
            mae(&s).unwrap(),
            MaeReport {
                mean: 2.0,
                sd: 0.0,
                n: 1
            }
        );
        assert!(PairedSeries::new("x", Units::Px, vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn bland_altman_examples() {
        let s = series(&[1.0, 2.0], &[1.0, 2.0]);
        let r = bland_altman(&s).unwrap();
        assert_eq!(
            (r.mean_diff, r.loa_low, r.loa_high, r.pct_outside),
            (0.0, 0.0, 0.0, 0.0)
        );

        let s = series(&[1.0, -1.0, 1.0, -1.0], &[0.0; 4]);
        let r = bland_altman(&s).unwrap();
        assert_eq!(r.mean_diff, 0.0);
        assert!((r.sd_diff - 1.154_700_538_379_251_5).abs() < 1e-12);
        assert!((r.loa_high - 2.263_213_055_223_333).abs() < 1e-9);
        assert_eq!(r.pct_outside, 0.0);

        // with n = 4 no residual can exceed 1.5 sample SDs, so nothing is outside
        let s = series(&[0.0, 0.0, 0.0, 10.0], &[0.0; 4]);
        let r = bland_altman(&s).unwrap();
        assert_eq!(r.pct_outside, 0.0);
        assert_eq!(r.points[3], (5.0, 10.0));

        // nine zeros and a 10: mean 1, sd sqrt(10), upper LOA ~7.2
        let mut p = vec![0.0; 9];
        p.push(10.0);
        let r = bland_altman(&series(&p, &[0.0; 10])).unwrap();
        assert!((r.sd_diff - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.pct_outside, 10.0);

        assert!(bland_altman(&series(&[1.0], &[0.0])).is_err());
    }

    #[test]
    fn bilateral_examples() {
        let mut m = MeasurementSet::new("a", Units::Px);
        m.set_feature(Feature::Side(EyeSide::Left, SideFeature::Mrd1), Some(2.0));
        m.set_feature(Feature::Side(EyeSide::Right, SideFeature::Mrd1), Some(4.0));
        m.set_feature(Feature::Side(EyeSide::Right, SideFeature::Mrd2), Some(4.0));
        m.set_feature(Feature::Global(GlobalFeature::InnerCanthal), Some(33.0));
        let b = bilateral_average(&m);
        assert_eq!(b.len(), 20);
        assert_eq!(b[0], ("mrd1", Some(3.0)));
        assert_eq!(b[1], ("mrd2", Some(4.0)));
        assert_eq!(b[2], ("iss", None));
        assert_eq!(b[16], ("icd", Some(33.0)));
        assert_eq!(bilateral_names(), b.iter().map(|x| x.0).collect::<Vec<_>>());
    }

    #[test]
    fn outlier_examples() {
        let f = filter_outliers_1sd(&[2.0, 2.0, 2.0]);
        assert_eq!(f.removed, 0);
        let f = filter_outliers_1sd(&[1.0, 1.0, 1.0, 100.0]);
        assert!((f.threshold - 75.25).abs() < 1e-12);
        assert_eq!(f.removed, 1);
        assert_eq!(f.kept, vec![0, 1, 2]);
        let s = series(&[1.0, 2.0, 3.0, 50.0], &[0.0; 4]);
        let (g, removed) = filter_series_outliers(&s).unwrap();
        assert_eq!(removed, 1);
        assert!(mae(&g).unwrap().mean <= mae(&s).unwrap().mean);
    }

    #[test]
    fn subset_examples() {
        let ours = series(&[1.0, 2.0, 3.0, 4.0], &[0.0; 4]);
        let base = series(&[2.0, 2.0, 2.0, 2.0], &[0.0; 4]);
        let c = subset_compare(&ours, &base, &HashSet::new()).unwrap();
        assert_eq!(c.coverage, 1.0);
        assert_eq!(c.ours, mae(&ours).unwrap());

        let failed: HashSet<String> = ["f0".to_string(), "f1".to_string()].into();
        let c = subset_compare(&ours, &base, &failed).unwrap();
        assert_eq!(c.coverage, 0.5);
        assert_eq!(c.ours.mean, 3.5);
        assert_eq!(c.baseline.mean, 2.0);

        let all: HashSet<String> = (0..4).map(|i| format!("f{i}")).collect();
        assert!(subset_compare(&ours, &base, &all).is_err());
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), Some(2.5));
        assert_eq!(quantile_sorted(&v, 0.25), Some(1.75));
        assert_eq!(quantile_sorted(&[], 0.5), None);
    }

    #[test]
    fn from_sets_matches_ids_and_validity() {
        let mut a = MeasurementSet::new("a", Units::Px);
        let mut b = MeasurementSet::new("b", Units::Px);
        a.set(0, 1.0);
        b.set(0, 5.0);
        let mut ta = MeasurementSet::new("a", Units::Px);
        let tb = MeasurementSet::new("b", Units::Px);
        ta.set(0, 2.0);
        let s = PairedSeries::from_sets(&[a, b], &[tb, ta], 0).unwrap();
        assert_eq!(s.ids, vec!["a".to_string()]);
        assert_eq!(s.differences(), vec![-1.0]);
        assert_eq!(s.feature, "right_mrd1");
    }
}
