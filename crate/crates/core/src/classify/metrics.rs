use crate::error::{Error, Result};

/// Confusion counts with disease as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Confusion {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// False when precision had a zero denominator and was reported as 0.
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub confusion: Confusion,
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Metrics {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                (0.0, false)
            } else {
                (num as f64 / den as f64, true)
            }
        };
        let (accuracy, _) = ratio(c.tp + c.tn, c.total());
        let (precision, precision_defined) = ratio(c.tp, c.tp + c.fp);
        let (recall, recall_defined) = ratio(c.tp, c.tp + c.fn_);
        Metrics {
            accuracy,
            precision,
            recall,
            precision_defined,
            recall_defined,
            confusion: c,
        }
    }
}

/// Accuracy, precision and recall of hard predictions (`true` = disease).
pub fn metrics(predicted: &[bool], actual: &[bool]) -> Result<Metrics> {
    if predicted.len() != actual.len() {
        return Err(Error::Invalid("prediction/label length mismatch".into()));
    }
    if predicted.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(Metrics::from_confusion(Confusion::from_predictions(
        predicted, actual,
    )))
}

fn check_auroc_input(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Invalid("score/label length mismatch".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Invalid("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Rank-based AUROC: the probability that a random positive outscores a
/// random negative, ties counting one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_auroc_input(scores, labels)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Count (neg below, pos) pairs group by group; counts stay integral
    // (in halves), so the sum is exact.
    let mut negs_below = 0usize;
    let mut twice_concordant = 0u128;
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        let (mut gp, mut gn) = (0usize, 0usize);
        while end < idx.len() && scores[idx[end]] == scores[idx[k]] {
            if labels[idx[end]] {
                gp += 1;
            } else {
                gn += 1;
            }
            end += 1;
        }
        twice_concordant += 2 * (gp as u128 * negs_below as u128) + (gp as u128 * gn as u128);
        negs_below += gn;
        k = end;
    }
    Ok(twice_concordant as f64 / (2.0 * pos as f64 * neg as f64))
}

/// Quadratic pairwise reference for [`auroc`].
pub fn auroc_pairwise(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_auroc_input(scores, labels)?;
    let mut s = 0.0;
    for i in (0..scores.len()).filter(|&i| labels[i]) {
        for j in (0..scores.len()).filter(|&j| !labels[j]) {
            s += if scores[i] > scores[j] {
                1.0
            } else if scores[i] == scores[j] {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(s / (pos * neg) as f64)
}
