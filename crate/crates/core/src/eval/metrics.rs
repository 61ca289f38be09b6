use std::cmp::Ordering;

use crate::error::{Error, Result};

fn check(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::dimension(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::Numerical(format!("score {i} is NaN")));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 {
        return Err(Error::EmptyClass("positive"));
    }
    if neg == 0 {
        return Err(Error::EmptyClass("negative"));
    }
    Ok((pos, neg))
}

/// Indices sorted by ascending score.
fn ascending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    idx
}

/// Area under the ROC curve via the Mann-Whitney rank statistic; tied
/// scores get their average rank, so a tied positive/negative pair counts 1/2.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    let idx = ascending(scores);
    // doubled ranks keep the tie average an integer
    let mut rank2_sum: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            j += 1;
        }
        // 1-based ranks i+1..=j, average (i+1+j)/2
        let rank2 = (i + 1 + j) as u128;
        let tied_pos = idx[i..j].iter().filter(|&&t| labels[t]).count() as u128;
        rank2_sum += rank2 * tied_pos;
        i = j;
    }
    let p = pos as u128;
    let numer2 = rank2_sum - p * (p + 1);
    Ok(numer2 as f64 / (2 * p * neg as u128) as f64)
}

/// Area under the precision-recall curve by the trapezoid rule over the
/// points produced at every distinct score threshold, starting from
/// `(recall 0, precision 1)`.
pub fn auc_pr(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, _) = check(scores, labels)?;
    let mut idx = ascending(scores);
    idx.reverse();
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut last_r, mut last_p) = (0.0, 1.0);
    let mut area = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            if labels[idx[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let r = tp as f64 / pos as f64;
        let p = tp as f64 / (tp + fp) as f64;
        area += (r - last_r) * (p + last_p) / 2.0;
        last_r = r;
        last_p = p;
        i = j;
    }
    Ok(area.clamp(0.0, 1.0))
}

/// `O(n^2)` pairwise AUC: fraction of positive/negative pairs ranked
/// correctly, ties counted 1/2.
pub fn auc_roc_pairwise(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    let mut numer2: u128 = 0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            if scores[i] > scores[j] {
                numer2 += 2;
            } else if scores[i] == scores[j] {
                numer2 += 1;
            }
        }
    }
    Ok(numer2 as f64 / (2 * pos as u128 * neg as u128) as f64)
}
