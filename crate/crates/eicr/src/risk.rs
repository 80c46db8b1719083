//! Per-environment risks: plain and weighted cross-entropy, the gradient-norm
//! penalty on a scalar dummy classifier multiplier at w = 1, and their exact
//! logit gradients. All values are means over the batch.

use crate::env::{EnvironmentKind, SamplingPlan};
use crate::error::{EicrError, Result};

/// A scalar risk together with its gradient w.r.t. the logits.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskValue {
    pub value: f64,
    pub dlogits: Vec<Vec<f64>>,
}

/// Risk plus its penalty, with the combined gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedRisk {
    pub risk: f64,
    pub penalty: f64,
    /// risk + penalty_weight * penalty
    pub value: f64,
    pub dlogits: Vec<Vec<f64>>,
}

fn check_inputs(logits: &[Vec<f64>], labels: &[usize], weights: Option<&[f64]>) -> Result<usize> {
    if logits.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    let c = logits[0].len();
    if labels.len() != logits.len() {
        return Err(EicrError::DimensionMismatch(format!(
            "{} labels for {} logit rows",
            labels.len(),
            logits.len()
        )));
    }
    for (b, row) in logits.iter().enumerate() {
        if row.len() != c {
            return Err(EicrError::DimensionMismatch(format!(
                "logit row {b} has {} entries, expected {c}",
                row.len()
            )));
        }
        if labels[b] >= c {
            return Err(EicrError::InvalidValue(format!(
                "label {} out of range [0, {c}) at row {b}",
                labels[b]
            )));
        }
    }
    if let Some(ws) = weights {
        if ws.len() != labels.len() {
            return Err(EicrError::DimensionMismatch(format!(
                "{} weights for {} rows",
                ws.len(),
                labels.len()
            )));
        }
        for (b, &w) in ws.iter().enumerate() {
            if !(w > 0.0) {
                return Err(EicrError::InvalidValue(format!(
                    "non-positive weight {w} at row {b}"
                )));
            }
        }
    }
    Ok(c)
}

/// Softmax with max-subtraction.
pub fn softmax(row: &[f64]) -> Vec<f64> {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Mean (optionally per-instance weighted) cross-entropy with exact logit
/// gradients: row b of the gradient is `weight_b / B * (p_b - onehot(y_b))`.
pub fn cross_entropy(
    logits: &[Vec<f64>],
    labels: &[usize],
    weights: Option<&[f64]>,
) -> Result<RiskValue> {
    check_inputs(logits, labels, weights)?;
    let batch = logits.len() as f64;
    let mut value = 0.0;
    let mut dlogits = Vec::with_capacity(logits.len());
    for (b, (row, &label)) in logits.iter().zip(labels).enumerate() {
        let w = weights.map_or(1.0, |ws| ws[b]);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_sum: f64 = row.iter().map(|&s| (s - max).exp()).sum::<f64>().ln() + max;
        value += w * (log_sum - row[label]);
        let p = softmax(row);
        let mut grad: Vec<f64> = p.iter().map(|&pk| w / batch * pk).collect();
        grad[label] -= w / batch;
        dlogits.push(grad);
    }
    Ok(RiskValue {
        value: value / batch,
        dlogits,
    })
}

/// The squared batch-mean gradient of the (weighted) cross-entropy w.r.t. a
/// scalar multiplier on the logits, evaluated at multiplier 1, with its exact
/// logit gradient.
pub fn irm_penalty(
    logits: &[Vec<f64>],
    labels: &[usize],
    weights: Option<&[f64]>,
) -> Result<(f64, Vec<Vec<f64>>)> {
    check_inputs(logits, labels, weights)?;
    let batch = logits.len() as f64;
    // D = (1/B) sum_b w_b (sum_k p_bk s_bk - s_b,y_b)
    let mut d = 0.0;
    let mut probs = Vec::with_capacity(logits.len());
    let mut dots = Vec::with_capacity(logits.len());
    for (b, (row, &label)) in logits.iter().zip(labels).enumerate() {
        let w = weights.map_or(1.0, |ws| ws[b]);
        let p = softmax(row);
        let dot: f64 = p.iter().zip(row).map(|(&pk, &sk)| pk * sk).sum();
        d += w / batch * (dot - row[label]);
        probs.push(p);
        dots.push(dot);
    }
    let penalty = d * d;
    let mut dlogits = Vec::with_capacity(logits.len());
    for (b, (row, &label)) in logits.iter().zip(labels).enumerate() {
        let w = weights.map_or(1.0, |ws| ws[b]);
        let grad: Vec<f64> = (0..row.len())
            .map(|j| {
                let indicator = if j == label { 1.0 } else { 0.0 };
                let dd = w / batch * (probs[b][j] * (1.0 + row[j] - dots[b]) - indicator);
                2.0 * d * dd
            })
            .collect();
        dlogits.push(grad);
    }
    Ok((penalty, dlogits))
}

fn over_balanced_weights(labels: &[usize], plan: &SamplingPlan) -> Result<Vec<f64>> {
    labels
        .iter()
        .map(|label| {
            plan.class_weights.get(label).copied().ok_or_else(|| {
                EicrError::InvalidValue(format!("label {label} missing from sampling plan"))
            })
        })
        .collect()
}

/// Normal and Balanced apply plain cross-entropy; OverBalanced weights each
/// instance by its class's inverse frequency from the plan.
pub fn env_risk(
    env: EnvironmentKind,
    logits: &[Vec<f64>],
    labels: &[usize],
    plan: &SamplingPlan,
) -> Result<RiskValue> {
    match env {
        EnvironmentKind::Normal | EnvironmentKind::Balanced => cross_entropy(logits, labels, None),
        EnvironmentKind::OverBalanced => {
            let weights = over_balanced_weights(labels, plan)?;
            cross_entropy(logits, labels, Some(&weights))
        }
    }
}

/// Environment risk plus `penalty_weight` times its gradient-norm penalty;
/// the over-balanced environment passes its instance weights into the
/// penalty as well.
pub fn regularized_env_risk(
    env: EnvironmentKind,
    logits: &[Vec<f64>],
    labels: &[usize],
    plan: &SamplingPlan,
    penalty_weight: f64,
) -> Result<RegularizedRisk> {
    if !(penalty_weight >= 0.0) {
        return Err(EicrError::InvalidValue(format!(
            "penalty_weight {penalty_weight} must be >= 0"
        )));
    }
    let weights = match env {
        EnvironmentKind::OverBalanced => Some(over_balanced_weights(labels, plan)?),
        _ => None,
    };
    let risk = cross_entropy(logits, labels, weights.as_deref())?;
    let (penalty, pen_dlogits) = irm_penalty(logits, labels, weights.as_deref())?;
    let dlogits: Vec<Vec<f64>> = risk
        .dlogits
        .iter()
        .zip(&pen_dlogits)
        .map(|(r, p)| r.iter().zip(p).map(|(a, b)| a + penalty_weight * b).collect())
        .collect();
    Ok(RegularizedRisk {
        risk: risk.value,
        penalty,
        value: risk.value + penalty_weight * penalty,
        dlogits,
    })
}
