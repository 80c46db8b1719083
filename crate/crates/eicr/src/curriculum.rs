//! The curriculum trade-off factor lambda(t) and the hybrid combination of
//! the three environment risks, including the ablation variants.
//!
//! The schedule is piecewise: lambda_max up to T, then the linear ramp
//! `(2T - t) / T * (lambda_max - lambda_min)` clamped below at lambda_min up
//! to 2T, then lambda_min. The ramp starts below lambda_max, so lambda jumps
//! down at t = T; that discontinuity is intentional and kept as-is.

use crate::error::{EicrError, Result};
use crate::risk::RegularizedRisk;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSchedule {
    pub period: u64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl LambdaSchedule {
    /// `lambda_min` is forced to `1 - lambda_max` so the normal/over pair
    /// keeps unit total weight.
    pub fn new(period: u64, lambda_max: f64) -> Result<Self> {
        if period == 0 {
            return Err(EicrError::InvalidConfig("schedule period T must be >= 1".into()));
        }
        if !(0.5..=1.0).contains(&lambda_max) {
            return Err(EicrError::InvalidConfig(format!(
                "lambda_max {lambda_max} outside [0.5, 1]"
            )));
        }
        Ok(LambdaSchedule {
            period,
            lambda_max,
            lambda_min: 1.0 - lambda_max,
        })
    }
}

/// Trade-off factor at iteration `t`.
pub fn lambda_at(schedule: &LambdaSchedule, t: u64) -> f64 {
    let period = schedule.period as f64;
    let t_f = t as f64;
    if t <= schedule.period {
        schedule.lambda_max
    } else if t <= 2 * schedule.period {
        let ramp = (2.0 * period - t_f) / period * (schedule.lambda_max - schedule.lambda_min);
        ramp.max(schedule.lambda_min)
    } else {
        schedule.lambda_min
    }
}

/// Which curriculum terms keep their schedule coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AblationMode {
    Full,
    NoCurriculum,
    NoNormSchedule,
    NoOverSchedule,
}

impl AblationMode {
    pub fn name(&self) -> &'static str {
        match self {
            AblationMode::Full => "full",
            AblationMode::NoCurriculum => "no_curriculum",
            AblationMode::NoNormSchedule => "no_norm_schedule",
            AblationMode::NoOverSchedule => "no_over_schedule",
        }
    }

    /// Coefficients (normal, over, balanced) for the hybrid combination.
    pub fn coefficients(&self, lambda: f64) -> (f64, f64, f64) {
        match self {
            AblationMode::Full => (lambda, 1.0 - lambda, 1.0),
            AblationMode::NoCurriculum => (1.0, 1.0, 1.0),
            AblationMode::NoNormSchedule => (1.0, 1.0 - lambda, 1.0),
            AblationMode::NoOverSchedule => (lambda, 1.0, 1.0),
        }
    }
}

/// The hybrid value plus per-environment logit gradients already scaled by
/// their coefficients. Environments excluded from the run are `None` and
/// contribute nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridRisk {
    pub value: f64,
    pub scaled_dlogits_normal: Option<Vec<Vec<f64>>>,
    pub scaled_dlogits_over: Option<Vec<Vec<f64>>>,
    pub scaled_dlogits_balanced: Option<Vec<Vec<f64>>>,
}

pub fn hybrid_risk(
    lambda: f64,
    r_norm: Option<&RegularizedRisk>,
    r_over: Option<&RegularizedRisk>,
    r_balanced: Option<&RegularizedRisk>,
    mode: AblationMode,
) -> Result<HybridRisk> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(EicrError::InvalidValue(format!("lambda {lambda} outside [0, 1]")));
    }
    let (c_norm, c_over, c_bal) = mode.coefficients(lambda);
    let scale = |risk: Option<&RegularizedRisk>, coeff: f64| -> (f64, Option<Vec<Vec<f64>>>) {
        match risk {
            None => (0.0, None),
            Some(r) => (
                coeff * r.value,
                Some(
                    r.dlogits
                        .iter()
                        .map(|row| row.iter().map(|g| coeff * g).collect())
                        .collect(),
                ),
            ),
        }
    };
    let (v_norm, g_norm) = scale(r_norm, c_norm);
    let (v_over, g_over) = scale(r_over, c_over);
    let (v_bal, g_bal) = scale(r_balanced, c_bal);
    Ok(HybridRisk {
        value: v_norm + v_over + v_bal,
        scaled_dlogits_normal: g_norm,
        scaled_dlogits_over: g_over,
        scaled_dlogits_balanced: g_bal,
    })
}
