//! The training loop: per iteration, draw one batch per environment, compute
//! penalized risks, combine them with the curriculum coefficients,
//! backpropagate, and update parameters with momentum SGD.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curriculum::{hybrid_risk, lambda_at, AblationMode, LambdaSchedule};
use crate::data::{DatasetStats, RelationInstance};
use crate::env::{sampling_rates, EnvSampler, EnvironmentKind};
use crate::error::{EicrError, Result};
use crate::model::{self, ModelConfig, ModelParams};
use crate::risk::{regularized_env_risk, RegularizedRisk};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub total_iterations: u64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub schedule: LambdaSchedule,
    pub penalty_weight: f64,
    pub mode: AblationMode,
    pub env_subset: Vec<EnvironmentKind>,
    pub seed: u64,
    pub checkpoint_every: u64,
    /// Linear warm-up over the first `warmup_iterations` steps; 0 disables it.
    pub warmup_iterations: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_iterations == 0 {
            return Err(EicrError::InvalidConfig("total_iterations must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(EicrError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.env_subset.is_empty() {
            return Err(EicrError::InvalidConfig("env_subset must be non-empty".into()));
        }
        if !(self.learning_rate >= 0.0) || !(self.momentum >= 0.0) {
            return Err(EicrError::InvalidConfig(
                "learning_rate and momentum must be >= 0".into(),
            ));
        }
        if !(self.penalty_weight >= 0.0) {
            return Err(EicrError::InvalidConfig("penalty_weight must be >= 0".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(EicrError::InvalidConfig("checkpoint_every must be >= 1".into()));
        }
        Ok(())
    }

    fn uses(&self, env: EnvironmentKind) -> bool {
        self.env_subset.contains(&env)
    }
}

/// One logged iteration; absent environments report zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub t: u64,
    pub lambda: f64,
    pub risk_norm: f64,
    pub risk_bal: f64,
    pub risk_over: f64,
    pub pen_norm: f64,
    pub pen_bal: f64,
    pub pen_over: f64,
    pub hybrid: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub rows: Vec<HistoryRow>,
}

impl TrainHistory {
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| EicrError::io(path.display().to_string(), e);
        writeln!(w, "t,lambda,risk_norm,risk_bal,risk_over,pen_norm,pen_bal,pen_over,hybrid")
            .map_err(io_err)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.t, r.lambda, r.risk_norm, r.risk_bal, r.risk_over, r.pen_norm, r.pen_bal,
                r.pen_over, r.hybrid
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Run the training loop, invoking `on_checkpoint` every
/// `checkpoint_every` iterations and once more at the end.
pub fn train_with_checkpoints(
    dataset: &[RelationInstance],
    stats: &DatasetStats,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    mut on_checkpoint: impl FnMut(u64, &ModelParams) -> Result<()>,
) -> Result<(ModelParams, TrainHistory)> {
    train_cfg.validate()?;
    if dataset.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    let plan = sampling_rates(stats)?;
    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.seed);
    let mut params = model::init(model_cfg)?;

    // fixed environment order keeps the rng stream deterministic
    let envs: Vec<EnvironmentKind> = EnvironmentKind::ALL
        .into_iter()
        .filter(|e| train_cfg.uses(*e))
        .collect();
    let samplers: Vec<EnvSampler> = envs
        .iter()
        .map(|&e| EnvSampler::new(e, dataset, &plan))
        .collect::<Result<_>>()?;

    let mut velocity = vec![0.0; params.num_parameters()];
    let mut history = TrainHistory::default();

    for t in 1..=train_cfg.total_iterations {
        let lambda = lambda_at(&train_cfg.schedule, t);

        let mut per_env: [Option<(Vec<usize>, RegularizedRisk)>; 3] = [None, None, None];
        for (&env, sampler) in envs.iter().zip(&samplers) {
            let indices = sampler.sample_indices(dataset.len(), train_cfg.batch_size, &mut rng);
            let features: Vec<&[f64]> =
                indices.iter().map(|&i| dataset[i].features.as_slice()).collect();
            let labels: Vec<usize> = indices.iter().map(|&i| dataset[i].predicate_class).collect();
            let logits = model::forward(&params, &features)?;
            let reg = regularized_env_risk(env, &logits, &labels, &plan, train_cfg.penalty_weight)?;
            let slot = match env {
                EnvironmentKind::Normal => 0,
                EnvironmentKind::Balanced => 1,
                EnvironmentKind::OverBalanced => 2,
            };
            per_env[slot] = Some((indices, reg));
        }

        let hybrid = hybrid_risk(
            lambda,
            per_env[0].as_ref().map(|(_, r)| r),
            per_env[2].as_ref().map(|(_, r)| r),
            per_env[1].as_ref().map(|(_, r)| r),
            train_cfg.mode,
        )?;
        if !hybrid.value.is_finite() {
            return Err(EicrError::NonFiniteLoss { iteration: t });
        }

        let mut grad = vec![0.0; params.num_parameters()];
        let scaled = [
            (&per_env[0], &hybrid.scaled_dlogits_normal),
            (&per_env[1], &hybrid.scaled_dlogits_balanced),
            (&per_env[2], &hybrid.scaled_dlogits_over),
        ];
        for (slot, dlogits) in scaled {
            if let (Some((indices, _)), Some(dl)) = (slot, dlogits) {
                let features: Vec<&[f64]> =
                    indices.iter().map(|&i| dataset[i].features.as_slice()).collect();
                let g = model::backward(&params, &features, dl)?;
                for (acc, v) in grad.iter_mut().zip(g.to_flat()) {
                    *acc += v;
                }
            }
        }

        let lr = if train_cfg.warmup_iterations > 0 && t < train_cfg.warmup_iterations {
            train_cfg.learning_rate * t as f64 / train_cfg.warmup_iterations as f64
        } else {
            train_cfg.learning_rate
        };
        let mut flat = params.to_flat();
        for ((theta, v), g) in flat.iter_mut().zip(&mut velocity).zip(&grad) {
            *v = train_cfg.momentum * *v - lr * g;
            *theta += *v;
        }
        params.set_from_flat(&flat);

        let pick = |slot: usize, f: fn(&RegularizedRisk) -> f64| {
            per_env[slot].as_ref().map_or(0.0, |(_, r)| f(r))
        };
        history.rows.push(HistoryRow {
            t,
            lambda,
            risk_norm: pick(0, |r| r.risk),
            risk_bal: pick(1, |r| r.risk),
            risk_over: pick(2, |r| r.risk),
            pen_norm: pick(0, |r| r.penalty),
            pen_bal: pick(1, |r| r.penalty),
            pen_over: pick(2, |r| r.penalty),
            hybrid: hybrid.value,
        });

        if t % train_cfg.checkpoint_every == 0 || t == train_cfg.total_iterations {
            on_checkpoint(t, &params)?;
        }
    }
    Ok((params, history))
}

pub fn train(
    dataset: &[RelationInstance],
    stats: &DatasetStats,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory)> {
    train_with_checkpoints(dataset, stats, model_cfg, train_cfg, |_, _| Ok(()))
}

/// Mean unweighted cross-entropy of the model over a full dataset.
pub fn mean_cross_entropy(params: &ModelParams, dataset: &[RelationInstance]) -> Result<f64> {
    let features: Vec<&[f64]> = dataset.iter().map(|i| i.features.as_slice()).collect();
    let labels: Vec<usize> = dataset.iter().map(|i| i.predicate_class).collect();
    let logits = model::forward(params, &features)?;
    Ok(crate::risk::cross_entropy(&logits, &labels, None)?.value)
}
