//! Experiment configuration: a flat `section.key = value` text format with
//! `#` comments, plus desk-scale defaults.

use std::path::{Path, PathBuf};

use crate::curriculum::{AblationMode, LambdaSchedule};
use crate::data::GeneratorConfig;
use crate::env::EnvironmentKind;
use crate::error::{EicrError, Result};
use crate::metrics::ScoringMode;
use crate::model::ModelConfig;
use crate::trainer::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub train_frac: f64,
    pub val_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub ks: Vec<usize>,
    pub scoring: ScoringMode,
}

/// Grid for the ablation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AblateConfig {
    pub env_subsets: Vec<Vec<EnvironmentKind>>,
    pub modes: Vec<AblationMode>,
    pub lambda_maxes: Vec<f64>,
    pub schedule_periods: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorConfig,
    pub split: SplitConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub ablate: AblateConfig,
    pub output_dir: PathBuf,
    pub run_seeds: Vec<u64>,
}

/// Context-pool sizes decreasing linearly from head to tail classes.
pub fn default_context_diversity(num_predicates: usize, num_object_classes: usize) -> Vec<usize> {
    let max_div = 40.min(num_object_classes * num_object_classes);
    let min_div = 2.min(max_div);
    (0..num_predicates)
        .map(|c| {
            if num_predicates == 1 {
                max_div
            } else {
                let frac = c as f64 / (num_predicates - 1) as f64;
                let div = max_div as f64 - (max_div - min_div) as f64 * frac;
                div.round() as usize
            }
        })
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        // desk-scale defaults: one tenth of the reference 120000/30000
        // iteration budget, keeping the 4:1 total-to-period ratio
        let generator = GeneratorConfig {
            num_predicates: 20,
            num_object_classes: 30,
            num_scenes: 2000,
            relations_per_scene: 10,
            zipf_exponent: 1.5,
            context_diversity: default_context_diversity(20, 30),
            feature_dim: 32,
            noise_sigma: 1.4,
            seed: 1,
        };
        ExperimentConfig {
            model: ModelConfig {
                feature_dim: generator.feature_dim,
                hidden_dim: 0,
                num_predicates: generator.num_predicates,
                init_scale: 0.1,
                seed: 1,
            },
            generator,
            split: SplitConfig {
                train_frac: 0.7,
                val_count: 100,
                seed: 1,
            },
            train: TrainConfig {
                total_iterations: 12_000,
                batch_size: 4,
                learning_rate: 3e-4,
                momentum: 0.9,
                schedule: LambdaSchedule::new(3_000, 0.9).unwrap(),
                penalty_weight: 1.0,
                mode: AblationMode::Full,
                env_subset: EnvironmentKind::ALL.to_vec(),
                seed: 1,
                checkpoint_every: 1_000,
                warmup_iterations: 0,
            },
            eval: EvalConfig {
                ks: vec![20, 50, 100],
                scoring: ScoringMode::AllPredicates,
            },
            ablate: AblateConfig {
                env_subsets: vec![EnvironmentKind::ALL.to_vec()],
                modes: vec![AblationMode::Full, AblationMode::NoCurriculum],
                lambda_maxes: vec![0.9],
                schedule_periods: vec![3_000],
            },
            output_dir: PathBuf::from("runs/default"),
            run_seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> EicrError {
    EicrError::InvalidConfig(format!("line {line}: {}", msg.into()))
}

fn parse_list<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| parse_err(line, format!("key '{key}': bad list entry '{}'", v.trim())))
        })
        .collect()
}

fn parse_env(value: &str, line: usize) -> Result<EnvironmentKind> {
    match value.trim() {
        "normal" => Ok(EnvironmentKind::Normal),
        "balanced" => Ok(EnvironmentKind::Balanced),
        "over" => Ok(EnvironmentKind::OverBalanced),
        other => Err(parse_err(line, format!("unknown environment '{other}'"))),
    }
}

fn parse_mode(value: &str, line: usize) -> Result<AblationMode> {
    match value.trim() {
        "full" => Ok(AblationMode::Full),
        "no_curriculum" => Ok(AblationMode::NoCurriculum),
        "no_norm_schedule" => Ok(AblationMode::NoNormSchedule),
        "no_over_schedule" => Ok(AblationMode::NoOverSchedule),
        other => Err(parse_err(line, format!("unknown ablation mode '{other}'"))),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EicrError::io(path.display().to_string(), e))?;
        Self::from_str_contents(&text)
    }

    pub fn from_str_contents(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut diversity_set = false;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(lineno, format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            let int = || -> Result<u64> {
                value
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("key '{key}': bad integer '{value}'")))
            };
            let float = || -> Result<f64> {
                value
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("key '{key}': bad number '{value}'")))
            };
            match key {
                "generator.num_predicates" => cfg.generator.num_predicates = int()? as usize,
                "generator.num_object_classes" => cfg.generator.num_object_classes = int()? as usize,
                "generator.num_scenes" => cfg.generator.num_scenes = int()? as usize,
                "generator.relations_per_scene" => {
                    cfg.generator.relations_per_scene = int()? as usize
                }
                "generator.zipf_exponent" => cfg.generator.zipf_exponent = float()?,
                "generator.context_diversity" => {
                    cfg.generator.context_diversity = parse_list(value, lineno, key)?;
                    diversity_set = true;
                }
                "generator.feature_dim" => cfg.generator.feature_dim = int()? as usize,
                "generator.noise_sigma" => cfg.generator.noise_sigma = float()?,
                "generator.seed" => cfg.generator.seed = int()?,
                "split.train_frac" => cfg.split.train_frac = float()?,
                "split.val_count" => cfg.split.val_count = int()? as usize,
                "split.seed" => cfg.split.seed = int()?,
                "model.hidden_dim" => cfg.model.hidden_dim = int()? as usize,
                "model.init_scale" => cfg.model.init_scale = float()?,
                "model.seed" => cfg.model.seed = int()?,
                "train.total_iterations" => cfg.train.total_iterations = int()?,
                "train.batch_size" => cfg.train.batch_size = int()? as usize,
                "train.learning_rate" => cfg.train.learning_rate = float()?,
                "train.momentum" => cfg.train.momentum = float()?,
                "train.schedule_t" => {
                    cfg.train.schedule = LambdaSchedule::new(int()?, cfg.train.schedule.lambda_max)?
                }
                "train.lambda_max" => {
                    cfg.train.schedule = LambdaSchedule::new(cfg.train.schedule.period, float()?)?
                }
                "train.penalty_weight" => cfg.train.penalty_weight = float()?,
                "train.mode" => cfg.train.mode = parse_mode(value, lineno)?,
                "train.env_subset" => {
                    cfg.train.env_subset = value
                        .split(',')
                        .map(|v| parse_env(v, lineno))
                        .collect::<Result<_>>()?
                }
                "train.seed" => cfg.train.seed = int()?,
                "train.checkpoint_every" => cfg.train.checkpoint_every = int()?,
                "train.warmup_iterations" => cfg.train.warmup_iterations = int()?,
                "eval.ks" => cfg.eval.ks = parse_list(value, lineno, key)?,
                "eval.scoring" => {
                    cfg.eval.scoring = match value {
                        "all" => ScoringMode::AllPredicates,
                        "argmax" => ScoringMode::ArgmaxPerPair,
                        other => {
                            return Err(parse_err(lineno, format!("unknown scoring mode '{other}'")))
                        }
                    }
                }
                "ablate.env_subsets" => {
                    cfg.ablate.env_subsets = value
                        .split('|')
                        .map(|subset| {
                            subset
                                .split(',')
                                .map(|v| parse_env(v, lineno))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<_>>()?
                }
                "ablate.modes" => {
                    cfg.ablate.modes = value
                        .split(',')
                        .map(|v| parse_mode(v, lineno))
                        .collect::<Result<_>>()?
                }
                "ablate.lambda_max" => cfg.ablate.lambda_maxes = parse_list(value, lineno, key)?,
                "ablate.schedule_t" => cfg.ablate.schedule_periods = parse_list(value, lineno, key)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "run_seeds" => cfg.run_seeds = parse_list(value, lineno, key)?,
                other => return Err(parse_err(lineno, format!("unknown key '{other}'"))),
            }
        }
        if !diversity_set {
            cfg.generator.context_diversity = default_context_diversity(
                cfg.generator.num_predicates,
                cfg.generator.num_object_classes,
            );
        }
        // the model follows the generator's dimensions
        cfg.model.feature_dim = cfg.generator.feature_dim;
        cfg.model.num_predicates = cfg.generator.num_predicates;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.model.validate()?;
        self.train.validate()?;
        if self.eval.ks.is_empty() {
            return Err(EicrError::InvalidConfig("eval.ks must be non-empty".into()));
        }
        if !self.eval.ks.windows(2).all(|w| w[0] < w[1]) {
            return Err(EicrError::InvalidConfig(
                "eval.ks must be strictly increasing".into(),
            ));
        }
        if self.run_seeds.is_empty() {
            return Err(EicrError::InvalidConfig("run_seeds must be non-empty".into()));
        }
        if self.ablate.env_subsets.iter().any(|s| s.is_empty())
            || self.ablate.env_subsets.is_empty()
            || self.ablate.modes.is_empty()
            || self.ablate.lambda_maxes.is_empty()
            || self.ablate.schedule_periods.is_empty()
        {
            return Err(EicrError::InvalidConfig(
                "ablate grid axes must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn diversity_decreases_head_to_tail() {
        let div = default_context_diversity(20, 30);
        assert_eq!(div.len(), 20);
        assert!(div.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(div[0], 40);
        assert_eq!(div[19], 2);
    }

    #[test]
    fn parse_round_trips_key_values() {
        let cfg = ExperimentConfig::from_str_contents(
            "# comment\n\
             generator.num_predicates = 8\n\
             generator.context_diversity = 9,8,7,6,5,4,3,2\n\
             train.batch_size = 16\n\
             train.lambda_max = 0.8\n\
             train.env_subset = normal,over\n\
             eval.ks = 5,10\n\
             run_seeds = 3,4\n",
        )
        .unwrap();
        assert_eq!(cfg.generator.num_predicates, 8);
        assert_eq!(cfg.model.num_predicates, 8);
        assert_eq!(cfg.train.batch_size, 16);
        assert_eq!(cfg.train.schedule.lambda_max, 0.8);
        assert_eq!(
            cfg.train.env_subset,
            vec![EnvironmentKind::Normal, EnvironmentKind::OverBalanced]
        );
        assert_eq!(cfg.eval.ks, vec![5, 10]);
        assert_eq!(cfg.run_seeds, vec![3, 4]);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_str_contents("train.batch_sizes = 4\n").unwrap_err();
        assert!(err.to_string().contains("train.batch_sizes"));
    }

    #[test]
    fn default_diversity_follows_overridden_cardinality() {
        let cfg = ExperimentConfig::from_str_contents("generator.num_predicates = 5\n").unwrap();
        assert_eq!(cfg.generator.context_diversity.len(), 5);
    }

    #[test]
    fn non_increasing_ks_rejected() {
        assert!(ExperimentConfig::from_str_contents("eval.ks = 10,5\n").is_err());
    }
}
