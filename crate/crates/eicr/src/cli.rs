//! Command implementations behind the `eicr` binary: dataset generation,
//! training runs, evaluation, ablation sweeps, and schedule dumps. Every
//! command is deterministic given its config and seeds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::curriculum::{lambda_at, AblationMode, LambdaSchedule};
use crate::data::{self, DatasetBounds, RelationInstance};
use crate::env::EnvironmentKind;
use crate::error::{EicrError, Result};
use crate::metrics::{self, MetricsReport};
use crate::model::{self, ModelParams};
use crate::trainer::{self, TrainConfig};

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    Ok(BufWriter::new(file))
}

fn wline(w: &mut BufWriter<File>, path: &Path, line: std::fmt::Arguments) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| EicrError::io(path.display().to_string(), e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| EicrError::io(dir.display().to_string(), e))
}

pub fn dataset_paths(out: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (out.join("train.csv"), out.join("val.csv"), out.join("test.csv"))
}

/// Generate the synthetic dataset, split it by scene, and write the train /
/// val / test CSVs plus a per-predicate stats CSV.
pub fn cmd_generate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let dataset = data::generate_synthetic(&cfg.generator)?;
    let (train, val, test) = data::split(
        &dataset,
        cfg.split.train_frac,
        cfg.split.val_count,
        cfg.split.seed,
    )?;
    let bounds = cfg.generator.bounds();
    let (train_path, val_path, test_path) = dataset_paths(out);
    data::save_dataset(&train, bounds, &train_path)?;
    data::save_dataset(&val, bounds, &val_path)?;
    data::save_dataset(&test, bounds, &test_path)?;

    let stats = data::compute_stats(&train)?;
    let stats_path = out.join("stats.csv");
    let mut w = create(&stats_path)?;
    wline(&mut w, &stats_path, format_args!("predicate,count,context_pairs"))?;
    for (&class, &count) in &stats.counts {
        let pairs = stats.context_pair_counts[&class].len();
        wline(&mut w, &stats_path, format_args!("{class},{count},{pairs}"))?;
    }
    w.flush().map_err(|e| EicrError::io(stats_path.display().to_string(), e))?;

    println!(
        "generated {} instances over {} scenes ({} train / {} val / {} test)",
        dataset.len(),
        cfg.generator.num_scenes,
        train.len(),
        val.len(),
        test.len()
    );
    println!("predicate  count  context_pairs");
    for (&class, &count) in &stats.counts {
        println!(
            "{class:>9}  {count:>5}  {:>13}",
            stats.context_pair_counts[&class].len()
        );
    }
    println!("median count: {}", stats.median_count);
    Ok(())
}

fn load_train(out: &Path) -> Result<(Vec<RelationInstance>, DatasetBounds)> {
    let (train_path, _, _) = dataset_paths(out);
    data::load_dataset(&train_path)
}

pub fn checkpoint_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("checkpoint_seed{seed}.txt"))
}

pub fn history_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("history_seed{seed}.csv"))
}

/// One training run per seed in `run_seeds`; writes a checkpoint and a
/// history CSV per seed. The seed drives both the initialization and the
/// batch sampling streams.
pub fn cmd_train(cfg: &ExperimentConfig, out: &Path, seed_override: Option<u64>) -> Result<()> {
    ensure_dir(out)?;
    let (train_set, _) = load_train(out)?;
    let stats = data::compute_stats(&train_set)?;
    let seeds: Vec<u64> = match seed_override {
        Some(s) => vec![s],
        None => cfg.run_seeds.clone(),
    };
    for &seed in &seeds {
        let mut model_cfg = cfg.model.clone();
        model_cfg.seed = seed;
        let mut train_cfg = cfg.train.clone();
        train_cfg.seed = seed;
        let ckpt = checkpoint_path(out, seed);
        let (_, history) = trainer::train_with_checkpoints(
            &train_set,
            &stats,
            &model_cfg,
            &train_cfg,
            |_, params| model::save_checkpoint(params, &ckpt),
        )?;
        history.save_csv(&history_path(out, seed))?;
        let last = history.rows.last().unwrap();
        println!(
            "seed {seed}: {} iterations, final hybrid risk {:.6}",
            train_cfg.total_iterations, last.hybrid
        );
    }
    Ok(())
}

fn percent(v: f64) -> f64 {
    100.0 * v
}

fn write_reports(reports: &[MetricsReport], out: &Path) -> Result<()> {
    let report_path = out.join("report.csv");
    let mut w = create(&report_path)?;
    wline(&mut w, &report_path, format_args!("metric,K,value"))?;
    for r in reports {
        for (name, v) in [
            ("R", r.r_at_k),
            ("mR", r.mr_at_k),
            ("F", r.f_at_k),
            ("mT", r.mt_at_k),
        ] {
            wline(&mut w, &report_path, format_args!("{name},{},{}", r.k, percent(v)))?;
        }
    }
    w.flush().map_err(|e| EicrError::io(report_path.display().to_string(), e))?;

    let class_path = out.join("per_class.csv");
    let mut w = create(&class_path)?;
    wline(&mut w, &class_path, format_args!("K,predicate,recall"))?;
    for r in reports {
        for (&c, &v) in &r.per_class_recall {
            wline(&mut w, &class_path, format_args!("{},{c},{}", r.k, percent(v)))?;
        }
    }
    w.flush().map_err(|e| EicrError::io(class_path.display().to_string(), e))?;

    let context_path = out.join("per_context.csv");
    let mut w = create(&context_path)?;
    wline(&mut w, &context_path, format_args!("K,predicate,subject,object,recall"))?;
    for r in reports {
        for (&(p, s, o), &v) in &r.per_context_recall {
            wline(&mut w, &context_path, format_args!("{},{p},{s},{o},{}", r.k, percent(v)))?;
        }
    }
    w.flush().map_err(|e| EicrError::io(context_path.display().to_string(), e))?;

    let subject_path = out.join("per_subject.csv");
    let mut w = create(&subject_path)?;
    wline(&mut w, &subject_path, format_args!("K,predicate,subject,recall"))?;
    for r in reports {
        for (&(p, s), &v) in &r.per_subject_recall {
            wline(&mut w, &subject_path, format_args!("{},{p},{s},{}", r.k, percent(v)))?;
        }
    }
    w.flush().map_err(|e| EicrError::io(subject_path.display().to_string(), e))
}

fn evaluate_params(
    cfg: &ExperimentConfig,
    params: &ModelParams,
    test_set: &[RelationInstance],
) -> Result<Vec<MetricsReport>> {
    let preds = metrics::score_dataset(params, test_set, cfg.eval.scoring)?;
    cfg.eval
        .ks
        .iter()
        .map(|&k| metrics::evaluate(&preds, test_set, k))
        .collect()
}

/// Score the test split with a checkpoint and write the report plus
/// per-class / per-context / per-subject breakdown CSVs.
pub fn cmd_evaluate(cfg: &ExperimentConfig, out: &Path, checkpoint: &Path) -> Result<()> {
    let params = model::load_checkpoint(checkpoint)?;
    if params.feature_dim != cfg.model.feature_dim
        || params.hidden_dim != cfg.model.hidden_dim
        || params.num_predicates != cfg.model.num_predicates
    {
        return Err(EicrError::DimensionMismatch(format!(
            "checkpoint dims (d={}, h={}, c={}) do not match config (d={}, h={}, c={})",
            params.feature_dim,
            params.hidden_dim,
            params.num_predicates,
            cfg.model.feature_dim,
            cfg.model.hidden_dim,
            cfg.model.num_predicates
        )));
    }
    let (_, _, test_path) = dataset_paths(out);
    let (test_set, _) = data::load_dataset(&test_path)?;
    let reports = evaluate_params(cfg, &params, &test_set)?;
    write_reports(&reports, out)?;
    for r in &reports {
        println!(
            "K={}: R {:.1}  mR {:.1}  F {:.1}  mT {:.1}",
            r.k,
            percent(r.r_at_k),
            percent(r.mr_at_k),
            percent(r.f_at_k),
            percent(r.mt_at_k)
        );
    }
    Ok(())
}

fn variant_name(
    envs: &[EnvironmentKind],
    mode: AblationMode,
    lambda_max: f64,
    period: u64,
) -> String {
    let env_names: Vec<&str> = envs.iter().map(|e| e.name()).collect();
    format!(
        "envs={}|mode={}|lmax={lambda_max}|T={period}",
        env_names.join("+"),
        mode.name()
    )
}

/// Run the configured grid of env-subset x mode x lambda_max x T x seed and
/// emit a long-format CSV plus a mean-over-seeds summary.
pub fn cmd_ablate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let (train_set, _) = load_train(out)?;
    let stats = data::compute_stats(&train_set)?;
    let (_, _, test_path) = dataset_paths(out);
    let (test_set, _) = data::load_dataset(&test_path)?;

    let long_path = out.join("ablation.csv");
    let mut long = create(&long_path)?;
    wline(&mut long, &long_path, format_args!("variant,seed,metric,K,value"))?;

    // variant -> (metric, K) -> values over seeds
    let mut summary: Vec<(String, std::collections::BTreeMap<(String, usize), Vec<f64>>)> =
        Vec::new();

    for envs in &cfg.ablate.env_subsets {
        for &mode in &cfg.ablate.modes {
            for &lambda_max in &cfg.ablate.lambda_maxes {
                for &period in &cfg.ablate.schedule_periods {
                    let variant = variant_name(envs, mode, lambda_max, period);
                    let mut cells: std::collections::BTreeMap<(String, usize), Vec<f64>> =
                        std::collections::BTreeMap::new();
                    for &seed in &cfg.run_seeds {
                        let mut model_cfg = cfg.model.clone();
                        model_cfg.seed = seed;
                        let train_cfg = TrainConfig {
                            schedule: LambdaSchedule::new(period, lambda_max)?,
                            mode,
                            env_subset: envs.clone(),
                            seed,
                            ..cfg.train.clone()
                        };
                        let (params, _) =
                            trainer::train(&train_set, &stats, &model_cfg, &train_cfg)?;
                        let reports = evaluate_params(cfg, &params, &test_set)?;
                        for r in &reports {
                            for (name, v) in [
                                ("R", r.r_at_k),
                                ("mR", r.mr_at_k),
                                ("F", r.f_at_k),
                                ("mT", r.mt_at_k),
                            ] {
                                wline(
                                    &mut long,
                                    &long_path,
                                    format_args!("{variant},{seed},{name},{},{}", r.k, percent(v)),
                                )?;
                                cells
                                    .entry((name.to_string(), r.k))
                                    .or_default()
                                    .push(percent(v));
                            }
                        }
                    }
                    summary.push((variant, cells));
                }
            }
        }
    }
    long.flush().map_err(|e| EicrError::io(long_path.display().to_string(), e))?;

    let summary_path = out.join("summary.csv");
    let mut w = create(&summary_path)?;
    wline(&mut w, &summary_path, format_args!("variant,metric,K,mean"))?;
    for (variant, cells) in &summary {
        for ((metric, k), values) in cells {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            wline(&mut w, &summary_path, format_args!("{variant},{metric},{k},{mean}"))?;
            println!("{variant}  {metric}@{k}: {mean:.1}");
        }
    }
    w.flush().map_err(|e| EicrError::io(summary_path.display().to_string(), e))
}

/// Emit `t,lambda` rows over `[0, t_max]`.
pub fn cmd_schedule_dump(period: u64, lambda_max: f64, t_max: u64, path: &Path) -> Result<()> {
    let schedule = LambdaSchedule::new(period, lambda_max)?;
    let mut w = create(path)?;
    wline(&mut w, path, format_args!("t,lambda"))?;
    for t in 0..=t_max {
        wline(&mut w, path, format_args!("{t},{}", lambda_at(&schedule, t)))?;
    }
    w.flush().map_err(|e| EicrError::io(path.display().to_string(), e))
}
