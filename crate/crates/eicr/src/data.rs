//! Synthetic relation datasets with independent class- and context-imbalance
//! dials, dataset statistics, on-disk CSV formats, and scene-level splits.
//!
//! The generator draws each instance's predicate from a Zipf prior (class
//! imbalance) and its subject-object pair from a per-predicate pool whose size
//! is configurable (context imbalance). Features are
//! `prototype(predicate) + signature(subject, object) + N(0, sigma^2)`, so a
//! predicate with a single context pair collapses to one feature vector when
//! the noise is switched off.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{EicrError, Result};

/// One ground-truth relation: a (subject, predicate, object) triplet plus the
/// extracted feature vector standing in for the backbone output.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationInstance {
    pub scene_id: u64,
    pub subject_class: usize,
    pub object_class: usize,
    pub predicate_class: usize,
    pub features: Vec<f64>,
}

/// Declared class ranges carried in the dataset file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetBounds {
    pub num_predicates: usize,
    pub num_object_classes: usize,
}

/// Knobs for the synthetic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub num_predicates: usize,
    pub num_object_classes: usize,
    pub num_scenes: usize,
    pub relations_per_scene: usize,
    /// Exponent of the Zipf prior over predicates; larger means more skew.
    pub zipf_exponent: f64,
    /// Number of distinct subject-object pairs available to each predicate,
    /// indexed by predicate class.
    pub context_diversity: Vec<usize>,
    pub feature_dim: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_predicates == 0 {
            return Err(EicrError::InvalidConfig("num_predicates must be positive".into()));
        }
        if self.num_object_classes == 0 {
            return Err(EicrError::InvalidConfig("num_object_classes must be positive".into()));
        }
        if self.num_scenes == 0 {
            return Err(EicrError::InvalidConfig("num_scenes must be positive".into()));
        }
        if self.relations_per_scene == 0 {
            return Err(EicrError::InvalidConfig("relations_per_scene must be positive".into()));
        }
        if !(self.zipf_exponent > 0.0) {
            return Err(EicrError::InvalidConfig("zipf_exponent must be > 0".into()));
        }
        if self.feature_dim == 0 {
            return Err(EicrError::InvalidConfig("feature_dim must be positive".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(EicrError::InvalidConfig("noise_sigma must be >= 0".into()));
        }
        if self.context_diversity.len() != self.num_predicates {
            return Err(EicrError::InvalidConfig(format!(
                "context_diversity has {} entries, expected {}",
                self.context_diversity.len(),
                self.num_predicates
            )));
        }
        let max_pairs = self.num_object_classes * self.num_object_classes;
        for (c, &div) in self.context_diversity.iter().enumerate() {
            if div == 0 {
                return Err(EicrError::InvalidConfig(format!(
                    "context_diversity[{c}] must be positive"
                )));
            }
            if div > max_pairs {
                return Err(EicrError::InvalidConfig(format!(
                    "context_diversity[{c}] = {div} exceeds num_object_classes^2 = {max_pairs}"
                )));
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> DatasetBounds {
        DatasetBounds {
            num_predicates: self.num_predicates,
            num_object_classes: self.num_object_classes,
        }
    }
}

/// Per-predicate counts, their median, and per-predicate context-pair counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub counts: BTreeMap<usize, u64>,
    /// Median of the nonzero per-predicate counts; even cardinality takes the
    /// mean of the two central values.
    pub median_count: f64,
    pub context_pair_counts: BTreeMap<usize, BTreeMap<(usize, usize), u64>>,
}

/// Normalized Zipf weights over `n` ranks with the given exponent.
pub fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-exponent)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn draw_from_cdf(cdf: &[f64], u: f64) -> usize {
    match cdf.binary_search_by(|p| p.partial_cmp(&u).unwrap()) {
        Ok(i) => (i + 1).min(cdf.len() - 1),
        Err(i) => i.min(cdf.len() - 1),
    }
}

/// Generate a synthetic dataset. Deterministic given `cfg.seed`.
pub fn generate_synthetic(cfg: &GeneratorConfig) -> Result<Vec<RelationInstance>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let c = cfg.num_predicates;
    let d = cfg.feature_dim;
    let n_obj = cfg.num_object_classes;

    let weights = zipf_weights(c, cfg.zipf_exponent);
    let mut cdf = Vec::with_capacity(c);
    let mut acc = 0.0;
    for w in &weights {
        acc += w;
        cdf.push(acc);
    }

    // Predicate prototypes and per-pair signatures, drawn once.
    let prototypes: Vec<Vec<f64>> = (0..c)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let signatures: Vec<Vec<f64>> = (0..n_obj * n_obj)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();

    // Context pools are prefixes of one shared shuffled pair list, so a
    // low-diversity predicate's pairs also occur under high-diversity ones.
    // The shared pairs carry the class prior as a spurious context signal,
    // the confounded regime the environments are meant to break.
    let mut all_pairs: Vec<usize> = (0..n_obj * n_obj).collect();
    all_pairs.shuffle(&mut rng);
    let pools: Vec<Vec<(usize, usize)>> = cfg
        .context_diversity
        .iter()
        .map(|&div| {
            all_pairs[..div]
                .iter()
                .map(|&i| (i / n_obj, i % n_obj))
                .collect()
        })
        .collect();

    let mut dataset = Vec::with_capacity(cfg.num_scenes * cfg.relations_per_scene);
    for scene_id in 0..cfg.num_scenes as u64 {
        for _ in 0..cfg.relations_per_scene {
            let pred = draw_from_cdf(&cdf, rng.gen::<f64>());
            let &(subj, obj) = pools[pred].choose(&mut rng).expect("non-empty pool");
            let pair_idx = subj * n_obj + obj;
            let features: Vec<f64> = (0..d)
                .map(|j| {
                    let noise: f64 = rng.sample(StandardNormal);
                    prototypes[pred][j] + signatures[pair_idx][j] + cfg.noise_sigma * noise
                })
                .collect();
            dataset.push(RelationInstance {
                scene_id,
                subject_class: subj,
                object_class: obj,
                predicate_class: pred,
                features,
            });
        }
    }
    Ok(dataset)
}

/// Tally per-predicate and per-context counts and the median nonzero count.
pub fn compute_stats(dataset: &[RelationInstance]) -> Result<DatasetStats> {
    if dataset.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut context_pair_counts: BTreeMap<usize, BTreeMap<(usize, usize), u64>> = BTreeMap::new();
    for inst in dataset {
        *counts.entry(inst.predicate_class).or_insert(0) += 1;
        *context_pair_counts
            .entry(inst.predicate_class)
            .or_default()
            .entry((inst.subject_class, inst.object_class))
            .or_insert(0) += 1;
    }
    let median_count = median_of_counts(&counts);
    Ok(DatasetStats {
        counts,
        median_count,
        context_pair_counts,
    })
}

/// Median of the positive counts; even cardinality averages the two central
/// values.
pub fn median_of_counts(counts: &BTreeMap<usize, u64>) -> f64 {
    let mut nonzero: Vec<u64> = counts.values().copied().filter(|&n| n > 0).collect();
    nonzero.sort_unstable();
    let n = nonzero.len();
    assert!(n > 0, "median undefined for all-zero counts");
    if n % 2 == 1 {
        nonzero[n / 2] as f64
    } else {
        (nonzero[n / 2 - 1] + nonzero[n / 2]) as f64 / 2.0
    }
}

const META_PREFIX: &str = "# num_predicates=";

/// Write the dataset CSV: a `#` metadata line with the declared class ranges,
/// then `scene_id,subject,object,predicate,feat_0,...`. Floats are printed
/// with 17 significant digits so the round trip is exact.
pub fn save_dataset(dataset: &[RelationInstance], bounds: DatasetBounds, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let d = dataset.first().map_or(0, |i| i.features.len());
    let write = |w: &mut BufWriter<File>, s: String| -> Result<()> {
        w.write_all(s.as_bytes())
            .map_err(|e| EicrError::io(path.display().to_string(), e))
    };
    write(
        &mut w,
        format!(
            "{}{} num_object_classes={}\n",
            META_PREFIX, bounds.num_predicates, bounds.num_object_classes
        ),
    )?;
    let mut header = String::from("scene_id,subject,object,predicate");
    for j in 0..d {
        header.push_str(&format!(",feat_{j}"));
    }
    header.push('\n');
    write(&mut w, header)?;
    for inst in dataset {
        let mut row = format!(
            "{},{},{},{}",
            inst.scene_id, inst.subject_class, inst.object_class, inst.predicate_class
        );
        for &f in &inst.features {
            row.push_str(&format!(",{f:.16e}"));
        }
        row.push('\n');
        write(&mut w, row)?;
    }
    w.flush()
        .map_err(|e| EicrError::io(path.display().to_string(), e))
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> EicrError {
    EicrError::MalformedRow {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Read a dataset CSV written by [`save_dataset`]. Every row is validated
/// against the header-declared class ranges and the feature dimension;
/// failures report the offending line and field.
pub fn load_dataset(path: &Path) -> Result<(Vec<RelationInstance>, DatasetBounds)> {
    let file = File::open(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, meta) = lines
        .next()
        .ok_or_else(|| malformed(path, 1, "empty file"))?;
    let meta = meta.map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let bounds = parse_meta(&meta).ok_or_else(|| malformed(path, 1, "missing metadata line"))?;

    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(path, 2, "missing header"))?;
    let header = header.map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 4 || cols[..4] != ["scene_id", "subject", "object", "predicate"] {
        return Err(malformed(path, 2, "unexpected header"));
    }
    let d = cols.len() - 4;

    let mut dataset = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| EicrError::io(path.display().to_string(), e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 + d {
            return Err(malformed(
                path,
                lineno,
                format!("expected {} fields, found {}", 4 + d, fields.len()),
            ));
        }
        let parse_int = |field: usize, name: &str| -> Result<usize> {
            fields[field]
                .parse::<usize>()
                .map_err(|_| malformed(path, lineno, format!("field {name}: not an integer")))
        };
        let scene_id = fields[0]
            .parse::<u64>()
            .map_err(|_| malformed(path, lineno, "field scene_id: not an integer"))?;
        let subject_class = parse_int(1, "subject")?;
        let object_class = parse_int(2, "object")?;
        let predicate_class = parse_int(3, "predicate")?;
        if subject_class >= bounds.num_object_classes {
            return Err(malformed(
                path,
                lineno,
                format!("field subject: {subject_class} out of range [0, {})", bounds.num_object_classes),
            ));
        }
        if object_class >= bounds.num_object_classes {
            return Err(malformed(
                path,
                lineno,
                format!("field object: {object_class} out of range [0, {})", bounds.num_object_classes),
            ));
        }
        if predicate_class >= bounds.num_predicates {
            return Err(malformed(
                path,
                lineno,
                format!("field predicate: {predicate_class} out of range [0, {})", bounds.num_predicates),
            ));
        }
        let mut features = Vec::with_capacity(d);
        for (j, raw) in fields[4..].iter().enumerate() {
            let v = raw
                .parse::<f64>()
                .map_err(|_| malformed(path, lineno, format!("field feat_{j}: not a number")))?;
            if !v.is_finite() {
                return Err(malformed(path, lineno, format!("field feat_{j}: not finite")));
            }
            features.push(v);
        }
        dataset.push(RelationInstance {
            scene_id,
            subject_class,
            object_class,
            predicate_class,
            features,
        });
    }
    Ok((dataset, bounds))
}

fn parse_meta(line: &str) -> Option<DatasetBounds> {
    let rest = line.strip_prefix(META_PREFIX)?;
    let mut parts = rest.split(" num_object_classes=");
    let num_predicates = parts.next()?.parse().ok()?;
    let num_object_classes = parts.next()?.parse().ok()?;
    Some(DatasetBounds {
        num_predicates,
        num_object_classes,
    })
}

/// Split a dataset by scene id into (train, val, test). Scenes never straddle
/// splits; `val_count` scenes are carved out of the train partition.
pub fn split(
    dataset: &[RelationInstance],
    train_frac: f64,
    val_count: usize,
    seed: u64,
) -> Result<(Vec<RelationInstance>, Vec<RelationInstance>, Vec<RelationInstance>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(EicrError::InvalidValue(format!(
            "train_frac {train_frac} outside (0, 1)"
        )));
    }
    let mut scenes: Vec<u64> = dataset.iter().map(|i| i.scene_id).collect();
    scenes.sort_unstable();
    scenes.dedup();
    let n = scenes.len();
    let n_trainval = ((train_frac * n as f64).round() as usize).clamp(1, n);
    if val_count >= n_trainval {
        return Err(EicrError::InvalidValue(format!(
            "val_count {val_count} not smaller than train partition of {n_trainval} scenes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    scenes.shuffle(&mut rng);
    let train_scenes: std::collections::HashSet<u64> =
        scenes[..n_trainval - val_count].iter().copied().collect();
    let val_scenes: std::collections::HashSet<u64> =
        scenes[n_trainval - val_count..n_trainval].iter().copied().collect();

    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut test = Vec::new();
    for inst in dataset {
        if train_scenes.contains(&inst.scene_id) {
            train.push(inst.clone());
        } else if val_scenes.contains(&inst.scene_id) {
            val.push(inst.clone());
        } else {
            test.push(inst.clone());
        }
    }
    Ok((train, val, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn small_cfg() -> GeneratorConfig {
        GeneratorConfig {
            num_predicates: 4,
            num_object_classes: 6,
            num_scenes: 50,
            relations_per_scene: 5,
            zipf_exponent: 1.0,
            context_diversity: vec![8, 4, 2, 1],
            feature_dim: 3,
            noise_sigma: 0.5,
            seed: 7,
        }
    }

    #[test]
    fn single_class_forces_identity() {
        let cfg = GeneratorConfig {
            num_predicates: 1,
            context_diversity: vec![4],
            ..small_cfg()
        };
        let data = generate_synthetic(&cfg).unwrap();
        assert_eq!(data.len(), 250);
        assert!(data.iter().all(|i| i.predicate_class == 0));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = small_cfg();
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zipf_marginals_match_analytic_weights() {
        let cfg = GeneratorConfig {
            num_predicates: 20,
            num_object_classes: 30,
            num_scenes: 2000,
            relations_per_scene: 10,
            zipf_exponent: 1.5,
            context_diversity: vec![10; 20],
            feature_dim: 2,
            noise_sigma: 0.0,
            seed: 3,
        };
        let data = generate_synthetic(&cfg).unwrap();
        assert_eq!(data.len(), 20_000);
        let mut hist = vec![0usize; 20];
        for inst in &data {
            hist[inst.predicate_class] += 1;
        }
        let expected = zipf_weights(20, 1.5);
        for c in 0..20 {
            let freq = hist[c] as f64 / data.len() as f64;
            assert!(
                (freq - expected[c]).abs() <= 0.02,
                "class {c}: empirical {freq} vs zipf {}",
                expected[c]
            );
        }
    }

    #[test]
    fn context_pairs_stay_inside_assigned_pools() {
        let cfg = small_cfg();
        let data = generate_synthetic(&cfg).unwrap();
        let mut pairs_per_pred: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); 4];
        for inst in &data {
            pairs_per_pred[inst.predicate_class].insert((inst.subject_class, inst.object_class));
        }
        for (c, pairs) in pairs_per_pred.iter().enumerate() {
            assert!(pairs.len() <= cfg.context_diversity[c]);
        }
    }

    #[test]
    fn context_collapse_without_noise() {
        let cfg = GeneratorConfig {
            noise_sigma: 0.0,
            context_diversity: vec![1; 4],
            ..small_cfg()
        };
        let data = generate_synthetic(&cfg).unwrap();
        for c in 0..4 {
            let feats: Vec<&Vec<f64>> = data
                .iter()
                .filter(|i| i.predicate_class == c)
                .map(|i| &i.features)
                .collect();
            for f in &feats {
                assert_eq!(*f, feats[0]);
            }
        }
    }

    #[test]
    fn invalid_config_reports_which_invariant() {
        let cfg = GeneratorConfig {
            context_diversity: vec![100, 4, 2, 1],
            ..small_cfg()
        };
        let err = generate_synthetic(&cfg).unwrap_err();
        assert!(err.to_string().contains("context_diversity[0]"));
    }

    #[test]
    fn median_odd() {
        let counts = BTreeMap::from([(0, 5), (1, 10), (2, 100)]);
        assert_eq!(median_of_counts(&counts), 10.0);
    }

    #[test]
    fn median_even() {
        let counts = BTreeMap::from([(0, 4), (1, 8), (2, 10), (3, 100)]);
        assert_eq!(median_of_counts(&counts), 9.0);
    }

    #[test]
    fn median_invariant_under_label_permutation() {
        let counts = BTreeMap::from([(0, 4), (1, 8), (2, 10), (3, 100)]);
        let permuted = BTreeMap::from([(9, 4), (2, 8), (5, 10), (0, 100)]);
        assert_eq!(median_of_counts(&counts), median_of_counts(&permuted));
    }

    #[test]
    fn stats_match_single_pass_tally() {
        let data = generate_synthetic(&small_cfg()).unwrap();
        let stats = compute_stats(&data).unwrap();
        // independent tally
        let mut counts = BTreeMap::new();
        for inst in &data {
            *counts.entry(inst.predicate_class).or_insert(0u64) += 1;
        }
        assert_eq!(stats.counts, counts);
        assert_eq!(stats.counts.values().sum::<u64>(), data.len() as u64);
    }

    #[test]
    fn stats_reject_empty_dataset() {
        assert!(matches!(compute_stats(&[]), Err(EicrError::EmptyDataset)));
    }

    #[test]
    fn save_load_round_trip() {
        let cfg = small_cfg();
        let data = generate_synthetic(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        save_dataset(&data, cfg.bounds(), &path).unwrap();
        let (loaded, bounds) = load_dataset(&path).unwrap();
        assert_eq!(loaded, data);
        assert_eq!(bounds, cfg.bounds());
    }

    #[test]
    fn out_of_range_predicate_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(
            &path,
            "# num_predicates=2 num_object_classes=3\n\
             scene_id,subject,object,predicate,feat_0\n\
             0,1,2,0,1.5\n\
             1,0,1,5,2.0\n",
        )
        .unwrap();
        let err = load_dataset(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":4:"), "got {msg}");
        assert!(msg.contains("predicate"), "got {msg}");
    }

    #[test]
    fn handwritten_fixture_parses_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture.csv");
        std::fs::write(
            &path,
            "# num_predicates=3 num_object_classes=4\n\
             scene_id,subject,object,predicate,feat_0,feat_1\n\
             0,1,2,0,0.5,-1.25\n\
             0,3,0,2,2.0,0.0\n\
             7,2,2,1,-0.125,3.5\n",
        )
        .unwrap();
        let (loaded, _) = load_dataset(&path).unwrap();
        assert_eq!(
            loaded,
            vec![
                RelationInstance {
                    scene_id: 0,
                    subject_class: 1,
                    object_class: 2,
                    predicate_class: 0,
                    features: vec![0.5, -1.25],
                },
                RelationInstance {
                    scene_id: 0,
                    subject_class: 3,
                    object_class: 0,
                    predicate_class: 2,
                    features: vec![2.0, 0.0],
                },
                RelationInstance {
                    scene_id: 7,
                    subject_class: 2,
                    object_class: 2,
                    predicate_class: 1,
                    features: vec![-0.125, 3.5],
                },
            ]
        );
    }

    #[test]
    fn split_counts_match_fractions() {
        let mut data = Vec::new();
        for scene in 0..10u64 {
            data.push(RelationInstance {
                scene_id: scene,
                subject_class: 0,
                object_class: 0,
                predicate_class: 0,
                features: vec![0.0],
            });
        }
        let (train, val, test) = split(&data, 0.7, 1, 42).unwrap();
        let scenes = |part: &[RelationInstance]| {
            part.iter().map(|i| i.scene_id).collect::<HashSet<_>>().len()
        };
        assert_eq!(scenes(&train), 6);
        assert_eq!(scenes(&val), 1);
        assert_eq!(scenes(&test), 3);
    }

    #[test]
    fn split_is_deterministic() {
        let data = generate_synthetic(&small_cfg()).unwrap();
        let a = split(&data, 0.7, 2, 11).unwrap();
        let b = split(&data, 0.7, 2, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let data = generate_synthetic(&small_cfg()).unwrap();
        assert!(split(&data, 1.0, 1, 0).is_err());
        assert!(split(&data, 0.0, 1, 0).is_err());
    }

    #[test]
    fn splits_partition_scene_set() {
        let data = generate_synthetic(&GeneratorConfig {
            num_scenes: 100,
            ..small_cfg()
        })
        .unwrap();
        let (train, val, test) = split(&data, 0.6, 5, 13).unwrap();
        let collect = |part: &[RelationInstance]| -> HashSet<u64> {
            part.iter().map(|i| i.scene_id).collect()
        };
        let (a, b, c) = (collect(&train), collect(&val), collect(&test));
        assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
        let mut union: HashSet<u64> = a;
        union.extend(b);
        union.extend(c);
        let original: HashSet<u64> = data.iter().map(|i| i.scene_id).collect();
        assert_eq!(union, original);
    }
}
