//! Ranking metrics over scored relation triplets: R@K, mR@K, F@K, mT@K, and
//! per-class / per-context / per-subject breakdowns.
//!
//! Evaluation is PredCls-style: ground-truth subject-object pairs are given
//! and only the predicate is scored. Ranking is per scene with a total
//! order: descending score, then ascending (subject, object, predicate).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::data::RelationInstance;
use crate::error::{EicrError, Result};
use crate::model::{self, ModelParams};
use crate::risk::softmax;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTriplet {
    pub scene_id: u64,
    pub subject_class: usize,
    pub object_class: usize,
    pub predicate_class: usize,
    pub score: f64,
}

/// Whether every predicate is scored per pair, or only the argmax one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoringMode {
    AllPredicates,
    ArgmaxPerPair,
}

/// Score each ground-truth pair occurrence: softmax probabilities over the
/// predicate classes, one [`ScoredTriplet`] per class (or only the argmax
/// under [`ScoringMode::ArgmaxPerPair`]).
pub fn score_dataset(
    params: &ModelParams,
    dataset: &[RelationInstance],
    mode: ScoringMode,
) -> Result<Vec<ScoredTriplet>> {
    let features: Vec<&[f64]> = dataset.iter().map(|i| i.features.as_slice()).collect();
    let logits = model::forward(params, &features)?;
    let mut preds = Vec::new();
    for (inst, row) in dataset.iter().zip(&logits) {
        let probs = softmax(row);
        match mode {
            ScoringMode::AllPredicates => {
                for (c, &p) in probs.iter().enumerate() {
                    preds.push(ScoredTriplet {
                        scene_id: inst.scene_id,
                        subject_class: inst.subject_class,
                        object_class: inst.object_class,
                        predicate_class: c,
                        score: p,
                    });
                }
            }
            ScoringMode::ArgmaxPerPair => {
                let (c, &p) = probs
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                    .unwrap();
                preds.push(ScoredTriplet {
                    scene_id: inst.scene_id,
                    subject_class: inst.subject_class,
                    object_class: inst.object_class,
                    predicate_class: c,
                    score: p,
                });
            }
        }
    }
    Ok(preds)
}

type Triplet = (usize, usize, usize);

/// Per-scene ground-truth and top-K multisets.
struct SceneTally {
    gt: BTreeMap<Triplet, u64>,
    topk: BTreeMap<Triplet, u64>,
}

fn tally_scenes(
    preds: &[ScoredTriplet],
    gt: &[RelationInstance],
    k: usize,
) -> Result<BTreeMap<u64, SceneTally>> {
    if k == 0 {
        return Err(EicrError::InvalidValue("K must be >= 1".into()));
    }
    let mut preds_by_scene: BTreeMap<u64, Vec<&ScoredTriplet>> = BTreeMap::new();
    for p in preds {
        preds_by_scene.entry(p.scene_id).or_default().push(p);
    }
    let mut tallies: BTreeMap<u64, SceneTally> = BTreeMap::new();
    for inst in gt {
        let entry = tallies.entry(inst.scene_id).or_insert_with(|| SceneTally {
            gt: BTreeMap::new(),
            topk: BTreeMap::new(),
        });
        *entry
            .gt
            .entry((inst.subject_class, inst.object_class, inst.predicate_class))
            .or_insert(0) += 1;
    }
    for (scene, tally) in tallies.iter_mut() {
        let scored = preds_by_scene
            .get(scene)
            .ok_or(EicrError::MissingScene(*scene))?;
        let mut ranked: Vec<&&ScoredTriplet> = scored.iter().collect();
        ranked.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then_with(|| {
                    (a.subject_class, a.object_class, a.predicate_class).cmp(&(
                        b.subject_class,
                        b.object_class,
                        b.predicate_class,
                    ))
                })
        });
        for p in ranked.into_iter().take(k) {
            *tally
                .topk
                .entry((p.subject_class, p.object_class, p.predicate_class))
                .or_insert(0) += 1;
        }
    }
    Ok(tallies)
}

fn matched(tally: &SceneTally, triplet: &Triplet) -> u64 {
    let gt = tally.gt[triplet];
    let hit = tally.topk.get(triplet).copied().unwrap_or(0);
    gt.min(hit)
}

/// Per-scene recall of ground-truth triplets within the top-K, averaged over
/// scenes. Duplicate ground-truth triplets each need a distinct matching
/// prediction occurrence.
pub fn recall_at_k(preds: &[ScoredTriplet], gt: &[RelationInstance], k: usize) -> Result<f64> {
    let tallies = tally_scenes(preds, gt, k)?;
    if tallies.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    let mut total = 0.0;
    for tally in tallies.values() {
        let gt_total: u64 = tally.gt.values().sum();
        let hits: u64 = tally.gt.keys().map(|t| matched(tally, t)).sum();
        total += hits as f64 / gt_total as f64;
    }
    Ok(total / tallies.len() as f64)
}

/// Per-class recall (pooled over that class's ground-truth triplets, with
/// top-K membership decided per scene) and its unweighted mean over classes
/// with support.
pub fn mean_recall_at_k(
    preds: &[ScoredTriplet],
    gt: &[RelationInstance],
    k: usize,
) -> Result<(f64, BTreeMap<usize, f64>)> {
    let tallies = tally_scenes(preds, gt, k)?;
    if tallies.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    let mut totals: BTreeMap<usize, u64> = BTreeMap::new();
    for tally in tallies.values() {
        for (triplet, &count) in &tally.gt {
            *totals.entry(triplet.2).or_insert(0) += count;
            *hits.entry(triplet.2).or_insert(0) += matched(tally, triplet);
        }
    }
    let per_class: BTreeMap<usize, f64> = totals
        .iter()
        .map(|(&c, &total)| (c, hits[&c] as f64 / total as f64))
        .collect();
    let mr = per_class.values().sum::<f64>() / per_class.len() as f64;
    Ok((mr, per_class))
}

/// Harmonic mean of R@K and mR@K; zero when either is zero.
pub fn f_at_k(r: f64, mr: f64) -> Result<f64> {
    if r < 0.0 || mr < 0.0 {
        return Err(EicrError::InvalidValue(format!("negative input ({r}, {mr})")));
    }
    if r + mr == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * r * mr / (r + mr))
    }
}

/// Mean over predicate classes of the mean per-context-group recall: the
/// class's ground truth is grouped by (subject, object), each group's recall
/// is pooled over scenes, and groups are averaged unweighted.
pub fn mt_at_k(
    preds: &[ScoredTriplet],
    gt: &[RelationInstance],
    k: usize,
) -> Result<(f64, BTreeMap<Triplet, f64>)> {
    let tallies = tally_scenes(preds, gt, k)?;
    if tallies.is_empty() {
        return Err(EicrError::EmptyDataset);
    }
    // keyed (predicate, subject, object)
    let mut hits: BTreeMap<Triplet, u64> = BTreeMap::new();
    let mut totals: BTreeMap<Triplet, u64> = BTreeMap::new();
    for tally in tallies.values() {
        for (&(s, o, p), &count) in &tally.gt {
            *totals.entry((p, s, o)).or_insert(0) += count;
            *hits.entry((p, s, o)).or_insert(0) += matched(tally, &(s, o, p));
        }
    }
    let per_context: BTreeMap<Triplet, f64> = totals
        .iter()
        .map(|(&key, &total)| (key, hits[&key] as f64 / total as f64))
        .collect();
    let mut per_class_groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&(p, _, _), &recall) in &per_context {
        per_class_groups.entry(p).or_default().push(recall);
    }
    let mt = per_class_groups
        .values()
        .map(|groups| groups.iter().sum::<f64>() / groups.len() as f64)
        .sum::<f64>()
        / per_class_groups.len() as f64;
    Ok((mt, per_context))
}

/// Per-subject recall within one predicate class.
pub fn per_subject_recall(
    preds: &[ScoredTriplet],
    gt: &[RelationInstance],
    k: usize,
    predicate: usize,
) -> Result<BTreeMap<usize, f64>> {
    let tallies = tally_scenes(preds, gt, k)?;
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    let mut totals: BTreeMap<usize, u64> = BTreeMap::new();
    for tally in tallies.values() {
        for (triplet, &count) in &tally.gt {
            if triplet.2 == predicate {
                *totals.entry(triplet.0).or_insert(0) += count;
                *hits.entry(triplet.0).or_insert(0) += matched(tally, triplet);
            }
        }
    }
    if totals.is_empty() {
        return Err(EicrError::InvalidValue(format!(
            "predicate {predicate} has no ground-truth support"
        )));
    }
    Ok(totals
        .iter()
        .map(|(&s, &total)| (s, hits[&s] as f64 / total as f64))
        .collect())
}

/// All metrics for one K.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub k: usize,
    pub r_at_k: f64,
    pub mr_at_k: f64,
    pub f_at_k: f64,
    pub mt_at_k: f64,
    pub per_class_recall: BTreeMap<usize, f64>,
    pub per_context_recall: BTreeMap<Triplet, f64>,
    pub per_subject_recall: BTreeMap<(usize, usize), f64>,
}

pub fn evaluate(preds: &[ScoredTriplet], gt: &[RelationInstance], k: usize) -> Result<MetricsReport> {
    let r = recall_at_k(preds, gt, k)?;
    let (mr, per_class_recall) = mean_recall_at_k(preds, gt, k)?;
    let f = f_at_k(r, mr)?;
    let (mt, per_context_recall) = mt_at_k(preds, gt, k)?;
    let mut per_subject = BTreeMap::new();
    for &predicate in per_class_recall.keys() {
        for (subject, recall) in per_subject_recall(preds, gt, k, predicate)? {
            per_subject.insert((predicate, subject), recall);
        }
    }
    Ok(MetricsReport {
        k,
        r_at_k: r,
        mr_at_k: mr,
        f_at_k: f,
        mt_at_k: mt,
        per_class_recall,
        per_context_recall,
        per_subject_recall: per_subject,
    })
}

/// Predictions CSV: `scene_id,subject,object,predicate,score`.
pub fn save_predictions(preds: &[ScoredTriplet], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| EicrError::io(path.display().to_string(), e);
    writeln!(w, "scene_id,subject,object,predicate,score").map_err(io_err)?;
    for p in preds {
        writeln!(
            w,
            "{},{},{},{},{:.16e}",
            p.scene_id, p.subject_class, p.object_class, p.predicate_class, p.score
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn load_predictions(path: &Path) -> Result<Vec<ScoredTriplet>> {
    let file = File::open(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let reader = BufReader::new(file);
    let mut preds = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| EicrError::io(path.display().to_string(), e))?;
        if idx == 0 || line.is_empty() {
            continue;
        }
        let bad = |message: String| EicrError::MalformedRow {
            path: path.display().to_string(),
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        }
        preds.push(ScoredTriplet {
            scene_id: fields[0].parse().map_err(|_| bad("bad scene_id".into()))?,
            subject_class: fields[1].parse().map_err(|_| bad("bad subject".into()))?,
            object_class: fields[2].parse().map_err(|_| bad("bad object".into()))?,
            predicate_class: fields[3].parse().map_err(|_| bad("bad predicate".into()))?,
            score: fields[4].parse().map_err(|_| bad("bad score".into()))?,
        });
    }
    Ok(preds)
}
