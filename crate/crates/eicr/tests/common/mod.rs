//! Shared test oracles: an exhaustive ranking-metric reference and
//! finite-difference gradient checks. These stay independent of the library's
//! metric and gradient code paths.

#![allow(dead_code)]

use std::collections::BTreeMap;

use eicr::data::RelationInstance;
use eicr::metrics::ScoredTriplet;

/// Per-scene greedy matching: rank all predictions (descending score, then
/// ascending subject/object/predicate), keep the top K, and mark each
/// ground-truth occurrence matched against a distinct prediction occurrence.
/// Returns, per scene, the matched flags aligned with that scene's gt order.
fn match_scene(
    preds: &[ScoredTriplet],
    gt: &[&RelationInstance],
    k: usize,
) -> Vec<bool> {
    let mut ranked: Vec<&ScoredTriplet> = preds.iter().collect();
    ranked.sort_by(|a, b| {
        b.score.partial_cmp(&a.score).unwrap().then_with(|| {
            (a.subject_class, a.object_class, a.predicate_class).cmp(&(
                b.subject_class,
                b.object_class,
                b.predicate_class,
            ))
        })
    });
    let topk: Vec<&ScoredTriplet> = ranked.into_iter().take(k).collect();
    let mut used = vec![false; topk.len()];
    gt.iter()
        .map(|g| {
            for (i, p) in topk.iter().enumerate() {
                if !used[i]
                    && p.subject_class == g.subject_class
                    && p.object_class == g.object_class
                    && p.predicate_class == g.predicate_class
                {
                    used[i] = true;
                    return true;
                }
            }
            false
        })
        .collect()
}

pub struct OracleReport {
    pub recall: f64,
    pub per_class: BTreeMap<usize, f64>,
    pub mean_recall: f64,
    pub mt: f64,
    pub per_context: BTreeMap<(usize, usize, usize), f64>,
}

/// Exhaustive reference for every ranking metric.
pub fn oracle_metrics(preds: &[ScoredTriplet], gt: &[RelationInstance], k: usize) -> OracleReport {
    let mut scenes: BTreeMap<u64, (Vec<ScoredTriplet>, Vec<&RelationInstance>)> = BTreeMap::new();
    for g in gt {
        scenes.entry(g.scene_id).or_default().1.push(g);
    }
    for p in preds {
        if let Some(entry) = scenes.get_mut(&p.scene_id) {
            entry.0.push(p.clone());
        }
    }

    let mut recall_sum = 0.0;
    let mut class_hits: BTreeMap<usize, u64> = BTreeMap::new();
    let mut class_totals: BTreeMap<usize, u64> = BTreeMap::new();
    let mut ctx_hits: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    let mut ctx_totals: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    for (scene_preds, scene_gt) in scenes.values() {
        let matched = match_scene(scene_preds, scene_gt, k);
        let hits = matched.iter().filter(|&&m| m).count();
        recall_sum += hits as f64 / scene_gt.len() as f64;
        for (g, &m) in scene_gt.iter().zip(&matched) {
            let ctx = (g.predicate_class, g.subject_class, g.object_class);
            *class_totals.entry(g.predicate_class).or_insert(0) += 1;
            *ctx_totals.entry(ctx).or_insert(0) += 1;
            if m {
                *class_hits.entry(g.predicate_class).or_insert(0) += 1;
                *ctx_hits.entry(ctx).or_insert(0) += 1;
            }
        }
    }
    let recall = recall_sum / scenes.len() as f64;
    let per_class: BTreeMap<usize, f64> = class_totals
        .iter()
        .map(|(&c, &t)| (c, class_hits.get(&c).copied().unwrap_or(0) as f64 / t as f64))
        .collect();
    let mean_recall = per_class.values().sum::<f64>() / per_class.len() as f64;
    let per_context: BTreeMap<(usize, usize, usize), f64> = ctx_totals
        .iter()
        .map(|(&key, &t)| (key, ctx_hits.get(&key).copied().unwrap_or(0) as f64 / t as f64))
        .collect();
    let mut per_class_groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&(p, _, _), &r) in &per_context {
        per_class_groups.entry(p).or_default().push(r);
    }
    let mt = per_class_groups
        .values()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .sum::<f64>()
        / per_class_groups.len() as f64;
    OracleReport {
        recall,
        per_class,
        mean_recall,
        mt,
        per_context,
    }
}

/// Per-subject oracle within one predicate class.
pub fn oracle_per_subject(
    preds: &[ScoredTriplet],
    gt: &[RelationInstance],
    k: usize,
    predicate: usize,
) -> BTreeMap<usize, f64> {
    let report = oracle_metrics(preds, gt, k);
    let mut hits: BTreeMap<usize, f64> = BTreeMap::new();
    let mut totals: BTreeMap<usize, u64> = BTreeMap::new();
    // re-derive from per-context pooled counts
    let mut ctx_counts: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    for g in gt {
        if g.predicate_class == predicate {
            *ctx_counts
                .entry((g.predicate_class, g.subject_class, g.object_class))
                .or_insert(0) += 1;
        }
    }
    for (&(p, s, _o), &count) in &ctx_counts {
        if p == predicate {
            let r = report.per_context[&(p, s, _o)];
            *hits.entry(s).or_insert(0.0) += r * count as f64;
            *totals.entry(s).or_insert(0) += count;
        }
    }
    hits.into_iter()
        .map(|(s, h)| (s, h / totals[&s] as f64))
        .collect()
}

/// Simple deterministic pseudo-random stream for fixtures, independent of the
/// crate's RNG.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn next_usize(&mut self, bound: usize) -> usize {
        (self.next_f64() * bound as f64) as usize % bound
    }
}

/// Random tiny evaluation instance: a few scenes with ground truth and a full
/// set of per-pair predicate scores.
pub fn random_tiny_instance(
    rng: &mut Lcg,
    max_scenes: usize,
    max_gt_per_scene: usize,
    num_predicates: usize,
    num_objects: usize,
) -> (Vec<RelationInstance>, Vec<ScoredTriplet>) {
    let scenes = 1 + rng.next_usize(max_scenes);
    let mut gt = Vec::new();
    let mut preds = Vec::new();
    for scene in 0..scenes as u64 {
        let n = 1 + rng.next_usize(max_gt_per_scene);
        for _ in 0..n {
            let s = rng.next_usize(num_objects);
            let o = rng.next_usize(num_objects);
            let p = rng.next_usize(num_predicates);
            gt.push(RelationInstance {
                scene_id: scene,
                subject_class: s,
                object_class: o,
                predicate_class: p,
                features: vec![0.0],
            });
            for c in 0..num_predicates {
                preds.push(ScoredTriplet {
                    scene_id: scene,
                    subject_class: s,
                    object_class: o,
                    predicate_class: c,
                    score: rng.next_f64(),
                });
            }
        }
    }
    (gt, preds)
}
