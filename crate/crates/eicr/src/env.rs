//! The three learning environments: normal (raw distribution), class-balanced
//! (median-capped resampling), and over-balanced (balanced resampling plus
//! inverse-frequency loss weights).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::{DatasetStats, RelationInstance};
use crate::error::{EicrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvironmentKind {
    Normal,
    Balanced,
    OverBalanced,
}

impl EnvironmentKind {
    pub const ALL: [EnvironmentKind; 3] = [
        EnvironmentKind::Normal,
        EnvironmentKind::Balanced,
        EnvironmentKind::OverBalanced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EnvironmentKind::Normal => "normal",
            EnvironmentKind::Balanced => "balanced",
            EnvironmentKind::OverBalanced => "over",
        }
    }
}

/// Per-class sampling rates `s_i` and loss weights `w_i`.
///
/// `s_i = Median(r) / n_i` for classes at or above the median count, 1 below
/// it; `w_i = 1 / n_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub rates: BTreeMap<usize, f64>,
    pub class_weights: BTreeMap<usize, f64>,
}

pub fn sampling_rates(stats: &DatasetStats) -> Result<SamplingPlan> {
    let median = stats.median_count;
    let mut rates = BTreeMap::new();
    let mut class_weights = BTreeMap::new();
    for (&class, &n) in &stats.counts {
        if n == 0 {
            return Err(EicrError::InvalidValue(format!(
                "class {class} has zero count"
            )));
        }
        let n = n as f64;
        let rate = if median <= n { median / n } else { 1.0 };
        rates.insert(class, rate);
        class_weights.insert(class, 1.0 / n);
    }
    Ok(SamplingPlan {
        rates,
        class_weights,
    })
}

impl SamplingPlan {
    /// Dump as `predicate,rate,weight` CSV for inspection.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| EicrError::io(path.display().to_string(), e);
        writeln!(w, "predicate,rate,weight").map_err(io_err)?;
        for (&class, &rate) in &self.rates {
            let weight = self.class_weights[&class];
            writeln!(w, "{class},{rate},{weight}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Draws batches with replacement for one environment. Normal draws uniformly
/// over instances; Balanced and OverBalanced draw each instance with
/// probability proportional to its class's sampling rate. The over-correction
/// of the over-balanced environment lives in the loss weights, not here.
pub struct EnvSampler {
    cumulative: Vec<f64>,
    uniform: bool,
}

impl EnvSampler {
    pub fn new(
        env: EnvironmentKind,
        dataset: &[RelationInstance],
        plan: &SamplingPlan,
    ) -> Result<Self> {
        if dataset.is_empty() {
            return Err(EicrError::EmptyDataset);
        }
        match env {
            EnvironmentKind::Normal => Ok(EnvSampler {
                cumulative: Vec::new(),
                uniform: true,
            }),
            EnvironmentKind::Balanced | EnvironmentKind::OverBalanced => {
                let mut cumulative = Vec::with_capacity(dataset.len());
                let mut acc = 0.0;
                for inst in dataset {
                    let rate = plan.rates.get(&inst.predicate_class).copied().ok_or_else(|| {
                        EicrError::InvalidValue(format!(
                            "predicate {} missing from sampling plan",
                            inst.predicate_class
                        ))
                    })?;
                    acc += rate;
                    cumulative.push(acc);
                }
                Ok(EnvSampler {
                    cumulative,
                    uniform: false,
                })
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, n: usize) -> usize {
        if self.uniform {
            rng.gen_range(0..n)
        } else {
            let total = *self.cumulative.last().unwrap();
            let u = rng.gen::<f64>() * total;
            match self
                .cumulative
                .binary_search_by(|p| p.partial_cmp(&u).unwrap())
            {
                Ok(i) => (i + 1).min(n - 1),
                Err(i) => i.min(n - 1),
            }
        }
    }

    /// Draw `batch_size` instance indices with replacement.
    pub fn sample_indices(
        &self,
        n: usize,
        batch_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        (0..batch_size).map(|_| self.draw(rng, n)).collect()
    }
}

/// One-shot batch draw; builds the sampler per call. Training loops should
/// hold an [`EnvSampler`] instead.
pub fn sample_batch<'a>(
    env: EnvironmentKind,
    dataset: &'a [RelationInstance],
    plan: &SamplingPlan,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<&'a RelationInstance>> {
    let sampler = EnvSampler::new(env, dataset, plan)?;
    Ok(sampler
        .sample_indices(dataset.len(), batch_size, rng)
        .into_iter()
        .map(|i| &dataset[i])
        .collect())
}
