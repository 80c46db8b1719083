//! Desk-scale relation model: an optional one-hidden-layer tanh feature
//! extractor followed by a linear classifier over predicate logits, with
//! exact analytic parameter gradients. All math is f64.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EicrError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub feature_dim: usize,
    /// 0 means the extractor is the identity.
    pub hidden_dim: usize,
    pub num_predicates: usize,
    pub init_scale: f64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feature_dim == 0 {
            return Err(EicrError::InvalidConfig("feature_dim must be >= 1".into()));
        }
        if self.num_predicates < 2 {
            return Err(EicrError::InvalidConfig("num_predicates must be >= 2".into()));
        }
        if !(self.init_scale >= 0.0) {
            return Err(EicrError::InvalidConfig("init_scale must be >= 0".into()));
        }
        Ok(())
    }
}

/// Parameter tensors, also used as the gradient container (same shapes).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub feature_dim: usize,
    pub hidden_dim: usize,
    pub num_predicates: usize,
    /// h x d row-major, empty when hidden_dim = 0.
    pub extractor_w: Vec<f64>,
    /// length h, empty when hidden_dim = 0.
    pub extractor_b: Vec<f64>,
    /// C x m row-major, m = hidden_dim if nonzero else feature_dim.
    pub classifier_w: Vec<f64>,
    /// length C.
    pub classifier_b: Vec<f64>,
}

impl ModelParams {
    pub fn classifier_input_dim(&self) -> usize {
        if self.hidden_dim > 0 {
            self.hidden_dim
        } else {
            self.feature_dim
        }
    }

    pub fn zeros_like(&self) -> ModelParams {
        ModelParams {
            feature_dim: self.feature_dim,
            hidden_dim: self.hidden_dim,
            num_predicates: self.num_predicates,
            extractor_w: vec![0.0; self.extractor_w.len()],
            extractor_b: vec![0.0; self.extractor_b.len()],
            classifier_w: vec![0.0; self.classifier_w.len()],
            classifier_b: vec![0.0; self.classifier_b.len()],
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.extractor_w.len()
            + self.extractor_b.len()
            + self.classifier_w.len()
            + self.classifier_b.len()
    }

    /// Flatten all tensors into one vector (extractor weights, extractor
    /// bias, classifier weights, classifier bias).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.num_parameters());
        flat.extend_from_slice(&self.extractor_w);
        flat.extend_from_slice(&self.extractor_b);
        flat.extend_from_slice(&self.classifier_w);
        flat.extend_from_slice(&self.classifier_b);
        flat
    }

    /// Overwrite all tensors from a flat vector in [`to_flat`] order.
    pub fn set_from_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_parameters());
        let mut offset = 0;
        for tensor in [
            &mut self.extractor_w,
            &mut self.extractor_b,
            &mut self.classifier_w,
            &mut self.classifier_b,
        ] {
            let len = tensor.len();
            tensor.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
    }
}

/// Weights uniform in [-init_scale, init_scale], biases zero, deterministic
/// given the seed.
pub fn init(cfg: &ModelConfig) -> Result<ModelParams> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.feature_dim;
    let h = cfg.hidden_dim;
    let c = cfg.num_predicates;
    let m = if h > 0 { h } else { d };
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                if cfg.init_scale == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-cfg.init_scale..=cfg.init_scale)
                }
            })
            .collect()
    };
    Ok(ModelParams {
        feature_dim: d,
        hidden_dim: h,
        num_predicates: c,
        extractor_w: draw(h * d),
        extractor_b: vec![0.0; h],
        classifier_w: draw(c * m),
        classifier_b: vec![0.0; c],
    })
}

fn check_features(params: &ModelParams, features: &[&[f64]]) -> Result<()> {
    for (b, row) in features.iter().enumerate() {
        if row.len() != params.feature_dim {
            return Err(EicrError::DimensionMismatch(format!(
                "feature row {b} has {} components, expected {}",
                row.len(),
                params.feature_dim
            )));
        }
    }
    Ok(())
}

fn hidden_activations(params: &ModelParams, x: &[f64]) -> Vec<f64> {
    let d = params.feature_dim;
    (0..params.hidden_dim)
        .map(|i| {
            let mut z = params.extractor_b[i];
            for j in 0..d {
                z += params.extractor_w[i * d + j] * x[j];
            }
            z.tanh()
        })
        .collect()
}

fn classify(params: &ModelParams, input: &[f64]) -> Vec<f64> {
    let m = params.classifier_input_dim();
    (0..params.num_predicates)
        .map(|k| {
            let mut z = params.classifier_b[k];
            for j in 0..m {
                z += params.classifier_w[k * m + j] * input[j];
            }
            z
        })
        .collect()
}

/// Pre-softmax logits for a batch, one B-row per feature row.
pub fn forward(params: &ModelParams, features: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    check_features(params, features)?;
    let logits = features
        .iter()
        .map(|x| {
            if params.hidden_dim > 0 {
                classify(params, &hidden_activations(params, x))
            } else {
                classify(params, x)
            }
        })
        .collect();
    Ok(logits)
}

/// Exact parameter gradients for the scalar loss whose logit gradient is
/// supplied; returns a [`ModelParams`]-shaped container.
pub fn backward(
    params: &ModelParams,
    features: &[&[f64]],
    dloss_dlogits: &[Vec<f64>],
) -> Result<ModelParams> {
    check_features(params, features)?;
    if dloss_dlogits.len() != features.len() {
        return Err(EicrError::DimensionMismatch(format!(
            "dloss_dlogits has {} rows, expected {}",
            dloss_dlogits.len(),
            features.len()
        )));
    }
    let c = params.num_predicates;
    let d = params.feature_dim;
    let h = params.hidden_dim;
    let m = params.classifier_input_dim();
    let mut grads = params.zeros_like();
    for (x, dl) in features.iter().zip(dloss_dlogits) {
        if dl.len() != c {
            return Err(EicrError::DimensionMismatch(format!(
                "dloss_dlogits row has {} entries, expected {c}",
                dl.len()
            )));
        }
        let activ;
        let input: &[f64] = if h > 0 {
            activ = hidden_activations(params, x);
            &activ
        } else {
            x
        };
        for k in 0..c {
            grads.classifier_b[k] += dl[k];
            for j in 0..m {
                grads.classifier_w[k * m + j] += dl[k] * input[j];
            }
        }
        if h > 0 {
            // d(tanh z)/dz = 1 - a^2
            for i in 0..h {
                let mut da = 0.0;
                for k in 0..c {
                    da += dl[k] * params.classifier_w[k * m + i];
                }
                let dz = da * (1.0 - input[i] * input[i]);
                grads.extractor_b[i] += dz;
                for j in 0..d {
                    grads.extractor_w[i * d + j] += dz * x[j];
                }
            }
        }
    }
    Ok(grads)
}

/// Write a checkpoint: shape header then one comma-separated line per tensor
/// row. Floats print with the shortest round-trip representation, so the
/// round trip is exact.
pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| EicrError::io(path.display().to_string(), e);
    writeln!(
        w,
        "eicr-checkpoint v1 d={} h={} c={}",
        params.feature_dim, params.hidden_dim, params.num_predicates
    )
    .map_err(io_err)?;
    let d = params.feature_dim;
    let m = params.classifier_input_dim();
    let dump = |w: &mut BufWriter<File>, name: &str, data: &[f64], cols: usize| -> Result<()> {
        let rows = if cols == 0 { 0 } else { data.len() / cols };
        writeln!(w, "tensor {name} {rows} {cols}").map_err(io_err)?;
        for row in data.chunks(cols.max(1)) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(",")).map_err(io_err)?;
        }
        Ok(())
    };
    dump(&mut w, "extractor_w", &params.extractor_w, d.min(params.extractor_w.len()))?;
    dump(&mut w, "extractor_b", &params.extractor_b, params.extractor_b.len())?;
    dump(&mut w, "classifier_w", &params.classifier_w, m)?;
    dump(&mut w, "classifier_b", &params.classifier_b, params.classifier_b.len())?;
    w.flush().map_err(io_err)
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams> {
    let file = File::open(path).map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let bad = |line: usize, msg: &str| EicrError::MalformedRow {
        path: path.display().to_string(),
        line,
        message: msg.into(),
    };
    let header = lines
        .next()
        .ok_or_else(|| bad(1, "empty checkpoint"))?
        .map_err(|e| EicrError::io(path.display().to_string(), e))?;
    let dims: Vec<usize> = header
        .strip_prefix("eicr-checkpoint v1 ")
        .ok_or_else(|| bad(1, "unrecognized checkpoint header"))?
        .split(' ')
        .filter_map(|kv| kv.split('=').nth(1))
        .filter_map(|v| v.parse().ok())
        .collect();
    if dims.len() != 3 {
        return Err(bad(1, "malformed dims"));
    }
    let (d, h, c) = (dims[0], dims[1], dims[2]);
    let mut params = ModelParams {
        feature_dim: d,
        hidden_dim: h,
        num_predicates: c,
        extractor_w: Vec::new(),
        extractor_b: Vec::new(),
        classifier_w: Vec::new(),
        classifier_b: Vec::new(),
    };
    let mut lineno = 1;
    let next_line = |lines: &mut std::io::Lines<BufReader<File>>, lineno: &mut usize| -> Result<String> {
        *lineno += 1;
        lines
            .next()
            .ok_or_else(|| bad(*lineno, "unexpected end of file"))?
            .map_err(|e| EicrError::io(path.display().to_string(), e))
    };
    for expected in ["extractor_w", "extractor_b", "classifier_w", "classifier_b"] {
        let head = next_line(&mut lines, &mut lineno)?;
        let parts: Vec<&str> = head.split(' ').collect();
        if parts.len() != 4 || parts[0] != "tensor" || parts[1] != expected {
            return Err(bad(lineno, "unexpected tensor header"));
        }
        let rows: usize = parts[2].parse().map_err(|_| bad(lineno, "bad row count"))?;
        let cols: usize = parts[3].parse().map_err(|_| bad(lineno, "bad col count"))?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = next_line(&mut lines, &mut lineno)?;
            for v in line.split(',') {
                let v: f64 = v.parse().map_err(|_| bad(lineno, "bad float"))?;
                data.push(v);
            }
        }
        if data.len() != rows * cols {
            return Err(bad(lineno, "tensor size mismatch"));
        }
        match expected {
            "extractor_w" => params.extractor_w = data,
            "extractor_b" => params.extractor_b = data,
            "classifier_w" => params.classifier_w = data,
            _ => params.classifier_b = data,
        }
    }
    let m = params.classifier_input_dim();
    if params.extractor_w.len() != h * d
        || params.extractor_b.len() != h
        || params.classifier_w.len() != c * m
        || params.classifier_b.len() != c
    {
        return Err(bad(lineno, "tensor shapes inconsistent with dims"));
    }
    Ok(params)
}
