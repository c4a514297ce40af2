//! The detector: spectral features, z-scored with training-set statistics,
//! into a logistic classifier — plain linear or with one tanh hidden layer —
//! trained by full-batch gradient descent.
//!
//! Training is deliberately deterministic: the minority class is balanced by
//! round-robin duplication, the only randomness is the seeded hidden-layer
//! init, and there is no data shuffling, so identical inputs give identical
//! weights bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::metrics::Label;
use crate::rng;

/// Floor applied to per-feature standard deviations before z-scoring.
const STD_FLOOR: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("training set must contain both classes")]
    SingleClass,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("feature/label counts differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("loss became non-finite at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("model file malformed: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Linear,
    Mlp1,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Mlp1 => "mlp1",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "mlp1" => Ok(Self::Mlp1),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

/// Gradient-descent hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    pub kind: ModelKind,
    /// Hidden units; only read for [`ModelKind::Mlp1`].
    pub hidden: usize,
}

impl Default for TrainConfig {
    /// Converges on the built-in corpus in seconds.
    fn default() -> Self {
        Self { learning_rate: 0.05, epochs: 500, l2: 1e-4, seed: 0, kind: ModelKind::Linear, hidden: 16 }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate > 0.0) || self.epochs == 0 || !(self.l2 >= 0.0) {
            return Err(ModelError::SchemaMismatch(format!(
                "invalid train config: lr {}, epochs {}, l2 {}",
                self.learning_rate, self.epochs, self.l2
            )));
        }
        if self.kind == ModelKind::Mlp1 && self.hidden == 0 {
            return Err(ModelError::SchemaMismatch("mlp1 needs hidden > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Linear { w: Vec<f64>, b: f64 },
    Mlp1 { w1: Vec<f64>, b1: Vec<f64>, w2: Vec<f64>, b2: f64 },
}

/// A trained classifier together with its frozen standardization constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    dim: usize,
    hidden: usize,
    feature_mean: Vec<f64>,
    feature_std: Vec<f64>,
    params: Params,
}

/// Model plus the loss curve that produced it.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ClassifierModel,
    /// Regularized mean BCE before each step, plus the final value
    /// (`epochs + 1` entries).
    pub loss_history: Vec<f64>,
}

/// Indices of a class-balanced copy of the input: every sample once, then
/// minority samples repeated round-robin until the classes match.
fn balance_indices(labels: &[Label]) -> Vec<usize> {
    let fakes: Vec<usize> =
        (0..labels.len()).filter(|&i| labels[i] == Label::Fake).collect();
    let reals: Vec<usize> =
        (0..labels.len()).filter(|&i| labels[i] == Label::Real).collect();
    let mut out: Vec<usize> = (0..labels.len()).collect();
    let (minority, deficit) = if fakes.len() < reals.len() {
        (&fakes, reals.len() - fakes.len())
    } else {
        (&reals, fakes.len() - reals.len())
    };
    for k in 0..deficit {
        out.push(minority[k % minority.len()]);
    }
    out
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl ClassifierModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            Params::Linear { .. } => ModelKind::Linear,
            Params::Mlp1 { .. } => ModelKind::Mlp1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn standardize(&self, raw: &[f64]) -> Result<Vec<f64>, ModelError> {
        if raw.len() != self.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, got: raw.len() });
        }
        Ok(raw
            .iter()
            .zip(self.feature_mean.iter().zip(&self.feature_std))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect())
    }

    fn logit(&self, z: &[f64]) -> f64 {
        match &self.params {
            Params::Linear { w, b } => w.iter().zip(z).map(|(wi, zi)| wi * zi).sum::<f64>() + b,
            Params::Mlp1 { w1, b1, w2, b2 } => {
                let mut out = *b2;
                for (h, (&bh, wh)) in b1.iter().zip(w1.chunks_exact(self.dim)).enumerate() {
                    let a = (wh.iter().zip(z).map(|(wi, zi)| wi * zi).sum::<f64>() + bh).tanh();
                    out += w2[h] * a;
                }
                out
            }
        }
    }

    /// Probability the input is fake.
    pub fn score(&self, raw: &[f64]) -> Result<f64, ModelError> {
        Ok(sigmoid(self.logit(&self.standardize(raw)?)))
    }

    /// Scores for a batch; equals element-wise [`Self::score`].
    pub fn score_batch(&self, raws: &[Vec<f64>]) -> Result<Vec<f64>, ModelError> {
        raws.iter().map(|r| self.score(r)).collect()
    }

    /// All parameters as one flat vector: linear is `[w.., b]`; mlp1 is
    /// `[w1.., b1.., w2.., b2]` with `w1` in hidden-major rows.
    pub fn flat_params(&self) -> Vec<f64> {
        match &self.params {
            Params::Linear { w, b } => {
                let mut p = w.clone();
                p.push(*b);
                p
            }
            Params::Mlp1 { w1, b1, w2, b2 } => {
                let mut p = w1.clone();
                p.extend_from_slice(b1);
                p.extend_from_slice(w2);
                p.push(*b2);
                p
            }
        }
    }

    /// Replaces all parameters from the [`Self::flat_params`] layout.
    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<(), ModelError> {
        let expected = self.flat_params().len();
        if flat.len() != expected {
            return Err(ModelError::DimensionMismatch { expected, got: flat.len() });
        }
        match &mut self.params {
            Params::Linear { w, b } => {
                let d = w.len();
                w.copy_from_slice(&flat[..d]);
                *b = flat[d];
            }
            Params::Mlp1 { w1, b1, w2, b2 } => {
                let (d, h) = (w1.len(), b1.len());
                w1.copy_from_slice(&flat[..d]);
                b1.copy_from_slice(&flat[d..d + h]);
                w2.copy_from_slice(&flat[d + h..d + h + h]);
                *b2 = flat[d + 2 * h];
            }
        }
        Ok(())
    }

    /// Regularized mean binary cross-entropy and its gradient in the
    /// [`Self::flat_params`] layout, on raw (unstandardized) features.
    ///
    /// The l2 penalty covers weights only, never biases.
    pub fn loss_and_gradient(
        &self,
        features: &[Vec<f64>],
        labels: &[Label],
        l2: f64,
    ) -> Result<(f64, Vec<f64>), ModelError> {
        if features.len() != labels.len() {
            return Err(ModelError::LengthMismatch(features.len(), labels.len()));
        }
        if features.is_empty() {
            return Err(ModelError::EmptyTrainingSet);
        }
        let std_rows: Vec<Vec<f64>> =
            features.iter().map(|r| self.standardize(r)).collect::<Result<_, _>>()?;
        Ok(self.loss_and_gradient_std(&std_rows, labels, l2))
    }

    /// Core backward pass on pre-standardized rows.
    fn loss_and_gradient_std(
        &self,
        rows: &[Vec<f64>],
        labels: &[Label],
        l2: f64,
    ) -> (f64, Vec<f64>) {
        let n = rows.len() as f64;
        let mut loss = 0.0;
        match &self.params {
            Params::Linear { w, b } => {
                let mut gw = vec![0.0; w.len()];
                let mut gb = 0.0;
                for (row, &label) in rows.iter().zip(labels) {
                    let z = w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
                    let y = (label == Label::Fake) as u8 as f64;
                    loss += softplus(z) - y * z;
                    let d = sigmoid(z) - y;
                    for (g, &x) in gw.iter_mut().zip(row) {
                        *g += d * x;
                    }
                    gb += d;
                }
                loss /= n;
                for (g, &wi) in gw.iter_mut().zip(w) {
                    *g = *g / n + 2.0 * l2 * wi;
                    loss += l2 * wi * wi;
                }
                let mut grad = gw;
                grad.push(gb / n);
                (loss, grad)
            }
            Params::Mlp1 { w1, b1, w2, b2 } => {
                let (dim, hidden) = (self.dim, self.hidden);
                let mut gw1 = vec![0.0; w1.len()];
                let mut gb1 = vec![0.0; hidden];
                let mut gw2 = vec![0.0; hidden];
                let mut gb2 = 0.0;
                let mut act = vec![0.0; hidden];
                for (row, &label) in rows.iter().zip(labels) {
                    for (h, a) in act.iter_mut().enumerate() {
                        let pre = w1[h * dim..(h + 1) * dim]
                            .iter()
                            .zip(row)
                            .map(|(wi, xi)| wi * xi)
                            .sum::<f64>()
                            + b1[h];
                        *a = pre.tanh();
                    }
                    let z = w2.iter().zip(&act).map(|(wi, ai)| wi * ai).sum::<f64>() + b2;
                    let y = (label == Label::Fake) as u8 as f64;
                    loss += softplus(z) - y * z;
                    let d = sigmoid(z) - y;
                    for h in 0..hidden {
                        gw2[h] += d * act[h];
                        let dh = d * w2[h] * (1.0 - act[h] * act[h]);
                        gb1[h] += dh;
                        for (g, &x) in gw1[h * dim..(h + 1) * dim].iter_mut().zip(row) {
                            *g += dh * x;
                        }
                    }
                    gb2 += d;
                }
                loss /= n;
                for (g, &wi) in gw1.iter_mut().zip(w1) {
                    *g = *g / n + 2.0 * l2 * wi;
                    loss += l2 * wi * wi;
                }
                for (g, &wi) in gw2.iter_mut().zip(w2) {
                    *g = *g / n + 2.0 * l2 * wi;
                    loss += l2 * wi * wi;
                }
                let mut grad = gw1;
                grad.extend(gb1.iter().map(|g| g / n));
                grad.extend_from_slice(&gw2);
                grad.push(gb2 / n);
                (loss, grad)
            }
        }
    }

    /// Serializes to the line-oriented text format. 17-significant-digit
    /// decimals make the reload bit-exact for every binary64 value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.kind() {
            ModelKind::Linear => {
                writeln!(out, "freqspec-model v1 {} {}", ModelKind::Linear, self.dim).unwrap()
            }
            ModelKind::Mlp1 => writeln!(
                out,
                "freqspec-model v1 {} {} {}",
                ModelKind::Mlp1,
                self.dim,
                self.hidden
            )
            .unwrap(),
        }
        let mut block = |name: &str, values: &[f64]| {
            writeln!(out, "{name} {}", values.len()).unwrap();
            for v in values {
                writeln!(out, "{v:.16e}").unwrap();
            }
        };
        block("feature_mean", &self.feature_mean);
        block("feature_std", &self.feature_std);
        match &self.params {
            Params::Linear { w, b } => {
                block("weights", w);
                block("bias", &[*b]);
            }
            Params::Mlp1 { w1, b1, w2, b2 } => {
                block("w1", w1);
                block("b1", b1);
                block("w2", w2);
                block("b2", &[*b2]);
            }
        }
        out
    }

    /// Parses the [`Self::to_text`] format.
    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let bad = |msg: &str| ModelError::SchemaMismatch(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() < 4 || fields[0] != "freqspec-model" || fields[1] != "v1" {
            return Err(bad("missing `freqspec-model v1` header"));
        }
        let kind: ModelKind = fields[2].parse().map_err(ModelError::SchemaMismatch)?;
        let dim: usize =
            fields[3].parse().map_err(|_| bad("dimension is not an integer"))?;
        if dim == 0 {
            return Err(bad("dimension must be positive"));
        }
        let hidden = match kind {
            ModelKind::Linear => {
                if fields.len() != 4 {
                    return Err(bad("linear header takes no hidden count"));
                }
                0
            }
            ModelKind::Mlp1 => {
                if fields.len() != 5 {
                    return Err(bad("mlp1 header needs a hidden count"));
                }
                let h: usize =
                    fields[4].parse().map_err(|_| bad("hidden count is not an integer"))?;
                if h == 0 {
                    return Err(bad("hidden count must be positive"));
                }
                h
            }
        };

        let mut read_block = |name: &str, expected: usize| -> Result<Vec<f64>, ModelError> {
            let head = lines
                .next()
                .ok_or_else(|| bad(&format!("missing `{name}` block")))?;
            let mut parts = head.split_whitespace();
            let (got_name, got_len) = (parts.next(), parts.next());
            if got_name != Some(name) {
                return Err(bad(&format!("expected `{name}` block, found `{head}`")));
            }
            if got_len.and_then(|s| s.parse::<usize>().ok()) != Some(expected) {
                return Err(bad(&format!("`{name}` block must have {expected} values")));
            }
            let mut values = Vec::with_capacity(expected);
            for _ in 0..expected {
                let line = lines
                    .next()
                    .ok_or_else(|| bad(&format!("`{name}` block truncated")))?;
                let v: f64 = line
                    .trim()
                    .parse()
                    .map_err(|_| bad(&format!("bad number `{line}` in `{name}`")))?;
                values.push(v);
            }
            Ok(values)
        };

        let feature_mean = read_block("feature_mean", dim)?;
        let feature_std = read_block("feature_std", dim)?;
        let params = match kind {
            ModelKind::Linear => {
                let w = read_block("weights", dim)?;
                let b = read_block("bias", 1)?[0];
                Params::Linear { w, b }
            }
            ModelKind::Mlp1 => {
                let w1 = read_block("w1", dim * hidden)?;
                let b1 = read_block("b1", hidden)?;
                let w2 = read_block("w2", hidden)?;
                let b2 = read_block("b2", 1)?[0];
                Params::Mlp1 { w1, b1, w2, b2 }
            }
        };
        if lines.next().is_some_and(|l| !l.trim().is_empty()) {
            return Err(bad("trailing data after final block"));
        }
        if feature_std.iter().any(|&s| !(s > 0.0)) {
            return Err(bad("feature_std entries must be positive"));
        }
        Ok(Self { dim, hidden, feature_mean, feature_std, params })
    }
}

/// Trains a classifier on labeled feature rows.
///
/// Minority-class rows are duplicated round-robin to balance the classes;
/// standardization statistics come from the balanced set; then full-batch
/// gradient descent runs for exactly `cfg.epochs` steps.
pub fn train(
    features: &[Vec<f64>],
    labels: &[Label],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    cfg.validate()?;
    if features.len() != labels.len() {
        return Err(ModelError::LengthMismatch(features.len(), labels.len()));
    }
    if features.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let dim = features[0].len();
    for row in features {
        if row.len() != dim {
            return Err(ModelError::DimensionMismatch { expected: dim, got: row.len() });
        }
    }
    if !labels.contains(&Label::Fake) || !labels.contains(&Label::Real) {
        return Err(ModelError::SingleClass);
    }

    let order = balance_indices(labels);
    let rows: Vec<&Vec<f64>> = order.iter().map(|&i| &features[i]).collect();
    let bal_labels: Vec<Label> = order.iter().map(|&i| labels[i]).collect();
    let n = rows.len() as f64;

    let mut feature_mean = vec![0.0; dim];
    for row in &rows {
        for (m, &v) in feature_mean.iter_mut().zip(*row) {
            *m += v;
        }
    }
    for m in &mut feature_mean {
        *m /= n;
    }
    let mut feature_std = vec![0.0; dim];
    for row in &rows {
        for (s, (&v, &m)) in feature_std.iter_mut().zip(row.iter().zip(&feature_mean)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut feature_std {
        *s = (*s / n).sqrt().max(STD_FLOOR);
    }

    let params = match cfg.kind {
        ModelKind::Linear => Params::Linear { w: vec![0.0; dim], b: 0.0 },
        ModelKind::Mlp1 => {
            let h = cfg.hidden;
            let s1 = rng::derive_seed(cfg.seed, "mlp-w1");
            let s2 = rng::derive_seed(cfg.seed, "mlp-w2");
            let w1 = (0..dim * h)
                .map(|i| rng::standard_normal(s1, i as u64, 0) / (dim as f64).sqrt())
                .collect();
            let w2 = (0..h)
                .map(|i| rng::standard_normal(s2, i as u64, 0) / (h as f64).sqrt())
                .collect();
            Params::Mlp1 { w1, b1: vec![0.0; h], w2, b2: 0.0 }
        }
    };
    let mut model = ClassifierModel {
        dim,
        hidden: if cfg.kind == ModelKind::Mlp1 { cfg.hidden } else { 0 },
        feature_mean,
        feature_std,
        params,
    };

    let std_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| model.standardize(r).expect("dimension checked above"))
        .collect();

    let mut loss_history = Vec::with_capacity(cfg.epochs + 1);
    for epoch in 0..cfg.epochs {
        let (loss, grad) = model.loss_and_gradient_std(&std_rows, &bal_labels, cfg.l2);
        if !loss.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
        loss_history.push(loss);
        let mut p = model.flat_params();
        for (pi, gi) in p.iter_mut().zip(&grad) {
            *pi -= cfg.learning_rate * gi;
        }
        model.set_flat_params(&p).expect("layout unchanged");
    }
    let (final_loss, _) = model.loss_and_gradient_std(&std_rows, &bal_labels, cfg.l2);
    if !final_loss.is_finite() {
        return Err(ModelError::NonFiniteLoss { epoch: cfg.epochs });
    }
    loss_history.push(final_loss);

    Ok(TrainOutcome { model, loss_history })
}

/// Writes the text serialization to a file.
pub fn save_model(model: &ClassifierModel, path: &Path) -> Result<(), ModelError> {
    Ok(std::fs::write(path, model.to_text())?)
}

/// Reads a model written by [`save_model`].
pub fn load_model(path: &Path) -> Result<ClassifierModel, ModelError> {
    ClassifierModel::from_text(&std::fs::read_to_string(path)?)
}
