//! TF-IDF features over unigrams and bigrams with a multinomial logistic
//! regression trained by full-batch gradient descent.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{require_text, Classifier, ClassifyError, LabelSpace, Prediction};
use crate::metrics::evaluate;

pub const MODEL_MAGIC: &str = "AFD-BASELINE";
pub const MODEL_VERSION: u32 = 1;

const CHUNK: usize = 256;

/// Sorted `(feature index, value)` pairs.
pub type SparseVec = Vec<(u32, f64)>;

static TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[\p{L}\p{N}]+(?:[:'][\p{L}\p{N}]+)*").unwrap());

/// Lowercased word tokens; `WP:GNG` and `don't` stay whole.
pub fn tokenize(text: &str) -> Vec<String> {
    TOKEN.find_iter(&text.to_lowercase()).map(|m| m.as_str().to_string()).collect()
}

fn terms(text: &str) -> Vec<String> {
    let tokens = tokenize(text);
    let mut out = Vec::with_capacity(tokens.len() * 2);
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(format!("{} {t}", tokens[i - 1]));
        }
        out.push(t.clone());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Minimum number of training documents a term must occur in.
    pub min_df: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams { learning_rate: 1.0, epochs: 200, l2: 1e-4, min_df: 2, seed: 0 }
    }
}

/// Vocabulary and smoothed idf weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    vocab: Vec<String>,
    idf: Vec<f64>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl FeatureSpace {
    pub fn fit<S: AsRef<str>>(docs: &[S], min_df: usize) -> Self {
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<String> = terms(doc.as_ref());
            seen.sort();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let n = docs.len() as f64;
        let (vocab, idf): (Vec<String>, Vec<f64>) = df
            .into_iter()
            .filter(|(_, c)| *c >= min_df.max(1))
            .map(|(t, c)| (t, ((1.0 + n) / (1.0 + c as f64)).ln() + 1.0))
            .unzip();
        Self::from_parts(vocab, idf)
    }

    fn from_parts(vocab: Vec<String>, idf: Vec<f64>) -> Self {
        let index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        FeatureSpace { vocab, idf, index }
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    /// L2-normalized tf-idf vector; out-of-vocabulary terms are ignored.
    pub fn transform(&self, text: &str) -> SparseVec {
        let mut tf: BTreeMap<u32, f64> = BTreeMap::new();
        for t in terms(text) {
            if let Some(&i) = self.index.get(&t) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        let mut v: SparseVec = tf.into_iter().map(|(i, c)| (i, c * self.idf[i as usize])).collect();
        let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, x) in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

/// Softmax over `n_labels` linear scores. `weights` is row-major with one row
/// of `n_features + 1` per label; the last column is the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSoftmax {
    pub n_labels: usize,
    pub n_features: usize,
    pub weights: Vec<f64>,
}

impl LinearSoftmax {
    pub fn zeros(n_labels: usize, n_features: usize) -> Self {
        LinearSoftmax { n_labels, n_features, weights: vec![0.0; n_labels * (n_features + 1)] }
    }

    fn row(&self) -> usize {
        self.n_features + 1
    }

    pub fn probabilities(&self, x: &SparseVec) -> Vec<f64> {
        let row = self.row();
        let mut z: Vec<f64> = (0..self.n_labels)
            .map(|l| {
                let w = &self.weights[l * row..(l + 1) * row];
                w[self.n_features] + x.iter().map(|&(i, v)| w[i as usize] * v).sum::<f64>()
            })
            .collect();
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for s in &mut z {
            *s = (*s - max).exp();
            sum += *s;
        }
        for s in &mut z {
            *s /= sum;
        }
        z
    }

    /// Mean cross-entropy plus `l2 / 2 * |W|^2` (bias excluded), and its gradient.
    pub fn loss_and_gradient(&self, xs: &[SparseVec], ys: &[usize], l2: f64) -> (f64, Vec<f64>) {
        let row = self.row();
        let n = xs.len().max(1) as f64;
        let parts: Vec<(f64, Vec<f64>)> = xs
            .par_chunks(CHUNK)
            .zip(ys.par_chunks(CHUNK))
            .map(|(xc, yc)| {
                let mut grad = vec![0.0; self.weights.len()];
                let mut loss = 0.0;
                for (x, &y) in xc.iter().zip(yc) {
                    let p = self.probabilities(x);
                    loss -= p[y].max(1e-300).ln();
                    for (l, pl) in p.iter().enumerate() {
                        let d = pl - if l == y { 1.0 } else { 0.0 };
                        let g = &mut grad[l * row..(l + 1) * row];
                        for &(i, v) in x {
                            g[i as usize] += d * v;
                        }
                        g[self.n_features] += d;
                    }
                }
                (loss, grad)
            })
            .collect();
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.weights.len()];
        for (l, g) in parts {
            loss += l;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        loss /= n;
        for g in &mut grad {
            *g /= n;
        }
        for l in 0..self.n_labels {
            for i in 0..self.n_features {
                let w = self.weights[l * row + i];
                loss += 0.5 * l2 * w * w;
                grad[l * row + i] += l2 * w;
            }
        }
        (loss, grad)
    }

    pub fn objective(&self, xs: &[SparseVec], ys: &[usize], l2: f64) -> f64 {
        self.loss_and_gradient(xs, ys, l2).0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Objective at the start of each epoch.
    pub losses: Vec<f64>,
    pub vocabulary_size: usize,
    pub validation_macro_f1: Option<f64>,
    pub validation_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    space: LabelSpace,
    hyperparams: Hyperparams,
    features: FeatureSpace,
    linear: LinearSoftmax,
}

#[derive(Deserialize)]
struct ModelFile {
    space: LabelSpace,
    hyperparams: Hyperparams,
    vocab: Vec<String>,
    idf: Vec<f64>,
    linear: LinearSoftmax,
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    space: &'a LabelSpace,
    hyperparams: &'a Hyperparams,
    vocab: &'a [String],
    idf: &'a [f64],
    linear: &'a LinearSoftmax,
}

fn label_indices(space: &LabelSpace, items: &[(String, String)]) -> Result<Vec<usize>, ClassifyError> {
    items
        .iter()
        .map(|(_, l)| space.index_of(l).ok_or_else(|| ClassifyError::LabelSpaceMismatch { task: space.task, label: l.clone() }))
        .collect()
}

/// Trains on `(text, label)` pairs. Validation pairs, when given, are scored
/// with macro-F1 after training.
pub fn train_baseline(
    space: LabelSpace,
    train: &[(String, String)],
    validation: &[(String, String)],
    hp: Hyperparams,
) -> Result<(BaselineModel, TrainReport), ClassifyError> {
    let ys = label_indices(&space, train)?;
    let mut counts = vec![0usize; space.len()];
    for &y in &ys {
        counts[y] += 1;
    }
    if let Some(l) = counts.iter().position(|&c| c < 2) {
        return Err(ClassifyError::InsufficientData(space.labels[l].clone()));
    }
    let texts: Vec<&str> = train.iter().map(|(t, _)| t.as_str()).collect();
    let features = FeatureSpace::fit(&texts, hp.min_df);
    let xs: Vec<SparseVec> = texts.par_iter().map(|t| features.transform(t)).collect();
    let mut linear = LinearSoftmax::zeros(space.len(), features.len());
    let mut losses = Vec::with_capacity(hp.epochs);
    for epoch in 0..hp.epochs {
        let (loss, grad) = linear.loss_and_gradient(&xs, &ys, hp.l2);
        losses.push(loss);
        for (w, g) in linear.weights.iter_mut().zip(&grad) {
            *w -= hp.learning_rate * g;
        }
        if epoch % 50 == 0 {
            log::debug!("epoch {epoch}: loss {:.6}", losses[epoch]);
        }
    }
    let vocabulary_size = features.len();
    let model = BaselineModel { space, hyperparams: hp, features, linear };
    let (validation_macro_f1, validation_accuracy) = if validation.is_empty() {
        (None, None)
    } else {
        label_indices(&model.space, validation)?;
        let pairs: Vec<(String, String)> = validation
            .par_iter()
            .map(|(t, gold)| (gold.clone(), model.predict_features(&model.features.transform(t)).label))
            .collect();
        let report = evaluate(&pairs, &model.space.labels).map_err(|e| ClassifyError::InvalidPrediction(e.to_string()))?;
        (Some(report.macro_f1), Some(report.accuracy))
    };
    Ok((model, TrainReport { losses, vocabulary_size, validation_macro_f1, validation_accuracy }))
}

impl BaselineModel {
    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    pub fn features(&self) -> &FeatureSpace {
        &self.features
    }

    pub fn linear(&self) -> &LinearSoftmax {
        &self.linear
    }

    /// Weight matrix shape: labels x (vocabulary + 1).
    pub fn weight_shape(&self) -> (usize, usize) {
        (self.linear.n_labels, self.linear.n_features + 1)
    }

    fn predict_features(&self, x: &SparseVec) -> Prediction {
        Prediction::from_distribution(&self.space, &self.linear.probabilities(x))
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), ClassifyError> {
        let io = |e: std::io::Error| ClassifyError::Io(e.to_string());
        writeln!(w, "{MODEL_MAGIC}\t{MODEL_VERSION}").map_err(io)?;
        let file = ModelFileRef {
            space: &self.space,
            hyperparams: &self.hyperparams,
            vocab: &self.features.vocab,
            idf: &self.features.idf,
            linear: &self.linear,
        };
        serde_json::to_writer(&mut *w, &file).map_err(|e| ClassifyError::Io(e.to_string()))?;
        writeln!(w).map_err(io)
    }

    pub fn read_from(r: impl Read) -> Result<Self, ClassifyError> {
        let mut reader = BufReader::new(r);
        let mut header = String::new();
        reader.read_line(&mut header).map_err(|e| ClassifyError::Io(e.to_string()))?;
        let mut parts = header.trim_end().split('\t');
        if parts.next() != Some(MODEL_MAGIC) {
            return Err(ClassifyError::ModelFormat("missing model header".into()));
        }
        let version: u32 = parts.next().and_then(|v| v.parse().ok()).unwrap_or(0);
        if version != MODEL_VERSION {
            return Err(ClassifyError::ModelFormat(format!("model version {version}, expected {MODEL_VERSION}")));
        }
        let file: ModelFile = serde_json::from_reader(reader).map_err(|e| ClassifyError::ModelFormat(e.to_string()))?;
        if file.vocab.len() != file.idf.len()
            || file.linear.n_features != file.vocab.len()
            || file.linear.n_labels != file.space.len()
            || file.linear.weights.len() != file.space.len() * (file.vocab.len() + 1)
        {
            return Err(ClassifyError::ModelFormat("inconsistent dimensions".into()));
        }
        Ok(BaselineModel {
            space: file.space,
            hyperparams: file.hyperparams,
            features: FeatureSpace::from_parts(file.vocab, file.idf),
            linear: file.linear,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), ClassifyError> {
        let f = std::fs::File::create(path).map_err(|e| ClassifyError::Io(format!("{}: {e}", path.display())))?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| ClassifyError::Io(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ClassifyError> {
        let f = std::fs::File::open(path).map_err(|e| ClassifyError::Io(format!("{}: {e}", path.display())))?;
        Self::read_from(f)
    }
}

impl Classifier for BaselineModel {
    fn label_space(&self) -> &LabelSpace {
        &self.space
    }

    fn predict(&self, _title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
        require_text(text)?;
        Ok(self.predict_features(&self.features.transform(text)))
    }
}
