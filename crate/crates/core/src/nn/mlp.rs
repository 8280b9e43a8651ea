use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Per-layer tensors shaped like the parameters of an [`Mlp`].
///
/// Used for gradients and for optimizer moment accumulators. Weight
/// matrices are stored row-major with shape `(fan_out, fan_in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Gradients {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn matches(&self, net: &Mlp) -> bool {
        self.weights.len() == net.weights.len()
            && self.biases.len() == net.biases.len()
            && self
                .weights
                .iter()
                .zip(&net.weights)
                .all(|(g, w)| g.len() == w.len())
            && self
                .biases
                .iter()
                .zip(&net.biases)
                .all(|(g, b)| g.len() == b.len())
    }

    pub fn is_zero(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.iter().all(|&x| x == 0.0))
    }

    /// Iterates every entry: weights of each layer followed by its biases.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
    }

    /// Weight and bias blocks in the same order as [`Mlp::param_blocks_mut`].
    pub(crate) fn blocks(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.weights.iter().chain(&self.biases).map(Vec::as_slice)
    }

    pub(crate) fn blocks_mut(&mut self) -> impl Iterator<Item = &mut [f64]> + '_ {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .map(Vec::as_mut_slice)
    }
}

/// Dot product with four independent partial sums, which lets the
/// multiply-adds pipeline instead of waiting on one running total.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for j in 0..4 {
            acc[j] += ca[j] * cb[j];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Fully connected feed-forward network: ReLU on hidden layers, linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

fn validate_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::contract(format!(
            "a network needs at least an input and an output layer, got sizes {layer_sizes:?}"
        )));
    }
    if layer_sizes.iter().any(|&n| n == 0) {
        return Err(Error::contract(format!(
            "layer sizes must be positive, got {layer_sizes:?}"
        )));
    }
    Ok(())
}

impl Mlp {
    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn new<R: Rng + ?Sized>(layer_sizes: &[usize], rng: &mut R) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
        let mut biases = Vec::with_capacity(layer_sizes.len() - 1);
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.gen_range(-bound..=bound))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights: layer_sizes
                .windows(2)
                .map(|p| vec![0.0; p[0] * p[1]])
                .collect(),
            biases: layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
        })
    }

    /// Builds a network from explicit row-major weights and biases.
    pub fn from_parameters(
        layer_sizes: &[usize],
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let layers = layer_sizes.len() - 1;
        check_len("weight layer count", layers, weights.len())?;
        check_len("bias layer count", layers, biases.len())?;
        for (k, pair) in layer_sizes.windows(2).enumerate() {
            check_len("weight matrix", pair[0] * pair[1], weights[k].len())?;
            check_len("bias vector", pair[1], biases[k].len())?;
        }
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.weights[layer]
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut [f64] {
        &mut self.biases[layer]
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// Every weight matrix, then every bias vector.
    pub(crate) fn param_blocks_mut(&mut self) -> impl Iterator<Item = &mut [f64]> + '_ {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .map(Vec::as_mut_slice)
    }

    /// Independent copy with identical parameters (target-network snapshot).
    pub fn clone_parameters(&self) -> Mlp {
        self.clone()
    }

    /// Overwrites this network's parameters with those of `src` without
    /// reallocating.
    pub fn copy_parameters_from(&mut self, src: &Mlp) -> Result<()> {
        if self.layer_sizes != src.layer_sizes {
            return Err(Error::contract(format!(
                "cannot copy parameters of a {:?} network into a {:?} network",
                src.layer_sizes, self.layer_sizes
            )));
        }
        for (dst, s) in self.weights.iter_mut().zip(&src.weights) {
            dst.copy_from_slice(s);
        }
        for (dst, s) in self.biases.iter_mut().zip(&src.biases) {
            dst.copy_from_slice(s);
        }
        Ok(())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        check_len("network input", self.input_dim(), input.len())?;
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::contract("network input contains a non-finite value"));
        }
        Ok(())
    }

    /// `out = W x + b` for one layer, into `out`.
    fn affine(&self, layer: usize, x: &[f64], out: &mut Vec<f64>) {
        let fan_in = self.layer_sizes[layer];
        out.clear();
        out.extend(
            self.weights[layer]
                .chunks_exact(fan_in)
                .zip(&self.biases[layer])
                .map(|(row, b)| b + dot(row, x)),
        );
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let last = self.num_layers() - 1;
        let mut x = input.to_vec();
        let mut out = Vec::new();
        for k in 0..=last {
            self.affine(k, &x, &mut out);
            if k < last {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            if out.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericFailure { layer: k });
            }
            std::mem::swap(&mut x, &mut out);
        }
        Ok(x)
    }

    /// Mean over the batch of the summed squared error on the selected
    /// outputs, together with its exact gradient.
    ///
    /// With `mask`, sample `i` only contributes through output `mask[i]`;
    /// the other entries of `targets[i]` are ignored and receive no error
    /// signal. Target rows are always full output-width.
    pub fn mse_loss_and_gradients<I, T>(
        &self,
        inputs: &[I],
        targets: &[T],
        mask: Option<&[usize]>,
    ) -> Result<(f64, Gradients)>
    where
        I: AsRef<[f64]>,
        T: AsRef<[f64]>,
    {
        let batch = inputs.len();
        if batch == 0 {
            return Err(Error::contract("empty training batch"));
        }
        check_len("target batch", batch, targets.len())?;
        let out_dim = self.output_dim();
        if let Some(mask) = mask {
            check_len("output mask", batch, mask.len())?;
            if let Some(&bad) = mask.iter().find(|&&j| j >= out_dim) {
                return Err(Error::contract(format!(
                    "mask index {bad} out of range for {out_dim} outputs"
                )));
            }
        }

        let layers = self.num_layers();
        let scale = 1.0 / batch as f64;
        let mut grads = Gradients::zeros_like(self);
        let mut loss = 0.0;

        // activations[0] is the input, activations[k + 1] the output of layer k
        let mut activations: Vec<Vec<f64>> = vec![Vec::new(); layers + 1];
        let mut delta = Vec::new();
        let mut prev_delta = Vec::new();

        for (i, (input, target)) in inputs.iter().zip(targets).enumerate() {
            let input = input.as_ref();
            let target = target.as_ref();
            self.check_input(input)?;
            check_len("target", out_dim, target.len())?;

            activations[0].clear();
            activations[0].extend_from_slice(input);
            for k in 0..layers {
                let (done, rest) = activations.split_at_mut(k + 1);
                self.affine(k, &done[k], &mut rest[0]);
                if k + 1 < layers {
                    rest[0].iter_mut().for_each(|v| *v = v.max(0.0));
                }
                if rest[0].iter().any(|v| !v.is_finite()) {
                    return Err(Error::NumericFailure { layer: k });
                }
            }

            let output = &activations[layers];
            delta.clear();
            delta.resize(out_dim, 0.0);
            let mut accumulate = |j: usize| -> Result<()> {
                if !target[j].is_finite() {
                    return Err(Error::contract("training target is not finite"));
                }
                let err = output[j] - target[j];
                loss += err * err * scale;
                delta[j] = 2.0 * err * scale;
                Ok(())
            };
            match mask {
                Some(mask) => accumulate(mask[i])?,
                None => (0..out_dim).try_for_each(&mut accumulate)?,
            }

            for k in (0..layers).rev() {
                let fan_in = self.layer_sizes[k];
                let x = &activations[k];
                for ((grow, d), gb) in grads.weights[k]
                    .chunks_exact_mut(fan_in)
                    .zip(&delta)
                    .zip(grads.biases[k].iter_mut())
                {
                    if *d != 0.0 {
                        grow.iter_mut().zip(x).for_each(|(g, xv)| *g += d * xv);
                        *gb += d;
                    }
                }
                if k == 0 {
                    break;
                }
                prev_delta.clear();
                prev_delta.resize(fan_in, 0.0);
                for (row, d) in self.weights[k].chunks_exact(fan_in).zip(&delta) {
                    if *d != 0.0 {
                        prev_delta
                            .iter_mut()
                            .zip(row)
                            .for_each(|(p, w)| *p += w * d);
                    }
                }
                // ReLU derivative: post-activation > 0 iff pre-activation > 0
                prev_delta
                    .iter_mut()
                    .zip(x)
                    .filter(|(_, a)| **a <= 0.0)
                    .for_each(|(p, _)| *p = 0.0);
                std::mem::swap(&mut delta, &mut prev_delta);
            }
        }
        Ok((loss, grads))
    }
}

pub const CHECKPOINT_FORMAT: &str = "dqv-mlp";
pub const CHECKPOINT_VERSION: u32 = 1;

/// On-disk form of an [`Mlp`]; see `docs/checkpoint-format.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpCheckpoint {
    pub format: String,
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl From<&Mlp> for MlpCheckpoint {
    fn from(net: &Mlp) -> Self {
        MlpCheckpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            layer_sizes: net.layer_sizes.clone(),
            weights: net.weights.clone(),
            biases: net.biases.clone(),
        }
    }
}

impl TryFrom<MlpCheckpoint> for Mlp {
    type Error = Error;

    fn try_from(ckpt: MlpCheckpoint) -> Result<Self> {
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!(
                "expected format {CHECKPOINT_FORMAT:?}, found {:?}",
                ckpt.format
            )));
        }
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported network checkpoint version {}",
                ckpt.version
            )));
        }
        Mlp::from_parameters(&ckpt.layer_sizes, ckpt.weights, ckpt.biases)
    }
}

impl Serialize for Mlp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MlpCheckpoint::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mlp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ckpt = MlpCheckpoint::deserialize(d)?;
        Mlp::try_from(ckpt).map_err(serde::de::Error::custom)
    }
}
