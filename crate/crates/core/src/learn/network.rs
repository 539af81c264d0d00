use nalgebra::DMatrixView;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative in terms of the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Channels by height by width. A flat vector of length `n` is `(n, 1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn flat(n: usize) -> Self {
        Shape { channels: n, height: 1, width: 1 }
    }

    pub fn image(channels: usize, height: usize, width: usize) -> Self {
        Shape { channels, height, width }
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    /// Affine map on the flattened input followed by `activation`.
    Dense { width: usize, activation: Activation },
    /// Valid (unpadded) convolution.
    Conv { channels: usize, kernel: usize, stride: usize, activation: Activation },
    /// Non-overlapping max pooling; trailing rows and columns are dropped.
    MaxPool { size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input: Shape,
    pub layers: Vec<LayerSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct LayerPlan {
    pub spec: LayerSpec,
    pub input: Shape,
    pub output: Shape,
    pub offset: usize,
    pub weights: usize,
    pub biases: usize,
}

impl NetworkSpec {
    /// Dense ReLU hidden layers and one sigmoid output.
    pub fn mlp(inputs: usize, hidden: &[usize]) -> Self {
        let mut layers: Vec<LayerSpec> =
            hidden.iter().map(|&width| LayerSpec::Dense { width, activation: Activation::Relu }).collect();
        layers.push(LayerSpec::Dense { width: 1, activation: Activation::Sigmoid });
        NetworkSpec { input: Shape::flat(inputs), layers }
    }

    pub(crate) fn plan(&self) -> Result<Vec<LayerPlan>, LearnError> {
        let bad = |msg: String| Err(LearnError::Spec(msg));
        if self.input.is_empty() {
            return bad("empty input".into());
        }
        let mut shape = self.input;
        let mut offset = 0;
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, &spec) in self.layers.iter().enumerate() {
            let (output, weights, biases) = match spec {
                LayerSpec::Dense { width, .. } => {
                    if width == 0 {
                        return bad(format!("layer {i}: zero width"));
                    }
                    (Shape::flat(width), width * shape.len(), width)
                }
                LayerSpec::Conv { channels, kernel, stride, .. } => {
                    if channels == 0 || kernel == 0 || stride == 0 || kernel > shape.height || kernel > shape.width {
                        return bad(format!("layer {i}: convolution does not fit {shape:?}"));
                    }
                    let h = (shape.height - kernel) / stride + 1;
                    let w = (shape.width - kernel) / stride + 1;
                    (Shape::image(channels, h, w), channels * shape.channels * kernel * kernel, channels)
                }
                LayerSpec::MaxPool { size } => {
                    if size == 0 || size > shape.height || size > shape.width {
                        return bad(format!("layer {i}: pooling does not fit {shape:?}"));
                    }
                    (Shape::image(shape.channels, shape.height / size, shape.width / size), 0, 0)
                }
            };
            out.push(LayerPlan { spec, input: shape, output, offset, weights, biases });
            offset += weights + biases;
            shape = output;
        }
        if out.is_empty() {
            return bad("no layers".into());
        }
        Ok(out)
    }

    pub fn parameter_count(&self) -> Result<usize, LearnError> {
        Ok(self.plan()?.iter().map(|p| p.weights + p.biases).sum())
    }

    pub fn output_len(&self) -> Result<usize, LearnError> {
        Ok(self.plan()?.last().unwrap().output.len())
    }
}

/// A network and its parameters, layer by layer: weights (row-major,
/// `out x in` for dense and `out x in x k x k` for convolutions) then biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkFile", into = "NetworkFile")]
pub struct Network {
    spec: NetworkSpec,
    params: Vec<f64>,
    plan: Vec<LayerPlan>,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    spec: NetworkSpec,
    params: Vec<f64>,
}

impl TryFrom<NetworkFile> for Network {
    type Error = LearnError;

    fn try_from(f: NetworkFile) -> Result<Self, LearnError> {
        Network::from_params(f.spec, f.params)
    }
}

impl From<Network> for NetworkFile {
    fn from(n: Network) -> Self {
        NetworkFile { spec: n.spec, params: n.params }
    }
}

/// One training pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl Sample {
    /// Scalar target 1 for the positive class, 0 otherwise.
    pub fn labeled(input: Vec<f64>, positive: bool) -> Self {
        Sample { input, target: vec![if positive { 1.0 } else { 0.0 }] }
    }
}

/// Per-layer values kept for backpropagation, batch-major.
struct Trace {
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
    argmax: Vec<Vec<usize>>,
}

impl Network {
    pub fn zeros(spec: NetworkSpec) -> Result<Self, LearnError> {
        let n = spec.parameter_count()?;
        Network::from_params(spec, vec![0.0; n])
    }

    pub fn from_params(spec: NetworkSpec, params: Vec<f64>) -> Result<Self, LearnError> {
        let plan = spec.plan()?;
        let n: usize = plan.iter().map(|p| p.weights + p.biases).sum();
        if params.len() != n {
            return Err(LearnError::Dimension { expected: n, found: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(LearnError::Spec("non-finite parameter".into()));
        }
        Ok(Network { spec, params, plan })
    }

    /// Weights uniform on `[-a, a]`, `a = scale * sqrt(6 / (fan_in + fan_out))`;
    /// biases zero.
    pub fn init(spec: NetworkSpec, rng: &mut ChaCha8Rng, scale: f64) -> Result<Self, LearnError> {
        let mut net = Network::zeros(spec)?;
        for p in net.plan.clone() {
            let (fan_in, fan_out) = match p.spec {
                LayerSpec::Dense { width, .. } => (p.input.len(), width),
                LayerSpec::Conv { channels, kernel, .. } => (p.input.channels * kernel * kernel, channels * kernel * kernel),
                LayerSpec::MaxPool { .. } => continue,
            };
            let a = scale * (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in &mut net.params[p.offset..p.offset + p.weights] {
                *w = if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 };
            }
        }
        Ok(net)
    }

    pub fn init_seeded(spec: NetworkSpec, seed: u64, scale: f64) -> Result<Self, LearnError> {
        Network::init(spec, &mut ChaCha8Rng::seed_from_u64(seed), scale)
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn input_len(&self) -> usize {
        self.spec.input.len()
    }

    pub fn output_len(&self) -> usize {
        self.plan.last().unwrap().output.len()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, LearnError> {
        if x.len() != self.input_len() {
            return Err(LearnError::Dimension { expected: self.input_len(), found: x.len() });
        }
        Ok(self.run(x.to_vec(), 1).post.pop().unwrap())
    }

    /// First output coordinate.
    pub fn score(&self, x: &[f64]) -> Result<f64, LearnError> {
        Ok(self.forward(x)?[0])
    }

    /// Sum of squared errors.
    pub fn loss(&self, batch: &[Sample]) -> Result<f64, LearnError> {
        let (x, t) = self.stack(batch)?;
        let out = self.run(x, batch.len()).post.pop().unwrap();
        Ok(out.iter().zip(&t).map(|(y, t)| (y - t) * (y - t)).sum())
    }

    /// Loss and its gradient with respect to every parameter.
    pub fn gradient(&self, batch: &[Sample]) -> Result<(f64, Vec<f64>), LearnError> {
        let (x, t) = self.stack(batch)?;
        let b = batch.len();
        let trace = self.run(x, b);
        let y = trace.post.last().unwrap();
        let loss = y.iter().zip(&t).map(|(y, t)| (y - t) * (y - t)).sum();
        let mut delta: Vec<f64> = y.iter().zip(&t).map(|(y, t)| 2.0 * (y - t)).collect();
        let mut grad = vec![0.0; self.params.len()];
        for (l, p) in self.plan.iter().enumerate().rev() {
            let input = &trace.post[l];
            let pre = &trace.pre[l + 1];
            let post = &trace.post[l + 1];
            delta = match p.spec {
                LayerSpec::Dense { activation, .. } => {
                    let dz: Vec<f64> =
                        delta.iter().zip(pre).zip(post).map(|((d, z), a)| d * activation.derivative(*z, *a)).collect();
                    self.dense_backward(p, input, &dz, b, &mut grad)
                }
                LayerSpec::Conv { activation, .. } => {
                    let dz: Vec<f64> =
                        delta.iter().zip(pre).zip(post).map(|((d, z), a)| d * activation.derivative(*z, *a)).collect();
                    self.conv_backward(p, input, &dz, b, &mut grad)
                }
                LayerSpec::MaxPool { .. } => {
                    let mut dx = vec![0.0; b * p.input.len()];
                    for (d, &src) in delta.iter().zip(&trace.argmax[l]) {
                        dx[src] += d;
                    }
                    dx
                }
            };
        }
        Ok((loss, grad))
    }

    fn stack(&self, batch: &[Sample]) -> Result<(Vec<f64>, Vec<f64>), LearnError> {
        if batch.is_empty() {
            return Err(LearnError::EmptyBatch);
        }
        let (n_in, n_out) = (self.input_len(), self.output_len());
        let mut x = Vec::with_capacity(batch.len() * n_in);
        let mut t = Vec::with_capacity(batch.len() * n_out);
        for s in batch {
            if s.input.len() != n_in {
                return Err(LearnError::Dimension { expected: n_in, found: s.input.len() });
            }
            if s.target.len() != n_out {
                return Err(LearnError::Dimension { expected: n_out, found: s.target.len() });
            }
            x.extend_from_slice(&s.input);
            t.extend_from_slice(&s.target);
        }
        Ok((x, t))
    }

    fn run(&self, x: Vec<f64>, b: usize) -> Trace {
        let mut trace = Trace { pre: vec![Vec::new()], post: vec![x], argmax: Vec::new() };
        for p in &self.plan {
            let input = trace.post.last().unwrap();
            let (pre, post, arg) = match p.spec {
                LayerSpec::Dense { activation, .. } => {
                    let z = self.dense_forward(p, input, b);
                    let a = z.iter().map(|&v| activation.apply(v)).collect();
                    (z, a, Vec::new())
                }
                LayerSpec::Conv { activation, .. } => {
                    let z = self.conv_forward(p, input, b);
                    let a = z.iter().map(|&v| activation.apply(v)).collect();
                    (z, a, Vec::new())
                }
                LayerSpec::MaxPool { size } => {
                    let (a, arg) = max_pool(p, size, input, b);
                    (Vec::new(), a, arg)
                }
            };
            trace.pre.push(pre);
            trace.post.push(post);
            trace.argmax.push(arg);
        }
        trace
    }

    fn layer_params(&self, p: &LayerPlan) -> (&[f64], &[f64]) {
        let w = &self.params[p.offset..p.offset + p.weights];
        (w, &self.params[p.offset + p.weights..p.offset + p.weights + p.biases])
    }

    fn dense_forward(&self, p: &LayerPlan, input: &[f64], b: usize) -> Vec<f64> {
        let (n_in, n_out) = (p.input.len(), p.output.len());
        let (w, bias) = self.layer_params(p);
        // column-major views: w^T is n_in x n_out, the batch is n_in x b
        let wt = DMatrixView::from_slice(w, n_in, n_out);
        let x = DMatrixView::from_slice(input, n_in, b);
        let mut z = wt.tr_mul(&x);
        for mut col in z.column_iter_mut() {
            for (v, c) in col.iter_mut().zip(bias) {
                *v += c;
            }
        }
        z.as_slice().to_vec()
    }

    fn dense_backward(&self, p: &LayerPlan, input: &[f64], dz: &[f64], b: usize, grad: &mut [f64]) -> Vec<f64> {
        let (n_in, n_out) = (p.input.len(), p.output.len());
        let (w, _) = self.layer_params(p);
        let wt = DMatrixView::from_slice(w, n_in, n_out);
        let x = DMatrixView::from_slice(input, n_in, b);
        let d = DMatrixView::from_slice(dz, n_out, b);
        let dw = x * d.transpose();
        for (g, v) in grad[p.offset..p.offset + p.weights].iter_mut().zip(dw.as_slice()) {
            *g += v;
        }
        let db = &mut grad[p.offset + p.weights..p.offset + p.weights + p.biases];
        for col in d.column_iter() {
            for (g, v) in db.iter_mut().zip(col.iter()) {
                *g += v;
            }
        }
        (wt * d).as_slice().to_vec()
    }

    fn conv_forward(&self, p: &LayerPlan, input: &[f64], b: usize) -> Vec<f64> {
        let LayerSpec::Conv { kernel: k, stride: s, .. } = p.spec else { unreachable!() };
        let (w, bias) = self.layer_params(p);
        let (ci, h, wd) = (p.input.channels, p.input.height, p.input.width);
        let (co, oh, ow) = (p.output.channels, p.output.height, p.output.width);
        let mut out = vec![0.0; b * p.output.len()];
        for n in 0..b {
            let x = &input[n * p.input.len()..(n + 1) * p.input.len()];
            let z = &mut out[n * p.output.len()..(n + 1) * p.output.len()];
            for o in 0..co {
                for i in 0..oh {
                    for j in 0..ow {
                        let mut acc = bias[o];
                        for c in 0..ci {
                            for u in 0..k {
                                let xrow = &x[(c * h + i * s + u) * wd + j * s..];
                                let wrow = &w[((o * ci + c) * k + u) * k..];
                                for v in 0..k {
                                    acc += wrow[v] * xrow[v];
                                }
                            }
                        }
                        z[(o * oh + i) * ow + j] = acc;
                    }
                }
            }
        }
        out
    }

    fn conv_backward(&self, p: &LayerPlan, input: &[f64], dz: &[f64], b: usize, grad: &mut [f64]) -> Vec<f64> {
        let LayerSpec::Conv { kernel: k, stride: s, .. } = p.spec else { unreachable!() };
        let (w, _) = self.layer_params(p);
        let (ci, h, wd) = (p.input.channels, p.input.height, p.input.width);
        let (co, oh, ow) = (p.output.channels, p.output.height, p.output.width);
        let mut dx = vec![0.0; b * p.input.len()];
        let (gw, gb) = grad[p.offset..p.offset + p.weights + p.biases].split_at_mut(p.weights);
        for n in 0..b {
            let x = &input[n * p.input.len()..(n + 1) * p.input.len()];
            let d = &dz[n * p.output.len()..(n + 1) * p.output.len()];
            let dxn = &mut dx[n * p.input.len()..(n + 1) * p.input.len()];
            for o in 0..co {
                for i in 0..oh {
                    for j in 0..ow {
                        let g = d[(o * oh + i) * ow + j];
                        if g == 0.0 {
                            continue;
                        }
                        gb[o] += g;
                        for c in 0..ci {
                            for u in 0..k {
                                let xi = (c * h + i * s + u) * wd + j * s;
                                let wi = ((o * ci + c) * k + u) * k;
                                for v in 0..k {
                                    gw[wi + v] += g * x[xi + v];
                                    dxn[xi + v] += g * w[wi + v];
                                }
                            }
                        }
                    }
                }
            }
        }
        dx
    }
}

/// Pooled values and, for each, the flat batch index of the chosen input.
fn max_pool(p: &LayerPlan, size: usize, input: &[f64], b: usize) -> (Vec<f64>, Vec<usize>) {
    let (c, h, w) = (p.input.channels, p.input.height, p.input.width);
    let (oh, ow) = (p.output.height, p.output.width);
    let mut out = Vec::with_capacity(b * p.output.len());
    let mut arg = Vec::with_capacity(b * p.output.len());
    for n in 0..b {
        let base = n * p.input.len();
        for ch in 0..c {
            for i in 0..oh {
                for j in 0..ow {
                    let mut best = base + (ch * h + i * size) * w + j * size;
                    for u in 0..size {
                        for v in 0..size {
                            let idx = base + (ch * h + i * size + u) * w + j * size + v;
                            if input[idx] > input[best] {
                                best = idx;
                            }
                        }
                    }
                    out.push(input[best]);
                    arg.push(best);
                }
            }
        }
    }
    (out, arg)
}
