//! Minimal dense-network engine: forward pass, reverse-mode gradients, and
//! forward-mode Jacobian-vector products over a flat parameter vector.
//!
//! Parameter layout is fixed and documented so direction vectors are portable
//! across runs: layers in order, each layer's weights row-major
//! (`out x in`) followed by its bias. Gated hidden layers (swiglu, reglu,
//! gaussglu) double the physical affine width; the first half is the value
//! path, the second half feeds the gate.

use crate::activations::ActivationKind;
use crate::scalar::{log_sum_exp, softmax};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NORM_EPS: f64 = 1e-5;

/// Architecture description. `layer_widths` runs input -> hidden... ->
/// n_classes; `activations` has one entry per hidden layer. `normalize`
/// standardizes each hidden preactivation vector (zero mean, unit variance
/// across features) before the nonlinearity.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NetworkSpec {
    pub layer_widths: Vec<usize>,
    pub activations: Vec<ActivationKind<f64>>,
    pub normalize: bool,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn new(
        layer_widths: Vec<usize>,
        activations: Vec<ActivationKind<f64>>,
        normalize: bool,
        seed: u64,
    ) -> Result<Self> {
        if layer_widths.len() < 2 || layer_widths.iter().any(|&w| w == 0) {
            return Err(Error::Dimension(
                "layer_widths needs >= 2 positive entries".into(),
            ));
        }
        if activations.len() != layer_widths.len() - 2 {
            return Err(Error::Dimension(format!(
                "expected {} hidden activations, got {}",
                layer_widths.len() - 2,
                activations.len()
            )));
        }
        Ok(Self {
            layer_widths,
            activations,
            normalize,
            seed,
        })
    }

    pub fn n_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }

    pub fn n_classes(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    fn is_hidden(&self, layer: usize) -> bool {
        layer + 1 < self.n_layers() + 1 && layer < self.activations.len()
    }

    /// Physical affine output width of `layer` (doubled for gated layers).
    fn phys_out(&self, layer: usize) -> usize {
        let logical = self.layer_widths[layer + 1];
        if self.is_hidden(layer) && self.activations[layer].is_gated() {
            2 * logical
        } else {
            logical
        }
    }

    fn layer_in(&self, layer: usize) -> usize {
        self.layer_widths[layer]
    }

    /// (weight offset, bias offset, end) of `layer` in the flat vector.
    fn layer_span(&self, layer: usize) -> (usize, usize, usize) {
        let mut off = 0;
        for l in 0..layer {
            off += self.phys_out(l) * (self.layer_in(l) + 1);
        }
        let w_len = self.phys_out(layer) * self.layer_in(layer);
        (off, off + w_len, off + w_len + self.phys_out(layer))
    }

    pub fn param_count(&self) -> usize {
        (0..self.n_layers())
            .map(|l| self.phys_out(l) * (self.layer_in(l) + 1))
            .sum()
    }

    /// Seeded Glorot-uniform weights, zero biases.
    pub fn init_params(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut params = vec![0.0; self.param_count()];
        for l in 0..self.n_layers() {
            let (w0, b0, _) = self.layer_span(l);
            let s = (6.0 / (self.layer_in(l) + self.phys_out(l)) as f64).sqrt();
            for w in &mut params[w0..b0] {
                *w = rng.gen_range(-s..s);
            }
        }
        params
    }
}

/// Mini-batch of feature rows and class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Batch {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if inputs.len() != labels.len() || inputs.is_empty() {
            return Err(Error::Dimension(
                "batch needs matching nonempty inputs and labels".into(),
            ));
        }
        let dim = inputs[0].len();
        if inputs.iter().any(|x| x.len() != dim) {
            return Err(Error::Dimension("ragged batch inputs".into()));
        }
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

struct NormCache {
    s: f64,
    y: Vec<f64>,
}

struct Trace {
    /// Input to each affine layer.
    xs: Vec<Vec<f64>>,
    /// Raw affine outputs, physical width.
    zs: Vec<Vec<f64>>,
    /// Post-normalization preactivations, physical width.
    zns: Vec<Vec<f64>>,
    norms: Vec<Option<NormCache>>,
    logits: Vec<f64>,
}

fn affine(params: &[f64], w0: usize, b0: usize, n_in: usize, n_out: usize, x: &[f64]) -> Vec<f64> {
    let mut out = params[b0..b0 + n_out].to_vec();
    for (j, o) in out.iter_mut().enumerate() {
        let row = &params[w0 + j * n_in..w0 + (j + 1) * n_in];
        for (w, xi) in row.iter().zip(x) {
            *o += w * xi;
        }
    }
    out
}

fn layernorm(z: &[f64]) -> (Vec<f64>, NormCache) {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let s = (var + NORM_EPS).sqrt();
    let y: Vec<f64> = z.iter().map(|v| (v - mean) / s).collect();
    (y.clone(), NormCache { s, y })
}

fn layernorm_jvp(z: &[f64], zdot: &[f64], cache: &NormCache) -> Vec<f64> {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let mdot = zdot.iter().sum::<f64>() / n;
    let vdot = 2.0
        * z.iter()
            .zip(zdot)
            .map(|(&zi, &zd)| (zi - mean) * zd)
            .sum::<f64>()
        / n;
    let sdot = vdot / (2.0 * cache.s);
    z.iter()
        .zip(zdot)
        .map(|(&zi, &zd)| (zd - mdot) / cache.s - (zi - mean) * sdot / (cache.s * cache.s))
        .collect()
}

fn layernorm_backward(g: &[f64], cache: &NormCache) -> Vec<f64> {
    let n = g.len() as f64;
    let gm = g.iter().sum::<f64>() / n;
    let gym = g.iter().zip(&cache.y).map(|(&a, &b)| a * b).sum::<f64>() / n;
    g.iter()
        .zip(&cache.y)
        .map(|(&gi, &yi)| (gi - gm - yi * gym) / cache.s)
        .collect()
}

fn check_finite(v: &[f64], layer: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::LayerOverflow(layer))
    }
}

fn forward_trace(spec: &NetworkSpec, params: &[f64], input: &[f64]) -> Result<Trace> {
    if input.len() != spec.input_dim() || params.len() != spec.param_count() {
        return Err(Error::Dimension("forward shape mismatch".into()));
    }
    let n_layers = spec.n_layers();
    let mut xs = Vec::with_capacity(n_layers);
    let mut zs = Vec::with_capacity(n_layers);
    let mut zns = Vec::with_capacity(n_layers);
    let mut norms = Vec::with_capacity(n_layers);
    let mut x = input.to_vec();
    for l in 0..n_layers {
        let (w0, b0, _) = spec.layer_span(l);
        let z = affine(params, w0, b0, spec.layer_in(l), spec.phys_out(l), &x);
        check_finite(&z, l)?;
        xs.push(std::mem::take(&mut x));
        if l + 1 == n_layers {
            zs.push(z.clone());
            zns.push(z.clone());
            norms.push(None);
            return Ok(Trace {
                xs,
                zs,
                zns,
                norms,
                logits: z,
            });
        }
        let (zn, cache) = if spec.normalize {
            let (zn, c) = layernorm(&z);
            (zn, Some(c))
        } else {
            (z.clone(), None)
        };
        zs.push(z);
        let kind = spec.activations[l];
        let width = spec.layer_widths[l + 1];
        x = if kind.is_gated() {
            (0..width)
                .map(|j| zn[j] * kind.value_and_derivative(zn[width + j]).0)
                .collect()
        } else {
            zn.iter().map(|&h| kind.value_and_derivative(h).0).collect()
        };
        check_finite(&x, l)?;
        zns.push(zn);
        norms.push(cache);
    }
    unreachable!("loop returns at the output layer");
}

/// Logits of one input.
pub fn forward(spec: &NetworkSpec, params: &[f64], input: &[f64]) -> Result<Vec<f64>> {
    Ok(forward_trace(spec, params, input)?.logits)
}

fn backprop(
    spec: &NetworkSpec,
    params: &[f64],
    trace: &Trace,
    dlogits: &[f64],
    grad: &mut [f64],
) {
    let n_layers = spec.n_layers();
    let mut dz = dlogits.to_vec();
    for l in (0..n_layers).rev() {
        // dz is the gradient w.r.t. the activation output of layer l
        // (or the logits for the last layer); pull it back to the affine
        // output, then to weights, bias, and layer input.
        if l + 1 < n_layers {
            let kind = spec.activations[l];
            let width = spec.layer_widths[l + 1];
            let zn = &trace.zns[l];
            let mut dzn = vec![0.0; spec.phys_out(l)];
            if kind.is_gated() {
                for j in 0..width {
                    let (g, gd) = kind.value_and_derivative(zn[width + j]);
                    dzn[j] = dz[j] * g;
                    dzn[width + j] = dz[j] * zn[j] * gd;
                }
            } else {
                for j in 0..width {
                    dzn[j] = dz[j] * kind.value_and_derivative(zn[j]).1;
                }
            }
            dz = match &trace.norms[l] {
                Some(cache) => layernorm_backward(&dzn, cache),
                None => dzn,
            };
        }
        let (w0, b0, _) = spec.layer_span(l);
        let n_in = spec.layer_in(l);
        let x = &trace.xs[l];
        let mut dx = vec![0.0; n_in];
        for (j, &dzj) in dz.iter().enumerate() {
            grad[b0 + j] += dzj;
            let row = w0 + j * n_in;
            for i in 0..n_in {
                grad[row + i] += dzj * x[i];
                dx[i] += dzj * params[row + i];
            }
        }
        dz = dx;
    }
}

/// Mean cross-entropy and its gradient over the batch.
pub fn loss_and_grad(spec: &NetworkSpec, params: &[f64], batch: &Batch) -> Result<(f64, Vec<f64>)> {
    let n = batch.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; spec.param_count()];
    for (x, &y) in batch.inputs.iter().zip(&batch.labels) {
        if y >= spec.n_classes() {
            return Err(Error::Dimension(format!("label {y} out of range")));
        }
        let trace = forward_trace(spec, params, x)?;
        let lse = log_sum_exp(&trace.logits);
        loss += (lse - trace.logits[y]) / n;
        let mut dlogits = softmax(&trace.logits);
        dlogits[y] -= 1.0;
        for d in &mut dlogits {
            *d /= n;
        }
        backprop(spec, params, &trace, &dlogits, &mut grad);
    }
    Ok((loss, grad))
}

/// Mean loss only (no gradient), for probes that restore the checkpoint.
pub fn batch_loss(spec: &NetworkSpec, params: &[f64], batch: &Batch) -> Result<f64> {
    let mut loss = 0.0;
    for (x, &y) in batch.inputs.iter().zip(&batch.labels) {
        let logits = forward(spec, params, x)?;
        loss += log_sum_exp(&logits) - logits[y];
    }
    Ok(loss / batch.len() as f64)
}

/// Fraction of batch samples whose argmax logit matches the label.
pub fn accuracy(spec: &NetworkSpec, params: &[f64], batch: &Batch) -> Result<f64> {
    let mut hits = 0usize;
    for (x, &y) in batch.inputs.iter().zip(&batch.labels) {
        if predict(spec, params, x)? == y {
            hits += 1;
        }
    }
    Ok(hits as f64 / batch.len() as f64)
}

/// Argmax class; ties break to the lowest index.
pub fn predict(spec: &NetworkSpec, params: &[f64], input: &[f64]) -> Result<usize> {
    let logits = forward(spec, params, input)?;
    let mut best = 0;
    for (k, &z) in logits.iter().enumerate() {
        if z > logits[best] {
            best = k;
        }
    }
    Ok(best)
}

/// Per-layer dual pair: preactivation values fed to the nonlinearity (the
/// gate half for gated layers) and their directional derivatives. The last
/// entry holds the logits and their derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerJvp {
    pub h: Vec<f64>,
    pub h_dot: Vec<f64>,
}

fn normalize_direction(direction: &[f64]) -> Result<Vec<f64>> {
    let norm = crate::scalar::norm(direction);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroDirection);
    }
    Ok(direction.iter().map(|d| d / norm).collect())
}

fn jvp_pass(
    spec: &NetworkSpec,
    params: &[f64],
    direction: &[f64],
    input: &[f64],
) -> Result<Vec<LayerJvp>> {
    if direction.len() != spec.param_count() {
        return Err(Error::Dimension("direction shape mismatch".into()));
    }
    let trace = forward_trace(spec, params, input)?;
    let n_layers = spec.n_layers();
    let mut layers = Vec::with_capacity(n_layers);
    let mut xdot = vec![0.0; spec.input_dim()];
    for l in 0..n_layers {
        let (w0, b0, _) = spec.layer_span(l);
        let n_in = spec.layer_in(l);
        let x = &trace.xs[l];
        // zdot = dW x + W xdot + db
        let mut zdot: Vec<f64> = (0..spec.phys_out(l))
            .map(|j| {
                let row = w0 + j * n_in;
                let mut acc = direction[b0 + j];
                for i in 0..n_in {
                    acc += direction[row + i] * x[i] + params[row + i] * xdot[i];
                }
                acc
            })
            .collect();
        if l + 1 == n_layers {
            layers.push(LayerJvp {
                h: trace.logits.clone(),
                h_dot: zdot,
            });
            return Ok(layers);
        }
        let zn = &trace.zns[l];
        let zndot = match &trace.norms[l] {
            Some(cache) => layernorm_jvp(&trace.zs[l], &zdot, cache),
            None => std::mem::take(&mut zdot),
        };
        let kind = spec.activations[l];
        let width = spec.layer_widths[l + 1];
        if kind.is_gated() {
            layers.push(LayerJvp {
                h: zn[width..].to_vec(),
                h_dot: zndot[width..].to_vec(),
            });
            xdot = (0..width)
                .map(|j| {
                    let (g, gd) = kind.value_and_derivative(zn[width + j]);
                    zndot[j] * g + zn[j] * gd * zndot[width + j]
                })
                .collect();
        } else {
            xdot = zn
                .iter()
                .zip(&zndot)
                .map(|(&h, &hd)| kind.value_and_derivative(h).1 * hd)
                .collect();
            layers.push(LayerJvp {
                h: zn.clone(),
                h_dot: zndot,
            });
        }
    }
    unreachable!("loop returns at the output layer");
}

/// Directional logit derivatives `a_k = dz_k/dtau` along the unit direction
/// `v = direction/||direction||`, by one dual-number forward pass.
pub fn logit_jvp(
    spec: &NetworkSpec,
    params: &[f64],
    input: &[f64],
    direction: &[f64],
) -> Result<Vec<f64>> {
    let v = normalize_direction(direction)?;
    let layers = jvp_pass(spec, params, &v, input)?;
    Ok(layers.last().unwrap().h_dot.clone())
}

/// Per-layer (h, hdot) pairs for the activation-radius scan, from the same
/// dual pass; final entry carries the logits.
pub fn hidden_preactivations_jvp(
    spec: &NetworkSpec,
    params: &[f64],
    input: &[f64],
    direction: &[f64],
) -> Result<Vec<LayerJvp>> {
    let v = normalize_direction(direction)?;
    jvp_pass(spec, params, &v, input)
}

/// Apply a tentative update in place.
pub fn apply_update(params: &mut [f64], update: &[f64]) {
    for (p, u) in params.iter_mut().zip(update) {
        *p += u;
    }
}

/// SGD with momentum. `step` returns the tentative update `p = -lr * buf`
/// before application; its norm is the step size tau including the buffer.
#[derive(Debug, Clone)]
pub struct SgdMomentum {
    pub lr: f64,
    pub momentum: f64,
    buf: Vec<f64>,
}

impl SgdMomentum {
    pub fn new(lr: f64, momentum: f64, n_params: usize) -> Self {
        Self {
            lr,
            momentum,
            buf: vec![0.0; n_params],
        }
    }

    pub fn step(&mut self, grad: &[f64]) -> Vec<f64> {
        for (b, g) in self.buf.iter_mut().zip(grad) {
            *b = self.momentum * *b + g;
        }
        self.buf.iter().map(|b| -self.lr * b).collect()
    }
}

/// Adam; `step` returns the tentative update before application.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, n_params: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    pub fn step(&mut self, grad: &[f64]) -> Vec<f64> {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        let mut p = vec![0.0; grad.len()];
        for i in 0..grad.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            p[i] = -self.lr * mhat / (vhat.sqrt() + self.eps);
        }
        p
    }
}
