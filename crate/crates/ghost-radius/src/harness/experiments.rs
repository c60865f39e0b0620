//! Experiment drivers: spike stress test, one-step phase sweeps, random
//! direction probes, temperature fingerprint, and target-r training.
//!
//! All drivers are deterministic given the config seed and single-threaded.

use super::config::ExperimentConfig;
use super::dataset::{load_dataset, normal, Dataset};
use super::emit::{iqr, median, std_dev, RunRecord, StepRow, SweepRow};
use crate::activations::{ffn_kink_quantile, neuron_radius, network_radius, ActivationKind};
use crate::autonet::{
    accuracy, apply_update, batch_loss, forward, hidden_preactivations_jvp, loss_and_grad,
    predict, Adam, Batch, NetworkSpec, SgdMomentum,
};
use crate::controller::{grad_clip_baseline, radius_clip, rho_estimate, target_r_step, RhoMode};
use crate::expsum::{ExpSum, ZeroSearchConfig};
use crate::hessian::{crossover_margin, ghost_vs_hessian, MarginState};
use crate::klbound::{kl_bregman, kl_exact, kl_quadratic, remainder_bound, SoftmaxPath};
use crate::radius::{normalized_step, per_sample_ghost, DirectionalSlopes, LogitState};
use crate::scalar::norm;
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The desk-scale architecture menu.
pub const ARCHITECTURES: [&str; 6] = [
    "linear", "mlp_tanh", "mlp_relu", "deep_mlp", "mlp_norm", "wide_mlp",
];

/// Training-step cap for "converged" checkpoints (or train loss below the
/// configured target, whichever first).
pub const MAX_TRAIN_STEPS: usize = 2000;

pub fn architecture(id: &str, input_dim: usize, n_classes: usize, seed: u64) -> Result<NetworkSpec> {
    use ActivationKind::*;
    let (widths, acts, normalize): (Vec<usize>, Vec<ActivationKind<f64>>, bool) = match id {
        "linear" => (vec![input_dim, n_classes], vec![], false),
        "mlp_tanh" => (vec![input_dim, 32, n_classes], vec![Tanh], false),
        "mlp_relu" => (vec![input_dim, 32, n_classes], vec![Relu], false),
        "deep_mlp" => (
            vec![input_dim, 32, 32, 32, n_classes],
            vec![Relu, Relu, Relu],
            false,
        ),
        "mlp_norm" => (vec![input_dim, 32, n_classes], vec![Relu], true),
        "wide_mlp" => (vec![input_dim, 128, n_classes], vec![Relu], false),
        other => return Err(Error::Config(format!("unknown architecture {other:?}"))),
    };
    NetworkSpec::new(widths, acts, normalize, seed)
}

enum Opt {
    Sgd(SgdMomentum),
    Adam(Adam),
}

impl Opt {
    fn new(cfg: &ExperimentConfig, n_params: usize) -> Result<Self> {
        match cfg.optimizer.as_str() {
            "sgd" => Ok(Opt::Sgd(SgdMomentum::new(cfg.lr, cfg.momentum, n_params))),
            "adam" => Ok(Opt::Adam(Adam::new(cfg.lr, n_params))),
            other => Err(Error::Config(format!("unknown optimizer {other:?}"))),
        }
    }

    fn set_lr(&mut self, lr: f64) {
        match self {
            Opt::Sgd(o) => o.lr = lr,
            Opt::Adam(o) => o.lr = lr,
        }
    }

    fn step(&mut self, grad: &[f64]) -> Vec<f64> {
        match self {
            Opt::Sgd(o) => o.step(grad),
            Opt::Adam(o) => o.step(grad),
        }
    }
}

/// Train until the loss target or the step cap; returns (steps, final loss).
fn train_to_convergence(
    spec: &NetworkSpec,
    params: &mut Vec<f64>,
    data: &Dataset,
    cfg: &ExperimentConfig,
) -> Result<(usize, f64)> {
    let mut opt = Opt::new(cfg, spec.param_count())?;
    let mut loss = f64::INFINITY;
    for step in 0..MAX_TRAIN_STEPS {
        let (l, grad) = loss_and_grad(spec, params, &data.train)?;
        loss = l;
        if loss < cfg.loss_target {
            return Ok((step, loss));
        }
        let p = opt.step(&grad);
        apply_update(params, &p);
    }
    Ok((MAX_TRAIN_STEPS, loss))
}

/// Radius along `direction`, tolerating the zero direction (infinite).
fn rho_along(
    spec: &NetworkSpec,
    params: &[f64],
    batch: &Batch,
    direction: &[f64],
    mode: RhoMode,
) -> Result<f64> {
    if norm(direction) == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rho_estimate(spec, params, batch, direction, mode)?.report.rho_a)
}

const SPIKE_ARMS: [&str; 3] = ["plain", "grad_clip", "rho"];

/// Errors that mean the iterate left the representable regime (overflowed
/// forward pass, non-finite gradients, degenerate slopes), i.e. divergence
/// rather than a caller mistake.
fn is_divergence(e: &Error) -> bool {
    matches!(
        e,
        Error::LayerOverflow(_)
            | Error::MagnitudeOverflow
            | Error::ZeroDirection
            | Error::NonfiniteSlope
            | Error::NonpositiveWeight
            | Error::DegenerateSpread
    )
}
/// A run counts as divergent when its final loss exceeds this.
pub const DIVERGENCE_LOSS: f64 = 10.0;

/// Learning-rate spike stress test across the three arms.
pub fn run_spike(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_dataset(&cfg.dataset)?;
    let mut record = RunRecord::default();
    let arms: Vec<&str> = SPIKE_ARMS
        .iter()
        .copied()
        .filter(|a| cfg.arm.as_deref().map_or(true, |want| want == *a))
        .collect();
    if arms.is_empty() {
        return Err(Error::Config(format!("unknown arm {:?}", cfg.arm)));
    }

    for &arm in &arms {
        let mut finals = Vec::new();
        let mut max_r: f64 = 0.0;
        for &seed in &cfg.seeds() {
            let spec = architecture(&cfg.arch, data.dim, data.n_classes, seed)?;
            let mut params = spec.init_params();
            let mut opt = Opt::new(cfg, spec.param_count())?;
            let mut divergent = false;
            let mut final_acc = 0.0;
            for step in 0..cfg.steps {
                let in_spike =
                    step >= cfg.spike_step && step < cfg.spike_step + cfg.spike_hold;
                let lr_eff = if in_spike {
                    cfg.lr * cfg.spike_multiplier
                } else {
                    cfg.lr
                };
                opt.set_lr(lr_eff);
                let stepped = (|| -> Result<StepRow> {
                    let (loss, grad) = loss_and_grad(&spec, &params, &data.train)?;
                    if !loss.is_finite() {
                        return Err(Error::LayerOverflow(0));
                    }
                    let p = match arm {
                        "plain" => opt.step(&grad),
                        "grad_clip" => opt.step(&grad_clip_baseline(&grad, cfg.grad_clip)?),
                        "rho" => {
                            let p0 = opt.step(&grad);
                            let rho =
                                rho_along(&spec, &params, &data.train, &p0, cfg.rho_mode)?;
                            radius_clip(&p0, rho).0
                        }
                        _ => unreachable!(),
                    };
                    let rho_a = rho_along(&spec, &params, &data.train, &p, cfg.rho_mode)?;
                    apply_update(&mut params, &p);
                    let tau = norm(&p);
                    let test_acc = accuracy(&spec, &params, &data.test)?;
                    Ok(StepRow {
                        step,
                        loss,
                        test_acc,
                        tau,
                        rho_a,
                        r: normalized_step(tau, rho_a),
                        lr_effective: lr_eff,
                        arm: arm.to_string(),
                        seed,
                    })
                })();
                match stepped {
                    Ok(row) => {
                        max_r = max_r.max(row.r);
                        final_acc = row.test_acc;
                        record.steps.push(row);
                    }
                    Err(ref e) if is_divergence(e) => {
                        divergent = true;
                        record.steps.push(StepRow {
                            step,
                            loss: f64::INFINITY,
                            test_acc: final_acc,
                            tau: 0.0,
                            rho_a: f64::INFINITY,
                            r: 0.0,
                            lr_effective: lr_eff,
                            arm: arm.to_string(),
                            seed,
                        });
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            let final_loss = record
                .steps
                .iter()
                .rev()
                .find(|r| r.arm == arm && r.seed == seed)
                .map_or(f64::INFINITY, |r| r.loss);
            if divergent || final_loss > DIVERGENCE_LOSS {
                record.divergent = true;
                record
                    .summary
                    .insert(format!("divergent_{arm}_seed{seed}"), 1.0);
            }
            finals.push(final_acc);
        }
        record
            .summary
            .insert(format!("final_acc_median_{arm}"), median(&finals));
        record
            .summary
            .insert(format!("final_acc_iqr_{arm}"), iqr(&finals));
        record.summary.insert(format!("max_r_{arm}"), max_r);
    }
    Ok(record)
}

/// One-step probes at ratios `r` from a converged checkpoint, all six
/// architectures, along the descent gradient direction.
pub fn run_phase_sweep(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_dataset(&cfg.dataset)?;
    let mut record = RunRecord::default();
    let mut min_retained_sub1: f64 = f64::INFINITY;
    for arch in ARCHITECTURES {
        for &seed in &cfg.seeds() {
            let spec = architecture(arch, data.dim, data.n_classes, seed)?;
            let mut params = spec.init_params();
            train_to_convergence(&spec, &mut params, &data, cfg)?;
            let checkpoint = params.clone();

            let (l0, grad) = loss_and_grad(&spec, &params, &data.train)?;
            let a0 = accuracy(&spec, &params, &data.test)?;
            let base_preds: Vec<usize> = data
                .test
                .inputs
                .iter()
                .map(|x| predict(&spec, &params, x))
                .collect::<Result<_>>()?;
            let gnorm = norm(&grad);
            if gnorm == 0.0 {
                return Err(Error::ZeroDirection);
            }
            let unit: Vec<f64> = grad.iter().map(|g| -g / gnorm).collect();
            let rho = rho_along(&spec, &params, &data.train, &unit, cfg.rho_mode)?;

            for &r in &cfg.r_grid {
                let probe: Vec<f64> = params
                    .iter()
                    .zip(&unit)
                    .map(|(p, u)| p + u * r * rho)
                    .collect();
                let row = probe_row(
                    &spec, &probe, &data, l0, a0, &base_preds, r,
                    format!("{arch}:grad"), seed,
                )?;
                if r < 1.0 {
                    min_retained_sub1 = min_retained_sub1.min(row.retained_acc);
                }
                record.sweeps.push(row);
            }
            debug_assert_eq!(params, checkpoint);
        }
    }
    record
        .summary
        .insert("min_retained_acc_r_lt_1".into(), min_retained_sub1);
    Ok(record)
}

fn probe_row(
    spec: &NetworkSpec,
    probe: &[f64],
    data: &Dataset,
    l0: f64,
    a0: f64,
    base_preds: &[usize],
    param: f64,
    direction_id: String,
    seed: u64,
) -> Result<SweepRow> {
    let (loss_ratio, retained_acc, flip_fraction) = match batch_loss(spec, probe, &data.train) {
        Ok(l1) if l1.is_finite() => {
            let a1 = accuracy(spec, probe, &data.test)?;
            let flips = data
                .test
                .inputs
                .iter()
                .zip(base_preds)
                .filter(|(x, &b)| predict(spec, probe, x).map_or(true, |p| p != b))
                .count();
            (
                l1 / l0,
                a1 / a0,
                flips as f64 / data.test.len() as f64,
            )
        }
        Ok(_) => (f64::INFINITY, 0.0, 1.0),
        Err(ref e) if is_divergence(e) => (f64::INFINITY, 0.0, 1.0),
        Err(e) => return Err(e),
    };
    Ok(SweepRow {
        param,
        loss_ratio,
        retained_acc,
        flip_fraction,
        direction_id,
        seed,
    })
}

/// Gradient plus random unit directions at three training phases.
pub fn run_random_dirs(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_dataset(&cfg.dataset)?;
    let mut record = RunRecord::default();
    let mut min_transition = f64::INFINITY;

    for &seed in &cfg.seeds() {
        let spec = architecture(&cfg.arch, data.dim, data.n_classes, seed)?;
        let mut params = spec.init_params();
        // phase checkpoints: early, middle, converged
        let mut checkpoints: Vec<(String, Vec<f64>)> = Vec::new();
        let mut opt = Opt::new(cfg, spec.param_count())?;
        let mut step = 0;
        while step < MAX_TRAIN_STEPS {
            if step == 10 {
                checkpoints.push(("early".into(), params.clone()));
            }
            if step == 100 {
                checkpoints.push(("middle".into(), params.clone()));
            }
            let (l, grad) = loss_and_grad(&spec, &params, &data.train)?;
            if l < cfg.loss_target {
                break;
            }
            let p = opt.step(&grad);
            apply_update(&mut params, &p);
            step += 1;
        }
        checkpoints.push(("late".into(), params.clone()));

        for (phase, theta) in &checkpoints {
            let (l0, grad) = loss_and_grad(&spec, theta, &data.train)?;
            let a0 = accuracy(&spec, theta, &data.test)?;
            let base_preds: Vec<usize> = data
                .test
                .inputs
                .iter()
                .map(|x| predict(&spec, theta, x))
                .collect::<Result<_>>()?;
            let gnorm = norm(&grad);
            let mut directions: Vec<(String, Vec<f64>)> = vec![(
                format!("{phase}:grad"),
                grad.iter().map(|g| -g / gnorm).collect(),
            )];
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (phase.len() as u64) << 32);
            for k in 0..cfg.n_random_dirs {
                let mut d: Vec<f64> = (0..spec.param_count()).map(|_| normal(&mut rng)).collect();
                let dn = norm(&d);
                for v in &mut d {
                    *v /= dn;
                }
                directions.push((format!("{phase}:rand{k:02}"), d));
            }

            for (id, unit) in &directions {
                let rho = rho_along(&spec, theta, &data.train, unit, cfg.rho_mode)?;
                let mut transition = f64::INFINITY;
                for &r in &cfg.r_grid {
                    let probe: Vec<f64> = theta
                        .iter()
                        .zip(unit)
                        .map(|(p, u)| p + u * r * rho)
                        .collect();
                    let row = probe_row(
                        &spec, &probe, &data, l0, a0, &base_preds, r, id.clone(), seed,
                    )?;
                    if transition.is_infinite() && row.loss_ratio > cfg.loss_ratio_threshold {
                        transition = r;
                    }
                    record.sweeps.push(row);
                }
                min_transition = min_transition.min(transition);
                record
                    .summary
                    .insert(format!("transition_{id}_seed{seed}"), transition);
            }
        }
    }
    record
        .summary
        .insert("min_transition_r".into(), min_transition);
    Ok(record)
}

/// Cross-entropy with logits scaled by `1/t`.
fn temp_loss(spec: &NetworkSpec, params: &[f64], batch: &Batch, t: f64) -> Result<f64> {
    let mut loss = 0.0;
    for (x, &y) in batch.inputs.iter().zip(&batch.labels) {
        let z = forward(spec, params, x)?;
        let scaled: Vec<f64> = z.iter().map(|v| v / t).collect();
        loss += crate::scalar::log_sum_exp(&scaled) - scaled[y];
    }
    Ok(loss / batch.len() as f64)
}

/// Collapse-onset fingerprint across softmax temperatures.
pub fn run_temperature(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_dataset(&cfg.dataset)?;
    let mut record = RunRecord::default();
    let seed = cfg.seed;
    let spec = architecture(&cfg.arch, data.dim, data.n_classes, seed)?;
    let mut params = spec.init_params();
    train_to_convergence(&spec, &mut params, &data, cfg)?;

    let (_, grad) = loss_and_grad(&spec, &params, &data.train)?;
    let gnorm = norm(&grad);
    let unit: Vec<f64> = grad.iter().map(|g| -g / gnorm).collect();
    // spread is temperature independent; rho_a(T) = pi T / spread
    let rho1 = rho_along(&spec, &params, &data.train, &unit, cfg.rho_mode)?;

    let mut raw = Vec::new();
    let mut normalized = Vec::new();
    for &t in &cfg.t_grid {
        let l0 = temp_loss(&spec, &params, &data.train, t)?;
        let mut onset = None;
        for &tau in &cfg.tau_grid {
            let probe: Vec<f64> = params.iter().zip(&unit).map(|(p, u)| p + u * tau).collect();
            let ratio = match temp_loss(&spec, &probe, &data.train, t) {
                Ok(l1) if l1.is_finite() => l1 / l0,
                Ok(_) => f64::INFINITY,
                Err(ref e) if is_divergence(e) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            record.sweeps.push(SweepRow {
                param: tau,
                loss_ratio: ratio,
                retained_acc: f64::NAN,
                flip_fraction: f64::NAN,
                direction_id: format!("T{t}"),
                seed,
            });
            if ratio > cfg.collapse_threshold {
                onset = Some(tau);
                break;
            }
        }
        match onset {
            Some(tau_star) => {
                record
                    .summary
                    .insert(format!("onset_T{t}"), tau_star);
                raw.push(tau_star.log10());
                normalized.push((tau_star / (rho1 * t)).log10());
            }
            None => {
                // censored: no collapse within the grid
                record.summary.insert(format!("onset_T{t}"), f64::NAN);
                eprintln!("warning: no collapse onset found for T = {t}, excluded");
            }
        }
    }
    if raw.len() >= 2 {
        record.summary.insert("onset_std_raw".into(), std_dev(&raw));
        record
            .summary
            .insert("onset_std_normalized".into(), std_dev(&normalized));
    }
    record.summary.insert("rho_at_T1".into(), rho1);
    Ok(record)
}

/// Target-r controller training against fixed-LR baselines.
pub fn run_target_r_train(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let data = load_dataset(&cfg.dataset)?;
    let mut record = RunRecord::default();

    let mut arms: Vec<(String, Option<f64>, Option<f64>)> = Vec::new();
    for &r in &cfg.r_targets {
        arms.push((format!("target_r_{r}"), Some(r), None));
    }
    for &lr in &cfg.fixed_lrs {
        arms.push((format!("fixed_lr_{lr}"), None, Some(lr)));
    }
    if let Some(want) = &cfg.arm {
        arms.retain(|(name, _, _)| name == want);
        if arms.is_empty() {
            return Err(Error::Config(format!("unknown arm {want:?}")));
        }
    }

    for (name, r_target, fixed_lr) in &arms {
        let mut finals = Vec::new();
        let mut violations = 0usize;
        let mut r_gt1 = 0usize;
        for &seed in &cfg.seeds() {
            let spec = architecture(&cfg.arch, data.dim, data.n_classes, seed)?;
            let mut params = spec.init_params();
            let mut buf = vec![0.0; spec.param_count()];
            let mut final_acc = 0.0;
            for step in 0..cfg.steps {
                let stepped = (|| -> Result<StepRow> {
                    let (loss, grad) = loss_and_grad(&spec, &params, &data.train)?;
                    if !loss.is_finite() {
                        return Err(Error::LayerOverflow(0));
                    }
                    for (b, g) in buf.iter_mut().zip(&grad) {
                        *b = cfg.momentum * *b + g;
                    }
                    let (p, rho, lr_eff) = match (r_target, fixed_lr) {
                        (Some(r), _) => {
                            let rho =
                                rho_along(&spec, &params, &data.train, &buf, cfg.rho_mode)?;
                            let (eta, p) = target_r_step(&buf, *r, rho, cfg.eta_max)?;
                            (p, rho, eta)
                        }
                        (None, Some(lr)) => {
                            let p: Vec<f64> = buf.iter().map(|b| -lr * b).collect();
                            let rho =
                                rho_along(&spec, &params, &data.train, &p, cfg.rho_mode)?;
                            (p, rho, *lr)
                        }
                        _ => unreachable!(),
                    };
                    apply_update(&mut params, &p);
                    let tau = norm(&p);
                    let r_log = normalized_step(tau, rho);
                    Ok(StepRow {
                        step,
                        loss,
                        test_acc: accuracy(&spec, &params, &data.test)?,
                        tau,
                        rho_a: rho,
                        r: r_log,
                        lr_effective: lr_eff,
                        arm: name.clone(),
                        seed,
                    })
                })();
                match stepped {
                    Ok(row) => {
                        if let Some(r) = r_target {
                            if row.r > r * (1.0 + 1e-12) {
                                violations += 1;
                            }
                        }
                        if row.r > 1.0 + 1e-12 {
                            r_gt1 += 1;
                        }
                        final_acc = row.test_acc;
                        record.steps.push(row);
                    }
                    Err(ref e) if is_divergence(e) => {
                        record.divergent = true;
                        record.steps.push(StepRow {
                            step,
                            loss: f64::INFINITY,
                            test_acc: final_acc,
                            tau: 0.0,
                            rho_a: f64::INFINITY,
                            r: 0.0,
                            lr_effective: 0.0,
                            arm: name.clone(),
                            seed,
                        });
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            finals.push(final_acc);
        }
        record
            .summary
            .insert(format!("final_acc_median_{name}"), median(&finals));
        record
            .summary
            .insert(format!("final_acc_iqr_{name}"), iqr(&finals));
        record
            .summary
            .insert(format!("violations_{name}"), violations as f64);
        record
            .summary
            .insert(format!("r_gt1_steps_{name}"), r_gt1 as f64);
    }
    Ok(record)
}

/// Nearest-zero report for the configured exponential sum.
pub fn zeros_csv(cfg: &ExperimentConfig) -> Result<String> {
    let sum = ExpSum::new(cfg.weights.clone(), cfg.slopes.clone())?;
    let (zero, modulus) = sum.nearest_zero(&ZeroSearchConfig::default())?;
    Ok(format!(
        "re,im,modulus,delta_a,lower_bound\n{},{},{},{},{}\n",
        zero.re,
        zero.im,
        modulus,
        sum.spread(),
        std::f64::consts::PI / sum.spread()
    ))
}

/// Per-sample radius report from configured logits and slopes.
pub fn radius_csv(cfg: &ExperimentConfig) -> Result<String> {
    let state = LogitState::new(cfg.logits.clone(), cfg.target)?;
    let slopes = DirectionalSlopes::new(cfg.slopes.clone(), 0);
    if slopes.a.len() != state.z.len() {
        return Err(Error::Dimension("logits/slopes length mismatch".into()));
    }
    let (ghost, rho_star) = per_sample_ghost(&state, &slopes)?;
    let delta_a = slopes.spread();
    let rho_a = if delta_a > 0.0 {
        std::f64::consts::PI / delta_a
    } else {
        f64::INFINITY
    };
    Ok(format!(
        "sample_id,delta_a,rho_a,rho_star,ghost_re,ghost_im\n0,{delta_a},{rho_a},{rho_star},{},{}\n",
        ghost.re, ghost.im
    ))
}

/// KL identity, quadratic model, and remainder bound at the configured step.
pub fn klcheck_csv(cfg: &ExperimentConfig) -> Result<String> {
    let path = SoftmaxPath::new(cfg.logits.clone(), cfg.slopes.clone())?;
    let mut out = String::from("tau,kl_exact,kl_bregman,kl_quadratic,remainder_bound\n");
    for &scale in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        let tau = cfg.tau * scale;
        out.push_str(&format!(
            "{tau},{},{},{},{}\n",
            kl_exact(&path, tau),
            kl_bregman(&path, tau),
            kl_quadratic(&path, tau),
            remainder_bound(tau, path.spread())
        ));
    }
    Ok(out)
}

/// Hessian-step-versus-radius crossover margins over the spread grid.
pub fn crossover_csv(cfg: &ExperimentConfig) -> Result<String> {
    let mut out = String::from("delta_a,delta_star,asymptotic,ratio_at_zero\n");
    for &da in &cfg.delta_grid {
        let star = crossover_margin(da)?;
        let asym = (std::f64::consts::PI * da / 2.0).ln();
        let at_zero = ghost_vs_hessian(MarginState {
            delta: 0.0,
            delta_a: da,
        })?;
        out.push_str(&format!("{da},{star},{asym},{}\n", at_zero.ratio));
    }
    Ok(out)
}

/// Per-layer activation-limited radii for a freshly initialized network
/// along its loss gradient.
pub fn actscan_csv(cfg: &ExperimentConfig) -> Result<String> {
    let data = load_dataset(&cfg.dataset)?;
    let spec = architecture(&cfg.arch, data.dim, data.n_classes, cfg.seed)?;
    let params = spec.init_params();
    let (_, grad) = loss_and_grad(&spec, &params, &data.train)?;
    let gnorm = norm(&grad);
    if gnorm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let unit: Vec<f64> = grad.iter().map(|g| -g / gnorm).collect();

    let n_hidden = spec.layer_widths.len() - 2;
    let mut per_layer: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_hidden];
    let mut spread_max: f64 = 0.0;
    for x in data.train.inputs.iter().take(64) {
        let layers = hidden_preactivations_jvp(&spec, &params, x, &unit)?;
        for (l, pairs) in per_layer.iter_mut().enumerate() {
            pairs.extend(layers[l].h.iter().zip(&layers[l].h_dot).map(|(&h, &hd)| (h, hd)));
        }
        let logits = layers.last().unwrap();
        let a = DirectionalSlopes::new(logits.h_dot.clone(), 0);
        spread_max = spread_max.max(a.spread());
    }
    let rho_out = if spread_max > 0.0 {
        std::f64::consts::PI / spread_max
    } else {
        f64::INFINITY
    };

    let mut out = String::from("layer,kind,rho_min,rho_kink_q01\n");
    let mut rho_ffn = f64::INFINITY;
    for (l, pairs) in per_layer.iter().enumerate() {
        let kind = spec.activations[l];
        let rho_min = pairs
            .iter()
            .map(|&(h, hd)| neuron_radius(h, hd, &kind))
            .fold(f64::INFINITY, f64::min);
        let kink = ffn_kink_quantile(pairs, 0.01)?;
        rho_ffn = rho_ffn.min(rho_min);
        out.push_str(&format!("{l},{kind:?},{rho_min},{kink}\n"));
    }
    let (rho_net, bottleneck) = network_radius(rho_out, rho_ffn);
    out.push_str(&format!("net,{bottleneck},{rho_net},{rho_out}\n"));
    Ok(out)
}
