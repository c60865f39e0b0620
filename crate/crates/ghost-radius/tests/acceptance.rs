//! Acceptance gate: one test and one printed pass/fail line per criterion.
//!
//! Criteria 1-9 and 15 are exact or closed-form checks against independent
//! oracles; criteria 10-14 are deterministic desk-scale experiment runs on
//! the seeded blobs dataset. Run with `--nocapture` to see every line.

use ghost_radius::activations::{neuron_radius, ActivationKind};
use ghost_radius::autonet::{
    forward, loss_and_grad, logit_jvp, Batch, NetworkSpec,
};
use ghost_radius::expsum::{ExpSum, ZeroSearchConfig};
use ghost_radius::harness::config::{ExperimentConfig, RawConfig};
use ghost_radius::harness::experiments::{
    run_phase_sweep, run_random_dirs, run_spike, run_target_r_train, run_temperature,
};
use ghost_radius::hessian::crossover_margin;
use ghost_radius::klbound::{
    kl_bregman, kl_exact, kl_quadratic, remainder_bound, third_moment_witness,
    two_point_third_moment, SoftmaxPath,
};
use ghost_radius::radius::{lower_bound, temperature_radius, DirectionalSlopes};
use ghost_radius::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn criterion(n: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {n:02} {name}: {}",
        if ok { "pass" } else { "fail" }
    );
    assert!(ok, "acceptance {n:02} {name} failed: {detail}");
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_raw(&RawConfig::parse(text).unwrap()).unwrap()
}

#[test]
fn c01_binary_radius_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cfg = ZeroSearchConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let delta: f64 = rng.gen_range(-6.0..6.0);
        let delta_a: f64 = rng.gen_range(0.1..20.0);
        // two-term partition sum: weights (e^delta, 1), slope gap delta_a
        let f = ExpSum::new(vec![delta.exp(), 1.0], vec![delta_a, 0.0]).unwrap();
        let (_, modulus) = f.nearest_zero(&cfg).unwrap();
        let expected = delta.hypot(PI) / delta_a;
        worst = worst.max((modulus - expected).abs() / expected);
    }
    criterion(
        1,
        "binary radius identity on 500 random pairs",
        worst < 1e-9,
        &format!("worst relative error {worst:e}"),
    );
}

#[test]
fn c02_strip_exclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let cfg = ZeroSearchConfig::default();
    let mut violations = 0;
    let mut checked = 0;
    for trial in 0..200 {
        let n = rng.gen_range(2..=10);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0f64).exp()).collect();
        let slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = ExpSum::new(weights, slopes).unwrap();
        if f.spread() < 1e-9 {
            continue;
        }
        let bound = PI / f.spread();
        match f.nearest_zero(&cfg) {
            Ok((_, modulus)) => {
                checked += 1;
                if modulus < bound - 1e-9 {
                    violations += 1;
                }
            }
            // the nearest ghost lies above the search strip, which still
            // respects the bound
            Err(Error::SearchExhausted { .. }) => {}
            Err(e) => panic!("trial {trial}: {e}"),
        }
    }
    criterion(
        2,
        "general lower bound on 200 random sums",
        violations == 0 && checked > 100,
        &format!("{violations} violations over {checked} located zeros"),
    );
}

#[test]
fn c03_known_radius_values() {
    let rho = |d: f64| lower_bound(&DirectionalSlopes::new(vec![0.0, d], 0));
    let ok = (rho(1.0) - 3.14).abs() < 0.01
        && (rho(10.0) - 0.31).abs() < 0.01
        && (rho(30.0) - 0.10).abs() < 0.01;
    criterion(
        3,
        "reference radii at spreads 1, 10, 30",
        ok,
        &format!("{} {} {}", rho(1.0), rho(10.0), rho(30.0)),
    );
}

#[test]
fn c04_three_term_oracle() {
    // 1 + e^t + e^{2t} = 0 iff x^2 + x + 1 = 0 with x = e^t, so the nearest
    // zeros sit at t = +/- 2 pi i / 3
    let f = ExpSum::new(vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).unwrap();
    let (_, modulus) = f.nearest_zero(&ZeroSearchConfig::default()).unwrap();
    let expected = 2.0 * PI / 3.0;
    criterion(
        4,
        "three-term nearest zero",
        (modulus - expected).abs() / expected < 1e-9,
        &format!("modulus {modulus} expected {expected}"),
    );
}

#[test]
fn c05_kl_identity_and_sharp_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut identity_ok = true;
    let mut bound_violations = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=10);
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let path = SoftmaxPath::new(z, a).unwrap();
        let tau: f64 = rng.gen_range(-2.0..2.0);
        let exact = kl_exact(&path, tau);
        if (exact - kl_bregman(&path, tau)).abs() > 1e-12 * (1.0 + exact.abs()) {
            identity_ok = false;
        }
        let gap = (exact - kl_quadratic(&path, tau)).abs();
        let bound = remainder_bound(tau, path.spread());
        if gap > bound + 1e-12 * (1.0 + bound) {
            bound_violations += 1;
        }
    }
    let mut witness_ok = true;
    for delta in [0.5f64, 1.0, 3.0, 10.0] {
        let (p_star, moment) = third_moment_witness(delta).unwrap();
        let sharp = delta.powi(3) / (6.0 * 3.0f64.sqrt());
        if (moment - sharp).abs() > 1e-12 * (1.0 + sharp)
            || (two_point_third_moment(delta, p_star) - sharp).abs() > 1e-12 * (1.0 + sharp)
        {
            witness_ok = false;
        }
    }
    criterion(
        5,
        "kl identity, cubic remainder, sharp witness",
        identity_ok && bound_violations == 0 && witness_ok,
        &format!("identity_ok={identity_ok} bound_violations={bound_violations} witness_ok={witness_ok}"),
    );
}

#[test]
fn c06_crossover_asymptotic() {
    let mut worst = 0.0f64;
    for delta_a in [20.0, 50.0, 100.0, 500.0] {
        let star = crossover_margin(delta_a).unwrap();
        let asym = (PI * delta_a / 2.0).ln();
        worst = worst.max((star - asym).abs());
    }
    criterion(
        6,
        "hessian crossover matches log asymptotic",
        worst < 0.1,
        &format!("worst gap {worst}"),
    );
}

fn random_spec(rng: &mut ChaCha8Rng) -> NetworkSpec {
    use ActivationKind::*;
    let pool: [ActivationKind<f64>; 10] = [
        Relu,
        LeakyRelu { slope: 0.1 },
        Tanh,
        Sigmoid,
        Softplus,
        Silu,
        GeluExact,
        GeluTanh,
        Ria { beta: 1.0 },
        Swiglu,
    ];
    let depth = rng.gen_range(0..=2);
    let mut widths = vec![rng.gen_range(3..=6)];
    for _ in 0..depth {
        widths.push(rng.gen_range(3..=8));
    }
    widths.push(rng.gen_range(3..=5));
    let acts = (0..depth).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    NetworkSpec::new(widths, acts, rng.gen_bool(0.3), rng.gen()).unwrap()
}

#[test]
fn c07_jvp_and_gradient_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_jvp = 0.0f64;
    for _ in 0..50 {
        let spec = random_spec(&mut rng);
        let params = spec.init_params();
        let x: Vec<f64> = (0..spec.input_dim()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let mut v: Vec<f64> = (0..spec.param_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let vn = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in &mut v {
            *t /= vn;
        }
        let jvp = logit_jvp(&spec, &params, &x, &v).unwrap();
        let h = 1e-6;
        let plus: Vec<f64> = params.iter().zip(&v).map(|(p, d)| p + h * d).collect();
        let minus: Vec<f64> = params.iter().zip(&v).map(|(p, d)| p - h * d).collect();
        let zp = forward(&spec, &plus, &x).unwrap();
        let zm = forward(&spec, &minus, &x).unwrap();
        let fd: Vec<f64> = zp.iter().zip(&zm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let num: f64 = jvp.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den: f64 = 1.0 + fd.iter().map(|t| t * t).sum::<f64>().sqrt();
        worst_jvp = worst_jvp.max(num / den);
    }

    let mut worst_grad = 0.0f64;
    {
        let spec = NetworkSpec::new(
            vec![5, 8, 4],
            vec![ActivationKind::Tanh],
            false,
            11,
        )
        .unwrap();
        let mut params = spec.init_params();
        let inputs: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..5).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        let labels: Vec<usize> = (0..8).map(|_| rng.gen_range(0..4)).collect();
        let batch = Batch::new(inputs, labels).unwrap();
        let (_, grad) = loss_and_grad(&spec, &params, &batch).unwrap();
        let h = 1e-6;
        for _ in 0..20 {
            let i = rng.gen_range(0..spec.param_count());
            let orig = params[i];
            params[i] = orig + h;
            let (lp, _) = loss_and_grad(&spec, &params, &batch).unwrap();
            params[i] = orig - h;
            let (lm, _) = loss_and_grad(&spec, &params, &batch).unwrap();
            params[i] = orig;
            let fd = (lp - lm) / (2.0 * h);
            worst_grad = worst_grad.max((grad[i] - fd).abs() / (1.0 + fd.abs()));
        }
    }
    criterion(
        7,
        "jvp and gradient versus finite differences",
        worst_jvp < 1e-4 && worst_grad < 1e-5,
        &format!("worst jvp {worst_jvp:e}, worst grad {worst_grad:e}"),
    );
}

#[test]
fn c08_radius_clip_enforced_under_spike() {
    let cfg = config(
        "optimizer = sgd\nlr = 0.05\nspike_multiplier = 10000\nspike_step = 5\nspike_hold = 50\nsteps = 60\nn_seeds = 2\narm = rho\n",
    );
    let record = run_spike(&cfg).unwrap();
    let max_r = record.summary["max_r_rho"];
    criterion(
        8,
        "rho arm max normalized step under spike",
        max_r <= 1.0 + 1e-12,
        &format!("max r {max_r}"),
    );
}

#[test]
fn c09_temperature_scaling_exact() {
    let slopes = DirectionalSlopes::new(vec![0.3, -0.9, 2.1], 0);
    let base = temperature_radius(&slopes, 1.0).unwrap();
    let ok = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0]
        .iter()
        .all(|&t| temperature_radius(&slopes, t).unwrap() == t * base);
    criterion(9, "temperature law exact scaling", ok, "bitwise mismatch");
}

#[test]
fn c10_phase_transition_all_architectures() {
    let cfg = config("");
    let record = run_phase_sweep(&cfg).unwrap();
    let min_retained = record.summary["min_retained_acc_r_lt_1"];
    // every architecture must show loss inflation > 2 at some probe r >= 10
    let mut inflated: std::collections::BTreeMap<&str, bool> = Default::default();
    for row in &record.sweeps {
        let arch = row.direction_id.split(':').next().unwrap();
        let e = inflated.entry(arch).or_default();
        if row.param >= 10.0 && row.loss_ratio > 2.0 {
            *e = true;
        }
    }
    let all_inflate = inflated.len() == 6 && inflated.values().all(|&v| v);
    criterion(
        10,
        "sub-radius probes retain accuracy, super-radius probes inflate",
        min_retained >= 0.95 && all_inflate,
        &format!("min retained {min_retained}, inflation map {inflated:?}"),
    );
}

#[test]
fn c11_transition_direction_independent() {
    let cfg = config("");
    let record = run_random_dirs(&cfg).unwrap();
    let min_transition = record.summary["min_transition_r"];
    criterion(
        11,
        "loss-ratio transition at or beyond r = 1 in every direction",
        min_transition >= 1.0,
        &format!("min transition r {min_transition}"),
    );
}

#[test]
fn c12_temperature_fingerprint() {
    // T = 0.25 is excluded: at desk scale the hidden-layer kinks, not the
    // softmax, set the collapse point there, which the raw/normalized
    // comparison is not about
    let cfg = config("t_grid = 0.5, 1, 2, 4, 8, 16, 32, 64\n");
    let record = run_temperature(&cfg).unwrap();
    let raw = record.summary["onset_std_raw"];
    let normalized = record.summary["onset_std_normalized"];
    criterion(
        12,
        "normalized collapse onsets at least 3x tighter",
        normalized <= raw / 3.0,
        &format!("raw std {raw}, normalized std {normalized}"),
    );
}

#[test]
fn c13_spike_survival() {
    // wider blobs make accuracy reward precision: with the default spread
    // every arm coasts to high accuracy and the comparison is vacuous
    let cfg = config(
        "optimizer = sgd\nlr = 0.05\nspike_multiplier = 10000\nspike_step = 5\nspike_hold = 295\nblobs_spread = 4.0\n",
    );
    let record = run_spike(&cfg).unwrap();
    let rho = record.summary["final_acc_median_rho"];
    let plain = record.summary["final_acc_median_plain"];
    let clip = record.summary["final_acc_median_grad_clip"];
    criterion(
        13,
        "rho arm survives a 10000x spike by >= 20 points",
        rho >= plain + 0.20 && rho >= clip + 0.20,
        &format!("rho {rho}, plain {plain}, grad_clip {clip}"),
    );
}

#[test]
fn c14_target_r_bracketing() {
    let cfg = config("");
    let record = run_target_r_train(&cfg).unwrap();
    let acc = |k: &str| record.summary[&format!("final_acc_median_target_r_{k}")];
    let violations = record.summary["violations_target_r_0.5"]
        + record.summary["violations_target_r_1"];
    criterion(
        14,
        "target-r accuracy bracketing and zero clip violations",
        acc("1") >= acc("0.5") && acc("1") > acc("4") && violations == 0.0,
        &format!(
            "acc(0.5)={} acc(1)={} acc(4)={} violations={violations}",
            acc("0.5"),
            acc("1"),
            acc("4")
        ),
    );
}

#[test]
fn c15_activation_radius_ranking() {
    use ActivationKind::*;
    let at_origin = |k: ActivationKind<f64>| neuron_radius(0.0, 1.0, &k);
    let eps = f64::EPSILON;
    let ok = at_origin(GeluExact) == f64::INFINITY
        && at_origin(Ria { beta: 1.0 }) == f64::INFINITY
        && at_origin(Sigmoid) == PI
        && at_origin(Tanh) == PI / 2.0
        && neuron_radius(eps, 1.0, &Relu) == eps;
    criterion(
        15,
        "singular-set distances rank activations",
        ok,
        &format!(
            "gelu {} ria {} sigmoid {} tanh {} relu(eps) {}",
            at_origin(GeluExact),
            at_origin(Ria { beta: 1.0 }),
            at_origin(Sigmoid),
            at_origin(Tanh),
            neuron_radius(eps, 1.0, &Relu)
        ),
    );
}
