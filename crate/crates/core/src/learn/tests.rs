use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_cnn() -> NetworkSpec {
    NetworkSpec {
        input: Shape::image(2, 7, 7),
        layers: vec![
            LayerSpec::Conv { channels: 3, kernel: 3, stride: 1, activation: Activation::Relu },
            LayerSpec::MaxPool { size: 2 },
            LayerSpec::Conv { channels: 2, kernel: 2, stride: 1, activation: Activation::Identity },
            LayerSpec::Dense { width: 4, activation: Activation::Relu },
            LayerSpec::Dense { width: 1, activation: Activation::Sigmoid },
        ],
    }
}

fn strided_cnn() -> NetworkSpec {
    NetworkSpec {
        input: Shape::image(1, 9, 8),
        layers: vec![
            LayerSpec::Conv { channels: 2, kernel: 3, stride: 2, activation: Activation::Sigmoid },
            LayerSpec::Dense { width: 2, activation: Activation::Identity },
        ],
    }
}

fn random_input(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

fn random_batch(r: &mut ChaCha8Rng, net: &Network, n: usize) -> Vec<Sample> {
    (0..n)
        .map(|_| Sample {
            input: random_input(r, net.input_len()),
            target: (0..net.output_len()).map(|_| r.gen_range(0.0..1.0)).collect(),
        })
        .collect()
}

/// Independent evaluator over nested vectors, written from the layer
/// definitions.
fn reference_forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let spec = net.spec();
    let p = net.params();
    let mut off = 0;
    let (mut c, mut h, mut w) = (spec.input.channels, spec.input.height, spec.input.width);
    let mut img: Vec<Vec<Vec<f64>>> =
        (0..c).map(|ch| (0..h).map(|i| (0..w).map(|j| x[(ch * h + i) * w + j]).collect()).collect()).collect();
    let act = |a: Activation, z: f64| match a {
        Activation::Relu => {
            if z > 0.0 {
                z
            } else {
                0.0
            }
        }
        Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        Activation::Identity => z,
    };
    for layer in &spec.layers {
        match *layer {
            LayerSpec::Dense { width, activation } => {
                let flat: Vec<f64> = img.iter().flatten().flatten().copied().collect();
                let n_in = flat.len();
                let mut out = Vec::new();
                for o in 0..width {
                    let mut z = p[off + width * n_in + o];
                    for (i, xi) in flat.iter().enumerate() {
                        z += p[off + o * n_in + i] * xi;
                    }
                    out.push(act(activation, z));
                }
                off += width * n_in + width;
                img = out.into_iter().map(|v| vec![vec![v]]).collect();
                (c, h, w) = (width, 1, 1);
            }
            LayerSpec::Conv { channels, kernel, stride, activation } => {
                let oh = (h - kernel) / stride + 1;
                let ow = (w - kernel) / stride + 1;
                let nw = channels * c * kernel * kernel;
                let mut out = vec![vec![vec![0.0; ow]; oh]; channels];
                for (o, plane) in out.iter_mut().enumerate() {
                    for (i, row) in plane.iter_mut().enumerate() {
                        for (j, cell) in row.iter_mut().enumerate() {
                            let mut z = p[off + nw + o];
                            for (ci, ch) in img.iter().enumerate() {
                                for u in 0..kernel {
                                    for v in 0..kernel {
                                        let wi = off + ((o * c + ci) * kernel + u) * kernel + v;
                                        z += p[wi] * ch[i * stride + u][j * stride + v];
                                    }
                                }
                            }
                            *cell = act(activation, z);
                        }
                    }
                }
                off += nw + channels;
                img = out;
                (c, h, w) = (channels, oh, ow);
            }
            LayerSpec::MaxPool { size } => {
                img = img
                    .iter()
                    .map(|ch| {
                        (0..h / size)
                            .map(|i| {
                                (0..w / size)
                                    .map(|j| {
                                        let mut m = f64::NEG_INFINITY;
                                        for u in 0..size {
                                            for v in 0..size {
                                                m = m.max(ch[i * size + u][j * size + v]);
                                            }
                                        }
                                        m
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                (h, w) = (h / size, w / size);
            }
        }
    }
    img.iter().flatten().flatten().copied().collect()
}

#[test]
fn zero_parameters_give_one_half() {
    for spec in [NetworkSpec::mlp(5, &[4, 3]), small_cnn()] {
        let net = Network::zeros(spec).unwrap();
        assert_eq!(net.score(&vec![0.7; net.input_len()]).unwrap(), 0.5);
    }
}

#[test]
fn output_rises_to_one() {
    let spec = NetworkSpec::mlp(1, &[]);
    let net = Network::from_params(spec, vec![1.0, 0.0]).unwrap();
    let mut last = 0.0;
    for x in [0.0, 1.0, 5.0, 20.0, 40.0] {
        let y = net.score(&[x]).unwrap();
        assert!(y >= last && y <= 1.0);
        last = y;
    }
    assert!(last > 1.0 - 1e-15);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let net = Network::zeros(NetworkSpec::mlp(3, &[2])).unwrap();
    assert_eq!(net.forward(&[1.0]), Err(LearnError::Dimension { expected: 3, found: 1 }));
}

#[test]
fn parameter_count_formula() {
    let widths = [23, 500, 500, 500, 100, 100, 1];
    let expected: usize = widths.windows(2).map(|w| (w[0] + 1) * w[1]).sum();
    assert_eq!(default_mlp_spec(23, [500, 500, 500]).parameter_count().unwrap(), expected);
    // 21x21x2 -> 19x19x8 -> 9x9x8 -> 7x7x16 -> 3x3x16 -> 64 -> 1
    let cnn = default_cnn_spec(2, 21);
    let expected = (8 * 2 * 9 + 8) + (16 * 8 * 9 + 16) + (144 + 1) * 64 + 65;
    assert_eq!(cnn.parameter_count().unwrap(), expected);
}

#[test]
fn forward_matches_reference_evaluator() {
    let mut r = rng(5);
    for spec in [NetworkSpec::mlp(6, &[7, 5]), small_cnn(), strided_cnn(), default_cnn_spec(2, 21)] {
        let net = Network::init(spec, &mut r, 1.0).unwrap();
        for _ in 0..100 {
            let x = random_input(&mut r, net.input_len());
            let a = net.forward(&x).unwrap();
            let b = reference_forward(&net, &x);
            assert_eq!(a.len(), b.len());
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12, "{u} vs {v}");
            }
        }
    }
}

#[test]
fn loss_values() {
    // identity output with zero parameters predicts 0 exactly
    let spec = NetworkSpec {
        input: Shape::flat(3),
        layers: vec![LayerSpec::Dense { width: 1, activation: Activation::Identity }],
    };
    let net = Network::zeros(spec).unwrap();
    let batch = vec![Sample::labeled(vec![1.0, 2.0, 3.0], false); 3];
    assert_eq!(net.loss(&batch).unwrap(), 0.0);

    let half = Network::zeros(NetworkSpec::mlp(2, &[3])).unwrap();
    let batch = vec![Sample::labeled(vec![0.1, 0.2], true), Sample::labeled(vec![0.3, 0.4], false)];
    assert_eq!(half.loss(&batch).unwrap(), 0.5);

    let mut r = rng(6);
    let net = Network::init(small_cnn(), &mut r, 1.0).unwrap();
    let batch = random_batch(&mut r, &net, 9);
    let brute: f64 = batch
        .iter()
        .map(|s| {
            let y = reference_forward(&net, &s.input);
            y.iter().zip(&s.target).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
        })
        .sum();
    assert!((net.loss(&batch).unwrap() - brute).abs() < 1e-12);
    assert_eq!(net.loss(&[]), Err(LearnError::EmptyBatch));
}

#[test]
fn gradient_at_zero() {
    let net = Network::zeros(NetworkSpec::mlp(4, &[5, 3])).unwrap();
    let batch = vec![Sample::labeled(vec![0.0; 4], false); 6];
    let (_, g) = net.gradient(&batch).unwrap();
    let n = g.len();
    // d/db of sum (sigma(b) - 0)^2 = 2 * 0.5 * sigma'(0) per sample
    assert_eq!(g[n - 1], 2.0 * 0.5 * 0.25 * 6.0);
    assert!(g[..n - 1].iter().all(|&x| x == 0.0));
}

fn finite_difference_check(spec: NetworkSpec, seed: u64) {
    let mut r = rng(seed);
    let net = Network::init(spec, &mut r, 1.0).unwrap();
    let batch = random_batch(&mut r, &net, 3);
    let (_, g) = net.gradient(&batch).unwrap();
    let h = 1e-5;
    for i in 0..g.len() {
        let mut plus = net.clone();
        plus.params_mut()[i] += h;
        let mut minus = net.clone();
        minus.params_mut()[i] -= h;
        let fd = (plus.loss(&batch).unwrap() - minus.loss(&batch).unwrap()) / (2.0 * h);
        let scale = fd.abs().max(g[i].abs()).max(1e-6);
        assert!((fd - g[i]).abs() / scale < 1e-4, "param {i}: fd {fd} backprop {}", g[i]);
    }
}

#[test]
fn backprop_matches_finite_differences() {
    finite_difference_check(NetworkSpec::mlp(5, &[6, 4]), 1);
    finite_difference_check(small_cnn(), 2);
    finite_difference_check(strided_cnn(), 3);
}

#[test]
fn duplicated_batch_doubles_gradient() {
    let mut r = rng(8);
    let net = Network::init(small_cnn(), &mut r, 1.0).unwrap();
    let batch = random_batch(&mut r, &net, 4);
    let doubled: Vec<Sample> = batch.iter().chain(&batch).cloned().collect();
    let (l1, g1) = net.gradient(&batch).unwrap();
    let (l2, g2) = net.gradient(&doubled).unwrap();
    assert!((l2 - 2.0 * l1).abs() < 1e-12);
    for (a, b) in g1.iter().zip(&g2) {
        assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

fn separable(seed: u64, n: usize) -> Vec<Sample> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let x: f64 = r.gen_range(-1.0..1.0);
            let y: f64 = r.gen_range(-1.0..1.0);
            Sample::labeled(vec![x, y], x + 2.0 * y > 0.1)
        })
        .collect()
}

#[test]
fn zero_step_keeps_parameters() {
    let data = separable(1, 20);
    let net = Network::init_seeded(NetworkSpec::mlp(2, &[4]), 3, 1.0).unwrap();
    let cfg = TrainConfig { step: StepSchedule::Constant { gamma: 0.0 }, epochs: 3, ..TrainConfig::default() };
    let out = train_from(net.clone(), &cfg, &data).unwrap();
    assert_eq!(out.network, net);
}

#[test]
fn separable_data_is_learned() {
    let data = separable(2, 200);
    let cfg = TrainConfig {
        step: StepSchedule::Constant { gamma: 0.05 },
        batch_size: 16,
        epochs: 200,
        seed: 11,
        init_scale: 1.0,
    };
    let out = train(NetworkSpec::mlp(2, &[8, 8]), &cfg, &data).unwrap();
    let correct = data.iter().filter(|s| (out.network.score(&s.input).unwrap() >= 0.5) == (s.target[0] == 1.0)).count();
    assert!(correct as f64 >= 0.95 * data.len() as f64, "{correct} of {}", data.len());
    assert_eq!(out.loss_trace.len(), 200);
}

#[test]
fn training_is_deterministic() {
    let data = separable(3, 50);
    let cfg = TrainConfig { epochs: 5, seed: 4, ..TrainConfig::default() };
    let a = train(small_mlp(), &cfg, &data).unwrap();
    let b = train(small_mlp(), &cfg, &data).unwrap();
    assert_eq!(a.network.params(), b.network.params());
    assert_eq!(a.loss_trace, b.loss_trace);
    let c = train(small_mlp(), &TrainConfig { seed: 5, ..cfg }, &data).unwrap();
    assert_ne!(a.network.params(), c.network.params());
}

fn small_mlp() -> NetworkSpec {
    NetworkSpec::mlp(2, &[6, 6])
}

#[test]
fn full_batch_descent_is_monotone() {
    let data = separable(4, 12);
    let mut gamma = 0.1;
    loop {
        let cfg = TrainConfig {
            step: StepSchedule::Constant { gamma },
            batch_size: data.len(),
            epochs: 30,
            seed: 1,
            init_scale: 1.0,
        };
        let out = train(small_mlp(), &cfg, &data).unwrap();
        if out.loss_trace.windows(2).all(|w| w[1] <= w[0]) {
            break;
        }
        gamma /= 2.0;
        assert!(gamma > 1e-6, "no monotone step size found");
    }
}

#[test]
fn divergence_is_reported() {
    let data: Vec<Sample> = (0..4).map(|i| Sample { input: vec![1e150 * i as f64], target: vec![1e200] }).collect();
    let spec = NetworkSpec { input: Shape::flat(1), layers: vec![LayerSpec::Dense { width: 1, activation: Activation::Identity }] };
    let cfg = TrainConfig { step: StepSchedule::Constant { gamma: 1.0 }, batch_size: 4, epochs: 2, ..TrainConfig::default() };
    assert!(matches!(train(spec, &cfg, &data), Err(LearnError::Diverged { .. })));
}

#[test]
fn serialization_round_trip() {
    let mut r = rng(9);
    let net = Network::init(small_cnn(), &mut r, 1.0).unwrap();
    let json = serde_json::to_string(&net).unwrap();
    let back: Network = serde_json::from_str(&json).unwrap();
    assert_eq!(back, net);
    for _ in 0..10 {
        let x = random_input(&mut r, net.input_len());
        assert_eq!(back.forward(&x).unwrap(), net.forward(&x).unwrap());
    }
    let bad = json.replacen("\"params\":[", "\"params\":[1.0,", 1);
    assert!(serde_json::from_str::<Network>(&bad).is_err());
}

fn constant_net(inputs: usize, bias: f64) -> Network {
    let spec = NetworkSpec::mlp(inputs, &[]);
    let mut p = vec![0.0; inputs + 1];
    p[inputs] = bias;
    Network::from_params(spec, p).unwrap()
}

#[test]
fn ensemble_is_a_product() {
    let model = EnsembleModel { mlp: constant_net(3, 1000.0), cnn: constant_net(4, -1000.0) };
    assert_eq!(model.mlp.score(&[0.0; 3]).unwrap(), 1.0);
    assert_eq!(model.score(&[0.0; 3], &[0.0; 4]).unwrap(), 0.0);
    let mut r = rng(10);
    let model = EnsembleModel {
        mlp: Network::init(NetworkSpec::mlp(3, &[4]), &mut r, 2.0).unwrap(),
        cnn: Network::init(small_cnn(), &mut r, 2.0).unwrap(),
    };
    for _ in 0..200 {
        let a = random_input(&mut r, 3);
        let b = random_input(&mut r, model.cnn.input_len());
        let s = model.score(&a, &b).unwrap();
        let m = model.mlp.score(&a).unwrap().min(model.cnn.score(&b).unwrap());
        assert!((0.0..=1.0).contains(&s) && s <= m);
    }
}

#[test]
fn roc_extremes() {
    let labels: Vec<bool> = (0..100).map(|i| i % 3 == 0).collect();
    let scores: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    assert_eq!(roc(&scores, &labels).unwrap().auc, 1.0);
    let inverted: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
    assert_eq!(roc(&inverted, &labels).unwrap().auc, 0.0);
    assert_eq!(roc(&vec![0.3; 100], &labels).unwrap().auc, 0.5);
    assert_eq!(roc(&[0.1, 0.2], &[true, true]), Err(LearnError::SingleClass));
}

#[test]
fn random_scores_give_half() {
    let mut r = rng(12);
    let labels: Vec<bool> = (0..10_000).map(|i| i % 2 == 0).collect();
    let scores: Vec<f64> = (0..10_000).map(|_| r.gen_range(0.0..1.0)).collect();
    let auc = roc(&scores, &labels).unwrap().auc;
    assert!((auc - 0.5).abs() < 0.05, "{auc}");
}

#[test]
fn roc_auc_matches_pair_counting() {
    let mut r = rng(13);
    let labels: Vec<bool> = (0..300).map(|_| r.gen_bool(0.4)).collect();
    // coarse scores to force ties
    let scores: Vec<f64> =
        labels.iter().map(|&l| ((r.gen_range(0.0..1.0) + if l { 0.3 } else { 0.0 }) * 10.0_f64).floor() / 10.0).collect();
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    let roc = roc(&scores, &labels).unwrap();
    assert!((roc.auc - wins / pairs).abs() < 1e-12);
    for p in &roc.points {
        assert_eq!(p.confusion.total(), 300);
        assert_eq!(p.confusion, evaluate(&scores, &labels, p.tau).unwrap());
    }
    for w in roc.points.windows(2) {
        assert!(w[0].tau < w[1].tau);
        assert!(w[1].tpr <= w[0].tpr && w[1].tnr >= w[0].tnr);
    }
    let csv = roc.to_csv();
    assert!(csv.starts_with("tau,tp,fp,fn,tn,tpr,tnr\n"));
    assert_eq!(csv.lines().count(), roc.points.len() + 1);
    assert!(csv.lines().last().unwrap().starts_with("inf,"));
}
