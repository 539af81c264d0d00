use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use gmplan_core::dataset::{balance_oversample, parse_edge_id, split, SplitSpec};
use gmplan_core::features::{read_features, FeatureRecord, PcaModel};
use gmplan_core::learn::{default_cnn_spec, default_mlp_spec, roc as roc_curve, train as fit, Network, Sample, StepSchedule, TrainConfig};
use gmplan_core::picard_fuchs::LabelStore;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::stores::{read_json, Ctx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlp,
    Cnn,
    Ensemble,
}

/// A trained scorer with everything needed to score a feature record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<PcaModel>,
    pub channel_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mlp: Option<Network>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cnn: Option<Network>,
    pub train_config: TrainConfig,
    pub split: SplitSpec,
    pub loss_trace: BTreeMap<String, Vec<f64>>,
    pub test_auc: Option<f64>,
}

impl ModelFile {
    pub fn score(&self, r: &FeatureRecord) -> Result<f64> {
        let mut s = 1.0;
        if let Some(mlp) = &self.mlp {
            let pca = self.pca.as_ref().context("model has an MLP but no PCA")?;
            s *= mlp.score(&pca.transform(&r.vector)?)?;
        }
        if let Some(cnn) = &self.cnn {
            let x: Vec<f64> = r.channels.flatten().iter().map(|v| v * self.channel_scale).collect();
            s *= cnn.score(&x)?;
        }
        Ok(s)
    }
}

#[derive(Args, Debug)]
pub struct Inputs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
}

impl Inputs {
    /// Feature records with labels, in edge-id order.
    fn load(&self, ctx: &Ctx) -> Result<(BTreeMap<String, FeatureRecord>, BTreeMap<String, bool>)> {
        let features = read_features(&ctx.path(self.features.as_ref(), "features.jsonl"))?;
        let labels = LabelStore::new(ctx.path(self.labels.as_ref(), "labels.jsonl")).latest()?;
        let labels = labels.into_iter().filter(|(k, _)| features.contains_key(k)).map(|(k, l)| (k, l.success)).collect();
        Ok((features, labels))
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Training fraction.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    pca: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn scores(model: &ModelFile, features: &BTreeMap<String, FeatureRecord>, ids: &[String]) -> Result<Vec<f64>> {
    ids.iter().map(|id| model.score(&features[id])).collect()
}

pub fn train(ctx: &Ctx, a: TrainArgs) -> Result<u8> {
    let c = &ctx.config;
    let seed = a.seed.unwrap_or(c.seed);
    let (features, labels) = a.inputs.load(ctx)?;
    if labels.is_empty() {
        bail!("no edge has both features and a label");
    }
    let ids: Vec<&String> = labels.keys().collect();
    let split = split(&ids, a.alpha, seed)?;
    let train_ids = balance_oversample(&split.train, |id| labels[id], seed)?;
    let config = TrainConfig {
        step: StepSchedule::InverseTime { gamma: c.learning_rate, decay: c.lr_decay },
        batch_size: c.batch_size,
        epochs: a.epochs.unwrap_or(c.epochs),
        seed,
        init_scale: c.init_scale,
    };
    let mut model = ModelFile {
        kind: a.model,
        pca: None,
        channel_scale: c.channel_scale,
        mlp: None,
        cnn: None,
        train_config: config,
        split,
        loss_trace: BTreeMap::new(),
        test_auc: None,
    };
    if a.model != ModelKind::Cnn {
        let pca: PcaModel = read_json(&ctx.path(a.pca.as_ref(), "pca.json"))?;
        let data = train_ids
            .iter()
            .map(|id| Ok(Sample::labeled(pca.transform(&features[id].vector)?, labels[id])))
            .collect::<Result<Vec<_>>>()?;
        let t = fit(default_mlp_spec(pca.k, c.mlp_widths), &config, &data)?;
        model.loss_trace.insert("mlp".into(), t.loss_trace);
        model.mlp = Some(t.network);
        model.pca = Some(pca);
    }
    if a.model != ModelKind::Mlp {
        let first = &features[&train_ids[0]].channels;
        let spec = default_cnn_spec(first.channels.len(), first.size);
        let data: Vec<Sample> = train_ids
            .iter()
            .map(|id| {
                let x = features[id].channels.flatten().iter().map(|v| v * c.channel_scale).collect();
                Sample::labeled(x, labels[id])
            })
            .collect();
        let t = fit(spec, &config, &data)?;
        model.loss_trace.insert("cnn".into(), t.loss_trace);
        model.cnn = Some(t.network);
    }
    let test_labels: Vec<bool> = model.split.test.iter().map(|id| labels[id]).collect();
    if test_labels.iter().any(|&l| l) && test_labels.iter().any(|&l| !l) {
        model.test_auc = Some(roc_curve(&scores(&model, &features, &model.split.test)?, &test_labels)?.auc);
    }
    let out = ctx.path(a.out.as_ref(), &format!("model-{}.json", serde_json::to_value(a.model)?.as_str().unwrap()));
    ctx.write_json(&out, &model)?;
    let auc = model.test_auc.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    println!(
        "{:?} trained on {} edges ({} after balancing), held-out AUC {auc} -> {}",
        a.model,
        model.split.train.len(),
        train_ids.len(),
        out.display()
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Trained model; omit with `--random`.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    /// Keep the best `N` edges per source vertex.
    #[arg(long)]
    top: Option<usize>,
    /// Pick `--top` edges per source vertex at random instead of by score.
    #[arg(long)]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prediction {
    pub edge: String,
    pub score: f64,
}

pub fn predict(ctx: &Ctx, a: PredictArgs) -> Result<u8> {
    let features = read_features(&ctx.path(a.features.as_ref(), "features.jsonl"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(ctx.config.seed));
    let mut preds: Vec<Prediction> = if a.random {
        features.keys().map(|e| Prediction { edge: e.clone(), score: 0.0 }).collect()
    } else {
        let Some(m) = &a.model else { bail!("predict needs --model or --random") };
        let model: ModelFile = read_json(m)?;
        features
            .values()
            .map(|r| Ok(Prediction { edge: r.edge.clone(), score: model.score(r)? }))
            .collect::<Result<_>>()?
    };
    if let Some(n) = a.top {
        let mut by_source: BTreeMap<u32, Vec<Prediction>> = BTreeMap::new();
        for p in preds {
            by_source.entry(parse_edge_id(&p.edge)?.f).or_default().push(p);
        }
        preds = Vec::new();
        for (_, mut group) in by_source {
            if a.random {
                let keep = sample(&mut rng, group.len(), n.min(group.len())).into_vec();
                preds.extend(keep.into_iter().map(|i| group[i].clone()));
            } else {
                group.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.edge.cmp(&y.edge)));
                preds.extend(group.into_iter().take(n));
            }
        }
    } else if !a.random {
        preds.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.edge.cmp(&y.edge)));
    }
    let out = ctx.path(a.out.as_ref(), "predictions.jsonl");
    ctx.write_rows(&out, &preds)?;
    println!("{} predictions -> {}", preds.len(), out.display());
    Ok(0)
}

#[derive(Args, Debug)]
pub struct RocArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn roc(ctx: &Ctx, a: RocArgs) -> Result<u8> {
    let model: ModelFile = read_json(&a.model)?;
    let (features, labels) = a.inputs.load(ctx)?;
    let ids: Vec<String> = model.split.test.iter().filter(|id| labels.contains_key(*id)).cloned().collect();
    let y: Vec<bool> = ids.iter().map(|id| labels[id]).collect();
    let curve = roc_curve(&scores(&model, &features, &ids)?, &y)?;
    let out = ctx.path(a.out.as_ref(), "roc.csv");
    ctx.write_csv(&out, &curve.to_csv())?;
    println!("AUC {:.4} on {} held-out edges -> {}", curve.auc, ids.len(), out.display());
    Ok(0)
}
