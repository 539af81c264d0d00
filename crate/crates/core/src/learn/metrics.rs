use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// True-positive rate; zero without positives.
    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// True-negative rate; zero without negatives.
    pub fn tnr(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn check_aligned(scores: &[f64], labels: &[bool]) -> Result<(), LearnError> {
    if scores.len() != labels.len() {
        return Err(LearnError::Dimension { expected: labels.len(), found: scores.len() });
    }
    Ok(())
}

/// Counts with `score >= tau` predicted positive.
pub fn evaluate(scores: &[f64], labels: &[bool], tau: f64) -> Result<Confusion, LearnError> {
    check_aligned(scores, labels)?;
    let mut c = Confusion::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= tau, l) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub tau: f64,
    pub confusion: Confusion,
    pub tpr: f64,
    pub tnr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Roc {
    /// Ascending in `tau`; the last cutoff is `+inf`.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Sweeps `tau` over the distinct scores and `+inf`; AUC by the trapezoid
/// rule in the (1 - TNR, TPR) plane.
pub fn roc(scores: &[f64], labels: &[bool]) -> Result<Roc, LearnError> {
    check_aligned(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(LearnError::SingleClass);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(LearnError::Spec("NaN score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let neg = labels.len() - pos;
    // start with everything predicted positive and walk tau upward
    let mut c = Confusion { tp: pos, fp: neg, fn_: 0, tn: 0 };
    let mut points = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let tau = scores[order[i]];
        points.push(RocPoint { tau, confusion: c, tpr: c.tpr(), tnr: c.tnr() });
        while i < order.len() && scores[order[i]] == tau {
            if labels[order[i]] {
                c.tp -= 1;
                c.fn_ += 1;
            } else {
                c.fp -= 1;
                c.tn += 1;
            }
            i += 1;
        }
    }
    points.push(RocPoint { tau: f64::INFINITY, confusion: c, tpr: c.tpr(), tnr: c.tnr() });
    let mut auc = 0.0;
    for w in points.windows(2) {
        let (fpr0, fpr1) = (1.0 - w[0].tnr, 1.0 - w[1].tnr);
        auc += (fpr0 - fpr1) * (w[0].tpr + w[1].tpr) / 2.0;
    }
    Ok(Roc { points, auc })
}

impl Roc {
    /// `tau,tp,fp,fn,tn,tpr,tnr` rows, ascending in `tau`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,tp,fp,fn,tn,tpr,tnr\n");
        for p in &self.points {
            let c = p.confusion;
            writeln!(s, "{},{},{},{},{},{},{}", p.tau, c.tp, c.fp, c.fn_, c.tn, p.tpr, p.tnr).unwrap();
        }
        s
    }
}
