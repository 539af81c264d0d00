use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Train/test partition of edge ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub alpha: f64,
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Uniform split without replacement; `|train| = round(alpha * n)`.
pub fn split<S: AsRef<str>>(ids: &[S], alpha: f64, seed: u64) -> Result<SplitSpec, DatasetError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DatasetError::Alpha(alpha));
    }
    let mut all: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (alpha * all.len() as f64).round() as usize;
    let test = all.split_off(n_train);
    Ok(SplitSpec { alpha, seed, train: all, test })
}

/// Appends uniformly drawn copies of minority-class items until both
/// classes have equal counts.
pub fn balance_oversample<T: Clone>(
    items: &[T],
    is_positive: impl Fn(&T) -> bool,
    seed: u64,
) -> Result<Vec<T>, DatasetError> {
    let (pos, neg): (Vec<&T>, Vec<&T>) = items.iter().partition(|x| is_positive(x));
    if pos.is_empty() || neg.is_empty() {
        return Err(DatasetError::SingleClass);
    }
    let (minority, deficit) = if pos.len() < neg.len() { (pos, neg.len()) } else { (neg, pos.len()) };
    let deficit = deficit - minority.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = items.to_vec();
    out.extend((0..deficit).map(|_| minority[rng.gen_range(0..minority.len())].clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{i}-{}", i + 1)).collect()
    }

    #[test]
    fn half_split_partitions() {
        let all = ids(100);
        let s = split(&all, 0.5, 3).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (50, 50));
        let a: BTreeSet<_> = s.train.iter().collect();
        let b: BTreeSet<_> = s.test.iter().collect();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.union(&b).count(), 100);
        assert_eq!(split(&all, 0.5, 3).unwrap(), s);
        assert_ne!(split(&all, 0.5, 4).unwrap(), s);
        assert_eq!(split(&ids(7), 0.3, 1).unwrap().train.len(), 2);
    }

    #[test]
    fn bad_alpha() {
        assert_eq!(split(&ids(3), 1.0, 0), Err(DatasetError::Alpha(1.0)));
        assert!(split(&ids(3), f64::NAN, 0).is_err());
    }

    #[test]
    fn oversampling_equalizes_classes() {
        let items: Vec<(usize, bool)> = (0..100).map(|i| (i, i < 10)).collect();
        let out = balance_oversample(&items, |x| x.1, 9).unwrap();
        assert_eq!(out.iter().filter(|x| x.1).count(), 90);
        assert_eq!(out.iter().filter(|x| !x.1).count(), 90);
        assert_eq!(&out[..100], &items[..]);
        assert!(out[100..].iter().all(|x| x.0 < 10));
        assert_eq!(balance_oversample(&items, |x| x.1, 9).unwrap(), out);
    }

    #[test]
    fn single_class_cannot_balance() {
        let items = vec![true, true];
        assert_eq!(balance_oversample(&items, |x| *x, 0), Err(DatasetError::SingleClass));
    }
}
