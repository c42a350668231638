//! Classifiers behind one fit/predict contract: PMM-KNN, majority-vote KNN
//! and a Gaussian naive-Bayes baseline.
//!
//! PMM-KNN prediction, for a query `q`:
//!
//! 1. per class, sort the class's training samples by distance to `q`
//!    (ties by training index) and keep the first `min(k, class size)`;
//! 2. build a support context over the neighborhood (supports from
//!    full-vector Euclidean distances by default);
//! 3. aggregate the members per feature dimension with the Power Muirhead
//!    Mean to form the class centroid;
//! 4. predict the class whose centroid is nearest to `q` (ties to the
//!    lowest class index).

use serde::{Deserialize, Serialize};

use crate::aggregation::{
    inverse_distance_support, power_muirhead_mean, ExponentVector, SupportContext,
};
use crate::data::{euclidean_distance, Dataset};
use crate::error::{Error, Result};

/// Where pairwise supports between neighborhood members are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportScope {
    /// One support matrix from full-vector Euclidean distances, shared by
    /// every feature dimension (the default).
    Vector,
    /// Independent supports per feature dimension from scalar distances.
    PerDimension,
}

/// Exponent parameterization of the PMM aggregation.
#[derive(Debug, Clone, PartialEq)]
pub enum PmmExponents {
    /// `r` ones followed by zeros; evaluated by the symmetric-polynomial
    /// fast path.
    OnesChain(usize),
    /// Arbitrary exponent vector of length `k`.
    General(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmmKnnConfig {
    pub k: usize,
    pub exponents: PmmExponents,
    pub support_scope: SupportScope,
}

impl PmmKnnConfig {
    pub fn ones_chain(k: usize, r: usize) -> Self {
        Self {
            k,
            exponents: PmmExponents::OnesChain(r),
            support_scope: SupportScope::Vector,
        }
    }
}

/// PMM-KNN model: scaled training data plus the neighborhood parameters.
///
/// ```
/// use pmmknn::classifier::{PmmKnnConfig, PmmKnnModel};
/// use pmmknn::data::Dataset;
///
/// let train = Dataset::new(
///     vec![vec![0.0, 0.0], vec![0.2, 0.0], vec![1.0, 1.0], vec![0.8, 1.0]],
///     vec![0, 0, 1, 1],
///     vec!["a".into(), "b".into()],
/// )?;
/// let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(2, 1))?;
/// let prediction = model.predict(&[0.1, 0.1])?;
/// assert_eq!(prediction.label, 0);
/// # Ok::<(), pmmknn::Error>(())
/// ```
#[derive(Debug, Clone)]
pub struct PmmKnnModel {
    train: Dataset,
    config: PmmKnnConfig,
    class_indices: Vec<Vec<usize>>,
}

/// The k nearest same-class training samples to a query.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    /// Training-set indices, sorted by ascending distance to the query,
    /// ties broken by ascending index.
    pub member_indices: Vec<usize>,
    /// Distances to the query, nondecreasing.
    pub distances: Vec<f64>,
    /// Supports between member vectors (vector scope).
    pub ctx: SupportContext,
}

/// Outcome of a PMM-KNN prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    /// Distance from the query to each class centroid, indexed by class.
    pub centroid_distances: Vec<f64>,
}

impl PmmKnnModel {
    /// Validates the configuration against the training data: `1 <= k <= N`,
    /// `1 <= r <= k` (or a general exponent vector of length `k`), and no
    /// empty class.
    pub fn fit(train: Dataset, config: PmmKnnConfig) -> Result<Self> {
        if config.k == 0 || config.k > train.len() {
            return Err(Error::Parameter(format!(
                "k = {} out of range 1..={}",
                config.k,
                train.len()
            )));
        }
        match &config.exponents {
            PmmExponents::OnesChain(r) => {
                if *r == 0 || *r > config.k {
                    return Err(Error::Parameter(format!(
                        "ones-chain length {r} out of range 1..={}",
                        config.k
                    )));
                }
            }
            PmmExponents::General(p) => {
                if p.len() != config.k {
                    return Err(Error::Parameter(format!(
                        "exponent vector length {} does not match k = {}",
                        p.len(),
                        config.k
                    )));
                }
                ExponentVector::new(p.clone())?;
            }
        }
        let class_indices = train.class_indices();
        if let Some(empty) = class_indices.iter().position(|g| g.is_empty()) {
            return Err(Error::Model(format!(
                "class {:?} has no training samples",
                train.class_names()[empty]
            )));
        }
        Ok(Self {
            train,
            config,
            class_indices,
        })
    }

    pub fn train_data(&self) -> &Dataset {
        &self.train
    }

    pub fn config(&self) -> &PmmKnnConfig {
        &self.config
    }

    /// The `min(k, class size)` nearest class members to `query`, with the
    /// vector-scope support context over their feature vectors.
    pub fn neighborhood(&self, query: &[f64], class: usize) -> Result<Neighborhood> {
        self.check_query(query)?;
        if class >= self.train.class_count() {
            return Err(Error::LabelOutOfRange {
                label: class,
                class_count: self.train.class_count(),
            });
        }
        let (member_indices, distances) = self.nearest_members(query, class, self.config.k);
        let ctx = self.vector_ctx(&member_indices)?;
        Ok(Neighborhood {
            member_indices,
            distances,
            ctx,
        })
    }

    pub fn predict(&self, query: &[f64]) -> Result<Prediction> {
        self.check_query(query)?;
        let classes = self.train.class_count();
        let mut centroid_distances = Vec::with_capacity(classes);
        for class in 0..classes {
            let (members, _) = self.nearest_members(query, class, self.config.k);
            let centroid = self.centroid(&members)?;
            centroid_distances.push(euclidean_distance(query, &centroid)?);
        }
        Ok(Prediction {
            label: argmin(&centroid_distances),
            centroid_distances,
        })
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.train.dimensionality() {
            return Err(Error::DimensionMismatch {
                expected: self.train.dimensionality(),
                found: query.len(),
            });
        }
        if query.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("query contains non-finite values".into()));
        }
        Ok(())
    }

    /// Indices and distances of the `min(k, class size)` nearest class
    /// members, sorted by (distance, training index).
    fn nearest_members(&self, query: &[f64], class: usize, k: usize) -> (Vec<usize>, Vec<f64>) {
        let group = &self.class_indices[class];
        let mut scored: Vec<(f64, usize)> = group
            .iter()
            .map(|&i| {
                (
                    crate::data::euclidean_unchecked(query, self.train.features(i)),
                    i,
                )
            })
            .collect();
        let keep = k.min(scored.len());
        if keep < scored.len() {
            scored.select_nth_unstable_by(keep - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            scored.truncate(keep);
        }
        scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let indices = scored.iter().map(|&(_, i)| i).collect();
        let distances = scored.iter().map(|&(d, _)| d).collect();
        (indices, distances)
    }

    fn vector_ctx(&self, members: &[usize]) -> Result<SupportContext> {
        let vectors: Vec<&[f64]> = members.iter().map(|&i| self.train.features(i)).collect();
        SupportContext::build(&vectors, |a, b| {
            inverse_distance_support(crate::data::euclidean_unchecked(a, b))
        })
    }

    /// Exponent vector effective for a neighborhood of `n` members: the
    /// ones-chain length is capped at `n`, a general vector is truncated.
    fn effective_exponents(&self, n: usize) -> Result<ExponentVector> {
        match &self.config.exponents {
            PmmExponents::OnesChain(r) => ExponentVector::ones_chain((*r).min(n), n),
            PmmExponents::General(p) => {
                if p.len() == n {
                    ExponentVector::new(p.clone())
                } else {
                    ExponentVector::new(p.clone())?.truncated(n)
                }
            }
        }
    }

    /// PMM centroid of the given members, aggregating each feature
    /// dimension independently.
    fn centroid(&self, members: &[usize]) -> Result<Vec<f64>> {
        let n = members.len();
        let dim = self.train.dimensionality();
        let p = self.effective_exponents(n)?;
        let mut centroid = Vec::with_capacity(dim);
        match self.config.support_scope {
            SupportScope::Vector => {
                let ctx = self.vector_ctx(members)?;
                let mut column = vec![0.0; n];
                for d in 0..dim {
                    for (slot, &i) in column.iter_mut().zip(members) {
                        *slot = self.train.features(i)[d];
                    }
                    centroid.push(power_muirhead_mean(&column, &p, &ctx)?);
                }
            }
            SupportScope::PerDimension => {
                let mut column = vec![0.0; n];
                for d in 0..dim {
                    for (slot, &i) in column.iter_mut().zip(members) {
                        *slot = self.train.features(i)[d];
                    }
                    let ctx = SupportContext::build(&column, |a, b| {
                        inverse_distance_support((a - b).abs())
                    })?;
                    centroid.push(power_muirhead_mean(&column, &p, &ctx)?);
                }
            }
        }
        Ok(centroid)
    }
}

/// Majority vote among the k nearest training samples. Distance ties break
/// by training index, vote ties by the lowest class index.
pub fn knn_predict(train: &Dataset, query: &[f64], k: usize) -> Result<usize> {
    if k == 0 || k > train.len() {
        return Err(Error::Parameter(format!(
            "k = {k} out of range 1..={}",
            train.len()
        )));
    }
    if query.len() != train.dimensionality() {
        return Err(Error::DimensionMismatch {
            expected: train.dimensionality(),
            found: query.len(),
        });
    }
    let mut scored: Vec<(f64, usize)> = (0..train.len())
        .map(|i| {
            (
                crate::data::euclidean_unchecked(query, train.features(i)),
                i,
            )
        })
        .collect();
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.truncate(k);
    }
    let mut votes = vec![0usize; train.class_count()];
    for &(_, i) in &scored {
        votes[train.label(i)] += 1;
    }
    Ok(argmax_count(&votes))
}

/// Gaussian naive Bayes with per-class feature means and variances
/// (variance floored at 1e-9 to survive constant features).
#[derive(Debug, Clone)]
pub struct GaussianNb {
    dim: usize,
    log_priors: Vec<f64>,
    /// class-major `class_count x dim`
    means: Vec<f64>,
    variances: Vec<f64>,
}

pub const GNB_VARIANCE_FLOOR: f64 = 1e-9;

impl GaussianNb {
    pub fn fit(train: &Dataset) -> Result<Self> {
        let classes = train.class_count();
        let dim = train.dimensionality();
        let counts = train.class_counts();
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Model(format!(
                "class {:?} has no training samples",
                train.class_names()[empty]
            )));
        }
        let mut means = vec![0.0; classes * dim];
        for i in 0..train.len() {
            let c = train.label(i);
            for (j, &v) in train.features(i).iter().enumerate() {
                means[c * dim + j] += v;
            }
        }
        for c in 0..classes {
            for j in 0..dim {
                means[c * dim + j] /= counts[c] as f64;
            }
        }
        let mut variances = vec![0.0; classes * dim];
        for i in 0..train.len() {
            let c = train.label(i);
            for (j, &v) in train.features(i).iter().enumerate() {
                let d = v - means[c * dim + j];
                variances[c * dim + j] += d * d;
            }
        }
        for c in 0..classes {
            for j in 0..dim {
                let var = variances[c * dim + j] / counts[c] as f64;
                variances[c * dim + j] = var.max(GNB_VARIANCE_FLOOR);
            }
        }
        let n = train.len() as f64;
        let log_priors = counts.iter().map(|&c| (c as f64 / n).ln()).collect();
        Ok(Self {
            dim,
            log_priors,
            means,
            variances,
        })
    }

    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        let scores: Vec<f64> = (0..self.log_priors.len())
            .map(|c| {
                let mut score = self.log_priors[c];
                for (j, &x) in query.iter().enumerate() {
                    let mean = self.means[c * self.dim + j];
                    let var = self.variances[c * self.dim + j];
                    let d = x - mean;
                    score += -0.5 * (std::f64::consts::TAU * var).ln() - d * d / (2.0 * var);
                }
                score
            })
            .collect();
        Ok(argmax(&scores))
    }
}

/// Declarative classifier choice used by cross-validation and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierConfig {
    PmmKnn(PmmKnnConfig),
    Knn {
        k: usize,
    },
    Gnb,
    /// Always predicts the given class; baseline for sanity checks.
    Constant {
        label: usize,
    },
}

#[derive(Debug, Clone)]
pub enum FittedClassifier {
    PmmKnn(PmmKnnModel),
    Knn { train: Dataset, k: usize },
    Gnb(GaussianNb),
    Constant { label: usize },
}

impl ClassifierConfig {
    pub fn fit(&self, train: &Dataset) -> Result<FittedClassifier> {
        match self {
            ClassifierConfig::PmmKnn(cfg) => Ok(FittedClassifier::PmmKnn(PmmKnnModel::fit(
                train.clone(),
                cfg.clone(),
            )?)),
            ClassifierConfig::Knn { k } => {
                if *k == 0 || *k > train.len() {
                    return Err(Error::Parameter(format!(
                        "k = {k} out of range 1..={}",
                        train.len()
                    )));
                }
                Ok(FittedClassifier::Knn {
                    train: train.clone(),
                    k: *k,
                })
            }
            ClassifierConfig::Gnb => Ok(FittedClassifier::Gnb(GaussianNb::fit(train)?)),
            ClassifierConfig::Constant { label } => {
                if *label >= train.class_count() {
                    return Err(Error::LabelOutOfRange {
                        label: *label,
                        class_count: train.class_count(),
                    });
                }
                Ok(FittedClassifier::Constant { label: *label })
            }
        }
    }
}

impl FittedClassifier {
    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        match self {
            FittedClassifier::PmmKnn(model) => Ok(model.predict(query)?.label),
            FittedClassifier::Knn { train, k } => knn_predict(train, query, *k),
            FittedClassifier::Gnb(model) => model.predict(query),
            FittedClassifier::Constant { label } => Ok(*label),
        }
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn argmax_count(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Dataset {
        let names = (0..classes).map(|c| format!("c{c}")).collect();
        Dataset::new(rows, labels, names).unwrap()
    }

    #[test]
    fn single_sample_per_class_predicts_nearest() {
        let train = ds(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![0, 1], 2);
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(1, 1)).unwrap();
        let pred = model.predict(&[0.1, 0.0]).unwrap();
        assert_eq!(pred.label, 0);
        // n = 1 neighborhoods reproduce the sample exactly (idempotency)
        assert!((pred.centroid_distances[0] - 0.1).abs() < 1e-12);
        let d1 = ((0.9f64).powi(2) + 1.0).sqrt();
        assert!((pred.centroid_distances[1] - d1).abs() < 1e-12);
    }

    #[test]
    fn k1_equals_nearest_neighbor_per_class() {
        let train = ds(
            vec![vec![0.0], vec![0.4], vec![1.0], vec![1.2]],
            vec![0, 0, 1, 1],
            2,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(1, 1)).unwrap();
        let pred = model.predict(&[0.55]).unwrap();
        assert!((pred.centroid_distances[0] - 0.15).abs() < 1e-12);
        assert!((pred.centroid_distances[1] - 0.45).abs() < 1e-12);
        assert_eq!(pred.label, 0);
    }

    // Hand-traced two-class example: class A members (0,0) and (0.2,0),
    // class B members (1,1) and (0.8,1), query (0.1, 0.1), k = 2, r = 1.
    // A's centroid is (0.1, 0) at distance 0.1; B's centroid (0.9, 1) is
    // about 1.2 away, so A wins.
    #[test]
    fn two_class_hand_example() {
        let train = ds(
            vec![
                vec![0.0, 0.0],
                vec![0.2, 0.0],
                vec![1.0, 1.0],
                vec![0.8, 1.0],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(2, 1)).unwrap();
        let pred = model.predict(&[0.1, 0.1]).unwrap();
        assert_eq!(pred.label, 0);
        assert!(pred.centroid_distances[0] < 0.15);
        assert!(pred.centroid_distances[1] > 1.1);
        assert!((pred.centroid_distances[0] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn query_matching_training_sample_wins_with_k1() {
        let train = ds(
            vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![5.0, 5.0]],
            vec![0, 1, 1],
            2,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(1, 1)).unwrap();
        assert_eq!(model.predict(&[2.0, 3.0]).unwrap().label, 1);
        assert_eq!(model.predict(&[0.0, 1.0]).unwrap().label, 0);
    }

    #[test]
    fn k_larger_than_class_uses_all_members() {
        let train = ds(
            vec![vec![0.0], vec![0.2], vec![10.0], vec![10.2], vec![10.4]],
            vec![0, 0, 1, 1, 1],
            2,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(3, 2)).unwrap();
        let hood = model.neighborhood(&[0.1], 0).unwrap();
        assert_eq!(hood.member_indices.len(), 2);
        let pred = model.predict(&[0.1]).unwrap();
        assert_eq!(pred.label, 0);
        assert!(pred.centroid_distances.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn neighborhood_sorted_with_index_tiebreak() {
        // two members at identical distance from the query
        let train = ds(vec![vec![1.0], vec![-1.0], vec![3.0]], vec![0, 0, 0], 1);
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(2, 1)).unwrap();
        let hood = model.neighborhood(&[0.0], 0).unwrap();
        assert_eq!(hood.member_indices, vec![0, 1]);
        assert_eq!(hood.distances, vec![1.0, 1.0]);
    }

    #[test]
    fn fit_rejects_bad_configs() {
        let train = ds(vec![vec![0.0], vec![1.0]], vec![0, 1], 2);
        assert!(PmmKnnModel::fit(train.clone(), PmmKnnConfig::ones_chain(0, 1)).is_err());
        assert!(PmmKnnModel::fit(train.clone(), PmmKnnConfig::ones_chain(3, 1)).is_err());
        assert!(PmmKnnModel::fit(train.clone(), PmmKnnConfig::ones_chain(2, 3)).is_err());
        let bad_p = PmmKnnConfig {
            k: 2,
            exponents: PmmExponents::General(vec![1.0]),
            support_scope: SupportScope::Vector,
        };
        assert!(PmmKnnModel::fit(train, bad_p).is_err());
    }

    #[test]
    fn empty_class_fails_at_fit_time() {
        // class 1 exists in names but has no samples
        let train = Dataset::new(
            vec![vec![0.0], vec![1.0]],
            vec![0, 0],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(
            PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(1, 1)),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn per_dimension_scope_predicts_sanely() {
        let train = ds(
            vec![
                vec![0.0, 0.0],
                vec![0.2, 0.1],
                vec![1.0, 1.0],
                vec![0.9, 0.8],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let cfg = PmmKnnConfig {
            k: 2,
            exponents: PmmExponents::OnesChain(2),
            support_scope: SupportScope::PerDimension,
        };
        let model = PmmKnnModel::fit(train, cfg).unwrap();
        assert_eq!(model.predict(&[0.05, 0.05]).unwrap().label, 0);
        assert_eq!(model.predict(&[0.95, 0.9]).unwrap().label, 1);
    }

    #[test]
    fn general_exponents_match_ones_chain_when_equal() {
        let train = ds(
            vec![
                vec![0.1, 0.2],
                vec![0.3, 0.1],
                vec![0.9, 1.0],
                vec![1.1, 0.8],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let chain = PmmKnnModel::fit(train.clone(), PmmKnnConfig::ones_chain(2, 2)).unwrap();
        let general = PmmKnnModel::fit(
            train,
            PmmKnnConfig {
                k: 2,
                exponents: PmmExponents::General(vec![1.0, 1.0]),
                support_scope: SupportScope::Vector,
            },
        )
        .unwrap();
        let q = [0.5, 0.4];
        let a = chain.predict(&q).unwrap();
        let b = general.predict(&q).unwrap();
        assert_eq!(a.label, b.label);
        for (x, y) in a.centroid_distances.iter().zip(&b.centroid_distances) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn knn_majority_and_ties() {
        let train = ds(
            vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]],
            vec![0, 0, 1, 1],
            2,
        );
        // k=1 exact hit
        assert_eq!(knn_predict(&train, &[0.2], 1).unwrap(), 1);
        // k=3 -> {0, 0, 1} -> majority 0
        assert_eq!(knn_predict(&train, &[0.0], 3).unwrap(), 0);
        // k=2 -> {0, 1} tie -> lowest class index
        assert_eq!(knn_predict(&train, &[0.15], 2).unwrap(), 0);
        assert!(knn_predict(&train, &[0.0], 0).is_err());
        assert!(knn_predict(&train, &[0.0], 5).is_err());
    }

    #[test]
    fn knn_distance_tie_breaks_by_training_index() {
        // both neighbors at distance 1; index 0 (class 1) comes first
        let train = ds(vec![vec![1.0], vec![-1.0], vec![9.0]], vec![1, 0, 0], 2);
        assert_eq!(knn_predict(&train, &[0.0], 1).unwrap(), 1);
    }

    #[test]
    fn gnb_separates_clear_classes() {
        let train = ds(
            vec![vec![0.0], vec![0.1], vec![1.0], vec![1.1]],
            vec![0, 0, 1, 1],
            2,
        );
        let model = GaussianNb::fit(&train).unwrap();
        assert_eq!(model.predict(&[0.05]).unwrap(), 0);
        assert_eq!(model.predict(&[1.05]).unwrap(), 1);
    }

    #[test]
    fn gnb_tie_goes_to_lowest_class() {
        // both classes identical stats
        let train = ds(
            vec![vec![0.0], vec![1.0], vec![0.0], vec![1.0]],
            vec![0, 0, 1, 1],
            2,
        );
        let model = GaussianNb::fit(&train).unwrap();
        assert_eq!(model.predict(&[0.3]).unwrap(), 0);
    }

    #[test]
    fn gnb_well_separated_means() {
        let train = ds(
            vec![
                vec![-2.0],
                vec![-1.8],
                vec![-2.2],
                vec![2.0],
                vec![1.8],
                vec![2.2],
            ],
            vec![0, 0, 0, 1, 1, 1],
            2,
        );
        let model = GaussianNb::fit(&train).unwrap();
        assert_eq!(model.predict(&[-2.0]).unwrap(), 0);
        assert_eq!(model.predict(&[2.0]).unwrap(), 1);
    }

    #[test]
    fn gnb_survives_constant_features() {
        let train = ds(
            vec![
                vec![1.0, 0.0],
                vec![1.0, 0.1],
                vec![1.0, 1.0],
                vec![1.0, 1.1],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = GaussianNb::fit(&train).unwrap();
        assert_eq!(model.predict(&[1.0, 0.05]).unwrap(), 0);
    }

    #[test]
    fn prediction_is_deterministic() {
        let train = ds(
            vec![
                vec![0.1, 0.9],
                vec![0.3, 0.7],
                vec![0.8, 0.1],
                vec![0.7, 0.3],
                vec![0.5, 0.5],
            ],
            vec![0, 0, 1, 1, 0],
            2,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(3, 2)).unwrap();
        let q = [0.42, 0.58];
        let first = model.predict(&q).unwrap();
        for _ in 0..10 {
            assert_eq!(model.predict(&q).unwrap(), first);
        }
    }

    #[test]
    fn centroid_distance_per_class_all_finite() {
        let train = ds(
            vec![
                vec![0.0, 0.0],
                vec![0.5, 0.5],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
            ],
            vec![0, 1, 2, 2],
            3,
        );
        let model = PmmKnnModel::fit(train, PmmKnnConfig::ones_chain(2, 1)).unwrap();
        let pred = model.predict(&[0.3, 0.3]).unwrap();
        assert_eq!(pred.centroid_distances.len(), 3);
        assert!(pred.centroid_distances.iter().all(|d| d.is_finite()));
        let best = pred
            .centroid_distances
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(pred.label, best);
    }

    #[test]
    fn pmm_knn_agrees_with_knn_on_separated_clusters() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..8 {
            rows.push(vec![0.0 + 0.01 * i as f64, 0.0]);
            labels.push(0);
            rows.push(vec![10.0 - 0.01 * i as f64, 10.0]);
            labels.push(1);
        }
        let train = ds(rows, labels, 2);
        for k in [1, 3, 5] {
            let model = PmmKnnModel::fit(train.clone(), PmmKnnConfig::ones_chain(k, 1)).unwrap();
            for q in [[0.05, 0.1], [9.9, 10.1], [2.0, 1.0], [8.0, 9.0]] {
                let pmm = model.predict(&q).unwrap().label;
                let knn = knn_predict(&train, &q, k).unwrap();
                assert_eq!(pmm, knn, "k = {k}, q = {q:?}");
            }
        }
    }
}
