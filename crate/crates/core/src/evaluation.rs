//! Confusion-matrix metrics, stratified k-fold cross-validation and grid
//! tuning of the PMM-KNN parameters.
//!
//! Sensitivity and specificity are one-vs-rest: each class in turn is the
//! positive class and every other class is negative. Macro values are
//! unweighted means over classes. Cells whose denominator is zero report 0
//! and are flagged instead of producing NaN.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregation::{inverse_distance_support, pmm_ones_chain, SupportContext};
use crate::classifier::{ClassifierConfig, PmmExponents, PmmKnnConfig, SupportScope};
use crate::data::{euclidean_unchecked, Dataset, FeatureScaler};
use crate::error::{Error, Result};

/// Square matrix of prediction counts; rows are true classes, columns are
/// predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    class_count: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(class_count: usize) -> Self {
        Self {
            class_count,
            counts: vec![0; class_count * class_count],
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn count(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.class_count + predicted]
    }

    pub fn record(&mut self, true_class: usize, predicted: usize) -> Result<()> {
        for label in [true_class, predicted] {
            if label >= self.class_count {
                return Err(Error::LabelOutOfRange {
                    label,
                    class_count: self.class_count,
                });
            }
        }
        self.counts[true_class * self.class_count + predicted] += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.class_count).map(|c| self.count(c, c)).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.class_count != self.class_count {
            return Err(Error::DimensionMismatch {
                expected: self.class_count,
                found: other.class_count,
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.class_count)
            .map(|t| (0..self.class_count).map(|p| self.count(t, p)).collect())
            .collect()
    }
}

/// Counts paired true/predicted labels into a confusion matrix.
pub fn confusion(
    true_labels: &[usize],
    predicted_labels: &[usize],
    class_count: usize,
) -> Result<ConfusionMatrix> {
    if true_labels.len() != predicted_labels.len() {
        return Err(Error::DimensionMismatch {
            expected: true_labels.len(),
            found: predicted_labels.len(),
        });
    }
    let mut cm = ConfusionMatrix::new(class_count);
    for (&t, &p) in true_labels.iter().zip(predicted_labels) {
        cm.record(t, p)?;
    }
    Ok(cm)
}

/// One-vs-rest sensitivity and specificity for a single positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    /// `TP / (TP + FN)`; 0 when the class has no true samples.
    pub sensitivity: f64,
    /// `TN / (FP + TN)`; 0 when every sample belongs to the class.
    pub specificity: f64,
    pub sensitivity_defined: bool,
    pub specificity_defined: bool,
}

/// Binarizes the matrix one-vs-rest around `positive_class`.
pub fn sensitivity_specificity(cm: &ConfusionMatrix, positive_class: usize) -> ClassMetrics {
    let c = positive_class;
    let tp = cm.count(c, c);
    let row: u64 = (0..cm.class_count()).map(|p| cm.count(c, p)).sum();
    let col: u64 = (0..cm.class_count()).map(|t| cm.count(t, c)).sum();
    let fn_ = row - tp;
    let fp = col - tp;
    let tn = cm.total() - row - fp;
    let (sensitivity, sensitivity_defined) = ratio(tp, tp + fn_);
    let (specificity, specificity_defined) = ratio(tn, fp + tn);
    ClassMetrics {
        class: c,
        sensitivity,
        specificity,
        sensitivity_defined,
        specificity_defined,
    }
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, false)
    } else {
        (num as f64 / den as f64, true)
    }
}

/// Mean sensitivity/specificity over all ordered class pairs, each pair
/// binarized on its own 2x2 submatrix. Comparison mode only; reports use
/// the one-vs-rest macro values.
pub fn pairwise_sensitivity_specificity(cm: &ConfusionMatrix) -> (f64, f64) {
    let m = cm.class_count();
    if m < 2 {
        let only = sensitivity_specificity(cm, 0);
        return (only.sensitivity, only.specificity);
    }
    let mut sens_sum = 0.0;
    let mut spec_sum = 0.0;
    let mut pairs = 0usize;
    for pos in 0..m {
        for neg in 0..m {
            if pos == neg {
                continue;
            }
            let tp = cm.count(pos, pos);
            let fn_ = cm.count(pos, neg);
            let tn = cm.count(neg, neg);
            let fp = cm.count(neg, pos);
            sens_sum += ratio(tp, tp + fn_).0;
            spec_sum += ratio(tn, fp + tn).0;
            pairs += 1;
        }
    }
    (sens_sum / pairs as f64, spec_sum / pairs as f64)
}

/// Accuracy plus macro-averaged one-vs-rest sensitivity and specificity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub macro_sensitivity: f64,
    pub macro_specificity: f64,
    pub per_class: Vec<ClassMetrics>,
}

impl MetricReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Self {
        let per_class: Vec<ClassMetrics> = (0..cm.class_count())
            .map(|c| sensitivity_specificity(cm, c))
            .collect();
        let m = per_class.len().max(1) as f64;
        Self {
            accuracy: cm.accuracy(),
            macro_sensitivity: per_class.iter().map(|c| c.sensitivity).sum::<f64>() / m,
            macro_specificity: per_class.iter().map(|c| c.specificity).sum::<f64>() / m,
            per_class,
        }
    }

    /// True when some per-class cell had a zero denominator.
    pub fn has_undefined_cells(&self) -> bool {
        self.per_class
            .iter()
            .any(|c| !c.sensitivity_defined || !c.specificity_defined)
    }
}

/// Deterministic assignment of every sample to one of `folds` folds,
/// stratified per class.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    assignments: Vec<usize>,
    folds: usize,
    seed: u64,
    stratified: bool,
    warnings: Vec<String>,
}

impl FoldPlan {
    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stratified(&self) -> bool {
        self.stratified
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Classes that could not be stratified (fewer samples than folds).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn fold_of(&self, sample: usize) -> usize {
        self.assignments[sample]
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.folds];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded stratified k-fold split: every class is shuffled and dealt
/// round-robin, so per-class fold sizes differ by at most one. Classes with
/// fewer samples than folds are recorded as warnings.
pub fn stratified_kfold(ds: &Dataset, folds: usize, seed: u64) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(Error::Parameter(format!(
            "folds = {folds}, need at least 2"
        )));
    }
    if folds > ds.len() {
        return Err(Error::Parameter(format!(
            "folds = {folds} exceeds {} samples",
            ds.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; ds.len()];
    let mut warnings = Vec::new();
    // Rotate the starting fold between classes so overall fold sizes stay
    // within one of each other, not just within each class.
    let mut offset = 0usize;
    for (class, group) in ds.class_indices().iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        if group.len() < folds {
            warnings.push(format!(
                "class {:?} has {} samples for {} folds; its samples cannot appear in every fold",
                ds.class_names()[class],
                group.len(),
                folds
            ));
        }
        let mut shuffled = group.clone();
        shuffled.shuffle(&mut rng);
        for (pos, &i) in shuffled.iter().enumerate() {
            assignments[i] = (offset + pos) % folds;
        }
        offset = (offset + group.len()) % folds;
    }
    Ok(FoldPlan {
        assignments,
        folds,
        seed,
        stratified: true,
        warnings,
    })
}

/// Cross-validation outcome: pooled metrics over all held-out predictions
/// plus per-fold detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Metrics of the pooled confusion matrix over all folds.
    pub pooled: MetricReport,
    /// Unweighted mean of per-fold accuracies; agrees with
    /// `pooled.accuracy` within 1/N for near-equal fold sizes.
    pub fold_mean_accuracy: f64,
    pub per_fold: Vec<MetricReport>,
    pub confusion: ConfusionMatrix,
}

/// Fits and evaluates `config` on every fold of `plan`: the scaler and the
/// model see only the training split, the held-out split is predicted, and
/// confusions accumulate in fold order. Queries within a fold are predicted
/// in parallel.
pub fn cross_validate(
    ds: &Dataset,
    config: &ClassifierConfig,
    plan: &FoldPlan,
) -> Result<CvReport> {
    if plan.len() != ds.len() {
        return Err(Error::Parameter(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.len(),
            ds.len()
        )));
    }
    let classes = ds.class_count();
    let mut pooled = ConfusionMatrix::new(classes);
    let mut per_fold = Vec::with_capacity(plan.folds());
    for fold in 0..plan.folds() {
        let test_idx = plan.test_indices(fold);
        let train_idx = plan.train_indices(fold);
        let train = ds.subset(&train_idx).map_err(|e| e.in_fold(fold))?;
        let scaler = FeatureScaler::fit(&train);
        let scaled_train = scaler
            .transform_dataset(&train)
            .map_err(|e| e.in_fold(fold))?;
        let fitted = config.fit(&scaled_train).map_err(|e| e.in_fold(fold))?;
        let predictions: Result<Vec<usize>> = test_idx
            .par_iter()
            .map(|&i| {
                let x = scaler.transform(ds.features(i))?;
                fitted.predict(&x)
            })
            .collect();
        let predictions = predictions.map_err(|e| e.in_fold(fold))?;
        let truths: Vec<usize> = test_idx.iter().map(|&i| ds.label(i)).collect();
        let cm = confusion(&truths, &predictions, classes)?;
        per_fold.push(MetricReport::from_confusion(&cm));
        pooled.merge(&cm)?;
    }
    let fold_mean_accuracy =
        per_fold.iter().map(|r| r.accuracy).sum::<f64>() / per_fold.len() as f64;
    Ok(CvReport {
        pooled: MetricReport::from_confusion(&pooled),
        fold_mean_accuracy,
        per_fold,
        confusion: pooled,
    })
}

/// One evaluated cell of the `(k, r)` tuning grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneCell {
    pub k: usize,
    pub r: usize,
    pub mean_accuracy: f64,
}

/// Exhaustive grid evaluation; `best` is the cell with the highest mean
/// cross-validation accuracy, ties going to smaller `k` then smaller `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub best: TuneCell,
    pub cells: Vec<TuneCell>,
}

/// Tunes PMM-KNN over every `(k, r)` pair with `r <= k`, sharing the
/// per-fold distance and neighborhood computations across all cells.
/// Results are identical to running [`cross_validate`] per cell.
pub fn grid_tune(
    ds: &Dataset,
    k_grid: &[usize],
    r_grid: &[usize],
    plan: &FoldPlan,
    scope: SupportScope,
) -> Result<TuneReport> {
    if plan.len() != ds.len() {
        return Err(Error::Parameter(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.len(),
            ds.len()
        )));
    }
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &k in k_grid {
        for &r in r_grid {
            if r >= 1 && r <= k {
                cells.push((k, r));
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Parameter(
            "tuning grid is empty after enforcing r <= k".into(),
        ));
    }
    let fold_accuracies = match scope {
        SupportScope::Vector => shared_grid_fold_accuracies(ds, &cells, plan)?,
        // Per-dimension supports rebuild contexts per feature; reuse the
        // general path per cell.
        SupportScope::PerDimension => {
            let mut acc = vec![Vec::with_capacity(plan.folds()); cells.len()];
            for (slot, &(k, r)) in acc.iter_mut().zip(&cells) {
                let cfg = ClassifierConfig::PmmKnn(PmmKnnConfig {
                    k,
                    exponents: PmmExponents::OnesChain(r),
                    support_scope: SupportScope::PerDimension,
                });
                let report = cross_validate(ds, &cfg, plan)?;
                slot.extend(report.per_fold.iter().map(|f| f.accuracy));
            }
            acc
        }
    };
    let mut report_cells = Vec::with_capacity(cells.len());
    for (&(k, r), accs) in cells.iter().zip(&fold_accuracies) {
        let mean_accuracy = accs.iter().sum::<f64>() / accs.len() as f64;
        report_cells.push(TuneCell {
            k,
            r,
            mean_accuracy,
        });
    }
    let best = *report_cells
        .iter()
        .max_by(|a, b| {
            a.mean_accuracy
                .total_cmp(&b.mean_accuracy)
                .then(b.k.cmp(&a.k))
                .then(b.r.cmp(&a.r))
        })
        .expect("at least one cell");
    Ok(TuneReport {
        best,
        cells: report_cells,
    })
}

/// Per-fold accuracies for each `(k, r)` cell, computing distances, sorted
/// neighborhoods and support matrices once per query at the largest k.
fn shared_grid_fold_accuracies(
    ds: &Dataset,
    cells: &[(usize, usize)],
    plan: &FoldPlan,
) -> Result<Vec<Vec<f64>>> {
    let k_max = cells.iter().map(|&(k, _)| k).max().expect("nonempty");
    let classes = ds.class_count();
    let dim = ds.dimensionality();
    let mut fold_accuracies = vec![Vec::with_capacity(plan.folds()); cells.len()];
    for fold in 0..plan.folds() {
        let test_idx = plan.test_indices(fold);
        let train_idx = plan.train_indices(fold);
        let train = ds.subset(&train_idx).map_err(|e| e.in_fold(fold))?;
        if k_max > train.len() {
            return Err(
                Error::Parameter(format!("k = {k_max} out of range 1..={}", train.len()))
                    .in_fold(fold),
            );
        }
        let scaler = FeatureScaler::fit(&train);
        let scaled_train = scaler
            .transform_dataset(&train)
            .map_err(|e| e.in_fold(fold))?;
        let groups = scaled_train.class_indices();
        if let Some(empty) = groups.iter().position(|g| g.is_empty()) {
            return Err(Error::Model(format!(
                "class {:?} has no training samples",
                ds.class_names()[empty]
            ))
            .in_fold(fold));
        }
        let correct: Result<Vec<u64>> = test_idx
            .par_iter()
            .map(|&i| {
                let x = scaler.transform(ds.features(i))?;
                let truth = ds.label(i);
                // Per class: members sorted by (distance, index) up to
                // k_max, plus the full support matrix over those members.
                let mut neighborhoods = Vec::with_capacity(classes);
                for group in &groups {
                    let mut scored: Vec<(f64, usize)> = group
                        .iter()
                        .map(|&t| (euclidean_unchecked(&x, scaled_train.features(t)), t))
                        .collect();
                    let keep = k_max.min(scored.len());
                    if keep < scored.len() {
                        scored.select_nth_unstable_by(keep - 1, |a, b| {
                            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                        });
                        scored.truncate(keep);
                    }
                    scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    let members: Vec<&[f64]> = scored
                        .iter()
                        .map(|&(_, t)| scaled_train.features(t))
                        .collect();
                    let m = members.len();
                    let mut supports = vec![vec![1.0; m]; m];
                    for a in 0..m {
                        for b in (a + 1)..m {
                            let s = inverse_distance_support(euclidean_unchecked(
                                members[a], members[b],
                            ));
                            supports[a][b] = s;
                            supports[b][a] = s;
                        }
                    }
                    neighborhoods.push((members, supports));
                }
                let mut flags = vec![0u64; cells.len()];
                let mut column = vec![0.0; k_max];
                for (cell, &(k, r)) in cells.iter().enumerate() {
                    let mut best_class = 0usize;
                    let mut best_dist = f64::INFINITY;
                    for (class, (members, supports)) in neighborhoods.iter().enumerate() {
                        let n = k.min(members.len());
                        let prefix: Vec<Vec<f64>> =
                            supports[..n].iter().map(|row| row[..n].to_vec()).collect();
                        let ctx = SupportContext::from_supports(&prefix)?;
                        let r_eff = r.min(n);
                        let mut dist_sq = 0.0;
                        for d in 0..dim {
                            for (slot, member) in column[..n].iter_mut().zip(members) {
                                *slot = member[d];
                            }
                            let centroid_d = pmm_ones_chain(&column[..n], r_eff, &ctx)?;
                            let delta = x[d] - centroid_d;
                            dist_sq += delta * delta;
                        }
                        let dist = dist_sq.sqrt();
                        if dist < best_dist {
                            best_dist = dist;
                            best_class = class;
                        }
                    }
                    flags[cell] = u64::from(best_class == truth);
                }
                Ok(flags)
            })
            .try_reduce(
                || vec![0u64; cells.len()],
                |mut acc, flags| {
                    for (a, f) in acc.iter_mut().zip(&flags) {
                        *a += f;
                    }
                    Ok(acc)
                },
            );
        let correct = correct.map_err(|e| e.in_fold(fold))?;
        for (slot, &hits) in fold_accuracies.iter_mut().zip(&correct) {
            slot.push(hits as f64 / test_idx.len() as f64);
        }
    }
    Ok(fold_accuracies)
}

/// One evaluated k of a plain-KNN tuning sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnTuneCell {
    pub k: usize,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnTuneReport {
    pub best: KnnTuneCell,
    pub cells: Vec<KnnTuneCell>,
}

/// Tunes the baseline KNN over a k grid, sharing the sorted global
/// neighbor list across all k. Ties go to smaller k.
pub fn knn_grid_tune(ds: &Dataset, k_grid: &[usize], plan: &FoldPlan) -> Result<KnnTuneReport> {
    if k_grid.is_empty() {
        return Err(Error::Parameter("k grid is empty".into()));
    }
    if plan.len() != ds.len() {
        return Err(Error::Parameter(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.len(),
            ds.len()
        )));
    }
    let k_max = *k_grid.iter().max().expect("nonempty");
    let classes = ds.class_count();
    let mut per_cell_accuracy = vec![0.0; k_grid.len()];
    for fold in 0..plan.folds() {
        let test_idx = plan.test_indices(fold);
        let train_idx = plan.train_indices(fold);
        let train = ds.subset(&train_idx).map_err(|e| e.in_fold(fold))?;
        if k_max > train.len() {
            return Err(
                Error::Parameter(format!("k = {k_max} out of range 1..={}", train.len()))
                    .in_fold(fold),
            );
        }
        let scaler = FeatureScaler::fit(&train);
        let scaled_train = scaler
            .transform_dataset(&train)
            .map_err(|e| e.in_fold(fold))?;
        let correct: Result<Vec<u64>> = test_idx
            .par_iter()
            .map(|&i| {
                let x = scaler.transform(ds.features(i))?;
                let truth = ds.label(i);
                let mut scored: Vec<(f64, usize)> = (0..scaled_train.len())
                    .map(|t| (euclidean_unchecked(&x, scaled_train.features(t)), t))
                    .collect();
                let keep = k_max.min(scored.len());
                if keep < scored.len() {
                    scored.select_nth_unstable_by(keep - 1, |a, b| {
                        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                    });
                    scored.truncate(keep);
                }
                scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let labels: Vec<usize> =
                    scored.iter().map(|&(_, t)| scaled_train.label(t)).collect();
                let mut flags = vec![0u64; k_grid.len()];
                for (cell, &k) in k_grid.iter().enumerate() {
                    let mut votes = vec![0usize; classes];
                    for &l in &labels[..k] {
                        votes[l] += 1;
                    }
                    let mut best = 0;
                    for (c, &v) in votes.iter().enumerate().skip(1) {
                        if v > votes[best] {
                            best = c;
                        }
                    }
                    flags[cell] = u64::from(best == truth);
                }
                Ok(flags)
            })
            .try_reduce(
                || vec![0u64; k_grid.len()],
                |mut acc, flags| {
                    for (a, f) in acc.iter_mut().zip(&flags) {
                        *a += f;
                    }
                    Ok(acc)
                },
            );
        let correct = correct.map_err(|e| e.in_fold(fold))?;
        for (slot, &hits) in per_cell_accuracy.iter_mut().zip(&correct) {
            *slot += hits as f64 / test_idx.len() as f64;
        }
    }
    let cells: Vec<KnnTuneCell> = k_grid
        .iter()
        .zip(&per_cell_accuracy)
        .map(|(&k, &sum)| KnnTuneCell {
            k,
            mean_accuracy: sum / plan.folds() as f64,
        })
        .collect();
    let best = *cells
        .iter()
        .max_by(|a, b| {
            a.mean_accuracy
                .total_cmp(&b.mean_accuracy)
                .then(b.k.cmp(&a.k))
        })
        .expect("nonempty");
    Ok(KnnTuneReport { best, cells })
}
