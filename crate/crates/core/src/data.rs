//! Immutable dataset storage, label bookkeeping, min-max feature scaling and
//! the Euclidean distance primitive shared by every classifier.

use crate::error::{Error, Result};

/// Borrowed view of one labeled sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<'a> {
    pub features: &'a [f64],
    pub label: usize,
}

/// An immutable collection of feature vectors with integer class labels.
///
/// Feature values are stored row-major; every row has the same length and
/// contains only finite values, and every label is below `class_count`.
/// Construction validates all of this once so the rest of the crate can
/// assume it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    dim: usize,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDataset("dataset has no samples".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows[0].len();
        let mut features = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::from_flat(features, dim, labels, class_names)
    }

    /// Builds a dataset from an already flattened row-major feature matrix.
    pub fn from_flat(
        features: Vec<f64>,
        dim: usize,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDataset(
                "dimensionality must be at least 1".into(),
            ));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDataset("dataset has no samples".into()));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::InvalidDataset(format!(
                "feature buffer holds {} values, expected {} samples x {} features",
                features.len(),
                labels.len(),
                dim
            )));
        }
        if class_names.is_empty() {
            return Err(Error::InvalidDataset(
                "at least one class is required".into(),
            ));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature value {v}"
            )));
        }
        let class_count = class_names.len();
        if let Some(&label) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::LabelOutOfRange { label, class_count });
        }
        Ok(Self {
            features,
            labels,
            dim,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty datasets
    }

    pub fn dimensionality(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn features(&self, index: usize) -> &[f64] {
        &self.features[index * self.dim..(index + 1) * self.dim]
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sample(&self, index: usize) -> Sample<'_> {
        Sample {
            features: self.features(index),
            label: self.labels[index],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Sample<'_>> {
        (0..self.len()).map(|i| self.sample(i))
    }

    /// Number of samples per class, indexed by class label.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Sample indices grouped by class label, each group in dataset order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.class_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            groups[l].push(i);
        }
        groups
    }

    /// Copies the selected rows into a new dataset (class names are shared).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidDataset("subset selects no samples".into()));
        }
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.features(i));
            labels.push(self.labels[i]);
        }
        Self::from_flat(features, self.dim, labels, self.class_names.clone())
    }
}

/// Per-feature min-max scaler fitted on training data only.
///
/// Transformed values are clamped into `[0, 1]`, and features that were
/// constant in the training data map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(train: &Dataset) -> Self {
        let dim = train.dimensionality();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for i in 0..train.len() {
            for (j, &v) in train.features(i).iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    pub fn feature_count(&self) -> usize {
        self.min.len()
    }

    pub fn feature_min(&self) -> &[f64] {
        &self.min
    }

    pub fn feature_max(&self) -> &[f64] {
        &self.max
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.min.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn transform_dataset(&self, ds: &Dataset) -> Result<Dataset> {
        let mut features = Vec::with_capacity(ds.len() * ds.dimensionality());
        for i in 0..ds.len() {
            features.extend_from_slice(&self.transform(ds.features(i))?);
        }
        Dataset::from_flat(
            features,
            ds.dimensionality(),
            ds.labels().to_vec(),
            ds.class_names().to_vec(),
        )
    }
}

/// Euclidean distance between two equal-length vectors.
///
/// ```
/// use pmmknn::data::euclidean_distance;
///
/// assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0])?, 5.0);
/// # Ok::<(), pmmknn::Error>(())
/// ```
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(euclidean_unchecked(a, b))
}

pub(crate) fn euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Dataset {
        let names = (0..classes).map(|c| format!("c{c}")).collect();
        Dataset::new(rows, labels, names).unwrap()
    }

    #[test]
    fn euclidean_known_values() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(
            euclidean_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
        let d = euclidean_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn euclidean_rejects_length_mismatch() {
        assert!(matches!(
            euclidean_distance(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(euclidean_distance(&[], &[]).is_err());
    }

    #[test]
    fn scaler_single_sample() {
        let ds = toy(vec![vec![5.0, -2.0]], vec![0], 1);
        let s = FeatureScaler::fit(&ds);
        assert_eq!(s.feature_min(), &[5.0, -2.0]);
        assert_eq!(s.feature_max(), &[5.0, -2.0]);
        // constant features map to 0
        assert_eq!(s.transform(&[5.0, -2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn scaler_min_max_per_feature() {
        let ds = toy(vec![vec![0.0, 10.0], vec![2.0, 20.0]], vec![0, 1], 2);
        let s = FeatureScaler::fit(&ds);
        assert_eq!(s.feature_min(), &[0.0, 10.0]);
        assert_eq!(s.feature_max(), &[2.0, 20.0]);
    }

    #[test]
    fn scaler_maps_constant_feature_to_zero() {
        let ds = toy(vec![vec![7.0, 1.0], vec![7.0, 3.0]], vec![0, 1], 2);
        let s = FeatureScaler::fit(&ds);
        assert_eq!(s.transform(&[7.0, 2.0]).unwrap()[0], 0.0);
        assert_eq!(s.transform(&[123.0, 2.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn scaler_midpoint_and_clamping() {
        let ds = toy(vec![vec![0.0], vec![10.0]], vec![0, 1], 2);
        let s = FeatureScaler::fit(&ds);
        assert_eq!(s.transform(&[5.0]).unwrap(), vec![0.5]);
        assert_eq!(s.transform(&[12.0]).unwrap(), vec![1.0]);
        assert_eq!(s.transform(&[-3.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn dataset_rejects_bad_input() {
        assert!(Dataset::new(vec![], vec![], vec!["a".into()]).is_err());
        assert!(Dataset::new(
            vec![vec![1.0], vec![1.0, 2.0]],
            vec![0, 0],
            vec!["a".into()]
        )
        .is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0], vec!["a".into()]).is_err());
        assert!(matches!(
            Dataset::new(vec![vec![1.0]], vec![3], vec!["a".into()]),
            Err(Error::LabelOutOfRange {
                label: 3,
                class_count: 1
            })
        ));
    }

    #[test]
    fn subset_preserves_rows_and_labels() {
        let ds = toy(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 0], 2);
        let sub = ds.subset(&[2, 0]).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.features(0), &[3.0]);
        assert_eq!(sub.label(1), 0);
    }

    proptest! {
        // metric axioms on random triples
        #[test]
        fn euclidean_metric_axioms(
            a in proptest::collection::vec(-1e3f64..1e3, 1..6),
            b in proptest::collection::vec(-1e3f64..1e3, 1..6),
            c in proptest::collection::vec(-1e3f64..1e3, 1..6),
        ) {
            let n = a.len().min(b.len()).min(c.len());
            let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
            let dab = euclidean_distance(a, b).unwrap();
            let dba = euclidean_distance(b, a).unwrap();
            let dac = euclidean_distance(a, c).unwrap();
            let dcb = euclidean_distance(c, b).unwrap();
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(euclidean_distance(a, a).unwrap(), 0.0);
            prop_assert!(dab <= dac + dcb + 1e-9);
        }

        #[test]
        fn scaler_output_in_unit_interval(
            rows in proptest::collection::vec(
                proptest::collection::vec(-1e6f64..1e6, 3),
                1..20,
            ),
            query in proptest::collection::vec(-1e9f64..1e9, 3),
        ) {
            let labels = vec![0; rows.len()];
            let ds = Dataset::new(rows, labels, vec!["only".into()]).unwrap();
            let s = FeatureScaler::fit(&ds);
            for v in s.transform(&query).unwrap() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        // scaling already-scaled training data changes nothing (up to 1e-12)
        #[test]
        fn scaler_idempotent_on_training_data(
            rows in proptest::collection::vec(
                proptest::collection::vec(-50f64..50.0, 2),
                2..12,
            ),
        ) {
            let labels = vec![0; rows.len()];
            let ds = Dataset::new(rows, labels, vec!["only".into()]).unwrap();
            let scaled = FeatureScaler::fit(&ds).transform_dataset(&ds).unwrap();
            let rescaled = FeatureScaler::fit(&scaled).transform_dataset(&scaled).unwrap();
            for i in 0..scaled.len() {
                for (x, y) in scaled.features(i).iter().zip(rescaled.features(i)) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }
    }
}
