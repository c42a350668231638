//! Power Muirhead Mean k-nearest-neighbors classification.
//!
//! PMM-KNN classifies a query by building, for every class, a local centroid
//! of the query's k nearest same-class neighbors with the Power Muirhead
//! Mean aggregation operator, then assigning the class whose centroid is
//! closest. The crate ships the operator stack (support functions, Power
//! Average, Muirhead Mean, PMM with three interchangeable evaluation
//! strategies), the classifier plus plain-KNN and Gaussian naive-Bayes
//! baselines, confusion-matrix metrics with stratified cross-validation and
//! grid tuning, and CSV/manifest loaders for the five benchmark datasets.

pub mod aggregation;
pub mod classifier;
pub mod data;
pub mod dataio;
pub mod error;
pub mod evaluation;

pub use error::{Error, Result};
