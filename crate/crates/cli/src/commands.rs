//! Implementations of the cv, tune, classify and bench-all subcommands.

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use pmmknn::classifier::{
    ClassifierConfig, FittedClassifier, PmmExponents, PmmKnnConfig, SupportScope,
};
use pmmknn::data::{Dataset, FeatureScaler};
use pmmknn::dataio::load_benchmark_dataset;
use pmmknn::evaluation::{cross_validate, grid_tune, knn_grid_tune, stratified_kfold, FoldPlan};

use crate::report::{
    reference_results, BenchAllReport, BenchmarkReport, ClassifierResult, DatasetBenchmark,
    MetricTriple, ResolvedConfig, TuneRunReport,
};
use crate::{
    parse_f64_list, parse_usize_list, BenchAllArgs, ClassifyArgs, CliError, CliResult, CvArgs,
    TuneArgs,
};

fn variant_option(variant: &str) -> Option<&str> {
    (variant != "standard").then_some(variant)
}

fn parse_classifier_names(spec: &str) -> CliResult<Vec<String>> {
    let mut names = Vec::new();
    for part in spec.split(',') {
        let part = part.trim().to_lowercase();
        if part.is_empty() {
            continue;
        }
        match part.as_str() {
            "pmm-knn" | "pmmknn" => names.push("pmm-knn".to_string()),
            "knn" => names.push("knn".to_string()),
            "gnb" => names.push("gnb".to_string()),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown classifier {other:?}; expected pmm-knn, knn or gnb"
                )))
            }
        }
    }
    if names.is_empty() {
        return Err(CliError::Usage("no classifiers requested".into()));
    }
    Ok(names)
}

fn pmm_exponents(k: usize, r: usize, p: &Option<String>) -> CliResult<PmmExponents> {
    match p {
        None => Ok(PmmExponents::OnesChain(r)),
        Some(list) => {
            let exponents = parse_f64_list(list, "--p")?;
            if exponents.len() != k {
                return Err(CliError::Usage(format!(
                    "--p has {} entries but k = {k}",
                    exponents.len()
                )));
            }
            Ok(PmmExponents::General(exponents))
        }
    }
}

fn classifier_config(name: &str, args: &CvArgs) -> CliResult<ClassifierConfig> {
    Ok(match name {
        "pmm-knn" => ClassifierConfig::PmmKnn(PmmKnnConfig {
            k: args.k,
            exponents: pmm_exponents(args.k, args.r, &args.p)?,
            support_scope: args.support_scope.into(),
        }),
        "knn" => ClassifierConfig::Knn { k: args.k },
        "gnb" => ClassifierConfig::Gnb,
        other => unreachable!("validated classifier {other}"),
    })
}

fn load_dataset_and_plan(
    data_dir: &std::path::Path,
    dataset: &str,
    variant: &str,
    folds: usize,
    seed: u64,
) -> CliResult<(Dataset, FoldPlan)> {
    let ds = load_benchmark_dataset(data_dir, dataset, variant_option(variant))?;
    let plan = stratified_kfold(&ds, folds, seed)?;
    Ok((ds, plan))
}

/// Cross-validates every requested classifier on identical folds.
pub fn cmd_cv(args: &CvArgs) -> CliResult<BenchmarkReport> {
    let start = Instant::now();
    if args.r == 0 || args.r > args.k {
        return Err(CliError::Usage(format!(
            "--r {} out of range 1..={}",
            args.r, args.k
        )));
    }
    let names = parse_classifier_names(&args.classifiers)?;
    let (ds, plan) = load_dataset_and_plan(
        &args.data_dir,
        &args.dataset,
        &args.variant,
        args.folds,
        args.seed,
    )?;
    let mut results = Vec::with_capacity(names.len());
    for name in &names {
        let config = classifier_config(name, args)?;
        let cv = cross_validate(&ds, &config, &plan)?;
        results.push(ClassifierResult {
            classifier: name.clone(),
            cv,
        });
    }
    let exponents = match &args.p {
        Some(list) => Some(parse_f64_list(list, "--p")?),
        None => None,
    };
    Ok(BenchmarkReport {
        config: ResolvedConfig {
            command: "cv".into(),
            dataset: args.dataset.clone(),
            variant: args.variant.clone(),
            classifiers: names,
            k: args.k,
            r: args.r,
            exponents,
            folds: args.folds,
            seed: args.seed,
            support_scope: args.support_scope.name().into(),
            dataset_samples: ds.len(),
            dataset_features: ds.dimensionality(),
            dataset_classes: ds.class_count(),
        },
        results,
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Exhaustive (k, r) tuning of PMM-KNN by cross-validation accuracy.
pub fn cmd_tune(args: &TuneArgs) -> CliResult<TuneRunReport> {
    let start = Instant::now();
    let k_grid = parse_usize_list(&args.k_grid, "--k-grid")?;
    let r_grid = parse_usize_list(&args.r_grid, "--r-grid")?;
    let (ds, plan) = load_dataset_and_plan(
        &args.data_dir,
        &args.dataset,
        &args.variant,
        args.folds,
        args.seed,
    )?;
    let tune = grid_tune(&ds, &k_grid, &r_grid, &plan, args.support_scope.into())?;
    Ok(TuneRunReport {
        config: ResolvedConfig {
            command: "tune".into(),
            dataset: args.dataset.clone(),
            variant: args.variant.clone(),
            classifiers: vec!["pmm-knn".into()],
            k: tune.best.k,
            r: tune.best.r,
            exponents: None,
            folds: args.folds,
            seed: args.seed,
            support_scope: args.support_scope.name().into(),
            dataset_samples: ds.len(),
            dataset_features: ds.dimensionality(),
            dataset_classes: ds.class_count(),
        },
        best: tune.best,
        cells: tune.cells,
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Reads headerless query rows for `classify`.
fn parse_queries(text: &str, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut queries = Vec::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    for (row_no, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::Runtime(format!("query row {}: {e}", row_no + 1)))?;
        let cells: Vec<&str> = record.iter().filter(|c| !c.is_empty()).collect();
        if cells.is_empty() {
            continue;
        }
        if cells.len() != dim {
            return Err(CliError::Runtime(format!(
                "query row {}: expected {dim} features, found {}",
                row_no + 1,
                cells.len()
            )));
        }
        let mut row = Vec::with_capacity(dim);
        for cell in cells {
            row.push(cell.parse::<f64>().map_err(|_| {
                CliError::Runtime(format!(
                    "query row {}: {cell:?} is not a number",
                    row_no + 1
                ))
            })?);
        }
        queries.push(row);
    }
    Ok(queries)
}

/// Trains on a benchmark dataset and labels each query row. Returns the
/// predictions as CSV text: row index, predicted class name, and (for
/// pmm-knn) the distance to every class centroid.
pub fn cmd_classify(args: &ClassifyArgs) -> CliResult<String> {
    let names = parse_classifier_names(&args.classifiers)?;
    if names.len() != 1 {
        return Err(CliError::Usage(
            "classify takes exactly one classifier".into(),
        ));
    }
    let name = &names[0];
    let ds = load_benchmark_dataset(&args.data_dir, &args.dataset, variant_option(&args.variant))?;
    let scaler = FeatureScaler::fit(&ds);
    let scaled = scaler.transform_dataset(&ds)?;
    let cv_args = CvArgs {
        dataset: args.dataset.clone(),
        variant: args.variant.clone(),
        classifiers: args.classifiers.clone(),
        k: args.k,
        r: args.r,
        p: args.p.clone(),
        folds: 10,
        seed: 42,
        support_scope: args.support_scope,
        output: crate::OutputFormat::Csv,
        data_dir: args.data_dir.clone(),
    };
    let fitted = classifier_config(name, &cv_args)?.fit(&scaled)?;
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Runtime(format!("failed to read {}: {e}", args.input.display())))?;
    let queries = parse_queries(&text, ds.dimensionality())?;
    let mut out = String::from("row,label");
    if let FittedClassifier::PmmKnn(_) = fitted {
        for class in ds.class_names() {
            let _ = write!(out, ",dist_{class}");
        }
    }
    out.push('\n');
    for (i, query) in queries.iter().enumerate() {
        let x = scaler.transform(query)?;
        match &fitted {
            FittedClassifier::PmmKnn(model) => {
                let pred = model.predict(&x)?;
                let _ = write!(out, "{i},{}", ds.class_names()[pred.label]);
                for d in &pred.centroid_distances {
                    let _ = write!(out, ",{d}");
                }
                out.push('\n');
            }
            other => {
                let label = other.predict(&x)?;
                let _ = writeln!(out, "{i},{}", ds.class_names()[label]);
            }
        }
    }
    Ok(out)
}

// k = 1 belongs in the grid: on noisy data the best local centroid can be
// the single nearest neighbor, where PMM-KNN coincides with 1-NN.
const BENCH_K_GRID: [usize; 8] = [1, 3, 5, 7, 9, 11, 13, 15];
const BENCH_R_GRID: [usize; 7] = [1, 2, 3, 4, 5, 6, 7];

/// Runs the full benchmark: per dataset, tune PMM-KNN over (k, r) and KNN
/// over k on identical folds, then cross-validate all three classifiers.
/// Per-dataset failures are recorded and the remaining datasets still run.
pub fn cmd_bench_all(args: &BenchAllArgs) -> CliResult<BenchAllReport> {
    let start = Instant::now();
    let mut datasets = Vec::new();
    for id in ["iris", "wbc", "digits", "satellite", "eeg"] {
        let t0 = Instant::now();
        match bench_one(args, id) {
            Ok(bench) => datasets.push(bench),
            Err(e) => datasets.push(DatasetBenchmark {
                dataset: id.into(),
                variant: "standard".into(),
                error: Some(e.to_string()),
                tuned_k: 0,
                tuned_r: 0,
                knn_k: 0,
                measured: Vec::new(),
                reference: reference_results(id)
                    .map(|r| r.to_vec())
                    .unwrap_or_default(),
                duration_seconds: t0.elapsed().as_secs_f64(),
            }),
        }
    }
    Ok(BenchAllReport {
        folds: args.folds,
        seed: args.seed,
        datasets,
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

fn bench_one(args: &BenchAllArgs, id: &str) -> CliResult<DatasetBenchmark> {
    let t0 = Instant::now();
    let ds = load_benchmark_dataset(&args.data_dir, id, None)?;
    let plan = stratified_kfold(&ds, args.folds, args.seed)?;
    let tune = grid_tune(
        &ds,
        &BENCH_K_GRID,
        &BENCH_R_GRID,
        &plan,
        SupportScope::Vector,
    )?;
    let knn_tune = knn_grid_tune(&ds, &BENCH_K_GRID, &plan)?;
    let mut measured = Vec::new();
    let configs = [
        (
            "pmm-knn",
            ClassifierConfig::PmmKnn(PmmKnnConfig::ones_chain(tune.best.k, tune.best.r)),
        ),
        ("gnb", ClassifierConfig::Gnb),
        ("knn", ClassifierConfig::Knn { k: knn_tune.best.k }),
    ];
    for (name, config) in configs {
        let cv = cross_validate(&ds, &config, &plan)?;
        measured.push(MetricTriple {
            classifier: name,
            accuracy: cv.pooled.accuracy,
            sensitivity: cv.pooled.macro_sensitivity,
            specificity: cv.pooled.macro_specificity,
        });
    }
    Ok(DatasetBenchmark {
        dataset: id.into(),
        variant: "standard".into(),
        error: None,
        tuned_k: tune.best.k,
        tuned_r: tune.best.r,
        knn_k: knn_tune.best.k,
        measured,
        reference: reference_results(id)
            .map(|r| r.to_vec())
            .unwrap_or_default(),
        duration_seconds: t0.elapsed().as_secs_f64(),
    })
}
