//! CSV ingestion for the benchmark datasets.
//!
//! Each dataset is described by a plain key-value manifest that names the
//! CSV file(s), the label column, the label-to-class mapping and optional
//! variant transforms (class merging, seeded downsampling). Loaders never
//! touch the network; manifests record the canonical source URL so missing
//! files can be fetched by hand or with `scripts/fetch_data.py`.
//!
//! Example manifest:
//!
//! ```text
//! name = iris
//! file = iris.csv
//! has_header = true
//! delimiter = ,
//! label_column = species
//! labels = Iris-setosa:0, Iris-versicolor:1, Iris-virginica:2
//! source_url = https://archive.ics.uci.edu/ml/datasets/iris
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// A parsed delimited text file: header plus string cells, all trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column_index(&self, column: &ColumnRef) -> Result<usize> {
        match column {
            ColumnRef::Index(i) => {
                if *i < self.header.len() {
                    Ok(*i)
                } else {
                    Err(Error::Parameter(format!(
                        "column index {i} out of range for {} columns",
                        self.header.len()
                    )))
                }
            }
            ColumnRef::Name(name) => self
                .header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Parameter(format!("no column named {name:?}"))),
        }
    }
}

/// Reads a delimited file into a [`RawTable`]. Cells are whitespace-trimmed,
/// ragged rows are rejected with their line number, and a file without data
/// rows is a parse error. Without a header, columns are named `c0..c{n-1}`.
pub fn load_csv(path: &Path, has_header: bool, delimiter: u8) -> Result<RawTable> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, &e))?;
        let cells: Vec<String> = record.iter().map(|c| c.to_string()).collect();
        if i == 0 && has_header {
            header = Some(cells);
        } else {
            rows.push(cells);
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: if has_header { 2 } else { 1 },
            message: if header.is_some() {
                "file has a header but no data rows".into()
            } else {
                "file is empty".into()
            },
        });
    }
    let width = rows[0].len();
    let header = header.unwrap_or_else(|| (0..width).map(|i| format!("c{i}")).collect::<Vec<_>>());
    if header.len() != width {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: 2,
            message: format!(
                "header has {} columns but data rows have {width}",
                header.len()
            ),
        });
    }
    Ok(RawTable { header, rows })
}

fn csv_error(path: &Path, e: &csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or_default();
    Error::Parse {
        path: path.to_path_buf(),
        row,
        message: match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => {
                format!("expected {expected_len} columns, found {len}")
            }
            other => format!("{other:?}"),
        },
    }
}

/// A column referenced by name or positional index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    fn parse(text: &str) -> Self {
        match text.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(text.to_string()),
        }
    }
}

/// Which columns hold features.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FeatureColumns {
    /// Every column except the label column.
    #[default]
    AllButLabel,
    Names(Vec<String>),
    /// Half-open index range `start..end`.
    Range {
        start: usize,
        end: usize,
    },
}

/// Ordered mapping from raw label strings to class indices `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMapping {
    entries: Vec<(String, usize)>,
}

impl LabelMapping {
    pub fn new(entries: Vec<(String, usize)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Parameter("label mapping is empty".into()));
        }
        let m = entries.len();
        let mut seen = vec![false; m];
        for (value, index) in &entries {
            if *index >= m || seen[*index] {
                return Err(Error::Parameter(format!(
                    "label mapping must cover class indices 0..{m} exactly once (bad entry {value:?}:{index})"
                )));
            }
            seen[*index] = true;
        }
        Ok(Self { entries })
    }

    pub fn class_count(&self) -> usize {
        self.entries.len()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|(v, _)| v == value)
            .map(|(_, i)| *i)
    }

    /// Class names ordered by class index.
    pub fn class_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.entries.len()];
        for (value, index) in &self.entries {
            names[*index] = value.clone();
        }
        names
    }
}

/// Rewrites label strings before mapping: either a fixed set of raw values
/// or the wildcard catching everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelabelTarget {
    Values(Vec<String>),
    Wildcard,
}

/// A named transform of the standard table (Table-style outlier variants):
/// optional class merging followed by seeded per-class downsampling, with
/// its own label mapping when the class structure changes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariantSpec {
    pub relabel: Vec<(RelabelTarget, String)>,
    pub downsample: Vec<(String, usize)>,
    pub labels: Option<LabelMapping>,
    pub seed: u64,
    pub note: Option<String>,
}

/// Parsed dataset manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    /// Data files relative to the manifest's directory; multiple files are
    /// concatenated in order (e.g. pre-split train/test pairs).
    pub files: Vec<String>,
    pub has_header: bool,
    pub delimiter: u8,
    pub label_column: ColumnRef,
    pub feature_columns: FeatureColumns,
    pub labels: LabelMapping,
    pub source_url: Option<String>,
    pub note: Option<String>,
    pub variants: BTreeMap<String, VariantSpec>,
    base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn parse(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let fail = |message: String| Error::Manifest {
            path: path.to_path_buf(),
            message,
        };
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(format!("line {}: expected key = value", lineno + 1)))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let require = |key: &str| {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| fail(format!("missing required key {key:?}")))
        };
        let name = require("name")?;
        let files: Vec<String> = require("file")?
            .split(',')
            .map(|f| f.trim().to_string())
            .filter(|f| !f.is_empty())
            .collect();
        if files.is_empty() {
            return Err(fail("key \"file\" names no files".into()));
        }
        let has_header = match fields.get("has_header").map(String::as_str) {
            None | Some("true") => true,
            Some("false") => false,
            Some(other) => {
                return Err(fail(format!(
                    "has_header must be true or false, got {other:?}"
                )))
            }
        };
        let delimiter = match fields.get("delimiter").map(String::as_str) {
            None | Some(",") | Some("comma") => b',',
            Some("tab") | Some("\\t") => b'\t',
            Some(";") => b';',
            Some(" ") | Some("space") => b' ',
            Some(other) if other.len() == 1 => other.as_bytes()[0],
            Some(other) => return Err(fail(format!("unsupported delimiter {other:?}"))),
        };
        let label_column = ColumnRef::parse(&require("label_column")?);
        let feature_columns = match fields.get("feature_columns") {
            None => FeatureColumns::AllButLabel,
            Some(spec) => parse_feature_columns(spec).map_err(&fail)?,
        };
        let labels = parse_label_mapping(&require("labels")?).map_err(&fail)?;
        let mut variants: BTreeMap<String, VariantSpec> = BTreeMap::new();
        for (key, value) in &fields {
            let Some(rest) = key.strip_prefix("variant.") else {
                continue;
            };
            let (id, field) = rest.split_once('.').ok_or_else(|| {
                fail(format!(
                    "variant key {key:?} needs the form variant.<id>.<field>"
                ))
            })?;
            let spec = variants.entry(id.to_string()).or_default();
            match field {
                "relabel" => spec.relabel = parse_relabel(value).map_err(&fail)?,
                "downsample" => spec.downsample = parse_downsample(value).map_err(&fail)?,
                "labels" => spec.labels = Some(parse_label_mapping(value).map_err(&fail)?),
                "seed" => {
                    spec.seed = value
                        .parse()
                        .map_err(|_| fail(format!("variant seed {value:?} is not an integer")))?
                }
                "note" => spec.note = Some(value.clone()),
                other => return Err(fail(format!("unknown variant field {other:?}"))),
            }
        }
        Ok(Self {
            name,
            files,
            has_header,
            delimiter,
            label_column,
            feature_columns,
            labels,
            source_url: fields.get("source_url").cloned(),
            note: fields.get("note").cloned(),
            variants,
            base_dir: path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .to_path_buf(),
        })
    }

    pub fn data_paths(&self) -> Vec<PathBuf> {
        self.files.iter().map(|f| self.base_dir.join(f)).collect()
    }

    /// Loads all data files and concatenates their rows. Files must agree on
    /// the header.
    pub fn read_table(&self) -> Result<RawTable> {
        let mut merged: Option<RawTable> = None;
        for path in self.data_paths() {
            let table = load_csv(&path, self.has_header, self.delimiter)?;
            match &mut merged {
                None => merged = Some(table),
                Some(m) => {
                    if m.header != table.header {
                        return Err(Error::Parse {
                            path,
                            row: 1,
                            message: "header differs from the first data file".into(),
                        });
                    }
                    m.rows.extend(table.rows);
                }
            }
        }
        Ok(merged.expect("at least one file"))
    }

    /// Loads the standard form of the dataset.
    pub fn load(&self) -> Result<Dataset> {
        self.load_variant(None)
    }

    /// Loads the named variant; `None` or `"standard"` is the base form.
    pub fn load_variant(&self, variant: Option<&str>) -> Result<Dataset> {
        let table = self.read_table()?;
        let parsed = parse_features(&table, self)?;
        match variant {
            None | Some("standard") => finish_dataset(parsed, &self.labels),
            Some(id) => {
                let spec = self.variants.get(id).ok_or_else(|| {
                    Error::Parameter(format!(
                        "dataset {:?} has no variant {id:?} (available: standard{})",
                        self.name,
                        self.variants.keys().fold(String::new(), |mut acc, k| {
                            let _ = write!(acc, ", {k}");
                            acc
                        })
                    ))
                })?;
                let transformed = apply_variant(parsed, spec)?;
                finish_dataset(transformed, spec.labels.as_ref().unwrap_or(&self.labels))
            }
        }
    }
}

fn parse_feature_columns(spec: &str) -> std::result::Result<FeatureColumns, String> {
    if let Some((start, end)) = spec.split_once("..") {
        let start: usize = start
            .trim()
            .parse()
            .map_err(|_| format!("bad range start in {spec:?}"))?;
        let end: usize = end
            .trim()
            .parse()
            .map_err(|_| format!("bad range end in {spec:?}"))?;
        if start >= end {
            return Err(format!("empty feature range {spec:?}"));
        }
        return Ok(FeatureColumns::Range { start, end });
    }
    let names: Vec<String> = spec
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(format!("feature_columns {spec:?} names no columns"));
    }
    Ok(FeatureColumns::Names(names))
}

fn parse_label_mapping(spec: &str) -> std::result::Result<LabelMapping, String> {
    let mut entries = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (value, index) = part
            .rsplit_once(':')
            .ok_or_else(|| format!("label entry {part:?} needs the form value:index"))?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| format!("label index in {part:?} is not an integer"))?;
        entries.push((value.trim().to_string(), index));
    }
    LabelMapping::new(entries).map_err(|e| e.to_string())
}

fn parse_relabel(spec: &str) -> std::result::Result<Vec<(RelabelTarget, String)>, String> {
    let mut rules = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (targets, new_label) = part
            .rsplit_once(':')
            .ok_or_else(|| format!("relabel rule {part:?} needs the form values:new_label"))?;
        let targets = targets.trim();
        let target = if targets == "*" {
            RelabelTarget::Wildcard
        } else {
            RelabelTarget::Values(
                targets
                    .split(',')
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect(),
            )
        };
        rules.push((target, new_label.trim().to_string()));
    }
    if rules.is_empty() {
        return Err(format!("relabel spec {spec:?} contains no rules"));
    }
    Ok(rules)
}

fn parse_downsample(spec: &str) -> std::result::Result<Vec<(String, usize)>, String> {
    let mut rules = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (label, count) = part
            .rsplit_once(':')
            .ok_or_else(|| format!("downsample rule {part:?} needs the form label:count"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("downsample count in {part:?} is not an integer"))?;
        rules.push((label.trim().to_string(), count));
    }
    if rules.is_empty() {
        return Err(format!("downsample spec {spec:?} contains no rules"));
    }
    Ok(rules)
}

/// Numeric feature rows plus raw label strings, upstream of any label
/// mapping or variant transform.
#[derive(Debug, Clone)]
struct ParsedRows {
    features: Vec<Vec<f64>>,
    labels: Vec<String>,
}

fn parse_features(table: &RawTable, manifest: &DatasetManifest) -> Result<ParsedRows> {
    let label_idx = table.column_index(&manifest.label_column)?;
    let feature_idx: Vec<usize> = match &manifest.feature_columns {
        FeatureColumns::AllButLabel => (0..table.header.len())
            .filter(|&i| i != label_idx)
            .collect(),
        FeatureColumns::Names(names) => names
            .iter()
            .map(|n| table.column_index(&ColumnRef::Name(n.clone())))
            .collect::<Result<Vec<_>>>()?,
        FeatureColumns::Range { start, end } => {
            if *end > table.header.len() {
                return Err(Error::Parameter(format!(
                    "feature range {start}..{end} exceeds {} columns",
                    table.header.len()
                )));
            }
            (*start..*end).collect()
        }
    };
    if feature_idx.contains(&label_idx) {
        return Err(Error::Parameter(format!(
            "label column {:?} overlaps the feature columns",
            table.header[label_idx]
        )));
    }
    if feature_idx.is_empty() {
        return Err(Error::Parameter("no feature columns selected".into()));
    }
    let mut features = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (row_no, row) in table.rows.iter().enumerate() {
        let mut values = Vec::with_capacity(feature_idx.len());
        for &col in &feature_idx {
            let cell = &row[col];
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                path: PathBuf::from("<table>"),
                row: row_no + 1,
                message: format!(
                    "cell {:?} in column {:?} is not a number",
                    cell, table.header[col]
                ),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: PathBuf::from("<table>"),
                    row: row_no + 1,
                    message: format!("non-finite value in column {:?}", table.header[col]),
                });
            }
            values.push(value);
        }
        features.push(values);
        labels.push(row[label_idx].clone());
    }
    Ok(ParsedRows { features, labels })
}

fn apply_variant(mut parsed: ParsedRows, spec: &VariantSpec) -> Result<ParsedRows> {
    if !spec.relabel.is_empty() {
        parsed.labels = parsed
            .labels
            .iter()
            .map(|label| {
                for (target, new_label) in &spec.relabel {
                    match target {
                        RelabelTarget::Values(values) if values.iter().any(|v| v == label) => {
                            return new_label.clone();
                        }
                        RelabelTarget::Wildcard => return new_label.clone(),
                        RelabelTarget::Values(_) => {}
                    }
                }
                label.clone()
            })
            .collect();
    }
    if spec.downsample.is_empty() {
        return Ok(parsed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut keep = vec![true; parsed.labels.len()];
    for (label, count) in &spec.downsample {
        let mut members: Vec<usize> = (0..parsed.labels.len())
            .filter(|&i| &parsed.labels[i] == label)
            .collect();
        if members.len() < *count {
            return Err(Error::Parameter(format!(
                "cannot downsample class {label:?} to {count}: only {} rows",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for &drop in &members[*count..] {
            keep[drop] = false;
        }
    }
    let features = parsed
        .features
        .into_iter()
        .zip(&keep)
        .filter_map(|(row, &k)| k.then_some(row))
        .collect();
    let labels = parsed
        .labels
        .into_iter()
        .zip(&keep)
        .filter_map(|(label, &k)| k.then_some(label))
        .collect();
    Ok(ParsedRows { features, labels })
}

fn finish_dataset(parsed: ParsedRows, mapping: &LabelMapping) -> Result<Dataset> {
    let mut labels = Vec::with_capacity(parsed.labels.len());
    for (row_no, value) in parsed.labels.iter().enumerate() {
        let index = mapping
            .index_of(value)
            .ok_or_else(|| Error::UnmappedLabel {
                value: value.clone(),
                row: row_no + 1,
            })?;
        labels.push(index);
    }
    Dataset::new(parsed.features, labels, mapping.class_names())
}

/// Converts a raw table using the manifest's standard label mapping.
pub fn to_dataset(table: &RawTable, manifest: &DatasetManifest) -> Result<Dataset> {
    let parsed = parse_features(table, manifest)?;
    finish_dataset(parsed, &manifest.labels)
}

/// Health report over a loaded dataset; informational, never an error.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub class_counts: Vec<usize>,
    pub empty_classes: Vec<usize>,
    /// Feature indices whose value never changes.
    pub constant_features: Vec<usize>,
    pub duplicate_rows: usize,
    pub non_finite_values: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.empty_classes.is_empty()
            && self.constant_features.is_empty()
            && self.duplicate_rows == 0
            && self.non_finite_values == 0
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &c in &self.empty_classes {
            out.push(format!("class {c} has no samples"));
        }
        for &f in &self.constant_features {
            out.push(format!("feature {f} is constant"));
        }
        if self.duplicate_rows > 0 {
            out.push(format!("{} duplicate feature rows", self.duplicate_rows));
        }
        if self.non_finite_values > 0 {
            out.push(format!("{} non-finite values", self.non_finite_values));
        }
        out
    }
}

pub fn validate_dataset(ds: &Dataset) -> ValidationReport {
    let class_counts = ds.class_counts();
    let empty_classes = class_counts
        .iter()
        .enumerate()
        .filter_map(|(c, &n)| (n == 0).then_some(c))
        .collect();
    let dim = ds.dimensionality();
    let mut constant_features = Vec::new();
    for j in 0..dim {
        let first = ds.features(0)[j];
        if (1..ds.len()).all(|i| ds.features(i)[j] == first) {
            constant_features.push(j);
        }
    }
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        let (ra, rb) = (ds.features(a), ds.features(b));
        ra.iter()
            .zip(rb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let duplicate_rows = order
        .windows(2)
        .filter(|w| ds.features(w[0]) == ds.features(w[1]))
        .count();
    let non_finite_values = (0..ds.len())
        .map(|i| ds.features(i).iter().filter(|v| !v.is_finite()).count())
        .sum();
    ValidationReport {
        class_counts,
        empty_classes,
        constant_features,
        duplicate_rows,
        non_finite_values,
    }
}

/// Writes a dataset back to headered CSV. Feature values use the shortest
/// representation that parses back to the identical bits.
pub fn write_dataset_csv(
    ds: &Dataset,
    feature_names: &[String],
    label_name: &str,
    path: &Path,
) -> Result<()> {
    if feature_names.len() != ds.dimensionality() {
        return Err(Error::DimensionMismatch {
            expected: ds.dimensionality(),
            found: feature_names.len(),
        });
    }
    let mut text = String::new();
    let _ = writeln!(text, "{},{label_name}", feature_names.join(","));
    for i in 0..ds.len() {
        for v in ds.features(i) {
            let _ = write!(text, "{v},");
        }
        let _ = writeln!(text, "{}", ds.class_names()[ds.label(i)]);
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One of the five benchmark datasets shipped with the project.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetEntry {
    pub id: &'static str,
    pub manifest_file: &'static str,
    /// Canonical upstream location of the data.
    pub source_url: &'static str,
}

pub const BENCHMARK_DATASETS: [DatasetEntry; 5] = [
    DatasetEntry {
        id: "iris",
        manifest_file: "iris.manifest",
        source_url: "https://archive.ics.uci.edu/ml/datasets/iris",
    },
    DatasetEntry {
        id: "wbc",
        manifest_file: "wbc.manifest",
        source_url: "https://archive.ics.uci.edu/ml/datasets/breast+cancer+wisconsin+(diagnostic)",
    },
    DatasetEntry {
        id: "digits",
        manifest_file: "digits.manifest",
        source_url:
            "https://archive.ics.uci.edu/ml/datasets/Optical+Recognition+of+Handwritten+Digits",
    },
    DatasetEntry {
        id: "satellite",
        manifest_file: "satellite.manifest",
        source_url: "https://archive.ics.uci.edu/ml/datasets/Statlog+(Landsat+Satellite)",
    },
    DatasetEntry {
        id: "eeg",
        manifest_file: "eeg.manifest",
        source_url: "https://archive.ics.uci.edu/ml/datasets/EEG+Eye+State",
    },
];

pub fn benchmark_entry(id: &str) -> Option<&'static DatasetEntry> {
    BENCHMARK_DATASETS.iter().find(|e| e.id == id)
}

/// Loads one of the five benchmark datasets from `data_dir`. Missing files
/// produce an error naming the expected path and the upstream URL.
pub fn load_benchmark_dataset(data_dir: &Path, id: &str, variant: Option<&str>) -> Result<Dataset> {
    let entry = benchmark_entry(id).ok_or_else(|| {
        Error::Parameter(format!(
            "unknown dataset id {id:?}; expected one of {}",
            BENCHMARK_DATASETS
                .iter()
                .map(|e| e.id)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;
    let manifest_path = data_dir.join(entry.manifest_file);
    let describe_missing = |path: &Path| Error::Manifest {
        path: path.to_path_buf(),
        message: format!(
            "file not found; fetch the {id} data from {} (scripts/fetch_data.py automates this)",
            entry.source_url
        ),
    };
    if !manifest_path.exists() {
        return Err(describe_missing(&manifest_path));
    }
    let manifest = DatasetManifest::parse(&manifest_path)?;
    for path in manifest.data_paths() {
        if !path.exists() {
            return Err(describe_missing(&path));
        }
    }
    manifest.load_variant(variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as IoWrite;

    fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    fn toy_manifest(dir: &Path) -> DatasetManifest {
        write_file(
            dir,
            "toy.csv",
            "a,b,kind\n1.0, 2.0 ,yes\n3.5,4.25,no\n0.125,9.0,yes\n",
        );
        let path = write_file(
            dir,
            "toy.manifest",
            "# toy dataset\n\
             name = toy\n\
             file = toy.csv\n\
             has_header = true\n\
             delimiter = ,\n\
             label_column = kind\n\
             labels = yes:0, no:1\n\
             source_url = https://example.invalid/toy\n\
             variant.downsampled.downsample = yes:1\n\
             variant.downsampled.seed = 7\n",
        );
        DatasetManifest::parse(&path).unwrap()
    }

    #[test]
    fn load_csv_basic() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(dir.path(), "t.csv", "x,y,z\n1,2,3\n4,5,6\n");
        let table = load_csv(&path, true, b',').unwrap();
        assert_eq!(table.header, vec!["x", "y", "z"]);
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[1], vec!["4", "5", "6"]);
    }

    #[test]
    fn load_csv_synthesizes_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(dir.path(), "t.csv", "1;2\n3;4\n");
        let table = load_csv(&path, false, b';').unwrap();
        assert_eq!(table.header, vec!["c0", "c1"]);
        assert_eq!(table.rows.len(), 2);
    }

    #[test]
    fn load_csv_rejects_empty_and_ragged() {
        let dir = tempfile::tempdir().unwrap();
        let empty = write_file(dir.path(), "empty.csv", "");
        assert!(matches!(
            load_csv(&empty, false, b','),
            Err(Error::Parse { .. })
        ));
        let ragged = write_file(dir.path(), "ragged.csv", "a,b\n1,2\n3\n");
        match load_csv(&ragged, true, b',') {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            load_csv(&missing, true, b','),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn manifest_loads_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = toy_manifest(dir.path());
        let ds = manifest.load().unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dimensionality(), 2);
        assert_eq!(ds.class_names(), &["yes".to_string(), "no".to_string()]);
        assert_eq!(ds.features(0), &[1.0, 2.0]);
        assert_eq!(ds.label(1), 1);
    }

    #[test]
    fn single_row_table_gives_one_sample() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "one.csv", "f,kind\n2.5,yes\n");
        let path = write_file(
            dir.path(),
            "one.manifest",
            "name = one\nfile = one.csv\nlabel_column = kind\nlabels = yes:0\n",
        );
        let ds = DatasetManifest::parse(&path).unwrap().load().unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.features(0), &[2.5]);
    }

    #[test]
    fn unparseable_cell_reports_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "bad.csv", "a,kind\n1.0,yes\noops,no\n");
        let path = write_file(
            dir.path(),
            "bad.manifest",
            "name = bad\nfile = bad.csv\nlabel_column = kind\nlabels = yes:0, no:1\n",
        );
        let manifest = DatasetManifest::parse(&path).unwrap();
        match manifest.load() {
            Err(Error::Parse { row, message, .. }) => {
                assert_eq!(row, 2);
                assert!(message.contains("oops"), "{message}");
                assert!(message.contains('a'), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unmapped_label_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "u.csv", "a,kind\n1.0,yes\n2.0,maybe\n");
        let path = write_file(
            dir.path(),
            "u.manifest",
            "name = u\nfile = u.csv\nlabel_column = kind\nlabels = yes:0\n",
        );
        let manifest = DatasetManifest::parse(&path).unwrap();
        match manifest.load() {
            Err(Error::UnmappedLabel { value, row }) => {
                assert_eq!(value, "maybe");
                assert_eq!(row, 2);
            }
            other => panic!("expected unmapped label, got {other:?}"),
        }
    }

    #[test]
    fn multiple_files_concatenate() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "p1.csv", "a,kind\n1,yes\n2,no\n");
        write_file(dir.path(), "p2.csv", "a,kind\n3,yes\n");
        let path = write_file(
            dir.path(),
            "p.manifest",
            "name = p\nfile = p1.csv, p2.csv\nlabel_column = kind\nlabels = yes:0, no:1\n",
        );
        let ds = DatasetManifest::parse(&path).unwrap().load().unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.features(2), &[3.0]);
    }

    #[test]
    fn downsample_variant_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = toy_manifest(dir.path());
        let a = manifest.load_variant(Some("downsampled")).unwrap();
        let b = manifest.load_variant(Some("downsampled")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2); // 2 yes rows downsampled to 1, plus 1 no row
        let counts = a.class_counts();
        assert_eq!(counts, vec![1, 1]);
        // standard form is untouched
        assert_eq!(manifest.load().unwrap().len(), 3);
        // unknown variant is an error
        assert!(matches!(
            manifest.load_variant(Some("bogus")),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn relabel_variant_merges_classes() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "m.csv",
            "a,kind\n1,1\n2,2\n3,3\n4,4\n5,5\n6,7\n",
        );
        let path = write_file(
            dir.path(),
            "m.manifest",
            "name = m\nfile = m.csv\nlabel_column = kind\n\
             labels = 1:0, 2:1, 3:2, 4:3, 5:4, 7:5\n\
             variant.outlier.relabel = 2,4,5:out; *:in\n\
             variant.outlier.labels = in:0, out:1\n",
        );
        let manifest = DatasetManifest::parse(&path).unwrap();
        let ds = manifest.load_variant(Some("outlier")).unwrap();
        assert_eq!(ds.class_names(), &["in".to_string(), "out".to_string()]);
        assert_eq!(ds.class_counts(), vec![3, 3]);
        assert_eq!(manifest.load().unwrap().class_count(), 6);
    }

    #[test]
    fn validation_report_flags_problems() {
        let ds = Dataset::new(
            vec![vec![1.0, 5.0], vec![1.0, 5.0], vec![1.0, 6.0]],
            vec![0, 0, 1],
            vec!["a".into(), "b".into(), "ghost".into()],
        )
        .unwrap();
        let report = validate_dataset(&ds);
        assert_eq!(report.class_counts, vec![2, 1, 0]);
        assert_eq!(report.empty_classes, vec![2]);
        assert_eq!(report.constant_features, vec![0]);
        assert_eq!(report.duplicate_rows, 1);
        assert_eq!(report.non_finite_values, 0);
        assert!(!report.is_clean());
        assert_eq!(report.warnings().len(), 3);
    }

    #[test]
    fn clean_dataset_validates_clean() {
        let ds = Dataset::new(
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(validate_dataset(&ds).is_clean());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let values = [
            0.1,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1.2345678901234567e300,
            -7.25,
            0.0,
        ];
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v, v * 3.0]).collect();
        let labels = vec![0, 1, 0, 1, 0, 1];
        let ds = Dataset::new(rows, labels, vec!["x".into(), "y".into()]).unwrap();
        let path = dir.path().join("rt.csv");
        let names = vec!["f0".to_string(), "f1".to_string()];
        write_dataset_csv(&ds, &names, "kind", &path).unwrap();
        let mpath = write_file(
            dir.path(),
            "rt.manifest",
            "name = rt\nfile = rt.csv\nlabel_column = kind\nlabels = x:0, y:1\n",
        );
        let back = DatasetManifest::parse(&mpath).unwrap().load().unwrap();
        assert_eq!(back.len(), ds.len());
        for i in 0..ds.len() {
            assert_eq!(back.label(i), ds.label(i));
            for (a, b) in ds.features(i).iter().zip(back.features(i)) {
                assert_eq!(a.to_bits(), b.to_bits(), "row {i}");
            }
        }
    }

    #[test]
    fn unknown_benchmark_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        match load_benchmark_dataset(dir.path(), "nope", None) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("iris"), "{msg}"),
            other => panic!("expected parameter error, got {other:?}"),
        }
    }

    #[test]
    fn missing_benchmark_file_names_path_and_url() {
        let dir = tempfile::tempdir().unwrap();
        match load_benchmark_dataset(dir.path(), "iris", None) {
            Err(Error::Manifest { path, message }) => {
                assert!(path.ends_with("iris.manifest"));
                assert!(message.contains("archive.ics.uci.edu"), "{message}");
            }
            other => panic!("expected manifest error, got {other:?}"),
        }
    }

    #[test]
    fn feature_column_selection() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "f.csv", "id,a,b,kind\n9,1,2,yes\n8,3,4,no\n");
        // by names
        let p = write_file(
            dir.path(),
            "f1.manifest",
            "name = f\nfile = f.csv\nlabel_column = kind\nfeature_columns = a,b\nlabels = yes:0, no:1\n",
        );
        let ds = DatasetManifest::parse(&p).unwrap().load().unwrap();
        assert_eq!(ds.dimensionality(), 2);
        assert_eq!(ds.features(0), &[1.0, 2.0]);
        // by range
        let p = write_file(
            dir.path(),
            "f2.manifest",
            "name = f\nfile = f.csv\nlabel_column = 3\nfeature_columns = 1..3\nlabels = yes:0, no:1\n",
        );
        let ds = DatasetManifest::parse(&p).unwrap().load().unwrap();
        assert_eq!(ds.features(1), &[3.0, 4.0]);
        // overlapping label column is rejected
        let p = write_file(
            dir.path(),
            "f3.manifest",
            "name = f\nfile = f.csv\nlabel_column = kind\nfeature_columns = b,kind\nlabels = yes:0, no:1\n",
        );
        assert!(DatasetManifest::parse(&p).unwrap().load().is_err());
    }

    #[test]
    fn label_mapping_must_be_contiguous() {
        assert!(LabelMapping::new(vec![("a".into(), 0), ("b".into(), 2)]).is_err());
        assert!(LabelMapping::new(vec![("a".into(), 0), ("b".into(), 0)]).is_err());
        let ok = LabelMapping::new(vec![("b".into(), 1), ("a".into(), 0)]).unwrap();
        assert_eq!(ok.class_names(), vec!["a".to_string(), "b".to_string()]);
    }
}
