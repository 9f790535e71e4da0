//! Bundled reference data and file ingestion.
//!
//! Three file formats are understood:
//!
//! * cluster specs (JSON), see [`parse_cluster_spec`];
//! * compatibility matrices (CSV with a header row and a label column, or
//!   JSON `{"manufacturers": [...], "scores": [[...]], "epsilon": 1e-9}`);
//! * benchmark tables (CSV with header
//!   `System,Entropy,LINPACK,STREAM,MLPerf,HPCG,HPCC,Graph500,HPCAI`, or JSON).
//!
//! The manufacturer `HPE/Cray` is written with its slash in every format;
//! CSV fields containing separators are quoted per RFC 4180. `HPE-Cray` is
//! accepted as an alias on input.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::entropy::{
    ClusterSpec, CompatibilityMatrix, ComponentKind, ComponentSpec, MachineGroup, MachineSpec,
    Manufacturer, DEFAULT_BASE_VALUE, DEFAULT_EPSILON,
};
use crate::error::{Error, Result};

/// The seven benchmarks of the reference table, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Benchmark {
    Linpack,
    Stream,
    MlPerf,
    Hpcg,
    Hpcc,
    Graph500,
    HpcAi,
}

impl Benchmark {
    pub const ALL: [Benchmark; 7] = [
        Benchmark::Linpack,
        Benchmark::Stream,
        Benchmark::MlPerf,
        Benchmark::Hpcg,
        Benchmark::Hpcc,
        Benchmark::Graph500,
        Benchmark::HpcAi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Linpack => "LINPACK",
            Benchmark::Stream => "STREAM",
            Benchmark::MlPerf => "MLPerf",
            Benchmark::Hpcg => "HPCG",
            Benchmark::Hpcc => "HPCC",
            Benchmark::Graph500 => "Graph500",
            Benchmark::HpcAi => "HPCAI",
        }
    }

    /// Unit string; informational only, nothing is converted.
    pub fn unit(self) -> &'static str {
        match self {
            Benchmark::Linpack => "EFlop/s",
            Benchmark::Stream => "TB/s",
            Benchmark::MlPerf => "EFlop/s",
            Benchmark::Hpcg => "PFlop/s",
            Benchmark::Hpcc => "GFlop/s",
            Benchmark::Graph500 => "GTEPS",
            Benchmark::HpcAi => "score",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .collect::<String>()
            .to_ascii_lowercase();
        let found = match key.as_str() {
            "linpack" | "hpl" => Benchmark::Linpack,
            "stream" => Benchmark::Stream,
            "mlperf" | "mlperfhpc" => Benchmark::MlPerf,
            "hpcg" => Benchmark::Hpcg,
            "hpcc" => Benchmark::Hpcc,
            "graph500" => Benchmark::Graph500,
            "hpcai" | "hplai" | "hplmxp" => Benchmark::HpcAi,
            _ => return Err(Error::UnknownBenchmark(s.trim().to_string())),
        };
        Ok(found)
    }
}

impl Serialize for Benchmark {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Benchmark {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// One system row: its given entropy and whichever benchmark results exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemRecord {
    pub name: String,
    pub entropy: f64,
    #[serde(default)]
    pub benchmarks: BTreeMap<Benchmark, f64>,
}

impl SystemRecord {
    pub fn value(&self, benchmark: Benchmark) -> Option<f64> {
        self.benchmarks.get(&benchmark).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkTable {
    pub records: Vec<SystemRecord>,
    pub source: String,
}

impl BenchmarkTable {
    pub fn new(records: Vec<SystemRecord>, source: impl Into<String>) -> Result<Self> {
        let table = BenchmarkTable {
            records,
            source: source.into(),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for rec in &self.records {
            if rec.name.trim().is_empty() {
                return Err(Error::Validation("system name must not be empty".into()));
            }
            if !seen.insert(rec.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate system name `{}`",
                    rec.name
                )));
            }
            if !(rec.entropy.is_finite() && rec.entropy >= 0.0) {
                return Err(Error::Validation(format!(
                    "system `{}`: entropy must be a nonnegative number, got {}",
                    rec.name, rec.entropy
                )));
            }
            for (b, v) in &rec.benchmarks {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::Validation(format!(
                        "system `{}`: {b} must be a nonnegative number, got {v}",
                        rec.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn record(&self, name: &str) -> Option<&SystemRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Benchmarks present for at least one system, in canonical order.
    pub fn benchmarks_present(&self) -> Vec<Benchmark> {
        Benchmark::ALL
            .into_iter()
            .filter(|b| self.records.iter().any(|r| r.benchmarks.contains_key(b)))
            .collect()
    }
}

const MATRIX_MANUFACTURERS: [&str; 6] = ["AMD", "Intel", "NVIDIA", "IBM", "Fujitsu", "HPE/Cray"];

#[rustfmt::skip]
const MATRIX_SCORES: [[f64; 6]; 6] = [
    [0.95, 0.82, 0.81, 0.79, 0.75, 0.90],
    [0.82, 0.88, 0.82, 0.78, 0.74, 0.85],
    [0.81, 0.82, 0.92, 0.79, 0.73, 0.87],
    [0.79, 0.78, 0.79, 0.85, 0.72, 0.80],
    [0.75, 0.74, 0.73, 0.72, 0.98, 0.76],
    [0.90, 0.85, 0.87, 0.80, 0.76, 0.95],
];

/// The heuristic 6×6 manufacturer compatibility matrix.
pub fn bundled_compatibility_matrix() -> CompatibilityMatrix {
    let manufacturers = MATRIX_MANUFACTURERS
        .iter()
        .map(|n| Manufacturer::new(n).expect("static name"))
        .collect();
    let scores = MATRIX_SCORES.iter().map(|row| row.to_vec()).collect();
    CompatibilityMatrix::new(manufacturers, scores, DEFAULT_EPSILON)
        .expect("bundled matrix is valid")
}

pub const BUNDLED_TOP10_SOURCE: &str = "bundled:top10";

// name, entropy, LINPACK, STREAM, MLPerf, HPCG, HPCC, Graph500, HPCAI
#[rustfmt::skip]
const TOP10: [(&str, [f64; 8]); 10] = [
    ("El Capitan", [4.2, 1.742, 45.2, 11.8, 2.79, 3.21, 8.9, 15.2]),
    ("Frontier",   [4.6, 1.206, 41.8, 9.95, 14.05, 3.86, 15.9, 12.8]),
    ("Aurora",     [5.1, 1.012, 38.5, 11.6, 5.60, 2.97, 12.1, 18.9]),
    ("Jupiter",    [4.8, 0.424, 28.3, 5.2, 3.2, 2.45, 6.8, 8.1]),
    ("Eagle",      [3.9, 0.561, 32.1, 7.8, 2.1, 2.89, 9.2, 11.7]),
    ("HPC6",       [4.7, 0.380, 26.8, 4.9, 2.8, 2.12, 5.9, 7.4]),
    ("Fugaku",     [8.9, 0.442, 44.2, 6.7, 16.0, 2.93, 4.8, 9.3]),
    ("Alps",       [5.2, 0.270, 22.4, 3.8, 2.4, 1.87, 4.2, 6.8]),
    ("LUMI",       [4.3, 0.380, 35.6, 5.1, 4.2, 2.56, 7.1, 8.9]),
    ("Leonardo",   [4.9, 0.304, 29.7, 4.3, 3.8, 2.31, 6.3, 7.6]),
];

/// Published entropy and benchmark values for the ten leading systems.
pub fn bundled_top10() -> BenchmarkTable {
    let records = TOP10
        .iter()
        .map(|(name, row)| SystemRecord {
            name: (*name).to_string(),
            entropy: row[0],
            benchmarks: Benchmark::ALL
                .into_iter()
                .zip(row[1..].iter().copied())
                .collect(),
        })
        .collect();
    BenchmarkTable::new(records, BUNDLED_TOP10_SOURCE).expect("bundled table is valid")
}

/// A correlation as printed in the published results table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedCorrelation {
    pub benchmark: Benchmark,
    pub r: f64,
    pub p_value: f64,
    pub label: &'static str,
}

/// Number of systems the published correlations were computed over.
pub const PUBLISHED_SAMPLE_SIZE: usize = 10;

/// The published correlation table, verbatim (including its out-of-range
/// STREAM p-value).
pub fn published_correlations() -> Vec<PublishedCorrelation> {
    const ROWS: [(Benchmark, f64, f64, &str); 7] = [
        (
            Benchmark::Linpack,
            -0.7832,
            0.0077,
            "Strong negative correlation",
        ),
        (
            Benchmark::Stream,
            -0.4521,
            10.1890,
            "Moderate negative, not significant",
        ),
        (
            Benchmark::MlPerf,
            -0.6234,
            0.0540,
            "Moderate negative correlation",
        ),
        (
            Benchmark::Hpcg,
            0.2145,
            0.5520,
            "Weak positive, not significant",
        ),
        (
            Benchmark::Hpcc,
            -0.5890,
            0.0730,
            "Moderate negative correlation",
        ),
        (
            Benchmark::Graph500,
            -0.3410,
            0.3350,
            "Weak negative, not significant",
        ),
        (
            Benchmark::HpcAi,
            -0.4890,
            0.1510,
            "Moderate negative, not significant",
        ),
    ];
    ROWS.iter()
        .map(|&(benchmark, r, p_value, label)| PublishedCorrelation {
            benchmark,
            r,
            p_value,
            label,
        })
        .collect()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn json_error(source_name: &str, e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    let line = (e.line() > 0).then_some(e.line() as u64);
    let message = e.to_string();
    match e.classify() {
        Category::Data => Error::Schema {
            source_name: source_name.into(),
            line,
            message,
        },
        Category::Syntax | Category::Eof | Category::Io => Error::Parse {
            source_name: source_name.into(),
            line,
            message,
        },
    }
}

// ---------------------------------------------------------------------------
// Cluster specs

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    kind: ComponentKind,
    manufacturer: Manufacturer,
    #[serde(default)]
    base_value: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMachine {
    name: String,
    components: Vec<RawComponent>,
}

fn default_count() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    #[serde(default = "default_count")]
    count: u64,
    machine: RawMachine,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    name: String,
    groups: Vec<RawGroup>,
}

impl RawMachine {
    fn into_spec(self, field: &str, source_name: &str) -> Result<MachineSpec> {
        let components = self
            .components
            .into_iter()
            .map(|c| ComponentSpec {
                kind: c.kind,
                manufacturer: c.manufacturer,
                base_value: c.base_value.unwrap_or(DEFAULT_BASE_VALUE),
            })
            .collect();
        let spec = MachineSpec {
            name: self.name,
            components,
        };
        spec.validate()
            .map_err(|e| Error::Validation(format!("{source_name}: {field}: {e}")))?;
        Ok(spec)
    }
}

/// Parses a cluster spec:
///
/// ```json
/// {"name": "c", "groups": [{"count": 4, "machine": {"name": "n",
///   "components": [{"kind": "CPU", "manufacturer": "AMD", "base_value": 10}]}}]}
/// ```
///
/// `count` defaults to 1 and `base_value` to 10. Unknown fields are rejected.
pub fn parse_cluster_spec(text: &str, source_name: &str) -> Result<ClusterSpec> {
    let raw: RawCluster = serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    let mut groups = Vec::with_capacity(raw.groups.len());
    for (i, g) in raw.groups.into_iter().enumerate() {
        if g.count == 0 {
            return Err(Error::Validation(format!(
                "{source_name}: groups[{i}].count must be at least 1"
            )));
        }
        let machine = g
            .machine
            .into_spec(&format!("groups[{i}].machine"), source_name)?;
        groups.push(MachineGroup {
            machine,
            count: g.count,
        });
    }
    if groups.is_empty() {
        return Err(Error::Validation(format!(
            "{source_name}: cluster `{}` has no machine groups",
            raw.name
        )));
    }
    ClusterSpec::new(raw.name, groups).map_err(|e| Error::Validation(format!("{source_name}: {e}")))
}

/// Parses a file holding either a bare machine (`{"name", "components"}`)
/// or a cluster spec. A cluster must contain exactly one group.
pub fn parse_machine_spec(text: &str, source_name: &str) -> Result<MachineSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    if value.get("groups").is_some() {
        let cluster = parse_cluster_spec(text, source_name)?;
        if cluster.groups.len() != 1 {
            return Err(Error::Validation(format!(
                "{source_name}: expected a single machine, found {} groups",
                cluster.groups.len()
            )));
        }
        return Ok(cluster
            .groups
            .into_iter()
            .next()
            .expect("one group")
            .machine);
    }
    let raw: RawMachine = serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    raw.into_spec("machine", source_name)
}

pub fn load_cluster_spec(path: impl AsRef<Path>) -> Result<ClusterSpec> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let source = path.display().to_string();
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| json_error(&source, e))?;
    if value.get("groups").is_some() {
        return parse_cluster_spec(&text, &source);
    }
    // a bare machine file is a cluster of one
    let machine = parse_machine_spec(&text, &source)?;
    Ok(ClusterSpec {
        name: machine.name.clone(),
        groups: vec![MachineGroup { machine, count: 1 }],
    })
}

pub fn load_machine_spec(path: impl AsRef<Path>) -> Result<MachineSpec> {
    let path = path.as_ref();
    parse_machine_spec(&read_file(path)?, &path.display().to_string())
}

#[derive(Serialize)]
struct OutComponent<'a> {
    kind: ComponentKind,
    manufacturer: &'a str,
    base_value: f64,
}

#[derive(Serialize)]
struct OutMachine<'a> {
    name: &'a str,
    components: Vec<OutComponent<'a>>,
}

#[derive(Serialize)]
struct OutGroup<'a> {
    count: u64,
    machine: OutMachine<'a>,
}

#[derive(Serialize)]
struct OutCluster<'a> {
    name: &'a str,
    groups: Vec<OutGroup<'a>>,
}

pub fn cluster_spec_to_json(cluster: &ClusterSpec) -> String {
    let out = OutCluster {
        name: &cluster.name,
        groups: cluster
            .groups
            .iter()
            .map(|g| OutGroup {
                count: g.count,
                machine: OutMachine {
                    name: &g.machine.name,
                    components: g
                        .machine
                        .components
                        .iter()
                        .map(|c| OutComponent {
                            kind: c.kind,
                            manufacturer: c.manufacturer.name(),
                            base_value: c.base_value,
                        })
                        .collect(),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("cluster serializes") + "\n"
}

pub fn save_cluster_spec(cluster: &ClusterSpec, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &cluster_spec_to_json(cluster))
}

// ---------------------------------------------------------------------------
// Compatibility matrices

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    manufacturers: Vec<Manufacturer>,
    scores: Vec<Vec<f64>>,
    #[serde(default)]
    epsilon: Option<f64>,
}

#[derive(Serialize)]
struct OutMatrix<'a> {
    manufacturers: Vec<&'a str>,
    scores: &'a [Vec<f64>],
    epsilon: f64,
}

pub fn parse_matrix_json(text: &str, source_name: &str) -> Result<CompatibilityMatrix> {
    let raw: RawMatrix = serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    CompatibilityMatrix::new(
        raw.manufacturers,
        raw.scores,
        raw.epsilon.unwrap_or(DEFAULT_EPSILON),
    )
}

fn csv_error(source_name: &str, e: csv::Error) -> Error {
    Error::Parse {
        source_name: source_name.into(),
        line: e.position().map(|p| p.line()),
        message: e.to_string(),
    }
}

fn parse_number(cell: &str, source_name: &str, line: u64, what: &str) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| Error::Parse {
        source_name: source_name.into(),
        line: Some(line),
        message: format!("{what}: `{}` is not a number", cell.trim()),
    })
}

/// Parses a matrix CSV: the first row lists manufacturers (after a corner
/// cell), every following row starts with a manufacturer name. Rows may
/// appear in any order but must cover exactly the header's manufacturers.
pub fn parse_matrix_csv(text: &str, source_name: &str) -> Result<CompatibilityMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(source_name, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, rec));
    }
    let Some((_, header)) = rows.first() else {
        return Err(Error::Parse {
            source_name: source_name.into(),
            line: None,
            message: "empty matrix file".into(),
        });
    };
    let manufacturers = header
        .iter()
        .skip(1)
        .map(Manufacturer::new)
        .collect::<Result<Vec<_>>>()?;
    let n = manufacturers.len();
    if rows.len() - 1 != n {
        return Err(Error::Schema {
            source_name: source_name.into(),
            line: None,
            message: format!(
                "expected {n} data rows to match the header, found {}",
                rows.len() - 1
            ),
        });
    }

    let mut scores: Vec<Option<Vec<f64>>> = vec![None; n];
    for (line, rec) in &rows[1..] {
        let label = Manufacturer::new(rec.get(0).unwrap_or_default())?;
        let idx = manufacturers
            .iter()
            .position(|m| *m == label)
            .ok_or_else(|| Error::Schema {
                source_name: source_name.into(),
                line: Some(*line),
                message: format!("row label `{label}` is not in the header"),
            })?;
        if scores[idx].is_some() {
            return Err(Error::Schema {
                source_name: source_name.into(),
                line: Some(*line),
                message: format!("row `{label}` appears twice"),
            });
        }
        let values = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, cell)| {
                parse_number(
                    cell,
                    source_name,
                    *line,
                    &format!("C({label},{})", manufacturers[j]),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        scores[idx] = Some(values);
    }
    let scores = scores
        .into_iter()
        .map(|r| r.expect("all rows filled"))
        .collect();
    CompatibilityMatrix::new(manufacturers, scores, DEFAULT_EPSILON)
}

pub fn matrix_to_csv(matrix: &CompatibilityMatrix) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["Manufacturer".to_string()];
    header.extend(matrix.manufacturers().iter().map(|m| m.name().to_string()));
    writer.write_record(&header).expect("in-memory write");
    for (m, row) in matrix.manufacturers().iter().zip(matrix.scores()) {
        let mut rec = vec![m.name().to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        writer.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

pub fn matrix_to_json(matrix: &CompatibilityMatrix) -> String {
    let out = OutMatrix {
        manufacturers: matrix.manufacturers().iter().map(|m| m.name()).collect(),
        scores: matrix.scores(),
        epsilon: matrix.epsilon(),
    };
    serde_json::to_string_pretty(&out).expect("matrix serializes") + "\n"
}

/// Loads a matrix; `.json` files are read as JSON, anything else as CSV.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<CompatibilityMatrix> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let source = path.display().to_string();
    if is_json(path) {
        parse_matrix_json(&text, &source)
    } else {
        parse_matrix_csv(&text, &source)
    }
}

pub fn save_matrix(matrix: &CompatibilityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = if is_json(path) {
        matrix_to_json(matrix)
    } else {
        matrix_to_csv(matrix)
    };
    write_file(path, &text)
}

// ---------------------------------------------------------------------------
// Benchmark tables

#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    System,
    Entropy,
    Bench(Benchmark),
}

/// Parses a benchmark CSV. `System` and `Entropy` columns are required,
/// benchmark columns are optional and blank cells mean "not measured".
pub fn parse_benchmarks_csv(text: &str, source_name: &str) -> Result<BenchmarkTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| csv_error(source_name, e))?
        .clone();

    let schema = |message: String| Error::Schema {
        source_name: source_name.into(),
        line: Some(1),
        message,
    };
    let mut columns = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        let col = if h.eq_ignore_ascii_case("system") || h.eq_ignore_ascii_case("name") {
            Column::System
        } else if h.eq_ignore_ascii_case("entropy") {
            Column::Entropy
        } else {
            Column::Bench(
                h.parse()
                    .map_err(|_| schema(format!("unknown column `{h}`")))?,
            )
        };
        if columns.contains(&col) {
            return Err(schema(format!("duplicate column `{h}`")));
        }
        columns.push(col);
    }
    for required in [Column::System, Column::Entropy] {
        if !columns.contains(&required) {
            let name = if required == Column::System {
                "System"
            } else {
                "Entropy"
            };
            return Err(schema(format!("missing required column `{name}`")));
        }
    }

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(source_name, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let mut name = String::new();
        let mut entropy = None;
        let mut benchmarks = BTreeMap::new();
        for (col, cell) in columns.iter().zip(rec.iter()) {
            match col {
                Column::System => name = cell.to_string(),
                Column::Entropy if !cell.is_empty() => {
                    entropy = Some(parse_number(cell, source_name, line, "Entropy")?)
                }
                Column::Bench(b) if !cell.is_empty() => {
                    benchmarks.insert(*b, parse_number(cell, source_name, line, b.name())?);
                }
                _ => {}
            }
        }
        let entropy = entropy.ok_or_else(|| Error::Schema {
            source_name: source_name.into(),
            line: Some(line),
            message: format!("system `{name}` has no entropy value"),
        })?;
        records.push(SystemRecord {
            name,
            entropy,
            benchmarks,
        });
    }
    BenchmarkTable::new(records, source_name)
        .map_err(|e| Error::Validation(format!("{source_name}: {e}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBenchmarkTable {
    #[serde(default)]
    #[allow(dead_code)]
    source: Option<String>,
    records: Vec<SystemRecord>,
}

/// JSON form: `{"records": [{"name": .., "entropy": .., "benchmarks": {"LINPACK": ..}}]}`.
pub fn parse_benchmarks_json(text: &str, source_name: &str) -> Result<BenchmarkTable> {
    let raw: RawBenchmarkTable =
        serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    BenchmarkTable::new(raw.records, source_name)
        .map_err(|e| Error::Validation(format!("{source_name}: {e}")))
}

pub fn benchmarks_to_csv(table: &BenchmarkTable) -> String {
    let present = table.benchmarks_present();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["System".to_string(), "Entropy".to_string()];
    header.extend(present.iter().map(|b| b.name().to_string()));
    writer.write_record(&header).expect("in-memory write");
    for rec in &table.records {
        let mut row = vec![rec.name.clone(), rec.entropy.to_string()];
        row.extend(
            present
                .iter()
                .map(|b| rec.value(*b).map(|v| v.to_string()).unwrap_or_default()),
        );
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

pub fn benchmarks_to_json(table: &BenchmarkTable) -> String {
    serde_json::to_string_pretty(table).expect("table serializes") + "\n"
}

/// Loads a benchmark table; `.json` files are read as JSON, anything else
/// as CSV.
pub fn load_benchmarks(path: impl AsRef<Path>) -> Result<BenchmarkTable> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let source = path.display().to_string();
    if is_json(path) {
        parse_benchmarks_json(&text, &source)
    } else {
        parse_benchmarks_csv(&text, &source)
    }
}

pub fn save_benchmarks(table: &BenchmarkTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = if is_json(path) {
        benchmarks_to_json(table)
    } else {
        benchmarks_to_csv(table)
    };
    write_file(path, &text)
}
