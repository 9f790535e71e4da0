//! Correlation runs, the published-vs-recomputed audit, efficiency ratios
//! and matrix sensitivity sweeps.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dataset::{published_correlations, Benchmark, BenchmarkTable, PUBLISHED_SAMPLE_SIZE};
use crate::entropy::{
    build_component_graph, cluster_entropy, ClusterEntropy, ClusterSpec, CompatibilityMatrix,
    Manufacturer, PenaltyParams,
};
use crate::error::{Error, Result};
use crate::stats::{correlate, interpret, p_value_two_sided, CorrelationResult, SampleSeries};

/// Largest gap tolerated between a published p-value and the p-value its
/// published r implies at the published sample size.
pub const PUBLISHED_P_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedBenchmark {
    pub benchmark: Benchmark,
    pub n: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub source: String,
    pub alpha: f64,
    pub results: Vec<CorrelationResult>,
    pub n_per_benchmark: BTreeMap<Benchmark, usize>,
    pub skipped: Vec<SkippedBenchmark>,
}

impl CorrelationReport {
    pub fn result(&self, benchmark: Benchmark) -> Option<&CorrelationResult> {
        self.results
            .iter()
            .find(|r| r.benchmark == benchmark.name())
    }
}

/// Entropy and benchmark columns restricted to the systems that report the
/// benchmark.
pub fn paired_columns(
    table: &BenchmarkTable,
    benchmark: Benchmark,
) -> (SampleSeries, SampleSeries) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .records
        .iter()
        .filter_map(|r| r.value(benchmark).map(|v| (r.entropy, v)))
        .unzip();
    (
        SampleSeries::new("Entropy", xs),
        SampleSeries::new(benchmark.name(), ys),
    )
}

/// Correlates the entropy column against every benchmark, in canonical
/// benchmark order. Benchmarks that cannot be correlated are listed under
/// `skipped` with the reason.
pub fn correlate_all(table: &BenchmarkTable, alpha: f64) -> CorrelationReport {
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    let mut n_per_benchmark = BTreeMap::new();

    for benchmark in Benchmark::ALL {
        let (x, y) = paired_columns(table, benchmark);
        let n = x.len();
        n_per_benchmark.insert(benchmark, n);
        match correlate(&x, &y, alpha) {
            Ok(res) => results.push(res),
            Err(e) => skipped.push(SkippedBenchmark {
                benchmark,
                n,
                reason: e.to_string(),
            }),
        }
    }

    CorrelationReport {
        source: table.source.clone(),
        alpha,
        results,
        n_per_benchmark,
        skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConsistencyFlag {
    /// Published p-value lies outside `[0, 1]`.
    InvalidPaperP,
    /// Published p-value disagrees with the p implied by the published r.
    PaperPInconsistentWithR,
    /// Published label differs from the label the strict significance rule
    /// gives for the published (r, p).
    LabelNormalized,
    /// Recomputed r has the opposite sign of the published r.
    SignMismatch,
    /// The benchmark could not be recomputed from the table.
    NotComputed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub benchmark: Benchmark,
    pub paper_r: f64,
    pub computed_r: Option<f64>,
    /// `|computed_r - paper_r|`
    pub delta_r: Option<f64>,
    pub paper_p: f64,
    /// p-value implied by `paper_r` at the published sample size.
    pub implied_paper_p: f64,
    pub computed_p: Option<f64>,
    /// `|computed_p - paper_p|`
    pub delta_p: Option<f64>,
    pub paper_label: String,
    pub normalized_paper_label: String,
    pub computed_label: Option<String>,
    pub computed_n: usize,
    pub flags: Vec<ConsistencyFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub source: String,
    pub alpha: f64,
    pub paper_n: usize,
    pub rows: Vec<ConsistencyRow>,
}

/// Recomputes every correlation from `table` and sets it beside the
/// published values. Neither side is corrected.
pub fn consistency_check(table: &BenchmarkTable, alpha: f64) -> ConsistencyReport {
    let computed = correlate_all(table, alpha);
    let rows = published_correlations()
        .into_iter()
        .map(|published| {
            let ours = computed.result(published.benchmark);
            let implied_paper_p = p_value_two_sided(published.r, PUBLISHED_SAMPLE_SIZE)
                .expect("published r is within [-1, 1]");
            let normalized_paper_label = interpret(published.r, published.p_value, alpha);

            let mut flags = Vec::new();
            if !(0.0..=1.0).contains(&published.p_value) {
                flags.push(ConsistencyFlag::InvalidPaperP);
            }
            if (published.p_value - implied_paper_p).abs() > PUBLISHED_P_TOLERANCE {
                flags.push(ConsistencyFlag::PaperPInconsistentWithR);
            }
            if normalized_paper_label != published.label {
                flags.push(ConsistencyFlag::LabelNormalized);
            }
            match ours {
                None => flags.push(ConsistencyFlag::NotComputed),
                Some(c) if c.r * published.r < 0.0 => flags.push(ConsistencyFlag::SignMismatch),
                Some(_) => {}
            }

            ConsistencyRow {
                benchmark: published.benchmark,
                paper_r: published.r,
                computed_r: ours.map(|c| c.r),
                delta_r: ours.map(|c| (c.r - published.r).abs()),
                paper_p: published.p_value,
                implied_paper_p,
                computed_p: ours.map(|c| c.p_value),
                delta_p: ours.map(|c| (c.p_value - published.p_value).abs()),
                paper_label: published.label.to_string(),
                normalized_paper_label,
                computed_label: ours.map(|c| c.label.clone()),
                computed_n: computed.n_per_benchmark[&published.benchmark],
                flags,
            }
        })
        .collect();

    ConsistencyReport {
        source: table.source.clone(),
        alpha,
        paper_n: PUBLISHED_SAMPLE_SIZE,
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRow {
    pub system: String,
    pub entropy: f64,
    pub benchmark_value: f64,
    /// `entropy / benchmark_value`; lower is better.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedSystem {
    pub system: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRanking {
    pub benchmark: Benchmark,
    pub unit: String,
    pub rows: Vec<EfficiencyRow>,
    pub excluded: Vec<ExcludedSystem>,
}

/// Ranks systems by entropy per unit of benchmark performance, most
/// efficient (lowest ratio) first. Ties keep table order.
pub fn efficiency_ranking(
    table: &BenchmarkTable,
    benchmark: Benchmark,
) -> Result<EfficiencyRanking> {
    if table.records.iter().all(|r| r.value(benchmark).is_none()) {
        return Err(Error::UnknownBenchmark(benchmark.name().to_string()));
    }
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for rec in &table.records {
        match rec.value(benchmark) {
            None => excluded.push(ExcludedSystem {
                system: rec.name.clone(),
                reason: format!("no {benchmark} value"),
            }),
            Some(v) if v <= 0.0 => excluded.push(ExcludedSystem {
                system: rec.name.clone(),
                reason: format!("{benchmark} value is {v}; ratio undefined"),
            }),
            Some(v) => rows.push(EfficiencyRow {
                system: rec.name.clone(),
                entropy: rec.entropy,
                benchmark_value: v,
                ratio: rec.entropy / v,
            }),
        }
    }
    rows.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    Ok(EfficiencyRanking {
        benchmark,
        unit: benchmark.unit().to_string(),
        rows,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineDelta {
    pub machine: String,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub cell: (String, String),
    /// Requested signed perturbation.
    pub delta: f64,
    pub original_score: f64,
    pub perturbed_score: f64,
    /// The perturbed score hit 0 or 1.
    pub clamped: bool,
    pub machine_deltas: Vec<MachineDelta>,
    pub cluster_before: f64,
    pub cluster_after: f64,
    pub cluster_delta: f64,
}

/// Recomputes the cluster entropy with `C(a, b)` shifted by `delta`
/// (clamped to `[0, 1]`).
pub fn perturb_cell(
    cluster: &ClusterSpec,
    matrix: &CompatibilityMatrix,
    a: &Manufacturer,
    b: &Manufacturer,
    delta: f64,
    params: &PenaltyParams,
) -> Result<SensitivityRow> {
    let baseline = cluster_entropy(cluster, matrix, params)?;
    perturb_from_baseline(cluster, matrix, &baseline, a, b, delta, params)
}

fn perturb_from_baseline(
    cluster: &ClusterSpec,
    matrix: &CompatibilityMatrix,
    baseline: &ClusterEntropy,
    a: &Manufacturer,
    b: &Manufacturer,
    delta: f64,
    params: &PenaltyParams,
) -> Result<SensitivityRow> {
    let original_score = matrix.score(a, b)?;
    let shifted = original_score + delta;
    let perturbed_score = shifted.clamp(0.0, 1.0);
    let perturbed = matrix.with_score(a, b, perturbed_score)?;
    let after = cluster_entropy(cluster, &perturbed, params)?;

    let machine_deltas = baseline
        .per_machine
        .iter()
        .zip(&after.per_machine)
        .map(|(before, after)| MachineDelta {
            machine: before.machine.clone(),
            before: before.entropy,
            after: after.entropy,
            delta: after.entropy - before.entropy,
        })
        .collect();

    let ia = matrix.index_of(a)?;
    let ib = matrix.index_of(b)?;
    let (first, second) = if ia <= ib { (ia, ib) } else { (ib, ia) };
    let names = matrix.manufacturers();

    Ok(SensitivityRow {
        cell: (
            names[first].name().to_string(),
            names[second].name().to_string(),
        ),
        delta,
        original_score,
        perturbed_score,
        clamped: perturbed_score != shifted,
        machine_deltas,
        cluster_before: baseline.value,
        cluster_after: after.value,
        cluster_delta: after.value - baseline.value,
    })
}

/// Matrix cells (as index pairs `i <= j`) that some edge of the cluster
/// reads, in matrix order.
pub fn cells_used(
    cluster: &ClusterSpec,
    matrix: &CompatibilityMatrix,
) -> Result<Vec<(usize, usize)>> {
    let mut cells = BTreeSet::new();
    for group in &cluster.groups {
        for edge in build_component_graph(&group.machine)? {
            let i = matrix.index_of(&edge.first.manufacturer)?;
            let j = matrix.index_of(&edge.second.manufacturer)?;
            cells.insert((i.min(j), i.max(j)));
        }
    }
    Ok(cells.into_iter().collect())
}

/// Shifts every matrix cell the cluster uses by `-delta` and `+delta` in
/// turn. Rows are sorted by decreasing `|cluster_delta|`.
pub fn sensitivity_sweep(
    cluster: &ClusterSpec,
    matrix: &CompatibilityMatrix,
    delta: f64,
    params: &PenaltyParams,
) -> Result<Vec<SensitivityRow>> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Validation(format!(
            "perturbation must lie in (0, 1), got {delta}"
        )));
    }
    let baseline = cluster_entropy(cluster, matrix, params)?;
    let names = matrix.manufacturers();
    let mut rows = Vec::new();
    for (i, j) in cells_used(cluster, matrix)? {
        for signed in [-delta, delta] {
            rows.push(perturb_from_baseline(
                cluster, matrix, &baseline, &names[i], &names[j], signed, params,
            )?);
        }
    }
    rows.sort_by(|a, b| b.cluster_delta.abs().total_cmp(&a.cluster_delta.abs()));
    Ok(rows)
}
