//! Plain-text rendering of results. Numbers carry four decimals.

use std::fmt::Write;

use crate::analysis::{ConsistencyReport, CorrelationReport, EfficiencyRanking, SensitivityRow};
use crate::entropy::{ClusterEntropy, MachineEntropy, PenaltyParams};

/// Left-aligned first column, right-aligned others.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.trim_end().to_string() + "\n"
    };
    let mut out = line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    let total: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

fn opt4(v: Option<f64>) -> String {
    v.map(f4).unwrap_or_else(|| "-".into())
}

pub fn machine_text(e: &MachineEntropy) -> String {
    let mut out = format!(
        "Machine: {}\nEntropy: {}\nArgmax edge: {}\n\n",
        e.machine,
        f4(e.value),
        e.argmax_edge
    );
    let rows: Vec<Vec<String>> = e
        .edge_values
        .iter()
        .map(|ev| {
            vec![
                ev.edge.first.to_string(),
                ev.edge.second.to_string(),
                f4(ev.compatibility),
                f4(ev.value),
            ]
        })
        .collect();
    out.push_str(&table(
        &["Component", "Component", "C", "Interaction"],
        &rows,
    ));
    out
}

pub fn cluster_text(e: &ClusterEntropy, params: &PenaltyParams) -> String {
    let mut out = format!(
        "Cluster: {}\nMachines: {}\nPenalty: {} * log_{}(1 + S)\nEntropy: {}\n\n",
        e.cluster,
        e.machine_count,
        params.coefficient,
        params.log_base,
        f4(e.value)
    );
    let rows: Vec<Vec<String>> = e
        .per_machine
        .iter()
        .map(|m| {
            vec![
                m.machine.clone(),
                m.count.to_string(),
                f4(m.entropy),
                f4(m.penalty),
                f4(m.contribution),
            ]
        })
        .collect();
    out.push_str(&table(
        &["Machine", "Count", "S", "P(S)", "Contribution"],
        &rows,
    ));
    out
}

pub fn correlation_text(report: &CorrelationReport) -> String {
    let mut out = format!(
        "Entropy vs benchmarks (source: {}, alpha = {})\n\n",
        report.source, report.alpha
    );
    let rows: Vec<Vec<String>> = report
        .results
        .iter()
        .map(|r| {
            vec![
                r.benchmark.clone(),
                r.n.to_string(),
                f4(r.r),
                opt4(r.t_statistic),
                f4(r.p_value),
                r.label.clone(),
            ]
        })
        .collect();
    out.push_str(&table(
        &["Benchmark", "n", "r", "t", "p-value", "Interpretation"],
        &rows,
    ));
    for s in &report.skipped {
        let _ = writeln!(out, "skipped {} (n = {}): {}", s.benchmark, s.n, s.reason);
    }
    out
}

pub fn consistency_text(report: &ConsistencyReport) -> String {
    let mut out = format!(
        "Published vs recomputed correlations (source: {}, published n = {})\n\n",
        report.source, report.paper_n
    );
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let flags: Vec<String> = r
                .flags
                .iter()
                .map(|f| {
                    serde_json::to_value(f)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default()
                })
                .collect();
            vec![
                r.benchmark.name().to_string(),
                f4(r.paper_r),
                opt4(r.computed_r),
                opt4(r.delta_r),
                f4(r.paper_p),
                f4(r.implied_paper_p),
                opt4(r.computed_p),
                opt4(r.delta_p),
                flags.join(","),
            ]
        })
        .collect();
    out.push_str(&table(
        &[
            "Benchmark",
            "paper r",
            "r",
            "|dr|",
            "paper p",
            "p(paper r)",
            "p",
            "|dp|",
            "Flags",
        ],
        &rows,
    ));
    out
}

pub fn efficiency_text(ranking: &EfficiencyRanking) -> String {
    let mut out = format!(
        "Entropy per {} ({}), lowest first\n\n",
        ranking.benchmark, ranking.unit
    );
    let rows: Vec<Vec<String>> = ranking
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.system.clone(),
                f4(r.entropy),
                f4(r.benchmark_value),
                f4(r.ratio),
            ]
        })
        .collect();
    out.push_str(&table(&["#", "System", "Entropy", "Value", "Ratio"], &rows));
    for e in &ranking.excluded {
        let _ = writeln!(out, "excluded {}: {}", e.system, e.reason);
    }
    out
}

pub fn sensitivity_text(rows: &[SensitivityRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format!("{}/{}", r.cell.0, r.cell.1),
                format!("{:+.4}", r.delta),
                f4(r.original_score),
                f4(r.perturbed_score) + if r.clamped { " (clamped)" } else { "" },
                f4(r.cluster_before),
                f4(r.cluster_after),
                format!("{:+.4}", r.cluster_delta),
            ]
        })
        .collect();
    table(
        &["Cell", "delta", "C", "C'", "S before", "S after", "dS"],
        &body,
    )
}
