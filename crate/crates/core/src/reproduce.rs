//! Writes the full correlation/audit/efficiency/plot bundle for a benchmark
//! table into a directory. Output bytes depend only on the input table.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{consistency_check, correlate_all, efficiency_ranking, EfficiencyRanking};
use crate::dataset::BenchmarkTable;
use crate::error::{Error, Result};
use crate::plot::render_scatter_svg;
use crate::report::{consistency_text, correlation_text, efficiency_text};

pub const CORRELATION_FILE: &str = "correlation.json";
pub const CONSISTENCY_FILE: &str = "consistency.json";
pub const EFFICIENCY_FILE: &str = "efficiency.json";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const PLOT_DIR: &str = "plots";

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub out_dir: PathBuf,
    /// Paths relative to `out_dir`, in write order.
    pub files: Vec<String>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn write(dir: &Path, rel: &str, contents: &str, files: &mut Vec<String>) -> Result<()> {
    let path = dir.join(rel);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    files.push(rel.to_string());
    Ok(())
}

pub fn plot_file_name(benchmark: crate::dataset::Benchmark) -> String {
    format!(
        "{PLOT_DIR}/entropy_vs_{}.svg",
        benchmark.name().to_ascii_lowercase()
    )
}

pub fn write_bundle(out_dir: &Path, table: &BenchmarkTable, alpha: f64) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir.join(PLOT_DIR)).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();

    let correlation = correlate_all(table, alpha);
    let consistency = consistency_check(table, alpha);
    let efficiency: Vec<EfficiencyRanking> = table
        .benchmarks_present()
        .into_iter()
        .map(|b| efficiency_ranking(table, b))
        .collect::<Result<_>>()?;

    write(
        out_dir,
        CORRELATION_FILE,
        &to_json(&correlation),
        &mut files,
    )?;
    write(
        out_dir,
        CONSISTENCY_FILE,
        &to_json(&consistency),
        &mut files,
    )?;
    write(out_dir, EFFICIENCY_FILE, &to_json(&efficiency), &mut files)?;

    let mut summary = correlation_text(&correlation);
    summary.push('\n');
    summary.push_str(&consistency_text(&consistency));
    for ranking in &efficiency {
        summary.push('\n');
        summary.push_str(&efficiency_text(ranking));
    }
    write(out_dir, SUMMARY_FILE, &summary, &mut files)?;

    for b in table.benchmarks_present() {
        write(
            out_dir,
            &plot_file_name(b),
            &render_scatter_svg(table, b)?,
            &mut files,
        )?;
    }

    Ok(Manifest {
        out_dir: out_dir.to_path_buf(),
        files,
    })
}
