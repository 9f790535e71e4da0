//! Entropy-vs-benchmark scatter plots rendered as standalone SVG, with a
//! least-squares line and the Pearson r in the title.

use std::fmt::Write;
use std::str::FromStr;

use crate::dataset::{Benchmark, BenchmarkTable};
use crate::error::{Error, Result};
use crate::stats::{pearson_r, SampleSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    Svg,
    Csv,
}

impl PlotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            PlotFormat::Svg => "svg",
            PlotFormat::Csv => "csv",
        }
    }
}

impl FromStr for PlotFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(PlotFormat::Svg),
            "csv" => Ok(PlotFormat::Csv),
            other => Err(Error::Validation(format!(
                "unsupported plot format `{other}` (use svg or csv)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub system: String,
    pub entropy: f64,
    pub value: f64,
}

/// `y = intercept + slope · x`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least-squares line; `None` with fewer than two points or no
/// spread in `x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
    })
}

pub fn scatter_points(table: &BenchmarkTable, benchmark: Benchmark) -> Vec<ScatterPoint> {
    table
        .records
        .iter()
        .filter_map(|r| {
            r.value(benchmark).map(|value| ScatterPoint {
                system: r.name.clone(),
                entropy: r.entropy,
                value,
            })
        })
        .collect()
}

fn points_or_err(table: &BenchmarkTable, benchmark: Benchmark) -> Result<Vec<ScatterPoint>> {
    let points = scatter_points(table, benchmark);
    if points.is_empty() {
        return Err(Error::UnknownBenchmark(benchmark.name().to_string()));
    }
    Ok(points)
}

/// `system,entropy,value` rows for one benchmark.
pub fn render_scatter_csv(table: &BenchmarkTable, benchmark: Benchmark) -> Result<String> {
    let points = points_or_err(table, benchmark)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["system", "entropy", benchmark.name()])
        .expect("in-memory write");
    for p in &points {
        writer
            .write_record([p.system.clone(), p.entropy.to_string(), p.value.to_string()])
            .expect("in-memory write");
    }
    Ok(String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8"))
}

/// Long-format rows for every benchmark present: `system,entropy,benchmark,value`.
pub fn render_grid_csv(table: &BenchmarkTable) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["system", "entropy", "benchmark", "value"])
        .expect("in-memory write");
    for b in table.benchmarks_present() {
        for p in scatter_points(table, b) {
            writer
                .write_record([
                    p.system,
                    p.entropy.to_string(),
                    b.name().to_string(),
                    p.value.to_string(),
                ])
                .expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

pub fn render_scatter_svg(table: &BenchmarkTable, benchmark: Benchmark) -> Result<String> {
    let points = points_or_err(table, benchmark)?;
    let mut svg = svg_open(PANEL_W, PANEL_H);
    write_panel(&mut svg, 0.0, 0.0, benchmark, &points);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// All benchmarks present in the table as a grid of panels, three per row.
pub fn render_grid_svg(table: &BenchmarkTable) -> Result<String> {
    let present = table.benchmarks_present();
    if present.is_empty() {
        return Err(Error::Validation(
            "table has no benchmark values to plot".into(),
        ));
    }
    let cols = present.len().min(3);
    let rows = present.len().div_ceil(3);
    let mut svg = svg_open(PANEL_W * cols as f64, PANEL_H * rows as f64);
    for (i, b) in present.into_iter().enumerate() {
        let ox = (i % 3) as f64 * PANEL_W;
        let oy = (i / 3) as f64 * PANEL_H;
        write_panel(&mut svg, ox, oy, b, &scatter_points(table, b));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Tick step of the form {1, 2, 5}·10^k giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let magnitude = 10f64.powf(raw.log10().floor());
    let residual = raw / magnitude;
    let nice = if residual <= 1.0 {
        1.0
    } else if residual <= 2.0 {
        2.0
    } else if residual <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * magnitude
}

struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
    decimals: usize,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64> + Clone) -> Axis {
        let min = values.clone().fold(f64::INFINITY, f64::min);
        let max = values.fold(f64::NEG_INFINITY, f64::max);
        let (min, max) = if min == max {
            let pad = if min == 0.0 { 1.0 } else { min.abs() * 0.1 };
            (min - pad, max + pad)
        } else {
            (min, max)
        };
        let step = nice_step(max - min, 5.0);
        let lo = (min / step).floor() * step;
        let hi = (max / step).ceil() * step;
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        Axis {
            lo,
            hi,
            step,
            decimals,
        }
    }

    fn ticks(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step).round() as usize;
        (0..=count)
            .map(|i| self.lo + i as f64 * self.step)
            .collect()
    }

    fn scale(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

fn write_panel(svg: &mut String, ox: f64, oy: f64, benchmark: Benchmark, points: &[ScatterPoint]) {
    let xs: Vec<f64> = points.iter().map(|p| p.entropy).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
    let x_axis = Axis::fit(xs.iter().copied());
    let y_axis = Axis::fit(ys.iter().copied());

    let left = MARGIN_L;
    let right = PANEL_W - MARGIN_R;
    let top = MARGIN_T;
    let bottom = PANEL_H - MARGIN_B;
    let px = |x: f64| x_axis.scale(x, left, right);
    let py = |y: f64| y_axis.scale(y, bottom, top);

    let r_text = match pearson_r(
        &SampleSeries::new("Entropy", xs.clone()),
        &SampleSeries::new(benchmark.name(), ys.clone()),
    ) {
        Ok(r) => format!("r = {r:.4}"),
        Err(_) => "r = n/a".to_string(),
    };

    let clip_id = format!("area-{}", benchmark.name().to_ascii_lowercase());
    let _ = writeln!(svg, "<g transform=\"translate({ox:.0},{oy:.0})\">");
    let _ = writeln!(
        svg,
        "<clipPath id=\"{clip_id}\"><rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/></clipPath>",
        right - left,
        bottom - top
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">Entropy vs {} ({})</text>",
        (left + right) / 2.0,
        escape(benchmark.name()),
        r_text
    );

    // grid and ticks
    for t in x_axis.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{top:.2}\" x2=\"{x:.2}\" y2=\"{bottom:.2}\" stroke=\"#e0e0e0\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{:.*}</text>",
            bottom + 16.0,
            x_axis.decimals,
            t
        );
    }
    for t in y_axis.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{left:.2}\" y1=\"{y:.2}\" x2=\"{right:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{:.*}</text>",
            left - 6.0,
            y + 4.0,
            y_axis.decimals,
            t
        );
    }
    let _ = writeln!(
        svg,
        "<rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        right - left,
        bottom - top
    );

    // axis labels
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">Entropy (dimensionless)</text>",
        (left + right) / 2.0,
        PANEL_H - 14.0
    );
    let _ = writeln!(
        svg,
        "<text transform=\"translate(18,{:.2}) rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">{} ({})</text>",
        (top + bottom) / 2.0,
        escape(benchmark.name()),
        escape(benchmark.unit())
    );

    if let Some(fit) = least_squares(&xs, &ys) {
        let (x0, x1) = (x_axis.lo, x_axis.hi);
        let _ = writeln!(
            svg,
            "<line class=\"fit\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d62728\" \
             stroke-width=\"1.5\" stroke-dasharray=\"6 4\" clip-path=\"url(#{clip_id})\"/>",
            px(x0),
            py(fit.at(x0)),
            px(x1),
            py(fit.at(x1))
        );
    }

    for p in points {
        let (cx, cy) = (px(p.entropy), py(p.value));
        let _ = writeln!(
            svg,
            "<circle class=\"point\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"#1f77b4\"><title>{}: entropy {}, {} {}</title></circle>",
            escape(&p.system),
            p.entropy,
            escape(benchmark.name()),
            p.value
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" fill=\"#555\">{}</text>",
            cx + 6.0,
            cy - 5.0,
            escape(&p.system)
        );
    }
    svg.push_str("</g>\n");
}
