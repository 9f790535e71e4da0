//! Acceptance gate. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use cluster_entropy::analysis::{consistency_check, paired_columns, ConsistencyFlag};
use cluster_entropy::dataset::{
    bundled_compatibility_matrix, bundled_top10, load_benchmarks, load_cluster_spec, load_matrix,
    published_correlations, save_benchmarks, save_cluster_spec, save_matrix, Benchmark,
    PUBLISHED_SAMPLE_SIZE,
};
use cluster_entropy::entropy::{
    cluster_entropy, interaction_value, machine_entropy, penalty, ClusterSpec, CompatibilityMatrix,
    ComponentKind, ComponentSpec, MachineGroup, MachineSpec, Manufacturer, PenaltyParams,
    DEFAULT_EPSILON,
};
use cluster_entropy::stats::{interpret, p_value_two_sided, student_t_cdf, DEFAULT_ALPHA};
use cluster_entropy::Error;
use cluster_entropy_testkit::{brute_force_machine_entropy, pearson_exact, t_cdf_quadrature};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vendor(name: &str) -> Manufacturer {
    Manufacturer::new(name).unwrap()
}

// 1. interaction formula on the worked values
fn interaction_worked_values() -> Outcome {
    let (a, b) = (vendor("A"), vendor("B"));
    let u = ComponentSpec::new(ComponentKind::Cpu, a.clone());
    let v = ComponentSpec::new(ComponentKind::Gpu, b.clone());
    let mut worst = 0.0f64;
    for (c, expected) in [(1.0, 100.0), (0.9, 1000.0 / 9.0), (0.01, 10_000.0)] {
        let m = CompatibilityMatrix::new(
            vec![a.clone(), b.clone()],
            vec![vec![1.0, c], vec![c, 1.0]],
            DEFAULT_EPSILON,
        )
        .map_err(|e| e.to_string())?;
        let got = interaction_value(&u, &v, &m).map_err(|e| e.to_string())?;
        let rel = (got - expected).abs() / expected;
        worst = worst.max(rel);
        ensure(rel < 1e-6, || format!("C={c}: {got} vs {expected}"))?;
    }
    Ok(format!("max relative error {worst:.1e} < 1e-6"))
}

// 2. p-value for the headline pair
fn p_value_path() -> Outcome {
    let p = p_value_two_sided(-0.7832, 10).map_err(|e| e.to_string())?;
    ensure((0.0067..=0.0087).contains(&p), || format!("p = {p}"))?;
    Ok(format!("p(-0.7832, n=10) = {p:.6} in [0.0067, 0.0087]"))
}

// 3. bundled tables
fn bundled_fidelity() -> Outcome {
    let m = bundled_compatibility_matrix();
    let c = m
        .score(&vendor("Fujitsu"), &vendor("Fujitsu"))
        .map_err(|e| e.to_string())?;
    ensure(c == 0.98, || format!("C(Fujitsu,Fujitsu) = {c}"))?;
    ensure(m.len() == 6, || format!("{} manufacturers", m.len()))?;
    let t = bundled_top10();
    ensure(t.records.len() == 10, || {
        format!("{} systems", t.records.len())
    })?;
    let linpack = t
        .record("El Capitan")
        .and_then(|r| r.value(Benchmark::Linpack));
    ensure(linpack == Some(1.742), || {
        format!("El Capitan LINPACK = {linpack:?}")
    })?;
    let hpcg = t.record("Fugaku").and_then(|r| r.value(Benchmark::Hpcg));
    ensure(hpcg == Some(16.0), || format!("Fugaku HPCG = {hpcg:?}"))?;
    Ok("C(Fujitsu,Fujitsu)=0.98, El Capitan LINPACK=1.742, Fugaku HPCG=16.0".into())
}

// 4. label rule applied to the published (r, p) pairs
fn label_mapping() -> Outcome {
    let audit = consistency_check(&bundled_top10(), DEFAULT_ALPHA);
    let mut exact = 0;
    let mut normalized = Vec::new();
    for (row, published) in audit.rows.iter().zip(published_correlations()) {
        let label = interpret(published.r, published.p_value, DEFAULT_ALPHA);
        if label == published.label {
            exact += 1;
            ensure(
                !row.flags.contains(&ConsistencyFlag::LabelNormalized),
                || format!("{} flagged without cause", published.benchmark),
            )?;
        } else {
            ensure(
                matches!(published.benchmark, Benchmark::MlPerf | Benchmark::Hpcc),
                || {
                    format!(
                        "{}: `{label}` vs `{}`",
                        published.benchmark, published.label
                    )
                },
            )?;
            ensure(label == "Moderate negative, not significant", || {
                label.clone()
            })?;
            ensure(
                row.flags.contains(&ConsistencyFlag::LabelNormalized),
                || format!("{} not flagged LABEL_NORMALIZED", published.benchmark),
            )?;
            ensure(row.normalized_paper_label == label, || {
                row.normalized_paper_label.clone()
            })?;
            normalized.push(published.benchmark.name());
        }
    }
    ensure(exact == 5 && normalized.len() == 2, || {
        format!("{exact} exact, {normalized:?}")
    })?;
    Ok(format!(
        "5 labels exact, {} normalized and flagged",
        normalized.join("/")
    ))
}

fn reproduce_into(dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cluster-entropy"))
        .args(["reproduce", "--out"])
        .arg(dir)
        .env_remove("CLUSTER_ENTROPY_MATRIX")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })
}

// 5. consistency audit written by `reproduce`
fn consistency_audit() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    reproduce_into(dir.path())?;
    let text =
        fs::read_to_string(dir.path().join("consistency.json")).map_err(|e| e.to_string())?;
    let report: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let rows = report["rows"].as_array().ok_or("no rows")?;
    ensure(rows.len() == 7, || format!("{} rows", rows.len()))?;
    let table = bundled_top10();
    let mut worst = 0.0f64;
    for (row, b) in rows.iter().zip(Benchmark::ALL) {
        ensure(row["benchmark"] == b.name(), || {
            format!("row order: {}", row["benchmark"])
        })?;
        for key in ["paper_r", "computed_r", "paper_p", "computed_p"] {
            ensure(row[key].is_number(), || format!("{b}: {key} missing"))?;
        }
        let (x, y) = paired_columns(&table, b);
        let oracle = pearson_exact(&x.values, &y.values);
        let err = (row["computed_r"].as_f64().unwrap() - oracle).abs();
        worst = worst.max(err);
        ensure(err <= 1e-9, || {
            format!("{b}: computed r off oracle by {err:e}")
        })?;
        let invalid = row["flags"]
            .as_array()
            .is_some_and(|f| f.iter().any(|v| v == "INVALID_PAPER_P"));
        ensure(invalid == (b == Benchmark::Stream), || {
            format!("{b}: INVALID_PAPER_P = {invalid}")
        })?;
    }
    Ok(format!(
        "7 rows, STREAM flagged INVALID_PAPER_P, max |r - oracle| {worst:.1e} <= 1e-9"
    ))
}

fn any_vendor() -> impl Strategy<Value = Manufacturer> {
    const NAMES: [&str; 6] = ["AMD", "Intel", "NVIDIA", "IBM", "Fujitsu", "HPE/Cray"];
    (0..6usize).prop_map(|i| vendor(NAMES[i]))
}

fn any_component() -> impl Strategy<Value = ComponentSpec> {
    (0..4usize, any_vendor(), 0.1f64..100.0).prop_map(|(k, m, b)| ComponentSpec {
        kind: ComponentKind::ALL[k],
        manufacturer: m,
        base_value: b,
    })
}

fn any_machine() -> impl Strategy<Value = MachineSpec> {
    (
        subsequence(ComponentKind::ALL.to_vec(), 2..=4),
        proptest::collection::vec(any_vendor(), 4),
    )
        .prop_map(|(kinds, vendors)| {
            let comps = kinds
                .into_iter()
                .zip(vendors)
                .map(|(k, m)| ComponentSpec::new(k, m))
                .collect();
            MachineSpec::new("m", comps).unwrap()
        })
}

fn any_groups() -> impl Strategy<Value = Vec<MachineGroup>> {
    proptest::collection::vec(
        (any_machine(), 1u64..1000).prop_map(|(machine, count)| MachineGroup { machine, count }),
        1..6,
    )
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    })
    .run(&strategy, test)
    .map_err(|e| format!("{name}: {e}"))
}

// 6. generative checks, 1000 cases each
fn core_properties() -> Outcome {
    let m = bundled_compatibility_matrix();
    let params = PenaltyParams::default();
    let entropy = |machine: &MachineSpec| machine_entropy(machine, &m).unwrap().value;
    let cluster = |groups: Vec<MachineGroup>| {
        cluster_entropy(&ClusterSpec::new("c", groups).unwrap(), &m, &params)
            .unwrap()
            .value
    };

    run_property("symmetry", (any_component(), any_component()), |(u, v)| {
        prop_assert_eq!(
            interaction_value(&u, &v, &m).unwrap(),
            interaction_value(&v, &u, &m).unwrap()
        );
        Ok(())
    })?;
    run_property(
        "monotone in C",
        (0.0f64..0.999, 1e-3f64..=1.0),
        |(c1, frac)| {
            let c2 = c1 + frac * (1.0 - c1);
            let (a, b) = (vendor("A"), vendor("B"));
            let at = |c: f64| {
                let mm = CompatibilityMatrix::new(
                    vec![a.clone(), b.clone()],
                    vec![vec![1.0, c], vec![c, 1.0]],
                    DEFAULT_EPSILON,
                )
                .unwrap();
                interaction_value(
                    &ComponentSpec::new(ComponentKind::Cpu, a.clone()),
                    &ComponentSpec::new(ComponentKind::Gpu, b.clone()),
                    &mm,
                )
                .unwrap()
            };
            prop_assert!(at(c1) > at(c2));
            Ok(())
        },
    )?;
    run_property(
        "k^2 scaling",
        (any_component(), any_component(), 0.1f64..10.0),
        |(u, v, k)| {
            let base = interaction_value(&u, &v, &m).unwrap();
            let (mut ku, mut kv) = (u, v);
            ku.base_value *= k;
            kv.base_value *= k;
            prop_assert!(close(
                interaction_value(&ku, &kv, &m).unwrap(),
                k * k * base,
                1e-12
            ));
            Ok(())
        },
    )?;
    run_property(
        "max dominance",
        (
            subsequence(ComponentKind::ALL.to_vec(), 3..=4),
            proptest::collection::vec(any_vendor(), 4),
        ),
        |(kinds, vendors)| {
            let comps: Vec<ComponentSpec> = kinds
                .into_iter()
                .zip(vendors)
                .map(|(k, v)| ComponentSpec::new(k, v))
                .collect();
            let small = MachineSpec::new("s", comps[..comps.len() - 1].to_vec()).unwrap();
            let large = MachineSpec::new("l", comps).unwrap();
            prop_assert!(entropy(&large) >= entropy(&small));
            Ok(())
        },
    )?;
    run_property(
        "homogeneous closed form",
        (
            any_vendor(),
            subsequence(ComponentKind::ALL.to_vec(), 2..=4),
        ),
        |(v, kinds)| {
            let machine = MachineSpec::new(
                "h",
                kinds
                    .into_iter()
                    .map(|k| ComponentSpec::new(k, v.clone()))
                    .collect(),
            )
            .unwrap();
            let c = m.score(&v, &v).unwrap();
            prop_assert!(close(
                entropy(&machine),
                100.0 / (c + DEFAULT_EPSILON),
                1e-15
            ));
            Ok(())
        },
    )?;
    run_property(
        "penalty monotone",
        (0.0f64..1e6, 1e-6f64..1.0),
        |(x, gap)| {
            let y = x + gap * (1.0 + x);
            prop_assert!(penalty(x, &params).unwrap() < penalty(y, &params).unwrap());
            Ok(())
        },
    )?;
    run_property(
        "cluster additivity",
        (any_groups(), any_groups()),
        |(l, r)| {
            let joined: Vec<MachineGroup> = l.iter().chain(&r).cloned().collect();
            prop_assert!(close(cluster(joined), cluster(l) + cluster(r), 1e-12));
            Ok(())
        },
    )?;
    run_property("cluster permutation", any_groups(), |groups| {
        let mut reversed = groups.clone();
        reversed.reverse();
        let mid = reversed.len() / 2;
        reversed.rotate_left(mid);
        prop_assert!(close(cluster(groups), cluster(reversed), 1e-12));
        Ok(())
    })?;
    Ok("8 properties x 1000 cases".into())
}

// 7. exhaustive enumeration
fn brute_force_equivalence() -> Outcome {
    let m = bundled_compatibility_matrix();
    let vendors = m.manufacturers().to_vec();
    let mut four = 0;
    let mut total = 0;
    for mask in 0u32..16 {
        let kinds: Vec<ComponentKind> = (0..4)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| ComponentKind::ALL[i])
            .collect();
        if kinds.len() < 2 {
            continue;
        }
        for code in 0..6usize.pow(kinds.len() as u32) {
            let assignment: Vec<usize> = (0..kinds.len())
                .map(|i| code / 6usize.pow(i as u32) % 6)
                .collect();
            let machine = MachineSpec::new(
                "m",
                kinds
                    .iter()
                    .zip(&assignment)
                    .map(|(&k, &v)| ComponentSpec::new(k, vendors[v].clone()))
                    .collect(),
            )
            .map_err(|e| e.to_string())?;
            let got = machine_entropy(&machine, &m)
                .map_err(|e| e.to_string())?
                .value;
            let pairs: Vec<(f64, usize)> = assignment.iter().map(|&v| (10.0, v)).collect();
            let expected = brute_force_machine_entropy(&pairs, m.scores(), DEFAULT_EPSILON);
            ensure(got == expected, || {
                format!("{machine:?}: {got} vs {expected}")
            })?;
            total += 1;
            if kinds.len() == 4 {
                four += 1;
            }
        }
    }
    ensure(four == 1296, || format!("{four} four-component machines"))?;
    Ok(format!(
        "{four} four-component machines, {total} in total, all identical"
    ))
}

// 8. special functions
fn special_functions() -> Outcome {
    let mut worst = 0.0f64;
    for df in 1..=30 {
        for i in -60..=60 {
            let t = i as f64 / 10.0;
            let err = (student_t_cdf(t, df) - t_cdf_quadrature(t, df)).abs();
            worst = worst.max(err);
            ensure(err <= 1e-10, || format!("df={df} t={t}: {err:e}"))?;
        }
    }
    let mut cauchy = 0.0f64;
    for i in -60..=60 {
        let t = i as f64 / 10.0;
        let err = (student_t_cdf(t, 1) - (0.5 + t.atan() / std::f64::consts::PI)).abs();
        cauchy = cauchy.max(err);
        ensure(err <= 1e-12, || format!("Cauchy t={t}: {err:e}"))?;
    }
    Ok(format!(
        "quadrature max error {worst:.1e} <= 1e-10, Cauchy {cauchy:.1e} <= 1e-12"
    ))
}

fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                files.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    files
}

// 9. determinism of the bundle
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    reproduce_into(&a)?;
    reproduce_into(&b)?;
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    ensure(sa.len() == 11, || format!("{} files", sa.len()))?;
    ensure(sa == sb, || "output trees differ".into())?;
    Ok(format!("{} files byte-identical across runs", sa.len()))
}

// 10. ingestion rejections and round-trips
fn ingestion() -> Outcome {
    let (a, b) = (vendor("A"), vendor("B"));
    let asym = CompatibilityMatrix::new(
        vec![a.clone(), b.clone()],
        vec![vec![1.0, 0.5], vec![0.6, 1.0]],
        DEFAULT_EPSILON,
    );
    ensure(matches!(asym, Err(Error::AsymmetricMatrix { .. })), || {
        format!("asymmetric: {asym:?}")
    })?;
    let range = CompatibilityMatrix::new(
        vec![a.clone(), b],
        vec![vec![1.0, 1.2], vec![1.2, 1.0]],
        DEFAULT_EPSILON,
    );
    ensure(matches!(range, Err(Error::Range { .. })), || {
        format!("out of range: {range:?}")
    })?;
    let dup = MachineSpec::new(
        "d",
        vec![
            ComponentSpec::new(ComponentKind::Cpu, a.clone()),
            ComponentSpec::new(ComponentKind::Cpu, a),
        ],
    );
    ensure(dup.is_err(), || "duplicate kind accepted".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let matrix = bundled_compatibility_matrix();
    let table = bundled_top10();
    for ext in ["csv", "json"] {
        let path = dir.path().join(format!("matrix.{ext}"));
        save_matrix(&matrix, &path).map_err(|e| e.to_string())?;
        ensure(
            load_matrix(&path).map_err(|e| e.to_string())? == matrix,
            || format!("matrix {ext}"),
        )?;
        let path = dir.path().join(format!("bench.{ext}"));
        save_benchmarks(&table, &path).map_err(|e| e.to_string())?;
        ensure(
            load_benchmarks(&path).map_err(|e| e.to_string())?.records == table.records,
            || format!("benchmarks {ext}"),
        )?;
    }
    let cluster = ClusterSpec::new(
        "c",
        vec![MachineGroup {
            machine: MachineSpec::new(
                "n",
                vec![
                    ComponentSpec::new(ComponentKind::Cpu, vendor("AMD")),
                    ComponentSpec::new(ComponentKind::Gpu, vendor("NVIDIA"))
                        .with_base_value(7.25)
                        .unwrap(),
                ],
            )
            .unwrap(),
            count: 64,
        }],
    )
    .unwrap();
    let path = dir.path().join("cluster.json");
    save_cluster_spec(&cluster, &path).map_err(|e| e.to_string())?;
    ensure(
        load_cluster_spec(&path).map_err(|e| e.to_string())? == cluster,
        || "cluster json".into(),
    )?;
    Ok("rejections raised; matrix, benchmark and cluster files round-trip".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("interaction worked values", interaction_worked_values),
        ("p-value path", p_value_path),
        ("bundled data fidelity", bundled_fidelity),
        ("label mapping", label_mapping),
        ("consistency audit", consistency_audit),
        ("core properties", core_properties),
        ("brute-force equivalence", brute_force_equivalence),
        ("special functions", special_functions),
        ("determinism", determinism),
        ("ingestion", ingestion),
    ];
    assert_eq!(PUBLISHED_SAMPLE_SIZE, 10);
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
