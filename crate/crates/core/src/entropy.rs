//! Machine and cluster entropy.
//!
//! A machine is a complete graph over its hardware components. Every edge
//! carries an interaction value `B(u)·B(v) / (C(M(u), M(v)) + ε)`, where `B`
//! is the component base value and `C` the manufacturer compatibility score.
//! The machine entropy is the largest interaction value in the graph. A
//! cluster's entropy is the sum of a logarithmic penalty applied to every
//! machine entropy in it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Base value assigned to every component unless overridden.
pub const DEFAULT_BASE_VALUE: f64 = 10.0;

/// Guard added to every compatibility score before dividing.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Kind of hardware component that forms a vertex of the machine graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Cpu,
    Gpu,
    Cache,
    Memory,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 4] = [
        ComponentKind::Cpu,
        ComponentKind::Gpu,
        ComponentKind::Cache,
        ComponentKind::Memory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComponentKind::Cpu => "CPU",
            ComponentKind::Gpu => "GPU",
            ComponentKind::Cache => "Cache",
            ComponentKind::Memory => "Memory",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        ComponentKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| {
                Error::InvalidComponent(format!(
                    "unknown component kind `{trimmed}` (expected CPU, GPU, Cache or Memory)"
                ))
            })
    }
}

impl Serialize for ComponentKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ComponentKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// A component manufacturer.
///
/// Names compare case-insensitively, and `HPE-Cray` is accepted as an alias
/// of `HPE/Cray`.
#[derive(Debug, Clone)]
pub struct Manufacturer {
    name: String,
    key: String,
}

impl Manufacturer {
    pub fn new(name: impl AsRef<str>) -> Result<Self> {
        let name = name.as_ref().trim();
        if name.is_empty() {
            return Err(Error::InvalidComponent(
                "manufacturer name must not be empty".into(),
            ));
        }
        let mut key = name.to_lowercase();
        if key == "hpe-cray" {
            key = "hpe/cray".into();
        }
        let name = if key == "hpe/cray" {
            "HPE/Cray".to_string()
        } else {
            name.to_string()
        };
        Ok(Manufacturer { name, key })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Case-normalized identifier used for lookups.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for Manufacturer {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Manufacturer {}

impl Hash for Manufacturer {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for Manufacturer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Manufacturer {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for Manufacturer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Manufacturer {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for Manufacturer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Manufacturer::new(raw).map_err(serde::de::Error::custom)
    }
}

/// One vertex of a machine graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSpec {
    pub kind: ComponentKind,
    pub manufacturer: Manufacturer,
    pub base_value: f64,
}

impl ComponentSpec {
    /// Component with the default base value of 10.
    pub fn new(kind: ComponentKind, manufacturer: Manufacturer) -> Self {
        ComponentSpec {
            kind,
            manufacturer,
            base_value: DEFAULT_BASE_VALUE,
        }
    }

    pub fn with_base_value(mut self, base_value: f64) -> Result<Self> {
        self.base_value = base_value;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_value.is_finite() && self.base_value > 0.0) {
            return Err(Error::InvalidComponent(format!(
                "{} base value must be a positive finite number, got {}",
                self.kind, self.base_value
            )));
        }
        Ok(())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.kind
            .name()
            .cmp(other.kind.name())
            .then_with(|| self.manufacturer.cmp(&other.manufacturer))
    }
}

impl fmt::Display for ComponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.manufacturer)
    }
}

/// Symmetric table of manufacturer compatibility scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityMatrix {
    manufacturers: Vec<Manufacturer>,
    scores: Vec<Vec<f64>>,
    epsilon: f64,
    index: HashMap<String, usize>,
}

impl CompatibilityMatrix {
    /// Builds a matrix, rejecting non-square, asymmetric or out-of-range
    /// tables. Symmetry is checked exactly.
    pub fn new(
        manufacturers: Vec<Manufacturer>,
        scores: Vec<Vec<f64>>,
        epsilon: f64,
    ) -> Result<Self> {
        let n = manufacturers.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("no manufacturers".into()));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if scores.len() != n || scores.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "score table must be {n}x{n} to match the manufacturer list"
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, m) in manufacturers.iter().enumerate() {
            if index.insert(m.key().to_string(), i).is_some() {
                return Err(Error::InvalidMatrix(format!(
                    "manufacturer `{m}` listed twice"
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let value = scores[i][j];
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Range {
                        a: manufacturers[i].name().into(),
                        b: manufacturers[j].name().into(),
                        value,
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if scores[i][j] != scores[j][i] {
                    return Err(Error::AsymmetricMatrix {
                        a: manufacturers[i].name().into(),
                        b: manufacturers[j].name().into(),
                        ab: scores[i][j],
                        ba: scores[j][i],
                    });
                }
            }
        }
        Ok(CompatibilityMatrix {
            manufacturers,
            scores,
            epsilon,
            index,
        })
    }

    pub fn manufacturers(&self) -> &[Manufacturer] {
        &self.manufacturers
    }

    pub fn scores(&self) -> &[Vec<f64>] {
        &self.scores
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.manufacturers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manufacturers.is_empty()
    }

    pub fn index_of(&self, manufacturer: &Manufacturer) -> Result<usize> {
        self.index
            .get(manufacturer.key())
            .copied()
            .ok_or_else(|| Error::UnknownManufacturer(manufacturer.name().to_string()))
    }

    /// Looks up `C(a, b)`.
    pub fn score(&self, a: &Manufacturer, b: &Manufacturer) -> Result<f64> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        Ok(self.scores[i][j])
    }

    /// Returns a copy with `C(a, b)` and `C(b, a)` set to `value`.
    pub fn with_score(&self, a: &Manufacturer, b: &Manufacturer, value: f64) -> Result<Self> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Range {
                a: a.name().into(),
                b: b.name().into(),
                value,
            });
        }
        let mut out = self.clone();
        out.scores[i][j] = value;
        out.scores[j][i] = value;
        Ok(out)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }
}

/// A single node: at least two components, at most one per kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineSpec {
    pub name: String,
    pub components: Vec<ComponentSpec>,
}

impl MachineSpec {
    pub fn new(name: impl Into<String>, components: Vec<ComponentSpec>) -> Result<Self> {
        let spec = MachineSpec {
            name: name.into(),
            components,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.len() < 2 {
            return Err(Error::InvalidMachine {
                machine: self.name.clone(),
                reason: format!("needs at least 2 components, has {}", self.components.len()),
            });
        }
        for c in &self.components {
            c.validate()?;
        }
        for (i, c) in self.components.iter().enumerate() {
            if self.components[..i].iter().any(|p| p.kind == c.kind) {
                return Err(Error::InvalidMachine {
                    machine: self.name.clone(),
                    reason: format!("duplicate component kind {}", c.kind),
                });
            }
        }
        Ok(())
    }

    /// Components in canonical order: kind name, then manufacturer.
    pub fn canonical_components(&self) -> Vec<ComponentSpec> {
        let mut sorted = self.components.clone();
        sorted.sort_by(ComponentSpec::canonical_cmp);
        sorted
    }
}

/// An unordered pair of components, stored in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentEdge {
    pub first: ComponentSpec,
    pub second: ComponentSpec,
}

impl fmt::Display for ComponentEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.first, self.second)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeValue {
    pub edge: ComponentEdge,
    pub compatibility: f64,
    pub value: f64,
}

/// Entropy of a single machine and the edge that realises it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineEntropy {
    pub machine: String,
    pub value: f64,
    pub argmax_edge: ComponentEdge,
    pub edge_values: Vec<EdgeValue>,
}

/// A group of identical machines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineGroup {
    pub machine: MachineSpec,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSpec {
    pub name: String,
    pub groups: Vec<MachineGroup>,
}

impl ClusterSpec {
    pub fn new(name: impl Into<String>, groups: Vec<MachineGroup>) -> Result<Self> {
        let spec = ClusterSpec {
            name: name.into(),
            groups,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Total machine count `n`.
    pub fn machine_count(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::EmptyCluster(self.name.clone()));
        }
        for g in &self.groups {
            if g.count == 0 {
                return Err(Error::Validation(format!(
                    "machine group `{}` in cluster `{}` has count 0",
                    g.machine.name, self.name
                )));
            }
            g.machine.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineContribution {
    pub machine: String,
    pub count: u64,
    pub entropy: f64,
    pub penalty: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterEntropy {
    pub cluster: String,
    pub value: f64,
    pub machine_count: u64,
    pub per_machine: Vec<MachineContribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    Natural,
    Ten,
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "e" | "ln" | "natural" => Ok(LogBase::Natural),
            "10" | "ten" | "log10" => Ok(LogBase::Ten),
            other => Err(Error::InvalidPenalty(format!(
                "unsupported log base `{other}` (use `e` or `10`)"
            ))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Ten => "10",
        })
    }
}

/// Parameters of the penalty `coefficient · log(1 + x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub coefficient: f64,
    pub log_base: LogBase,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams {
            coefficient: 3.0,
            log_base: LogBase::Natural,
        }
    }
}

impl PenaltyParams {
    pub fn new(coefficient: f64, log_base: LogBase) -> Result<Self> {
        if !(coefficient.is_finite() && coefficient > 0.0) {
            return Err(Error::InvalidPenalty(format!(
                "coefficient must be positive, got {coefficient}"
            )));
        }
        Ok(PenaltyParams {
            coefficient,
            log_base,
        })
    }
}

/// `B(u)·B(v) / (C(M(u), M(v)) + ε)`.
pub fn interaction_value(
    u: &ComponentSpec,
    v: &ComponentSpec,
    matrix: &CompatibilityMatrix,
) -> Result<f64> {
    let c = matrix.score(&u.manufacturer, &v.manufacturer)?;
    Ok(interaction_from_score(
        u.base_value,
        v.base_value,
        c,
        matrix.epsilon(),
    ))
}

fn interaction_from_score(bu: f64, bv: f64, c: f64, epsilon: f64) -> f64 {
    bu * bv / (c + epsilon)
}

/// All `k(k-1)/2` edges of the complete graph over the machine's
/// components, in canonical order.
pub fn build_component_graph(machine: &MachineSpec) -> Result<Vec<ComponentEdge>> {
    machine.validate()?;
    let sorted = machine.canonical_components();
    let mut edges = Vec::with_capacity(sorted.len() * (sorted.len() - 1) / 2);
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            edges.push(ComponentEdge {
                first: a.clone(),
                second: b.clone(),
            });
        }
    }
    Ok(edges)
}

/// Largest interaction value over the machine graph. Ties go to the first
/// edge in canonical order.
pub fn machine_entropy(
    machine: &MachineSpec,
    matrix: &CompatibilityMatrix,
) -> Result<MachineEntropy> {
    let edges = build_component_graph(machine)?;
    let mut edge_values = Vec::with_capacity(edges.len());
    for edge in edges {
        let compatibility = matrix.score(&edge.first.manufacturer, &edge.second.manufacturer)?;
        let value = interaction_from_score(
            edge.first.base_value,
            edge.second.base_value,
            compatibility,
            matrix.epsilon(),
        );
        edge_values.push(EdgeValue {
            edge,
            compatibility,
            value,
        });
    }

    let mut best = 0;
    for (i, ev) in edge_values.iter().enumerate().skip(1) {
        if ev.value > edge_values[best].value {
            best = i;
        }
    }

    Ok(MachineEntropy {
        machine: machine.name.clone(),
        value: edge_values[best].value,
        argmax_edge: edge_values[best].edge.clone(),
        edge_values,
    })
}

/// `coefficient · log(1 + x)` in the configured base.
pub fn penalty(x: f64, params: &PenaltyParams) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::NegativeInput(x));
    }
    let log = match params.log_base {
        LogBase::Natural => x.ln_1p(),
        LogBase::Ten => x.ln_1p() / std::f64::consts::LN_10,
    };
    Ok(params.coefficient * log)
}

/// Sum of `count · P(S_i)` over the cluster's machine groups.
pub fn cluster_entropy(
    cluster: &ClusterSpec,
    matrix: &CompatibilityMatrix,
    params: &PenaltyParams,
) -> Result<ClusterEntropy> {
    if cluster.groups.is_empty() {
        return Err(Error::EmptyCluster(cluster.name.clone()));
    }
    cluster.validate()?;

    let mut per_machine = Vec::with_capacity(cluster.groups.len());
    let mut value = 0.0;
    for group in &cluster.groups {
        let entropy = machine_entropy(&group.machine, matrix)?.value;
        let p = penalty(entropy, params)?;
        let contribution = group.count as f64 * p;
        value += contribution;
        per_machine.push(MachineContribution {
            machine: group.machine.name.clone(),
            count: group.count,
            entropy,
            penalty: p,
            contribution,
        });
    }

    Ok(ClusterEntropy {
        cluster: cluster.name.clone(),
        value,
        machine_count: cluster.machine_count(),
        per_machine,
    })
}
