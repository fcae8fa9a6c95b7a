//! Single-particle contextuality experiment on the path ⊗ spin space:
//! optical device graphs built from beam splitters and Stern-Gerlach
//! elements, the four binary observables and their products, triad coloring
//! search, and the finite-precision hidden-variable inequality.
//!
//! Basis order is (u z+, u z-, d z+, d z-) with the path label first.

use crate::qubit::{self, Ket};
use crate::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KsError {
    #[error("line {line}: expected three whitespace-separated labels, got `{content}`")]
    BadTriadLine { line: usize, content: String },
    #[error("line {line}: triad contains a repeated direction")]
    RepeatedDirection { line: usize },
    #[error("epsilon must lie in [0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("need at least 2 triads, got {0}")]
    TooFewTriads(usize),
    #[error("device references unknown rail `{0}`")]
    UnknownRail(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KsError>;

// ---------------------------------------------------------------------------
// states and observables
// ---------------------------------------------------------------------------

/// Pure state of the path ⊗ spin qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpinState {
    pub amps: [C64; 4],
}

impl PathSpinState {
    pub fn new(amps: [C64; 4]) -> Self {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut out = amps;
        for z in &mut out {
            *z /= norm;
        }
        PathSpinState { amps: out }
    }

    pub fn ket(&self) -> Ket {
        Ket::new(self.amps.to_vec()).expect("normalized 4-vector")
    }

    pub fn overlap(&self, other: &PathSpinState) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn expectation(&self, op: &DMatrix<C64>) -> f64 {
        self.ket().expectation(op)
    }
}

/// The joint eigenstates of the two commuting product observables, labeled
/// by their (Z1X2, X1Z2) eigenvalues.
pub fn chi_state(z1x2: i8, x1z2: i8) -> PathSpinState {
    let h = 0.5;
    match (z1x2, x1z2) {
        (1, -1) => PathSpinState::new([
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
            C64::new(h, 0.0),
        ]),
        (-1, 1) => PathSpinState::new([
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
        ]),
        (1, 1) => PathSpinState::new([
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
        ]),
        (-1, -1) => PathSpinState::new([
            C64::new(-h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
        ]),
        _ => panic!("eigenvalues must be ±1"),
    }
}

/// The four binary observables and their pairwise products as 4x4 matrices.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub z1: DMatrix<C64>,
    pub x1: DMatrix<C64>,
    pub z2: DMatrix<C64>,
    pub x2: DMatrix<C64>,
    pub z1z2: DMatrix<C64>,
    pub x1x2: DMatrix<C64>,
    pub z1x2: DMatrix<C64>,
    pub x1z2: DMatrix<C64>,
}

impl ObservableSet {
    pub fn standard() -> Self {
        let i2 = qubit::identity(2);
        let z1 = qubit::pauli_z().kronecker(&i2);
        let x1 = qubit::pauli_x().kronecker(&i2);
        let z2 = i2.kronecker(&qubit::pauli_z());
        let x2 = i2.kronecker(&qubit::pauli_x());
        ObservableSet {
            z1z2: &z1 * &z2,
            x1x2: &x1 * &x2,
            z1x2: &z1 * &x2,
            x1z2: &x1 * &z2,
            z1,
            x1,
            z2,
            x2,
        }
    }
}

// ---------------------------------------------------------------------------
// optical device graphs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Z,
    X,
}

/// One element of the optical pipeline, acting on named rails.
#[derive(Debug, Clone)]
pub enum Element {
    /// 50-50 splitter: rail a <- (a+b)/sqrt(2), rail b <- (a-b)/sqrt(2).
    BeamSplitter { a: String, b: String },
    /// Split one rail into two by the spin component along the axis.
    SternGerlach { rail: String, axis: Axis, plus: String, minus: String },
    Relabel { from: String, to: String },
}

/// Final rail with its measurement interpretation.
#[derive(Debug, Clone)]
pub struct Detector {
    pub rail: String,
    pub tags: Vec<(String, i8)>,
}

/// An optical pipeline from the two input rails (u, d) to tagged detectors.
#[derive(Debug, Clone)]
pub struct DeviceGraph {
    pub elements: Vec<Element>,
    pub detectors: Vec<Detector>,
}

type RailState = BTreeMap<String, [C64; 2]>;

fn splitter(v: [C64; 2], w: [C64; 2]) -> ([C64; 2], [C64; 2]) {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    (
        [(v[0] + w[0]) * s, (v[1] + w[1]) * s],
        [(v[0] - w[0]) * s, (v[1] - w[1]) * s],
    )
}

impl DeviceGraph {
    fn propagate(&self, mut rails: RailState) -> Result<RailState> {
        let zero = [C64::new(0.0, 0.0); 2];
        for el in &self.elements {
            match el {
                Element::BeamSplitter { a, b } => {
                    let va = rails.remove(a.as_str()).unwrap_or(zero);
                    let vb = rails.remove(b.as_str()).unwrap_or(zero);
                    let (na, nb) = splitter(va, vb);
                    rails.insert(a.clone(), na);
                    rails.insert(b.clone(), nb);
                }
                Element::SternGerlach { rail, axis, plus, minus } => {
                    let v = rails.remove(rail.as_str()).unwrap_or(zero);
                    let (p, m) = match axis {
                        Axis::Z => ([v[0], C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), v[1]]),
                        Axis::X => {
                            let h = C64::new(0.5, 0.0);
                            let cp = (v[0] + v[1]) * h;
                            let cm = (v[0] - v[1]) * h;
                            ([cp, cp], [cm, -cm])
                        }
                    };
                    rails.insert(plus.clone(), p);
                    rails.insert(minus.clone(), m);
                }
                Element::Relabel { from, to } => {
                    let v = rails
                        .remove(from.as_str())
                        .ok_or_else(|| KsError::UnknownRail(from.clone()))?;
                    rails.insert(to.clone(), v);
                }
            }
        }
        Ok(rails)
    }

    /// Detector probabilities for a path/spin input.
    pub fn run(&self, s: &PathSpinState) -> Result<Vec<f64>> {
        let mut rails = RailState::new();
        rails.insert("u".into(), [s.amps[0], s.amps[1]]);
        rails.insert("d".into(), [s.amps[2], s.amps[3]]);
        let out = self.propagate(rails)?;
        self.detectors
            .iter()
            .map(|det| {
                out.get(det.rail.as_str())
                    .map(|v| v[0].norm_sqr() + v[1].norm_sqr())
                    .ok_or_else(|| KsError::UnknownRail(det.rail.clone()))
            })
            .collect()
    }

    /// Transfer matrix from the 4-dimensional input space to the detector
    /// rail ⊗ spin space (2 rows per detector).
    pub fn transfer_matrix(&self) -> Result<DMatrix<C64>> {
        let mut t = DMatrix::zeros(2 * self.detectors.len(), 4);
        for col in 0..4usize {
            let mut amps = [C64::new(0.0, 0.0); 4];
            amps[col] = C64::new(1.0, 0.0);
            let mut rails = RailState::new();
            rails.insert("u".into(), [amps[0], amps[1]]);
            rails.insert("d".into(), [amps[2], amps[3]]);
            let out = self.propagate(rails)?;
            for (di, det) in self.detectors.iter().enumerate() {
                let v = out
                    .get(det.rail.as_str())
                    .ok_or_else(|| KsError::UnknownRail(det.rail.clone()))?;
                t[(2 * di, col)] = v[0];
                t[(2 * di + 1, col)] = v[1];
            }
        }
        Ok(t)
    }

    /// How far the transfer matrix is from an isometry.
    pub fn isometry_error(&self) -> Result<f64> {
        let t = self.transfer_matrix()?;
        Ok((t.adjoint() * &t - qubit::identity(4)).norm())
    }

    /// Pull the projector of detector `di` back to the input space.
    pub fn detector_projector(&self, di: usize) -> Result<DMatrix<C64>> {
        let t = self.transfer_matrix()?;
        let block = t.rows(2 * di, 2).into_owned();
        Ok(block.adjoint() * block)
    }
}

/// Which pair of single-particle observables a separate-measurement device
/// resolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Z1Z2,
    Z1X2,
    X1Z2,
    X1X2,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKind::Z1Z2 => write!(f, "Z1Z2"),
            PairKind::Z1X2 => write!(f, "Z1X2"),
            PairKind::X1Z2 => write!(f, "X1Z2"),
            PairKind::X1X2 => write!(f, "X1X2"),
        }
    }
}

/// Device measuring one pair of commuting single-particle observables: an
/// optional beam splitter to rotate the path basis, then one Stern-Gerlach
/// per path.
pub fn separate_device(kind: PairKind) -> DeviceGraph {
    let (path_x, spin_axis, o1, o2) = match kind {
        PairKind::Z1Z2 => (false, Axis::Z, "Z1", "Z2"),
        PairKind::Z1X2 => (false, Axis::X, "Z1", "X2"),
        PairKind::X1Z2 => (true, Axis::Z, "X1", "Z2"),
        PairKind::X1X2 => (true, Axis::X, "X1", "X2"),
    };
    let mut elements = Vec::new();
    let (top, bottom) = if path_x {
        elements.push(Element::BeamSplitter { a: "u".into(), b: "d".into() });
        elements.push(Element::Relabel { from: "u".into(), to: "u'".into() });
        elements.push(Element::Relabel { from: "d".into(), to: "d'".into() });
        ("u'", "d'")
    } else {
        ("u", "d")
    };
    for rail in [top, bottom] {
        elements.push(Element::SternGerlach {
            rail: rail.into(),
            axis: spin_axis,
            plus: format!("{rail}+"),
            minus: format!("{rail}-"),
        });
    }
    let mut detectors = Vec::new();
    for (rail, path_value) in [(top, 1i8), (bottom, -1i8)] {
        for (suffix, spin_value) in [("+", 1i8), ("-", -1i8)] {
            detectors.push(Detector {
                rail: format!("{rail}{suffix}"),
                tags: vec![(o1.to_string(), path_value), (o2.to_string(), spin_value)],
            });
        }
    }
    DeviceGraph { elements, detectors }
}

/// Two-stage device for the joint measurement of the product observables
/// Z1X2 and X1Z2: the first stage separates the Z1X2 eigenspaces without
/// disturbing them, two downstream X1/Z2 devices finish the measurement.
pub fn joint_device() -> DeviceGraph {
    let mut elements = vec![
        Element::SternGerlach { rail: "u".into(), axis: Axis::X, plus: "ux+".into(), minus: "ux-".into() },
        Element::SternGerlach { rail: "d".into(), axis: Axis::X, plus: "dx+".into(), minus: "dx-".into() },
    ];
    // Z1 X2 = +1 rails are (u, x+) and (d, x-); they feed the top device.
    for (a, b, prefix) in [("ux+", "dx-", "top"), ("ux-", "dx+", "bot")] {
        elements.push(Element::BeamSplitter { a: a.into(), b: b.into() });
        elements.push(Element::Relabel { from: a.into(), to: format!("{prefix}_u'") });
        elements.push(Element::Relabel { from: b.into(), to: format!("{prefix}_d'") });
        for path in ["u'", "d'"] {
            elements.push(Element::SternGerlach {
                rail: format!("{prefix}_{path}"),
                axis: Axis::Z,
                plus: format!("{prefix}_{path}+"),
                minus: format!("{prefix}_{path}-"),
            });
        }
    }
    let mut detectors = Vec::new();
    for (prefix, z1x2) in [("top", 1i8), ("bot", -1i8)] {
        for (path, x1) in [("u'", 1i8), ("d'", -1i8)] {
            for (suffix, z2) in [("+", 1i8), ("-", -1i8)] {
                detectors.push(Detector {
                    rail: format!("{prefix}_{path}{suffix}"),
                    tags: vec![
                        ("Z1X2".to_string(), z1x2),
                        ("X1".to_string(), x1),
                        ("Z2".to_string(), z2),
                    ],
                });
            }
        }
    }
    DeviceGraph { elements, detectors }
}

/// Prepare (|u z+⟩ + |d z-⟩)/sqrt(2) by sending a spin-x+ particle through a
/// z-oriented Stern-Gerlach that splits the input rail into u and d.
pub fn prepare_psi1() -> PathSpinState {
    let source = DeviceGraph {
        elements: vec![Element::SternGerlach {
            rail: "a".into(),
            axis: Axis::Z,
            plus: "u".into(),
            minus: "d".into(),
        }],
        detectors: vec![],
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut rails = RailState::new();
    rails.insert("a".into(), [C64::new(s, 0.0), C64::new(s, 0.0)]);
    let out = source.propagate(rails).expect("static rails");
    let zero = [C64::new(0.0, 0.0); 2];
    let u = out.get("u").copied().unwrap_or(zero);
    let d = out.get("d").copied().unwrap_or(zero);
    PathSpinState::new([u[0], u[1], d[0], d[1]])
}

/// Sampled histogram of a device run.
#[derive(Debug, Clone)]
pub struct DetectorOutcome {
    pub rail: String,
    pub tags: Vec<(String, i8)>,
    pub probability: f64,
    pub counts: u64,
}

/// Multinomial counts over `probs`, bit-reproducible for a fixed seed.
pub fn sample_counts(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let mut counts = vec![0u64; probs.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let r: f64 = rng.random::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c < r).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// Run a device on a state and sample a histogram of `shots` detections,
/// bit-reproducible for a fixed seed.
pub fn run_device(
    device: &DeviceGraph,
    s: &PathSpinState,
    shots: u64,
    seed: u64,
) -> Result<Vec<DetectorOutcome>> {
    let probs = device.run(s)?;
    let counts = sample_counts(&probs, shots, seed);
    Ok(device
        .detectors
        .iter()
        .zip(probs)
        .zip(counts)
        .map(|((det, probability), counts)| DetectorOutcome {
            rail: det.rail.clone(),
            tags: det.tags.clone(),
            probability,
            counts,
        })
        .collect())
}

/// Outcome distribution of the joint product-observable measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcome {
    pub z1x2: i8,
    pub x1: i8,
    pub z2: i8,
    pub x1z2: i8,
    pub probability: f64,
}

/// Exact detector distribution of the two-stage joint device; the X1Z2
/// value of each detector is the product of its X1 and Z2 tags.
pub fn run_joint_device(s: &PathSpinState) -> Vec<JointOutcome> {
    run_joint_device_noisy(s, 1.0)
}

/// Same with detector probabilities mixed with white noise,
/// p -> v p + (1-v)/8.
pub fn run_joint_device_noisy(s: &PathSpinState, visibility: f64) -> Vec<JointOutcome> {
    let device = joint_device();
    let probs = device.run(s).expect("joint device rails are static");
    device
        .detectors
        .iter()
        .zip(probs)
        .map(|(det, p)| {
            let tag = |name: &str| det.tags.iter().find(|(t, _)| t == name).unwrap().1;
            let (z1x2, x1, z2) = (tag("Z1X2"), tag("X1"), tag("Z2"));
            JointOutcome {
                z1x2,
                x1,
                z2,
                x1z2: x1 * z2,
                probability: visibility * p + (1.0 - visibility) / 8.0,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// triad sets and coloring
// ---------------------------------------------------------------------------

/// A collection of direction triads (switch positions); the coloring
/// question asks for a 0/1 assignment with exactly one 0 per triad.
#[derive(Debug, Clone)]
pub struct KsSet {
    pub directions: Vec<String>,
    pub triads: Vec<[usize; 3]>,
}

impl KsSet {
    pub fn new(triads_by_label: &[[&str; 3]]) -> Result<Self> {
        let lines: Vec<String> = triads_by_label
            .iter()
            .map(|t| t.join(" "))
            .collect();
        Self::parse(&lines.join("\n"))
    }

    /// Parse the plain-text triad format: one triad per line, three
    /// whitespace-separated labels; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut directions: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut triads = Vec::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let labels: Vec<&str> = line.split_whitespace().collect();
            if labels.len() != 3 {
                return Err(KsError::BadTriadLine {
                    line: line_no + 1,
                    content: raw.to_string(),
                });
            }
            if labels[0] == labels[1] || labels[0] == labels[2] || labels[1] == labels[2] {
                return Err(KsError::RepeatedDirection { line: line_no + 1 });
            }
            let mut triad = [0usize; 3];
            for (slot, label) in labels.iter().enumerate() {
                let next = directions.len();
                let id = *index.entry((*label).to_string()).or_insert_with(|| {
                    directions.push((*label).to_string());
                    next
                });
                triad[slot] = id;
            }
            triads.push(triad);
        }
        Ok(KsSet { directions, triads })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn n_triads(&self) -> usize {
        self.triads.len()
    }
}

/// Result of the coloring search.
#[derive(Debug, Clone)]
pub enum ColoringOutcome {
    /// Lexicographically first satisfying assignment (directions sorted).
    Colorable(BTreeMap<String, u8>),
    /// A minimal sub-collection of triads that is already uncolorable.
    Uncolorable { conflict_core: Vec<[String; 3]> },
}

/// Backtracking search for a 0/1 assignment giving every triad exactly one
/// 0 (sum of values 2). Directions are processed in lexicographic order and
/// value 0 is tried before 1, so a satisfying assignment is the smallest in
/// lexicographic order.
pub fn ks_colorable(set: &KsSet) -> ColoringOutcome {
    match search_assignment(set, &set.triads) {
        Some(values) => {
            let mut map = BTreeMap::new();
            for (label, v) in order_labels(set).into_iter().zip(values) {
                map.insert(set.directions[label].clone(), v);
            }
            ColoringOutcome::Colorable(map)
        }
        None => {
            // Deletion-based minimization: drop any triad whose removal
            // keeps the set uncolorable.
            let mut core: Vec<[usize; 3]> = set.triads.clone();
            let mut i = 0;
            while i < core.len() {
                let mut candidate = core.clone();
                candidate.remove(i);
                if search_assignment(set, &candidate).is_none() {
                    core = candidate;
                } else {
                    i += 1;
                }
            }
            let conflict_core = core
                .iter()
                .map(|t| {
                    [
                        set.directions[t[0]].clone(),
                        set.directions[t[1]].clone(),
                        set.directions[t[2]].clone(),
                    ]
                })
                .collect();
            ColoringOutcome::Uncolorable { conflict_core }
        }
    }
}

/// Direction ids sorted by label.
fn order_labels(set: &KsSet) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..set.directions.len()).collect();
    ids.sort_by(|&a, &b| set.directions[a].cmp(&set.directions[b]));
    ids
}

/// Values in label order for the first satisfying assignment, or None.
fn search_assignment(set: &KsSet, triads: &[[usize; 3]]) -> Option<Vec<u8>> {
    let ordered = order_labels(set);
    let position_of: BTreeMap<usize, usize> =
        ordered.iter().enumerate().map(|(pos, &id)| (id, pos)).collect();
    let n = ordered.len();
    let mut values: Vec<Option<u8>> = vec![None; n];

    fn consistent(
        triads: &[[usize; 3]],
        position_of: &BTreeMap<usize, usize>,
        values: &[Option<u8>],
    ) -> bool {
        for t in triads {
            let mut sum = 0u8;
            let mut unassigned = 0u8;
            for &dir in t {
                match values[position_of[&dir]] {
                    Some(v) => sum += v,
                    None => unassigned += 1,
                }
            }
            if sum > 2 || sum + unassigned < 2 {
                return false;
            }
        }
        true
    }

    fn recurse(
        depth: usize,
        triads: &[[usize; 3]],
        position_of: &BTreeMap<usize, usize>,
        values: &mut Vec<Option<u8>>,
    ) -> bool {
        if depth == values.len() {
            return true;
        }
        for v in [0u8, 1u8] {
            values[depth] = Some(v);
            if consistent(triads, position_of, values)
                && recurse(depth + 1, triads, position_of, values)
            {
                return true;
            }
        }
        values[depth] = None;
        false
    }

    if recurse(0, triads, &position_of, &mut values) {
        Some(values.into_iter().map(|v| v.unwrap()).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// finite-precision inequality
// ---------------------------------------------------------------------------

/// Finite-precision bound report: if each of the first N-1 triads shows the
/// correct sum in a fraction > 1 - epsilon of runs, the hidden-variable
/// intersection carries weight at least 1 - (N-1) epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NchvRunReport {
    pub n_triads: usize,
    pub epsilon: f64,
    pub bound: f64,
    /// Whether a contradiction is testable at all: epsilon < 1/N.
    pub contradiction_testable: bool,
}

pub fn finite_precision_bound(n_triads: usize, epsilon: f64) -> Result<NchvRunReport> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(KsError::BadEpsilon(epsilon));
    }
    if n_triads < 2 {
        return Err(KsError::TooFewTriads(n_triads));
    }
    let bound = (1.0 - (n_triads as f64 - 1.0) * epsilon).clamp(0.0, 1.0);
    Ok(NchvRunReport {
        n_triads,
        epsilon,
        bound,
        contradiction_testable: epsilon < 1.0 / n_triads as f64,
    })
}

/// How triad failures are injected in the Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureModel {
    /// Each of the first N-1 triads fails independently with probability
    /// epsilon.
    Independent,
    /// Failure events are staggered disjoint intervals of one shared
    /// uniform variable: the adversarial case that saturates the bound.
    Staggered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub std_err: f64,
}

/// Empirical measure of hidden variables satisfying all of the first N-1
/// triad constraints. Per-trial RNGs are derived from the seed, so the
/// result does not depend on execution order.
pub fn nchv_montecarlo(
    set: &KsSet,
    epsilon: f64,
    trials: u64,
    seed: u64,
    model: FailureModel,
) -> Result<McEstimate> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(KsError::BadEpsilon(epsilon));
    }
    let n = set.n_triads();
    if n < 2 {
        return Err(KsError::TooFewTriads(n));
    }
    let constrained = (n - 1) as u64;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial.wrapping_mul(0x9E3779B97F4A7C15)));
            let ok = match model {
                FailureModel::Independent => {
                    (0..constrained).all(|_| rng.random::<f64>() >= epsilon)
                }
                FailureModel::Staggered => {
                    let u: f64 = rng.random();
                    // triad i fails iff u falls in [i eps, (i+1) eps) mod 1
                    !(0..constrained).any(|i| {
                        let lo = (i as f64 * epsilon) % 1.0;
                        let hi = lo + epsilon;
                        u >= lo && u < hi || hi > 1.0 && u < hi - 1.0
                    })
                }
            };
            u64::from(ok)
        })
        .sum();
    let p_hat = hits as f64 / trials as f64;
    let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    Ok(McEstimate { p_hat, trials, std_err })
}
