//! Error injection, syndrome extraction, single-error decoding and
//! excitation mobility.
//!
//! Checks and their expected signs. `X_m` is the correction in force (empty
//! before correction), `cob(X_m)` the cubes it flips:
//!
//! | check | expected | determinate |
//! |-------|----------|-------------|
//! | `A_star` | `+1` | always |
//! | `C_c` | `+1` | at `Cluster`; later only if the reduced `C_c` has no ancilla support |
//! | `C_a` | `(−1)^[a ∈ cob(X_m)]` | always |
//! | `B_cube(a)` | `m_a·(−1)^[a ∈ cob(X_m)]` | from `Measured` on |
//!
//! A check is flipped when its value is minus the expected sign. A check
//! that is indeterminate is counted in `indeterminate_checks`, never flagged.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{odd_members, Axis, DualLayer, Lattice, Plane, StarSite, Vertex};
use crate::protocol::{
    ancilla_cluster_operator, code_cluster_operator, cube_operator, solve_correction, star_operator, CorrectionMode,
    Simulation, Stage, Strategy,
};
use crate::stabilizer::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliKind {
    X,
    Y,
    Z,
}

impl PauliKind {
    fn pauli(self) -> Pauli {
        match self {
            PauliKind::X => Pauli::X,
            PauliKind::Y => Pauli::Y,
            PauliKind::Z => Pauli::Z,
        }
    }

    fn has_x(self) -> bool {
        self != PauliKind::Z
    }

    fn has_z(self) -> bool {
        self != PauliKind::X
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorTarget {
    /// Dense code-qubit index.
    Code(usize),
    /// Dense ancilla index.
    Ancilla(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorStage {
    /// Before the ancilla readout (code or ancilla targets).
    PreMeasurement,
    /// After preparation, at any stage (code targets only).
    PostPreparation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub target: ErrorTarget,
    pub pauli: PauliKind,
    pub stage: ErrorStage,
}

impl ErrorEvent {
    pub fn new(target: ErrorTarget, pauli: PauliKind, stage: ErrorStage) -> Self {
        ErrorEvent { target, pauli, stage }
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        match self.target {
            ErrorTarget::Code(c) if c >= lattice.code_count() => {
                Err(Error::InvalidEvent(format!("code qubit {c} out of range")))
            }
            ErrorTarget::Ancilla(a) if a >= lattice.ancilla_count() => {
                Err(Error::InvalidEvent(format!("ancilla {a} out of range")))
            }
            ErrorTarget::Ancilla(_) if self.stage == ErrorStage::PostPreparation => {
                Err(Error::InvalidEvent("ancilla errors are injected before measurement (stage pre)".into()))
            }
            _ => Ok(()),
        }
    }

    fn qubit(&self, lattice: &Lattice) -> usize {
        match self.target {
            ErrorTarget::Code(c) => c,
            ErrorTarget::Ancilla(a) => lattice.ancilla_qubit(a),
        }
    }
}

/// Written and parsed as `<X|Y|Z>:<cN|aN>:<pre|post>`.
impl fmt::Display for ErrorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.pauli {
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        };
        let (k, i) = match self.target {
            ErrorTarget::Code(c) => ('c', c),
            ErrorTarget::Ancilla(a) => ('a', a),
        };
        let s = match self.stage {
            ErrorStage::PreMeasurement => "pre",
            ErrorStage::PostPreparation => "post",
        };
        write!(f, "{p}:{k}{i}:{s}")
    }
}

impl FromStr for ErrorEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidEvent(format!("expected <X|Y|Z>:<cN|aN>:<pre|post>, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [p, t, st] = parts.as_slice() else {
            return Err(bad());
        };
        let pauli = match *p {
            "X" | "x" => PauliKind::X,
            "Y" | "y" => PauliKind::Y,
            "Z" | "z" => PauliKind::Z,
            _ => return Err(bad()),
        };
        let idx = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        let target = if let Some(rest) = t.strip_prefix('c') {
            ErrorTarget::Code(idx(rest)?)
        } else if let Some(rest) = t.strip_prefix('a') {
            ErrorTarget::Ancilla(idx(rest)?)
        } else {
            return Err(bad());
        };
        let stage = match *st {
            "pre" => ErrorStage::PreMeasurement,
            "post" => ErrorStage::PostPreparation,
            _ => return Err(bad()),
        };
        Ok(ErrorEvent { target, pauli, stage })
    }
}

/// Apply the event's Pauli to the state and record it as ground truth.
pub fn inject(sim: &mut Simulation, event: ErrorEvent) -> Result<()> {
    event.validate(sim.lattice())?;
    if event.stage == ErrorStage::PreMeasurement && sim.stage() != Stage::Cluster {
        return Err(Error::InvalidEvent(format!("pre-measurement error injected at stage {:?}", sim.stage())));
    }
    let n = sim.lattice().total_qubits();
    let p = PauliString::single(n, event.qubit(sim.lattice()), event.pauli.pauli());
    sim.apply_pauli(&p)?;
    sim.note_injected(event);
    Ok(())
}

// ---- reports --------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Clean,
    IsolatedFracton,
    FractonQuadruple,
    FractonDipole,
    LineonPair,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeReport {
    pub stage: Stage,
    /// Ancilla indices, ascending.
    pub flipped_cubes: Vec<usize>,
    pub flipped_stars: Vec<StarSite>,
    /// Code indices whose `C_c` is violated.
    pub violated_code_parities: Vec<usize>,
    /// Ancilla indices whose `C_a` is violated.
    pub violated_ancilla_parities: Vec<usize>,
    /// Dual layers whose recorded outcomes multiply to −1.
    pub violated_layers: Vec<DualLayer>,
    /// `None` before the readout.
    pub record_consistent: Option<bool>,
    pub indeterminate_checks: usize,
    pub classification: Classification,
}

impl SyndromeReport {
    pub fn is_clean(&self) -> bool {
        self.classification == Classification::Clean
    }
}

pub fn extract_syndromes(sim: &Simulation) -> Result<SyndromeReport> {
    let lattice = sim.lattice();
    let stage = sim.stage();
    let frame_cubes = match (stage, sim.frame()) {
        (Stage::Corrected, Some(f)) => f.flipped_cubes(lattice),
        _ => Vec::new(),
    };
    let mut in_cob = vec![false; lattice.ancilla_count()];
    for a in frame_cubes {
        in_cob[a] = true;
    }
    let mut indeterminate = 0;
    let mut check = |p: &PauliString, expected: i8| -> Result<bool> {
        let v = sim.expectation(p)?;
        if v == 0 {
            indeterminate += 1;
        }
        Ok(v == -expected)
    };
    let sign = |b: bool| if b { -1 } else { 1 };

    let mut flipped_cubes = Vec::new();
    if let Some(record) = sim.record() {
        for (a, &odd) in in_cob.iter().enumerate() {
            if check(&cube_operator(lattice, a), record.outcomes[a] * sign(odd))? {
                flipped_cubes.push(a);
            }
        }
    }
    let mut flipped_stars = Vec::new();
    for (i, s) in lattice.stars().iter().enumerate() {
        if check(&star_operator(lattice, i), 1)? {
            flipped_stars.push(s.site);
        }
    }
    let mut violated_code_parities = Vec::new();
    for c in 0..lattice.code_count() {
        if check(&code_cluster_operator(lattice, c), 1)? {
            violated_code_parities.push(c);
        }
    }
    let mut violated_ancilla_parities = Vec::new();
    for (a, &odd) in in_cob.iter().enumerate() {
        if check(&ancilla_cluster_operator(lattice, a), sign(odd))? {
            violated_ancilla_parities.push(a);
        }
    }
    let (violated_layers, record_consistent) = match sim.record() {
        Some(r) => (r.violated_layers(lattice), Some(solve_correction(lattice, r).is_ok())),
        None => (Vec::new(), None),
    };
    let mut report = SyndromeReport {
        stage,
        flipped_cubes,
        flipped_stars,
        violated_code_parities,
        violated_ancilla_parities,
        violated_layers,
        record_consistent,
        indeterminate_checks: indeterminate,
        classification: Classification::Unclassified,
    };
    report.classification = classify(&report, lattice);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineonPair {
    pub axis: Axis,
    pub ends: [Vertex; 2],
}

/// The lineon pair described by a set of flipped stars, if any: two
/// vertices differing only along `axis`, each carrying exactly the two stars
/// whose planes contain `axis`.
pub fn lineon_pair(stars: &[StarSite], lattice: &Lattice) -> Option<LineonPair> {
    if stars.len() != 4 {
        return None;
    }
    let mut by_vertex: BTreeMap<usize, (Vertex, Vec<Plane>)> = BTreeMap::new();
    for s in stars {
        by_vertex.entry(lattice.vertex_slot(s.vertex)).or_insert_with(|| (s.vertex, Vec::new())).1.push(s.plane);
    }
    if by_vertex.len() != 2 {
        return None;
    }
    let mut axes = Vec::new();
    let mut ends = Vec::new();
    for (v, planes) in by_vertex.values() {
        let [p, q] = planes.as_slice() else {
            return None;
        };
        let axis = Axis::ALL.into_iter().find(|&a| p.contains(a) && q.contains(a))?;
        axes.push(axis);
        ends.push(*v);
    }
    if axes[0] != axes[1] {
        return None;
    }
    let axis = axes[0];
    let differs: Vec<usize> = (0..3).filter(|&i| ends[0][i] != ends[1][i]).collect();
    if differs != [axis.index()] {
        return None;
    }
    Some(LineonPair { axis, ends: [ends[0], ends[1]] })
}

pub fn classify(report: &SyndromeReport, lattice: &Lattice) -> Classification {
    let cubes = &report.flipped_cubes;
    let stars = &report.flipped_stars;
    if cubes.is_empty()
        && stars.is_empty()
        && report.violated_code_parities.is_empty()
        && report.violated_ancilla_parities.is_empty()
        && report.violated_layers.is_empty()
    {
        return Classification::Clean;
    }
    if stars.is_empty() {
        if cubes.len() == 4 && (0..lattice.code_count()).any(|e| lattice.edge_cubes_odd(e) == *cubes) {
            return Classification::FractonQuadruple;
        }
        if cubes.len() == 2 && lattice.face_adjacent_axis(cubes[0], cubes[1]).is_some() {
            return Classification::FractonDipole;
        }
        if cubes.len() == 1
            || (cubes.is_empty()
                && report.violated_code_parities.is_empty()
                && report.violated_ancilla_parities.len() == 1)
        {
            return Classification::IsolatedFracton;
        }
    }
    if cubes.is_empty() && lineon_pair(stars, lattice).is_some() {
        return Classification::LineonPair;
    }
    Classification::Unclassified
}

// ---- single-error decoding ------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "events", rename_all = "kebab-case")]
pub enum Decode {
    Clean,
    Unique(ErrorEvent),
    Ambiguous(Vec<ErrorEvent>),
    NoSingleError,
}

#[derive(Debug, PartialEq, Eq)]
struct Signature {
    cubes: Vec<usize>,
    stars: Vec<usize>,
    code: Vec<usize>,
    ancilla: Vec<usize>,
    layers: Vec<DualLayer>,
}

fn predicted(lattice: &Lattice, stage: Stage, event: &ErrorEvent) -> Signature {
    let mut sig = Signature { cubes: vec![], stars: vec![], code: vec![], ancilla: vec![], layers: vec![] };
    match event.target {
        ErrorTarget::Code(e) => {
            if event.pauli.has_x() {
                let cob = lattice.edge_cubes_odd(e);
                if stage >= Stage::Measured {
                    sig.cubes = cob.clone();
                }
                sig.ancilla = cob;
            }
            if event.pauli.has_z() {
                sig.stars = lattice.edge_stars(e).to_vec();
                if stage == Stage::Cluster || lattice.edge_cubes_odd(e).is_empty() {
                    sig.code = vec![e];
                }
            }
        }
        ErrorTarget::Ancilla(a) => {
            if event.pauli.has_z() {
                sig.ancilla = vec![a];
                if stage >= Stage::Measured {
                    sig.cubes = vec![a];
                    let id = lattice.ancilla_id(a).0;
                    sig.layers = lattice.dual_layers().into_iter().filter(|l| id[l.axis.index()] == l.index).collect();
                }
            }
            if event.pauli.has_x() && stage == Stage::Cluster {
                sig.code = odd_members(lattice.ancilla_adj(a));
            }
        }
    }
    for v in [&mut sig.cubes, &mut sig.stars, &mut sig.code, &mut sig.ancilla] {
        v.sort_unstable();
    }
    sig.layers.sort_unstable();
    sig
}

/// Single-error hypotheses tried by the decoder at a stage. Ancilla `X` is
/// gauge once the ancillae are read out, and ancilla `Y` then acts as `Z`.
pub fn candidate_events(lattice: &Lattice, stage: Stage) -> Vec<ErrorEvent> {
    let mut out = Vec::new();
    for c in 0..lattice.code_count() {
        for p in [PauliKind::X, PauliKind::Y, PauliKind::Z] {
            out.push(ErrorEvent::new(ErrorTarget::Code(c), p, ErrorStage::PostPreparation));
        }
    }
    let ancilla_paulis: &[PauliKind] =
        if stage == Stage::Cluster { &[PauliKind::X, PauliKind::Z] } else { &[PauliKind::Z] };
    for a in 0..lattice.ancilla_count() {
        for &p in ancilla_paulis {
            out.push(ErrorEvent::new(ErrorTarget::Ancilla(a), p, ErrorStage::PreMeasurement));
        }
    }
    out
}

/// Every single-error explanation of a report.
pub fn explanations(report: &SyndromeReport, lattice: &Lattice) -> Vec<ErrorEvent> {
    let mut stars: Vec<usize> = report.flipped_stars.iter().filter_map(|&s| lattice.star_index(s)).collect();
    stars.sort_unstable();
    let mut layers = report.violated_layers.clone();
    layers.sort_unstable();
    let observed = Signature {
        cubes: report.flipped_cubes.clone(),
        stars,
        code: report.violated_code_parities.clone(),
        ancilla: report.violated_ancilla_parities.clone(),
        layers,
    };
    candidate_events(lattice, report.stage)
        .into_iter()
        .filter(|e| predicted(lattice, report.stage, e) == observed)
        .collect()
}

pub fn correct_single(report: &SyndromeReport, lattice: &Lattice) -> Decode {
    if report.is_clean() {
        return Decode::Clean;
    }
    let mut found = explanations(report, lattice);
    match found.len() {
        0 => Decode::NoSingleError,
        1 => Decode::Unique(found.remove(0)),
        _ => Decode::Ambiguous(found),
    }
}

/// Undo a decoded error. A readout flip (ancilla `Z` after measurement) is
/// undone on the ancilla, the record entry is flipped and `X_m` re-solved.
pub fn apply_proposal(sim: &mut Simulation, event: &ErrorEvent) -> Result<()> {
    event.validate(sim.lattice())?;
    let lattice = sim.lattice_arc().clone();
    let n = lattice.total_qubits();
    let q = event.qubit(&lattice);
    match (event.target, sim.stage()) {
        (ErrorTarget::Ancilla(a), Stage::Measured | Stage::Corrected) => {
            if event.pauli == PauliKind::X {
                return Err(Error::InvalidEvent("ancilla X is gauge after readout".into()));
            }
            sim.apply_pauli(&PauliString::single(n, q, Pauli::Z))?;
            let mut record = sim.record().expect("measured").clone();
            record.flip(a);
            sim.resolve_with_record(record)?;
        }
        _ => sim.apply_pauli(&PauliString::single(n, q, event.pauli.pauli()))?,
    }
    Ok(())
}

// ---- mobility -------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DipoleStep {
    pub edge: usize,
    pub report: SyndromeReport,
    /// Flipped cubes minus the excitations present besides the dipole.
    pub moving_cubes: Vec<usize>,
    /// The moving set, when it is still two face-adjacent cubes.
    pub dipole: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DipoleTrace {
    pub initial: SyndromeReport,
    pub steps: Vec<DipoleStep>,
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut all = a.to_vec();
    all.extend(b);
    odd_members(&all)
}

/// Apply `X` along `path` and follow the dipole. The first edge must belong
/// to a dipole cube, each further edge must share a cube with the previous.
pub fn move_fracton_dipole(sim: &mut Simulation, dipole: [usize; 2], path: &[usize]) -> Result<DipoleTrace> {
    let lattice = sim.lattice_arc().clone();
    if sim.stage() == Stage::Cluster {
        return Err(Error::Stage("cube syndromes need the ancilla readout".into()));
    }
    if dipole.iter().any(|&a| a >= lattice.ancilla_count())
        || lattice.face_adjacent_axis(dipole[0], dipole[1]).is_none()
    {
        return Err(Error::InvalidChain(format!("cubes {dipole:?} are not a face-adjacent pair")));
    }
    let initial = extract_syndromes(sim)?;
    if !dipole.iter().all(|a| initial.flipped_cubes.contains(a)) {
        return Err(Error::InvalidChain("dipole cubes are not excited".into()));
    }
    for (i, &e) in path.iter().enumerate() {
        if e >= lattice.code_count() {
            return Err(Error::InvalidChain(format!("edge {e} out of range")));
        }
        let ok = if i == 0 {
            dipole.iter().any(|&a| lattice.ancilla_adj(a).contains(&e))
        } else {
            lattice.code_adj(e).iter().any(|a| lattice.code_adj(path[i - 1]).contains(a))
        };
        if !ok {
            return Err(Error::InvalidChain(format!("step {i} (edge {e}) is not adjacent to the chain")));
        }
    }
    let mut sorted = dipole.to_vec();
    sorted.sort_unstable();
    let background = sym_diff(&initial.flipped_cubes, &sorted);
    let mut steps = Vec::with_capacity(path.len());
    for &e in path {
        inject(sim, ErrorEvent::new(ErrorTarget::Code(e), PauliKind::X, ErrorStage::PostPreparation))?;
        let report = extract_syndromes(sim)?;
        let moving_cubes = sym_diff(&report.flipped_cubes, &background);
        let dipole = match moving_cubes.as_slice() {
            &[a, b] if lattice.face_adjacent_axis(a, b).is_some() => Some([a, b]),
            _ => None,
        };
        steps.push(DipoleStep { edge: e, report, moving_cubes, dipole });
    }
    Ok(DipoleTrace { initial, steps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMove {
    pub axis: Axis,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineonStep {
    pub edge: usize,
    pub report: SyndromeReport,
    pub pair: Option<LineonPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineonTrace {
    pub initial: SyndromeReport,
    pub steps: Vec<LineonStep>,
}

/// Apply `Z` on successive edges along `mv.axis`, starting at `pair.ends[1]`.
pub fn move_lineon(sim: &mut Simulation, pair: LineonPair, mv: LineMove) -> Result<LineonTrace> {
    let lattice = sim.lattice_arc().clone();
    let initial = extract_syndromes(sim)?;
    if lineon_pair(&initial.flipped_stars, &lattice) != Some(pair) {
        return Err(Error::InvalidChain("the given lineon pair is not the current star syndrome".into()));
    }
    let mut lead = pair.ends[1];
    let mut steps = Vec::with_capacity(mv.steps);
    for _ in 0..mv.steps {
        let edge = lattice
            .code_index(crate::lattice::CodeQubitId { vertex: lead, axis: mv.axis })
            .ok_or_else(|| Error::InvalidChain(format!("no {} edge at {lead:?}", mv.axis)))?;
        inject(sim, ErrorEvent::new(ErrorTarget::Code(edge), PauliKind::Z, ErrorStage::PostPreparation))?;
        let report = extract_syndromes(sim)?;
        let pair = lineon_pair(&report.flipped_stars, &lattice);
        steps.push(LineonStep { edge, report, pair });
        lead = lattice.shift(lead, mv.axis, 1).ok_or_else(|| Error::InvalidChain("line leaves the lattice".into()))?;
    }
    Ok(LineonTrace { initial, steps })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmobilityResult {
    pub max_edges: usize,
    pub subsets_checked: u64,
    /// An edge set moving a single-cube syndrome to another cube, if any.
    pub counterexample: Option<Vec<usize>>,
}

/// Exhaustive search over edge sets of size `1..=max_edges` for one whose
/// cube coboundary has weight exactly 2, i.e. which would carry an isolated
/// fracton from one cube to another.
pub fn fracton_immobility(lattice: &Lattice, max_edges: usize) -> Result<ImmobilityResult> {
    if lattice.ancilla_count() > 128 {
        return Err(Error::Unsupported("immobility search is limited to 128 cubes".into()));
    }
    let masks: Vec<u128> =
        (0..lattice.code_count()).map(|e| lattice.edge_cubes_odd(e).iter().fold(0u128, |m, &a| m | (1 << a))).collect();
    let mut checked = 0u64;
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        masks: &[u128],
        start: usize,
        acc: u128,
        depth: usize,
        stack: &mut Vec<usize>,
        checked: &mut u64,
    ) -> Option<Vec<usize>> {
        for e in start..masks.len() {
            let m = acc ^ masks[e];
            stack.push(e);
            *checked += 1;
            if m.count_ones() == 2 {
                return Some(stack.clone());
            }
            if depth > 1 {
                if let Some(found) = walk(masks, e + 1, m, depth - 1, stack, checked) {
                    return Some(found);
                }
            }
            stack.pop();
        }
        None
    }
    let counterexample = if max_edges == 0 { None } else { walk(&masks, 0, 0, max_edges, &mut stack, &mut checked) };
    Ok(ImmobilityResult { max_edges, subsets_checked: checked, counterexample })
}

// ---- sweeps ---------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    CodeX,
    CodeY,
    CodeZ,
    AncillaX,
    AncillaY,
    AncillaZ,
    All,
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "code-x" => SweepKind::CodeX,
            "code-y" => SweepKind::CodeY,
            "code-z" => SweepKind::CodeZ,
            "ancilla-x" => SweepKind::AncillaX,
            "ancilla-y" => SweepKind::AncillaY,
            "ancilla-z" => SweepKind::AncillaZ,
            "all" => SweepKind::All,
            _ => return Err(Error::InvalidEvent(format!("unknown sweep {s:?}"))),
        })
    }
}

/// Every single error of a kind: code errors after correction, ancilla
/// errors before the readout.
pub fn sweep_events(lattice: &Lattice, kind: SweepKind) -> Vec<ErrorEvent> {
    let code = |p| {
        (0..lattice.code_count())
            .map(move |c| ErrorEvent::new(ErrorTarget::Code(c), p, ErrorStage::PostPreparation))
            .collect::<Vec<_>>()
    };
    let anc = |p| {
        (0..lattice.ancilla_count())
            .map(move |a| ErrorEvent::new(ErrorTarget::Ancilla(a), p, ErrorStage::PreMeasurement))
            .collect::<Vec<_>>()
    };
    match kind {
        SweepKind::CodeX => code(PauliKind::X),
        SweepKind::CodeY => code(PauliKind::Y),
        SweepKind::CodeZ => code(PauliKind::Z),
        SweepKind::AncillaX => anc(PauliKind::X),
        SweepKind::AncillaY => anc(PauliKind::Y),
        SweepKind::AncillaZ => anc(PauliKind::Z),
        SweepKind::All => [PauliKind::X, PauliKind::Y, PauliKind::Z]
            .into_iter()
            .flat_map(|p| code(p).into_iter().chain(anc(p)))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub events: Vec<ErrorEvent>,
    pub report: SyndromeReport,
    pub decode: Decode,
    /// Report after applying the (first) proposed correction.
    pub corrected: Option<SyndromeReport>,
    pub restored_clean: bool,
    /// How many of the proposed explanations each restore a clean report.
    pub candidates_restoring_clean: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub runs: usize,
    pub detected: usize,
    pub action_free: usize,
    pub unique: usize,
    pub ambiguous: usize,
    pub none: usize,
    pub restored_clean: usize,
    pub inconsistent: usize,
    pub quadruples: usize,
    pub lineons: usize,
}

impl SweepSummary {
    pub fn add(&mut self, e: &SweepEntry) {
        self.runs += 1;
        if e.report.is_clean() {
            self.action_free += 1;
        } else {
            self.detected += 1;
        }
        match e.decode {
            Decode::Unique(_) => self.unique += 1,
            Decode::Ambiguous(_) => self.ambiguous += 1,
            Decode::NoSingleError => self.none += 1,
            Decode::Clean => {}
        }
        if e.restored_clean {
            self.restored_clean += 1;
        }
        if e.report.record_consistent == Some(false) {
            self.inconsistent += 1;
        }
        match e.report.classification {
            Classification::FractonQuadruple => self.quadruples += 1,
            Classification::LineonPair => self.lineons += 1,
            _ => {}
        }
    }
}

/// Settings shared by every run of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSettings {
    pub strategy: Strategy,
    pub mode: CorrectionMode,
    pub seed: u64,
}

/// Prepare, inject, measure, correct; `PreMeasurement` events go in before
/// the readout, the rest after correction (or after a failed correction).
pub fn run_with_events(
    lattice: &std::sync::Arc<Lattice>,
    settings: RunSettings,
    stream: u64,
    events: &[ErrorEvent],
) -> Result<Simulation> {
    let mut sim = Simulation::new(lattice.clone(), settings.strategy, settings.mode, settings.seed, stream);
    for e in events.iter().filter(|e| e.stage == ErrorStage::PreMeasurement) {
        inject(&mut sim, *e)?;
    }
    sim.measure()?;
    match sim.correct() {
        Ok(_) | Err(Error::InconsistentRecord { .. }) => {}
        Err(e) => return Err(e),
    }
    for e in events.iter().filter(|e| e.stage == ErrorStage::PostPreparation) {
        inject(&mut sim, *e)?;
    }
    Ok(sim)
}

fn restores(sim: &Simulation, e: &ErrorEvent) -> Result<(bool, SyndromeReport)> {
    let mut s = sim.clone();
    apply_proposal(&mut s, e)?;
    let r = extract_syndromes(&s)?;
    Ok((r.is_clean(), r))
}

pub fn sweep_entry(
    lattice: &std::sync::Arc<Lattice>,
    settings: RunSettings,
    index: usize,
    events: &[ErrorEvent],
) -> Result<SweepEntry> {
    let sim = run_with_events(lattice, settings, index as u64, events)?;
    let report = extract_syndromes(&sim)?;
    let decode = correct_single(&report, lattice);
    let (corrected, restored_clean, candidates_restoring_clean) = match &decode {
        Decode::Clean => (None, true, 0),
        Decode::NoSingleError => (None, false, 0),
        Decode::Unique(e) => {
            let (ok, r) = restores(&sim, e)?;
            (Some(r), ok, ok as usize)
        }
        Decode::Ambiguous(list) => {
            let mut first = None;
            let mut count = 0;
            for e in list {
                let (ok, r) = restores(&sim, e)?;
                count += ok as usize;
                first.get_or_insert((ok, r));
            }
            let (ok, r) = first.expect("ambiguous lists are non-empty");
            (Some(r), ok, count)
        }
    };
    Ok(SweepEntry {
        index,
        events: events.to_vec(),
        report,
        decode,
        corrected,
        restored_clean,
        candidates_restoring_clean,
    })
}

/// One run per event, in parallel; run `i` uses stream `i`.
pub fn sweep(
    lattice: &std::sync::Arc<Lattice>,
    settings: RunSettings,
    events: &[ErrorEvent],
) -> Result<(Vec<SweepEntry>, SweepSummary)> {
    let entries = events
        .par_iter()
        .enumerate()
        .map(|(i, e)| sweep_entry(lattice, settings, i, std::slice::from_ref(e)))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = SweepSummary::default();
    for e in &entries {
        summary.add(e);
    }
    Ok((entries, summary))
}
