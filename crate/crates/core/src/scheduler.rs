//! Gate schedules for cluster preparation and their circuit emission.
//!
//! A [`Schedule`] is a list of rounds; each round holds gate groups that run
//! in parallel. A group is one ancilla together with the code qubits it is
//! entangled with in that round: a single target for the movement strategy,
//! all twelve edges for a CZ12 group.
//!
//! Two parallelism rules are certified per round:
//! * movement rounds are qubit-disjoint;
//! * CZ12 rounds contain no two cubes sharing a vertex (blockade rule).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::protocol::Strategy;
use crate::stabilizer::{Basis, Circuit, Gate, Instruction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateGroup {
    pub ancilla: usize,
    pub targets: Vec<usize>,
}

/// Evidence that a round obeys its parallelism rule, recomputed by
/// [`validate_schedule`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCertificate {
    pub label: String,
    pub qubit_disjoint: bool,
    pub cubes_vertex_disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub groups: Vec<GateGroup>,
    pub certificate: RoundCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coloring {
    /// Movement strategy: no coloring.
    None,
    /// Colour classes by coordinate parity.
    Parity,
    /// First-fit colouring of the vertex-sharing conflict graph.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub strategy: Strategy,
    pub coloring: Coloring,
    pub code_count: usize,
    pub ancilla_count: usize,
    pub rounds: Vec<Round>,
}

impl Schedule {
    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    pub fn pair_count(&self) -> usize {
        self.rounds.iter().flat_map(|r| &r.groups).map(|g| g.targets.len()).sum()
    }
}

pub const SCHEDULE_SCHEMA: &str = "xcube.schedule/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub schema: String,
    pub depth: usize,
    #[serde(flatten)]
    pub schedule: Schedule,
}

impl From<&Schedule> for ScheduleDocument {
    fn from(s: &Schedule) -> Self {
        ScheduleDocument { schema: SCHEDULE_SCHEMA.into(), depth: s.depth(), schedule: s.clone() }
    }
}

fn certify(lattice: &Lattice, label: String, groups: &[GateGroup]) -> RoundCertificate {
    let mut used = vec![false; lattice.total_qubits()];
    let mut qubit_disjoint = true;
    for g in groups {
        let mut qs: Vec<usize> = g.targets.clone();
        qs.sort_unstable();
        qs.dedup();
        qs.push(lattice.ancilla_qubit(g.ancilla));
        for q in qs {
            if std::mem::replace(&mut used[q], true) {
                qubit_disjoint = false;
            }
        }
    }
    let mut cubes_vertex_disjoint = true;
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            if lattice.cubes_share_vertex(a.ancilla, b.ancilla) {
                cubes_vertex_disjoint = false;
            }
        }
    }
    RoundCertificate { label, qubit_disjoint, cubes_vertex_disjoint }
}

/// Twelve rounds; round `i` pairs every ancilla with its `i`-th edge.
pub fn movement_schedule(lattice: &Lattice) -> Schedule {
    let rounds = (0..12)
        .map(|i| {
            let groups: Vec<GateGroup> = (0..lattice.ancilla_count())
                .map(|a| GateGroup { ancilla: a, targets: vec![lattice.ancilla_adj(a)[i]] })
                .collect();
            let certificate = certify(lattice, format!("neighbour {i}"), &groups);
            Round { groups, certificate }
        })
        .collect();
    Schedule {
        strategy: Strategy::Movement12,
        coloring: Coloring::None,
        code_count: lattice.code_count(),
        ancilla_count: lattice.ancilla_count(),
        rounds,
    }
}

fn cz12_rounds(lattice: &Lattice, colors: &[usize], labels: impl Fn(usize) -> String) -> Vec<Round> {
    let classes = colors.iter().copied().max().map_or(0, |m| m + 1);
    (0..classes)
        .filter_map(|k| {
            let groups: Vec<GateGroup> = (0..lattice.ancilla_count())
                .filter(|&a| colors[a] == k)
                .map(|a| GateGroup { ancilla: a, targets: lattice.ancilla_adj(a).to_vec() })
                .collect();
            if groups.is_empty() {
                return None;
            }
            let certificate = certify(lattice, labels(k), &groups);
            Some(Round { groups, certificate })
        })
        .collect()
}

/// Parity-coloured CZ12 rounds: 4 when `lz = 1`, 8 otherwise.
///
/// Periodic lattices need even `lx`, `ly` and `lz ∈ {1} ∪ 2ℕ`, otherwise the
/// colour classes do not close around the torus.
pub fn cz12_schedule(lattice: &Lattice) -> Result<Schedule> {
    let spec = lattice.spec();
    if spec.is_periodic() {
        for (axis, len) in [('x', spec.lx), ('y', spec.ly)] {
            if len % 2 == 1 {
                return Err(Error::ColoringDoesNotWrap { axis, len });
            }
        }
        if spec.lz > 1 && spec.lz % 2 == 1 {
            return Err(Error::ColoringDoesNotWrap { axis: 'z', len: spec.lz });
        }
    }
    let colors: Vec<usize> = lattice
        .ancilla_ids()
        .iter()
        .map(|id| {
            let [x, y, z] = id.0;
            let base = (x % 2) + 2 * (y % 2);
            if spec.lz == 1 {
                base
            } else {
                base + 4 * (z % 2)
            }
        })
        .collect();
    let rounds = cz12_rounds(lattice, &colors, |k| format!("parity {}{}{}", k & 1, (k >> 1) & 1, (k >> 2) & 1));
    Ok(Schedule {
        strategy: Strategy::Cz12Colored,
        coloring: Coloring::Parity,
        code_count: lattice.code_count(),
        ancilla_count: lattice.ancilla_count(),
        rounds,
    })
}

/// First-fit colouring in ascending ancilla order; valid on every lattice.
pub fn cz12_schedule_greedy(lattice: &Lattice) -> Schedule {
    let n = lattice.ancilla_count();
    let mut colors = vec![usize::MAX; n];
    for a in 0..n {
        let taken: Vec<usize> = (0..a).filter(|&b| lattice.cubes_share_vertex(a, b)).map(|b| colors[b]).collect();
        colors[a] = (0..).find(|c| !taken.contains(c)).unwrap();
    }
    let rounds = cz12_rounds(lattice, &colors, |k| format!("greedy {k}"));
    Schedule {
        strategy: Strategy::Cz12Colored,
        coloring: Coloring::Greedy,
        code_count: lattice.code_count(),
        ancilla_count: lattice.ancilla_count(),
        rounds,
    }
}

/// The schedule used for preparation: CZ12 falls back to the greedy
/// colouring when parity classes do not wrap.
pub fn preparation_schedule(lattice: &Lattice, strategy: Strategy) -> Schedule {
    match strategy {
        Strategy::Movement12 => movement_schedule(lattice),
        Strategy::Cz12Colored => cz12_schedule(lattice).unwrap_or_else(|_| cz12_schedule_greedy(lattice)),
    }
}

/// Independent re-check of coverage and per-round rules. Certificates must
/// match the recomputed ones.
pub fn validate_schedule(lattice: &Lattice, schedule: &Schedule) -> Result<()> {
    if schedule.code_count != lattice.code_count() || schedule.ancilla_count != lattice.ancilla_count() {
        return Err(Error::ScheduleViolation("schedule built for a different lattice".into()));
    }
    let mut covered: Vec<(usize, usize)> = Vec::new();
    for (ri, round) in schedule.rounds.iter().enumerate() {
        let mut seen_ancilla = vec![false; lattice.ancilla_count()];
        for g in &round.groups {
            if g.ancilla >= lattice.ancilla_count() {
                return Err(Error::ScheduleViolation(format!("round {ri}: ancilla {} out of range", g.ancilla)));
            }
            if std::mem::replace(&mut seen_ancilla[g.ancilla], true) {
                return Err(Error::ScheduleViolation(format!("round {ri}: ancilla {} twice", g.ancilla)));
            }
            covered.extend(g.targets.iter().map(|&c| (g.ancilla, c)));
        }
        let cert = certify(lattice, round.certificate.label.clone(), &round.groups);
        if cert != round.certificate {
            return Err(Error::ScheduleViolation(format!("round {ri}: certificate does not match its groups")));
        }
        match schedule.strategy {
            Strategy::Movement12 if !cert.qubit_disjoint => {
                return Err(Error::ScheduleViolation(format!("round {ri}: a qubit is used twice")));
            }
            Strategy::Cz12Colored if !cert.cubes_vertex_disjoint => {
                return Err(Error::ScheduleViolation(format!(
                    "round {ri}: two cubes sharing a vertex run in parallel"
                )));
            }
            _ => {}
        }
    }
    let mut expected: Vec<(usize, usize)> =
        (0..lattice.ancilla_count()).flat_map(|a| lattice.ancilla_adj(a).iter().map(move |&c| (a, c))).collect();
    covered.sort_unstable();
    expected.sort_unstable();
    if covered != expected {
        return Err(Error::ScheduleViolation(
            "covered (ancilla, code) pairs differ from the adjacency multiset".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitForm {
    /// `H` on all qubits, CZ/CZ12 rounds, `MX` on ancillae.
    Cz,
    /// Ancillae stay in `|0⟩`: `H` on code qubits, `CNOT(code → ancilla)`
    /// rounds, `MZ` on ancillae.
    DynamicCnot,
}

/// Circuit for a schedule.
///
/// Moment layout: one initialisation moment, the entangling moments, one
/// readout moment. In CZ form each round is one moment. In DynamicCNOT form
/// a movement round is one moment and a CZ12 round expands into twelve, one
/// per target slot, since the CNOTs of a group share their ancilla.
///
/// Outcome mapping: bit `m_a` of either form gives the ancilla eigenvalue
/// `(-1)^bit`. The Hadamards conjugating each CZ into a CNOT cancel on the
/// ancilla between initialisation and readout, so the two forms consume the
/// same random bits in the same order and leave identical code states.
pub fn emit_circuit(schedule: &Schedule, form: CircuitForm) -> Circuit {
    let code = schedule.code_count;
    let n = code + schedule.ancilla_count;
    let mut c = Circuit::new(n, Some(code));
    let init = match form {
        CircuitForm::Cz => n,
        CircuitForm::DynamicCnot => code,
    };
    for q in 0..init {
        c.push_gate(Gate::H(q));
    }
    for round in &schedule.rounds {
        match form {
            CircuitForm::Cz => {
                c.tick();
                for g in &round.groups {
                    let ctrl = code + g.ancilla;
                    if let Ok(targets) = <[usize; 12]>::try_from(g.targets.as_slice()) {
                        c.push_gate(Gate::Cz12 { control: ctrl, targets });
                    } else {
                        for &t in &g.targets {
                            c.push_gate(Gate::Cz(ctrl, t));
                        }
                    }
                }
            }
            CircuitForm::DynamicCnot => {
                let slots = round.groups.iter().map(|g| g.targets.len()).max().unwrap_or(0);
                for s in 0..slots {
                    c.tick();
                    for g in &round.groups {
                        if let Some(&t) = g.targets.get(s) {
                            c.push_gate(Gate::Cnot(t, code + g.ancilla));
                        }
                    }
                }
            }
        }
    }
    c.tick();
    let basis = match form {
        CircuitForm::Cz => Basis::X,
        CircuitForm::DynamicCnot => Basis::Z,
    };
    for a in 0..schedule.ancilla_count {
        c.push(Instruction::Measure { basis, qubit: code + a, bit: a });
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;

    fn lat(spec: LatticeSpec) -> Lattice {
        Lattice::build(spec).unwrap()
    }

    #[test]
    fn movement_shape() {
        let l = lat(LatticeSpec::periodic(2, 2, 2).unwrap());
        let s = movement_schedule(&l);
        assert_eq!(s.depth(), 12);
        assert!(s.rounds.iter().all(|r| r.groups.len() == 8));
        assert_eq!(s.pair_count(), 96);
        validate_schedule(&l, &s).unwrap();
        let l = lat(LatticeSpec::periodic(2, 2, 1).unwrap());
        let s = movement_schedule(&l);
        assert!(s.rounds.iter().all(|r| r.groups.len() == 4));
        validate_schedule(&l, &s).unwrap();
    }

    #[test]
    fn cz12_parity_shapes() {
        let l = lat(LatticeSpec::one_storey(4, 4).unwrap());
        let s = cz12_schedule(&l).unwrap();
        assert_eq!(s.depth(), 4);
        assert!(s.rounds.iter().all(|r| r.groups.len() == 4));
        validate_schedule(&l, &s).unwrap();

        let l = lat(LatticeSpec::periodic(2, 2, 2).unwrap());
        let s = cz12_schedule(&l).unwrap();
        assert_eq!(s.depth(), 8);
        assert!(s.rounds.iter().all(|r| r.groups.len() == 1));
        validate_schedule(&l, &s).unwrap();

        let l = lat(LatticeSpec::periodic(4, 2, 1).unwrap());
        assert_eq!(cz12_schedule(&l).unwrap().depth(), 4);
    }

    #[test]
    fn odd_periodic_rejected() {
        let l = lat(LatticeSpec::periodic(3, 2, 2).unwrap());
        assert!(matches!(cz12_schedule(&l), Err(Error::ColoringDoesNotWrap { axis: 'x', len: 3 })));
        let l = lat(LatticeSpec::periodic(2, 2, 3).unwrap());
        assert!(matches!(cz12_schedule(&l), Err(Error::ColoringDoesNotWrap { axis: 'z', len: 3 })));
        // Open lattices of odd size are fine.
        let l = lat(LatticeSpec::one_storey(3, 3).unwrap());
        assert_eq!(cz12_schedule(&l).unwrap().depth(), 4);
    }

    #[test]
    fn greedy_valid_everywhere() {
        for spec in [
            LatticeSpec::periodic(3, 3, 3).unwrap(),
            LatticeSpec::periodic(4, 4, 4).unwrap(),
            LatticeSpec::one_storey(5, 3).unwrap(),
        ] {
            let l = lat(spec);
            let s = cz12_schedule_greedy(&l);
            validate_schedule(&l, &s).unwrap();
        }
        let l = lat(LatticeSpec::periodic(3, 3, 3).unwrap());
        assert_eq!(cz12_schedule_greedy(&l).depth(), 27);
    }

    #[test]
    fn corrupted_schedule_rejected() {
        let l = lat(LatticeSpec::one_storey(4, 4).unwrap());
        let mut s = cz12_schedule(&l).unwrap();
        let moved = s.rounds[1].groups.pop().unwrap();
        s.rounds[0].groups.push(moved);
        assert!(validate_schedule(&l, &s).is_err());
        // Even with a recomputed certificate the blockade rule fails.
        s.rounds[0].certificate = certify(&l, s.rounds[0].certificate.label.clone(), &s.rounds[0].groups);
        s.rounds[1].certificate = certify(&l, s.rounds[1].certificate.label.clone(), &s.rounds[1].groups);
        assert!(matches!(validate_schedule(&l, &s), Err(Error::ScheduleViolation(_))));

        let mut s = movement_schedule(&l);
        s.rounds[3].groups[0].targets[0] = s.rounds[4].groups[0].targets[0];
        assert!(validate_schedule(&l, &s).is_err());
    }

    #[test]
    fn dynamic_form_has_no_cz() {
        let l = lat(LatticeSpec::periodic(2, 2, 1).unwrap());
        for s in [movement_schedule(&l), cz12_schedule(&l).unwrap()] {
            let text = emit_circuit(&s, CircuitForm::DynamicCnot).to_text();
            assert!(!text.lines().any(|line| line.starts_with("CZ")));
            assert!(text.contains("MZ a0 -> m0"));
            let text = emit_circuit(&s, CircuitForm::Cz).to_text();
            assert!(text.contains("MX a3 -> m3"));
        }
    }

    #[test]
    fn emitted_circuits_validate() {
        let l = lat(LatticeSpec::periodic(2, 2, 2).unwrap());
        for s in [movement_schedule(&l), cz12_schedule(&l).unwrap()] {
            for form in [CircuitForm::Cz, CircuitForm::DynamicCnot] {
                let c = emit_circuit(&s, form);
                c.validate().unwrap();
                assert_eq!(Circuit::parse(&c.to_text()).unwrap(), c);
            }
        }
    }

    #[test]
    fn schedule_json_round_trip() {
        let l = lat(LatticeSpec::one_storey(2, 2).unwrap());
        let s = cz12_schedule(&l).unwrap();
        let doc = ScheduleDocument::from(&s);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ScheduleDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schedule, s);
        assert_eq!(back.depth, 4);
    }
}
