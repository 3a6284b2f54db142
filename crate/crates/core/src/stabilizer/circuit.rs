//! Moment-structured Clifford circuits and their text form.
//!
//! ```text
//! QUBITS 16
//! CODE 12
//! H c0
//! CZ12 a0 : c0 c1 c2 c3 c4 c5 c6 c7 c8 c9 c10 c11
//! TICK
//! MX a0 -> m0
//! ```
//!
//! `QUBITS` and `CODE` head the file (`CODE` is optional). Operands are
//! `qN` (register index), `cN` (code qubit `N`) or `aN` (ancilla `N`, i.e.
//! register index `CODE + N`). `TICK` closes a moment, `#` starts a comment.
//! The emitter writes `c`/`a` operands when `CODE` is known, `q` otherwise.

use std::fmt::Write as _;

use rand::Rng;

use super::statevector::StateVector;
use super::tableau::Tableau;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Cz(usize, usize),
    Cnot(usize, usize),
    Cz12 { control: usize, targets: [usize; 12] },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cz(a, b) | Gate::Cnot(a, b) => vec![a, b],
            Gate::Cz12 { control, targets } => {
                let mut v = vec![control];
                v.extend(targets);
                v
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    Gate(Gate),
    Measure { basis: Basis, qubit: usize, bit: usize },
}

impl Instruction {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Gate(g) => g.qubits(),
            Instruction::Measure { qubit, .. } => vec![*qubit],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Moment {
    pub ops: Vec<Instruction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub code_count: Option<usize>,
    pub moments: Vec<Moment>,
}

impl Circuit {
    pub fn new(num_qubits: usize, code_count: Option<usize>) -> Circuit {
        Circuit { num_qubits, code_count, moments: vec![Moment::default()] }
    }

    pub fn depth(&self) -> usize {
        self.moments.len()
    }

    /// Append to the last moment.
    pub fn push(&mut self, op: Instruction) {
        self.moments.last_mut().expect("at least one moment").ops.push(op);
    }

    pub fn push_gate(&mut self, g: Gate) {
        self.push(Instruction::Gate(g));
    }

    pub fn tick(&mut self) {
        self.moments.push(Moment::default());
    }

    pub fn instructions(&self) -> impl Iterator<Item = &Instruction> {
        self.moments.iter().flat_map(|m| m.ops.iter())
    }

    pub fn gate_count(&self) -> usize {
        self.instructions().filter(|i| matches!(i, Instruction::Gate(_))).count()
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions().filter(|i| matches!(i, Instruction::Measure { .. })).count()
    }

    pub fn num_bits(&self) -> usize {
        self.instructions()
            .filter_map(|i| match i {
                Instruction::Measure { bit, .. } => Some(bit + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Operand ranges, and no qubit used twice within a moment.
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.code_count {
            if c > self.num_qubits {
                return Err(Error::InvalidGate(format!("CODE {c} exceeds QUBITS {}", self.num_qubits)));
            }
        }
        for (mi, m) in self.moments.iter().enumerate() {
            let mut used = vec![false; self.num_qubits];
            for op in &m.ops {
                if let Instruction::Gate(Gate::Cz(a, b) | Gate::Cnot(a, b)) = op {
                    if a == b {
                        return Err(Error::InvalidGate(format!("two-qubit gate on a single qubit {a}")));
                    }
                }
                let mut qs = op.qubits();
                if let Instruction::Gate(Gate::Cz12 { control, targets }) = op {
                    if targets.contains(control) {
                        return Err(Error::InvalidGate(format!("CZ12 control {control} among its targets")));
                    }
                    qs.sort_unstable();
                    qs.dedup();
                }
                for q in qs {
                    if q >= self.num_qubits {
                        return Err(Error::InvalidGate(format!(
                            "qubit {q} out of range for {} qubits",
                            self.num_qubits
                        )));
                    }
                    if used[q] {
                        return Err(Error::ScheduleViolation(format!("qubit {q} used twice in moment {mi}")));
                    }
                    used[q] = true;
                }
            }
        }
        Ok(())
    }

    // ---- text form -------------------------------------------------------

    fn operand(&self, q: usize) -> String {
        match self.code_count {
            Some(c) if q < c => format!("c{q}"),
            Some(c) => format!("a{}", q - c),
            None => format!("q{q}"),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "QUBITS {}", self.num_qubits).unwrap();
        if let Some(c) = self.code_count {
            writeln!(s, "CODE {c}").unwrap();
        }
        for (mi, m) in self.moments.iter().enumerate() {
            if mi > 0 {
                s.push_str("TICK\n");
            }
            for op in &m.ops {
                let line = match op {
                    Instruction::Gate(Gate::H(q)) => format!("H {}", self.operand(*q)),
                    Instruction::Gate(Gate::X(q)) => format!("X {}", self.operand(*q)),
                    Instruction::Gate(Gate::Z(q)) => format!("Z {}", self.operand(*q)),
                    Instruction::Gate(Gate::Cz(a, b)) => {
                        format!("CZ {} {}", self.operand(*a), self.operand(*b))
                    }
                    Instruction::Gate(Gate::Cnot(a, b)) => {
                        format!("CNOT {} {}", self.operand(*a), self.operand(*b))
                    }
                    Instruction::Gate(Gate::Cz12 { control, targets }) => {
                        let ts: Vec<String> = targets.iter().map(|&t| self.operand(t)).collect();
                        format!("CZ12 {} : {}", self.operand(*control), ts.join(" "))
                    }
                    Instruction::Measure { basis, qubit, bit } => {
                        let b = match basis {
                            Basis::X => "MX",
                            Basis::Z => "MZ",
                        };
                        format!("{b} {} -> m{bit}", self.operand(*qubit))
                    }
                };
                s.push_str(&line);
                s.push('\n');
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut num_qubits: Option<usize> = None;
        let mut code_count: Option<usize> = None;
        let mut circuit: Option<Circuit> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let head = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();

            match head {
                "QUBITS" | "CODE" => {
                    if circuit.is_some() {
                        return Err(err(format!("{head} must precede all operations")));
                    }
                    let [v] = rest.as_slice() else {
                        return Err(err(format!("{head} takes one integer")));
                    };
                    let v: usize = v.parse().map_err(|_| err(format!("bad integer {v:?}")))?;
                    let slot = if head == "QUBITS" { &mut num_qubits } else { &mut code_count };
                    if slot.replace(v).is_some() {
                        return Err(err(format!("duplicate {head}")));
                    }
                    continue;
                }
                _ => {}
            }

            let c = match circuit.as_mut() {
                Some(c) => c,
                None => {
                    let n = num_qubits.ok_or_else(|| err("missing QUBITS header".into()))?;
                    circuit.insert(Circuit::new(n, code_count))
                }
            };
            let (cn, cc) = (c.num_qubits, c.code_count);
            let q = |tok: &str| -> Result<usize> { resolve(tok, cn, cc, line_no) };

            let op = match (head, rest.as_slice()) {
                ("TICK", []) => {
                    c.tick();
                    continue;
                }
                ("H", [a]) => Instruction::Gate(Gate::H(q(a)?)),
                ("X", [a]) => Instruction::Gate(Gate::X(q(a)?)),
                ("Z", [a]) => Instruction::Gate(Gate::Z(q(a)?)),
                ("CZ", [a, b]) => Instruction::Gate(Gate::Cz(q(a)?, q(b)?)),
                ("CNOT", [a, b]) => Instruction::Gate(Gate::Cnot(q(a)?, q(b)?)),
                ("CZ12", [ctrl, ":", ts @ ..]) if ts.len() == 12 => {
                    let mut targets = [0; 12];
                    for (slot, t) in targets.iter_mut().zip(ts) {
                        *slot = q(t)?;
                    }
                    Instruction::Gate(Gate::Cz12 { control: q(ctrl)?, targets })
                }
                ("MX" | "MZ", [a, "->", m]) => {
                    let bit = m
                        .strip_prefix('m')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(format!("bad measurement bit {m:?}")))?;
                    let basis = if head == "MX" { Basis::X } else { Basis::Z };
                    Instruction::Measure { basis, qubit: q(a)?, bit }
                }
                _ => return Err(err(format!("malformed instruction {line:?}"))),
            };
            c.push(op);
        }

        match circuit {
            Some(c) => Ok(c),
            None => {
                let n = num_qubits.ok_or(Error::Parse { line: 0, message: "missing QUBITS header".into() })?;
                Ok(Circuit::new(n, code_count))
            }
        }
    }
}

fn resolve(tok: &str, n: usize, code: Option<usize>, line: usize) -> Result<usize> {
    let err = |message: String| Error::Parse { line, message };
    let (kind, num) = tok.split_at(tok.find(|c: char| c.is_ascii_digit()).unwrap_or(tok.len()));
    let v: usize = num.parse().map_err(|_| err(format!("bad operand {tok:?}")))?;
    let q = match (kind, code) {
        ("q", _) => v,
        ("c", Some(c)) if v < c => v,
        ("c", Some(_)) => return Err(err(format!("code qubit {tok} out of range"))),
        ("a", Some(c)) => c + v,
        ("c" | "a", None) => return Err(err(format!("operand {tok} needs a CODE header"))),
        _ => return Err(err(format!("bad operand {tok:?}"))),
    };
    if q >= n {
        return Err(err(format!("operand {tok} out of range for {n} qubits")));
    }
    Ok(q)
}

/// Backend able to run [`Circuit`]s.
pub trait Simulator {
    fn num_qubits(&self) -> usize;
    fn apply_gate(&mut self, g: &Gate) -> Result<()>;
    fn measure(&mut self, basis: Basis, q: usize, rng: &mut dyn rand::RngCore) -> Result<bool>;
}

impl Simulator for Tableau {
    fn num_qubits(&self) -> usize {
        Tableau::num_qubits(self)
    }

    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::H(q) => self.h(q),
            Gate::X(q) => self.x(q),
            Gate::Z(q) => self.z(q),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::Cnot(a, b) => self.cnot(a, b),
            Gate::Cz12 { control, ref targets } => self.cz12(control, targets),
        }
    }

    fn measure(&mut self, basis: Basis, q: usize, rng: &mut dyn rand::RngCore) -> Result<bool> {
        let o = match basis {
            Basis::X => self.measure_x(q, rng)?,
            Basis::Z => self.measure_z(q, rng)?,
        };
        Ok(o.bit)
    }
}

impl Simulator for StateVector {
    fn num_qubits(&self) -> usize {
        StateVector::num_qubits(self)
    }

    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::H(q) => self.h(q),
            Gate::X(q) => self.x(q),
            Gate::Z(q) => self.z(q),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::Cnot(a, b) => self.cnot(a, b),
            Gate::Cz12 { control, targets } => targets.iter().try_for_each(|&t| self.cz(control, t)),
        }
    }

    fn measure(&mut self, basis: Basis, q: usize, rng: &mut dyn rand::RngCore) -> Result<bool> {
        match basis {
            Basis::Z => self.measure_z(q, rng),
            Basis::X => {
                self.h(q)?;
                let bit = self.measure_z(q, rng)?;
                self.h(q)?;
                Ok(bit)
            }
        }
    }
}

/// Run every moment in order; returns the classical bits (unset bits
/// default to `false`).
pub fn run_circuit<S: Simulator, R: Rng>(circuit: &Circuit, sim: &mut S, rng: &mut R) -> Result<Vec<bool>> {
    if sim.num_qubits() != circuit.num_qubits {
        return Err(Error::QubitCountMismatch { expected: circuit.num_qubits, found: sim.num_qubits() });
    }
    let mut bits = vec![false; circuit.num_bits()];
    for op in circuit.instructions() {
        match op {
            Instruction::Gate(g) => sim.apply_gate(g)?,
            Instruction::Measure { basis, qubit, bit } => {
                bits[*bit] = sim.measure(*basis, *qubit, rng)?;
            }
        }
    }
    Ok(bits)
}
