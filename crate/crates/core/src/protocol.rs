//! Cluster preparation, ancilla readout, byproduct correction and
//! verification of the X-cube ground state.
//!
//! Operators, with `adj` the (multi)set adjacency of the lattice and all
//! products reduced mod 2:
//!
//! | name | operator |
//! |------|----------|
//! | `C_c` | `X_c ∏_{a ∋ c} Z_a` |
//! | `C_a` | `X_a ∏_{c ∈ a} Z_c` |
//! | `A_star` | `∏_{c ∈ star} X_c` |
//! | `B_cube(a)` | `∏_{c ∈ a} Z_c` |
//!
//! Pipeline: `|+⟩` on every qubit, CZ between every ancilla and its edges
//! (the cluster state), `MX` on every ancilla in ascending index order giving
//! `m_a`, then `X` on a solution of `M·x = b` over GF(2) where `M` is the
//! cube/edge incidence and `b_a = (1 − m_a)/2`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::lattice::{odd_members, DualLayer, Lattice, Plane, StarSite, Vertex};
use crate::scheduler::{preparation_schedule, Schedule};
use crate::stabilizer::{PauliString, Tableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "movement")]
    Movement12,
    #[serde(rename = "cz12")]
    Cz12Colored,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionMode {
    /// `X_m` is applied to the state as gates.
    #[default]
    Physical,
    /// `X_m` is kept classically and folded into expectation values.
    PauliFrame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Cluster,
    Measured,
    Corrected,
}

/// Seeded generator for run `stream` under master seed `seed`.
pub fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// ---- operators ------------------------------------------------------------

pub fn code_cluster_operator(lattice: &Lattice, c: usize) -> PauliString {
    let zs: Vec<usize> = lattice.code_adj(c).iter().map(|&a| lattice.ancilla_qubit(a)).collect();
    PauliString::from_supports(lattice.total_qubits(), &[c], &zs).expect("disjoint supports")
}

pub fn ancilla_cluster_operator(lattice: &Lattice, a: usize) -> PauliString {
    PauliString::from_supports(lattice.total_qubits(), &[lattice.ancilla_qubit(a)], lattice.ancilla_adj(a))
        .expect("disjoint supports")
}

pub fn cube_operator(lattice: &Lattice, a: usize) -> PauliString {
    PauliString::from_supports(lattice.total_qubits(), &[], lattice.cube_sites(a)).expect("Z only")
}

/// Star operator for the `index`-th defined star.
pub fn star_operator(lattice: &Lattice, index: usize) -> PauliString {
    PauliString::from_supports(lattice.total_qubits(), &lattice.stars()[index].members, &[]).expect("X only")
}

/// `∏ X_c` over a set of code qubits (repeats cancel).
pub fn x_on(lattice: &Lattice, support: &[usize]) -> PauliString {
    PauliString::from_supports(lattice.total_qubits(), support, &[]).expect("X only")
}

// ---- pipeline stages ------------------------------------------------------

/// Run the entangling rounds of `schedule` on `tableau`.
pub fn apply_schedule(tableau: &mut Tableau, lattice: &Lattice, schedule: &Schedule) -> Result<()> {
    for round in &schedule.rounds {
        for g in &round.groups {
            let ctrl = lattice.ancilla_qubit(g.ancilla);
            match <&[usize; 12]>::try_from(g.targets.as_slice()) {
                Ok(targets) => tableau.cz12(ctrl, targets)?,
                Err(_) => {
                    for &t in &g.targets {
                        tableau.cz(ctrl, t)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// The cluster state, built with the chosen strategy's schedule.
pub fn prepare_cluster(lattice: &Lattice, strategy: Strategy) -> Tableau {
    let mut t = Tableau::new_plus_state(lattice.total_qubits());
    let schedule = preparation_schedule(lattice, strategy);
    apply_schedule(&mut t, lattice, &schedule).expect("schedule operands come from the lattice");
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub seed: u64,
    pub stream: u64,
    /// `m_a ∈ {+1, −1}` in ascending ancilla order.
    pub outcomes: Vec<i8>,
}

impl MeasurementRecord {
    pub fn from_bits(seed: u64, stream: u64, bits: &[bool]) -> Self {
        MeasurementRecord { seed, stream, outcomes: bits.iter().map(|&b| if b { -1 } else { 1 }).collect() }
    }

    pub fn product(&self) -> i8 {
        self.outcomes.iter().product()
    }

    /// Dual layers whose outcomes multiply to −1 (periodic lattices only).
    pub fn violated_layers(&self, lattice: &Lattice) -> Vec<DualLayer> {
        lattice
            .dual_layers()
            .into_iter()
            .filter(|&layer| lattice.layer_cubes(layer).iter().map(|&a| self.outcomes[a]).product::<i8>() == -1)
            .collect()
    }

    pub fn flip(&mut self, a: usize) {
        self.outcomes[a] = -self.outcomes[a];
    }
}

/// MX on every ancilla in ascending index order.
pub fn measure_ancillae<R: rand::Rng + ?Sized>(
    tableau: &mut Tableau,
    lattice: &Lattice,
    rng: &mut R,
) -> Result<Vec<bool>> {
    (0..lattice.ancilla_count()).map(|a| tableau.measure_x(lattice.ancilla_qubit(a), rng).map(|o| o.bit)).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionFrame {
    /// Sorted code-qubit indices carrying `X`.
    pub x_support: Vec<usize>,
}

impl CorrectionFrame {
    /// Symmetric difference, used to move from one frame to another.
    pub fn xor(&self, other: &CorrectionFrame) -> CorrectionFrame {
        let mut all = self.x_support.clone();
        all.extend(&other.x_support);
        CorrectionFrame { x_support: odd_members(&all) }
    }

    /// Cubes whose `B_cube` the frame flips.
    pub fn flipped_cubes(&self, lattice: &Lattice) -> Vec<usize> {
        let all: Vec<usize> = self.x_support.iter().flat_map(|&c| lattice.code_adj(c).iter().copied()).collect();
        odd_members(&all)
    }
}

pub fn incidence_matrix(lattice: &Lattice) -> BitMatrix {
    let rows: Vec<Vec<usize>> = (0..lattice.ancilla_count()).map(|a| lattice.ancilla_adj(a).to_vec()).collect();
    BitMatrix::from_rows(lattice.code_count(), &rows)
}

/// Solve `M·x = b`; the first solution under deterministic pivoting.
pub fn solve_correction(lattice: &Lattice, record: &MeasurementRecord) -> Result<CorrectionFrame> {
    if record.outcomes.len() != lattice.ancilla_count() {
        return Err(Error::QubitCountMismatch { expected: lattice.ancilla_count(), found: record.outcomes.len() });
    }
    let b: Vec<bool> = record.outcomes.iter().map(|&m| m == -1).collect();
    match incidence_matrix(lattice).solve(&b) {
        Some(x) => Ok(CorrectionFrame { x_support: (0..x.len()).filter(|&c| x[c]).collect() }),
        None => Err(Error::InconsistentRecord { violated_layers: record.violated_layers(lattice) }),
    }
}

pub fn apply_correction(tableau: &mut Tableau, lattice: &Lattice, frame: &CorrectionFrame) -> Result<()> {
    tableau.apply_pauli(&x_on(lattice, &frame.x_support))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarValue {
    pub vertex: Vertex,
    pub plane: Plane,
    pub value: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerReport {
    /// `⟨B_cube(a)⟩` in ascending ancilla order (0 when indeterminate).
    pub cube_eigenvalues: Vec<i8>,
    /// `⟨A_star⟩` for every defined star, in lattice order.
    pub star_eigenvalues: Vec<StarValue>,
    /// Star positions not verified because the star is undefined.
    pub skipped_stars: Vec<StarSite>,
    pub all_plus: bool,
}

/// Expectation of `p` after folding in a classical `X` frame.
pub fn framed_expectation(
    tableau: &Tableau,
    lattice: &Lattice,
    frame: Option<&CorrectionFrame>,
    p: &PauliString,
) -> Result<i8> {
    let raw = tableau.expectation(p)?;
    Ok(match frame {
        Some(f) if !x_on(lattice, &f.x_support).commutes_with(p) => -raw,
        _ => raw,
    })
}

pub fn verify_xcube_with_frame(
    tableau: &Tableau,
    lattice: &Lattice,
    frame: Option<&CorrectionFrame>,
) -> Result<StabilizerReport> {
    let cube_eigenvalues = (0..lattice.ancilla_count())
        .map(|a| framed_expectation(tableau, lattice, frame, &cube_operator(lattice, a)))
        .collect::<Result<Vec<_>>>()?;
    let star_eigenvalues = lattice
        .stars()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let value = framed_expectation(tableau, lattice, frame, &star_operator(lattice, i))?;
            Ok(StarValue { vertex: s.site.vertex, plane: s.site.plane, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_plus = cube_eigenvalues.iter().all(|&v| v == 1) && star_eigenvalues.iter().all(|s| s.value == 1);
    Ok(StabilizerReport {
        cube_eigenvalues,
        star_eigenvalues,
        skipped_stars: lattice.undefined_stars().to_vec(),
        all_plus,
    })
}

pub fn verify_xcube(tableau: &Tableau, lattice: &Lattice) -> Result<StabilizerReport> {
    verify_xcube_with_frame(tableau, lattice, None)
}

/// `(C_c values, C_a values)` on the current state.
pub fn cluster_expectations(tableau: &Tableau, lattice: &Lattice) -> Result<(Vec<i8>, Vec<i8>)> {
    let cc = (0..lattice.code_count())
        .map(|c| tableau.expectation(&code_cluster_operator(lattice, c)))
        .collect::<Result<Vec<_>>>()?;
    let ca = (0..lattice.ancilla_count())
        .map(|a| tableau.expectation(&ancilla_cluster_operator(lattice, a)))
        .collect::<Result<Vec<_>>>()?;
    Ok((cc, ca))
}

// ---- ground-space dimension -----------------------------------------------

fn require_periodic(lattice: &Lattice) -> Result<()> {
    if !lattice.spec().is_periodic() {
        return Err(Error::Unsupported("ground-space dimension is defined for periodic lattices".into()));
    }
    Ok(())
}

/// Star and cube generators restricted to the code qubits.
pub fn xcube_generators(lattice: &Lattice) -> Vec<PauliString> {
    let n = lattice.code_count();
    let stars = lattice.stars().iter().map(|s| PauliString::from_supports(n, &s.members, &[]).unwrap());
    let cubes =
        (0..lattice.ancilla_count()).map(|a| PauliString::from_supports(n, &[], lattice.cube_sites(a)).unwrap());
    stars.chain(cubes).collect()
}

/// `log₂` of the ground-state degeneracy, by Pauli-row elimination.
pub fn ground_space_dimension(lattice: &Lattice) -> Result<usize> {
    require_periodic(lattice)?;
    let rank = crate::stabilizer::tableau::group_rank(xcube_generators(lattice));
    Ok(lattice.code_count() - rank)
}

/// Same quantity from separate dense GF(2) ranks of the star (X-type) and
/// cube (Z-type) incidence matrices.
pub fn ground_space_dimension_dense(lattice: &Lattice) -> Result<usize> {
    require_periodic(lattice)?;
    let star_rows: Vec<Vec<usize>> = lattice.stars().iter().map(|s| s.members.to_vec()).collect();
    let stars = BitMatrix::from_rows(lattice.code_count(), &star_rows);
    let rank = stars.rank() + incidence_matrix(lattice).rank();
    Ok(lattice.code_count() - rank)
}

// ---- simulation driver ----------------------------------------------------

/// One seeded run of the pipeline with injected-error bookkeeping.
#[derive(Clone, Debug)]
pub struct Simulation {
    lattice: Arc<Lattice>,
    strategy: Strategy,
    mode: CorrectionMode,
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    tableau: Tableau,
    stage: Stage,
    record: Option<MeasurementRecord>,
    frame: Option<CorrectionFrame>,
    injected: Vec<crate::syndrome::ErrorEvent>,
}

impl Simulation {
    /// Prepare the cluster state.
    pub fn new(lattice: Arc<Lattice>, strategy: Strategy, mode: CorrectionMode, seed: u64, stream: u64) -> Simulation {
        let tableau = prepare_cluster(&lattice, strategy);
        Simulation {
            lattice,
            strategy,
            mode,
            seed,
            stream,
            rng: run_rng(seed, stream),
            tableau,
            stage: Stage::Cluster,
            record: None,
            frame: None,
            injected: Vec::new(),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn mode(&self) -> CorrectionMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn record(&self) -> Option<&MeasurementRecord> {
        self.record.as_ref()
    }

    /// The correction in force (present once the stage is `Corrected`).
    pub fn frame(&self) -> Option<&CorrectionFrame> {
        self.frame.as_ref()
    }

    pub fn injected(&self) -> &[crate::syndrome::ErrorEvent] {
        &self.injected
    }

    pub(crate) fn note_injected(&mut self, e: crate::syndrome::ErrorEvent) {
        self.injected.push(e);
    }

    /// Apply a Pauli to the physical state.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.tableau.apply_pauli(p)
    }

    pub fn measure(&mut self) -> Result<&MeasurementRecord> {
        if self.stage != Stage::Cluster {
            return Err(Error::Stage(format!("ancillae already measured (stage {:?})", self.stage)));
        }
        let bits = measure_ancillae(&mut self.tableau, &self.lattice, &mut self.rng)?;
        self.record = Some(MeasurementRecord::from_bits(self.seed, self.stream, &bits));
        self.stage = Stage::Measured;
        Ok(self.record.as_ref().unwrap())
    }

    /// Solve and apply `X_m`. On an inconsistent record the stage stays
    /// `Measured` and the error lists the violated layers.
    pub fn correct(&mut self) -> Result<&CorrectionFrame> {
        if self.stage != Stage::Measured {
            return Err(Error::Stage(format!("correction needs stage Measured (stage {:?})", self.stage)));
        }
        let frame = solve_correction(&self.lattice, self.record.as_ref().unwrap())?;
        self.install_frame(frame)?;
        Ok(self.frame.as_ref().unwrap())
    }

    /// Replace the measurement record (after a decoded readout flip), re-solve
    /// and move the state to the new frame.
    pub fn resolve_with_record(&mut self, record: MeasurementRecord) -> Result<&CorrectionFrame> {
        if self.stage == Stage::Cluster {
            return Err(Error::Stage("no measurement record yet".into()));
        }
        let frame = solve_correction(&self.lattice, &record)?;
        self.record = Some(record);
        self.install_frame(frame)?;
        Ok(self.frame.as_ref().unwrap())
    }

    fn install_frame(&mut self, frame: CorrectionFrame) -> Result<()> {
        if self.mode == CorrectionMode::Physical {
            let old = self.frame.clone().unwrap_or_default();
            apply_correction(&mut self.tableau, &self.lattice, &old.xor(&frame))?;
        }
        self.frame = Some(frame);
        self.stage = Stage::Corrected;
        Ok(())
    }

    /// Measure then correct.
    pub fn run(&mut self) -> Result<&CorrectionFrame> {
        self.measure()?;
        self.correct()
    }

    /// Expectation with the Pauli frame folded in when in frame mode.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        let frame = match self.mode {
            CorrectionMode::PauliFrame => self.frame.as_ref(),
            CorrectionMode::Physical => None,
        };
        framed_expectation(&self.tableau, &self.lattice, frame, p)
    }

    pub fn verify(&self) -> Result<StabilizerReport> {
        let frame = match self.mode {
            CorrectionMode::PauliFrame => self.frame.as_ref(),
            CorrectionMode::Physical => None,
        };
        verify_xcube_with_frame(&self.tableau, &self.lattice, frame)
    }
}
