use std::sync::Arc;

use proptest::prelude::*;

use xcube_core::lattice::{Lattice, LatticeSpec};
use xcube_core::protocol::{
    ground_space_dimension, ground_space_dimension_dense, solve_correction, x_on, CorrectionMode, MeasurementRecord,
    Simulation, Stage, Strategy,
};
use xcube_core::Error;

fn arc(spec: LatticeSpec) -> Arc<Lattice> {
    Arc::new(Lattice::build(spec).unwrap())
}

#[test]
fn full_pipeline_on_several_lattices() {
    for spec in [
        LatticeSpec::periodic(3, 3, 3).unwrap(),
        LatticeSpec::periodic(4, 2, 2).unwrap(),
        LatticeSpec::periodic(2, 3, 1).unwrap(),
        LatticeSpec::one_storey(4, 4).unwrap(),
    ] {
        let l = arc(spec);
        for seed in 0..3 {
            let mut phys = Simulation::new(l.clone(), Strategy::Movement12, CorrectionMode::Physical, seed, 0);
            let mut frame = Simulation::new(l.clone(), Strategy::Cz12Colored, CorrectionMode::PauliFrame, seed, 0);
            phys.run().unwrap();
            frame.run().unwrap();
            assert_eq!(phys.stage(), Stage::Corrected);
            let a = phys.verify().unwrap();
            let b = frame.verify().unwrap();
            assert!(a.all_plus, "{spec:?} seed {seed}");
            assert_eq!(a, b);
            assert_eq!(phys.record(), frame.record());
            assert_eq!(a.skipped_stars.len(), l.undefined_stars().len());
        }
    }
}

#[test]
fn correction_flips_exactly_the_negative_cubes() {
    let l = arc(LatticeSpec::periodic(3, 3, 3).unwrap());
    let mut sim = Simulation::new(l.clone(), Strategy::Movement12, CorrectionMode::PauliFrame, 21, 0);
    let record = sim.measure().unwrap().clone();
    let frame = sim.correct().unwrap().clone();
    let negative: Vec<usize> = (0..l.ancilla_count()).filter(|&a| record.outcomes[a] == -1).collect();
    assert_eq!(frame.flipped_cubes(&l), negative);
    // The correction is pure X on code qubits, so it never disturbs stars.
    let x = x_on(&l, &frame.x_support);
    assert!(x.support().iter().all(|&q| q < l.code_count()));
}

#[test]
fn inconsistent_record_reports_layers() {
    let l = arc(LatticeSpec::periodic(2, 2, 2).unwrap());
    let mut record = MeasurementRecord::from_bits(0, 0, &vec![false; l.ancilla_count()]);
    record.flip(3);
    match solve_correction(&l, &record) {
        Err(Error::InconsistentRecord { violated_layers }) => {
            assert_eq!(violated_layers, record.violated_layers(&l));
            assert_eq!(violated_layers.len(), 3);
        }
        other => panic!("expected inconsistent record, got {other:?}"),
    }
}

#[test]
fn stage_order_is_enforced() {
    let l = arc(LatticeSpec::periodic(2, 2, 2).unwrap());
    let mut sim = Simulation::new(l, Strategy::Movement12, CorrectionMode::Physical, 0, 0);
    assert!(sim.correct().is_err());
    sim.measure().unwrap();
    assert!(sim.measure().is_err());
    sim.correct().unwrap();
    assert!(sim.correct().is_err());
}

#[test]
fn ground_space_dimension_on_cubes() {
    // log2 of the degeneracy on an L×L×L torus is 6L − 3.
    for n in 2..=4 {
        let l = Lattice::build(LatticeSpec::periodic(n, n, n).unwrap()).unwrap();
        assert_eq!(ground_space_dimension(&l).unwrap(), 6 * n - 3, "L = {n}");
        assert_eq!(ground_space_dimension_dense(&l).unwrap(), 6 * n - 3, "L = {n}");
    }
    let open = Lattice::build(LatticeSpec::one_storey(3, 3).unwrap()).unwrap();
    assert!(matches!(ground_space_dimension(&open), Err(Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_seed_reaches_the_ground_space(
        x in 2usize..4, y in 2usize..4, z in 1usize..3,
        seed in any::<u64>(), stream in 0u64..1000, cz in any::<bool>(), frame in any::<bool>(),
    ) {
        let l = arc(LatticeSpec::periodic(x, y, z).unwrap());
        let strategy = if cz { Strategy::Cz12Colored } else { Strategy::Movement12 };
        let mode = if frame { CorrectionMode::PauliFrame } else { CorrectionMode::Physical };
        let mut sim = Simulation::new(l.clone(), strategy, mode, seed, stream);
        sim.run().unwrap();
        prop_assert!(sim.verify().unwrap().all_plus);
        prop_assert!(sim.record().unwrap().violated_layers(&l).is_empty());
    }

    #[test]
    fn dimension_routes_agree(x in 2usize..5, y in 2usize..5, z in 1usize..4) {
        let l = Lattice::build(LatticeSpec::periodic(x, y, z).unwrap()).unwrap();
        prop_assert_eq!(ground_space_dimension(&l).unwrap(), ground_space_dimension_dense(&l).unwrap());
    }
}
