use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xcube_core::lattice::{Lattice, LatticeSpec};
use xcube_core::protocol::{prepare_cluster, Strategy};
use xcube_core::scheduler::{
    cz12_schedule, cz12_schedule_greedy, emit_circuit, movement_schedule, preparation_schedule, validate_schedule,
    CircuitForm, Coloring, ScheduleDocument,
};
use xcube_core::stabilizer::{run_circuit, Circuit, PauliString, Tableau};
use xcube_core::Error;

fn build(spec: LatticeSpec) -> Lattice {
    Lattice::build(spec).unwrap()
}

#[test]
fn three_qubit_fragment_forms_agree() {
    // Two code qubits sharing one ancilla, in both circuit forms.
    let cz = "QUBITS 3\nCODE 2\nH q0\nH q1\nH q2\nTICK\nCZ q0 q2\nTICK\nCZ q1 q2\nTICK\nMX q2 -> m0\n";
    let cnot = "QUBITS 3\nCODE 2\nH q0\nH q1\nTICK\nCNOT q0 q2\nTICK\nCNOT q1 q2\nTICK\nMZ q2 -> m0\n";
    let zz = PauliString::from_supports(3, &[], &[0, 1]).unwrap();
    for seed in 0..16 {
        let mut groups = Vec::new();
        for text in [cz, cnot] {
            let c = Circuit::parse(text).unwrap();
            c.validate().unwrap();
            let mut t = Tableau::new(3);
            let bits = run_circuit(&c, &mut t, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let m = if bits[0] { -1 } else { 1 };
            assert_eq!(t.expectation(&zz).unwrap(), m);
            groups.push((bits, xcube_core::stabilizer::tableau::join_rows(&t.subsystem_group(&[0, 1]))));
        }
        assert_eq!(groups[0], groups[1], "seed {seed}");
    }
}

#[test]
fn strategies_prepare_the_same_state() {
    for spec in [
        LatticeSpec::periodic(2, 2, 2).unwrap(),
        LatticeSpec::periodic(4, 4, 2).unwrap(),
        LatticeSpec::periodic(3, 3, 3).unwrap(),
        LatticeSpec::one_storey(4, 4).unwrap(),
        LatticeSpec::one_storey(3, 5).unwrap(),
    ] {
        let l = build(spec);
        assert_eq!(
            prepare_cluster(&l, Strategy::Movement12).canonical_string(),
            prepare_cluster(&l, Strategy::Cz12Colored).canonical_string(),
            "{spec:?}"
        );
    }
}

#[test]
fn parity_coloring_rules() {
    let l = build(LatticeSpec::periodic(4, 4, 2).unwrap());
    let s = cz12_schedule(&l).unwrap();
    assert_eq!(s.depth(), 8);
    assert_eq!(s.coloring, Coloring::Parity);
    validate_schedule(&l, &s).unwrap();

    let l = build(LatticeSpec::periodic(4, 4, 1).unwrap());
    assert_eq!(cz12_schedule(&l).unwrap().depth(), 4);

    let l = build(LatticeSpec::one_storey(4, 4).unwrap());
    let s = cz12_schedule(&l).unwrap();
    assert_eq!(s.depth(), 4);
    assert!(s.rounds.iter().all(|r| r.groups.len() == 4));

    for spec in [LatticeSpec::periodic(3, 4, 2).unwrap(), LatticeSpec::periodic(2, 2, 3).unwrap()] {
        let l = build(spec);
        assert!(matches!(cz12_schedule(&l), Err(Error::ColoringDoesNotWrap { .. })), "{spec:?}");
        let g = cz12_schedule_greedy(&l);
        validate_schedule(&l, &g).unwrap();
        assert_eq!(preparation_schedule(&l, Strategy::Cz12Colored), g);
    }
}

#[test]
fn greedy_on_odd_torus() {
    let l = build(LatticeSpec::periodic(3, 3, 3).unwrap());
    let g = cz12_schedule_greedy(&l);
    assert_eq!(g.coloring, Coloring::Greedy);
    assert_eq!(g.depth(), 27);
    validate_schedule(&l, &g).unwrap();
}

#[test]
fn tampered_schedule_rejected() {
    let l = build(LatticeSpec::periodic(2, 2, 2).unwrap());
    let mut s = movement_schedule(&l);
    s.rounds[0].groups[0].targets[0] = s.rounds[0].groups[1].targets[0];
    assert!(validate_schedule(&l, &s).is_err());

    let l = build(LatticeSpec::one_storey(4, 4).unwrap());
    let mut s = cz12_schedule(&l).unwrap();
    let moved = s.rounds[1].groups.pop().unwrap();
    s.rounds[0].groups.push(moved);
    assert!(validate_schedule(&l, &s).is_err());
}

#[test]
fn emitted_text_round_trips() {
    for spec in [LatticeSpec::periodic(2, 2, 1).unwrap(), LatticeSpec::one_storey(3, 3).unwrap()] {
        let l = build(spec);
        for strategy in [Strategy::Movement12, Strategy::Cz12Colored] {
            let schedule = preparation_schedule(&l, strategy);
            for form in [CircuitForm::Cz, CircuitForm::DynamicCnot] {
                let c = emit_circuit(&schedule, form);
                c.validate().unwrap();
                let text = c.to_text();
                let back = Circuit::parse(&text).unwrap();
                assert_eq!(back, c);
                assert_eq!(back.to_text(), text);
                assert_eq!(c.measurement_count(), l.ancilla_count());
                if form == CircuitForm::DynamicCnot {
                    assert!(text.lines().all(|line| !line.starts_with("CZ")));
                }
            }
        }
    }
}

#[test]
fn schedule_document_reports_depth() {
    let l = build(LatticeSpec::periodic(2, 2, 2).unwrap());
    let s = movement_schedule(&l);
    let doc = serde_json::to_value(ScheduleDocument::from(&s)).unwrap();
    assert_eq!(doc["depth"], 12);
    assert_eq!(doc["schema"], "xcube.schedule/v1");
}
