mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::fuzz;
use telegate::builder::{build_program, NonlocalCU};
use telegate::executor::run_branches;
use telegate::protocol::{
    resource_census, validate_locality, Phase, Program, ResourceCensus, ViolationKind,
};
use telegate::qsim::{random, State, Unitary};

fn random_spec(rng: &mut ChaCha8Rng, k: usize) -> NonlocalCU {
    let c: Unitary = random::haar_unitary(1 << k, rng).unwrap();
    NonlocalCU::new(c, None).unwrap()
}

#[test]
fn every_transcript_has_probability_one_quarter() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = build_program(&random_spec(&mut rng, 1));
        for _ in 0..20 {
            let input: State = random::haar_state(2, &mut rng).unwrap();
            let outcomes = run_branches(&p, &input).unwrap();
            assert_eq!(outcomes.len(), 4);
            for o in outcomes {
                assert!((o.probability - 0.25).abs() <= 1e-12, "{}", o.probability);
            }
        }
    }
}

#[test]
fn built_programs_use_one_ebit_and_one_bit_each_way() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 1..=3 {
        let p = build_program(&random_spec(&mut rng, k));
        assert!(validate_locality(&p).is_ok());
        assert_eq!(
            resource_census(&p),
            ResourceCensus {
                ebits: 1,
                bits_alice_to_bob: 1,
                bits_bob_to_alice: 1
            }
        );
    }
}

#[test]
fn census_adds_under_concatenation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = build_program(&random_spec(&mut rng, 1));
    let q = build_program(&random_spec(&mut rng, 1));
    assert_eq!(
        resource_census(&p.concat(&q)),
        resource_census(&p) + resource_census(&q)
    );
    let empty = Program::<f64>::new(p.external().to_vec());
    assert_eq!(resource_census(&p.concat(&empty)), resource_census(&p));
}

#[test]
fn injected_cross_party_instructions_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut rejected_as_cross_party = 0;
    for _ in 0..100 {
        let k = rng.random_range(1..=2);
        let p = build_program(&random_spec(&mut rng, k as usize));
        let at = rng.random_range(0..=p.len());
        let bad = p.with_inserted(at, Phase::Unphased, fuzz::cross_party(&mut rng, k));
        let violations = validate_locality(&bad).unwrap_err();
        // touching a Bell half before it exists or after it is measured is
        // caught by the wire discipline first
        let at_injection: Vec<_> = violations.iter().filter(|v| v.index == Some(at)).collect();
        assert!(!at_injection.is_empty(), "{violations:?}");
        assert!(
            at_injection.iter().any(|v| matches!(
                v.kind,
                ViolationKind::CrossPartyQuantumTouch { .. }
                    | ViolationKind::UndefinedWire
                    | ViolationKind::UseAfterMeasurement
            )),
            "{violations:?}"
        );
        rejected_as_cross_party += usize::from(
            at_injection
                .iter()
                .any(|v| matches!(v.kind, ViolationKind::CrossPartyQuantumTouch { .. })),
        );
    }
    assert!(rejected_as_cross_party >= 50, "{rejected_as_cross_party}");
}
