mod common;

use nrsynth::calculus::{check_proof, CheckError};
use nrsynth::synth::synthesize_from_functionality;

// [TRIVIAL] Every corpus derivation is accepted by the checker.
#[test]
fn corpus_proofs_check() {
    for e in common::corpus() {
        check_proof(&e.ctx, &e.proof)
            .unwrap_or_else(|err| panic!("corpus proof `{}` rejected: {err}", e.name));
    }
}

// [TRIVIAL] A ⊆-R eigenvariable colliding with a context variable is a
// freshness violation.
#[test]
fn bad_freshness_is_rejected() {
    let (ctx, proof) = common::bad_freshness_proof();
    assert!(matches!(
        check_proof(&ctx, &proof),
        Err(CheckError::NotFresh { .. })
    ));
}

// [DERIVED] The two large functionality proofs synthesize end to end; their
// extensional behaviour is validated against brute-force oracles in the
// acceptance suite.
#[test]
fn large_fixtures_synthesize() {
    let r = synthesize_from_functionality(&common::distinguishers_problem()).unwrap();
    assert_eq!(
        r.expr.free_vars(),
        ["X".to_string()].into_iter().collect()
    );
    let r = synthesize_from_functionality(&common::grouping_problem()).unwrap();
    assert_eq!(
        r.expr.free_vars(),
        ["F".to_string()].into_iter().collect()
    );
    let r = synthesize_from_functionality(&common::or_chain_problem(5)).unwrap();
    assert_eq!(
        r.expr.free_vars(),
        ["x".to_string()].into_iter().collect()
    );
}
