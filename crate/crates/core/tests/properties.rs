//! Property tests for the invariants of each stage.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqc::gadget::{gadgetize, is_two_local};
use sqc::ir::{Circuit, Expr, PauliHamiltonian};
use sqc::pauli_canon::{canonicalize, string_mul};
use sqc::rewrite::dag_canonicalize;
use sqc::scalar::C;
use sqc::semantics::{apply, hamiltonian_matrix, hermitian_deviation, pauli_string_matrix, simulate, to_matrix, Dense};
use sqc::synth::{fold_duration, synth_plan_digital, to_qasm};
use sqc::transform::{apply_qubit, qubit_matrix, transform_expr, transform_state};
use sqc::trotter::{order_terms, plan_standard};
use sqc::verify::{circuit_to_matrix, distance, DistanceMode};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn i_pow(k: u8) -> C<f64> {
    [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][k as usize % 4]
}

fn random_unitary(r: &mut ChaCha8Rng, width: usize) -> Dense<f64> {
    let h = common::hamiltonian(r, width, 4, width);
    simulate(&hamiltonian_matrix(&h).unwrap(), r.gen_range(-2.0..2.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn string_products_match_matrices(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let (a, b) = (common::pauli_string(&mut r, n, n), common::pauli_string(&mut r, n, n));
        let (phase, p) = string_mul(&a, &b);
        let lhs = pauli_string_matrix::<f64>(&a) * pauli_string_matrix::<f64>(&b);
        let rhs = pauli_string_matrix::<f64>(&p) * i_pow(phase);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn canonical_form_preserves_the_matrix(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = common::shape(&mut r, 3, false, 4);
        let e = common::typed_expr(&mut r, &shape);
        let c = dag_canonicalize(&e, &shape).unwrap();
        // Identity bodies on sites above two levels have no expression form.
        let back = c.to_expr(&shape);
        prop_assume!(back.is_some());
        let m = to_matrix(&e, &shape).unwrap();
        prop_assert!((to_matrix(&back.unwrap(), &shape).unwrap() - &m).norm() < 1e-9);
    }

    #[test]
    fn transform_commutes_with_application(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = common::shape(&mut r, 3, false, 4);
        let e = common::typed_expr(&mut r, &shape);
        let psi = common::state(&mut r, &shape);
        let lhs = transform_state(&apply(&e, &shape, &psi).unwrap(), &shape).unwrap();
        let (q, _) = transform_expr(&dag_canonicalize(&e, &shape).unwrap(), &shape).unwrap();
        let rhs = apply_qubit(&q, &transform_state(&psi, &shape).unwrap());
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn pauli_form_of_hermitian_input_is_hermitian(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = common::shape(&mut r, 3, true, 2);
        let e = common::typed_expr(&mut r, &shape);
        let h = Expr::sum(e.clone(), Expr::dagger(e));
        let (q, layout) = transform_expr(&dag_canonicalize(&h, &shape).unwrap(), &shape).unwrap();
        prop_assert!(hermitian_deviation(&qubit_matrix(&q, layout.width)) < 1e-9);
        let p = canonicalize(&q, layout.width).unwrap();
        prop_assert!((hamiltonian_matrix(&p).unwrap() - qubit_matrix(&q, layout.width)).norm() < 1e-9);
    }

    #[test]
    fn folded_durations_are_positive_and_congruent(theta in -50.0f64..50.0) {
        let f = fold_duration(theta);
        let tau = std::f64::consts::TAU;
        prop_assert!(f > 0.0 && f <= tau);
        let k = ((theta - f) / tau).round();
        prop_assert!((theta - f - k * tau).abs() < 1e-9);
    }

    #[test]
    fn gadget_output_locality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let h = common::hamiltonian(&mut r, n, 3, n);
        let out = gadgetize(&h, None).unwrap();
        prop_assert!(is_two_local(&out.hamiltonian));
        prop_assert_eq!(out.hamiltonian.max_locality(), h.max_locality().min(2));
        let extra: usize = out.ancilla_map.iter().map(Vec::len).sum();
        prop_assert_eq!(out.hamiltonian.width, n + extra);
    }

    #[test]
    fn distance_is_a_metric_up_to_phase(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let (u, v, w) = (random_unitary(&mut r, n), random_unitary(&mut r, n), random_unitary(&mut r, n));
        let d = |a: &Dense<f64>, b: &Dense<f64>| distance(a, b, DistanceMode::Exact);
        prop_assert!((d(&u, &v) - d(&v, &u)).abs() < 1e-9);
        prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-9);
        let phase = C::from_polar(1.0, r.gen_range(-3.0..3.0));
        prop_assert!(distance(&u, &(&u * phase), DistanceMode::GlobalPhase) < 1e-9);
        let g = |a: &Dense<f64>, b: &Dense<f64>| distance(a, b, DistanceMode::GlobalPhase);
        prop_assert!((g(&u, &v) - g(&v, &u)).abs() < 1e-9);
    }

    #[test]
    fn synthesized_plan_matches_the_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let h: PauliHamiltonian<f64> = common::hamiltonian(&mut r, n, 4, n);
        let plan = plan_standard(n, &order_terms(&h, &[]), r.gen_range(0.1..1.0), r.gen_range(1..=3), 0.0).unwrap();
        let c = synth_plan_digital(&plan);
        let u = circuit_to_matrix(&c).unwrap();
        prop_assert!(distance(&u, &sqc::trotter::plan_unitary(&plan), DistanceMode::Exact) < 1e-9);
    }

    #[test]
    fn circuit_json_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let h = common::hamiltonian(&mut r, n, 3, n);
        let plan = plan_standard(n, &order_terms(&h, &[]), 0.5, 1, 0.0).unwrap();
        let c = synth_plan_digital(&plan);
        let text = serde_json::to_string(&c).unwrap();
        let back: Circuit<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert!(to_qasm(&c).lines().count() == 4 + c.gates.len());
    }
}
