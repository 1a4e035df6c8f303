use chansup::bases::{non_unitary_basis, schwinger_basis};
use chansup::channels::{
    apply_choi, compose, from_choi, process_matrix, tensor, to_choi, validate, validate_choi, validate_kraus, Channel,
    ChoiMatrix,
};
use chansup::matrix::{kron, pauli};
use chansup::random::{random_channel, random_density, remix_kraus, rng};
use chansup::{ComplexMatrix, Error, StateVector, Tolerances};
use proptest::prelude::*;

fn small_channel() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..4, 1usize..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn choi_round_trip((seed, d, k) in small_channel()) {
        let ch = random_channel(&mut rng(seed), d, k);
        let c = to_choi(&ch);
        let again = to_choi(&from_choi(&c).unwrap());
        prop_assert!((again.matrix() - c.matrix()).frobenius_norm() < 1e-9);
        prop_assert!(from_choi(&c).unwrap().kraus().len() <= d * d);
    }

    #[test]
    fn apply_choi_matches_kraus_on_operator_basis((seed, d, k) in small_channel()) {
        let ch = random_channel(&mut rng(seed), d, k);
        let c = to_choi(&ch);
        for i in 0..d {
            for j in 0..d {
                let e = ComplexMatrix::outer(&StateVector::basis(d, i), &StateVector::basis(d, j));
                let lhs = apply_choi(&c, &e).unwrap();
                prop_assert!((&lhs - &ch.apply(&e).unwrap()).frobenius_norm() < 1e-9);
            }
        }
    }

    #[test]
    fn trace_preserving_choi_marginal((seed, d, k) in small_channel()) {
        let c = to_choi(&random_channel(&mut rng(seed), d, k));
        prop_assert!((c.trace() - 1.0).abs() < 1e-10);
        let marginal = c.input_marginal();
        prop_assert!(marginal.max_abs_diff(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)) < 1e-10);
    }

    #[test]
    fn selective_channel_carries_weight((seed, d, k) in small_channel(), q in 0.05f64..1.0) {
        let ch = random_channel(&mut rng(seed), d, k);
        let scaled: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e.scale_real(q.sqrt())).collect();
        let sel = Channel::new(scaled).unwrap();
        prop_assert!(!sel.is_trace_preserving() || q > 1.0 - 1e-9);
        prop_assert!((to_choi(&sel).trace() - q).abs() < 1e-10);
        let rep = validate(&sel).unwrap();
        prop_assert!(rep.cp && rep.tni);
    }

    #[test]
    fn process_matrix_gauge_invariance((seed, d, k) in small_channel()) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d, k);
        for b in [non_unitary_basis(d).unwrap(), schwinger_basis(d).unwrap()] {
            let xi = process_matrix(&ch, &b).unwrap();
            prop_assert!(xi.xi.is_hermitian(1e-10));
            prop_assert!(xi.completeness(&b).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-9);
            for _ in 0..10 {
                let other = Channel::new(remix_kraus(&mut r, ch.kraus())).unwrap();
                let xi2 = process_matrix(&other, &b).unwrap();
                prop_assert!((&xi.xi - &xi2.xi).frobenius_norm() < 1e-9);
            }
            let rho = random_density(&mut r, d);
            prop_assert!((&xi.apply(&b, &rho).unwrap() - &ch.apply(&rho).unwrap()).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn composition_and_tensor_agree_with_sequential_action(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_channel(&mut r, 2, 2), random_channel(&mut r, 2, 3));
        let rho = random_density(&mut r, 2);
        let seq = a.apply(&b.apply(&rho).unwrap()).unwrap();
        prop_assert!((&compose(&a, &b).unwrap().apply(&rho).unwrap() - &seq).frobenius_norm() < 1e-10);
        let sigma = random_density(&mut r, 2);
        let joint = tensor(&a, &b).unwrap().apply(&kron(&rho, &sigma)).unwrap();
        let expected = kron(&a.apply(&rho).unwrap(), &b.apply(&sigma).unwrap());
        prop_assert!((&joint - &expected).frobenius_norm() < 1e-10);
    }
}

#[test]
fn over_complete_kraus_rejected() {
    let e = pauli::id().scale_real(1.1);
    assert!(matches!(Channel::new(vec![e.clone()]), Err(Error::InvalidChannel(_))));
    assert!(matches!(validate_kraus(&[e], &Tolerances::DEFAULT), Err(Error::InvalidChannel(_))));
    let half = pauli::x().scale_real(0.5_f64.sqrt());
    let rep = validate_kraus(&[half], &Tolerances::DEFAULT).unwrap();
    assert!(rep.cp && !rep.tp && rep.tni);
}

#[test]
fn non_positive_choi_is_not_a_channel() {
    // transpose map: Choi is the swap operator / d, which has eigenvalue −1/2
    let mut swap = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            swap[(i * 2 + j, j * 2 + i)] = chansup::C64::new(0.5, 0.0);
        }
    }
    let c = ChoiMatrix::new(2, swap).unwrap();
    let rep = validate_choi(&c, &Tolerances::DEFAULT).unwrap();
    assert!(!rep.cp);
    assert!(rep.choi_min_eig < -0.4);
    assert!(matches!(from_choi(&c), Err(Error::NotAChannel(_))));
}

#[test]
fn identity_choi_is_max_entangled_projector() {
    let c = to_choi(&Channel::identity(3));
    let psi = chansup::bases::max_entangled(3);
    assert!(c.matrix().max_abs_diff(&psi.projector()) < 1e-12);
}

#[test]
fn non_unitary_rejected_by_unitary_constructor() {
    let m = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]);
    assert!(matches!(Channel::unitary(m), Err(Error::Contract(_))));
}
