use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use chansup::bases::{max_entangled, non_unitary_basis, schwinger_basis, BasisSet};
use chansup::bipartite::{
    classify, correlation_witness, gamma_state, operator_schmidt, BipartiteChannel, ClassLabel,
};
use chansup::channels::{to_choi, Channel};
use chansup::matrix::{kron, pauli};
use chansup::random::{haar_unitary, random_channel, rng};
use chansup::{ComplexMatrix, StateVector, C64};
use proptest::prelude::*;

fn b2() -> BasisSet {
    schwinger_basis(2).unwrap()
}

fn bip(kraus: Vec<ComplexMatrix>) -> BipartiteChannel {
    BipartiteChannel::new(Channel::new(kraus).unwrap(), (2, 2)).unwrap()
}

fn label(ch: &BipartiteChannel) -> ClassLabel {
    classify(ch, &b2(), &b2()).unwrap().label
}

fn a_causal() -> BipartiteChannel {
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    bip(vec![
        kron(&p0, &pauli::x()).scale_real(FRAC_1_SQRT_2),
        kron(&p1, &pauli::y()).scale_real(FRAC_1_SQRT_2),
        kron(&pauli::x(), &p0).scale_real(FRAC_1_SQRT_2),
        kron(&pauli::y(), &p1).scale_real(FRAC_1_SQRT_2),
    ])
}

#[test]
fn cnot_operator_schmidt_and_gamma() {
    let os = operator_schmidt(&pauli::cnot(), 2, 2).unwrap();
    assert_eq!(os.rank(), 2);
    // |0⟩⟨0|⊗I + |1⟩⟨1|⊗X, normalized in the Hilbert–Schmidt norm
    assert!((os.coefficients[0] - 2.0_f64.sqrt()).abs() < 1e-10);
    assert!((os.coefficients[1] - 2.0_f64.sqrt()).abs() < 1e-10);
    assert!(os.coefficients[2..].iter().all(|c| c.abs() < 1e-10));
    let ch = bip(vec![pauli::cnot()]);
    let g = gamma_state(&ch).unwrap();
    let w = correlation_witness(&g, 4, 4).unwrap();
    assert!((w.pure_entropy.unwrap() - LN_2).abs() < 1e-9);
    assert!(!w.ppt && !w.product);
}

#[test]
fn identity_gamma_is_product_of_max_entangled() {
    let ch = bip(vec![ComplexMatrix::identity(4)]);
    let g = gamma_state(&ch).unwrap();
    let psi = max_entangled(2).projector();
    assert!(g.max_abs_diff(&kron(&psi, &psi)) < 1e-12);
    assert_eq!(label(&ch), ClassLabel::L1Uncorrelated);
}

#[test]
fn a_causal_example_is_locally_orthogonal() {
    let ch = a_causal();
    assert_eq!(label(&ch), ClassLabel::L2Classical);
    let w = correlation_witness(&gamma_state(&ch).unwrap(), 4, 4).unwrap();
    assert!(w.negativity.abs() < 1e-10);
}

#[test]
fn pauli_pairs_gamma_is_classical() {
    let pairs: Vec<ComplexMatrix> = pauli::all().iter().map(|p| kron(p, p).scale_real(0.5)).collect();
    let w = correlation_witness(&gamma_state(&bip(pairs)).unwrap(), 4, 4).unwrap();
    assert!(w.ppt && w.classical_diag && !w.product);
}

#[test]
fn local_dephasing_gives_separable_gamma() {
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    let id = ComplexMatrix::identity(2);
    let ch = bip(vec![kron(&p0, &id), kron(&p1, &id)]);
    assert_eq!(label(&ch), ClassLabel::L1Uncorrelated);
    let w = correlation_witness(&gamma_state(&ch).unwrap(), 4, 4).unwrap();
    assert!(w.product && w.ppt);
}

#[test]
fn classical_quantum_labels() {
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    let s = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let half = FRAC_1_SQRT_2;
    // A factors orthogonal, B factors {I, diag(1, i)} overlap
    let g1 = bip(vec![kron(&p0, &pauli::id()), kron(&p1, &s)]);
    assert_eq!(label(&g1), ClassLabel::G1ClassicalQuantum);
    let g2 = bip(vec![kron(&pauli::id(), &p0), kron(&s, &p1)]);
    assert_eq!(label(&g2), ClassLabel::G2QuantumClassical);
    let g3 = bip(vec![
        kron(&pauli::id(), &pauli::id()).scale_real(half),
        kron(&s, &s).scale_real(half),
    ]);
    assert_eq!(label(&g3), ClassLabel::G3QuantumQuantum);
}

#[test]
fn declared_factors_must_reproduce_kraus() {
    let x = pauli::x();
    let z = pauli::z();
    let ch = BipartiteChannel::from_factors(vec![(x.clone(), z.clone())]).unwrap();
    assert_eq!(ch.dims(), (2, 2));
    assert_eq!(label(&ch), ClassLabel::L1Uncorrelated);
    let wrong = BipartiteChannel::new(Channel::unitary(kron(&x, &z)).unwrap(), (2, 2))
        .unwrap()
        .with_factors(vec![(z, x)]);
    assert!(wrong.is_err());
}

#[test]
fn gamma_guard_rejects_large_dims() {
    let ch = BipartiteChannel::new(Channel::identity(6), (2, 3)).unwrap();
    assert!(gamma_state(&ch).is_err());
    // classification itself is not limited
    let l = classify(&ch, &b2(), &schwinger_basis(3).unwrap()).unwrap();
    assert_eq!(l.label, ClassLabel::L1Uncorrelated);
}

#[test]
fn reference_bases_do_not_change_the_label() {
    let ch = bip(vec![pauli::cnot()]);
    let nu = non_unitary_basis(2).unwrap();
    assert_eq!(classify(&ch, &nu, &nu).unwrap().label, ClassLabel::G4EntanglementLike);
    assert_eq!(classify(&ch, &b2(), &nu).unwrap().label, ClassLabel::G4EntanglementLike);
}

#[test]
fn cnot_stays_entanglement_like_under_local_unitaries() {
    let mut r = rng(20);
    for _ in 0..20 {
        let pre = kron(&haar_unitary(&mut r, 2), &haar_unitary(&mut r, 2));
        let post = kron(&haar_unitary(&mut r, 2), &haar_unitary(&mut r, 2));
        let ch = bip(vec![&(&post * &pauli::cnot()) * &pre]);
        assert_eq!(label(&ch), ClassLabel::G4EntanglementLike);
        let w = correlation_witness(&gamma_state(&ch).unwrap(), 4, 4).unwrap();
        assert!((w.negativity - 0.5).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn gamma_trace_equals_choi_trace(seed in any::<u64>(), q in 0.1f64..1.0) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, 4, 2);
        let scaled: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e.scale_real(q.sqrt())).collect();
        let sel = Channel::new(scaled).unwrap();
        let t = to_choi(&sel).trace();
        let g = gamma_state(&BipartiteChannel::new(sel, (2, 2)).unwrap()).unwrap();
        prop_assert!((g.trace().re - t).abs() < 1e-10);
        prop_assert!((t - q).abs() < 1e-10);
    }

    #[test]
    fn local_product_channels_have_no_negativity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_channel(&mut r, 2, 2), random_channel(&mut r, 2, 2));
        let kraus: Vec<ComplexMatrix> = a
            .kraus()
            .iter()
            .flat_map(|x| b.kraus().iter().map(move |y| kron(x, y)))
            .collect();
        let ch = bip(kraus);
        let w = correlation_witness(&gamma_state(&ch).unwrap(), 4, 4).unwrap();
        prop_assert!(w.negativity.abs() < 1e-10);
        prop_assert!(w.product);
    }

    #[test]
    fn product_unitaries_are_uncorrelated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = kron(&haar_unitary(&mut r, 2), &haar_unitary(&mut r, 2));
        let ch = bip(vec![u]);
        prop_assert_eq!(label(&ch), ClassLabel::L1Uncorrelated);
        let w = correlation_witness(&gamma_state(&ch).unwrap(), 4, 4).unwrap();
        prop_assert!(w.product && w.negativity.abs() < 1e-10);
    }
}
