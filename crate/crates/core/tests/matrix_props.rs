use chansup::matrix::{herm_eig, kron, partial_trace, rel_entropy, svd, von_neumann_entropy, Divergence};
use chansup::random::{haar_unitary, random_density, random_matrix, rng};
use chansup::{ComplexMatrix, C64};
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let mut r = rng(seed);
        let (x, y, z) = (random_matrix(&mut r, a, b), random_matrix(&mut r, b, c), random_matrix(&mut r, c, a));
        let left = kron(&kron(&x, &y), &z);
        let right = kron(&x, &kron(&y, &z));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(&mut r, 2, 2), random_matrix(&mut r, 3, 3));
        let (c, d) = (random_matrix(&mut r, 2, 2), random_matrix(&mut r, 3, 3));
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let n = da * db;
        let (x, y) = (random_matrix(&mut r, n, n), random_matrix(&mut r, n, n));
        let s = C64::new(0.3, -1.7);
        let combo = &x + &y.scale(s);
        for keep in [0usize, 1] {
            let lhs = partial_trace(&combo, &[da, db], &[keep]).unwrap();
            let rhs = &partial_trace(&x, &[da, db], &[keep]).unwrap()
                + &partial_trace(&y, &[da, db], &[keep]).unwrap().scale(s);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            prop_assert!((lhs.trace() - combo.trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_density(&mut r, 2), random_density(&mut r, 3));
        let ab = kron(&a, &b);
        prop_assert!(partial_trace(&ab, &[2, 3], &[0]).unwrap().max_abs_diff(&a) < 1e-12);
        prop_assert!(partial_trace(&ab, &[2, 3], &[1]).unwrap().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn density_spectrum_in_unit_interval(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, n);
        let eig = herm_eig(&rho).unwrap();
        prop_assert!(eig.values.iter().all(|&l| (-1e-9..=1.0 + 1e-9).contains(&l)));
        prop_assert!((eig.values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = eig.map(|l| l);
        prop_assert!(rebuilt.max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn klein_inequality(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let (rho, sigma) = (random_density(&mut r, n), random_density(&mut r, n));
        let d = rel_entropy(&rho, &sigma).unwrap();
        prop_assert!(d.value() >= -1e-10);
        let self_d = rel_entropy(&rho, &rho).unwrap();
        prop_assert!(self_d.value().abs() < 1e-9);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 3);
        let u = haar_unitary(&mut r, 3);
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&u.conjugate(&rho)).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!(a <= 3f64.ln() + 1e-12);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, n);
        let s = svd(&a);
        let sigma = ComplexMatrix::diag(&s.singular_values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let rebuilt = &(&s.u * &sigma) * &s.v_adjoint;
        prop_assert!(rebuilt.max_abs_diff(&a) < 1e-10);
    }
}

#[test]
fn rel_entropy_off_support_is_infinite() {
    let rho = ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let sigma = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    assert_eq!(rel_entropy(&rho, &sigma).unwrap(), Divergence::Infinite);
    assert_eq!(format!("{}", Divergence::Infinite), "inf");
}

#[test]
fn haar_unitaries_are_unitary() {
    let mut r = rng(3);
    for n in 1..6 {
        assert!(haar_unitary(&mut r, n).is_unitary(1e-12));
    }
}

#[test]
fn non_finite_entries_rejected() {
    let bad = vec![C64::new(f64::NAN, 0.0); 4];
    assert!(ComplexMatrix::new(2, 2, bad).is_err());
    assert!(ComplexMatrix::new(2, 3, vec![C64::new(0.0, 0.0); 4]).is_err());
}
