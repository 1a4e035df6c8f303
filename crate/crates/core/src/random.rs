//! Seeded random matrices, states, channels and super-operations.
//!
//! Everything here draws from a caller-supplied RNG so test suites and the
//! CLI search are reproducible from a single seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::Channel;
use crate::matrix::{ComplexMatrix, StateVector, C64};
use crate::superops::SuperOp;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let mut cols: Vec<StateVector> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v = g.column(c);
        for q in &cols {
            let overlap = q.inner(&v);
            v = v.add(&q.scale(-overlap));
        }
        cols.push(v.normalized().expect("Ginibre columns are independent"));
    }
    ComplexMatrix::from_columns(&cols).expect("equal column lengths")
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector {
    StateVector::from_amplitudes((0..n).map(|_| gaussian(rng)).collect())
        .normalized()
        .expect("nonzero Gaussian vector")
}

/// Full-rank density matrix `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

/// Random isometry `n -> n·blocks`, returned as the list of `n×n` blocks.
fn isometry_blocks<R: Rng + ?Sized>(rng: &mut R, n: usize, blocks: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, n * blocks);
    (0..blocks)
        .map(|b| ComplexMatrix::from_fn(n, n, |r, c| u[(b * n + r, c)]))
        .collect()
}

/// Random CPTP channel with `kraus_count` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, kraus_count: usize) -> Channel {
    Channel::new(isometry_blocks(rng, d, kraus_count)).expect("isometry blocks are complete")
}

pub fn random_unitary_channel<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Channel {
    Channel::new(vec![haar_unitary(rng, d)]).expect("unitary channel")
}

/// The same channel in a different Kraus gauge: `E'_k = Σ_m u_km E_m`.
pub fn remix_kraus<R: Rng + ?Sized>(rng: &mut R, kraus: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, kraus.len());
    (0..kraus.len())
        .map(|k| {
            kraus
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(kraus[0].rows(), kraus[0].cols()), |acc, (m, e)| {
                    &acc + &e.scale(u[(k, m)])
                })
        })
        .collect()
}

/// Random deterministic super-operation on `size×size` matrices.
pub fn random_superop<R: Rng + ?Sized>(rng: &mut R, size: usize, elements: usize) -> SuperOp {
    SuperOp::new(isometry_blocks(rng, size, elements)).expect("isometry blocks are complete")
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut g = rng(1);
        for n in 1..6 {
            assert!(haar_unitary(&mut g, n).is_unitary(1e-12));
        }
    }

    #[test]
    fn random_density_is_a_state() {
        let mut g = rng(2);
        let rho = random_density(&mut g, 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let e = crate::matrix::herm_eig(&rho).unwrap();
        assert!(e.values.iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_matrix(&mut rng(7), 3, 3);
        let b = random_matrix(&mut rng(7), 3, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let p = random_probabilities(&mut rng(4), 9);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
    }
}
