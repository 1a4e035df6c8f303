//! Quantum operations in Kraus form, Choi matrices and process matrices.
//!
//! Choi matrices live on input⊗output with index `a·d + b`:
//! `C = Σ_m (I⊗E_m)|ψ⟩⟨ψ|(I⊗E_m)†`, `|ψ⟩ = (1/√d)Σ_k|kk⟩`.

use crate::bases::{max_entangled, BasisSet};
use crate::error::{dim_err, Error, Result};
use crate::matrix::{herm_eig_tol, kron, partial_trace, ComplexMatrix, C64, ZERO};
use crate::Tolerances;

/// A trace-non-increasing operation `ρ ↦ Σ_m E_m ρ E_m†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    completeness_defect: ComplexMatrix,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub cp: bool,
    pub tp: bool,
    pub tni: bool,
    /// Frobenius norm of `I − Σ E†E` (or of `I − d·Tr_O C` for Choi input).
    pub defect_norm: f64,
    /// Smallest eigenvalue of `I − Σ E†E`.
    pub defect_min_eig: f64,
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eig: f64,
}

fn kraus_shape(kraus: &[ComplexMatrix]) -> Result<usize> {
    let Some(first) = kraus.first() else {
        return dim_err("a channel needs at least one Kraus operator");
    };
    let d = first.rows();
    if d == 0 {
        return dim_err("Kraus operators must be non-empty");
    }
    if let Some(k) = kraus.iter().find(|k| k.rows() != d || k.cols() != d) {
        return dim_err(format!(
            "Kraus operator of shape {}x{} among {d}x{d} operators",
            k.rows(),
            k.cols()
        ));
    }
    Ok(d)
}

fn completeness(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let sum = kraus
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, e| &acc + &(&e.adjoint() * e));
    (&ComplexMatrix::identity(d) - &sum).hermitian_part()
}

/// Checks a raw Kraus list. Fails with [`Error::InvalidChannel`] when
/// `Σ E†E ≰ I` beyond `tol.psd`.
pub fn validate_kraus(kraus: &[ComplexMatrix], tol: &Tolerances) -> Result<ValidationReport> {
    let d = kraus_shape(kraus)?;
    let defect = completeness(kraus, d);
    let min_eig = *herm_eig_tol(&defect, tol.herm)?.values.last().unwrap();
    if min_eig < -tol.psd {
        return Err(Error::InvalidChannel(format!(
            "Σ E†E exceeds the identity (defect eigenvalue {min_eig:e})"
        )));
    }
    let choi = choi_of_kraus(kraus, d);
    let choi_min = *herm_eig_tol(&choi, tol.herm)?.values.last().unwrap();
    let defect_max = defect.max_abs();
    Ok(ValidationReport {
        cp: choi_min >= -tol.psd,
        tp: defect_max <= tol.psd,
        tni: true,
        defect_norm: defect.frobenius_norm(),
        defect_min_eig: min_eig,
        choi_min_eig: choi_min,
    })
}

impl Channel {
    /// Builds a channel, rejecting Kraus sets with `Σ E†E ≰ I`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerances(kraus, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        validate_kraus(&kraus, tol)?;
        let dim = kraus[0].rows();
        let completeness_defect = completeness(&kraus, dim);
        Ok(Self {
            dim,
            kraus,
            completeness_defect,
        })
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(Tolerances::DEFAULT.recon) {
            return Err(Error::Contract("operator is not unitary".into()));
        }
        Self::new(vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(d)]).expect("identity channel")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn completeness_defect(&self) -> &ComplexMatrix {
        &self.completeness_defect
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_defect.max_abs() <= Tolerances::DEFAULT.psd
    }

    /// `Σ_m E_m ρ E_m†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return dim_err(format!("{}x{} state for a d={} channel", rho.rows(), rho.cols(), self.dim));
        }
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, e| &acc + &e.conjugate(rho)))
    }
}

/// Validation of an existing channel (always TNI by construction).
pub fn validate(ch: &Channel) -> Result<ValidationReport> {
    validate_kraus(ch.kraus(), &Tolerances::DEFAULT)
}

/// Choi representation of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps a `d²×d²` Hermitian matrix. Positivity is checked separately
    /// by [`validate_choi`] so that non-CP inputs can still be reported.
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return dim_err(format!(
                "Choi matrix of a d={dim} channel must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.rows(),
                matrix.cols()
            ));
        }
        if !matrix.is_hermitian(Tolerances::DEFAULT.herm) {
            return Err(Error::Contract("Choi matrix is not Hermitian".into()));
        }
        Ok(Self { dim, matrix })
    }

    /// Wraps a square matrix of side `d²`, inferring `d`.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return dim_err(format!("{n} is not a perfect square"));
        }
        Self::new(d, matrix)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr_O C`, the input marginal.
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, &[self.dim, self.dim], &[0]).expect("square Choi")
    }
}

/// Positivity and marginal conditions of a Choi matrix.
pub fn validate_choi(c: &ChoiMatrix, tol: &Tolerances) -> Result<ValidationReport> {
    let d = c.dim();
    let choi_min = *herm_eig_tol(c.matrix(), tol.herm)?.values.last().unwrap();
    // Σ E†E = d·(Tr_O C)^T
    let gram = c.input_marginal().transpose().scale_real(d as f64);
    let defect = (&ComplexMatrix::identity(d) - &gram).hermitian_part();
    let defect_min = *herm_eig_tol(&defect, tol.herm)?.values.last().unwrap();
    Ok(ValidationReport {
        cp: choi_min >= -tol.psd,
        tp: defect.max_abs() <= tol.psd,
        tni: defect_min >= -tol.psd,
        defect_norm: defect.frobenius_norm(),
        defect_min_eig: defect_min,
        choi_min_eig: choi_min,
    })
}

fn choi_of_kraus(kraus: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let psi = max_entangled(d);
    let id = ComplexMatrix::identity(d);
    kraus.iter().fold(ComplexMatrix::zeros(d * d, d * d), |acc, e| {
        let v = kron(&id, e).apply(&psi);
        &acc + &v.projector()
    })
}

pub fn to_choi(ch: &Channel) -> ChoiMatrix {
    ChoiMatrix {
        dim: ch.dim(),
        matrix: choi_of_kraus(ch.kraus(), ch.dim()),
    }
}

/// Choi matrix of an arbitrary Kraus list, without the `Σ E†E ≤ I` check.
pub fn kraus_choi(kraus: &[ComplexMatrix]) -> Result<ChoiMatrix> {
    let d = kraus_shape(kraus)?;
    Ok(ChoiMatrix {
        dim: d,
        matrix: choi_of_kraus(kraus, d),
    })
}

/// `d·Tr_I[(ρ^T⊗I)C]`, which equals the Kraus action under the normalized
/// maximally entangled reference state.
pub fn apply_choi(c: &ChoiMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = c.dim();
    if rho.rows() != d || rho.cols() != d {
        return dim_err(format!("{}x{} state for a d={d} Choi matrix", rho.rows(), rho.cols()));
    }
    let m = c.matrix();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for s in 0..d {
            let mut acc = ZERO;
            for a in 0..d {
                for b in 0..d {
                    acc += rho[(b, a)] * m[(b * d + r, a * d + s)];
                }
            }
            out[(r, s)] = acc * d as f64;
        }
    }
    Ok(out)
}

/// Minimal Kraus form from the spectral decomposition of `C`.
///
/// Each eigenvector `√(d·p_x)|ψ_x⟩` is reshaped with the input slot as the
/// column index. Eigenvalues at or below `τ_supp` are dropped.
pub fn from_choi(c: &ChoiMatrix) -> Result<Channel> {
    from_choi_tol(c, &Tolerances::DEFAULT)
}

pub fn from_choi_tol(c: &ChoiMatrix, tol: &Tolerances) -> Result<Channel> {
    let d = c.dim();
    let eig = herm_eig_tol(c.matrix(), tol.herm)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol.psd {
            return Err(Error::NotAChannel(format!("Choi matrix has eigenvalue {min:e}")));
        }
    }
    let mut kraus = Vec::new();
    for (x, &p) in eig.values.iter().enumerate() {
        if p <= tol.supp {
            continue;
        }
        let s = (d as f64 * p).sqrt();
        kraus.push(ComplexMatrix::from_fn(d, d, |r, k| eig.vectors[(k * d + r, x)] * s));
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(d, d));
    }
    Channel::with_tolerances(kraus, tol).map_err(|e| match e {
        Error::InvalidChannel(m) => Error::NotAChannel(m),
        other => other,
    })
}

/// Basis-relative process matrix `ξ` with `Φ(σ) = Σ_ij ξ_ij F_i σ F_j†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    pub dim: usize,
    pub xi: ComplexMatrix,
}

impl ProcessMatrix {
    pub fn apply(&self, basis: &BasisSet, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
        if basis.dim() != self.dim || sigma.rows() != self.dim {
            return dim_err("process matrix, basis and state dimensions differ");
        }
        let ops = basis.ops();
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, fi) in ops.iter().enumerate() {
            let left = fi * sigma;
            for (j, fj) in ops.iter().enumerate() {
                let x = self.xi[(i, j)];
                if x.norm() == 0.0 {
                    continue;
                }
                out = &out + &(&left * &fj.adjoint()).scale(x);
            }
        }
        Ok(out)
    }

    /// `Σ_ij ξ_ij F_j†F_i`, the identity for trace-preserving channels.
    pub fn completeness(&self, basis: &BasisSet) -> ComplexMatrix {
        let ops = basis.ops();
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, fi) in ops.iter().enumerate() {
            for (j, fj) in ops.iter().enumerate() {
                out = &out + &(&fj.adjoint() * fi).scale(self.xi[(i, j)]);
            }
        }
        out
    }
}

/// `a_mi = Tr(F_i†E_m)/d`, `ξ_ij = Σ_m a_mi a*_mj`.
pub fn process_matrix(ch: &Channel, b: &BasisSet) -> Result<ProcessMatrix> {
    if b.dim() != ch.dim() {
        return dim_err(format!("basis dim {} vs channel dim {}", b.dim(), ch.dim()));
    }
    let n = b.len();
    let coeffs: Vec<Vec<C64>> = ch
        .kraus()
        .iter()
        .map(|e| b.coefficients(e))
        .collect::<Result<_>>()?;
    let xi = ComplexMatrix::from_fn(n, n, |i, j| coeffs.iter().map(|a| a[i] * a[j].conj()).sum());
    Ok(ProcessMatrix { dim: ch.dim(), xi })
}

/// `b` followed by `a`: Kraus set `{A_i B_j}`.
pub fn compose(a: &Channel, b: &Channel) -> Result<Channel> {
    if a.dim() != b.dim() {
        return dim_err(format!("cannot compose d={} with d={}", a.dim(), b.dim()));
    }
    let mut kraus = Vec::with_capacity(a.kraus().len() * b.kraus().len());
    for x in a.kraus() {
        for y in b.kraus() {
            kraus.push(x * y);
        }
    }
    Channel::new(kraus)
}

/// Kraus set `{A_i ⊗ B_j}`.
pub fn tensor(a: &Channel, b: &Channel) -> Result<Channel> {
    let mut kraus = Vec::with_capacity(a.kraus().len() * b.kraus().len());
    for x in a.kraus() {
        for y in b.kraus() {
            kraus.push(kron(x, y));
        }
    }
    Channel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::schwinger_basis;
    use crate::matrix::{pauli, StateVector, ONE};
    use crate::random::{random_channel, random_density, rng};

    #[test]
    fn identity_validates() {
        let r = validate(&Channel::identity(2)).unwrap();
        assert!(r.cp && r.tp && r.tni);
    }

    #[test]
    fn half_sigma_x_is_selective() {
        let ch = Channel::new(vec![pauli::x().scale_real(std::f64::consts::FRAC_1_SQRT_2)]).unwrap();
        let r = validate(&ch).unwrap();
        assert!(r.cp && !r.tp && r.tni);
        assert!((to_choi(&ch).trace() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_is_tp() {
        let p: f64 = 0.5;
        let [i, x, y, z] = pauli::all();
        let a = (1.0 - 3.0 * p / 4.0).sqrt();
        let b = (p / 4.0).sqrt();
        let ch = Channel::new(vec![i.scale_real(a), x.scale_real(b), y.scale_real(b), z.scale_real(b)]).unwrap();
        assert!(validate(&ch).unwrap().tp);
    }

    #[test]
    fn overcomplete_kraus_rejected() {
        let err = Channel::new(vec![ComplexMatrix::identity(2), pauli::x()]).unwrap_err();
        assert!(matches!(err, Error::InvalidChannel(_)));
    }

    #[test]
    fn identity_choi_is_bell_projector() {
        let c = to_choi(&Channel::identity(2));
        let bell = max_entangled(2).projector();
        assert!(c.matrix().max_abs_diff(&bell) < 1e-15);
        let marginal = c.input_marginal();
        assert!(marginal.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn dephasing_choi_by_direct_sum() {
        let p0 = StateVector::basis(2, 0).projector();
        let p1 = StateVector::basis(2, 1).projector();
        let c = to_choi(&Channel::new(vec![p0, p1]).unwrap());
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 0)] = C64::new(0.5, 0.0);
        expected[(3, 3)] = C64::new(0.5, 0.0);
        assert!(c.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn apply_choi_examples() {
        let mut g = rng(31);
        let rho = random_density(&mut g, 3);
        let out = apply_choi(&to_choi(&Channel::identity(3)), &rho).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-14);

        let flip = to_choi(&Channel::new(vec![pauli::x()]).unwrap());
        let out = apply_choi(&flip, &StateVector::basis(2, 0).projector()).unwrap();
        assert!(out.max_abs_diff(&StateVector::basis(2, 1).projector()) < 1e-15);
        assert!(matches!(apply_choi(&flip, &rho), Err(Error::Dimension(_))));
    }

    #[test]
    fn from_choi_identity_gives_single_kraus() {
        let ch = from_choi(&to_choi(&Channel::identity(2))).unwrap();
        assert_eq!(ch.kraus().len(), 1);
        let k = &ch.kraus()[0];
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(k.max_abs_diff(&ComplexMatrix::identity(2).scale(phase)) < 1e-12);
    }

    #[test]
    fn from_choi_rejects_negative() {
        let bad = ChoiMatrix::new(2, kron(&pauli::z(), &ComplexMatrix::identity(2)).scale_real(0.25)).unwrap();
        assert!(matches!(from_choi(&bad), Err(Error::NotAChannel(_))));
    }

    #[test]
    fn process_matrix_of_identity() {
        let b = schwinger_basis(3).unwrap();
        let xi = process_matrix(&Channel::identity(3), &b).unwrap().xi;
        let mut expected = ComplexMatrix::zeros(9, 9);
        expected[(0, 0)] = ONE;
        assert!(xi.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn process_matrix_reproduces_channel() {
        let mut g = rng(37);
        let b = schwinger_basis(2).unwrap();
        let ch = random_channel(&mut g, 2, 3);
        let pm = process_matrix(&ch, &b).unwrap();
        let rho = random_density(&mut g, 2);
        let direct = ch.apply(&rho).unwrap();
        assert!(pm.apply(&b, &rho).unwrap().max_abs_diff(&direct) < 1e-12);
        assert!(pm.completeness(&b).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn compose_and_tensor() {
        let mut g = rng(41);
        let rho = random_density(&mut g, 2);
        let x = Channel::new(vec![pauli::x()]).unwrap();
        let z = Channel::new(vec![pauli::z()]).unwrap();
        let xz = &pauli::x() * &pauli::z();
        let out = compose(&x, &z).unwrap().apply(&rho).unwrap();
        assert!(out.max_abs_diff(&xz.conjugate(&rho)) < 1e-14);

        let id4 = tensor(&Channel::identity(2), &Channel::identity(2)).unwrap();
        assert_eq!(id4.kraus()[0], ComplexMatrix::identity(4));
        assert!(matches!(compose(&x, &Channel::identity(3)), Err(Error::Dimension(_))));
    }
}
