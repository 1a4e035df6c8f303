//! Local versus non-local superposition of bipartite operations.
//!
//! Classes, in the order they are tested:
//!
//! * `L1`: the operation is a product `Φ_A ⊗ Φ_B`.
//! * `L2`, `G1`, `G2`, `G3`: every Kraus element is a product `A_k ⊗ B_k`;
//!   the label records which of the local families `{A_k}`, `{B_k}` are
//!   Hilbert–Schmidt orthogonal (both, only `A`, only `B`, neither).
//! * `G4`: no product Kraus form exists.
//!
//! The correlation state `γ` is the Choi state of the operation with the
//! reference copies placed next to their systems (`A, A′, B, B′`).

use std::fmt;

use crate::bases::{max_entangled, BasisSet};
use crate::channels::{from_choi, to_choi, Channel};
use crate::error::{contract_err, dim_err, Result};
use crate::matrix::{herm_eig, kron, partial_trace, svd, von_neumann_entropy, ComplexMatrix, StateVector, C64};
use crate::random::{random_hermitian, rng};
use crate::Tolerances;

/// Singular values below this are treated as zero; closer than this are degenerate.
pub const SCHMIDT_TOL: f64 = 1e-9;

/// A channel on `A⊗B` with its local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteChannel {
    dims: (usize, usize),
    channel: Channel,
    factors: Option<Vec<(ComplexMatrix, ComplexMatrix)>>,
}

impl BipartiteChannel {
    pub fn new(channel: Channel, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != channel.dim() {
            return dim_err(format!(
                "local dims {}x{} do not match channel dimension {}",
                dims.0,
                dims.1,
                channel.dim()
            ));
        }
        Ok(Self {
            dims,
            channel,
            factors: None,
        })
    }

    /// Builds the channel from declared local factors `E_k = A_k ⊗ B_k`.
    pub fn from_factors(factors: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let Some((a0, b0)) = factors.first() else {
            return dim_err("no Kraus factors given");
        };
        let dims = (a0.rows(), b0.rows());
        let kraus = factors.iter().map(|(a, b)| kron(a, b)).collect();
        let mut out = Self::new(Channel::new(kraus)?, dims)?;
        out.factors = Some(factors);
        Ok(out)
    }

    /// Attaches declared factors, checking they reproduce the Kraus list.
    pub fn with_factors(mut self, factors: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        if factors.len() != self.channel.kraus().len() {
            return contract_err("one factor pair per Kraus operator is required");
        }
        for ((a, b), e) in factors.iter().zip(self.channel.kraus()) {
            if a.rows() != self.dims.0 || b.rows() != self.dims.1 || !a.is_square() || !b.is_square() {
                return dim_err("declared factor has the wrong local dimension");
            }
            if kron(a, b).max_abs_diff(e) > Tolerances::DEFAULT.recon {
                return contract_err("declared factors do not reproduce the Kraus operator");
            }
        }
        self.factors = Some(factors);
        Ok(self)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn factors(&self) -> Option<&[(ComplexMatrix, ComplexMatrix)]> {
        self.factors.as_deref()
    }
}

/// `E = Σ_k s_k A_k ⊗ B_k` with orthonormal local families.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSchmidt {
    pub coefficients: Vec<f64>,
    pub a_ops: Vec<ComplexMatrix>,
    pub b_ops: Vec<ComplexMatrix>,
}

impl OperatorSchmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&s| s > SCHMIDT_TOL).count()
    }
}

/// Operator-Schmidt decomposition via realignment `R[(a,a′),(b,b′)] = E[(a,b),(a′,b′)]`.
pub fn operator_schmidt(e: &ComplexMatrix, da: usize, db: usize) -> Result<OperatorSchmidt> {
    if e.rows() != da * db || e.cols() != da * db {
        return dim_err(format!("{}x{} operator split as {da}x{db}", e.rows(), e.cols()));
    }
    let r = ComplexMatrix::from_fn(da * da, db * db, |row, col| {
        let (a, ap) = (row / da, row % da);
        let (b, bp) = (col / db, col % db);
        e[(a * db + b, ap * db + bp)]
    });
    let s = svd(&r);
    let k = s.singular_values.len();
    let a_ops = (0..k)
        .map(|i| ComplexMatrix::from_fn(da, da, |a, ap| s.u[(a * da + ap, i)]))
        .collect();
    let b_ops = (0..k)
        .map(|i| ComplexMatrix::from_fn(db, db, |b, bp| s.v_adjoint[(i, b * db + bp)]))
        .collect();
    Ok(OperatorSchmidt {
        coefficients: s.singular_values,
        a_ops,
        b_ops,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    L1Uncorrelated,
    L2Classical,
    G1ClassicalQuantum,
    G2QuantumClassical,
    G3QuantumQuantum,
    G4EntanglementLike,
    Unresolved,
}

impl ClassLabel {
    pub fn name(&self) -> &'static str {
        match self {
            ClassLabel::L1Uncorrelated => "L1_uncorrelated",
            ClassLabel::L2Classical => "L2_classical",
            ClassLabel::G1ClassicalQuantum => "G1_classical_quantum",
            ClassLabel::G2QuantumClassical => "G2_quantum_classical",
            ClassLabel::G3QuantumQuantum => "G3_quantum_quantum",
            ClassLabel::G4EntanglementLike => "G4_entanglement_like",
            ClassLabel::Unresolved => "unresolved",
        }
    }

    /// `L1` and `L2` carry no non-local superposition.
    pub fn is_local(&self) -> bool {
        matches!(self, ClassLabel::L1Uncorrelated | ClassLabel::L2Classical)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ClassLabel,
    pub diagnostics: Vec<String>,
}

fn pairwise_orthogonal(ops: &[ComplexMatrix]) -> bool {
    for (i, x) in ops.iter().enumerate() {
        for y in &ops[i + 1..] {
            let scale = x.frobenius_norm() * y.frobenius_norm();
            if x.hs_inner(y).norm() > SCHMIDT_TOL * scale.max(1.0) {
                return false;
            }
        }
    }
    true
}

/// Product factors of every element, or `None` if some element has
/// operator-Schmidt rank above one. Zero elements are dropped.
fn product_factors(kraus: &[ComplexMatrix], da: usize, db: usize) -> Result<Option<Vec<(ComplexMatrix, ComplexMatrix)>>> {
    let mut out = Vec::new();
    for e in kraus {
        let os = operator_schmidt(e, da, db)?;
        match os.rank() {
            0 => continue,
            1 => out.push((
                os.a_ops[0].scale_real(os.coefficients[0]),
                os.b_ops[0].clone(),
            )),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn reference_membership(ops: &[ComplexMatrix], basis: &BasisSet) -> usize {
    ops.iter()
        .filter(|op| {
            let n = op.frobenius_norm();
            basis.ops().iter().any(|f| {
                let overlap = f.hs_inner(op).norm();
                (overlap - n * f.frobenius_norm()).abs() <= 1e-9 * (1.0 + overlap)
            })
        })
        .count()
}

/// Structural classification of a bipartite operation.
///
/// The reference bases only enter the diagnostics (how many local factors
/// are proportional to a reference element); the label depends on the
/// operation alone.
pub fn classify(ch: &BipartiteChannel, basis_a: &BasisSet, basis_b: &BasisSet) -> Result<Classification> {
    let (da, db) = ch.dims();
    if basis_a.dim() != da || basis_b.dim() != db {
        return dim_err("reference bases do not match the local dimensions");
    }
    let mut diagnostics = Vec::new();
    let gamma = gamma_unchecked(ch)?;
    let product_residual = product_residual(&gamma, da * da, db * db)?;
    diagnostics.push(format!("gamma_product_residual={product_residual:.3e}"));
    if product_residual <= Tolerances::DEFAULT.free {
        return Ok(Classification {
            label: ClassLabel::L1Uncorrelated,
            diagnostics,
        });
    }

    let candidates: [(&str, Option<Vec<(ComplexMatrix, ComplexMatrix)>>); 3] = [
        ("declared", ch.factors().map(|f| f.to_vec())),
        ("given", product_factors(ch.channel().kraus(), da, db)?),
        ("canonical", product_factors(from_choi(&to_choi(ch.channel()))?.kraus(), da, db)?),
    ];
    for (source, factors) in candidates {
        let Some(factors) = factors else { continue };
        let factors: Vec<_> = factors
            .into_iter()
            .filter(|(a, b)| a.frobenius_norm() * b.frobenius_norm() > SCHMIDT_TOL)
            .collect();
        let a_ops: Vec<_> = factors.iter().map(|(a, _)| a.clone()).collect();
        let b_ops: Vec<_> = factors.iter().map(|(_, b)| b.clone()).collect();
        let (oa, ob) = (pairwise_orthogonal(&a_ops), pairwise_orthogonal(&b_ops));
        diagnostics.push(format!("product_kraus_source={source}"));
        diagnostics.push(format!("a_family_orthogonal={oa} b_family_orthogonal={ob}"));
        diagnostics.push(format!(
            "reference_factors_a={}/{} reference_factors_b={}/{}",
            reference_membership(&a_ops, basis_a),
            a_ops.len(),
            reference_membership(&b_ops, basis_b),
            b_ops.len()
        ));
        let label = match (oa, ob) {
            (true, true) => ClassLabel::L2Classical,
            (true, false) => ClassLabel::G1ClassicalQuantum,
            (false, true) => ClassLabel::G2QuantumClassical,
            (false, false) => ClassLabel::G3QuantumQuantum,
        };
        return Ok(Classification { label, diagnostics });
    }

    let ranks: Vec<usize> = ch
        .channel()
        .kraus()
        .iter()
        .map(|e| operator_schmidt(e, da, db).map(|o| o.rank()))
        .collect::<Result<_>>()?;
    diagnostics.push(format!("operator_schmidt_ranks={ranks:?}"));
    let spectrum = herm_eig(to_choi(ch.channel()).matrix())?.values;
    let support: Vec<f64> = spectrum.into_iter().filter(|&p| p > Tolerances::DEFAULT.supp).collect();
    let degenerate = support.windows(2).any(|w| (w[0] - w[1]).abs() <= SCHMIDT_TOL);
    if degenerate {
        diagnostics.push("choi_spectrum_degenerate=true".into());
        return Ok(Classification {
            label: ClassLabel::Unresolved,
            diagnostics,
        });
    }
    Ok(Classification {
        label: ClassLabel::G4EntanglementLike,
        diagnostics,
    })
}

/// Moves tensor factors of a state vector: output slot `i` holds input slot `perm[i]`.
fn permute_subsystems(v: &StateVector, dims: &[usize], perm: &[usize]) -> StateVector {
    let n = dims.len();
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = vec![C64::new(0.0, 0.0); v.dim()];
    let mut digits = vec![0usize; n];
    for (idx, amp) in v.amplitudes().iter().enumerate() {
        let mut rem = idx;
        for s in (0..n).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let mut target = 0;
        for (i, &p) in perm.iter().enumerate() {
            target = target * out_dims[i] + digits[p];
        }
        out[target] = *amp;
    }
    StateVector::from_amplitudes(out)
}

fn gamma_unchecked(ch: &BipartiteChannel) -> Result<ComplexMatrix> {
    let (da, db) = ch.dims();
    let id = ComplexMatrix::identity(da * db);
    // |ψ⟩_AA′ ⊗ |ψ⟩_BB′ in the order A, B, A′, B′
    let psi = permute_subsystems(&max_entangled(da).kron(&max_entangled(db)), &[da, da, db, db], &[0, 2, 1, 3]);
    let n = da * da * db * db;
    let mut gamma = ComplexMatrix::zeros(n, n);
    for e in ch.channel().kraus() {
        let v = kron(e, &id).apply(&psi);
        let v = permute_subsystems(&v, &[da, db, da, db], &[0, 2, 1, 3]);
        gamma = &gamma + &v.projector();
    }
    Ok(gamma)
}

/// `γ = [Φ ⊗ I](|ψ⟩⟨ψ|_{AA′} ⊗ |ψ⟩⟨ψ|_{BB′})` ordered `A, A′, B, B′`.
///
/// Limited to `d_A·d_B ≤ 4`.
pub fn gamma_state(ch: &BipartiteChannel) -> Result<ComplexMatrix> {
    let (da, db) = ch.dims();
    if da * db > 4 {
        return dim_err(format!("gamma state limited to d_A·d_B ≤ 4, got {da}x{db}"));
    }
    gamma_unchecked(ch)
}

fn product_residual(gamma: &ComplexMatrix, d1: usize, d2: usize) -> Result<f64> {
    let t = gamma.trace().re;
    if t <= 0.0 {
        return contract_err("gamma has non-positive trace");
    }
    let g = gamma.scale_real(1.0 / t);
    let g1 = partial_trace(&g, &[d1, d2], &[0])?;
    let g2 = partial_trace(&g, &[d1, d2], &[1])?;
    Ok((&g - &kron(&g1, &g2)).frobenius_norm())
}

/// Partial transpose on the second factor: `ρ^{T_2}[(i,j),(k,l)] = ρ[(i,l),(k,j)]`.
pub fn partial_transpose_second(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (i, j) = (r / d2, r % d2);
        let (k, l) = (c / d2, c % d2);
        m[(i * d2 + l, k * d2 + j)]
    })
}

/// Correlation summary of `γ` across `AA′ | BB′`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub product: bool,
    pub ppt: bool,
    /// `(‖γ^{T_B}‖₁ − Tr γ)/2`.
    pub negativity: f64,
    /// `γ` is diagonal in a product of local eigenbases.
    pub classical_diag: bool,
    /// Entropy of the `AA′` marginal when `γ` is pure.
    pub pure_entropy: Option<f64>,
    pub product_residual: f64,
}

/// Witnesses for the cut between the first `d1` and last `d2` dimensions.
pub fn correlation_witness(gamma: &ComplexMatrix, d1: usize, d2: usize) -> Result<CorrelationReport> {
    if gamma.rows() != d1 * d2 || !gamma.is_square() {
        return dim_err(format!("{}x{} state cut as {d1}|{d2}", gamma.rows(), gamma.cols()));
    }
    let tol = Tolerances::DEFAULT;
    let t = gamma.trace().re;
    let eig = herm_eig(gamma)?;
    if eig.values.last().is_some_and(|&l| l < -tol.psd) {
        return contract_err("gamma is not positive semidefinite");
    }
    let product_residual = product_residual(gamma, d1, d2)?;

    let pt = herm_eig(&partial_transpose_second(gamma, d1, d2))?;
    let negativity: f64 = pt.values.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    let ppt = pt.values.last().is_none_or(|&l| l >= -tol.psd);

    let classical_diag = classical_diagonal(gamma, d1, d2)?;

    let rank = eig.values.iter().filter(|&&l| l > tol.supp).count();
    let pure_entropy = if rank == 1 {
        let g1 = partial_trace(&gamma.scale_real(1.0 / t), &[d1, d2], &[0])?;
        Some(von_neumann_entropy(&g1)?.max(0.0))
    } else {
        None
    };

    Ok(CorrelationReport {
        product: product_residual <= tol.free,
        ppt,
        negativity: if negativity < tol.psd { 0.0 } else { negativity },
        classical_diag,
        pure_entropy,
        product_residual,
    })
}

/// Local eigenbases are fixed by perturbing each marginal with a
/// conditional marginal `Tr_B[(I⊗H)γ]` for a fixed random Hermitian `H`;
/// a classically correlated state is diagonal in the resulting product basis.
fn classical_diagonal(gamma: &ComplexMatrix, d1: usize, d2: usize) -> Result<bool> {
    let mut g = rng(0x5eed);
    let h2 = random_hermitian(&mut g, d2);
    let h1 = random_hermitian(&mut g, d1);
    let eps = 0.5;
    let g1 = &partial_trace(gamma, &[d1, d2], &[0])?
        + &partial_trace(&(&kron(&ComplexMatrix::identity(d1), &h2) * gamma).hermitian_part(), &[d1, d2], &[0])?
            .scale_real(eps / h2.frobenius_norm());
    let g2 = &partial_trace(gamma, &[d1, d2], &[1])?
        + &partial_trace(&(&kron(&h1, &ComplexMatrix::identity(d2)) * gamma).hermitian_part(), &[d1, d2], &[1])?
            .scale_real(eps / h1.frobenius_norm());
    let v = kron(&herm_eig(&g1.hermitian_part())?.vectors, &herm_eig(&g2.hermitian_part())?.vectors);
    let rotated = &(&v.adjoint() * gamma) * &v;
    Ok(crate::matrix::offdiag_max_of(&rotated) <= Tolerances::DEFAULT.free)
}
