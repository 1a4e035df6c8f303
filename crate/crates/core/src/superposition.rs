//! Superposition-free operations, the dephasing map, the two measures and
//! maximally superposed unitaries.
//!
//! Everything is relative to a [`BasisSet`]: an operation is free when its
//! Choi matrix is diagonal in the Choi states `|ψ_i⟩` of that basis.

use std::fmt;

use rand::Rng;

use crate::bases::{BasisKind, BasisSet};
use crate::channels::{Channel, ChoiMatrix};
use crate::error::{dim_err, Error, Result};
use crate::matrix::{offdiag_l1_of, offdiag_max_of, rel_entropy_tol, ComplexMatrix, Divergence, C64};
use crate::random::random_probabilities;
use crate::Tolerances;

/// Diagonal weights of a free Choi matrix: `Φ = Σ_i p_i F_i·F_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfoDecomposition {
    pub weights: Vec<f64>,
}

impl SfoDecomposition {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    RelativeEntropy,
    L1,
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::RelativeEntropy => "relent",
            MeasureKind::L1 => "l1",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub value: Divergence,
    pub kind: MeasureKind,
    /// `Δ(C)`, the dephased Choi matrix.
    pub closest_free: ChoiMatrix,
}

fn check_dims(c: &ChoiMatrix, b: &BasisSet) -> Result<()> {
    if c.dim() != b.dim() {
        return dim_err(format!("Choi dim {} vs basis dim {}", c.dim(), b.dim()));
    }
    Ok(())
}

/// `⟨ψ_i|C|ψ_j⟩`.
pub fn choi_coefficients(c: &ChoiMatrix, b: &BasisSet) -> Result<ComplexMatrix> {
    check_dims(c, b)?;
    Ok(b.choi_basis().represent(c.matrix()))
}

/// Largest off-diagonal modulus of `C` in the Choi basis.
pub fn offdiag_mass(c: &ChoiMatrix, b: &BasisSet) -> Result<f64> {
    Ok(offdiag_max_of(&choi_coefficients(c, b)?))
}

/// Diagonal weights when every off-diagonal Choi-basis entry is below `τ_free`.
pub fn is_superposition_free(c: &ChoiMatrix, b: &BasisSet) -> Result<Option<SfoDecomposition>> {
    is_superposition_free_tol(c, b, Tolerances::DEFAULT.free)
}

pub fn is_superposition_free_tol(c: &ChoiMatrix, b: &BasisSet, tol_free: f64) -> Result<Option<SfoDecomposition>> {
    let coeffs = choi_coefficients(c, b)?;
    if offdiag_max_of(&coeffs) >= tol_free {
        return Ok(None);
    }
    let weights = (0..coeffs.rows()).map(|i| coeffs[(i, i)].re).collect();
    Ok(Some(SfoDecomposition { weights }))
}

/// `Δ(C) = Σ_i ⟨ψ_i|C|ψ_i⟩ |ψ_i⟩⟨ψ_i|`.
pub fn dephase(c: &ChoiMatrix, b: &BasisSet) -> Result<ChoiMatrix> {
    let cb = b.choi_basis();
    check_dims(c, b)?;
    let coeffs = cb.represent(c.matrix());
    let diag: Vec<C64> = (0..coeffs.rows()).map(|i| C64::new(coeffs[(i, i)].re, 0.0)).collect();
    let m = cb.embed(&ComplexMatrix::diag(&diag)).hermitian_part();
    ChoiMatrix::new(c.dim(), m)
}

/// Free Choi matrix with the given diagonal weights.
pub fn free_choi(b: &BasisSet, weights: &[f64]) -> Result<ChoiMatrix> {
    if weights.len() != b.len() {
        return dim_err(format!("{} weights for {} basis states", weights.len(), b.len()));
    }
    let diag: Vec<C64> = weights.iter().map(|&w| C64::new(w, 0.0)).collect();
    let m = b.choi_basis().embed(&ComplexMatrix::diag(&diag)).hermitian_part();
    ChoiMatrix::new(b.dim(), m)
}

/// Random free Choi matrix of the given trace.
pub fn random_free_choi<R: Rng + ?Sized>(rng: &mut R, b: &BasisSet, trace: f64) -> ChoiMatrix {
    let w: Vec<f64> = random_probabilities(rng, b.len()).into_iter().map(|p| p * trace).collect();
    free_choi(b, &w).expect("weights match basis")
}

/// `M_l1(C) = Σ_{i≠j} |⟨ψ_i|C|ψ_j⟩|`.
pub fn measure_l1(c: &ChoiMatrix, b: &BasisSet) -> Result<MeasureResult> {
    let coeffs = choi_coefficients(c, b)?;
    Ok(MeasureResult {
        value: Divergence::Finite(offdiag_l1_of(&coeffs)),
        kind: MeasureKind::L1,
        closest_free: dephase(c, b)?,
    })
}

/// `M_r(C) = S(C ‖ Δ(C))`, evaluated on `C` as given (no renormalization).
pub fn measure_rel_entropy(c: &ChoiMatrix, b: &BasisSet) -> Result<MeasureResult> {
    measure_rel_entropy_tol(c, b, &Tolerances::DEFAULT)
}

pub fn measure_rel_entropy_tol(c: &ChoiMatrix, b: &BasisSet, tol: &Tolerances) -> Result<MeasureResult> {
    let delta = dephase(c, b)?;
    let value = rel_entropy_tol(c.matrix(), delta.matrix(), tol)?;
    Ok(MeasureResult {
        value,
        kind: MeasureKind::RelativeEntropy,
        closest_free: delta,
    })
}

/// Smallest `S(C‖σ)` over `samples` random free `σ` of trace `trace`.
pub fn random_free_search<R: Rng + ?Sized>(
    rng: &mut R,
    c: &ChoiMatrix,
    b: &BasisSet,
    samples: usize,
    trace: f64,
) -> Result<Divergence> {
    check_dims(c, b)?;
    let mut best = Divergence::Infinite;
    for _ in 0..samples {
        let sigma = random_free_choi(rng, b, trace);
        let v = rel_entropy_tol(c.matrix(), sigma.matrix(), &Tolerances::DEFAULT)?;
        if v.value() < best.value() {
            best = v;
        }
    }
    Ok(best)
}

/// Target unitary whose coefficients give the default `U_max` phases.
fn default_umax_target(kind: BasisKind, d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    let dft = ComplexMatrix::from_fn(d, d, |k, l| crate::bases::root_of_unity(d, -((k * l) as i64)) * s);
    match kind {
        BasisKind::Schwinger if d == 2 => {
            let i = C64::new(0.0, 1.0);
            let [id, x, y, z] = crate::matrix::pauli::all();
            (&(&id + &x.scale(i)) + &(&y.scale(i) + &z.scale(i))).scale_real(0.5)
        }
        BasisKind::Schwinger if d % 2 == 0 => {
            // chirped Fourier transform; the plain one has vanishing
            // clock-shift coefficients at even d
            let chirp: Vec<C64> = (0..d)
                .map(|k| C64::from_polar(1.0, std::f64::consts::PI * (k * k) as f64 / d as f64))
                .collect();
            &dft * &ComplexMatrix::diag(&chirp)
        }
        _ => dft,
    }
}

/// Default phases `f_i` making `(1/d)Σ f_i F_i` unitary.
///
/// The non-unitary family uses `r_kl = e^{−2πikl/d}` (the Fourier transform).
/// The clock-shift family uses `(1, i, i, 1)` at `d = 2`, the Fourier
/// transform at odd `d` and a chirped Fourier transform at even `d`.
/// Phases already carried by the basis are divided out. Custom bases
/// default to all ones.
pub fn default_umax_phases(b: &BasisSet) -> Result<Vec<C64>> {
    let d = b.dim();
    if b.kind() == BasisKind::Custom {
        return Ok(vec![C64::new(1.0, 0.0); b.len()]);
    }
    let target = default_umax_target(b.kind(), d);
    let phases: Vec<C64> = b.ops().iter().map(|f| f.hs_inner(&target)).collect();
    if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidPhase(format!("default phase has modulus {}", p.norm())));
    }
    Ok(phases.into_iter().map(|p| p / p.norm()).collect())
}

/// `U_max = (1/d)Σ_i f_i F_i`, rejected unless unitary within `τ_recon`.
pub fn max_superposed(b: &BasisSet, phases: Option<&[C64]>) -> Result<Channel> {
    let phases = match phases {
        Some(p) => p.to_vec(),
        None => default_umax_phases(b)?,
    };
    if phases.len() != b.len() {
        return dim_err(format!("{} phases for {} basis operators", phases.len(), b.len()));
    }
    if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > Tolerances::DEFAULT.recon) {
        return Err(Error::InvalidPhase(format!("phase {p} is not unit modulus")));
    }
    let u = umax_operator(b, &phases);
    if !u.is_unitary(Tolerances::DEFAULT.recon) {
        return Err(Error::InvalidPhase("(1/d)Σ f_i F_i is not unitary".into()));
    }
    Channel::new(vec![u])
}

fn umax_operator(b: &BasisSet, phases: &[C64]) -> ComplexMatrix {
    let d = b.dim();
    b.ops()
        .iter()
        .zip(phases)
        .fold(ComplexMatrix::zeros(d, d), |acc, (f, p)| &acc + &f.scale(*p))
        .scale_real(1.0 / d as f64)
}

/// The primed basis `{f_i F_i}` for which `U_max = (1/d)Σ_i F'_i`.
pub fn umax_primed_basis(b: &BasisSet) -> Result<BasisSet> {
    let phases = default_umax_phases(b)?;
    max_superposed(b, Some(&phases))?;
    b.with_phases(&phases)
}
