//! Hilbert–Schmidt orthonormal operator bases and their Choi states.
//!
//! A basis on a `d`-dimensional space is a list of `d²` operators with
//! `Tr(F_i† F_j) = d·δ_ij`. Pairs `(m, n)` are flattened to `m·d + n`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{contract_err, dim_err, Error, Result};
use crate::matrix::{check_orthonormal_columns, ComplexMatrix, StateVector, C64, ONE, ZERO};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `√d |i⟩⟨j|`
    NonUnitary,
    /// Clock and shift products `Z^m X^n`.
    Schwinger,
    Custom,
}

impl BasisKind {
    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::NonUnitary => "non_unitary",
            BasisKind::Schwinger => "schwinger",
            BasisKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "non_unitary" | "nonunitary" => Some(BasisKind::NonUnitary),
            "schwinger" => Some(BasisKind::Schwinger),
            "custom" => Some(BasisKind::Custom),
            _ => None,
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated operator basis. `ops` already include any phases.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    dim: usize,
    kind: BasisKind,
    ops: Vec<ComplexMatrix>,
    phases: Option<Vec<C64>>,
}

/// `ξ^k` with `ξ = exp(2πi/d)`.
pub fn root_of_unity(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// Clock operator `Z = Σ_k ξ^k |k⟩⟨k|`.
pub fn clock(d: usize) -> ComplexMatrix {
    ComplexMatrix::diag(&(0..d).map(|k| root_of_unity(d, k as i64)).collect::<Vec<_>>())
}

/// Shift operator `X|k⟩ = |k+1 mod d⟩`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO })
}

/// Largest deviation of `Tr(F_i†F_j)/d` from `δ_ij`.
pub fn gram_residual(dim: usize, ops: &[ComplexMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let g = a.hs_inner(b) / dim as f64;
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

impl BasisSet {
    /// Validates and wraps a user-supplied basis.
    pub fn custom(dim: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::checked(dim, BasisKind::Custom, ops, None, Tolerances::DEFAULT.recon)
    }

    fn checked(
        dim: usize,
        kind: BasisKind,
        ops: Vec<ComplexMatrix>,
        phases: Option<Vec<C64>>,
        tol: f64,
    ) -> Result<Self> {
        if dim < 1 {
            return dim_err("basis dimension must be positive");
        }
        if ops.len() != dim * dim {
            return dim_err(format!("{} operators supplied, {} required", ops.len(), dim * dim));
        }
        if let Some(op) = ops.iter().find(|o| o.rows() != dim || o.cols() != dim) {
            return dim_err(format!("operator of shape {}x{} in a d={} basis", op.rows(), op.cols(), dim));
        }
        let residual = gram_residual(dim, &ops);
        if residual > tol {
            return contract_err(format!(
                "operators are not Hilbert–Schmidt orthonormal (residual {residual:e})"
            ));
        }
        Ok(Self {
            dim,
            kind,
            ops,
            phases,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Accumulated phases `f_i`, if any were applied.
    pub fn phases(&self) -> Option<&[C64]> {
        self.phases.as_deref()
    }

    /// The primed basis `{f_i F_i}`. Phases compose with any already present.
    pub fn with_phases(&self, phases: &[C64]) -> Result<Self> {
        if phases.len() != self.ops.len() {
            return dim_err(format!("{} phases for {} operators", phases.len(), self.ops.len()));
        }
        if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > Tolerances::DEFAULT.recon) {
            return Err(Error::InvalidPhase(format!("phase {p} is not unit modulus")));
        }
        let ops = self.ops.iter().zip(phases).map(|(o, p)| o.scale(*p)).collect();
        let combined = match &self.phases {
            Some(old) => old.iter().zip(phases).map(|(a, b)| a * b).collect(),
            None => phases.to_vec(),
        };
        Ok(Self {
            dim: self.dim,
            kind: self.kind,
            ops,
            phases: Some(combined),
        })
    }

    pub fn gram_residual(&self) -> f64 {
        gram_residual(self.dim, &self.ops)
    }

    /// Expansion coefficients `Tr(F_i† A)/d`, so that `A = Σ_i coeff_i F_i`.
    pub fn coefficients(&self, a: &ComplexMatrix) -> Result<Vec<C64>> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return dim_err("operator dimension differs from basis dimension");
        }
        Ok(self.ops.iter().map(|f| f.hs_inner(a) / self.dim as f64).collect())
    }

    /// The Choi states `|ψ_i⟩ = (I⊗F_i)|ψ⟩`. Always orthonormal for a
    /// validated basis.
    pub fn choi_basis(&self) -> ChoiBasis {
        let d = self.dim;
        let s = 1.0 / (d as f64).sqrt();
        let states = self
            .ops
            .iter()
            .map(|f| {
                let mut a = vec![ZERO; d * d];
                for k in 0..d {
                    for r in 0..d {
                        a[k * d + r] = f[(r, k)] * s;
                    }
                }
                StateVector::from_amplitudes(a)
            })
            .collect::<Vec<_>>();
        let matrix = ComplexMatrix::from_columns(&states).expect("equal lengths");
        ChoiBasis { dim: d, states, matrix }
    }
}

/// `{√d |i⟩⟨j|}` in lexicographic `(i, j)` order.
pub fn non_unitary_basis(d: usize) -> Result<BasisSet> {
    if d < 2 {
        return dim_err(format!("basis dimension {d} < 2"));
    }
    let s = C64::new((d as f64).sqrt(), 0.0);
    let ops = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            ComplexMatrix::from_fn(d, d, |r, c| if r == i && c == j { s } else { ZERO })
        })
        .collect();
    BasisSet::checked(d, BasisKind::NonUnitary, ops, None, Tolerances::DEFAULT.recon)
}

/// `{S_mn = Z^m X^n}` in lexicographic `(m, n)` order.
pub fn schwinger_basis(d: usize) -> Result<BasisSet> {
    if d < 2 {
        return dim_err(format!("basis dimension {d} < 2"));
    }
    let ops = (0..d * d).map(|idx| schwinger_op(d, idx / d, idx % d)).collect();
    BasisSet::checked(d, BasisKind::Schwinger, ops, None, Tolerances::DEFAULT.recon)
}

/// `S_mn = Z^m X^n`, i.e. `|k+n⟩⟨k|` with phase `ξ^{m(k+n)}`.
pub fn schwinger_op(d: usize, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + n) % d {
            root_of_unity(d, (m * r) as i64)
        } else {
            ZERO
        }
    })
}

/// Unitary Fourier coefficients `a_lj = ξ^{-lj}/√d`.
pub fn fourier_coefficients(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |l, j| root_of_unity(d, -((l * j) as i64)) * s)
}

/// Converts between the two canonical families.
///
/// Returns the target basis together with the unitary `M` satisfying
/// `to_i = Σ_j M_ij from_j`. The sparse form of `M` is
/// `R_jk = Σ_l a_lj S_{l,(j−k) mod d}` and `S_mn = Σ_k ξ^{km}/√d R_{k,(k−n) mod d}`.
pub fn convert_basis(from: &BasisSet) -> Result<(BasisSet, ComplexMatrix)> {
    let d = from.dim();
    let to = match from.kind() {
        BasisKind::NonUnitary => schwinger_basis(d)?,
        BasisKind::Schwinger => non_unitary_basis(d)?,
        BasisKind::Custom => {
            return Err(Error::UnsupportedConversion(
                "custom bases have no canonical partner family".into(),
            ))
        }
    };
    let n = d * d;
    let mixing = ComplexMatrix::from_fn(n, n, |i, j| from.ops()[j].hs_inner(&to.ops()[i]) / d as f64);
    Ok((to, mixing))
}

/// Choi states of a basis as vectors and as the columns of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiBasis {
    dim: usize,
    states: Vec<StateVector>,
    matrix: ComplexMatrix,
}

impl ChoiBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// `d²×d²` matrix whose column `i` is `|ψ_i⟩`.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Choi-basis representation `⟨ψ_i|C|ψ_j⟩`.
    pub fn represent(&self, c: &ComplexMatrix) -> ComplexMatrix {
        &(&self.matrix.adjoint() * c) * &self.matrix
    }

    /// Inverse of [`ChoiBasis::represent`].
    pub fn embed(&self, coeffs: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.conjugate(coeffs)
    }
}

/// Choi states `(I⊗F_i)|ψ⟩` with `|ψ⟩ = (1/√d)Σ_k|kk⟩`, checked orthonormal.
pub fn choi_basis(b: &BasisSet) -> Result<ChoiBasis> {
    let cb = b.choi_basis();
    check_orthonormal_columns(cb.matrix(), Tolerances::DEFAULT.recon)?;
    Ok(cb)
}

/// The reference maximally entangled state `(1/√d)Σ_k |k⟩⊗|k⟩`.
pub fn max_entangled(d: usize) -> StateVector {
    let s = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut a = vec![ZERO; d * d];
    for k in 0..d {
        a[k * d + k] = s;
    }
    StateVector::from_amplitudes(a)
}
