//! Dense complex linear algebra used by every other module.
//!
//! Matrices are small (at most a few hundred rows) so everything is stored
//! densely in row-major order. The Hermitian eigensolver and the SVD are
//! delegated to `nalgebra`; everything else is written out directly.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{contract_err, dim_err, Result};
use crate::Tolerances;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Every entry must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return dim_err(format!(
                "{} entries supplied for a {}x{} matrix",
                data.len(),
                rows,
                cols
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return contract_err("matrix entries must be finite");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |r, c| rows[r][c])
    }

    /// Real-valued literal, convenient for Pauli matrices and friends.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[StateVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.dim());
        if columns.iter().any(|c| c.dim() != rows) {
            return dim_err("columns of unequal length");
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        Self::from_fn(ket.dim(), bra.dim(), |r, c| ket[r] * bra[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> StateVector {
        StateVector::from_amplitudes((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert–Schmidt inner product `Tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|r| (r..self.cols).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Matrix product with a shape check.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        Ok(self * rhs)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        StateVector::from_amplitudes(
            (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
                .collect(),
        )
    }

    /// `self · m · self†`.
    pub fn conjugate(&self, m: &Self) -> Self {
        &(self * m) * &self.adjoint()
    }

    /// Hermitian part `(m + m†)/2`, used to remove rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Pure-state amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    /// Validated constructor: finite amplitudes with unit norm within `tol`.
    pub fn normalized_from(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return contract_err("state amplitudes must be finite");
        }
        let s = Self { amplitudes };
        if (s.norm_sqr() - 1.0).abs() > tol {
            return contract_err(format!("state has norm² {}, expected 1", s.norm_sqr()));
        }
        Ok(s)
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[k] = ONE;
        Self { amplitudes: a }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: vec![ZERO; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut a = Vec::with_capacity(self.dim() * other.dim());
        for x in &self.amplitudes {
            for y in &other.amplitudes {
                a.push(x * y);
            }
        }
        Self { amplitudes: a }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self, self)
    }

    /// Removes the global phase: the first amplitude with modulus above
    /// `1e-12` becomes real and positive.
    pub fn canonical_phase(&self) -> Self {
        match self.amplitudes.iter().find(|z| z.norm() > 1e-12) {
            Some(z) => {
                let phase = z.conj() / z.norm();
                self.scale(phase)
            }
            None => self.clone(),
        }
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amplitudes[i]
    }
}

/// A non-negative real that may be `+∞` (relative entropy with disjoint supports).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_finite(&self) -> bool {
        matches!(self, Divergence::Finite(_))
    }

    /// Finite value, or `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match self {
            Divergence::Finite(v) => *v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(*v),
            Divergence::Infinite => None,
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Divergence::Infinite => write!(f, "inf"),
        }
    }
}

/// Kronecker product: `(a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * rb, a.cols * cb);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Traces out every subsystem not listed in `keep`.
///
/// Subsystem 0 is the most significant index. The kept subsystems appear in
/// ascending order in the result.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return dim_err(format!(
            "dims {:?} (product {}) do not match a {}x{} matrix",
            dims,
            total,
            m.rows(),
            m.cols()
        ));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return dim_err(format!("keep {:?} out of range for {} subsystems", keep, dims.len()));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        kept[k] = true;
    }
    let kept_dim: usize = dims.iter().zip(&kept).filter(|(_, k)| **k).map(|(d, _)| d).product();

    // Split every full index into (kept index, traced index).
    let split: Vec<(usize, usize)> = (0..total)
        .map(|mut f| {
            let (mut ki, mut kscale, mut ti, mut tscale) = (0, 1, 0, 1);
            for s in (0..dims.len()).rev() {
                let digit = f % dims[s];
                f /= dims[s];
                if kept[s] {
                    ki += digit * kscale;
                    kscale *= dims[s];
                } else {
                    ti += digit * tscale;
                    tscale *= dims[s];
                }
            }
            (ki, ti)
        })
        .collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (f1, &(k1, t1)) in split.iter().enumerate() {
        for (f2, &(k2, t2)) in split.iter().enumerate() {
            if t1 == t2 {
                out[(k1, k2)] += m[(f1, f2)];
            }
        }
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> StateVector {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |r, c| self.vectors[(r, c)] * f(self.values[c]));
        &scaled * &self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    herm_eig_tol(m, Tolerances::DEFAULT.herm)
}

pub fn herm_eig_tol(m: &ComplexMatrix, herm_tol: f64) -> Result<HermEig> {
    if !m.is_square() {
        return dim_err(format!("eigendecomposition of a {}x{} matrix", m.rows(), m.cols()));
    }
    if !m.is_hermitian(herm_tol) {
        return contract_err("matrix is not Hermitian");
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Singular value decomposition `m = U diag(s) V†`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let s = m.to_nalgebra().svd(true, true);
    let u = s.u.expect("svd requested u");
    let vt = s.v_t.expect("svd requested v_t");
    let k = s.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    Svd {
        u: ComplexMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| s.singular_values[i]).collect(),
        v_adjoint: ComplexMatrix::from_fn(k, vt.ncols(), |r, c| vt[(order[r], c)]),
    }
}

/// Von Neumann entropy `-Tr(ρ ln ρ)` in nats; zero eigenvalues contribute nothing.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    let eig = psd_eig(rho, &tol)?;
    Ok(-eig
        .values
        .iter()
        .filter(|&&l| l > tol.supp)
        .map(|l| l * l.ln())
        .sum::<f64>())
}

fn psd_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermEig> {
    let eig = herm_eig_tol(m, tol.herm)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol.psd {
            return contract_err(format!("matrix has negative eigenvalue {min:e}"));
        }
    }
    Ok(eig)
}

/// Quantum relative entropy `S(ρ‖σ) = Tr(ρ ln ρ) − Tr(ρ ln σ)`.
///
/// Logarithms act on the support; returns [`Divergence::Infinite`] when
/// `ρ` has weight above `τ_supp` on the kernel of `σ`.
pub fn rel_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<Divergence> {
    rel_entropy_tol(rho, sigma, &Tolerances::DEFAULT)
}

pub fn rel_entropy_tol(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<Divergence> {
    if rho.rows() != sigma.rows() || rho.cols() != sigma.cols() {
        return dim_err("relative entropy of matrices with different shapes");
    }
    let er = psd_eig(rho, tol)?;
    let es = psd_eig(sigma, tol)?;

    let rho_log_rho: f64 = er
        .values
        .iter()
        .filter(|&&l| l > tol.supp)
        .map(|l| l * l.ln())
        .sum();

    let mut kernel_weight = 0.0;
    let mut rho_log_sigma = 0.0;
    for (k, &mu) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let w = v.inner(&rho.apply(&v)).re;
        if mu > tol.supp {
            rho_log_sigma += w * mu.ln();
        } else {
            kernel_weight += w;
        }
    }
    if kernel_weight > tol.supp {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(rho_log_rho - rho_log_sigma))
}

/// Checks that the columns of `basis` are orthonormal within `tol`.
pub fn check_orthonormal_columns(basis: &ComplexMatrix, tol: f64) -> Result<()> {
    let gram = &basis.adjoint() * basis;
    let residual = gram.max_abs_diff(&ComplexMatrix::identity(basis.cols()));
    if residual > tol {
        return contract_err(format!("basis columns are not orthonormal (residual {residual:e})"));
    }
    Ok(())
}

/// `Σ_{i≠j} |⟨b_i|m|b_j⟩|` for an orthonormal column basis `b`.
pub fn l1_offdiag(m: &ComplexMatrix, basis: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() || basis.rows() != m.rows() {
        return dim_err("basis does not match matrix dimension");
    }
    check_orthonormal_columns(basis, Tolerances::DEFAULT.recon)?;
    Ok(offdiag_l1_of(&basis.adjoint().conjugate_by_columns(m, basis)))
}

impl ComplexMatrix {
    /// `self · m · b` where `self` is already `b†`; spelled out to avoid
    /// an extra adjoint in hot loops.
    pub(crate) fn conjugate_by_columns(&self, m: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        &(self * m) * b
    }
}

pub(crate) fn offdiag_l1_of(m: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if r != c {
                s += m[(r, c)].norm();
            }
        }
    }
    s
}

pub(crate) fn offdiag_max_of(m: &ComplexMatrix) -> f64 {
    let mut s: f64 = 0.0;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if r != c {
                s = s.max(m[(r, c)].norm());
            }
        }
    }
    s
}

/// Trace norm `‖m‖₁` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.values.iter().map(|l| l.abs()).sum())
}

/// Pauli matrices `(I, σx, σy, σz)`.
pub mod pauli {
    use super::{ComplexMatrix, C64, I, ONE, ZERO};

    pub fn id() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(&[&[h, h], &[h, -h]])
    }

    pub fn all() -> [ComplexMatrix; 4] {
        [id(), x(), y(), z()]
    }

    /// `|0⟩⟨0|⊗I + |1⟩⟨1|⊗σx` on two qubits, first qubit controls.
    pub fn cnot() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        m
    }

    #[allow(dead_code)]
    pub(crate) fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
}
